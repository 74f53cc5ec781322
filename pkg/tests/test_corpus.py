import pytest

from conftest import TESTS, program_output

CORPUS = sorted((TESTS / "corpus").glob("*.gb"))


def test_corpus_size():
    assert len(CORPUS) >= 20


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_default_delivery_matches_multiple_inheritance(path):
    text = path.read_text()
    asmi = program_output(text, "asmi")
    asmirs = program_output(text, "asmirs")
    assert asmi == asmirs
    assert "\n".join(asmi) + "\n" == path.with_suffix(".out").read_text()
