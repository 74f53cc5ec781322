import pathlib

import pytest

from braid.runtime import new_interpreter

TESTS = pathlib.Path(__file__).parent
_VERDICTS = pytest.StashKey[dict]()


class Session:
    """An interpreter that collects printed lines instead of writing them."""

    def __init__(self, braid=None, **kwargs):
        self.lines = []
        self.traces = []
        self.interp = new_interpreter(braid, out=self.lines.append, trace=self.traces.append, **kwargs)

    def run(self, text):
        return self.interp.run_source(text, echo=False)

    def eval(self, text):
        return self.interp.eval_source(text)

    def show(self, text):
        return self.interp.format(self.eval(text))

    def output(self, text):
        start = len(self.lines)
        self.interp.run_source(text)
        return self.lines[start:]


@pytest.fixture
def session():
    return Session


def program_output(text, braid=None, **kwargs):
    s = Session(braid, **kwargs)
    s.interp.run_source(text)
    return s.lines


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    ok = call.excinfo is None
    detail = dict(item.user_properties).get("detail", "")
    if not ok:
        detail = str(call.excinfo.value).splitlines()[0] if str(call.excinfo.value) else call.excinfo.typename
    item.config.stash.setdefault(_VERDICTS, {})[number] = (title, ok, detail, call.duration)


def pytest_terminal_summary(terminalreporter, config):
    verdicts = config.stash.get(_VERDICTS, {})
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        title, ok, detail, duration = verdicts[number]
        status = "PASS" if ok else "FAIL"
        line = f"criterion {number:2d} {status} {title} ({duration:.2f} s)"
        terminalreporter.write_line(line + (f": {detail}" if detail else ""))
