import pytest

from braid.desugar import (
    KApp, KBuiltin, KLam, KTopLet, KVar, check_kernel, desugar, desugar_program, dump_kernel,
)
from braid.errors import DesugarError
from braid.syntax import parse_expr, parse_program
from conftest import TESTS, Session

GOLDEN = TESTS / "golden"
RULES = sorted(p.stem for p in GOLDEN.glob("*.gb"))


def kernel_of(text):
    return desugar_program(parse_program(text))


@pytest.mark.parametrize("rule", RULES)
def test_golden_dump(rule):
    source = (GOLDEN / f"{rule}.gb").read_text()
    expected = (GOLDEN / f"{rule}.kernel").read_text()
    prog = kernel_of(source)
    assert check_kernel(prog)
    assert dump_kernel(prog) + "\n" == expected


def test_every_translation_rule_has_a_golden():
    rules = {
        "curry", "tuple_pattern", "constructor_pattern", "constant_pattern", "alternation",
        "named_function", "meth", "infix", "declaration_sequence", "where", "let_in", "case", "open",
    }
    assert rules <= set(RULES)


def test_meth_yields_hidden_parameter_chain_textually():
    text = dump_kernel(kernel_of("let meth m p = p"))
    assert "(isntuple 3)" in text
    assert "\\self." in text and "\\next." in text
    assert "|hook|" in text


def test_meth_body_sees_self_next_and_ivars():
    s = Session()
    s.run('let meth m p = (self, next, x, y, p)')
    v = s.show('m (1, 2, ("x" |-> 10) & ("y" |-> 20)) 5')
    assert v == "(1, 2, 10, 20, 5)"


def test_meth_ivars_shadow_globals_and_are_assignable():
    s = Session()
    s.run('let x = 0\nlet meth bump () = x := x + 1; x\nlet e = "x" |-> 41')
    assert s.show("bump (eps, eps, e) ()") == "42"
    assert s.show('e @ "x"') == "42"
    assert s.show("x") == "0"


def test_meth_alternation():
    s = Session()
    s.run('let meth m 0 = ("zero", v) | m n = (n, v)')
    e = '("v" |-> "iv")'
    assert s.show(f"m (eps, eps, {e}) 0") == '("zero", "iv")'
    assert s.show(f"m (eps, eps, {e}) 7") == '(7, "iv")'


def test_curried_lambda_is_nested():
    k = desugar(parse_expr(r"\x y. x"))
    assert isinstance(k, KLam) and isinstance(k.body, KLam) and k.param == "x"


def test_infix_is_curried_application():
    k = desugar(parse_expr("a + b"))
    assert k == KApp(KApp(KBuiltin("+"), KVar("a")), KVar("b"))


@pytest.mark.parametrize("arg, expected", [("1", '"a"'), ("2", '"b"'), ("3", "eps")])
def test_alternation_falls_through(arg, expected):
    s = Session()
    s.run('let f 1 = "a" | f 2 = "b"')
    assert s.show(f"f {arg}") == expected


def test_alternation_passes_original_argument_to_second_clause():
    s = Session()
    s.run("let g 0 = 100 | g n = n * 2")
    assert s.show("g 21") == "42"


def test_multi_parameter_clauses():
    s = Session()
    s.run("let add 0 y = y | add x y = x + y")
    assert s.show("add 0 7") == "7"
    assert s.show("add 3 4") == "7"


def test_mixed_clause_names_are_rejected():
    with pytest.raises(DesugarError):
        kernel_of("let f 1 = 1 | g 2 = 2")


def test_top_level_group_is_one_recursive_binding_group():
    prog = kernel_of("let even 0 = true | even n = odd (n - 1)\n    odd 0 = false | odd n = even (n - 1)")
    assert isinstance(prog.items[0], KTopLet)
    assert [name for name, _ in prog.items[0].bindings] == ["even", "odd"]
    s = Session()
    s.run("let even 0 = true | even n = odd (n - 1)\n    odd 0 = false | odd n = even (n - 1)")
    assert s.show("even 10") == "true"


def test_case_arms_and_constructor_patterns():
    s = Session()
    s.run("let classify v = case v of K(x) => x + 1 | J(y) => y * 10 | _ => 0 end")
    assert [s.show(f"classify ({a})") for a in ("K 1", "J 2", "7")] == ["2", "20", "0"]


def test_tuple_and_list_patterns():
    s = Session()
    s.run("let swap (a, b) = (b, a)\nlet sum [] = 0 | sum (x :: l) = x + sum l")
    assert s.show("swap (1, 2)") == "(2, 1)"
    assert s.show("swap (1, 2, 3)") == "eps"
    assert s.show("sum [1, 2, 3]") == "6"


def test_let_and_where_declaration_sequences():
    s = Session()
    assert s.show("let x = 1 y = 2 in x + y") == "3"
    assert s.show("x * y where x = 6 y = 7") == "42"


def test_open_brings_environment_into_scope():
    s = Session()
    assert s.show('open ("a" |-> 1) & ("b" |-> 2) in a + b') == "3"


def test_fresh_names_cannot_be_written_in_source():
    text = dump_kernel(kernel_of("let f (a, b) = a"))
    assert "%" in text
    with pytest.raises(Exception):
        parse_expr("%1")


CORPUS_SEMANTICS = [
    ("let fact 0 = 1 | fact n = n * fact (n - 1)\nfact 6", ["720"]),
    ("let len [] = 0 | len (_ :: l) = 1 + len l\nlen [4, 5, 6]", ["3"]),
    ('case (1, "x") of (1, s) => s ++ "!" end', ['"x!"']),
    ("let compose f g x = f (g x)\ncompose (\\x. x + 1) (\\x. x * 2) 5", ["11"]),
]


@pytest.mark.parametrize("src, expected", CORPUS_SEMANTICS)
def test_semantic_preservation(src, expected):
    s = Session()
    assert s.output(src) == expected
