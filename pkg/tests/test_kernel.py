import pytest

from braid.errors import DepthExceeded, EvalError
from braid.kernel import Interpreter, env_bind, env_concat, env_domain, env_empty, env_lookup
from braid.values import EPS
from conftest import Session


@pytest.fixture
def s():
    return Session()


@pytest.mark.parametrize(
    "src, expected",
    [
        (r"(\x. x) 5", "5"),
        (r"let f = \x. x + y where y = 1 in f 2", "3"),
        ('{} @ "k"', "eps"),
        ('(("k" |-> 1) & ("k" |-> 2)) @ "k"', "2"),
        ('(("a" |-> 1) & ("b" |-> 2)) @ "a"', "1"),
        ("dom {}", "{||}"),
        ('dom (("a" |-> 1) & ("a" |-> 2))', '{|"a"|}'),
        ("foldr (+) (\\x. x) 0 [1, 2, 3]", "6"),
        (r"foldl (\l x. x :: l) (\x. x) [] [1, 2, 3]", "[3, 2, 1]"),
        ("foldr (+) (\\x. x) 7 []", "7"),
        ("splitlistl (2, [1, 2, 3])", "([1, 2], [3])"),
        ("splitlistr (2, [1, 2, 3])", "([1], [2, 3])"),
        (r"find (\x. mod x 2 == 0) eps [1, 3, 5]", "eps"),
        (r"find (\x. mod x 2 == 0) eps [1, 4, 5]", "4"),
        ("(10, 20) ! 1", "10"),
        ('isk "K" (K 5)', "true"),
        ('isk "K" (J 5)', "false"),
        ("stripk (K 5)", "5"),
        ("isntuple 2 (1, 2)", "true"),
        ("isntuple 3 (1, 2)", "false"),
        ("{| 1, 2 |} union {| 2, 3 |}", "{|1, 2, 3|}"),
        ("{| 1, 2, 3 |} \\\\ {| 2 |}", "{|1, 3|}"),
        ("member 2 {| 1, 2 |}", "true"),
        ('str (1, "a")', '"(1, \\"a\\")"'),
        ('"ab" ++ "cd"', '"abcd"'),
        ("[1] ++ [2]", "[1, 2]"),
        ("7 / 2", "3"),
        ("if 1 < 2 then 1 else 2", "1"),
        ('open ("y" |-> 1) in y', "1"),
        (r'(("y" |-> 1) |hook| (\x. x + y)) 2', "3"),
        ("let fact = Y (\\f n. if n == 0 then 1 else n * f (n - 1)) in fact 5", "120"),
        ('envfold (++) (\\k v. [k]) ["seed"] (("a" |-> 1) & {} & ("b" |-> 2))', '["a", "seed", "b"]'),
    ],
)
def test_examples(s, src, expected):
    assert s.show(src) == expected


def test_assignment_replaces_location_contents(s):
    s.run('let e = "i" |-> 1')
    assert s.show("open e in (i := 10; i)") == "10"
    assert s.show('e @ "i"') == "10"


def test_sharing_through_aliases(s):
    s.run('let e1 = "a" |-> 1\nlet e2 = e1 & ("b" |-> 2)\nlet e3 = ("c" |-> 3) & e1')
    s.run("open e2 in a := 99")
    assert s.show('(e1 @ "a", e2 @ "a", e3 @ "a")') == "(99, 99, 99)"


def test_reify_install_round_trip(s):
    s.run(r"let f = (\x. x * k) where k = 3")
    assert s.show("install (reify f, f) 5") == "15"
    assert s.show('install (reify f & ("k" |-> 4), f) 5') == "20"


def test_y_builds_self_referential_value(s):
    s.run(r"let t = Y (\t. (1, t))")
    assert s.show("(t ! 2) == t") == "true"


def test_y_on_a_strict_function_reports_premature_use(s):
    with pytest.raises(EvalError):
        s.eval(r"Y (\x. x + 1)")


def test_depth_guard_stops_divergence():
    s = Session(depth_limit=500)
    s.run("let loop n = loop (n + 1)")
    with pytest.raises(DepthExceeded):
        s.eval("loop 0")


def test_deep_but_finite_recursion_runs():
    s = Session()
    s.run("let count 0 = 0 | count n = 1 + count (n - 1)")
    assert s.show("count 4000") == "4000"


@pytest.mark.parametrize(
    "src, message",
    [
        ("nosuch", "unbound"),
        ("1 2", "as a function"),
        ("if 1 then 2 else 3", "boolean"),
        ('error "boom"', "boom"),
        ("stripk 5", "stripk"),
        ("splitlistl (9, [1, 2])", "splitlist"),
        ("1 / 0", "zero"),
        ("reify 3", "reify"),
    ],
)
def test_runtime_errors(s, src, message):
    with pytest.raises(EvalError) as info:
        s.eval(src)
    assert message in str(info.value)


def test_print_writes_bare_strings(s):
    s.output('print "hi"; print 3')
    assert s.lines == ["hi", "3", "3"]


def test_random_is_seeded():
    a = [Session(seed=7).show("random 1000") for _ in range(2)]
    assert a[0] == a[1]


def test_module_environment_helpers():
    e = env_concat(env_bind("a", 1), env_bind("a", 2))
    assert env_lookup(e, "a") == 2
    assert env_lookup(env_empty(), "a") is EPS
    assert sorted(env_domain(e)) == ["a"]


def test_interpreter_instances_are_independent():
    a, b = Interpreter(out=lambda line: None), Interpreter(out=lambda line: None)
    a.run_source("let x = 1")
    with pytest.raises(EvalError):
        b.eval_source("x")
