"""The acceptance suite: one test per criterion, each reported in the summary.

Run with ``pytest tests/test_acceptance.py`` to get one PASS/FAIL line per
criterion at the end of the output.
"""

import contextlib
import io
import itertools
import time

import pytest

from braid import as_braid as AS
from braid import asmi_braid as MI
from braid.cli import main
from braid.desugar import check_kernel, desugar_program, dump_kernel
from braid.errors import EvalError
from braid.kernel import run_deep
from braid.oracle import DagSpec, diamond, generate_dag, oracle_dispatch, oracle_order
from braid.syntax import parse_program
from braid.values import domain, force, lookup

import laws
from conftest import TESTS, Session
from programs import (
    as_chain_program, chain_dispatch, class_order, dag_program, dag_session,
    dispatch_chain, emulated_chain_program, random_chain,
)
from structure import as_links, as_shape, equivalent, mi_links, mi_shape
from test_as import CLASSES, FIELDS, IDEMPOTENCE, LINKS, field as as_field, method_names

DAG_COUNT = 1000
CHAIN_COUNT = 100
LAW_CASES = 10_000


def detail(request, text):
    request.node.user_properties.append(("detail", text))


def cli_output(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


@pytest.mark.criterion(1, "AS bootstrap shape")
def test_c01_as_bootstrap(request):
    start = time.perf_counter()
    s = Session("as")
    elapsed = time.perf_counter() - start
    g = {name: s.eval(name) for name in CLASSES + ["nullclass"]}
    assert len(set(map(id, (g[n] for n in CLASSES)))) == 8
    for name, (sup, cls) in LINKS.items():
        assert as_field(g[name], "super") is g[sup], f"superclass of {name}"
        assert as_field(g[name], "class") is g[cls], f"class of {name}"
    for name in CLASSES:
        assert sorted(domain(AS.getallenv(g[name]))) == ["class", "ivars", "menv", "super"]
        assert method_names(g[name]) == ["dnu", "init", "new", "subclass"]
    for name, (ivars, menv) in FIELDS.items():
        assert as_field(g[name], "ivars") == ivars
        assert sorted(domain(as_field(g[name], "menv"))) == menv
    for meta in ["oc", "cdc", "mcc", "cc"]:
        assert sorted(domain(as_field(g[meta], "menv"))) == []
    assert elapsed < 1.0, f"bootstrap took {elapsed:.3f} s"
    detail(request, f"8 classes, bootstrap {elapsed * 1000:.1f} ms")


@pytest.mark.criterion(2, "point reproduction")
def test_c02_point(request):
    code, out, err = cli_output("run", "--braid", "as", str(TESTS / "sources" / "point.gb"))
    assert (code, out, err) == (0, "10\n100\n", "")
    s = Session("as")
    s.run((TESTS / "sources" / "point.gb").read_text())
    env = AS.getallenv(s.eval("p"))
    assert {k: force(lookup(env, k).value) for k in ("x", "y")} == {"x": 10, "y": 100}
    detail(request, "x = 10, y = 100")


@pytest.mark.criterion(3, "meta-circular idempotence")
def test_c03_idempotence(request):
    s = Session("as")
    s.run(IDEMPOTENCE)
    known = [s.eval(n) for n in CLASSES]
    for name in ["object", "oc", "cd", "mc", "class"]:
        assert equivalent(s.eval(name), s.eval(name + "2"), as_shape, as_links, known), name
    for braid, cdv in [("asmi", "cdv"), ("asmirs", '["supers", "ivars", "menv"]')]:
        m = Session(braid)
        m.run(f"""
let object2 = send (class, "new", [[], ["class"], om])
let class2 = send (class, "new", [[object], {cdv}, cm])
""")
        known = [m.eval("object"), m.eval("class")]
        for name in ["object", "class"]:
            assert equivalent(m.eval(name), m.eval(name + "2"), mi_shape, mi_links, known), (braid, name)
    detail(request, "AS 5 classes, ASMI 2, ASMIRS 2")


@pytest.mark.criterion(4, "linearization conformance")
def test_c04_linearization(request):
    def run():
        start = time.perf_counter()
        mismatches, dispatches, diverging = [], 0, 0
        for seed in range(DAG_COUNT):
            d = generate_dag(seed)
            final = dag_session(d, "asmi")
            first = dag_session(d, "asmirs", "c")
            if oracle_order(d, "final") != oracle_order(d, "first"):
                diverging += 1
            for root in range(d.size):
                if class_order(final, d, root, "final") != oracle_order(d, "final", root):
                    mismatches.append((seed, root, "order_final"))
                if class_order(first, d, root, "first") != oracle_order(d, "first", root):
                    mismatches.append((seed, root, "order_first"))
                for sel in "mn":
                    dispatches += 2
                    if dispatch_chain(final, root, sel) != oracle_dispatch(d, sel, "final", root):
                        mismatches.append((seed, root, sel, "final"))
                    if dispatch_chain(first, root, sel) != oracle_dispatch(d, sel, "first", root):
                        mismatches.append((seed, root, sel, "first"))
        return mismatches, dispatches, diverging, time.perf_counter() - start

    mismatches, dispatches, diverging, elapsed = run_deep(run)
    assert mismatches == []
    assert elapsed < 60, f"took {elapsed:.1f} s"
    detail(request, f"{DAG_COUNT} DAGs ({diverging} with final != first), {dispatches} next-chains, 0 mismatches")


def _diamond_instances(d):
    """(node, left super, right super, shared ancestor) for every diamond in d."""
    for x in range(d.size):
        for p, q in itertools.permutations(d.supers[x], 2):
            for a in sorted(d.ancestors(p) & d.ancestors(q)):
                yield x, p, q, a


def _sharing_program(d):
    """Every node gets a variable plus a setter and getter per ancestor."""
    shape = DagSpec(d.supers, [set()] * d.size, [{f"v{i}"} for i in range(d.size)], d.seed)

    def accessors(i):
        lines, methods = [], []
        for a in sorted(d.ancestors(i)):
            lines.append(f"let meth s{i}_{a} x = v{a} := x")
            lines.append(f"let meth g{i}_{a} () = v{a}")
            methods += [f'("s{i}_{a}" |-> s{i}_{a})', f'("g{i}_{a}" |-> g{i}_{a})']
        return lines, methods

    return dag_program(shape, extra=accessors)


@pytest.mark.criterion(5, "diamond sharing")
def test_c05_diamond_sharing(request):
    def run():
        checked, violations, value = 0, [], 0
        for seed in range(300):
            d = generate_dag(seed)
            instances = list(_diamond_instances(d))
            if not instances:
                continue
            for braid in ("asmi", "asmirs"):
                s = Session(braid)
                s.run(_sharing_program(d))
                for x, p, q, a in instances:
                    value += 1
                    s.run(f'let o = send (cls{x}, "new", [])')
                    s.run(f'send (o, "s{p}_{a}", {value})')
                    seen = s.eval(f'send (o, "g{q}_{a}", ())')
                    g = MI.graph_of(s.eval("o"))
                    holders = [n for n in g.nodes.values() if f"v{a}" in domain(n.ienv)]
                    checked += 1
                    if seen != value or len(holders) != 1:
                        violations.append((seed, braid, x, p, q, a))
        return checked, violations

    checked, violations = run_deep(run)
    assert checked > 0
    assert violations == []
    detail(request, f"{checked} diamond instances, 0 violations")


def _divergent_selectors(d):
    """The first selector assignment, by enumeration, whose two orders dispatch differently."""
    for bits in itertools.product([False, True], repeat=d.size):
        sels = [{"m"} if b else set() for b in bits]
        probe = type(d)(d.supers, sels, d.ivars, d.seed)
        final, first = oracle_dispatch(probe, "m", "final"), oracle_dispatch(probe, "m", "first")
        if final and first and final[0] != first[0]:
            return probe
    return None


@pytest.mark.criterion(7, "strategy divergence witness")
def test_c07_divergence(request):
    d = _divergent_selectors(diamond())
    assert d is not None
    expect_final = oracle_dispatch(d, "m", "final")[0]
    expect_first = oracle_dispatch(d, "m", "first")[0]
    s = Session("asmirs")
    s.run(dag_program(d, "class"))
    s.run(dag_program(d, "c", prefix="alt"))
    default = s.eval(f'send (send (cls{d.top}, "new", []), "m", ())')
    strategy = s.eval(f'send (send (alt{d.top}, "new", []), "m", ())')
    assert default[0] == f"C{expect_final}"
    assert strategy[0] == f"C{expect_first}"
    assert default[0] != strategy[0]
    detail(request, f"default dispatches to node {expect_final}, class c to node {expect_first}")


@pytest.mark.criterion(6, "ASMIRS default equivalence")
def test_c06_corpus(request):
    corpus = sorted((TESTS / "corpus").glob("*.gb"))
    assert len(corpus) >= 20
    different = []
    for path in corpus:
        a = cli_output("run", "--braid", "asmi", str(path))
        b = cli_output("run", "--braid", "asmirs", str(path))
        if a != b or a[0] != 0:
            different.append(path.name)
    assert different == []
    detail(request, f"{len(corpus)} programs byte-identical")


@pytest.mark.criterion(8, "AS emulation")
def test_c08_emulation(request):
    def run():
        mismatches = []
        for seed in range(CHAIN_COUNT):
            chain = random_chain(seed)
            native = Session("as")
            native.run(as_chain_program(chain))
            emulated = Session("asmi")
            emulated.run(emulated_chain_program(chain))
            if chain_dispatch(native, chain) != chain_dispatch(emulated, chain):
                mismatches.append(seed)
        return mismatches

    assert run_deep(run) == []
    detail(request, f"{CHAIN_COUNT} chains, 0 mismatches")


@pytest.mark.criterion(9, "desugaring goldens")
def test_c09_goldens(request):
    golden = TESTS / "golden"
    rules = {
        "curry", "tuple_pattern", "constructor_pattern", "constant_pattern", "alternation",
        "named_function", "meth", "infix", "declaration_sequence", "where", "let_in", "case", "open",
    }
    present = {p.stem for p in golden.glob("*.gb")}
    assert rules <= present, rules - present
    for stem in sorted(present):
        prog = desugar_program(parse_program((golden / f"{stem}.gb").read_text()))
        assert check_kernel(prog)
        assert dump_kernel(prog) + "\n" == (golden / f"{stem}.kernel").read_text(), stem
    text = dump_kernel(desugar_program(parse_program("let meth m p = p")))
    assert "(isntuple 3)" in text and "\\self." in text and "\\next." in text and "|hook|" in text
    s = Session()
    s.run("let meth m p = (self, next, x, p)")
    assert s.show('m (1, 2, "x" |-> 10) 5') == "(1, 2, 10, 5)"
    detail(request, f"{len(present)} goldens, meth checked textually and behaviourally")


@pytest.mark.criterion(10, "kernel laws")
def test_c10_laws(request):
    start = time.perf_counter()
    results = {
        "environment": laws.check_env_laws(LAW_CASES),
        "reify/install": laws.check_reify_install(LAW_CASES),
        "folds": laws.check_folds(LAW_CASES),
        "sharing": laws.check_sharing(LAW_CASES),
    }
    elapsed = time.perf_counter() - start
    assert {k: v[:5] for k, v in results.items() if v} == {}
    assert elapsed < 60, f"took {elapsed:.1f} s"
    detail(request, f"4 suites x {LAW_CASES} cases, 0 failures, {elapsed:.1f} s")


ERROR_PROGRAMS = {
    "as": """
let k1 = send (object, "subclass", ({}, ["a"], {}))
let k2 = send (k1, "subclass", ({}, [], {}))
let bare = send (mc, "new", [nullclass, [], {}])
""",
    "asmi": """
let k1 = send (class, "new", [[object], ["a"], {}])
let k2 = send (class, "new", [[k1, object], [], {}])
let meth bareinit v = self
let bare = send (class, "new", [[], [], "init" |-> bareinit])
""",
    "asmirs": """
let k1 = send (class, "new", [[object], ["a"], {}])
let k2 = send (c, "new", [[k1], [], {}])
let meth bareinit v = self
let bare = send (class, "new", [[], [], "init" |-> bareinit])
""",
}


@pytest.mark.criterion(11, "error-path contract")
def test_c11_errors(request):
    checked = 0
    for braid, program in ERROR_PROGRAMS.items():
        # a small depth limit is the backstop: a loop would surface as a depth error
        s = Session(braid, depth_limit=2000)
        s.run(program)
        receivers = ["object", "class", "k1", "k2", 'send (k1, "new", [])', 'send (k2, "new", [])']
        for recv in receivers:
            with pytest.raises(EvalError, match=r'message \("zzz", 7\) not understood') as exc:
                s.eval(f'send ({recv}, "zzz", 7)')
            assert "depth" not in str(exc.value)
            checked += 1
        with pytest.raises(EvalError, match="no dnu handler") as exc:
            if braid == "as":
                s.eval('send (bare, "new", [])')
            else:
                s.eval('send (send (bare, "new", []), "zzz", 7)')
        checked += 1
        code, _, err = cli_output("run", "--braid", braid, str(TESTS / "sources" / "unknown_selector.gb"))
        assert code == 1 and "not understood" in err
    detail(request, f"{checked} targeted error sends, no loops")
