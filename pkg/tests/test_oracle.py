import pytest

from braid.oracle import DagSpec, diamond, generate_dag, oracle_dispatch, oracle_order, oracle_paths

R, B, C, A = 3, 1, 2, 0


def test_paths_chain_and_single_node():
    assert len(oracle_paths(DagSpec([[], [0], [1]]))) == 3
    assert oracle_paths(DagSpec([[]])) == [(0,)]


def test_diamond_paths():
    assert oracle_paths(diamond()) == [(R,), (R, B), (R, B, A), (R, C), (R, C, A)]


def test_diamond_orders():
    d = diamond()
    assert oracle_order(d, "final") == [R, B, C, A]
    assert oracle_order(d, "first") == [R, B, A, C]


def test_repeat_free_orders_coincide():
    d = DagSpec([[], [0], [1], [2]])
    assert oracle_order(d, "final") == oracle_order(d, "first") == [3, 2, 1, 0]


def test_dispatch_chains():
    d = DagSpec([[], [0], [0], [1, 2]], selectors=[{"g"}, {"m"}, {"m"}, set()])
    assert oracle_dispatch(d, "zz") == []
    assert oracle_dispatch(d, "g") == [A]
    assert oracle_dispatch(d, "m", "final") == [B, C]
    assert oracle_dispatch(d, "m", "first") == [B, C]


def test_supers_must_be_earlier():
    with pytest.raises(ValueError):
        DagSpec([[1], []])


# outputs generated once from the generator and frozen here
SNAPSHOTS = {
    0: (
        [[], [0], [0], [0], [1, 2], [3, 4], [5]],
        [[], [], ["n"], [], ["m"], ["m"], ["n"]],
        [["v0"], [], ["v2"], ["v3"], [], ["v5"], []],
    ),
    42: (
        [[], [0], [0], [2, 1], [3], [1], [3, 5], [2, 5], [3, 7], [1], [9, 3, 7]],
        [["m", "n"], [], ["n"], [], ["m"], ["m"], ["n"], ["m"], ["m"], [], ["m"]],
        [[], [], ["v2"], ["v3"], [], [], ["v6"], ["v7"], [], [], []],
    ),
    1234: (
        [[], [0], [1], [1], [1], [4], [3, 2, 4], [5]],
        [["n"], ["n"], [], ["n"], ["m"], ["n"], ["m"], ["m", "n"]],
        [["v0"], ["v1"], ["v2"], [], [], ["v5"], ["v6"], []],
    ),
}


@pytest.mark.parametrize("seed", sorted(SNAPSHOTS))
def test_generator_snapshots(seed):
    d = generate_dag(seed)
    supers, selectors, ivars = SNAPSHOTS[seed]
    assert d.supers == supers
    assert [sorted(s) for s in d.selectors] == selectors
    assert [sorted(s) for s in d.ivars] == ivars


@pytest.mark.parametrize("seed", range(200))
def test_generated_dags_respect_limits_and_invariants(seed):
    d = generate_dag(seed, max_nodes=12, max_supers=3)
    assert 1 <= d.size <= 12
    assert all(len(s) <= 3 for s in d.supers)
    for i, supers in enumerate(d.supers):
        # no listed super is reachable through another
        for s in supers:
            assert not any(s in d.ancestors(t) for t in supers if t != s)
    top = d.top
    final, first = oracle_order(d, "final"), oracle_order(d, "first")
    assert sorted(final) == sorted(first) == sorted(d.ancestors(top))
    visits = [p[-1] for p in oracle_paths(d)]
    if len(set(visits)) == len(visits):
        assert final == first


def test_generator_is_deterministic():
    assert generate_dag(99).supers == generate_dag(99).supers
