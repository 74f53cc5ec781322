"""Random class DAGs checked against the independent linearization oracle."""

import sys

from braid.kernel import run_deep
from braid.oracle import generate_dag, oracle_dispatch, oracle_order

sys.path.insert(0, str(__import__("pathlib").Path(__file__).resolve().parent.parent / "tests"))
from programs import class_order, dag_session, dispatch_chain  # noqa: E402

SEEDS = range(20)


def check(seed):
    d = generate_dag(seed)
    final = dag_session(d, "asmi")
    first = dag_session(d, "asmirs", "c")
    agree = 0
    for root in range(d.size):
        agree += class_order(final, d, root, "final") == oracle_order(d, "final", root)
        agree += class_order(first, d, root, "first") == oracle_order(d, "first", root)
        agree += dispatch_chain(final, root, "m") == oracle_dispatch(d, "m", "final", root)
        agree += dispatch_chain(first, root, "m") == oracle_dispatch(d, "m", "first", root)
    return d, agree, 4 * d.size


def main():
    for seed in SEEDS:
        d, agree, total = run_deep(lambda: check(seed))
        print(f"seed {seed:2d}: {d.size} classes, supers {d.supers}")
        print(f"  final {oracle_order(d, 'final')}  first {oracle_order(d, 'first')}  {agree}/{total} agree")


if __name__ == "__main__":
    main()
