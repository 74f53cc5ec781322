"""Brute-force reference orderings over class DAGs, and a DAG generator.

Nothing here touches the graph library: paths are enumerated by plain
recursion over the supers lists, so the results can be used to check the
graph operators independently.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field


@dataclass
class DagSpec:
    """A class DAG: node ``i`` lists its direct supers, all below ``i``."""

    supers: list[list[int]]
    selectors: list[set[str]] = field(default_factory=list)
    ivars: list[set[str]] = field(default_factory=list)
    seed: int | None = None

    def __post_init__(self):
        n = len(self.supers)
        if not self.selectors:
            self.selectors = [set() for _ in range(n)]
        if not self.ivars:
            self.ivars = [set() for _ in range(n)]
        for i, ss in enumerate(self.supers):
            for s in ss:
                if not 0 <= s < i:
                    raise ValueError(f"node {i} lists super {s}, which is not an earlier node")

    @property
    def size(self):
        return len(self.supers)

    @property
    def top(self):
        return self.size - 1

    def ancestors(self, node):
        """Every node reachable from ``node``, itself included."""
        seen = set()
        stack = [node]
        while stack:
            x = stack.pop()
            if x not in seen:
                seen.add(x)
                stack.extend(self.supers[x])
        return seen


def oracle_paths(d, root=None):
    """All paths from ``root`` in depth-first preorder, supers in listed order."""
    root = d.top if root is None else root
    result = []

    def walk(path):
        result.append(path)
        for s in d.supers[path[-1]]:
            walk(path + (s,))

    walk((root,))
    return result


def oracle_order(d, mode="final", root=None):
    visits = [path[-1] for path in oracle_paths(d, root)]
    if mode == "first":
        out = []
        for x in visits:
            if x not in out:
                out.append(x)
        return out
    if mode == "final":
        out = []
        for x in reversed(visits):
            if x not in out:
                out.append(x)
        return out[::-1]
    raise ValueError(f"unknown mode {mode!r}")


def oracle_dispatch(d, selector, mode="final", root=None):
    """Nodes defining ``selector`` in lookup order: the full next-chain."""
    return [x for x in oracle_order(d, mode, root) if selector in d.selectors[x]]


def generate_dag(seed, max_nodes=12, max_supers=3, selectors=("m", "n"), p_define=0.4):
    """A random DAG with node 0 as the unique base.

    Supers lists carry no redundant entries and are sorted by one random
    derived-before-base ranking, so no two lists ever order a pair of
    classes inconsistently.
    """
    if max_nodes < 1 or max_supers < 1:
        raise ValueError("limits must be positive")
    rng = random.Random(seed)
    n = rng.randint(1, max_nodes)
    supers = [[]]
    below = [{0}]  # reflexive ancestor sets
    for i in range(1, n):
        k = min(rng.choice([1, 2, 2, 3, 3]), max_supers)
        candidates = list(range(i))
        rng.shuffle(candidates)
        chosen = []
        for c in candidates:
            if len(chosen) == k:
                break
            # skip candidates related to a chosen one: that super would be redundant
            if any(c in below[x] or x in below[c] for x in chosen):
                continue
            chosen.append(c)
        supers.append(chosen)
        below.append({i}.union(*(below[c] for c in chosen)))
    # random linear extension with every node ranked before its supers
    subs = {i: 0 for i in range(n)}
    for ss in supers:
        for s in ss:
            subs[s] += 1
    ready = [i for i in range(n) if subs[i] == 0]
    rank = {}
    while ready:
        x = ready.pop(rng.randrange(len(ready)))
        rank[x] = len(rank)
        for s in supers[x]:
            subs[s] -= 1
            if subs[s] == 0:
                ready.append(s)
    supers = [sorted(ss, key=rank.__getitem__) for ss in supers]
    sels = [{s for s in selectors if rng.random() < p_define} for _ in range(n)]
    ivars = [{f"v{i}"} if rng.random() < 0.5 else set() for i in range(n)]
    return DagSpec(supers, sels, ivars, seed)


def diamond():
    """R(B, C), B(A), C(A) with A = 0 and R = 3."""
    return DagSpec([[], [0], [0], [1, 2]])


__all__ = ["DagSpec", "oracle_paths", "oracle_order", "oracle_dispatch", "generate_dag", "diamond"]
