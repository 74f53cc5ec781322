"""Object graphs and the traversal, ordering and marking operators.

A graph holds nodes keyed by integer address, edges keyed by integer id, a
partial order on addresses (pairs ``(a, b)`` meaning *a before b*) and the
set of marked addresses.  Graph values are immutable; every operation
returns a new graph.  ``ident`` names the object a graph represents: graph
maps, marking and unmarking keep it, so a marked view of an object still
compares equal to the object itself.
"""

from __future__ import annotations

import heapq

from .errors import EvalError
from .values import (
    BraidValue, Env, Prim, SetValue, format_value, flat_items, force,
    next_serial,
)


class Node(BraidValue):
    """A graph node: instance-variable environment and method environment."""

    __slots__ = ("ienv", "menv")

    def __init__(self, ienv, menv):
        self.ienv = ienv
        self.menv = menv

    def braid_format(self, fmt):
        return f"<node ivars={fmt(self.ienv)}>"


class ObjectGraph(BraidValue):
    __slots__ = ("nodes", "edges", "order", "marked", "ident", "_addr_of", "_walk")

    def __init__(self, nodes, edges, order, marked=frozenset(), ident=None, walk=None):
        self.nodes = nodes  # addr -> Node, insertion ordered
        self.edges = edges  # edge id -> (src addr, tgt addr)
        self.order = order  # frozenset of (before, after) address pairs
        self.marked = marked
        self.ident = next_serial() if ident is None else ident
        self._addr_of = None
        self._walk = walk  # cached traversal; shared by copies with the same edges and order

    @property
    def src(self):
        return {e: s for e, (s, _) in self.edges.items()}

    @property
    def tgt(self):
        return {e: t for e, (_, t) in self.edges.items()}

    def addr_of(self, node):
        if self._addr_of is None:
            table = {}
            for addr, n in self.nodes.items():
                table.setdefault(id(n), addr)
            self._addr_of = table
        addr = self._addr_of.get(id(node))
        if addr is None:
            raise EvalError("node does not belong to this graph")
        return addr

    def is_marked(self, addr):
        return addr in self.marked

    def braid_equal(self, other):
        return isinstance(other, ObjectGraph) and other.ident == self.ident

    def braid_format(self, fmt):
        return f"<graph#{self.ident} nodes={len(self.nodes)}>"


NULLGRAPH = ObjectGraph({}, {}, frozenset(), frozenset(), ident=0)


def nullgraph():
    return NULLGRAPH


def graph_map(f, g):
    """Apply ``f`` to every node; addresses, edges, order and marks are kept."""
    return ObjectGraph({a: f(n) for a, n in g.nodes.items()}, g.edges, g.order, g.marked, g.ident, g._walk)


def _check_order_acyclic(order, message):
    succ = {}
    for a, b in order:
        succ.setdefault(a, set()).add(b)
    state = {}
    for start in list(succ):
        if start in state:
            continue
        stack = [(start, iter(succ.get(start, ())))]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            for nxt in it:
                s = state.get(nxt)
                if s == 1:
                    raise EvalError(message)
                if s is None:
                    state[nxt] = 1
                    stack.append((nxt, iter(succ.get(nxt, ()))))
                    break
            else:
                state[node] = 2
                stack.pop()


def gmerge(g1, g2):
    """Union of two graphs; a node address present in both takes g2's node."""
    if not g1.nodes and not g1.edges:
        return g2
    if not g2.nodes and not g2.edges:
        return g1
    nodes = dict(g1.nodes)
    nodes.update(g2.nodes)
    edges = dict(g1.edges)
    edges.update(g2.edges)
    order = g1.order | g2.order
    _check_order_acyclic(order, "gmerge: contradictory orderings")
    return ObjectGraph(nodes, edges, order, g1.marked | g2.marked)


def root_addrs(g):
    targets = {t for _, t in g.edges.values()}
    return sorted(a for a in g.nodes if a not in targets)


def target_addrs(addr, g):
    return sorted({t for s, t in g.edges.values() if s == addr})


def sort_addrs(addrs, order):
    """Linearise ``addrs`` consistently with ``order``; ties by address."""
    addrs = set(addrs)
    succ = {}
    for a, b in order:
        succ.setdefault(a, set()).add(b)
    # order restricted to addrs, through paths that may leave the set
    before = {a: set() for a in addrs}
    for a in addrs:
        seen, stack = set(), list(succ.get(a, ()))
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            if x == a:
                raise EvalError("sort: cyclic ordering")
            stack.extend(succ.get(x, ()))
        for b in seen & addrs:
            before[b].add(a)
    indegree = {a: len(before[a]) for a in addrs}
    after = {a: [b for b in addrs if a in before[b]] for a in addrs}
    ready = [a for a in addrs if indegree[a] == 0]
    heapq.heapify(ready)
    result = []
    while ready:
        a = heapq.heappop(ready)
        result.append(a)
        for b in after[a]:
            indegree[b] -= 1
            if indegree[b] == 0:
                heapq.heappush(ready, b)
    if len(result) != len(addrs):
        raise EvalError("sort: cyclic ordering")
    return result


def unique_root(g):
    roots = root_addrs(g)
    if len(roots) != 1:
        raise EvalError(f"traverse: graph has {len(roots)} roots, expected exactly one")
    return roots[0]


def traverse(g):
    """Depth-first walk from the root; nodes on k paths appear k times."""
    if g._walk is not None:
        return list(g._walk)
    root = unique_root(g)
    children = {}
    result = []
    stack = [root]
    while stack:
        addr = stack.pop()
        result.append(addr)
        kids = children.get(addr)
        if kids is None:
            kids = sort_addrs(target_addrs(addr, g), g.order)
            children[addr] = kids
        stack.extend(reversed(kids))
    g._walk = tuple(result)
    return result


def _collapse(seq, keep_last):
    position = {}
    for i, addr in enumerate(seq):
        if keep_last or addr not in position:
            position[addr] = i
    return sorted(position, key=position.__getitem__)


def order_final(g):
    """Traversal with each repeated node at its final position, marks removed."""
    return [a for a in _collapse(traverse(g), True) if a not in g.marked]


def order_first(g):
    """Traversal with each repeated node at its first position, marks removed."""
    return [a for a in _collapse(traverse(g), False) if a not in g.marked]


def mark(g, addr):
    if addr not in g.nodes:
        raise EvalError("mark: node not in graph")
    return ObjectGraph(g.nodes, g.edges, g.order, g.marked | {addr}, g.ident, g._walk)


def unmark(g):
    if not g.marked:
        return g
    return ObjectGraph(g.nodes, g.edges, g.order, frozenset(), g.ident, g._walk)


def addnode(node, g, root_order=None, addr=None):
    """Add ``node`` above the roots of ``g``; returns ``(graph, address)``.

    ``root_order`` lists the current root addresses in intended left-to-right
    order (ascending addresses when omitted).  The new node gets one edge to
    each root and precedes all of them; consecutive roots are ordered.
    """
    roots = root_addrs(g)
    if root_order is None:
        root_order = roots
    if sorted(root_order) != roots or len(set(root_order)) != len(root_order):
        raise EvalError("addnode: root order does not match the roots of the graph")
    if addr is None:
        addr = next_serial()
    if addr in g.nodes:
        raise EvalError("addnode: address already in use")
    nodes = {addr: node}
    nodes.update(g.nodes)
    edges = dict(g.edges)
    order = set(g.order)
    for r in root_order:
        edges[next_serial()] = (addr, r)
        order.add((addr, r))
    for a, b in zip(root_order, root_order[1:]):
        order.add((a, b))
    return ObjectGraph(nodes, edges, frozenset(order), g.marked), addr


def dump_graph(g):
    """Debug text: nodes, then edges, then order pairs."""
    lines = []
    for addr in sorted(g.nodes):
        n = g.nodes[addr]
        flag = " [marked]" if addr in g.marked else ""
        methods = ", ".join(k for k, _ in flat_items(n.menv)) if isinstance(n.menv, Env) else format_value(n.menv)
        lines.append(f"{addr}{flag} ivars={format_value(n.ienv)} methods={{{methods}}}")
    for s, t in sorted(g.edges.values()):
        lines.append(f"{s} -> {t}")
    for a, b in sorted(g.order):
        lines.append(f"{a} < {b}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# kernel primitives


def _graph(v, op):
    v = force(v)
    if not isinstance(v, ObjectGraph):
        raise EvalError(f"{op}: expected an object graph, got {format_value(v)}")
    return v


def _node(v, op):
    v = force(v)
    if not isinstance(v, Node):
        raise EvalError(f"{op}: expected a graph node, got {format_value(v)}")
    return v


def install_primitives(interp):
    p = interp.prim

    def gm(f, g):
        def step(n):
            return _node(interp.apply(f, n), "gm")

        return graph_map(step, _graph(g, "gm"))

    def gmerge_prim(pair):
        pair = force(pair)
        if type(pair) is not tuple or len(pair) != 2:
            raise EvalError("gmerge: expected a pair of graphs")
        return gmerge(_graph(pair[0], "gmerge"), _graph(pair[1], "gmerge"))

    def nodes_of(g, addrs):
        return [g.nodes[a] for a in addrs]

    def targetnodes(n, g):
        g = _graph(g, "targetnodes")
        return SetValue(nodes_of(g, target_addrs(g.addr_of(_node(n, "targetnodes")), g)))

    def addnode_prim(args):
        args = force(args)
        if type(args) is not tuple or len(args) not in (2, 3):
            raise EvalError("addnode: expected (node, graph) or (node, graph, roots)")
        n, g = _node(args[0], "addnode"), _graph(args[1], "addnode")
        order = None
        if len(args) == 3:
            roots = force(args[2])
            if type(roots) is not list:
                raise EvalError("addnode: roots must be a list of nodes")
            order = [g.addr_of(_node(r, "addnode")) for r in roots]
        return addnode(n, g, order)[0]

    def node_prim(pair):
        pair = force(pair)
        if type(pair) is not tuple or len(pair) != 2:
            raise EvalError("node: expected (ienv, menv)")
        return Node(pair[0], pair[1])

    interp.constant("nullgraph", NULLGRAPH)
    interp.define("nullgraph", NULLGRAPH)
    p("gm", 2, gm)
    p("gmerge", 1, gmerge_prim)
    p("root", 1, lambda g: SetValue(nodes_of(_graph(g, "root"), root_addrs(_graph(g, "root")))))
    p("targetnodes", 2, targetnodes)
    p("traverse", 1, lambda g: nodes_of(_graph(g, "traverse"), traverse(_graph(g, "traverse"))))
    p("onr", 1, lambda g: nodes_of(_graph(g, "onr"), order_final(_graph(g, "onr"))))
    p("onl", 1, lambda g: nodes_of(_graph(g, "onl"), order_first(_graph(g, "onl"))))
    p("mark", 2, lambda g, n: mark(_graph(g, "mark"), _graph(g, "mark").addr_of(_node(n, "mark"))))
    p("unmark", 1, lambda g: unmark(_graph(g, "unmark")))
    p("addnode", 1, addnode_prim)
    p("node", 1, node_prim)
    p("getenv", 1, lambda n: _node(n, "getenv").ienv)
    p("getmeths", 1, lambda n: _node(n, "getmeths").menv)
    p("getmenv", 1, lambda n: _node(n, "getmenv").menv)
    p("dumpgraph", 1, lambda g: dump_graph(_graph(g, "dumpgraph")))
    p("ismarked", 2, lambda g, n: _graph(g, "ismarked").addr_of(_node(n, "ismarked")) in _graph(g, "ismarked").marked)


__all__ = [
    "Node", "ObjectGraph", "NULLGRAPH", "nullgraph", "graph_map", "gmerge",
    "root_addrs", "target_addrs", "sort_addrs", "traverse", "order_final",
    "order_first", "mark", "unmark", "addnode", "dump_graph",
]
