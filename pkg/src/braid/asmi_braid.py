"""Multiple inheritance with objects represented as graphs.

A class is itself an object graph whose flattened instance variables bind
``supers``, ``ivars`` and ``menv``.  ``cg`` turns a class into a class graph
whose nodes hold variable-name lists; ``instantiate`` maps that graph to a
fresh instance.  The node contributed by a class is addressed by the class's
own identity, so a superclass reached along two routes becomes one node.
"""

from __future__ import annotations

from . import graphlib as G
from .errors import BootstrapError, EvalError
from .kernel import expect_list, expect_str
from .runtime import BraidState
from .values import (
    EMPTY, NULL, Bind, Cat, Env, Loc, domain, force, format_value, lookup,
    next_serial,
)


def graph_of(v):
    """The object graph behind a class or object value."""
    v = force(v)
    if isinstance(v, G.ObjectGraph):
        return v
    rep = getattr(v, "rep", None)
    if rep is not None:
        return graph_of(rep)
    raise EvalError(f"expected an object graph, got {format_value(v)}")


def env_of_nodes(g, addrs):
    """Right fold of node instance environments with ``&``."""
    env = EMPTY
    for addr in reversed(addrs):
        env = Cat(g.nodes[addr].ienv, env)
    return env


def getallenv(o):
    g = graph_of(o)
    return env_of_nodes(g, G.order_final(g))


def _field(env, key, c):
    loc = lookup(env, key)
    if loc is None:
        raise EvalError(f"cg: {format_value(c)} is not a class (no {key})")
    return force(loc.value)


def class_graph(c):
    """Class graph of ``c``: one node of (ivar names, methods) per class."""
    memo = {}
    active = set()

    def build(value):
        g = graph_of(value)
        if g.ident in memo:
            return memo[g.ident]
        if g.ident in active:
            raise EvalError("cg: cyclic superclass relation")
        active.add(g.ident)
        env = getallenv(g)
        names = expect_list(_field(env, "ivars", value), "cg")
        for name in names:
            expect_str(name, "cg")
        menv = _field(env, "menv", value)
        if not isinstance(menv, Env):
            raise EvalError(f"cg: class {format_value(value)} has no method environment")
        supers = expect_list(_field(env, "supers", value), "cg")
        merged = G.NULLGRAPH
        for s in reversed(supers):
            merged = G.gmerge(build(s), merged)
        roots = set(G.root_addrs(merged))
        order = []
        for s in supers:
            addr = graph_of(s).ident
            if addr in roots and addr not in order:
                order.append(addr)
        if g.ident in merged.nodes:
            raise EvalError("cg: cyclic superclass relation")
        result, _ = G.addnode(G.Node(list(names), menv), merged, order, addr=g.ident)
        active.discard(g.ident)
        memo[g.ident] = result
        return result

    return build(c)


def fresh_ienv(names):
    env = EMPTY
    for name in reversed(names):
        env = Cat(Bind(name, Loc(NULL)), env)
    return env


def instantiate(c):
    """A fresh instance graph of ``c``, every instance variable null."""
    return G.graph_map(lambda n: G.Node(fresh_ienv(n.ienv), n.menv), class_graph(c))


def dispatch_plan(g, order, selector):
    """Locate ``selector`` in the node order of ``g``.

    Returns ``None`` when no node defines it, else ``(addr, method, next
    graph, environment)`` where the next graph has every node up to and
    including the match marked and the environment spans the match onwards.
    """
    for i, addr in enumerate(order):
        loc = lookup(g.nodes[addr].menv, selector)
        if loc is not None:
            marked = g
            for a in order[: i + 1]:
                marked = G.mark(marked, a)
            return addr, loc.value, marked, env_of_nodes(g, order[i:])
    return None


class ASMIState(BraidState):
    name = "asmi"
    exports = (
        "send", "getallenv", "cg", "instantiate", "objinit", "objdnu", "objgc",
        "classinit", "classnew", "om", "cm", "cdv", "object", "class",
        "asnew", "asm", "asc",
    )

    def send(self, o, selector, arg):
        interp = self.interp
        receiver = force(o)
        if not isinstance(receiver, G.ObjectGraph):
            raise EvalError(f"send: receiver {format_value(receiver)} is not an object")
        selector = force(selector)
        plan = None
        if isinstance(selector, str):
            plan = dispatch_plan(receiver, G.order_final(receiver), selector)
        if plan is None:
            if selector == "dnu":
                raise EvalError(f"no dnu handler for {format_value(arg)}")
            return self.send(G.unmark(receiver), "dnu", (selector, arg))
        addr, method, marked, env = plan
        self.send_count += 1
        self.trace(receiver.ident, selector, "send", addr)
        hidden = (G.unmark(receiver), marked, env)
        return interp.apply(interp.apply(method, hidden), arg)

    def bootstrap(self):
        om, cm, cdv = self.get("om"), self.get("cm"), self.get("cdv")
        object_ident = next_serial()
        class_ident = next_serial()

        def shell(ident):
            class_node = G.Node(fresh_ienv(["supers", "ivars", "menv"]), cm)
            object_node = G.Node(fresh_ienv(["class"]), om)
            return G.ObjectGraph(
                {class_ident: class_node, object_ident: object_node},
                {next_serial(): (class_ident, object_ident)},
                frozenset({(class_ident, object_ident)}),
                frozenset(),
                ident,
            )

        obj, cls = shell(object_ident), shell(class_ident)
        fill = {
            obj: {"supers": [], "ivars": ["class"], "menv": om, "class": cls},
            cls: {"supers": [obj], "ivars": list(cdv), "menv": cm, "class": cls},
        }
        for g, values in fill.items():
            env = getallenv(g)
            for key, value in values.items():
                lookup(env, key).value = value
        self.object, self.cls = obj, cls
        self.check()
        self.define("object", obj)
        self.define("class", cls)

    def check(self):
        obj, cls = self.object, self.cls
        for g in (obj, cls):
            env = getallenv(g)
            if sorted(domain(env)) != ["class", "ivars", "menv", "supers"]:
                raise BootstrapError(f"bootstrap: class binds {domain(env)}")
            if force(lookup(env, "class").value) is not cls:
                raise BootstrapError("bootstrap: class is not the class of a basic class")
            shape = instantiate(cls)
            if sorted(shape.nodes) != sorted(g.nodes) or set(shape.edges.values()) != set(g.edges.values()):
                raise BootstrapError("bootstrap: basic class is not shaped like an instance of class")


def load(interp):
    state = ASMIState(interp)
    install_common(state)
    state.run_prelude("asmi")
    state.bootstrap()
    state.run_prelude("asmi_emulation")
    state.export()
    interp.braid = state
    return state


def install_common(state):
    def send_prim(args):
        args = force(args)
        if type(args) is not tuple or len(args) != 3:
            raise EvalError("send: expected (object, selector, argument)")
        return state.send(*args)

    state.native("send", 1, send_prim)
    state.native("getallenv", 1, getallenv)
    state.native("cg", 1, class_graph)
    state.native("instantiate", 1, instantiate)
