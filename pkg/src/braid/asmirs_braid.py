"""Multiple inheritance with a reflective message delivery service.

An object is a pair ``obj(class, rep)``.  Sending a message asks the class
of the receiver to deliver it, by sending that class a ``send`` message;
the regress stops at direct instances of ``class``, whose delivery service
is built into the primitive.  The default service works on object graphs
exactly as in the multiple-inheritance system but obtains the node order by
sending ``on`` to the receiver's class, so a metaclass can change the
inheritance strategy of its instances.
"""

from __future__ import annotations

from . import graphlib as G
from .asmi_braid import fresh_ienv, getallenv, graph_of, install_common, instantiate
from .errors import BootstrapError, EvalError
from .runtime import BraidState
from .values import (
    EPS, BraidValue, Cat, EMPTY, Prim, domain, force, format_value, lookup,
    next_serial,
)


class ReflObject(BraidValue):
    """``obj(c, v)``: the class that made the object and its representation."""

    __slots__ = ("cls", "rep")

    def __init__(self, cls, rep):
        self.cls = cls
        self.rep = rep

    def braid_equal(self, other):
        if self is other:
            return True
        if not isinstance(other, ReflObject) or force(self.cls) is not force(other.cls):
            return False
        a, b = force(self.rep), force(other.rep)
        if isinstance(a, BraidValue):
            return a.braid_equal(b)
        return a is b

    def braid_format(self, fmt):
        rep = force(self.rep)
        if isinstance(rep, G.ObjectGraph):
            return f"<obj#{rep.ident}>"
        return f"<obj {fmt(rep)}>"


def classof(o):
    o = force(o)
    if not isinstance(o, ReflObject):
        raise EvalError(f"classof: {format_value(o)} is not an object")
    return force(o.cls)


def repof(o):
    o = force(o)
    if not isinstance(o, ReflObject):
        raise EvalError(f"repof: {format_value(o)} is not an object")
    return force(o.rep)


def _recv_id(o):
    rep = force(o.rep) if isinstance(o, ReflObject) else o
    return getattr(rep, "ident", id(rep))


class ASMIRSState(BraidState):
    name = "asmirs"
    exports = (
        "send", "classof", "repof", "obj", "getallenv", "cg", "instantiate",
        "classon", "classnew", "classsend", "classinit", "objinit", "objdnu",
        "objgc", "om", "cm", "cdv", "object", "class", "con", "c",
    )

    def __init__(self, interp):
        super().__init__(interp)
        self.cls = None
        self.meta_steps = 0

    def send(self, o, selector, arg):
        """The delivery primitive: regress through classes until ``class``."""
        interp = self.interp
        selector = force(selector)
        seen = set()
        while True:
            receiver = force(o)
            if not isinstance(receiver, ReflObject):
                raise EvalError(f"send: receiver {format_value(receiver)} is not an object")
            c = force(receiver.cls)
            if self.is_class(c) and selector in ("on", "send"):
                method = self.get("classon" if selector == "on" else "classsend")
                if selector == "send":
                    self.trace(_recv_id(receiver), selector, "bottom-out", "-")
                return interp.apply(interp.apply(method, (EPS, EPS, EPS)), arg)
            if id(receiver) in seen or len(seen) > interp.depth_limit:
                raise EvalError("send: ill-formed configuration (class chain never reaches class)")
            seen.add(id(receiver))
            self.meta_steps += 1
            o, selector, arg = c, "send", (receiver, selector, arg)

    def is_class(self, c):
        """Whether ``c`` is ``class`` itself, possibly re-wrapped or marked."""
        cls = self.cls
        if c is cls:
            return True
        return (
            isinstance(c, ReflObject)
            and force(c.cls) is cls
            and isinstance(force(c.rep), G.ObjectGraph)
            and force(c.rep).ident == cls.rep.ident
        )

    def classsend(self, hidden, message):
        """Default delivery service for objects represented as graphs."""
        interp = self.interp
        message = force(message)
        if type(message) is not tuple or len(message) != 3:
            raise EvalError("classsend: expected (object, selector, argument)")
        o, n, v = message
        o = force(o)
        n = force(n)
        c = classof(o)
        rep = graph_of(repof(o))
        order = force(self.send(c, "on", o))
        if type(order) is not list:
            raise EvalError(f"classsend: on returned {format_value(order)}, expected a list of nodes")
        addrs = [rep.addr_of(force(x)) for x in order]
        for i, addr in enumerate(addrs):
            loc = lookup(rep.nodes[addr].menv, n) if isinstance(n, str) else None
            if loc is not None:
                break
        else:
            if n == "dnu":
                raise EvalError(f"no dnu handler for {format_value(v)}")
            whole = o if not rep.marked else ReflObject(c, G.unmark(rep))
            return self.send(whole, "dnu", (n, v))
        marked = rep
        for a in addrs[: i + 1]:
            marked = G.mark(marked, a)
        env = EMPTY
        for a in reversed(addrs[i:]):
            env = Cat(rep.nodes[a].ienv, env)
        self.send_count += 1
        self.trace(rep.ident, n, "classsend", addr)
        whole = o if not rep.marked else ReflObject(c, G.unmark(rep))
        hidden = (whole, ReflObject(c, marked), env)
        return interp.apply(interp.apply(loc.value, hidden), v)

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

        cls = ReflObject(None, shell(class_ident))
        cls.cls = cls
        obj = ReflObject(cls, shell(object_ident))
        fill = {
            obj: {"supers": [], "ivars": ["class"], "menv": om, "class": cls},
            cls: {"supers": [obj], "ivars": list(cdv), "menv": cm, "class": cls},
        }
        for o, values in fill.items():
            env = getallenv(o)
            for key, value in values.items():
                lookup(env, key).value = value
        self.object, self.cls = obj, cls
        self.check()
        self.define("object", obj)
        self.define("class", cls)

    def check(self):
        cls = self.cls
        if classof(cls) is not cls:
            raise BootstrapError("bootstrap: class is not an instance of itself")
        for o in (self.object, cls):
            env = getallenv(o)
            if sorted(domain(env)) != ["class", "ivars", "menv", "supers"]:
                raise BootstrapError(f"bootstrap: class binds {domain(env)}")
            if classof(o) is not cls or force(lookup(env, "class").value) is not cls:
                raise BootstrapError("bootstrap: class is not the class of a basic class")
            shape = instantiate(cls)
            g = graph_of(o)
            if sorted(shape.nodes) != sorted(g.nodes) or set(shape.edges.values()) != set(g.edges.values()):
                raise BootstrapError("bootstrap: basic class is not shaped like an instance of class")
        menv = force(lookup(getallenv(cls), "menv").value)
        if sorted(domain(menv)) != ["init", "new", "on", "send"]:
            raise BootstrapError(f"bootstrap: class methods are {domain(menv)}")


def load(interp):
    state = ASMIRSState(interp)
    install_common(state)
    state.native("classof", 1, classof)
    state.native("repof", 1, repof)
    state.native("obj", 1, _obj_prim)
    state.define("classsend", Prim("classsend", 2, state.classsend))
    state.run_prelude("asmirs")
    state.bootstrap()
    state.run_prelude("asmirs_strategy")
    state.export()
    interp.braid = state
    return state


def _obj_prim(pair):
    pair = force(pair)
    if type(pair) is not tuple or len(pair) != 2:
        raise EvalError("obj: expected (class, representation)")
    return ReflObject(pair[0], pair[1])
