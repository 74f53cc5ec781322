"""Single-inheritance objects represented as onions of layers.

Each layer holds the instance variables and methods contributed by one class
in the superclass chain; the innermost layer is a null object.  Every layer
also records the whole object as ``self``.  ``send`` searches layers from
the outside in and hands the method the whole object, the object stripped
down to the layer below the match, and the instance variables from the
matching layer inwards.
"""

from __future__ import annotations

from .errors import BootstrapError, EvalError
from .kernel import expect_list, expect_str
from .runtime import BraidState
from .values import (
    EMPTY, NULL, BraidValue, Bind, Cat, Env, Knot, Loc, Singleton, domain,
    force, format_value, lookup, next_serial,
)

NULLCLASS = Singleton("nullclass")


class ASObject(BraidValue):
    """One layer ``obj(ienv, menv, super, self)`` of an onion."""

    __slots__ = ("ienv", "menv", "super_", "self_", "serial")

    def __init__(self, ienv, menv, super_, self_):
        self.ienv = ienv
        self.menv = menv
        self.super_ = super_
        self.self_ = self_
        self.serial = next_serial()

    @property
    def whole(self):
        return _deref(self.self_)

    def braid_format(self, fmt):
        whole = self.whole
        serial = whole.serial if isinstance(whole, (ASObject, NullObject)) else self.serial
        return f"<obj#{serial}>"


class NullObject(BraidValue):
    """The heart of an onion, ``nullobj(self)``."""

    __slots__ = ("self_", "serial")

    def __init__(self, self_):
        self.self_ = self_
        self.serial = next_serial()

    @property
    def whole(self):
        return _deref(self.self_)

    def braid_format(self, fmt):
        return "<nullobj>"


def _deref(v):
    if type(v) is Knot and v.value is None:
        return v
    return force(v)


def layers(o):
    """The layers of an onion from outermost to the null heart (inclusive)."""
    result = []
    o = force(o)
    while isinstance(o, ASObject):
        result.append(o)
        o = force(o.super_)
    if not isinstance(o, NullObject):
        raise EvalError(f"malformed object: {format_value(o)}")
    result.append(o)
    return result


def getallenv(o):
    """Outer layer environments first: ``e ⊕ getallenv(o)``."""
    chain = layers(o)[:-1]
    env = EMPTY
    for layer in reversed(chain):
        env = Cat(layer.ienv, env)
    return env


def _class_field(env, key, c):
    loc = lookup(env, key)
    if loc is None:
        raise EvalError(f"mkobj: {format_value(c)} is not a class (no {key})")
    return loc.value


def mkobj(c, o):
    """Instantiate class ``c`` with ``o`` as the self of every layer."""
    layers_spec = []
    c = force(c)
    while c is not NULLCLASS:
        if not isinstance(c, ASObject):
            raise EvalError(f"mkobj: {format_value(c)} is not a class")
        env = getallenv(c)
        ivars = expect_list(_class_field(env, "ivars", c), "mkobj")
        menv = force(_class_field(env, "menv", c))
        if not isinstance(menv, Env):
            raise EvalError(f"mkobj: class {format_value(c)} has no method environment")
        ienv = EMPTY
        for name in reversed(ivars):
            ienv = Cat(Bind(expect_str(name, "mkobj"), Loc(NULL)), ienv)
        layers_spec.append((ienv, menv))
        c = force(_class_field(env, "super", c))
    result = NullObject(o)
    for ienv, menv in reversed(layers_spec):
        result = ASObject(ienv, menv, result, o)
    return result


class ASState(BraidState):
    name = "as"
    exports = (
        "send", "mkobj", "getallenv", "nullclass", "objinit", "objdnu", "cdinit",
        "cdnew", "metasub", "classsub", "om", "cdm", "cdv", "mm", "cm",
        "object", "oc", "cd", "cdc", "mc", "mcc", "class", "cc",
    )

    def send(self, o, selector, arg):
        interp = self.interp
        receiver = force(o)
        selector = force(selector)
        cur = receiver
        depth = 0
        while True:
            if isinstance(cur, ASObject):
                loc = lookup(cur.menv, selector) if isinstance(selector, str) else None
                if loc is not None:
                    self.send_count += 1
                    self.trace(_serial(cur), selector, "send", f"layer{depth}")
                    below = force(cur.super_)
                    env = Cat(cur.ienv, getallenv(below))
                    hidden = (cur.whole, below, env)
                    return interp.apply(interp.apply(loc.value, hidden), arg)
                cur = force(cur.super_)
                depth += 1
            elif isinstance(cur, NullObject):
                whole = cur.whole
                if selector == "dnu":
                    raise EvalError(f"no dnu handler for {format_value(arg)}")
                return self.send(whole, "dnu", (selector, arg))
            else:
                raise EvalError(f"send: receiver {format_value(receiver)} is not an object")

    def bootstrap(self):
        get = self.get
        om, cdm, mm, cm = get("om"), get("cdm"), get("mm"), get("cm")
        cdv = get("cdv")
        # name -> (superclass name, ivars, menv, class name)
        table = {
            "object": (None, ["class"], om, "oc"),
            "oc": ("class", [], EMPTY, "mc"),
            "cd": ("object", list(cdv), cdm, "cdc"),
            "cdc": ("oc", [], EMPTY, "mc"),
            "mc": ("cd", [], mm, "mcc"),
            "mcc": ("cdc", [], EMPTY, "mc"),
            "class": ("cd", [], cm, "cc"),
            "cc": ("cdc", [], EMPTY, "mc"),
        }

        def chain(name):
            names = []
            while name is not None:
                names.append(name)
                name = table[name][0]
            return names

        # phase one: allocate every onion with null instance variables
        objs = {}
        for name, (_, _, _, meta) in table.items():
            knot = Knot()
            heart = NullObject(knot)
            result = heart
            for layer_class in reversed(chain(meta)):
                ivars, menv = table[layer_class][1], table[layer_class][2]
                ienv = EMPTY
                for iv in reversed(ivars):
                    ienv = Cat(Bind(iv, Loc(NULL)), ienv)
                result = ASObject(ienv, menv, result, knot)
            knot.value = result
            objs[name] = result
        # phase two: back-patch the class descriptions
        for name, (sup, ivars, menv, meta) in table.items():
            env = getallenv(objs[name])
            values = {
                "super": NULLCLASS if sup is None else objs[sup],
                "ivars": list(ivars),
                "menv": menv,
                "class": objs[meta],
            }
            for key, value in values.items():
                loc = lookup(env, key)
                if loc is None:
                    raise BootstrapError(f"bootstrap: {name} has no {key} slot")
                loc.value = value
        self.classes = objs
        self.check(table)
        for name, value in objs.items():
            self.define(name, value)

    def check(self, table):
        objs = self.classes
        for name, (sup, ivars, menv, meta) in table.items():
            o = objs[name]
            env = getallenv(o)
            if sorted(domain(env)) != ["class", "ivars", "menv", "super"]:
                raise BootstrapError(f"bootstrap: {name} binds {domain(env)}")
            if force(lookup(env, "class").value) is not objs[meta]:
                raise BootstrapError(f"bootstrap: class of {name} is wrong")
            expected_super = NULLCLASS if sup is None else objs[sup]
            if force(lookup(env, "super").value) is not expected_super:
                raise BootstrapError(f"bootstrap: superclass of {name} is wrong")
            for layer in layers(o):
                if layer.whole is not o:
                    raise BootstrapError(f"bootstrap: a layer of {name} has the wrong self")


def _serial(layer):
    whole = layer.whole
    return getattr(whole, "serial", layer.serial)


def load(interp):
    state = ASState(interp)

    def send_prim(args):
        args = force(args)
        if type(args) is not tuple or len(args) != 3:
            raise EvalError("send: expected (object, selector, argument)")
        return state.send(*args)

    state.native("send", 1, send_prim)
    state.native("mkobj", 2, mkobj)
    state.native("getallenv", 1, getallenv)
    state.define("nullclass", NULLCLASS)
    state.run_prelude()
    state.bootstrap()
    state.export()
    interp.braid = state
    return state


__all__ = ["ASObject", "NullObject", "NULLCLASS", "getallenv", "mkobj", "layers", "load"]
