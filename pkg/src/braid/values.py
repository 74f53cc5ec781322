"""Runtime values: environments, locations, closures, sets and the printer.

Numbers, strings and booleans are Python ``int``, ``str`` and ``bool``.
Tuples are Python tuples (arity 0 or at least 2) and lists are Python lists
that are never mutated after construction.
"""

from __future__ import annotations

import itertools

from .errors import EvalError


class Singleton:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


EPS = Singleton("eps")
NULL = Singleton("null")


class Loc:
    """An updateable cell; environments bind keys to these."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __repr__(self):
        return f"Loc({self.value!r})"


class Store:
    """Allocator for locations; counts cells handed out."""

    def __init__(self):
        self.allocated = 0

    def alloc(self, value):
        self.allocated += 1
        return Loc(value)


class Knot:
    """Placeholder for the value under construction by ``Y``."""

    __slots__ = ("value",)

    def __init__(self):
        self.value = None


def force(v):
    while type(v) is Knot:
        if v.value is None:
            raise EvalError("Y: fixed point used before it was constructed")
        v = v.value
    return v


# ---------------------------------------------------------------------------
# environments


class Env:
    __slots__ = ()


class EmptyEnv(Env):
    __slots__ = ()

    def __repr__(self):
        return "{}"


EMPTY = EmptyEnv()


class Bind(Env):
    __slots__ = ("key", "loc")

    def __init__(self, key, loc):
        self.key = key
        self.loc = loc


class Cat(Env):
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right


class GlobalEnv(Env):
    """The mutable top-level environment; later definitions are visible to
    closures created earlier."""

    __slots__ = ("table", "parent")

    def __init__(self, parent=None):
        self.table = {}
        self.parent = parent

    def define(self, key, loc):
        self.table.pop(key, None)
        self.table[key] = loc

    def local_lookup(self, key):
        env = self
        while env is not None:
            loc = env.table.get(key)
            if loc is not None:
                return loc
            env = env.parent
        return None


def bind(key, value):
    return Bind(key, Loc(value))


def concat(left, right):
    if left is EMPTY:
        return right
    if right is EMPTY:
        return left
    return Cat(left, right)


def lookup(env, key):
    """Location bound to ``key`` (rightmost binding wins) or ``None``."""
    stack = None
    e = env
    while True:
        t = type(e)
        if t is Cat:
            r = e.right
            if type(r) is Bind:
                # the common shape: an environment extended by one binding
                if r.key == key:
                    return r.loc
                e = e.left
                continue
            if stack is None:
                stack = []
            stack.append(e.left)
            e = r
            continue
        if t is Bind:
            if e.key == key:
                return e.loc
        elif t is GlobalEnv:
            loc = e.local_lookup(key)
            if loc is not None:
                return loc
        if not stack:
            return None
        e = stack.pop()


def leaves(env):
    """Bindings left to right as ``(key, loc)``; empty environments as ``None``."""
    stack = [env]
    while stack:
        e = stack.pop()
        t = type(e)
        if t is Bind:
            yield (e.key, e.loc)
        elif t is Cat:
            stack.append(e.right)
            stack.append(e.left)
        elif t is GlobalEnv:
            chain = []
            g = e
            while g is not None:
                chain.append(g)
                g = g.parent
            for g in reversed(chain):
                yield from g.table.items()
        else:
            yield None


def flat_items(env):
    """``(key, loc)`` pairs visible in ``env``, keys in first-occurrence order."""
    result = {}
    for leaf in leaves(env):
        if leaf is not None:
            key, loc = leaf
            # a dict keeps the first insertion position but the last value
            result[key] = loc
    return list(result.items())


def domain(env):
    return [k for k, _ in flat_items(env)]


# ---------------------------------------------------------------------------
# functions and data


class Closure:
    __slots__ = ("param", "body", "env", "code")

    def __init__(self, param, body, env, code):
        self.param = param
        self.body = body  # compiled body: env -> value
        self.env = env
        self.code = code  # the kernel lambda node


class Prim:
    """A curried primitive that fires once ``arity`` arguments arrive."""

    __slots__ = ("name", "arity", "fn", "args")

    def __init__(self, name, arity, fn, args=()):
        self.name = name
        self.arity = arity
        self.fn = fn
        self.args = args

    def __repr__(self):
        return f"<prim {self.name}/{self.arity}>"


class Constructed:
    __slots__ = ("tag", "payload")

    def __init__(self, tag, payload):
        self.tag = tag
        self.payload = payload


class SetValue:
    """Finite set kept in insertion order; membership uses kernel equality."""

    __slots__ = ("items",)

    def __init__(self, items=()):
        kept = []
        for item in items:
            if not any(values_equal(item, k) for k in kept):
                kept.append(item)
        self.items = tuple(kept)

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def contains(self, v):
        return any(values_equal(v, k) for k in self.items)

    def union(self, other):
        return SetValue(self.items + other.items)

    def minus(self, other):
        return SetValue(i for i in self.items if not other.contains(i))


class BraidValue:
    """Base for object-system values so the kernel can print and compare them."""

    def braid_equal(self, other):
        return self is other

    def braid_format(self, fmt):
        return f"<{type(self).__name__}>"


_serial = itertools.count(1)


def next_serial():
    return next(_serial)


# ---------------------------------------------------------------------------
# equality and printing


def values_equal(a, b):
    a = force(a)
    b = force(b)
    if a is b:
        return True
    ta, tb = type(a), type(b)
    if ta is not tb:
        return False
    if ta in (int, str, bool):
        return a == b
    if ta is tuple or ta is list:
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    if ta is SetValue:
        return len(a.items) == len(b.items) and all(b.contains(x) for x in a.items)
    if ta is Constructed:
        return a.tag == b.tag and values_equal(a.payload, b.payload)
    if isinstance(a, BraidValue):
        return a.braid_equal(b)
    return False


def quote(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


class Formatter:
    def __init__(self):
        self.active = set()

    def __call__(self, v):
        v = force(v) if not (type(v) is Knot and v.value is None) else v
        t = type(v)
        if t is bool:
            return "true" if v else "false"
        if t is int:
            return str(v)
        if t is str:
            return quote(v)
        if v is EPS or v is NULL:
            return v.name
        if t is Knot:
            return "<knot>"
        key = id(v)
        if key in self.active:
            return "..."
        self.active.add(key)
        try:
            return self._compound(v, t)
        finally:
            self.active.discard(key)

    def _compound(self, v, t):
        if t is tuple:
            return "(" + ", ".join(self(i) for i in v) + ")"
        if t is list:
            return "[" + ", ".join(self(i) for i in v) + "]"
        if t is SetValue:
            return "{|" + ", ".join(self(i) for i in v.items) + "|}"
        if isinstance(v, Env):
            items = flat_items(v)
            return "{" + ", ".join(f"{quote(k)} |-> {self(loc.value)}" for k, loc in items) + "}"
        if t is Closure or t is Prim:
            return "<fn>"
        if t is Constructed:
            return f"{v.tag}({self(v.payload)})"
        if isinstance(v, BraidValue):
            return v.braid_format(self)
        return f"<{t.__name__}>"


def format_value(v):
    return Formatter()(v)


def to_text(v):
    """The ``str`` primitive: strings print bare, everything else as shown."""
    v = force(v)
    if type(v) is str:
        return v
    return format_value(v)
