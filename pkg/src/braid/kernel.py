"""Call-by-value evaluator for kernel code and the primitive operator suite.

Kernel expressions are compiled once into nested Python closures of the form
``env -> value``; an :class:`Interpreter` owns the global environment, the
store, the depth guard and the output streams.
"""

from __future__ import annotations

import random
import sys
import threading

from . import desugar as D
from . import values as V
from .errors import DepthExceeded, EvalError
from .syntax import parse_expr, parse_program
from .values import (
    EMPTY, EPS, NULL, Bind, Cat, Closure, Constructed, Env, GlobalEnv, Knot,
    Loc, Prim, SetValue, Store, force, format_value, to_text, values_equal,
)

DEFAULT_DEPTH = 10_000

_STACK_BYTES = 512 * 1024 * 1024
_RECURSION_LIMIT = 1_000_000
_deep = threading.local()


def run_deep(fn, *args, **kwargs):
    """Run ``fn`` on a thread with a large stack so deep evaluation is safe."""
    if getattr(_deep, "active", False):
        return fn(*args, **kwargs)
    result = {}

    def body():
        _deep.active = True
        try:
            result["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised on the calling thread
            result["error"] = exc

    if sys.getrecursionlimit() < _RECURSION_LIMIT:
        sys.setrecursionlimit(_RECURSION_LIMIT)
    old = threading.stack_size()
    threading.stack_size(_STACK_BYTES)
    try:
        worker = threading.Thread(target=body, name="braid-eval")
        worker.start()
    finally:
        threading.stack_size(old)
    worker.join()
    if "error" in result:
        raise result["error"]
    return result.get("value")


# ---------------------------------------------------------------------------
# small helpers used by primitives


def expect_int(v, op):
    v = force(v)
    if type(v) is not int:
        raise EvalError(f"{op}: expected a number, got {format_value(v)}")
    return v


def expect_str(v, op):
    v = force(v)
    if type(v) is not str:
        raise EvalError(f"{op}: expected a string, got {format_value(v)}")
    return v


def expect_list(v, op):
    v = force(v)
    if type(v) is not list:
        raise EvalError(f"{op}: expected a list, got {format_value(v)}")
    return v


def expect_env(v, op):
    v = force(v)
    if v is EPS:
        return EMPTY
    if not isinstance(v, Env):
        raise EvalError(f"{op}: expected an environment, got {format_value(v)}")
    return v


def expect_set(v, op):
    v = force(v)
    if type(v) is not SetValue:
        raise EvalError(f"{op}: expected a set, got {format_value(v)}")
    return v


def expect_closure(v, op):
    v = force(v)
    if type(v) is not Closure:
        raise EvalError(f"{op}: expected a closure, got {format_value(v)}")
    return v


def expect_pair(v, op):
    v = force(v)
    if type(v) is not tuple or len(v) != 2:
        raise EvalError(f"{op}: expected a pair, got {format_value(v)}")
    return v


def _compare(op, fn):
    def run(a, b):
        a, b = force(a), force(b)
        if type(a) is not type(b) or type(a) not in (int, str):
            raise EvalError(f"{op}: cannot compare {format_value(a)} and {format_value(b)}")
        return fn(a, b)

    return run


def _arith(op, fn):
    def run(a, b):
        return fn(expect_int(a, op), expect_int(b, op))

    return run


def _divide(a, b):
    a, b = expect_int(a, "/"), expect_int(b, "/")
    if b == 0:
        raise EvalError("division by zero")
    return a // b


def _modulo(a, b):
    a, b = expect_int(a, "mod"), expect_int(b, "mod")
    if b == 0:
        raise EvalError("division by zero")
    return a % b


def _append(a, b):
    a, b = force(a), force(b)
    if type(a) is str and type(b) is str:
        return a + b
    if type(a) is list and type(b) is list:
        return a + b
    raise EvalError(f"++: cannot append {format_value(a)} and {format_value(b)}")


def _cons(x, l):
    return [x] + expect_list(l, "::")


def _project(t, n):
    t = force(t)
    n = expect_int(n, "!")
    if type(t) is not tuple:
        raise EvalError(f"!: expected a tuple, got {format_value(t)}")
    if not 1 <= n <= len(t):
        raise EvalError(f"!: index {n} out of range for a {len(t)}-tuple")
    return t[n - 1]


def _isntuple(n, v):
    n = expect_int(n, "isntuple")
    v = force(v)
    return type(v) is tuple and len(v) == n


def _head(l):
    l = expect_list(l, "head")
    if not l:
        raise EvalError("head of empty list")
    return l[0]


def _tail(l):
    l = expect_list(l, "tail")
    if not l:
        raise EvalError("tail of empty list")
    return l[1:]


def _bind(k, v):
    return Bind(expect_str(k, "|->"), Loc(v))


def _lookup(e, k):
    loc = V.lookup(expect_env(e, "@"), expect_str(k, "@"))
    return EPS if loc is None else loc.value


def _not(b):
    b = force(b)
    if type(b) is not bool:
        raise EvalError(f"not: expected a boolean, got {format_value(b)}")
    return not b


def _isk(tag, v):
    v = force(v)
    return type(v) is Constructed and v.tag == expect_str(tag, "isk")


def _stripk(v):
    v = force(v)
    if type(v) is not Constructed:
        raise EvalError(f"stripk: {format_value(v)} is not a constructed value")
    return v.payload


def _split(v, l, op, left):
    l = expect_list(l, op)
    hits = [i for i, x in enumerate(l) if values_equal(x, v)]
    if len(hits) != 1:
        what = "does not occur" if not hits else "occurs more than once"
        raise EvalError(f"{op}: {format_value(v)} {what} in the list")
    i = hits[0] + 1 if left else hits[0]
    return (l[:i], l[i:])


def _constructor(tag):
    tag = expect_str(tag, "mk")
    return Prim(tag, 1, lambda v: Constructed(tag, v))


def _error(msg):
    raise EvalError(to_text(msg))


class Interpreter:
    """One evaluation context: global environment, store and primitives.

    ``out`` receives each printed line; ``trace`` receives ``#send`` lines
    when ``trace_send`` is set.
    """

    def __init__(self, depth_limit=DEFAULT_DEPTH, seed=0, out=None, trace=None, trace_send=False):
        self.depth_limit = depth_limit
        self.depth = 0
        self.store = Store()
        self.rng = random.Random(seed)
        self.out = out if out is not None else (lambda line: print(line, flush=True))
        self.trace = trace if trace is not None else (lambda line: print(line, flush=True))
        self.trace_send = trace_send
        self.builtins = {}
        self.globals = GlobalEnv()
        self.braid = None
        self._install_primitives()
        from . import graphlib

        graphlib.install_primitives(self)

    # -- primitive registry ------------------------------------------------

    def prim(self, name, arity, fn, public=True):
        value = Prim(name, arity, fn)
        self.builtins[name] = value
        if public and (name[0].isalpha() or name == "Y"):
            self.define(name, value)
        return value

    def constant(self, name, value):
        self.builtins[name] = value

    def define(self, name, value, env=None):
        (env or self.globals).define(name, self.store.alloc(value))

    def lookup_global(self, name):
        loc = self.globals.local_lookup(name)
        if loc is None:
            raise EvalError(f"unbound identifier {name}")
        return force(loc.value)

    def _install_primitives(self):
        p = self.prim
        self.constant("eps", EPS)
        self.constant("null", NULL)
        self.constant("true", True)
        self.constant("false", False)
        self.constant("{}", EMPTY)
        self.constant("{||}", SetValue())
        self.constant("[]", [])
        p("+", 2, _arith("+", lambda a, b: a + b))
        p("-", 2, _arith("-", lambda a, b: a - b))
        p("*", 2, _arith("*", lambda a, b: a * b))
        p("/", 2, _divide)
        p("mod", 2, _modulo)
        p("==", 2, values_equal)
        p("<>", 2, lambda a, b: not values_equal(a, b))
        p("<", 2, _compare("<", lambda a, b: a < b))
        p("<=", 2, _compare("<=", lambda a, b: a <= b))
        p(">", 2, _compare(">", lambda a, b: a > b))
        p(">=", 2, _compare(">=", lambda a, b: a >= b))
        p("not", 1, _not)
        # environments
        p("|->", 2, _bind)
        p("&", 2, lambda a, b: Cat(expect_env(a, "&"), expect_env(b, "&")))
        p("@", 2, _lookup)
        p("dom", 1, lambda e: SetValue(V.domain(expect_env(e, "dom"))))
        p("reify", 1, lambda f: expect_closure(f, "reify").env)
        p("install", 1, self._install)
        p("|hook|", 2, self._extend)
        p("envfold", 4, self._envfold)
        # lists and tuples
        p("::", 2, _cons)
        p("++", 2, _append)
        p("head", 1, _head)
        p("tail", 1, _tail)
        p("isnil", 1, lambda l: not expect_list(l, "isnil"))
        p("iscons", 1, lambda l: type(force(l)) is list and bool(force(l)))
        p("length", 1, lambda l: len(expect_list(l, "length")))
        p("reverse", 1, lambda l: expect_list(l, "reverse")[::-1])
        p("map", 2, lambda f, l: [self.apply(f, x) for x in expect_list(l, "map")])
        p("foldr", 4, self._foldr)
        p("foldl", 4, self._foldl)
        p("splitlistl", 1, lambda pair: _split(*expect_pair(pair, "splitlistl"), "splitlistl", True))
        p("splitlistr", 1, lambda pair: _split(*expect_pair(pair, "splitlistr"), "splitlistr", False))
        p("find", 3, self._find)
        p("!", 2, _project)
        p("isntuple", 2, _isntuple)
        # sets
        p("set", 1, lambda v: SetValue((v,)))
        p("union", 2, lambda a, b: expect_set(a, "union").union(expect_set(b, "union")))
        p("\\\\", 2, lambda a, b: expect_set(a, "\\\\").minus(expect_set(b, "\\\\")))
        p("member", 2, lambda v, s: expect_set(s, "member").contains(v))
        p("elements", 1, lambda s: list(expect_set(s, "elements").items))
        # constructors
        p("mk", 1, _constructor, public=False)
        p("isk", 2, _isk)
        p("stripk", 1, _stripk)
        # control
        p("Y", 1, self._fix)
        p("alt", 3, self._alt)
        p("str", 1, to_text)
        p("error", 1, _error)
        p("print", 1, self._print)
        p("random", 1, lambda n: self.rng.randrange(expect_int(n, "random")))

    # -- primitives needing the interpreter ---------------------------------

    def _install(self, pair):
        e, f = expect_pair(pair, "install")
        f = expect_closure(f, "install")
        return Closure(f.param, f.body, expect_env(e, "install"), f.code)

    def _extend(self, e, f):
        f = expect_closure(f, "|hook|")
        return Closure(f.param, f.body, V.concat(f.env, expect_env(e, "|hook|")), f.code)

    def _fix(self, f):
        knot = Knot()
        value = self.apply(f, knot)
        if value is knot:
            raise EvalError("Y: function returned its own argument")
        knot.value = value
        return value

    def _alt(self, f1, f2, v):
        x = self.apply(f1, v)
        if force(x) is EPS:
            return self.apply(f2, v)
        return x

    def _foldr(self, op, f, v, l):
        acc = v
        for x in reversed(expect_list(l, "foldr")):
            acc = self.apply(self.apply(op, self.apply(f, x)), acc)
        return acc

    def _foldl(self, op, f, v, l):
        acc = v
        for x in expect_list(l, "foldl"):
            acc = self.apply(self.apply(op, acc), self.apply(f, x))
        return acc

    def _envfold(self, op, kv, v, e):
        def walk(env):
            t = type(env)
            if t is Bind:
                return self.apply(self.apply(kv, env.key), env.loc.value)
            if t is Cat:
                left = walk(env.left)
                return self.apply(self.apply(op, left), walk(env.right))
            if t is GlobalEnv:
                parts = [p for p in V.leaves(env)]
                if not parts:
                    return v
                acc = None
                for key, loc in parts:
                    item = self.apply(self.apply(kv, key), loc.value)
                    acc = item if acc is None else self.apply(self.apply(op, acc), item)
                return acc
            return v

        return walk(expect_env(e, "envfold"))

    def _find(self, pred, default, l):
        for x in expect_list(l, "find"):
            hit = force(self.apply(pred, x))
            if type(hit) is not bool:
                raise EvalError("find: predicate did not return a boolean")
            if hit:
                return x
        return default

    def _print(self, v):
        self.out(to_text(v))
        return v

    # -- application -------------------------------------------------------

    def apply(self, f, arg):
        f = force(f)
        t = type(f)
        if t is Closure:
            if self.depth >= self.depth_limit:
                raise DepthExceeded(f"evaluation depth limit of {self.depth_limit} exceeded")
            self.depth += 1
            try:
                return f.body(Cat(f.env, Bind(f.param, Loc(arg))))
            finally:
                self.depth -= 1
        if t is Prim:
            args = f.args + (arg,)
            if len(args) == f.arity:
                return f.fn(*args)
            return Prim(f.name, f.arity, f.fn, args)
        raise EvalError(f"cannot apply {format_value(f)} as a function")

    # -- compilation -------------------------------------------------------

    def compile(self, node):
        t = type(node)
        if t is D.KVar:
            name = node.name
            lookup = V.lookup

            def run_var(env):
                loc = lookup(env, name)
                if loc is None:
                    raise EvalError(f"unbound identifier {name}")
                return loc.value

            return run_var
        if t is D.KNum or t is D.KStr:
            value = node.value
            return lambda env: value
        if t is D.KBuiltin:
            if node.name not in self.builtins:
                raise EvalError(f"unknown builtin {node.name}")
            value = self.builtins[node.name]
            return lambda env: value
        if t is D.KLam:
            body = self.compile(node.body)
            param = node.param
            return lambda env: Closure(param, body, env, node)
        if t is D.KApp:
            return self.compile_app(node)
        return self.compile_other(node)

    def compile_app(self, node):
        """Applications, with direct paths for immediate lambdas and
        saturated binary primitives (the bulk of desugared code)."""
        f = node.fn
        if type(f) is D.KLam:
            # (\x. body) arg: bind directly instead of building a closure
            body = self.compile(f.body)
            arg = self.compile(node.arg)
            param = f.param

            def run_let(env):
                return body(Cat(env, Bind(param, Loc(arg(env)))))

            return run_let
        if type(f) is D.KApp and type(f.fn) is D.KBuiltin:
            prim = self.builtins.get(f.fn.name)
            if type(prim) is Prim and prim.arity == 2 and not prim.args:
                op = prim.fn
                left = self.compile(f.arg)
                right = self.compile(node.arg)

                def run_binary(env):
                    a = left(env)
                    return op(a, right(env))

                return run_binary
        fn = self.compile(node.fn)
        arg = self.compile(node.arg)
        apply = self.apply
        return lambda env: apply(fn(env), arg(env))

    def compile_other(self, node):
        t = type(node)
        if t is D.KIf:
            test = self.compile(node.test)
            then = self.compile(node.then)
            orelse = self.compile(node.orelse)

            def run_if(env):
                c = force(test(env))
                if c is True:
                    return then(env)
                if c is False:
                    return orelse(env)
                raise EvalError(f"condition is not a boolean: {format_value(c)}")

            return run_if
        if t is D.KTuple:
            items = [self.compile(i) for i in node.items]
            return lambda env: tuple([c(env) for c in items])
        if t is D.KSeq:
            first = self.compile(node.first)
            second = self.compile(node.second)

            def run_seq(env):
                first(env)
                return second(env)

            return run_seq
        if t is D.KAssign:
            name = node.name
            expr = self.compile(node.expr)

            def run_assign(env):
                loc = V.lookup(env, name)
                if loc is None:
                    raise EvalError(f"cannot assign to unbound identifier {name}")
                value = expr(env)
                loc.value = value
                return value

            return run_assign
        raise EvalError(f"not kernel code: {node!r}")

    # -- evaluation entry points -------------------------------------------

    def evaluate(self, kexpr, env=None):
        """Evaluate kernel code in ``env`` (the global environment by default)."""
        code = self.compile(kexpr)
        return run_deep(self._guarded, code, self.globals if env is None else env)

    def _guarded(self, code, env):
        try:
            return code(env)
        except RecursionError:
            raise DepthExceeded("evaluation exceeded the host recursion limit") from None

    def run_kernel_program(self, kprog, env=None, echo=True):
        """Run top-level items in order; returns the values of expression items."""
        return run_deep(self._run_items, kprog, self.globals if env is None else env, echo)

    def _run_items(self, kprog, env, echo):
        results = []
        for item in kprog.items:
            if isinstance(item, D.KTopLet):
                self.define_group(item.bindings, env)
            else:
                value = self._guarded(self.compile(item.expr), env)
                results.append(value)
                if echo:
                    self.out(format_value(value))
        return results

    def define_group(self, bindings, env=None):
        env = self.globals if env is None else env
        locs = []
        for name, _ in bindings:
            loc = self.store.alloc(NULL)
            env.define(name, loc)
            locs.append(loc)
        for (name, kexpr), loc in zip(bindings, locs):
            loc.value = self._guarded(self.compile(kexpr), env)

    def run_source(self, text, env=None, echo=True):
        """Parse, desugar and run a whole program."""
        kprog = D.desugar_program(parse_program(text))
        return self.run_kernel_program(kprog, env, echo)

    def eval_source(self, text, env=None):
        """Value of a single surface expression."""
        return self.evaluate(D.desugar(parse_expr(text)), env)

    def format(self, value):
        return format_value(value)


# module-level conveniences mirroring the operation names used in docs


def env_lookup(e, k):
    return _lookup(e, k)


def env_bind(k, v):
    return _bind(k, v)


def env_concat(e1, e2):
    return Cat(expect_env(e1, "&"), expect_env(e2, "&"))


def env_empty():
    return EMPTY


def env_domain(e):
    return SetValue(V.domain(expect_env(e, "dom")))
