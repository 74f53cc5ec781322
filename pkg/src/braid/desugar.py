"""Translation of the surface AST into the kernel language.

The kernel has identifiers, numbers, strings, single-identifier lambdas,
application, conditionals, tuples and sequencing.  Two node types extend it:
``KBuiltin`` is a hygienic reference to a primitive, operator or constant
(it cannot be shadowed by user bindings), and ``KAssign`` carries ``:=``,
whose left operand denotes a location rather than a value.

Identifiers introduced by the translation are spelled ``%n``; the lexer can
never produce ``%`` so they cannot capture user names.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import syntax as S
from .errors import DesugarError

DUMP_FORMAT_VERSION = 1


@dataclass(frozen=True)
class KernelExpr:
    pass


@dataclass(frozen=True)
class KVar(KernelExpr):
    name: str


@dataclass(frozen=True)
class KNum(KernelExpr):
    value: int


@dataclass(frozen=True)
class KStr(KernelExpr):
    value: str


@dataclass(frozen=True)
class KBuiltin(KernelExpr):
    name: str


@dataclass(frozen=True)
class KLam(KernelExpr):
    param: str
    body: KernelExpr


@dataclass(frozen=True)
class KApp(KernelExpr):
    fn: KernelExpr
    arg: KernelExpr


@dataclass(frozen=True)
class KIf(KernelExpr):
    test: KernelExpr
    then: KernelExpr
    orelse: KernelExpr


@dataclass(frozen=True)
class KTuple(KernelExpr):
    items: tuple


@dataclass(frozen=True)
class KSeq(KernelExpr):
    first: KernelExpr
    second: KernelExpr


@dataclass(frozen=True)
class KAssign(KernelExpr):
    name: str
    expr: KernelExpr


@dataclass(frozen=True)
class KTopLet:
    """A mutually recursive group of top-level bindings."""

    bindings: tuple  # of (name, KernelExpr)


@dataclass(frozen=True)
class KTopExpr:
    expr: KernelExpr


@dataclass(frozen=True)
class KProgram:
    items: tuple


EPS = KBuiltin("eps")


def _app2(op, a, b):
    return KApp(KApp(KBuiltin(op), a), b)


class Desugarer:
    def __init__(self):
        self._counter = 0

    def fresh(self):
        self._counter += 1
        return f"%{self._counter}"

    # -- expressions -------------------------------------------------------

    def expr(self, e):
        method = getattr(self, "_" + type(e).__name__, None)
        if method is None:
            raise DesugarError(f"cannot translate {type(e).__name__} node")
        return method(e)

    def _Ident(self, e):
        return KVar(e.name)

    def _Ctor(self, e):
        return KApp(KBuiltin("mk"), KStr(e.name))

    def _Num(self, e):
        return KNum(e.value)

    def _Str(self, e):
        return KStr(e.value)

    def _Lit(self, e):
        return KBuiltin(e.name)

    def _Lambda(self, e):
        return self.lam_curried(e.params, e.body)

    def _App(self, e):
        return KApp(self.expr(e.fn), self.expr(e.arg))

    def _Infix(self, e):
        if e.op == ":=":
            if not isinstance(e.left, S.Ident):
                line, col = e.pos
                raise DesugarError(f"left operand of := must be an identifier (at {line}:{col})")
            return KAssign(e.left.name, self.expr(e.right))
        return _app2(e.op, self.expr(e.left), self.expr(e.right))

    def _Section(self, e):
        if e.op == ":=":
            raise DesugarError(":= cannot be used as a value")
        return KBuiltin(e.op)

    def _If(self, e):
        return KIf(self.expr(e.test), self.expr(e.then), self.expr(e.orelse))

    def _Tuple(self, e):
        return KTuple(tuple(self.expr(i) for i in e.items))

    def _Seq(self, e):
        return KSeq(self.expr(e.first), self.expr(e.second))

    def _ListLit(self, e):
        result = KBuiltin("[]")
        for item in reversed(e.items):
            result = _app2("::", self.expr(item), result)
        return result

    def _SetLit(self, e):
        if not e.items:
            return KBuiltin("{||}")
        parts = [KApp(KBuiltin("set"), self.expr(i)) for i in e.items]
        result = parts[0]
        for part in parts[1:]:
            result = _app2("union", result, part)
        return result

    def _Where(self, e):
        return self.bind_decls(e.decls, self.expr(e.body))

    def _Let(self, e):
        return self.bind_decls(e.decls, self.expr(e.body))

    def _Case(self, e):
        arms = [self.lam_pattern(a.pattern, self.expr(a.body)) for a in e.arms]
        return KApp(self.compose(arms), self.expr(e.scrutinee))

    def _Open(self, e):
        thunk = KLam(self.fresh(), self.expr(e.body))
        return KApp(_app2("|hook|", self.expr(e.env), thunk), KTuple(()))

    # -- patterns ----------------------------------------------------------

    def lam_curried(self, params, body):
        result = self.expr(body)
        for p in reversed(params):
            result = self.lam_pattern(p, result)
        return result

    def lam_pattern(self, p, body):
        """Kernel form of ``\\p. body`` where body is already kernel code."""
        if isinstance(p, S.PIdent):
            return KLam(p.name, body)
        if isinstance(p, S.PWild):
            return KLam(self.fresh(), body)
        i = self.fresh()
        return KLam(i, self.match(p, KVar(i), body))

    def let_pattern(self, p, value, body):
        return KApp(self.lam_pattern(p, body), value)

    def match(self, p, s, body):
        """Test ``s`` (a variable) against ``p``; ``body`` on success else eps."""
        if isinstance(p, S.PIdent):
            return KApp(KLam(p.name, body), s)
        if isinstance(p, S.PWild):
            return body
        if isinstance(p, S.PTuple):
            inner = body
            for k in range(len(p.items), 0, -1):
                inner = self.let_pattern(p.items[k - 1], _app2("!", s, KNum(k)), inner)
            test = KApp(KApp(KBuiltin("isntuple"), KNum(len(p.items))), s)
            return KIf(test, inner, EPS)
        if isinstance(p, S.PCtor):
            test = KApp(KApp(KBuiltin("isk"), KStr(p.name)), s)
            inner = self.let_pattern(p.arg, KApp(KBuiltin("stripk"), s), body)
            return KIf(test, inner, EPS)
        if isinstance(p, (S.PNum, S.PStr)):
            const = KNum(p.value) if isinstance(p, S.PNum) else KStr(p.value)
            return KIf(_app2("==", s, const), body, EPS)
        if isinstance(p, S.PList):
            if not p.items:
                return KIf(KApp(KBuiltin("isnil"), s), body, EPS)
            pattern = S.PList(())
            for item in reversed(p.items):
                pattern = S.PCons(item, pattern)
            return self.match(pattern, s, body)
        if isinstance(p, S.PCons):
            inner = self.let_pattern(
                p.head,
                KApp(KBuiltin("head"), s),
                self.let_pattern(p.tail, KApp(KBuiltin("tail"), s), body),
            )
            return KIf(KApp(KBuiltin("iscons"), s), inner, EPS)
        raise DesugarError(f"unknown pattern {p!r}")

    # -- declarations ------------------------------------------------------

    @staticmethod
    def compose(fns):
        result = fns[0]
        for fn in fns[1:]:
            result = KApp(KApp(KBuiltin("alt"), result), fn)
        return result

    def clause_shape(self, clause):
        """Parameters and body of a clause, with a method's hidden parameters."""
        if not clause.is_meth:
            return clause.params, clause.body
        i = self.fresh()
        hidden = S.PTuple((S.PIdent("self"), S.PIdent("next"), S.PIdent(i)))
        return (hidden,) + clause.params, S.Open(S.Ident(i), clause.body)

    def decl(self, d):
        if isinstance(d, S.Binding):
            return d.name, self.expr(d.expr)
        names = {c.name for c in d.clauses}
        if len(names) != 1:
            listed = ", ".join(sorted(names))
            line, col = d.pos
            raise DesugarError(f"clauses of one declaration have different names ({listed}) at {line}:{col}")
        name = d.clauses[0].name
        shapes = [self.clause_shape(c) for c in d.clauses]
        if len(shapes) == 1:
            params, body = shapes[0]
            return name, self.lam_curried(params, body)
        arities = {len(params) for params, _ in shapes}
        if len(arities) != 1:
            raise DesugarError(f"clauses of {name} take different numbers of parameters")
        arity = arities.pop()
        if arity == 1:
            return name, self.compose([self.lam_curried(p, b) for p, b in shapes])
        # curried alternatives: match all arguments at once as one tuple
        alts = [self.lam_pattern(S.PTuple(params), self.expr(body)) for params, body in shapes]
        args = [self.fresh() for _ in range(arity)]
        result = KApp(self.compose(alts), KTuple(tuple(KVar(a) for a in args)))
        for a in reversed(args):
            result = KLam(a, result)
        return name, result

    def decls(self, decls):
        pairs = [self.decl(d) for d in decls]
        seen = set()
        for name, _ in pairs:
            if name in seen:
                raise DesugarError(f"{name} is declared twice in one group")
            seen.add(name)
        return pairs

    def bind_decls(self, decls, body):
        pairs = self.decls(decls)
        if len(pairs) == 1:
            name, value = pairs[0]
            return KApp(KLam(name, body), value)
        pattern = S.PTuple(tuple(S.PIdent(n) for n, _ in pairs))
        return KApp(self.lam_pattern(pattern, body), KTuple(tuple(v for _, v in pairs)))

    def program(self, prog):
        items = []
        for item in prog.items:
            if isinstance(item, S.TopDecls):
                items.append(KTopLet(tuple(self.decls(item.decls))))
            else:
                items.append(KTopExpr(self.expr(item.expr)))
        return KProgram(tuple(items))


def desugar(e):
    """Translate a source expression to kernel code."""
    return Desugarer().expr(e)


def desugar_program(prog):
    return Desugarer().program(prog)


# ---------------------------------------------------------------------------
# validation and dumping

_KERNEL_NODES = (KVar, KNum, KStr, KBuiltin, KLam, KApp, KIf, KTuple, KSeq, KAssign)


def check_kernel(k):
    """Raise ``DesugarError`` unless ``k`` is built only from kernel nodes."""
    stack = [k]
    while stack:
        node = stack.pop()
        if isinstance(node, KProgram):
            stack.extend(node.items)
        elif isinstance(node, KTopLet):
            stack.extend(v for _, v in node.bindings)
        elif isinstance(node, KTopExpr):
            stack.append(node.expr)
        elif not isinstance(node, _KERNEL_NODES):
            raise DesugarError(f"non-kernel node {type(node).__name__}")
        elif isinstance(node, KLam):
            if not isinstance(node.param, str):
                raise DesugarError("lambda parameter is not an identifier")
            stack.append(node.body)
        elif isinstance(node, KApp):
            stack.extend((node.fn, node.arg))
        elif isinstance(node, KIf):
            stack.extend((node.test, node.then, node.orelse))
        elif isinstance(node, KTuple):
            stack.extend(node.items)
        elif isinstance(node, KSeq):
            stack.extend((node.first, node.second))
        elif isinstance(node, KAssign):
            stack.append(node.expr)
    return True


def dump_kernel(k):
    """Deterministic text for kernel code (stable across releases of format v1)."""
    if isinstance(k, KProgram):
        lines = [f"-- kernel dump v{DUMP_FORMAT_VERSION}"]
        for item in k.items:
            lines.append(dump_kernel(item))
        return "\n".join(lines) + "\n"
    if isinstance(k, KTopLet):
        parts = []
        for n, (name, value) in enumerate(k.bindings):
            keyword = "let" if n == 0 else "and"
            parts.append(f"{keyword} {name} = {dump_kernel(value)}")
        return "\n".join(parts)
    if isinstance(k, KTopExpr):
        return dump_kernel(k.expr)
    if isinstance(k, KVar):
        return k.name
    if isinstance(k, KNum):
        return str(k.value)
    if isinstance(k, KStr):
        return S.quote(k.value)
    if isinstance(k, KBuiltin):
        return f"({k.name})" if k.name in S.INFIX_OPS else k.name
    if isinstance(k, KLam):
        return f"\\{k.param}.({dump_kernel(k.body)})"
    if isinstance(k, KApp):
        fn = k.fn
        if isinstance(fn, KApp) and isinstance(fn.fn, KBuiltin) and fn.fn.name in S.INFIX_OPS:
            return f"({dump_kernel(fn.arg)} {fn.fn.name} {dump_kernel(k.arg)})"
        return f"({dump_kernel(fn)} {dump_kernel(k.arg)})"
    if isinstance(k, KIf):
        return f"(if {dump_kernel(k.test)} then {dump_kernel(k.then)} else {dump_kernel(k.orelse)})"
    if isinstance(k, KTuple):
        return "(" + ", ".join(dump_kernel(i) for i in k.items) + ")"
    if isinstance(k, KSeq):
        return f"({dump_kernel(k.first)}; {dump_kernel(k.second)})"
    if isinstance(k, KAssign):
        return f"({k.name} := {dump_kernel(k.expr)})"
    raise TypeError(f"not kernel code: {k!r}")
