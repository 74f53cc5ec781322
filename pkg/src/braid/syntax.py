"""Lexer, parser and pretty-printer for the sugared surface language.

Concrete syntax summary::

    \\p1 p2. e            lambda with pattern parameters
    f x (a, b) = e        function clause; clauses alternate with |
    meth m p = e          method clause (hidden self, next, ivar env)
    e where d1 d2         local declarations (also: let d1 d2 in e)
    case e of p => e | p => e end
    open e1 in e2
    k |-> v, e1 & e2, e @ k, e1 |hook| f     environments
    x :: l, l1 ++ l2, [a, b], {| a, b |}, s1 union s2, s1 \\\\ s2
    t ! n                 tuple projection (1-based)
    x := e                assignment through a location
    eps, null, true, false, {}, {||}

Top-level items start in column 1; continuation lines are indented.  An
explicit ``;;`` also ends an item.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .errors import ParseError

# ---------------------------------------------------------------------------
# source AST


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Ident(Node):
    name: str
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Ctor(Node):
    name: str
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Num(Node):
    value: int


@dataclass(frozen=True)
class Str(Node):
    value: str


@dataclass(frozen=True)
class Lit(Node):
    """Keyword constants: eps, null, true, false, {} and {||}."""

    name: str


@dataclass(frozen=True)
class Lambda(Node):
    params: tuple
    body: Node


@dataclass(frozen=True)
class App(Node):
    fn: Node
    arg: Node


@dataclass(frozen=True)
class Infix(Node):
    op: str
    left: Node
    right: Node
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Section(Node):
    """An infix operator used as a value, written ``(op)``."""

    op: str


@dataclass(frozen=True)
class If(Node):
    test: Node
    then: Node
    orelse: Node


@dataclass(frozen=True)
class Tuple(Node):
    items: tuple


@dataclass(frozen=True)
class Seq(Node):
    first: Node
    second: Node


@dataclass(frozen=True)
class ListLit(Node):
    items: tuple


@dataclass(frozen=True)
class SetLit(Node):
    items: tuple


@dataclass(frozen=True)
class Where(Node):
    body: Node
    decls: tuple


@dataclass(frozen=True)
class Let(Node):
    decls: tuple
    body: Node


@dataclass(frozen=True)
class Arm(Node):
    pattern: Node
    body: Node


@dataclass(frozen=True)
class Case(Node):
    scrutinee: Node
    arms: tuple


@dataclass(frozen=True)
class Open(Node):
    env: Node
    body: Node


# declarations


@dataclass(frozen=True)
class Binding(Node):
    name: str
    expr: Node
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Clause(Node):
    name: str
    params: tuple
    body: Node
    is_meth: bool = False
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class FunDecl(Node):
    clauses: tuple

    @property
    def pos(self):
        return self.clauses[0].pos


# patterns


@dataclass(frozen=True)
class PIdent(Node):
    name: str


@dataclass(frozen=True)
class PWild(Node):
    pass


@dataclass(frozen=True)
class PTuple(Node):
    items: tuple


@dataclass(frozen=True)
class PCtor(Node):
    name: str
    arg: Node


@dataclass(frozen=True)
class PNum(Node):
    value: int


@dataclass(frozen=True)
class PStr(Node):
    value: str


@dataclass(frozen=True)
class PList(Node):
    items: tuple


@dataclass(frozen=True)
class PCons(Node):
    head: Node
    tail: Node


# program


@dataclass(frozen=True)
class TopDecls(Node):
    decls: tuple


@dataclass(frozen=True)
class TopExpr(Node):
    expr: Node


@dataclass(frozen=True)
class Program(Node):
    items: tuple


Decl = Union[Binding, FunDecl]

# ---------------------------------------------------------------------------
# lexer

KEYWORDS = frozenset(
    "let in where if then else case of end open meth eps null true false union".split()
)

# longest first so that maximal munch works with a simple scan
SYMBOLS = sorted(
    [
        "{||}", "|hook|", "|->", "{|", "|}", ":=", "::", "++", "==", "<>", "<=",
        ">=", "=>", "\\\\", ";;", "\\", "(", ")", "[", "]", "{", "}", ",", ".",
        ";", "=", "|", "&", "@", "!", "+", "-", "*", "/", "<", ">",
    ],
    key=len,
    reverse=True,
)

# (operators, associativity), loosest first
LEVELS = [
    ((";",), "right"),
    ((":=",), "right"),
    (("==", "<>", "<", "<=", ">", ">="), "left"),
    (("&", "|hook|"), "left"),
    (("|->",), "right"),
    (("++", "union", "\\\\"), "left"),
    (("::",), "right"),
    (("+", "-"), "left"),
    (("*", "/"), "left"),
    (("@",), "left"),
    (("!",), "left"),
]

INFIX_OPS = frozenset(op for ops, _ in LEVELS for op in ops if op != ";")
OP_LEVEL = {op: (i, assoc == "right") for i, (ops, assoc) in enumerate(LEVELS) for op in ops}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT CONS NUM STR KW SYM EOF
    value: object
    line: int
    col: int
    bol: bool = False

    def describe(self):
        if self.kind == "EOF":
            return "end of input"
        if self.kind == "STR":
            return repr(self.value)
        return f"'{self.value}'"


def tokenize(text):
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    at_bol = True
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            at_bol = True
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col, bol = line, col, at_bol
        at_bol = False
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("NUM", int(text[i:j]), start_line, start_col, bol))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            if word == "_":
                kind = "SYM"
            elif word in KEYWORDS:
                kind = "KW"
            elif word[0].isupper() and word != "Y":
                kind = "CONS"
            else:
                kind = "IDENT"
            tokens.append(Token(kind, word, start_line, start_col, bol))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            buf = []
            while True:
                if j >= n or text[j] == "\n":
                    raise ParseError("unterminated string literal", start_line, start_col)
                c = text[j]
                if c == "\\" and j + 1 < n and text[j + 1] in '"\\':
                    buf.append(text[j + 1])
                    j += 2
                    continue
                if c == '"':
                    j += 1
                    break
                buf.append(c)
                j += 1
            tokens.append(Token("STR", "".join(buf), start_line, start_col, bol))
            col += j - i
            i = j
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("SYM", sym, start_line, start_col, bol))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", start_line, start_col)
    return tokens


def split_items(tokens):
    """Split a token stream into top-level items.

    A new item starts at any token that begins a line in column 1, and ``;;``
    terminates the current item.
    """
    items, current = [], []
    for tok in tokens:
        if tok.kind == "SYM" and tok.value == ";;":
            if current:
                items.append(current)
            current = []
            continue
        if tok.bol and tok.col == 1 and current:
            items.append(current)
            current = []
        current.append(tok)
    if current:
        items.append(current)
    return items


# ---------------------------------------------------------------------------
# parser

ATOM_START_KW = frozenset(["eps", "null", "true", "false", "if", "let", "case", "open"])
ATOM_START_SYM = frozenset(["(", "[", "{", "{|", "{||}", "\\"])
PAT_START_SYM = frozenset(["(", "[", "_", "-"])


class Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0
        last = tokens[-1] if tokens else None
        self.eof = Token("EOF", None, 0, 0)
        self._eof_line = (last.line, last.col) if last else (0, 0)

    # -- token helpers -----------------------------------------------------

    def peek(self, offset=0):
        i = self.pos + offset
        if i < len(self.tokens):
            return self.tokens[i]
        return self.eof

    def at(self, value, offset=0):
        tok = self.peek(offset)
        return tok.kind in ("SYM", "KW") and tok.value == value

    def advance(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def error(self, message, expected=()):
        tok = self.peek()
        if tok.kind == "EOF":
            raise ParseError(f"{message}; found end of input", 0, 0, expected)
        raise ParseError(f"{message}; found {tok.describe()}", tok.line, tok.col, expected)

    def expect(self, value):
        if not self.at(value):
            self.error(f"expected '{value}'", [f"'{value}'"])
        return self.advance()

    def expect_ident(self):
        tok = self.peek()
        if tok.kind != "IDENT":
            self.error("expected an identifier", ["identifier"])
        return self.advance()

    def at_end(self):
        return self.pos >= len(self.tokens)

    # -- program -----------------------------------------------------------

    def parse_item(self):
        if self.at("let"):
            save = self.pos
            self.advance()
            decls = self.parse_decls()
            if self.at("in"):
                self.pos = save
                item = TopExpr(self.parse_expr())
            else:
                item = TopDecls(decls)
        else:
            item = TopExpr(self.parse_expr())
        if not self.at_end():
            self.error("unexpected token after item", ["end of item"])
        return item

    # -- expressions -------------------------------------------------------

    def parse_expr(self):
        expr = self.parse_binary(0)
        while self.at("where"):
            self.advance()
            expr = Where(expr, self.parse_decls())
        return expr

    def parse_binary(self, level):
        """Precedence climbing over LEVELS; ``level`` is the loosest allowed."""
        left = self.parse_unary()
        while True:
            tok = self.peek()
            if tok.kind not in ("SYM", "KW"):
                return left
            entry = OP_LEVEL.get(tok.value)
            if entry is None or entry[0] < level:
                return left
            op_level, right_assoc = entry
            self.advance()
            right = self.parse_binary(op_level if right_assoc else op_level + 1)
            left = self._make_binary(tok, left, right)

    @staticmethod
    def _make_binary(tok, left, right):
        if tok.value == ";":
            return Seq(left, right)
        return Infix(tok.value, left, right, (tok.line, tok.col))

    def parse_unary(self):
        if self.at("-"):
            tok = self.advance()
            return Infix("-", Num(0), self.parse_unary(), (tok.line, tok.col))
        return self.parse_app()

    def parse_app(self):
        fn = self.parse_atom()
        while self.starts_atom() and not self.at_boundary():
            fn = App(fn, self.parse_atom())
        return fn

    def starts_atom(self):
        tok = self.peek()
        if tok.kind in ("IDENT", "CONS", "NUM", "STR"):
            return True
        if tok.kind == "KW":
            return tok.value in ATOM_START_KW
        if tok.kind == "SYM":
            return tok.value in ATOM_START_SYM
        return False

    def at_boundary(self):
        """True when the upcoming tokens start a declaration or a case arm."""
        tok = self.peek()
        if tok.kind == "IDENT" and self._speculate(self._decl_head):
            return True
        if tok.kind in ("IDENT", "CONS", "NUM", "STR") or self.at("(") or self.at("["):
            return self._speculate(self._arm_head)
        return False

    def _speculate(self, probe):
        save = self.pos
        try:
            return probe()
        except ParseError:
            return False
        finally:
            self.pos = save

    def _decl_head(self):
        self.expect_ident()
        while self.starts_pattern():
            self.parse_param()
        return self.at("=")

    def _arm_head(self):
        self.parse_pattern()
        return self.at("=>")

    def parse_atom(self):
        tok = self.peek()
        pos = (tok.line, tok.col)
        if tok.kind == "IDENT":
            self.advance()
            return Ident(tok.value, pos)
        if tok.kind == "CONS":
            self.advance()
            return Ctor(tok.value, pos)
        if tok.kind == "NUM":
            self.advance()
            return Num(tok.value)
        if tok.kind == "STR":
            self.advance()
            return Str(tok.value)
        if tok.kind == "KW":
            if tok.value in ("eps", "null", "true", "false"):
                self.advance()
                return Lit(tok.value)
            if tok.value == "if":
                self.advance()
                test = self.parse_expr()
                self.expect("then")
                then = self.parse_expr()
                self.expect("else")
                return If(test, then, self.parse_expr())
            if tok.value == "let":
                self.advance()
                decls = self.parse_decls()
                self.expect("in")
                return Let(decls, self.parse_expr())
            if tok.value == "case":
                self.advance()
                scrutinee = self.parse_expr()
                self.expect("of")
                arms = [self.parse_arm()]
                while not self.at("end"):
                    if self.at("|"):
                        self.advance()
                    if self.at_end():
                        self.error("unterminated case expression", ["'end'"])
                    arms.append(self.parse_arm())
                self.advance()
                return Case(scrutinee, tuple(arms))
            if tok.value == "open":
                self.advance()
                env = self.parse_expr()
                self.expect("in")
                return Open(env, self.parse_expr())
        if tok.kind == "SYM":
            v = tok.value
            if v == "\\":
                self.advance()
                params = [self.parse_param()]
                while not self.at("."):
                    if not self.starts_pattern():
                        self.error("expected a parameter pattern or '.'", ["pattern", "'.'"])
                    params.append(self.parse_param())
                self.advance()
                return Lambda(tuple(params), self.parse_expr())
            if v == "(":
                return self.parse_paren()
            if v == "[":
                self.advance()
                items = self.parse_expr_list("]")
                return ListLit(items)
            if v == "{":
                self.advance()
                self.expect("}")
                return Lit("{}")
            if v == "{||}":
                self.advance()
                return Lit("{||}")
            if v == "{|":
                self.advance()
                return SetLit(self.parse_expr_list("|}"))
        self.error("expected an expression", ["expression"])

    def parse_paren(self):
        self.expect("(")
        if self.at(")"):
            self.advance()
            return Tuple(())
        tok = self.peek()
        if tok.kind in ("SYM", "KW") and tok.value in INFIX_OPS and self.at(")", 1):
            self.advance()
            self.advance()
            return Section(tok.value)
        first = self.parse_expr()
        if self.at(")"):
            self.advance()
            return first
        items = [first]
        while self.at(","):
            self.advance()
            items.append(self.parse_expr())
        self.expect(")")
        return Tuple(tuple(items))

    def parse_expr_list(self, close):
        items = []
        if self.at(close):
            self.advance()
            return ()
        items.append(self.parse_expr())
        while self.at(","):
            self.advance()
            items.append(self.parse_expr())
        self.expect(close)
        return tuple(items)

    def parse_arm(self):
        pattern = self.parse_pattern()
        self.expect("=>")
        return Arm(pattern, self.parse_expr())

    # -- declarations ------------------------------------------------------

    def starts_decl(self):
        if self.at("meth"):
            return True
        return self.peek().kind == "IDENT" and self._speculate(self._decl_head)

    def parse_decls(self):
        if not self.starts_decl():
            self.error("expected a declaration", ["declaration"])
        decls = [self.parse_decl()]
        while self.starts_decl():
            decls.append(self.parse_decl())
        return tuple(decls)

    def parse_decl(self):
        first = self.parse_clause()
        if not self._at_alternative():
            if isinstance(first, Clause):
                return FunDecl((first,))
            return first
        if isinstance(first, Binding):
            self.error("a simple binding cannot have alternatives")
        clauses = [first]
        while self._at_alternative():
            self.advance()
            clause = self.parse_clause()
            if isinstance(clause, Binding):
                raise ParseError("alternative clause needs parameters", *clause.pos)
            if clause.is_meth and not first.is_meth:
                raise ParseError("only the first clause of a declaration may say meth", *clause.pos)
            # alternatives of a method are methods too
            clauses.append(replace(clause, is_meth=first.is_meth))
        return FunDecl(tuple(clauses))

    def _at_alternative(self):
        if not self.at("|"):
            return False
        save = self.pos
        self.advance()
        try:
            return self.starts_decl()
        finally:
            self.pos = save

    def parse_clause(self):
        is_meth = False
        if self.at("meth"):
            self.advance()
            is_meth = True
        name_tok = self.expect_ident()
        pos = (name_tok.line, name_tok.col)
        params = []
        while self.starts_pattern():
            params.append(self.parse_param())
        self.expect("=")
        body = self.parse_expr()
        if is_meth or params:
            if is_meth and not params:
                raise ParseError("a method needs at least one parameter pattern", *pos)
            return Clause(name_tok.value, tuple(params), body, is_meth, pos)
        return Binding(name_tok.value, body, pos)

    # -- patterns ----------------------------------------------------------

    def starts_pattern(self):
        tok = self.peek()
        if tok.kind in ("IDENT", "CONS", "NUM", "STR"):
            return True
        return tok.kind == "SYM" and tok.value in PAT_START_SYM

    def parse_pattern(self):
        head = self.parse_param()
        if self.at("::"):
            self.advance()
            return PCons(head, self.parse_pattern())
        return head

    def parse_param(self):
        tok = self.peek()
        if tok.kind == "CONS":
            self.advance()
            return PCtor(tok.value, self.parse_pattern_atom())
        return self.parse_pattern_atom()

    def parse_pattern_atom(self):
        tok = self.peek()
        if tok.kind == "IDENT":
            self.advance()
            return PIdent(tok.value)
        if tok.kind == "NUM":
            self.advance()
            return PNum(tok.value)
        if tok.kind == "STR":
            self.advance()
            return PStr(tok.value)
        if self.at("_"):
            self.advance()
            return PWild()
        if self.at("-") and self.peek(1).kind == "NUM":
            self.advance()
            return PNum(-self.advance().value)
        if self.at("("):
            self.advance()
            if self.at(")"):
                self.advance()
                return PTuple(())
            items = [self.parse_pattern()]
            while self.at(","):
                self.advance()
                items.append(self.parse_pattern())
            self.expect(")")
            if len(items) == 1:
                return items[0]
            return PTuple(tuple(items))
        if self.at("["):
            self.advance()
            items = []
            if not self.at("]"):
                items.append(self.parse_pattern())
                while self.at(","):
                    self.advance()
                    items.append(self.parse_pattern())
            self.expect("]")
            return PList(tuple(items))
        self.error("expected a pattern", ["pattern"])


def parse_program(text):
    """Parse a whole source file into a :class:`Program`."""
    items = []
    for chunk in split_items(tokenize(text)):
        items.append(Parser(chunk).parse_item())
    return Program(tuple(items))


def parse_expr(text):
    parser = Parser(tokenize(text))
    if parser.at_end():
        parser.error("expected an expression", ["expression"])
    expr = parser.parse_expr()
    if not parser.at_end():
        parser.error("unexpected token after expression", ["end of input"])
    return expr


# ---------------------------------------------------------------------------
# pretty-printer (fully parenthesised, re-parseable)


def quote(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def pretty_pattern(p):
    if isinstance(p, PIdent):
        return p.name
    if isinstance(p, PWild):
        return "_"
    if isinstance(p, PNum):
        return str(p.value)
    if isinstance(p, PStr):
        return quote(p.value)
    if isinstance(p, PTuple):
        return "(" + ", ".join(pretty_pattern(i) for i in p.items) + ")"
    if isinstance(p, PCtor):
        return f"({p.name} {pretty_pattern(p.arg)})"
    if isinstance(p, PList):
        return "[" + ", ".join(pretty_pattern(i) for i in p.items) + "]"
    if isinstance(p, PCons):
        return f"({pretty_pattern(p.head)} :: {pretty_pattern(p.tail)})"
    raise TypeError(f"not a pattern: {p!r}")


def pretty_decl(d):
    if isinstance(d, Binding):
        return f"{d.name} = {pretty(d.expr)}"
    parts = []
    for c in d.clauses:
        head = ("meth " if c.is_meth else "") + c.name
        params = " ".join(pretty_pattern(p) for p in c.params)
        parts.append(f"{head} {params} = {pretty(c.body)}")
    return " | ".join(parts)


def pretty(e):
    """Render a source expression so that parsing it gives back ``e``."""
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, Ctor):
        return e.name
    if isinstance(e, Num):
        return str(e.value) if e.value >= 0 else f"(0 - {-e.value})"
    if isinstance(e, Str):
        return quote(e.value)
    if isinstance(e, Lit):
        return e.name
    if isinstance(e, Lambda):
        params = " ".join(pretty_pattern(p) for p in e.params)
        return f"(\\{params}. {pretty(e.body)})"
    if isinstance(e, App):
        return f"({pretty(e.fn)} {pretty(e.arg)})"
    if isinstance(e, Infix):
        return f"({pretty(e.left)} {e.op} {pretty(e.right)})"
    if isinstance(e, Section):
        return f"({e.op})"
    if isinstance(e, If):
        return f"(if {pretty(e.test)} then {pretty(e.then)} else {pretty(e.orelse)})"
    if isinstance(e, Tuple):
        return "(" + ", ".join(pretty(i) for i in e.items) + ")"
    if isinstance(e, Seq):
        return f"({pretty(e.first)}; {pretty(e.second)})"
    if isinstance(e, ListLit):
        return "[" + ", ".join(pretty(i) for i in e.items) + "]"
    if isinstance(e, SetLit):
        return "{| " + ", ".join(pretty(i) for i in e.items) + " |}"
    if isinstance(e, Where):
        decls = " ".join(pretty_decl(d) for d in e.decls)
        return f"({pretty(e.body)} where {decls})"
    if isinstance(e, Let):
        decls = " ".join(pretty_decl(d) for d in e.decls)
        return f"(let {decls} in {pretty(e.body)})"
    if isinstance(e, Case):
        arms = " | ".join(f"{pretty_pattern(a.pattern)} => {pretty(a.body)}" for a in e.arms)
        return f"(case {pretty(e.scrutinee)} of {arms} end)"
    if isinstance(e, Open):
        return f"(open {pretty(e.env)} in {pretty(e.body)})"
    raise TypeError(f"not an expression: {e!r}")


def pretty_program(prog):
    lines = []
    for item in prog.items:
        if isinstance(item, TopDecls):
            lines.append("let " + " ".join(pretty_decl(d) for d in item.decls))
        else:
            lines.append(pretty(item.expr))
    return "\n".join(lines) + ("\n" if lines else "")
