"""Concrete syntax for fslang.

Top-level forms::

    type person;                     -- base type, open universe
    type person = hitchcock | mary;  -- base type with declared atoms
    facts stars : film ~> person ~> bool from "stars.csv";
    def name : TYPE = TERM;

Type tokens: ``->`` (functions), ``-o`` (nil-preserving functions),
``~>`` (finite maps), ``&`` (direct product), ``@`` (smash product),
``*`` (set product), ``maybe T``, ``nat``, ``bool``, ``1``.  Arrows are
right associative; binary operators associate left and bind tighter in
the order listed.

Term precedence, loosest to tightest: ``fn``/``let`` bodies extend
right, then ``or``, ``and``, ``when``, ``=``, ``+``, ``*``, application,
``pi1``/``pi2``/``just``.  Comments run from ``--`` to end of line.

Sugar is expanded during parsing; the resulting trees use only core
constructors (desugared output never contains and/when/let=/true/false).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    BOOL,
    App,
    Arrow,
    Base,
    DefDecl,
    Eq,
    FactDecl,
    Fin,
    Forget,
    IfJust,
    Just,
    Lam,
    LangError,
    LetJust,
    LetPair,
    Lolli,
    Maybe,
    NatLit,
    Nil,
    Pair,
    PointedType,
    Prod,
    Program,
    Proj,
    SetType,
    Smash,
    Span,
    TermNode,
    Type,
    TypeDecl,
    Unit,
    UnitLit,
    Nat0,
    Var,
    With,
    WithPair,
    is_pointed,
    type_to_str,
)

KEYWORDS = {
    "type", "facts", "def", "from", "atom",
    "fn", "nil", "just", "let", "in", "if", "then", "else",
    "pi1", "pi2", "when", "and", "or", "true", "false",
    "maybe", "nat", "bool", "unit",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>--[^\n]*)
  | (?P<nat>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<punct>=>|->|-o|~>|\(|\)|<|>|,|;|:|=|\*|\+|@|&|\||\.)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "nat", "string", or the punct/keyword text itself
    text: str
    span: Span


def tokenize(text: str, filename: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise LangError("ParseError", f"unexpected character {text[pos]!r}", Span(filename, line, col))
        lexeme = m.group(0)
        span = Span(filename, line, col, line, col + len(lexeme))
        group = m.lastgroup
        if group == "ident":
            kind = lexeme if lexeme in KEYWORDS else "ident"
            tokens.append(Token(kind, lexeme, span))
        elif group == "nat":
            tokens.append(Token("num", lexeme, span))
        elif group == "string":
            tokens.append(Token("string", lexeme[1:-1], span))
        elif group == "punct":
            tokens.append(Token(lexeme, lexeme, span))
        # ws and comments are dropped
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "", Span(filename, line, col)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], source_names: frozenset[str]):
        self.tokens = tokens
        self.pos = 0
        self.source_names = source_names
        self._fresh = 0

    # -- token plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise LangError(
                "ParseError",
                f"expected {kind!r}, found {tok.text!r}" if tok.kind != "eof" else f"expected {kind!r}, found end of input",
                tok.span,
            )
        return self.next()

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def fresh(self, hint: str) -> str:
        # Fresh binders must survive a print/reparse round trip, so they are
        # ordinary identifiers guaranteed not to occur in the source.
        while True:
            self._fresh += 1
            name = f"_{hint}{self._fresh}"
            if name not in self.source_names:
                return name

    # -- types

    def parse_type(self) -> Type:
        left = self.parse_with_type()
        tok = self.peek()
        if tok.kind in ("->", "-o", "~>"):
            self.next()
            right = self.parse_type()
            if tok.kind == "->":
                return Arrow(self.as_set(left, tok.span), self.as_set(right, tok.span))
            if tok.kind == "-o":
                return Lolli(self.as_pointed(left, tok.span), self.as_pointed(right, tok.span))
            return Fin(self.as_set(left, tok.span), self.as_pointed(right, tok.span))
        return left

    def parse_with_type(self) -> Type:
        left = self.parse_smash_type()
        while self.at("&"):
            tok = self.next()
            right = self.parse_smash_type()
            left = With(self.as_pointed(left, tok.span), self.as_pointed(right, tok.span))
        return left

    def parse_smash_type(self) -> Type:
        left = self.parse_prod_type()
        while self.at("@"):
            tok = self.next()
            right = self.parse_prod_type()
            left = Smash(self.as_pointed(left, tok.span), self.as_pointed(right, tok.span))
        return left

    def parse_prod_type(self) -> Type:
        left = self.parse_atom_type()
        while self.at("*"):
            tok = self.next()
            right = self.parse_atom_type()
            left = Prod(self.as_set(left, tok.span), self.as_set(right, tok.span))
        return left

    def parse_atom_type(self) -> Type:
        tok = self.peek()
        if tok.kind == "num":
            if tok.text != "1":
                raise LangError("ParseError", f"unexpected number {tok.text!r} in type", tok.span)
            self.next()
            return Unit()
        if tok.kind == "unit":
            self.next()
            return Unit()
        if tok.kind == "bool":
            self.next()
            return BOOL
        if tok.kind == "nat":
            self.next()
            return Nat0()
        if tok.kind == "maybe":
            self.next()
            inner = self.parse_atom_type()
            return Maybe(self.as_set(inner, tok.span))
        if tok.kind == "(":
            self.next()
            inner = self.parse_type()
            self.expect(")")
            return inner
        if tok.kind == "ident":
            self.next()
            return Base(tok.text)
        raise LangError("ParseError", f"expected a type, found {tok.text!r}", tok.span)

    @staticmethod
    def as_set(ty: Type, span: Span) -> SetType:
        if is_pointed(ty):
            return Forget(ty)  # type: ignore[arg-type]
        return ty  # type: ignore[return-value]

    @staticmethod
    def as_pointed(ty: Type, span: Span) -> PointedType:
        if not is_pointed(ty):
            raise LangError("SortError", f"pointed type expected, got {type_to_str(ty)}", span)
        return ty  # type: ignore[return-value]

    # -- terms

    def parse_term(self) -> TermNode:
        tok = self.peek()
        if tok.kind == "fn":
            self.next()
            param = self.expect("ident").text
            self.expect("=>")
            body = self.parse_term()
            return Lam(param, body, span=tok.span)
        if tok.kind == "let":
            return self.parse_let()
        return self.parse_or()

    def parse_let(self) -> TermNode:
        tok = self.expect("let")
        nxt = self.peek()
        if nxt.kind == "(":
            self.next()
            x = self._binder()
            self.expect(",")
            y = self._binder()
            self.expect(")")
            self.expect("=")
            subject = self.parse_term()
            self.expect("in")
            body = self.parse_term()
            return LetPair(x, y, subject, body, span=tok.span)
        if nxt.kind == "just":
            self.next()
            x = self._binder()
            self.expect("=")
            subject = self.parse_term()
            self.expect("in")
            body = self.parse_term()
            return LetJust(x, subject, body, span=tok.span)
        # let x = t in u  =>  let (x, y) = (t, true) in (y and u)
        x = self._binder()
        self.expect("=")
        subject = self.parse_term()
        self.expect("in")
        body = self.parse_term()
        return self._sugar_let(x, subject, body, tok.span)

    def _binder(self) -> str:
        tok = self.expect("ident")
        if tok.text == "_":
            return self.fresh("wild")
        return tok.text

    def _sugar_let(self, x: str, subject: TermNode, body: TermNode, span: Span) -> TermNode:
        y = self.fresh("tag")
        pair = Pair(subject, Just(UnitLit(span=span), span=span), span=span)
        return LetPair(x, y, pair, self._sugar_and(Var(y, span=span), body, span), span=span)

    def _sugar_and(self, left: TermNode, right: TermNode, span: Span) -> TermNode:
        return LetJust(self.fresh("and"), left, right, span=span)

    def parse_or(self) -> TermNode:
        left = self.parse_and()
        while self.at("or"):
            tok = self.next()
            right = self.parse_and()
            left = App(Var("or", span=tok.span), WithPair(left, right, span=tok.span), span=tok.span)
        return left

    def parse_and(self) -> TermNode:
        left = self.parse_when()
        while self.at("and"):
            tok = self.next()
            right = self.parse_when()
            left = self._sugar_and(left, right, tok.span)
        return left

    def parse_when(self) -> TermNode:
        left = self.parse_eq()
        while self.at("when"):
            tok = self.next()
            right = self.parse_eq()
            # t when u  =>  let x = t in (u and x)
            x = self.fresh("val")
            left = self._sugar_let(x, left, self._sugar_and(right, Var(x, span=tok.span), tok.span), tok.span)
        return left

    def parse_eq(self) -> TermNode:
        left = self.parse_add()
        if self.at("="):
            tok = self.next()
            right = self.parse_add()
            return Eq(left, right, span=tok.span)
        return left

    def parse_add(self) -> TermNode:
        left = self.parse_mul()
        while self.at("+"):
            tok = self.next()
            right = self.parse_mul()
            left = App(Var("+", span=tok.span), WithPair(left, right, span=tok.span), span=tok.span)
        return left

    def parse_mul(self) -> TermNode:
        left = self.parse_app()
        while self.at("*"):
            tok = self.next()
            right = self.parse_app()
            left = App(Var("*", span=tok.span), Pair(left, right, span=tok.span), span=tok.span)
        return left

    _ATOM_STARTS = ("ident", "num", "nil", "true", "false", "(", "<", "pi1", "pi2", "just", "if")

    def parse_app(self) -> TermNode:
        head = self.parse_atom()
        while self.peek().kind in self._ATOM_STARTS:
            arg = self.parse_atom()
            head = App(head, arg, span=arg.span)
        return head

    def parse_atom(self) -> TermNode:
        tok = self.peek()
        if tok.kind == "ident":
            self.next()
            return Var(tok.text, span=tok.span)
        if tok.kind == "num":
            self.next()
            return NatLit(int(tok.text), span=tok.span)
        if tok.kind == "nil":
            self.next()
            return Nil(span=tok.span)
        if tok.kind == "true":
            self.next()
            return Just(UnitLit(span=tok.span), span=tok.span)
        if tok.kind == "false":
            self.next()
            return Nil(span=tok.span)
        if tok.kind == "pi1" or tok.kind == "pi2":
            self.next()
            subject = self.parse_atom()
            return Proj(1 if tok.kind == "pi1" else 2, subject, span=tok.span)
        if tok.kind == "just":
            self.next()
            arg = self.parse_atom()
            return Just(arg, span=tok.span)
        if tok.kind == "if":
            self.next()
            self.expect("just")
            binder = self._binder()
            self.expect("=")
            scrut = self.parse_term()
            self.expect("then")
            then_branch = self.parse_term()
            self.expect("else")
            else_branch = self.parse_term()
            return IfJust(binder, scrut, then_branch, else_branch, span=tok.span)
        if tok.kind == "(":
            self.next()
            if self.at(")"):
                self.next()
                return UnitLit(span=tok.span)
            first = self.parse_term()
            if self.at(","):
                self.next()
                second = self.parse_term()
                self.expect(")")
                return Pair(first, second, span=tok.span)
            self.expect(")")
            return first
        if tok.kind == "<":
            self.next()
            first = self.parse_term()
            self.expect(",")
            second = self.parse_term()
            self.expect(">")
            return WithPair(first, second, span=tok.span)
        raise LangError("ParseError", f"expected a term, found {tok.text!r}", tok.span)

    # -- declarations

    def parse_program(self) -> Program:
        decls: list = []
        while not self.at("eof"):
            decls.append(self.parse_decl())
        return Program(tuple(decls))

    def parse_decl(self):
        tok = self.peek()
        if tok.kind == "type":
            self.next()
            name = self.expect("ident").text
            atoms: list[str] = []
            if self.at("="):
                self.next()
                atoms.append(self.expect("ident").text)
                while self.at("|"):
                    self.next()
                    atoms.append(self.expect("ident").text)
            self.expect(";")
            return TypeDecl(name, tuple(atoms), span=tok.span)
        if tok.kind == "facts":
            self.next()
            name = self.expect("ident").text
            self.expect(":")
            ty = self.parse_type()
            if not isinstance(ty, Fin):
                raise LangError("SortError", f"facts must declare a finite map type, got {type_to_str(ty)}", tok.span)
            self.expect("from")
            source = self.expect("string").text
            self.expect(";")
            return FactDecl(name, ty, source, span=tok.span)
        if tok.kind == "def":
            self.next()
            name = self.expect("ident").text
            self.expect(":")
            ty = self.parse_type()
            self.expect("=")
            body = self.parse_term()
            self.expect(";")
            return DefDecl(name, ty, body, span=tok.span)
        raise LangError("ParseError", f"expected a declaration, found {tok.text!r}", tok.span)


def _names_in(text: str) -> frozenset[str]:
    return frozenset(m.group(0) for m in re.finditer(r"[A-Za-z_][A-Za-z0-9_']*", text))


def parse_program(text: str, filename: str = "<input>") -> Program:
    """Parse and desugar a whole source file."""
    return _Parser(tokenize(text, filename), _names_in(text)).parse_program()


def parse_term(text: str, filename: str = "<input>") -> TermNode:
    """Parse and desugar a single term (REPL input)."""
    p = _Parser(tokenize(text, filename), _names_in(text))
    term = p.parse_term()
    p.expect("eof")
    return term


def parse_type(text: str, filename: str = "<input>") -> Type:
    p = _Parser(tokenize(text, filename), _names_in(text))
    ty = p.parse_type()
    p.expect("eof")
    return ty


# ---------------------------------------------------------------------------
# Printing (core grammar only; parse(print_term(t)) == t)

_PREC_TERM = 0
_PREC_OR = 1
_PREC_EQ = 3
_PREC_ADD = 4
_PREC_MUL = 5
_PREC_APP = 6
_PREC_ATOM = 7


def print_term(node: TermNode) -> str:
    def wrap(s: str, outer: int, inner: int) -> str:
        return f"({s})" if inner < outer else s

    def go(n: TermNode, prec: int) -> str:
        if isinstance(n, Var):
            return n.name
        if isinstance(n, NatLit):
            return str(n.value)
        if isinstance(n, UnitLit):
            return "()"
        if isinstance(n, Nil):
            return "nil"
        if isinstance(n, Lam):
            return wrap(f"fn {n.param} => {go(n.body, _PREC_TERM)}", prec, _PREC_TERM)
        if isinstance(n, LetPair):
            s = f"let ({n.left}, {n.right}) = {go(n.subject, _PREC_TERM)} in {go(n.body, _PREC_TERM)}"
            return wrap(s, prec, _PREC_TERM)
        if isinstance(n, LetJust):
            s = f"let just {n.binder} = {go(n.subject, _PREC_TERM)} in {go(n.body, _PREC_TERM)}"
            return wrap(s, prec, _PREC_TERM)
        if isinstance(n, IfJust):
            s = (
                f"if just {n.binder} = {go(n.scrutinee, _PREC_TERM)} "
                f"then {go(n.then_branch, _PREC_TERM)} else {go(n.else_branch, _PREC_TERM)}"
            )
            return wrap(s, prec, _PREC_ATOM)
        if isinstance(n, App):
            if isinstance(n.fn, Var) and n.fn.name == "or" and isinstance(n.arg, WithPair):
                s = f"{go(n.arg.left, _PREC_OR + 1)} or {go(n.arg.right, _PREC_OR + 1)}"
                return wrap(s, prec, _PREC_OR)
            if isinstance(n.fn, Var) and n.fn.name == "+" and isinstance(n.arg, WithPair):
                s = f"{go(n.arg.left, _PREC_ADD)} + {go(n.arg.right, _PREC_ADD + 1)}"
                return wrap(s, prec, _PREC_ADD)
            if isinstance(n.fn, Var) and n.fn.name == "*" and isinstance(n.arg, Pair):
                s = f"{go(n.arg.left, _PREC_MUL)} * {go(n.arg.right, _PREC_MUL + 1)}"
                return wrap(s, prec, _PREC_MUL)
            s = f"{go(n.fn, _PREC_APP)} {go(n.arg, _PREC_ATOM)}"
            return wrap(s, prec, _PREC_APP)
        if isinstance(n, Eq):
            s = f"{go(n.left, _PREC_EQ + 1)} = {go(n.right, _PREC_EQ + 1)}"
            return wrap(s, prec, _PREC_EQ)
        if isinstance(n, Pair):
            return f"({go(n.left, _PREC_TERM)}, {go(n.right, _PREC_TERM)})"
        if isinstance(n, WithPair):
            return f"<{go(n.left, _PREC_TERM)}, {go(n.right, _PREC_TERM)}>"
        if isinstance(n, Proj):
            return wrap(f"pi{n.index} {go(n.subject, _PREC_ATOM)}", prec, _PREC_APP)
        if isinstance(n, Just):
            return wrap(f"just {go(n.arg, _PREC_ATOM)}", prec, _PREC_APP)
        raise TypeError(f"not a term node: {n!r}")

    return go(node, _PREC_TERM)
