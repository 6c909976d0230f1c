"""Syntax trees for fslang: types, terms, and top-level programs.

The type grammar is two-sorted.  Set types classify ordinary data (things
with decidable structure but no distinguished element): declared base
types, the unit type, products, functions, and ``Forget(P)`` which views a
pointed type as plain data.  Pointed types classify values with a
distinguished nil element: direct products (&), smash products (@),
nil-preserving functions (-o), finite maps (~>), option types, and the
naturals with nil = 0.

Term syntax is deliberately a single sort.  The concrete grammar cannot
tell a set-level pair from a smash pair, or which of the three function
spaces a lambda introduces; the checker resolves every node against its
expected type and records the resolution in a derivation.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    """1-based source range; column points at the first character."""

    file: str
    line: int
    col: int
    end_line: int = 0
    end_col: int = 0

    def show(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


NO_SPAN = Span("<none>", 0, 0)


class LangError(Exception):
    """Any rejection with a kind tag, used for diagnostics and exit codes.

    Kinds: ParseError, SortError, KeyNotEqType, TypeMismatch,
    RelevanceError, GroundingError, CircularGrounding, UnknownVar,
    NotEqType, AmbiguousType, SchemaError, UnprintableValue.
    """

    def __init__(self, kind: str, message: str, span: Span = NO_SPAN, rule: str = ""):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.span = span
        self.rule = rule

    def show(self) -> str:
        where = self.span.show() if self.span is not NO_SPAN else "<input>"
        rule = f" [{self.rule}]" if self.rule else ""
        return f"{where}: {self.kind}{rule}: {self.message}"


# ---------------------------------------------------------------------------
# Types


class Type:
    __slots__ = ()


class SetType(Type):
    __slots__ = ()


class PointedType(Type):
    __slots__ = ()


@dataclass(frozen=True)
class Base(SetType):
    name: str


@dataclass(frozen=True)
class Unit(SetType):
    pass


@dataclass(frozen=True)
class Prod(SetType):
    left: SetType
    right: SetType


@dataclass(frozen=True)
class Arrow(SetType):
    dom: SetType
    cod: SetType


@dataclass(frozen=True)
class Forget(SetType):
    """A pointed type seen as plain data (the underlying set)."""

    inner: PointedType


@dataclass(frozen=True)
class With(PointedType):
    """Direct product: nil only when both components are nil."""

    left: PointedType
    right: PointedType


@dataclass(frozen=True)
class Smash(PointedType):
    """Smash product: collapses to nil when either component is nil."""

    left: PointedType
    right: PointedType


@dataclass(frozen=True)
class Lolli(PointedType):
    """Nil-preserving function space."""

    dom: PointedType
    cod: PointedType


@dataclass(frozen=True)
class Fin(PointedType):
    """Finite maps: functions with finite support, stored as tables."""

    key: SetType
    value: PointedType


@dataclass(frozen=True)
class Maybe(PointedType):
    arg: SetType


@dataclass(frozen=True)
class Nat0(PointedType):
    pass


#: bool is sugar for maybe 1 throughout the surface language.
BOOL = Maybe(Unit())


def is_pointed(ty: Type) -> bool:
    """True iff ty is in the pointed sort.  Forget(P) is a set type."""
    return isinstance(ty, PointedType)


def is_eqtype(ty: SetType) -> bool:
    """Types admitting runtime equality and a canonical key encoding.

    Function types never are.  Forget(P) qualifies when P is first order,
    so stored tables and option data can themselves serve as keys.
    """
    if isinstance(ty, (Base, Unit)):
        return True
    if isinstance(ty, Prod):
        return is_eqtype(ty.left) and is_eqtype(ty.right)
    if isinstance(ty, Arrow):
        return False
    if isinstance(ty, Forget):
        return is_first_order(ty.inner)
    return False


def is_first_order(ty: PointedType) -> bool:
    """No function space anywhere inside: structural equality is total."""
    if isinstance(ty, (Nat0,)):
        return True
    if isinstance(ty, (With, Smash)):
        return is_first_order(ty.left) and is_first_order(ty.right)
    if isinstance(ty, Lolli):
        return False
    if isinstance(ty, Fin):
        return is_eqtype(ty.key) and is_first_order(ty.value)
    if isinstance(ty, Maybe):
        return is_eqtype(ty.arg)
    return False


def well_formed(ty: Type, span: Span = NO_SPAN) -> None:
    """Reject types that violate the sort grammar or use a non-eqtype key."""
    if isinstance(ty, Base):
        return
    if isinstance(ty, Unit) or isinstance(ty, Nat0):
        return
    if isinstance(ty, (Prod, Arrow)):
        a, b = (ty.left, ty.right) if isinstance(ty, Prod) else (ty.dom, ty.cod)
        for part in (a, b):
            if is_pointed(part):
                raise LangError("SortError", f"set type expected, got {type_to_str(part)}", span)
            well_formed(part, span)
        return
    if isinstance(ty, Forget):
        if not is_pointed(ty.inner):
            raise LangError("SortError", f"pointed type expected under forget, got {type_to_str(ty.inner)}", span)
        well_formed(ty.inner, span)
        return
    if isinstance(ty, (With, Smash, Lolli)):
        a, b = (ty.dom, ty.cod) if isinstance(ty, Lolli) else (ty.left, ty.right)
        for part in (a, b):
            if not is_pointed(part):
                raise LangError("SortError", f"pointed type expected, got {type_to_str(part)}", span)
            well_formed(part, span)
        return
    if isinstance(ty, Fin):
        if is_pointed(ty.key):
            raise LangError("SortError", f"set type expected as map key, got {type_to_str(ty.key)}", span)
        if not is_pointed(ty.value):
            raise LangError("SortError", f"pointed type expected as map value, got {type_to_str(ty.value)}", span)
        well_formed(ty.key, span)
        well_formed(ty.value, span)
        if not is_eqtype(ty.key):
            raise LangError("KeyNotEqType", f"map key type {type_to_str(ty.key)} does not support equality", span)
        return
    if isinstance(ty, Maybe):
        if is_pointed(ty.arg):
            raise LangError("SortError", f"set type expected under maybe, got {type_to_str(ty.arg)}", span)
        well_formed(ty.arg, span)
        return
    raise LangError("SortError", f"unknown type {ty!r}", span)


def type_to_str(ty: Type) -> str:
    """Surface syntax for a type.  Forget is invisible, as in source."""

    def go(t: Type, prec: int) -> str:
        # prec levels: 0 arrows, 1 with, 2 smash, 3 prod, 4 atoms
        if isinstance(t, Forget):
            return go(t.inner, prec)
        if isinstance(t, Base):
            return t.name
        if isinstance(t, Unit):
            return "1"
        if isinstance(t, Nat0):
            return "nat"
        if t == BOOL:
            return "bool"
        if isinstance(t, Maybe):
            return f"maybe {go(t.arg, 4)}"
        if isinstance(t, Arrow):
            s = f"{go(t.dom, 1)} -> {go(t.cod, 0)}"
            return f"({s})" if prec > 0 else s
        if isinstance(t, Lolli):
            s = f"{go(t.dom, 1)} -o {go(t.cod, 0)}"
            return f"({s})" if prec > 0 else s
        if isinstance(t, Fin):
            s = f"{go(t.key, 1)} ~> {go(t.value, 0)}"
            return f"({s})" if prec > 0 else s
        if isinstance(t, With):
            s = f"{go(t.left, 2)} & {go(t.right, 2)}"
            return f"({s})" if prec > 1 else s
        if isinstance(t, Smash):
            s = f"{go(t.left, 3)} @ {go(t.right, 3)}"
            return f"({s})" if prec > 2 else s
        if isinstance(t, Prod):
            s = f"{go(t.left, 4)} * {go(t.right, 4)}"
            return f"({s})" if prec > 3 else s
        return repr(t)

    return go(ty, 0)


# ---------------------------------------------------------------------------
# Terms (single surface sort; the checker assigns sorts and rules)


class TermNode:
    __slots__ = ()


def _span_field() -> Span:
    return field(default=NO_SPAN, compare=False, repr=False)  # type: ignore[return-value]


@dataclass(frozen=True)
class Var(TermNode):
    name: str
    span: Span = _span_field()


@dataclass(frozen=True)
class NatLit(TermNode):
    value: int
    span: Span = _span_field()


@dataclass(frozen=True)
class UnitLit(TermNode):
    span: Span = _span_field()


@dataclass(frozen=True)
class Nil(TermNode):
    span: Span = _span_field()


@dataclass(frozen=True)
class Lam(TermNode):
    param: str
    body: TermNode
    span: Span = _span_field()


@dataclass(frozen=True)
class App(TermNode):
    fn: TermNode
    arg: TermNode
    span: Span = _span_field()


@dataclass(frozen=True)
class Pair(TermNode):
    """Parenthesis pair: a set pair or a smash pair, by expected type."""

    left: TermNode
    right: TermNode
    span: Span = _span_field()


@dataclass(frozen=True)
class WithPair(TermNode):
    left: TermNode
    right: TermNode
    span: Span = _span_field()


@dataclass(frozen=True)
class Proj(TermNode):
    """pi1/pi2; eliminates a set pair or a direct pair, by subject type."""

    index: int
    subject: TermNode
    span: Span = _span_field()


@dataclass(frozen=True)
class LetPair(TermNode):
    """let (x, y) = subject in body; destructures a smash pair."""

    left: str
    right: str
    subject: TermNode
    body: TermNode
    span: Span = _span_field()


@dataclass(frozen=True)
class Just(TermNode):
    arg: TermNode
    span: Span = _span_field()


@dataclass(frozen=True)
class LetJust(TermNode):
    binder: str
    subject: TermNode
    body: TermNode
    span: Span = _span_field()


@dataclass(frozen=True)
class IfJust(TermNode):
    """if just x = scrutinee then then_branch else else_branch."""

    binder: str
    scrutinee: TermNode
    then_branch: TermNode
    else_branch: TermNode
    span: Span = _span_field()


@dataclass(frozen=True)
class Eq(TermNode):
    """l = r; the checker picks which side grounds the other."""

    left: TermNode
    right: TermNode
    span: Span = _span_field()


def free_vars(node: TermNode) -> frozenset[str]:
    if isinstance(node, Var):
        return frozenset((node.name,))
    if isinstance(node, (NatLit, UnitLit, Nil)):
        return frozenset()
    if isinstance(node, Lam):
        return free_vars(node.body) - {node.param}
    if isinstance(node, App):
        return free_vars(node.fn) | free_vars(node.arg)
    if isinstance(node, (Pair, WithPair, Eq)):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, Proj):
        return free_vars(node.subject)
    if isinstance(node, LetPair):
        return free_vars(node.subject) | (free_vars(node.body) - {node.left, node.right})
    if isinstance(node, Just):
        return free_vars(node.arg)
    if isinstance(node, LetJust):
        return free_vars(node.subject) | (free_vars(node.body) - {node.binder})
    if isinstance(node, IfJust):
        return (
            free_vars(node.scrutinee)
            | (free_vars(node.then_branch) - {node.binder})
            | free_vars(node.else_branch)
        )
    raise TypeError(f"not a term node: {node!r}")


# ---------------------------------------------------------------------------
# Programs


@dataclass(frozen=True)
class TypeDecl:
    """``type t;`` or ``type t = a | b;`` declaring a base type.

    Listed atoms become usable as literals in programs; fact files may
    introduce further atoms of the same type at load time.
    """

    name: str
    atoms: tuple[str, ...] = ()
    span: Span = _span_field()


@dataclass(frozen=True)
class FactDecl:
    """``facts r : T from "file";`` an externally loaded finite map."""

    name: str
    ty: PointedType
    source: str
    span: Span = _span_field()


@dataclass(frozen=True)
class DefDecl:
    """``def x : T = t;`` every definition carries its full type."""

    name: str
    ty: Type
    body: TermNode
    span: Span = _span_field()


Decl = TypeDecl | FactDecl | DefDecl


@dataclass(frozen=True)
class Program:
    decls: tuple[Decl, ...]

    def defs(self) -> list[DefDecl]:
        return [d for d in self.decls if isinstance(d, DefDecl)]

    def facts(self) -> list[FactDecl]:
        return [d for d in self.decls if isinstance(d, FactDecl)]

    def type_decls(self) -> list[TypeDecl]:
        return [d for d in self.decls if isinstance(d, TypeDecl)]
