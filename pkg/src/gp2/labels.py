"""Rule-schema label expressions and conditions, and their evaluation.

Expressions are evaluated relative to a premorphism (for degree lookups),
an assignment of values to typed variables, and a host graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .graphs import Atom, HostGraph, HostLabel, Premorphism


class EvalError(Exception):
    """Raised when expression evaluation is undefined (division by zero)."""


class VType(Enum):
    INT = "int"
    STRING = "string"
    ATOM = "atom"
    LIST = "list"


# subtype order: int, string < atom < list
_SUBTYPE = {
    VType.INT: {VType.INT, VType.ATOM, VType.LIST},
    VType.STRING: {VType.STRING, VType.ATOM, VType.LIST},
    VType.ATOM: {VType.ATOM, VType.LIST},
    VType.LIST: {VType.LIST},
}


def is_subtype(t: VType, of: VType) -> bool:
    return of in _SUBTYPE[t]


# -- expression AST ----------------------------------------------------


@dataclass(frozen=True)
class Empty:
    def __str__(self) -> str:
        return "empty"


@dataclass(frozen=True)
class IntLit:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class StrLit:
    value: str

    def __str__(self) -> str:
        escaped = self.value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'


@dataclass(frozen=True)
class Var:
    name: str
    vtype: VType

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Neg:
    expr: "ListExpr"

    def __str__(self) -> str:
        return f"(-{self.expr})"


@dataclass(frozen=True)
class Arith:
    op: str  # one of + - * /
    left: "ListExpr"
    right: "ListExpr"

    def __str__(self) -> str:
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Deg:
    direction: str  # "in" or "out"
    node: str

    def __str__(self) -> str:
        kw = "indeg" if self.direction == "in" else "outdeg"
        return f"{kw}({self.node})"


@dataclass(frozen=True)
class Dot:
    left: "ListExpr"
    right: "ListExpr"

    def __str__(self) -> str:
        return f"{self.left}.{self.right}"


@dataclass(frozen=True)
class Cons:
    left: "ListExpr"
    right: "ListExpr"

    def __str__(self) -> str:
        return f"{self.left}:{self.right}"


ListExpr = Union[Empty, IntLit, StrLit, Var, Neg, Arith, Deg, Dot, Cons]


@dataclass(frozen=True)
class RuleLabel:
    expr: ListExpr
    marked: bool = False

    def __str__(self) -> str:
        return f"{self.expr} #" if self.marked else str(self.expr)


# -- condition AST -----------------------------------------------------


@dataclass(frozen=True)
class TypeCheck:
    tname: str  # int | string | atom
    expr: ListExpr

    def __str__(self) -> str:
        return f"{self.tname}({self.expr})"


@dataclass(frozen=True)
class Eq:
    left: ListExpr
    right: ListExpr
    negated: bool = False

    def __str__(self) -> str:
        op = "!=" if self.negated else "="
        return f"{self.left} {op} {self.right}"


@dataclass(frozen=True)
class Rel:
    op: str  # > >= < <=
    left: ListExpr
    right: ListExpr

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


@dataclass(frozen=True)
class EdgePred:
    source: str
    target: str
    label: Optional[ListExpr] = None

    def __str__(self) -> str:
        if self.label is None:
            return f"edge({self.source}, {self.target})"
        return f"edge({self.source}, {self.target}, {self.label})"


@dataclass(frozen=True)
class Not:
    cond: "Condition"

    def __str__(self) -> str:
        return f"not ({self.cond})"


@dataclass(frozen=True)
class And:
    left: "Condition"
    right: "Condition"

    def __str__(self) -> str:
        return f"({self.left} and {self.right})"


@dataclass(frozen=True)
class Or:
    left: "Condition"
    right: "Condition"

    def __str__(self) -> str:
        return f"({self.left} or {self.right})"


Condition = Union[TypeCheck, Eq, Rel, EdgePred, Not, And, Or]


# -- typing ------------------------------------------------------------


class LabelTypeError(Exception):
    pass


def infer_type(e: ListExpr, decls: dict[str, VType]) -> VType:
    """Static type of an expression under the given variable declarations."""
    if isinstance(e, Empty):
        return VType.LIST
    if isinstance(e, IntLit):
        return VType.INT
    if isinstance(e, StrLit):
        return VType.STRING
    if isinstance(e, Var):
        declared = decls.get(e.name)
        if declared is None:
            raise LabelTypeError(f"undeclared variable {e.name!r}")
        if declared is not e.vtype:
            raise LabelTypeError(
                f"variable {e.name!r} used as {e.vtype.value}, declared {declared.value}"
            )
        return declared
    if isinstance(e, Neg):
        inner = infer_type(e.expr, decls)
        if inner is not VType.INT:
            raise LabelTypeError(f"unary minus needs an integer, got {inner.value}")
        return VType.INT
    if isinstance(e, Arith):
        for side in (e.left, e.right):
            if infer_type(side, decls) is not VType.INT:
                raise LabelTypeError(f"arithmetic needs integers in {e}")
        return VType.INT
    if isinstance(e, Deg):
        return VType.INT
    if isinstance(e, Dot):
        for side in (e.left, e.right):
            if infer_type(side, decls) is not VType.STRING:
                raise LabelTypeError(f"'.' needs strings in {e}")
        return VType.STRING
    if isinstance(e, Cons):
        infer_type(e.left, decls)
        infer_type(e.right, decls)
        return VType.LIST
    raise LabelTypeError(f"unknown expression {e!r}")


def variables(e) -> set[str]:
    """Names of all variables occurring in an expression or condition."""
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, (Empty, IntLit, StrLit, Deg)):
        return set()
    if isinstance(e, Neg):
        return variables(e.expr)
    if isinstance(e, (Arith, Dot, Cons, Eq, Rel, And, Or)):
        return variables(e.left) | variables(e.right)
    if isinstance(e, TypeCheck):
        return variables(e.expr)
    if isinstance(e, EdgePred):
        return variables(e.label) if e.label is not None else set()
    if isinstance(e, Not):
        return variables(e.cond)
    raise TypeError(f"not an expression or condition: {e!r}")


def degree_nodes(e) -> set[str]:
    """Node identifiers referenced by indeg/outdeg subterms."""
    if isinstance(e, Deg):
        return {e.node}
    if isinstance(e, (Empty, IntLit, StrLit, Var)):
        return set()
    if isinstance(e, Neg):
        return degree_nodes(e.expr)
    if isinstance(e, (Arith, Dot, Cons, Eq, Rel, And, Or)):
        return degree_nodes(e.left) | degree_nodes(e.right)
    if isinstance(e, TypeCheck):
        return degree_nodes(e.expr)
    if isinstance(e, EdgePred):
        return degree_nodes(e.label) if e.label is not None else set()
    if isinstance(e, Not):
        return degree_nodes(e.cond)
    raise TypeError(f"not an expression or condition: {e!r}")


# -- evaluation --------------------------------------------------------

Assignment = dict[str, object]  # var name -> int | str | tuple of atoms


def eval_int(
    e: ListExpr, g: Premorphism, alpha: Assignment, host: HostGraph
) -> int:
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, Var):
        value = alpha[e.name]
        if not isinstance(value, int) or isinstance(value, bool):
            raise EvalError(f"variable {e.name!r} is not an integer")
        return value
    if isinstance(e, Neg):
        return -eval_int(e.expr, g, alpha, host)
    if isinstance(e, Arith):
        left = eval_int(e.left, g, alpha, host)
        right = eval_int(e.right, g, alpha, host)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if e.op == "/":
            if right == 0:
                raise EvalError("division by zero")
            # truncation towards zero; works for arbitrary precision
            q = abs(left) // abs(right)
            return -q if (left < 0) != (right < 0) else q
        raise ValueError(f"unknown operator {e.op!r}")
    if isinstance(e, Deg):
        return host.degree(g.node_map[e.node], e.direction)
    raise EvalError(f"not an integer expression: {e}")


def eval_string(
    e: ListExpr, g: Premorphism, alpha: Assignment, host: HostGraph
) -> str:
    if isinstance(e, StrLit):
        return e.value
    if isinstance(e, Var):
        value = alpha[e.name]
        if not isinstance(value, str):
            raise EvalError(f"variable {e.name!r} is not a string")
        return value
    if isinstance(e, Dot):
        return eval_string(e.left, g, alpha, host) + eval_string(
            e.right, g, alpha, host
        )
    raise EvalError(f"not a string expression: {e}")


def eval_list(
    e: ListExpr, g: Premorphism, alpha: Assignment, host: HostGraph
) -> tuple[Atom, ...]:
    """The sequence of atoms denoted by e under (g, alpha, host)."""
    if isinstance(e, Empty):
        return ()
    if isinstance(e, (IntLit, Neg, Arith, Deg)):
        return (eval_int(e, g, alpha, host),)
    if isinstance(e, (StrLit, Dot)):
        return (eval_string(e, g, alpha, host),)
    if isinstance(e, Var):
        value = alpha[e.name]
        if isinstance(value, tuple):
            return value
        return (value,)  # type: ignore[return-value]
    if isinstance(e, Cons):
        return eval_list(e.left, g, alpha, host) + eval_list(e.right, g, alpha, host)
    raise EvalError(f"unknown expression {e!r}")


def eval_condition(
    c: Condition, g: Premorphism, alpha: Assignment, host: HostGraph
) -> bool:
    if isinstance(c, TypeCheck):
        value = eval_list(c.expr, g, alpha, host)
        if c.tname == "int":
            return len(value) == 1 and isinstance(value[0], int)
        if c.tname == "string":
            return len(value) == 1 and isinstance(value[0], str)
        if c.tname == "atom":
            return len(value) == 1
        raise ValueError(f"unknown type predicate {c.tname!r}")
    if isinstance(c, Eq):
        left = eval_list(c.left, g, alpha, host)
        right = eval_list(c.right, g, alpha, host)
        return (left != right) if c.negated else (left == right)
    if isinstance(c, Rel):
        left = eval_int(c.left, g, alpha, host)
        right = eval_int(c.right, g, alpha, host)
        return {
            ">": left > right,
            ">=": left >= right,
            "<": left < right,
            "<=": left <= right,
        }[c.op]
    if isinstance(c, EdgePred):
        src = g.node_map[c.source]
        tgt = g.node_map[c.target]
        wanted = (
            None if c.label is None else eval_list(c.label, g, alpha, host)
        )
        for eid in host.edges_between(src, tgt):
            if wanted is None or host.edges[eid].label.items == wanted:
                return True
        return False
    if isinstance(c, Not):
        return not eval_condition(c.cond, g, alpha, host)
    # and/or evaluate both operands so evaluation errors always surface
    if isinstance(c, And):
        left = eval_condition(c.left, g, alpha, host)
        right = eval_condition(c.right, g, alpha, host)
        return left and right
    if isinstance(c, Or):
        left = eval_condition(c.left, g, alpha, host)
        right = eval_condition(c.right, g, alpha, host)
        return left or right
    raise TypeError(f"not a condition: {c!r}")


# -- simplicity --------------------------------------------------------


def _has_arith(e: ListExpr) -> bool:
    if isinstance(e, Arith):
        return True
    if isinstance(e, Neg):
        return _has_arith(e.expr)
    if isinstance(e, (Dot, Cons)):
        return _has_arith(e.left) or _has_arith(e.right)
    return False


def _count_list_vars(e: ListExpr) -> int:
    if isinstance(e, Var):
        return 1 if e.vtype is VType.LIST else 0
    if isinstance(e, Neg):
        return _count_list_vars(e.expr)
    if isinstance(e, (Dot, Cons, Arith)):
        return _count_list_vars(e.left) + _count_list_vars(e.right)
    return 0


def _count_string_vars(e: ListExpr) -> int:
    if isinstance(e, Var):
        return 1 if e.vtype is VType.STRING else 0
    if isinstance(e, Dot):
        return _count_string_vars(e.left) + _count_string_vars(e.right)
    return 0


def _max_string_vars_per_string_expr(e: ListExpr) -> int:
    """Largest string-variable count over maximal string subexpressions."""
    if isinstance(e, (Dot, StrLit)) or (
        isinstance(e, Var) and e.vtype is VType.STRING
    ):
        return _count_string_vars(e)
    if isinstance(e, Cons):
        return max(
            _max_string_vars_per_string_expr(e.left),
            _max_string_vars_per_string_expr(e.right),
        )
    if isinstance(e, Neg):
        return _max_string_vars_per_string_expr(e.expr)
    return 0


def is_simple(e: ListExpr) -> bool:
    """Whether e may appear as a left-hand label: matching determines its
    variables unambiguously."""
    if _has_arith(e):
        return False
    if _count_list_vars(e) > 1:
        return False
    return _max_string_vars_per_string_expr(e) <= 1
