"""Conditional rule schemata: validation, matching, and application.

Matching enumerates injective premorphisms from the left graph into the
host graph, infers the unique assignment that makes each one
label-preserving, filters by the rule condition and the dangling
condition, and applies the instantiated rule in place of the abstract
one.  Rewriting never mutates the input graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .graphs import (
    Atom,
    Edge,
    HostGraph,
    HostLabel,
    IsoStore,
    Premorphism,
)
from .labels import (
    Arith,
    Assignment,
    Condition,
    Cons,
    Deg,
    Dot,
    Empty,
    EvalError,
    IntLit,
    LabelTypeError,
    Neg,
    RuleLabel,
    StrLit,
    Var,
    VType,
    degree_nodes,
    eval_condition,
    eval_list,
    infer_type,
    is_simple,
    is_subtype,
    variables,
)


@dataclass(frozen=True)
class RuleEdge:
    source: str
    target: str
    label: RuleLabel


class RuleGraph:
    """A graph labelled with expressions, used for rule sides."""

    def __init__(self) -> None:
        self.nodes: dict[str, RuleLabel] = {}
        self.edges: dict[str, RuleEdge] = {}

    def add_node(self, node_id: str, label: RuleLabel) -> None:
        self.nodes[node_id] = label

    def add_edge(self, edge_id: str, source: str, target: str, label: RuleLabel) -> None:
        self.edges[edge_id] = RuleEdge(source, target, label)


@dataclass
class ConditionalRuleSchema:
    name: str
    variables: dict[str, VType]
    left: RuleGraph
    interface: frozenset[str]
    right: RuleGraph
    condition: Optional[Condition] = None


@dataclass(frozen=True)
class Violation:
    rule: str
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.location}: {self.message}"


def validate(schema: ConditionalRuleSchema) -> list[Violation]:
    """Check a schema against the well-formedness rules; empty list means ok."""
    out: list[Violation] = []

    def bad(location: str, message: str) -> None:
        out.append(Violation(schema.name, location, message))

    for nid in schema.interface:
        if nid not in schema.left.nodes:
            bad(f"interface node {nid}", "not present in left graph")
        if nid not in schema.right.nodes:
            bad(f"interface node {nid}", "not present in right graph")

    left_vars: set[str] = set()
    for nid, label in schema.left.nodes.items():
        left_vars |= variables(label.expr)
    for eid, edge in schema.left.edges.items():
        left_vars |= variables(edge.label.expr)

    def check_expr(location: str, label: RuleLabel, left_side: bool) -> None:
        try:
            infer_type(label.expr, schema.variables)
        except LabelTypeError as exc:
            bad(location, str(exc))
            return
        if left_side and not is_simple(label.expr):
            bad(location, f"left-hand expression {label.expr} is not simple")
        for node in degree_nodes(label.expr):
            if node not in schema.left.nodes:
                bad(location, f"degree operand {node!r} is not a left-graph node")

    for nid, label in schema.left.nodes.items():
        check_expr(f"left node {nid}", label, True)
    for eid, edge in schema.left.edges.items():
        check_expr(f"left edge {eid}", edge.label, True)
        for endpoint in (edge.source, edge.target):
            if endpoint not in schema.left.nodes:
                bad(f"left edge {eid}", f"unknown endpoint {endpoint!r}")
    for nid, label in schema.right.nodes.items():
        check_expr(f"right node {nid}", label, False)
        extra = variables(label.expr) - left_vars
        if extra:
            bad(f"right node {nid}", f"variables {sorted(extra)} do not occur on the left")
    for eid, edge in schema.right.edges.items():
        check_expr(f"right edge {eid}", edge.label, False)
        extra = variables(edge.label.expr) - left_vars
        if extra:
            bad(f"right edge {eid}", f"variables {sorted(extra)} do not occur on the left")
        for endpoint in (edge.source, edge.target):
            if endpoint not in schema.right.nodes:
                bad(f"right edge {eid}", f"unknown endpoint {endpoint!r}")

    if schema.condition is not None:
        extra = variables(schema.condition) - left_vars
        if extra:
            bad("condition", f"variables {sorted(extra)} do not occur on the left")
        for node in _condition_nodes(schema.condition):
            if node not in schema.left.nodes:
                bad("condition", f"node {node!r} is not a left-graph node")
        try:
            _check_condition_types(schema.condition, schema.variables)
        except LabelTypeError as exc:
            bad("condition", str(exc))

    return out


def _condition_nodes(c: Condition) -> set[str]:
    from .labels import And, EdgePred, Not, Or

    if isinstance(c, EdgePred):
        nodes = {c.source, c.target}
        if c.label is not None:
            nodes |= degree_nodes(c.label)
        return nodes
    if isinstance(c, Not):
        return _condition_nodes(c.cond)
    if isinstance(c, (And, Or)):
        return _condition_nodes(c.left) | _condition_nodes(c.right)
    return degree_nodes(c)


def _check_condition_types(c: Condition, decls: dict[str, VType]) -> None:
    from .labels import And, Eq, EdgePred, Not, Or, Rel, TypeCheck

    if isinstance(c, TypeCheck):
        infer_type(c.expr, decls)
    elif isinstance(c, Eq):
        infer_type(c.left, decls)
        infer_type(c.right, decls)
    elif isinstance(c, Rel):
        for side in (c.left, c.right):
            if infer_type(side, decls) is not VType.INT:
                raise LabelTypeError(f"relational operands must be integers in {c}")
    elif isinstance(c, EdgePred):
        if c.label is not None:
            infer_type(c.label, decls)
    elif isinstance(c, Not):
        _check_condition_types(c.cond, decls)
    elif isinstance(c, (And, Or)):
        _check_condition_types(c.left, decls)
        _check_condition_types(c.right, decls)


# -- assignment inference ---------------------------------------------


def _flatten(e) -> list:
    if isinstance(e, Cons):
        return _flatten(e.left) + _flatten(e.right)
    if isinstance(e, Empty):
        return []
    return [e]


def _flatten_dot(e) -> list:
    if isinstance(e, Dot):
        return _flatten_dot(e.left) + _flatten_dot(e.right)
    return [e]


def _is_ground(e) -> bool:
    return not variables(e)


def _bind(bindings: Assignment, name: str, value) -> bool:
    if name in bindings:
        return bindings[name] == value
    bindings[name] = value
    return True


def _unify_string(e, text: str, bindings: Assignment) -> bool:
    """Match a string expression (at most one string variable) against text."""
    pieces = _flatten_dot(e)
    var_positions = [
        i for i, p in enumerate(pieces) if isinstance(p, Var) and p.vtype is VType.STRING
    ]
    literal = []
    for p in pieces:
        if isinstance(p, StrLit):
            literal.append(p.value)
        elif isinstance(p, Var) and p.vtype is VType.STRING:
            literal.append(None)
        else:
            return False
    if len(var_positions) == 0:
        return "".join(literal) == text  # type: ignore[arg-type]
    if len(var_positions) > 1:
        return False
    i = var_positions[0]
    prefix = "".join(literal[:i])  # type: ignore[arg-type]
    suffix = "".join(literal[i + 1 :])  # type: ignore[arg-type]
    if len(prefix) + len(suffix) > len(text):
        return False
    if not text.startswith(prefix):
        return False
    if suffix and not text.endswith(suffix):
        return False
    middle = text[len(prefix) : len(text) - len(suffix)]
    return _bind(bindings, pieces[i].name, middle)


def _unify_item(
    item, atom: Atom, bindings: Assignment, g: Premorphism, host: HostGraph
) -> bool:
    # negation chains over an integer variable are invertible
    negations = 0
    core = item
    while isinstance(core, Neg) and not _is_ground(core):
        negations += 1
        core = core.expr
    if negations and isinstance(core, Var) and core.vtype is VType.INT:
        if not isinstance(atom, int):
            return False
        return _bind(bindings, core.name, atom if negations % 2 == 0 else -atom)
    if _is_ground(item):
        try:
            value = eval_list(item, g, {}, host)
        except EvalError:
            return False
        return value == (atom,)
    if isinstance(item, Var):
        if item.vtype is VType.INT:
            return isinstance(atom, int) and _bind(bindings, item.name, atom)
        if item.vtype is VType.STRING:
            return isinstance(atom, str) and _bind(bindings, item.name, atom)
        if item.vtype is VType.ATOM:
            return _bind(bindings, item.name, atom)
        return False  # a bare list variable is handled positionally
    if isinstance(item, (Dot, StrLit)):
        return isinstance(atom, str) and _unify_string(item, atom, bindings)
    return False


def _unify_list(
    expr,
    items: tuple[Atom, ...],
    bindings: Assignment,
    g: Premorphism,
    host: HostGraph,
) -> bool:
    parts = _flatten(expr)
    list_positions = [
        i for i, p in enumerate(parts) if isinstance(p, Var) and p.vtype is VType.LIST
    ]
    if len(list_positions) > 1:
        return False
    if not list_positions:
        if len(parts) != len(items):
            return False
        return all(
            _unify_item(p, a, bindings, g, host) for p, a in zip(parts, items)
        )
    i = list_positions[0]
    head, tail = parts[:i], parts[i + 1 :]
    if len(head) + len(tail) > len(items):
        return False
    for p, a in zip(head, items[: len(head)]):
        if not _unify_item(p, a, bindings, g, host):
            return False
    for p, a in zip(tail, items[len(items) - len(tail) :]):
        if not _unify_item(p, a, bindings, g, host):
            return False
    middle = items[len(head) : len(items) - len(tail)]
    return _bind(bindings, parts[i].name, middle)


def infer_assignment(
    left: RuleGraph, g: Premorphism, host: HostGraph
) -> Optional[Assignment]:
    """The unique assignment making g label-preserving, or None.

    Unifies each left label against the host label of its image; marks
    must agree exactly, and repeated variable occurrences must bind
    consistently.
    """
    bindings: Assignment = {}
    for nid in sorted(left.nodes):
        rule_label = left.nodes[nid]
        host_label = host.nodes[g.node_map[nid]]
        if rule_label.marked != host_label.marked:
            return None
        if not _unify_list(rule_label.expr, host_label.items, bindings, g, host):
            return None
    for eid in sorted(left.edges):
        rule_edge = left.edges[eid]
        host_edge = host.edges[g.edge_map[eid]]
        if rule_edge.label.marked != host_edge.label.marked:
            return None
        if not _unify_list(rule_edge.label.expr, host_edge.label.items, bindings, g, host):
            return None
    return bindings


# -- match enumeration -------------------------------------------------


def _premorphisms(left: RuleGraph, host: HostGraph) -> Iterator[Premorphism]:
    """All injective structure-preserving maps, in deterministic order."""
    left_nodes = sorted(left.nodes)
    left_edges = sorted(left.edges)
    host_nodes = sorted(host.nodes)

    node_map: dict[str, str] = {}
    used_nodes: set[str] = set()

    def assign_edges(i: int, edge_map: dict[str, str], used: set[str]):
        if i == len(left_edges):
            yield Premorphism(dict(node_map), dict(edge_map))
            return
        eid = left_edges[i]
        ledge = left.edges[eid]
        src = node_map[ledge.source]
        tgt = node_map[ledge.target]
        for heid in sorted(host.edges_between(src, tgt)):
            if heid in used:
                continue
            edge_map[eid] = heid
            used.add(heid)
            yield from assign_edges(i + 1, edge_map, used)
            del edge_map[eid]
            used.remove(heid)

    def assign_nodes(i: int):
        if i == len(left_nodes):
            yield from assign_edges(0, {}, set())
            return
        nid = left_nodes[i]
        for hid in host_nodes:
            if hid in used_nodes:
                continue
            node_map[nid] = hid
            used_nodes.add(hid)
            yield from assign_nodes(i + 1)
            del node_map[nid]
            used_nodes.remove(hid)

    yield from assign_nodes(0)


def _dangling_ok(
    schema: ConditionalRuleSchema, g: Premorphism, host: HostGraph
) -> bool:
    deleted = {
        g.node_map[nid] for nid in schema.left.nodes if nid not in schema.interface
    }
    if not deleted:
        return True
    matched_edges = set(g.edge_map.values())
    for node in deleted:
        for eid in host.incident_edges(node):
            if eid not in matched_edges:
                return False
    return True


def _right_label(
    label: RuleLabel, g: Premorphism, alpha: Assignment, host: HostGraph
) -> HostLabel:
    return HostLabel(eval_list(label.expr, g, alpha, host), label.marked)


def enumerate_matches(
    schema: ConditionalRuleSchema,
    host: HostGraph,
    warnings: Optional[list[str]] = None,
) -> Iterator[tuple[Premorphism, Assignment]]:
    """Yield every applicable (premorphism, assignment) pair.

    A candidate is discarded when no assignment exists, the condition is
    false, the dangling condition fails, or evaluation of the condition
    or a right-hand label raises an evaluation error (the latter with a
    warning).
    """
    for g in _premorphisms(schema.left, host):
        alpha = infer_assignment(schema.left, g, host)
        if alpha is None:
            continue
        if schema.condition is not None:
            try:
                if not eval_condition(schema.condition, g, alpha, host):
                    continue
            except EvalError as exc:
                if warnings is not None:
                    warnings.append(
                        f"rule {schema.name}: match discarded ({exc})"
                    )
                continue
        if not _dangling_ok(schema, g, host):
            continue
        try:
            for label in _right_labels(schema):
                _right_label(label, g, alpha, host)
        except EvalError as exc:
            if warnings is not None:
                warnings.append(f"rule {schema.name}: match discarded ({exc})")
            continue
        yield g, alpha


def _right_labels(schema: ConditionalRuleSchema):
    for label in schema.right.nodes.values():
        yield label
    for edge in schema.right.edges.values():
        yield edge.label


def apply(
    schema: ConditionalRuleSchema,
    host: HostGraph,
    g: Premorphism,
    alpha: Assignment,
) -> HostGraph:
    """Apply the instantiated rule at the given match, producing a new graph.

    Deletes the images of non-interface left items, adds the right-only
    items with fresh identifiers, and relabels interface node images.
    Right-hand labels see the original host graph, so degree operands
    observe pre-application degrees.
    """
    result = host.copy()

    for eid in schema.left.edges:
        result.remove_edge(g.edge_map[eid])
    for nid in schema.left.nodes:
        if nid not in schema.interface:
            result.remove_node(g.node_map[nid])

    new_nodes: dict[str, str] = {}
    for nid in sorted(schema.right.nodes):
        label = _right_label(schema.right.nodes[nid], g, alpha, host)
        if nid in schema.interface:
            result.relabel_node(g.node_map[nid], label)
        else:
            new_nodes[nid] = result.add_node(label)

    def image(nid: str) -> str:
        return g.node_map[nid] if nid in schema.interface else new_nodes[nid]

    for eid in sorted(schema.right.edges):
        edge = schema.right.edges[eid]
        label = _right_label(edge.label, g, alpha, host)
        result.add_edge(image(edge.source), image(edge.target), label)

    return result


def apply_ruleset(
    rules: list[ConditionalRuleSchema],
    host: HostGraph,
    warnings: Optional[list[str]] = None,
) -> list[HostGraph]:
    """All results of one application of any rule, one per isomorphism class."""
    store = IsoStore()
    out: list[HostGraph] = []
    for schema in rules:
        for g, alpha in enumerate_matches(schema, host, warnings):
            result = apply(schema, host, g, alpha)
            if store.put(result):
                out.append(result)
    return out


def apply_one(
    rules: list[ConditionalRuleSchema],
    host: HostGraph,
    rng=None,
    warnings: Optional[list[str]] = None,
) -> Optional[HostGraph]:
    """One result: the first match in deterministic order, or a random one."""
    matches: list[tuple[ConditionalRuleSchema, Premorphism, Assignment]] = []
    for schema in rules:
        for g, alpha in enumerate_matches(schema, host, warnings):
            matches.append((schema, g, alpha))
            if rng is None:
                break
        if matches and rng is None:
            break
    if not matches:
        return None
    schema, g, alpha = matches[0] if rng is None else rng.choice(matches)
    return apply(schema, host, g, alpha)
