"""Program abstract syntax: commands, declarations, and static checking."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .rules import ConditionalRuleSchema, Violation, validate

Span = tuple[int, int]  # line, column


@dataclass(frozen=True)
class Skip:
    span: Optional[Span] = field(default=None, compare=False)

    def __str__(self) -> str:
        return "skip"


@dataclass(frozen=True)
class Fail:
    span: Optional[Span] = field(default=None, compare=False)

    def __str__(self) -> str:
        return "fail"


@dataclass(frozen=True)
class RuleSetCall:
    names: tuple[str, ...]
    # a bare identifier prints without braces
    bare: bool = field(default=False, compare=False)
    span: Optional[Span] = field(default=None, compare=False)

    def __str__(self) -> str:
        if self.bare and len(self.names) == 1:
            return self.names[0]
        return "{" + ", ".join(self.names) + "}"


@dataclass(frozen=True)
class MacroCall:
    name: str
    span: Optional[Span] = field(default=None, compare=False)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Seq:
    items: tuple["Command", ...]
    span: Optional[Span] = field(default=None, compare=False)

    def __str__(self) -> str:
        return "; ".join(_paren(c, c if isinstance(c, (Or,)) else None) for c in self.items)


@dataclass(frozen=True)
class If:
    cond: "Command"
    then: "Command"
    els: Optional["Command"] = None
    span: Optional[Span] = field(default=None, compare=False)

    def __str__(self) -> str:
        text = f"if {self.cond} then ({self.then})"
        if self.els is not None:
            text += f" else ({self.els})"
        return text


@dataclass(frozen=True)
class Try:
    cond: "Command"
    then: "Command"
    els: Optional["Command"] = None
    span: Optional[Span] = field(default=None, compare=False)

    def __str__(self) -> str:
        text = f"try {self.cond} then ({self.then})"
        if self.els is not None:
            text += f" else ({self.els})"
        return text


@dataclass(frozen=True)
class Loop:
    body: "Command"
    span: Optional[Span] = field(default=None, compare=False)

    def __str__(self) -> str:
        return f"({self.body})!"


@dataclass(frozen=True)
class Or:
    left: "Command"
    right: "Command"
    span: Optional[Span] = field(default=None, compare=False)

    def __str__(self) -> str:
        return f"({self.left} or {self.right})"


Command = Union[Skip, Fail, RuleSetCall, MacroCall, Seq, If, Try, Loop, Or]


def _paren(c: Command, wrap) -> str:
    return f"({c})" if wrap is not None else str(c)


def seq(items: list[Command]) -> Command:
    """Build a flattened sequence; a singleton collapses to the command."""
    flat: list[Command] = []
    for c in items:
        if isinstance(c, Seq):
            flat.extend(c.items)
        else:
            flat.append(c)
    if len(flat) == 1:
        return flat[0]
    return Seq(tuple(flat))


@dataclass
class MacroDecl:
    name: str
    body: Command
    span: Optional[Span] = None


@dataclass
class ProgramAST:
    rules: dict[str, ConditionalRuleSchema]
    macros: dict[str, MacroDecl]
    mains: list[Command]  # checked to contain exactly one entry

    @property
    def main(self) -> Command:
        return self.mains[0]


@dataclass
class CheckedProgram:
    """A validated program with macros expanded away from the main body."""

    rules: dict[str, ConditionalRuleSchema]
    main: Command
    ast: ProgramAST


class CheckError(Exception):
    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


def check_program(ast: ProgramAST) -> list[Violation]:
    """Static checks: rule validity, call resolution, macro acyclicity,
    exactly one main."""
    out: list[Violation] = []

    if len(ast.mains) == 0:
        out.append(Violation("program", "top level", "no main declaration"))
    elif len(ast.mains) > 1:
        out.append(Violation("program", "top level", "more than one main declaration"))

    for schema in ast.rules.values():
        out.extend(validate(schema))

    def resolve(command: Command, where: str) -> None:
        if isinstance(command, RuleSetCall):
            for name in command.names:
                if name in ast.rules:
                    continue
                if command.bare and name in ast.macros:
                    continue
                kind = "rule or macro" if command.bare else "rule"
                out.append(
                    Violation("program", where, f"unresolved {kind} identifier {name!r}")
                )
        elif isinstance(command, MacroCall):
            if command.name not in ast.macros:
                out.append(
                    Violation("program", where, f"unresolved macro {command.name!r}")
                )
        elif isinstance(command, Seq):
            for c in command.items:
                resolve(c, where)
        elif isinstance(command, (If, Try)):
            resolve(command.cond, where)
            resolve(command.then, where)
            if command.els is not None:
                resolve(command.els, where)
        elif isinstance(command, Loop):
            resolve(command.body, where)
        elif isinstance(command, Or):
            resolve(command.left, where)
            resolve(command.right, where)

    for macro in ast.macros.values():
        resolve(macro.body, f"macro {macro.name}")
    for main in ast.mains:
        resolve(main, "main")

    # macro recursion check over the reference graph
    state: dict[str, int] = {}  # 0 = visiting, 1 = done

    def visit(name: str, trail: list[str]) -> None:
        if state.get(name) == 1:
            return
        if state.get(name) == 0:
            out.append(
                Violation(
                    "program",
                    f"macro {name}",
                    "recursive macro reference: " + " -> ".join(trail + [name]),
                )
            )
            return
        state[name] = 0
        for ref in _macro_refs(ast.macros[name].body, ast):
            if ref in ast.macros:
                visit(ref, trail + [name])
        state[name] = 1

    for name in ast.macros:
        if name not in state:
            visit(name, [])

    return out


def _macro_refs(command: Command, ast: ProgramAST) -> set[str]:
    if isinstance(command, RuleSetCall):
        return {n for n in command.names if command.bare and n in ast.macros}
    if isinstance(command, MacroCall):
        return {command.name}
    if isinstance(command, Seq):
        refs: set[str] = set()
        for c in command.items:
            refs |= _macro_refs(c, ast)
        return refs
    if isinstance(command, (If, Try)):
        refs = _macro_refs(command.cond, ast) | _macro_refs(command.then, ast)
        if command.els is not None:
            refs |= _macro_refs(command.els, ast)
        return refs
    if isinstance(command, Loop):
        return _macro_refs(command.body, ast)
    if isinstance(command, Or):
        return _macro_refs(command.left, ast) | _macro_refs(command.right, ast)
    return set()


def expand_macros(command: Command, ast: ProgramAST) -> Command:
    """Substitute macro bodies; assumes the reference graph is acyclic."""
    if isinstance(command, RuleSetCall):
        if command.bare and command.names[0] in ast.macros:
            return expand_macros(ast.macros[command.names[0]].body, ast)
        return command
    if isinstance(command, MacroCall):
        return expand_macros(ast.macros[command.name].body, ast)
    if isinstance(command, Seq):
        return seq([expand_macros(c, ast) for c in command.items])
    if isinstance(command, If):
        return If(
            expand_macros(command.cond, ast),
            expand_macros(command.then, ast),
            None if command.els is None else expand_macros(command.els, ast),
        )
    if isinstance(command, Try):
        return Try(
            expand_macros(command.cond, ast),
            expand_macros(command.then, ast),
            None if command.els is None else expand_macros(command.els, ast),
        )
    if isinstance(command, Loop):
        return Loop(expand_macros(command.body, ast))
    if isinstance(command, Or):
        return Or(expand_macros(command.left, ast), expand_macros(command.right, ast))
    return command


def checked(ast: ProgramAST) -> CheckedProgram:
    violations = check_program(ast)
    if violations:
        raise CheckError(violations)
    return CheckedProgram(ast.rules, expand_macros(ast.main, ast), ast)
