"""Concrete syntax: lexer and recursive-descent parsers for programs,
rule declarations, and host graphs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graphs import GraphError, HostGraph, HostLabel
from .labels import (
    Arith,
    Condition,
    Cons,
    Deg,
    Dot,
    Empty,
    EdgePred,
    Eq,
    IntLit,
    Neg,
    Not,
    Or as CondOr,
    And as CondAnd,
    Rel,
    RuleLabel,
    StrLit,
    TypeCheck,
    Var,
    VType,
)
from .program import (
    Command,
    Fail,
    If,
    Loop,
    MacroDecl,
    Or,
    ProgramAST,
    RuleSetCall,
    Seq,
    Skip,
    Try,
    seq,
)
from .rules import ConditionalRuleSchema, RuleGraph


KEYWORDS = {
    "main", "if", "then", "else", "try", "or", "skip", "fail", "empty",
    "where", "interface", "rule", "int", "string", "atom", "list",
    "edge", "indeg", "outdeg", "not", "and",
}

SYMBOLS = [
    "=>", "!=", ">=", "<=",
    "[", "]", "(", ")", "{", "}", ",", ";", ":", ".", "!", "=", "#",
    "+", "-", "*", "/", "<", ">", "|",
]


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, KEYWORD, INT, STRING, SYMBOL, EOF
    value: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c in " \t\r":
            i, col = i + 1, col + 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("INT", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "KEYWORD" if word in KEYWORDS else "IDENT"
            tokens.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if c == '"':
            j = i + 1
            out = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n and text[j + 1] in ('"', "\\"):
                    out.append(text[j + 1])
                    j += 2
                elif text[j] == "\n":
                    raise ParseError("unterminated string", start_line, start_col)
                else:
                    out.append(text[j])
                    j += 1
            if j >= n:
                raise ParseError("unterminated string", start_line, start_col)
            tokens.append(Token("STRING", "".join(out), start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("SYMBOL", sym, start_line, start_col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


class Parser:
    def __init__(self, text: str, decls: Optional[dict[str, VType]] = None):
        self.tokens = tokenize(text)
        self.pos = 0
        self.decls = decls or {}

    # -- token helpers -------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (value is None or tok.value == value)

    def accept(self, kind: str, value: Optional[str] = None) -> Optional[Token]:
        if self.at(kind, value):
            return self.next()
        return None

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        if self.at(kind, value):
            return self.next()
        tok = self.peek()
        want = value if value is not None else kind
        raise ParseError(
            f"expected {want!r}, found {tok.value or tok.kind!r}", tok.line, tok.col
        )

    # -- host graphs ---------------------------------------------------

    def parse_host_graph(self) -> HostGraph:
        graph = HostGraph()
        self.expect("SYMBOL", "[")
        while self.at("SYMBOL", "("):
            tok = self.next()
            nid = self.expect("IDENT").value
            self.expect("SYMBOL", ",")
            label = self.parse_host_label()
            self.expect("SYMBOL", ")")
            try:
                graph.add_node(label, nid)
            except GraphError as exc:
                raise ParseError(str(exc), tok.line, tok.col) from exc
        self.expect("SYMBOL", "|")
        while self.at("SYMBOL", "("):
            tok = self.next()
            eid = self.expect("IDENT").value
            self.expect("SYMBOL", ",")
            src = self.expect("IDENT").value
            self.expect("SYMBOL", ",")
            tgt = self.expect("IDENT").value
            self.expect("SYMBOL", ",")
            label = self.parse_host_label()
            self.expect("SYMBOL", ")")
            try:
                graph.add_edge(src, tgt, label, eid)
            except GraphError as exc:
                raise ParseError(str(exc), tok.line, tok.col) from exc
        self.expect("SYMBOL", "]")
        return graph

    def parse_host_label(self) -> HostLabel:
        items: tuple = ()
        if self.accept("KEYWORD", "empty"):
            pass
        else:
            items = (self.parse_host_atom(),)
            while self.accept("SYMBOL", ":"):
                items += (self.parse_host_atom(),)
        marked = self.accept("SYMBOL", "#") is not None
        return HostLabel(items, marked)

    def parse_host_atom(self):
        if self.accept("SYMBOL", "-"):
            return -int(self.expect("INT").value)
        if self.at("INT"):
            return int(self.next().value)
        if self.at("STRING"):
            return self.next().value
        raise self.error("expected an integer or string atom")

    # -- label expressions ----------------------------------------------

    def parse_listexpr(self):
        left = self.parse_dot()
        if self.accept("SYMBOL", ":"):
            return Cons(left, self.parse_listexpr())
        return left

    def parse_dot(self):
        expr = self.parse_additive()
        while self.accept("SYMBOL", "."):
            expr = Dot(expr, self.parse_additive())
        return expr

    def parse_additive(self):
        expr = self.parse_multiplicative()
        while self.at("SYMBOL", "+") or self.at("SYMBOL", "-"):
            op = self.next().value
            expr = Arith(op, expr, self.parse_multiplicative())
        return expr

    def parse_multiplicative(self):
        expr = self.parse_unary()
        while self.at("SYMBOL", "*") or self.at("SYMBOL", "/"):
            op = self.next().value
            expr = Arith(op, expr, self.parse_unary())
        return expr

    def parse_unary(self):
        if self.accept("SYMBOL", "-"):
            return Neg(self.parse_unary())
        return self.parse_expr_primary()

    def parse_expr_primary(self):
        if self.at("INT"):
            return IntLit(int(self.next().value))
        if self.at("STRING"):
            return StrLit(self.next().value)
        if self.accept("KEYWORD", "empty"):
            return Empty()
        if self.at("KEYWORD", "indeg") or self.at("KEYWORD", "outdeg"):
            kw = self.next().value
            self.expect("SYMBOL", "(")
            node = self.expect("IDENT").value
            self.expect("SYMBOL", ")")
            return Deg("in" if kw == "indeg" else "out", node)
        if self.accept("SYMBOL", "("):
            expr = self.parse_listexpr()
            self.expect("SYMBOL", ")")
            return expr
        if self.at("IDENT"):
            tok = self.next()
            vtype = self.decls.get(tok.value)
            if vtype is None:
                raise ParseError(
                    f"undeclared variable {tok.value!r}", tok.line, tok.col
                )
            return Var(tok.value, vtype)
        raise self.error("expected an expression")

    # -- conditions ------------------------------------------------------

    def parse_condition(self) -> Condition:
        cond = self.parse_cond_and()
        while self.accept("KEYWORD", "or"):
            cond = CondOr(cond, self.parse_cond_and())
        return cond

    def parse_cond_and(self) -> Condition:
        cond = self.parse_cond_not()
        while self.accept("KEYWORD", "and"):
            cond = CondAnd(cond, self.parse_cond_not())
        return cond

    def parse_cond_not(self) -> Condition:
        if self.accept("KEYWORD", "not"):
            return Not(self.parse_cond_not())
        return self.parse_cond_primary()

    def parse_cond_primary(self) -> Condition:
        for tname in ("int", "string", "atom"):
            if self.at("KEYWORD", tname):
                self.next()
                self.expect("SYMBOL", "(")
                expr = self.parse_listexpr()
                self.expect("SYMBOL", ")")
                return TypeCheck(tname, expr)
        if self.accept("KEYWORD", "edge"):
            self.expect("SYMBOL", "(")
            src = self.expect("IDENT").value
            self.expect("SYMBOL", ",")
            tgt = self.expect("IDENT").value
            label = None
            if self.accept("SYMBOL", ","):
                label = self.parse_listexpr()
            self.expect("SYMBOL", ")")
            return EdgePred(src, tgt, label)
        # comparison, falling back to a parenthesised condition
        saved = self.pos
        try:
            return self.parse_comparison()
        except ParseError:
            self.pos = saved
        if self.accept("SYMBOL", "("):
            cond = self.parse_condition()
            self.expect("SYMBOL", ")")
            return cond
        raise self.error("expected a condition")

    def parse_comparison(self) -> Condition:
        left = self.parse_listexpr()
        if self.accept("SYMBOL", "="):
            return Eq(left, self.parse_listexpr())
        if self.accept("SYMBOL", "!="):
            return Eq(left, self.parse_listexpr(), negated=True)
        for op in (">=", "<=", ">", "<"):
            if self.accept("SYMBOL", op):
                return Rel(op, left, self.parse_listexpr())
        raise self.error("expected a comparison operator")

    # -- rule declarations ----------------------------------------------

    def parse_rule_decl(self) -> ConditionalRuleSchema:
        self.expect("KEYWORD", "rule")
        name = self.expect("IDENT").value
        self.expect("SYMBOL", "(")
        decls: dict[str, VType] = {}
        if not self.at("SYMBOL", ")"):
            while True:
                names = [self.expect("IDENT").value]
                while self.accept("SYMBOL", ","):
                    names.append(self.expect("IDENT").value)
                self.expect("SYMBOL", ":")
                tok = self.next()
                if tok.kind != "KEYWORD" or tok.value not in (
                    "int", "string", "atom", "list",
                ):
                    raise ParseError("expected a variable type", tok.line, tok.col)
                for var in names:
                    if var in decls:
                        raise ParseError(
                            f"variable {var!r} declared twice", tok.line, tok.col
                        )
                    decls[var] = VType(tok.value)
                if not self.accept("SYMBOL", ";"):
                    break
        self.expect("SYMBOL", ")")
        old_decls = self.decls
        self.decls = decls
        try:
            left = self.parse_rule_graph()
            self.expect("SYMBOL", "=>")
            right = self.parse_rule_graph()
            self.expect("KEYWORD", "interface")
            self.expect("SYMBOL", "=")
            self.expect("SYMBOL", "{")
            interface: set[str] = set()
            if self.at("IDENT"):
                interface.add(self.next().value)
                while self.accept("SYMBOL", ","):
                    interface.add(self.expect("IDENT").value)
            self.expect("SYMBOL", "}")
            condition = None
            if self.accept("KEYWORD", "where"):
                condition = self.parse_condition()
        finally:
            self.decls = old_decls
        return ConditionalRuleSchema(
            name, decls, left, frozenset(interface), right, condition
        )

    def parse_rule_graph(self) -> RuleGraph:
        graph = RuleGraph()
        self.expect("SYMBOL", "[")
        while self.at("SYMBOL", "("):
            tok = self.next()
            nid = self.expect("IDENT").value
            if nid in graph.nodes:
                raise ParseError(f"duplicate node id {nid!r}", tok.line, tok.col)
            self.expect("SYMBOL", ",")
            expr = self.parse_listexpr()
            marked = self.accept("SYMBOL", "#") is not None
            self.expect("SYMBOL", ")")
            graph.add_node(nid, RuleLabel(expr, marked))
        self.expect("SYMBOL", "|")
        while self.at("SYMBOL", "("):
            tok = self.next()
            eid = self.expect("IDENT").value
            if eid in graph.edges:
                raise ParseError(f"duplicate edge id {eid!r}", tok.line, tok.col)
            self.expect("SYMBOL", ",")
            src = self.expect("IDENT").value
            self.expect("SYMBOL", ",")
            tgt = self.expect("IDENT").value
            self.expect("SYMBOL", ",")
            expr = self.parse_listexpr()
            marked = self.accept("SYMBOL", "#") is not None
            self.expect("SYMBOL", ")")
            graph.add_edge(eid, src, tgt, RuleLabel(expr, marked))
        self.expect("SYMBOL", "]")
        return graph

    # -- commands --------------------------------------------------------

    def parse_comseq(self) -> Command:
        start = self.peek()
        left = self.parse_seq_level()
        while self.accept("KEYWORD", "or"):
            right = self.parse_seq_level()
            left = Or(left, right, span=(start.line, start.col))
        return left

    def parse_seq_level(self) -> Command:
        items = [self.parse_postfix()]
        while self.accept("SYMBOL", ";"):
            items.append(self.parse_postfix())
        return seq(items)

    def parse_postfix(self) -> Command:
        start = self.peek()
        cmd = self.parse_command_primary()
        while self.accept("SYMBOL", "!"):
            cmd = Loop(cmd, span=(start.line, start.col))
        return cmd

    def parse_command_primary(self) -> Command:
        tok = self.peek()
        span = (tok.line, tok.col)
        if self.accept("KEYWORD", "skip"):
            return Skip(span=span)
        if self.accept("KEYWORD", "fail"):
            return Fail(span=span)
        if self.accept("KEYWORD", "if"):
            cond = self.parse_comseq()
            self.expect("KEYWORD", "then")
            then = self.parse_comseq()
            els = self.parse_comseq() if self.accept("KEYWORD", "else") else None
            return If(cond, then, els, span=span)
        if self.accept("KEYWORD", "try"):
            cond = self.parse_comseq()
            self.expect("KEYWORD", "then")
            then = self.parse_comseq()
            els = self.parse_comseq() if self.accept("KEYWORD", "else") else None
            return Try(cond, then, els, span=span)
        if self.accept("SYMBOL", "{"):
            names: list[str] = []
            if self.at("IDENT"):
                names.append(self.next().value)
                while self.accept("SYMBOL", ","):
                    names.append(self.expect("IDENT").value)
            self.expect("SYMBOL", "}")
            return RuleSetCall(tuple(names), bare=False, span=span)
        if self.at("IDENT"):
            name = self.next().value
            return RuleSetCall((name,), bare=True, span=span)
        if self.accept("SYMBOL", "("):
            cmd = self.parse_comseq()
            self.expect("SYMBOL", ")")
            return cmd
        raise self.error("expected a command")

    # -- programs --------------------------------------------------------

    def parse_program(self) -> ProgramAST:
        rules: dict[str, ConditionalRuleSchema] = {}
        macros: dict[str, MacroDecl] = {}
        mains: list[Command] = []
        while not self.at("EOF"):
            tok = self.peek()
            if self.at("KEYWORD", "rule"):
                schema = self.parse_rule_decl()
                if schema.name in rules or schema.name in macros:
                    raise ParseError(
                        f"duplicate declaration {schema.name!r}", tok.line, tok.col
                    )
                rules[schema.name] = schema
            elif self.at("KEYWORD", "main"):
                self.next()
                self.expect("SYMBOL", "=")
                mains.append(self.parse_comseq())
            elif self.at("IDENT"):
                name = self.next().value
                self.expect("SYMBOL", "=")
                body = self.parse_comseq()
                if name in rules or name in macros:
                    raise ParseError(
                        f"duplicate declaration {name!r}", tok.line, tok.col
                    )
                macros[name] = MacroDecl(name, body, span=(tok.line, tok.col))
            else:
                raise self.error("expected a declaration")
        return ProgramAST(rules, macros, mains)


def parse_program(text: str) -> ProgramAST:
    parser = Parser(text)
    return parser.parse_program()


def parse_host_graph(text: str) -> HostGraph:
    parser = Parser(text)
    graph = parser.parse_host_graph()
    parser.expect("EOF")
    return graph
