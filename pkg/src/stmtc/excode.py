"""Excode: the abstracted token alphabet over which templates are learned.

Each code token maps to exactly one excode token carrying its token type
and, where available, data types (annotation function alpha).  Token
concretization (pi) maps an excode token back to the set of concrete
tokens available at a position; sequence concretization (Pi) is the
Cartesian product over pi.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product

from .lexer import LiteralKind, TokenRole
from .parser import (
    Assign, Binary, Block, CtorCall, Expr, ExprStmt, FieldAccess, ForStmt,
    Hole, IfStmt, Literal, MethodCall, MethodDecl, Name, Paren,
    PartialProgram, ReturnStmt, Stmt, This, Unary, VarDecl, WhileStmt,
)
from .typesys import UNKNOWN, TypeRef, is_subtype
from .analyzer import LITERAL_TYPES, ScopeEnv, TypedProgram

OP_NAMES = {
    ".": "ACC", "=": "ASSIGN", "==": "equals", "!=": "notEquals",
    "<": "less", "<=": "lessEquals", ">": "greater", ">=": "greaterEquals",
    "+": "add", "-": "sub", "*": "mul", "/": "div", "%": "mod",
    "&&": "and", "||": "or", "!": "not", "++": "inc", "--": "dec",
}
OP_TEXT = {v: k for k, v in OP_NAMES.items()}

SEP_NAMES = {"(": "LP", ")": "RP", "{": "LB", "}": "RB", ";": "SEMI", ",": "COMMA"}
SEP_TEXT = {v: k for k, v in SEP_NAMES.items()}

SPECIAL_TEXT = {"NULL": "null", "ZERO": "0", "EMPTY": '""'}


class ExKind(enum.Enum):
    KEYWORD = "keyword"
    OP = "op"
    SEP = "sep"
    TYPE = "type"
    VAR = "var"
    LIT = "lit"
    CALL = "call"
    CCALL = "ccall"
    FIELD = "field"
    SPECIAL = "special"


@dataclass(frozen=True)
class ExTok:
    """One excode token.  Payload fields are populated per kind."""

    kind: ExKind
    word: str = ""  # keyword text / separator name / special name / op name
    ty: TypeRef | None = None  # TYPE, VAR, LIT payload; CALL/FIELD enclosing
    name: str = ""  # CALL/FIELD member name
    argc: int = -1  # CALL/CCALL argument count
    ret: TypeRef | None = None  # CALL return / FIELD field type

    @staticmethod
    def keyword(word: str) -> "ExTok":
        return ExTok(ExKind.KEYWORD, word=word)

    @staticmethod
    def op(name: str) -> "ExTok":
        return ExTok(ExKind.OP, word=name)

    @staticmethod
    def sep(name: str) -> "ExTok":
        return ExTok(ExKind.SEP, word=name)

    @staticmethod
    def type_(ty: TypeRef) -> "ExTok":
        return ExTok(ExKind.TYPE, ty=ty)

    @staticmethod
    def var(ty: TypeRef) -> "ExTok":
        return ExTok(ExKind.VAR, ty=ty)

    @staticmethod
    def lit(ty: TypeRef) -> "ExTok":
        return ExTok(ExKind.LIT, ty=ty)

    @staticmethod
    def call(enclosing: TypeRef, name: str, argc: int, ret: TypeRef) -> "ExTok":
        return ExTok(ExKind.CALL, ty=enclosing, name=name, argc=argc, ret=ret)

    @staticmethod
    def ccall(cls_ty: TypeRef, argc: int) -> "ExTok":
        return ExTok(ExKind.CCALL, ty=cls_ty, argc=argc)

    @staticmethod
    def field(enclosing: TypeRef, name: str, fieldtype: TypeRef) -> "ExTok":
        return ExTok(ExKind.FIELD, ty=enclosing, name=name, ret=fieldtype)

    @staticmethod
    def special(word: str) -> "ExTok":
        return ExTok(ExKind.SPECIAL, word=word)

    def render(self) -> str:
        k = self.kind
        if k is ExKind.KEYWORD:
            return self.word.upper()
        if k is ExKind.OP:
            return f"OP({self.word})"
        if k is ExKind.SEP or k is ExKind.SPECIAL:
            return self.word
        if k is ExKind.TYPE:
            return f"TYPE({self.ty.render()})"
        if k is ExKind.VAR:
            return f"VAR({self.ty.render()})"
        if k is ExKind.LIT:
            return f"LIT({self.ty.render()})"
        if k is ExKind.CALL:
            return (f"CALL({self.ty.render()},{self.name},"
                    f"{self.argc},{self.ret.render()})")
        if k is ExKind.CCALL:
            return f"CCALL({self.ty.render()},{self.argc})"
        return f"FIELD({self.ty.render()},{self.name},{self.ret.render()})"

    def __repr__(self) -> str:  # keeps test diffs readable
        return self.render()


def render_sequence(seq) -> str:
    return " ".join(t.render() for t in seq)


class EmptyConcretization(Exception):
    """A VAR token has no accessible variable of a compatible type."""


def concretize_token(e: ExTok, env: ScopeEnv) -> list[str]:
    """pi: the concrete code tokens an excode token can stand for.

    Variables concretize to every accessible variable whose type equals or
    is a subtype of the annotated type (VAR(Unk) matches everything);
    non-special literals concretize to a typed placeholder; every other
    token renders to its single concrete lexeme.  Results come back
    name-sorted.
    """
    if e.kind is ExKind.VAR:
        names = []
        for name, ty in env.variables.items():
            if e.ty.is_unknown or ty == e.ty or is_subtype(ty, e.ty, env.index):
                names.append(name)
        if not names:
            raise EmptyConcretization(e.render())
        return sorted(names)
    if e.kind is ExKind.LIT:
        return [f"<lit:{e.ty.render()}>"]
    return [concrete_text(e)]


def concrete_text(e: ExTok) -> str:
    """The single lexeme of a non-variable, non-literal excode token."""
    k = e.kind
    if k is ExKind.KEYWORD:
        return e.word
    if k is ExKind.OP:
        return OP_TEXT[e.word]
    if k is ExKind.SEP:
        return SEP_TEXT[e.word]
    if k is ExKind.SPECIAL:
        return SPECIAL_TEXT[e.word]
    if k is ExKind.TYPE:
        return e.ty.render()
    if k is ExKind.CCALL:
        return e.ty.render()
    if k in (ExKind.CALL, ExKind.FIELD):
        return e.name
    raise ValueError(f"no single rendering for {e.render()}")


def concretize_sequence(seq, env: ScopeEnv) -> list[tuple[str, ...]]:
    """Pi: the Cartesian product of pi over each token.

    Returns the empty list when any position concretizes to nothing.
    """
    choices = []
    for e in seq:
        try:
            choices.append(concretize_token(e, env))
        except EmptyConcretization:
            return []
    return [tuple(c) for c in product(*choices)]


# --- annotation (alpha) -----------------------------------------------------


def annotate(typed: TypedProgram, source_id: str, start: int, end: int) -> list[ExTok]:
    """alpha: the excode sequence for tokens[start:end] of one file.

    One excode token per code token; anything the analyzer could not
    resolve is annotated with Unknown rather than failing.
    """
    table = annotation_table(typed, source_id)
    return [table[i] for i in range(start, end)]


def annotation_table(typed: TypedProgram, source_id: str):
    """Per-token excode annotations for every method body in a file, cached."""
    cache = getattr(typed, "_excode_tables", None)
    if cache is None:
        cache = {}
        typed._excode_tables = cache
    table = cache.get(source_id)
    if table is None:
        prog = typed.file(source_id)
        table = _build_table(typed, prog)
        cache[source_id] = table
    return table


def _build_table(typed: TypedProgram, prog: PartialProgram) -> dict[int, ExTok]:
    table: dict[int, ExTok] = {}
    toks = prog.stream.tokens
    for cls in prog.classes:
        for method in cls.methods:
            if method.body is None:
                continue
            for stmt in method.body.stmts:
                _annotate_stmt(stmt, toks, typed, table)
            # structural tokens not covered by statements (hole gaps are
            # handled inside _annotate_stmt)
            for i in range(method.body_start, method.body_end):
                if i not in table:
                    table[i] = _fallback(toks[i])
    return table


def _annotate_stmt(s: Stmt, toks, typed: TypedProgram, table) -> None:
    index = typed.index
    if isinstance(s, VarDecl):
        decl_ty = index.resolve_name(s.type_name)
        table[s.type_tok] = ExTok.type_(decl_ty)
        table[s.name_tok] = ExTok.var(decl_ty)
        if s.init is not None:
            _annotate_expr(s.init, toks, typed, table)
    elif isinstance(s, ExprStmt):
        if s.expr is not None:
            _annotate_expr(s.expr, toks, typed, table)
    elif isinstance(s, ReturnStmt):
        table[s.kw_tok] = ExTok.keyword("return")
        if s.expr is not None:
            _annotate_expr(s.expr, toks, typed, table)
    elif isinstance(s, IfStmt):
        table[s.kw_tok] = ExTok.keyword("if")
        if s.cond is not None:
            _annotate_expr(s.cond, toks, typed, table)
        for branch in (s.then, s.els):
            if branch is not None:
                _annotate_stmt(branch, toks, typed, table)
    elif isinstance(s, WhileStmt):
        table[s.kw_tok] = ExTok.keyword("while")
        if s.cond is not None:
            _annotate_expr(s.cond, toks, typed, table)
        if s.body is not None:
            _annotate_stmt(s.body, toks, typed, table)
    elif isinstance(s, ForStmt):
        table[s.kw_tok] = ExTok.keyword("for")
        if s.init is not None:
            _annotate_stmt(s.init, toks, typed, table)
        if s.cond is not None:
            _annotate_expr(s.cond, toks, typed, table)
        if s.update is not None:
            _annotate_expr(s.update, toks, typed, table)
        if s.body is not None:
            _annotate_stmt(s.body, toks, typed, table)
    elif isinstance(s, Block):
        for inner in s.stmts:
            _annotate_stmt(inner, toks, typed, table)
    elif isinstance(s, Hole):
        for i in range(s.start, s.end + 1):
            table[i] = _fallback(toks[i])


def _annotate_expr(e: Expr, toks, typed: TypedProgram, table) -> None:
    index = typed.index
    if isinstance(e, Literal):
        table[e.tok] = literal_excode(toks[e.tok])
    elif isinstance(e, This):
        table[e.tok] = ExTok.keyword("this")
    elif isinstance(e, Name):
        if e.binding == "var":
            table[e.tok] = ExTok.var(e.type or UNKNOWN)
        elif e.binding == "field":
            encl = index.resolve_name(e.decl_class) if e.decl_class else UNKNOWN
            table[e.tok] = ExTok.field(encl, e.name, e.type or UNKNOWN)
        else:
            table[e.tok] = ExTok.var(UNKNOWN)
    elif isinstance(e, FieldAccess):
        if e.receiver is not None:
            _annotate_expr(e.receiver, toks, typed, table)
        encl = index.resolve_name(e.decl_class) if e.decl_class else UNKNOWN
        table[e.name_tok] = ExTok.field(encl, e.name, e.type or UNKNOWN)
    elif isinstance(e, MethodCall):
        if e.receiver is not None:
            _annotate_expr(e.receiver, toks, typed, table)
        encl = index.resolve_name(e.decl_class) if e.decl_class else UNKNOWN
        table[e.name_tok] = ExTok.call(
            encl, e.name, len(e.args), e.returns or UNKNOWN)
        for a in e.args:
            _annotate_expr(a, toks, typed, table)
    elif isinstance(e, CtorCall):
        table[e.name_tok] = ExTok.ccall(
            index.resolve_name(e.class_name), len(e.args))
        for a in e.args:
            _annotate_expr(a, toks, typed, table)
    elif isinstance(e, Unary):
        table[e.op_tok] = ExTok.op(OP_NAMES[toks[e.op_tok].lexeme])
        _annotate_expr(e.operand, toks, typed, table)
    elif isinstance(e, Binary):
        _annotate_expr(e.left, toks, typed, table)
        table[e.op_tok] = ExTok.op(OP_NAMES[e.op])
        _annotate_expr(e.right, toks, typed, table)
    elif isinstance(e, Assign):
        _annotate_expr(e.target, toks, typed, table)
        table[e.op_tok] = ExTok.op("ASSIGN")
        _annotate_expr(e.value, toks, typed, table)
    elif isinstance(e, Paren):
        _annotate_expr(e.inner, toks, typed, table)


def literal_excode(tok) -> ExTok:
    """LIT(littype) with the special literals null, 0, "" as reserved tokens."""
    if tok.literal_kind is LiteralKind.NULL:
        return ExTok.special("NULL")
    if tok.literal_kind is LiteralKind.INT and tok.lexeme == "0":
        return ExTok.special("ZERO")
    if tok.literal_kind is LiteralKind.STRING and tok.lexeme == '""':
        return ExTok.special("EMPTY")
    return ExTok.lit(LITERAL_TYPES[tok.literal_kind])


def _fallback(tok) -> ExTok:
    """Best-effort excode for tokens inside holes and structural positions."""
    if tok.role is TokenRole.SEPARATOR:
        return ExTok.sep(SEP_NAMES[tok.lexeme])
    if tok.role is TokenRole.OPERATOR:
        return ExTok.op(OP_NAMES[tok.lexeme])
    if tok.role is TokenRole.KEYWORD:
        from .parser import TYPE_KEYWORDS

        if tok.lexeme in TYPE_KEYWORDS:
            name = tok.lexeme
            if name == "String":
                return ExTok.type_(TypeRef.cls("String"))
            return ExTok.type_(TypeRef.primitive(name))
        return ExTok.keyword(tok.lexeme)
    if tok.role is TokenRole.LITERAL:
        return literal_excode(tok)
    return ExTok.var(UNKNOWN)
