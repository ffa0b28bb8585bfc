"""Best-effort program analysis over partial ASTs.

Builds the project-wide class index, resolves expression types (anything
unresolvable becomes Unknown rather than an error), computes the set of
accessible variables at a position, and enumerates the statement-scoped
completion units used by both the completion pipeline and the evaluation
harness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import LiteralKind
from .parser import (
    Assign, Binary, Block, ClassDecl, CtorCall, Expr, ExprStmt, FieldAccess,
    ForStmt, Hole, IfStmt, Literal, MethodCall, MethodDecl, Name, Paren,
    PartialProgram, ReturnStmt, Stmt, This, Unary, VarDecl, WhileStmt,
)
from .typesys import (
    BUILTIN_STUBS, UNKNOWN, VOID, ClassIndex, ClassInfo, MethodSig, TypeKind,
    TypeRef, is_subtype, numeric_join, parse_stub_text,
)

LITERAL_TYPES = {
    LiteralKind.INT: TypeRef.primitive("int"),
    LiteralKind.LONG: TypeRef.primitive("long"),
    LiteralKind.FLOAT: TypeRef.primitive("float"),
    LiteralKind.DOUBLE: TypeRef.primitive("double"),
    LiteralKind.CHAR: TypeRef.primitive("char"),
    LiteralKind.STRING: TypeRef.cls("String"),
    LiteralKind.BOOLEAN: TypeRef.primitive("boolean"),
    # null carries no recoverable type; Unknown keeps every check permissive.
    LiteralKind.NULL: UNKNOWN,
}

ARITHMETIC_OPS = frozenset(["+", "-", "*", "/", "%"])
BOOLEAN_RESULT_OPS = frozenset(["==", "!=", "<", "<=", ">", ">=", "&&", "||"])


class PositionOutsideMethod(Exception):
    pass


@dataclass
class ScopeEnv:
    """Accessible variables at a completion position.

    ``variables`` holds params plus locals whose declaration statement ends
    before the position, with inner declarations shadowing outer ones.
    """

    variables: dict[str, TypeRef]
    enclosing_class: str
    enclosing_method_return: TypeRef
    index: ClassIndex

    def sorted_vars(self) -> list[tuple[str, TypeRef]]:
        return sorted(self.variables.items())


@dataclass
class Unit:
    """One completion unit: a simple statement, or the header of a compound
    statement up to and including its closing parenthesis."""

    start: int  # token index, inclusive
    end: int  # token index, inclusive
    kind: str  # "simple" | "header"


@dataclass
class TypedProgram:
    files: list[PartialProgram]
    index: ClassIndex
    diagnostics: list[str] = field(default_factory=list)
    unresolved: int = 0

    def __post_init__(self):
        self.by_id = {f.source_id: f for f in self.files}
        self._unit_cache: dict[tuple[str, int], list[Unit]] = {}

    def file(self, source_id: str) -> PartialProgram:
        return self.by_id[source_id]

    def method_at(self, source_id: str, position: int) -> MethodDecl:
        """The method whose body range contains the position."""
        f = self.file(source_id)
        for cls in f.classes:
            for m in cls.methods:
                if m.body is not None and m.body_start <= position <= m.body_end:
                    return m
        raise PositionOutsideMethod(
            f"{source_id}: position {position} is not inside a method body")

    def class_of_method(self, source_id: str, method: MethodDecl) -> ClassDecl:
        for cls in self.file(source_id).classes:
            if method in cls.methods:
                return cls
        raise KeyError("method not found in file")

    def units_of(self, source_id: str, method: MethodDecl) -> list[Unit]:
        key = (source_id, method.body_start)
        units = self._unit_cache.get(key)
        if units is None:
            units = []
            if method.body is not None:
                for stmt in method.body.stmts:
                    _collect_units(stmt, units)
            units.sort(key=lambda u: u.start)
            self._unit_cache[key] = units
        return units

    def unit_at(self, source_id: str, position: int) -> Unit | None:
        method = self.method_at(source_id, position)
        for unit in self.units_of(source_id, method):
            if unit.start <= position <= unit.end:
                return unit
        return None


def _collect_units(stmt: Stmt, out: list[Unit]) -> None:
    if isinstance(stmt, (VarDecl, ExprStmt, ReturnStmt)):
        out.append(Unit(stmt.start, stmt.end, "simple"))
    elif isinstance(stmt, IfStmt):
        if stmt.rp_tok >= 0:
            out.append(Unit(stmt.kw_tok, stmt.rp_tok, "header"))
        if stmt.then is not None:
            _collect_units(stmt.then, out)
        if stmt.els is not None:
            _collect_units(stmt.els, out)
    elif isinstance(stmt, WhileStmt):
        if stmt.rp_tok >= 0:
            out.append(Unit(stmt.kw_tok, stmt.rp_tok, "header"))
        if stmt.body is not None:
            _collect_units(stmt.body, out)
    elif isinstance(stmt, ForStmt):
        if stmt.rp_tok >= 0:
            out.append(Unit(stmt.kw_tok, stmt.rp_tok, "header"))
        if stmt.body is not None:
            _collect_units(stmt.body, out)
    elif isinstance(stmt, Block):
        for s in stmt.stmts:
            _collect_units(s, out)
    # holes contribute no units


# --- class index ----------------------------------------------------------


def build_class_index(
    programs: list[PartialProgram],
    stub_texts: list[str] | None = None,
    include_builtins: bool = True,
) -> tuple[ClassIndex, list[str]]:
    """One index entry per declared class; stubs merged source-over-stub.

    Duplicate source classes are reported and the first (by file name, then
    position) wins.
    """
    index = ClassIndex()
    diags: list[str] = []
    for prog in sorted(programs, key=lambda p: p.source_id):
        toks = prog.stream.tokens
        for cls in prog.classes:
            if cls.name in index.classes:
                diags.append(f"DuplicateClass: {cls.name} in {prog.source_id}")
                continue
            info = ClassInfo(cls.name)
            for fd in cls.fields:
                info.fields[fd.name] = TypeRef.cls(toks[fd.type_tok].lexeme)
            for md in cls.methods:
                params = [TypeRef.cls(toks[p.type_tok].lexeme) for p in md.params]
                sig = MethodSig(md.name, params, TypeRef.cls(md.ret_name))
                info.methods[(md.name, len(params))] = sig
            index.classes[cls.name] = info
    stub_texts = list(stub_texts or [])
    if include_builtins:
        stub_texts.append(BUILTIN_STUBS)
    for text in stub_texts:
        for info in parse_stub_text(text):
            if info.name in index.classes:
                continue
            index.classes[info.name] = info
    _finalize_index(index)
    return index, diags


def _finalize_index(index: ClassIndex) -> None:
    """Collapse member type names that never resolved into Unknown."""

    def fix(t: TypeRef) -> TypeRef:
        if t.kind is TypeKind.CLASS and t.name not in index.classes:
            if t.name in ("int", "long", "short", "char", "boolean", "float",
                          "double"):
                return TypeRef.primitive(t.name)
            if t.name == "void":
                return VOID
            return UNKNOWN
        return t

    for info in index.classes.values():
        if info.supertype is not None and info.supertype not in index.classes:
            info.supertype = None
        info.fields = {k: fix(v) for k, v in info.fields.items()}
        for sig in info.methods.values():
            sig.params = [fix(p) for p in sig.params]
            sig.returns = fix(sig.returns)


# --- type resolution ------------------------------------------------------


def resolve_types(programs: list[PartialProgram], index: ClassIndex) -> TypedProgram:
    """Attach a TypeRef to every expression node; unresolvable names become
    Unknown.  Never fails."""
    typed = TypedProgram(list(programs), index)
    for prog in typed.files:
        for cls in prog.classes:
            for method in cls.methods:
                r = _Resolver(prog, cls, index, typed)
                r.run(method)
    return typed


class _Resolver:
    def __init__(self, prog: PartialProgram, cls: ClassDecl, index: ClassIndex,
                 typed: TypedProgram):
        self.prog = prog
        self.cls = cls
        self.index = index
        self.typed = typed
        self.scopes: list[dict[str, TypeRef]] = []

    def run(self, method: MethodDecl) -> None:
        params = {}
        for p in method.params:
            params[p.name] = self.index.resolve_name(p.type_name)
        self.scopes = [params]
        self.method_return = self.index.resolve_name(method.ret_name)
        if method.body is not None:
            for stmt in method.body.stmts:
                self.stmt(stmt)

    def lookup(self, name: str) -> TypeRef | None:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def stmt(self, s: Stmt) -> None:
        if isinstance(s, VarDecl):
            if s.init is not None:
                self.expr(s.init)
            self.scopes[-1][s.name] = self.index.resolve_name(s.type_name)
        elif isinstance(s, ExprStmt):
            if s.expr is not None:
                self.expr(s.expr)
        elif isinstance(s, ReturnStmt):
            if s.expr is not None:
                self.expr(s.expr)
        elif isinstance(s, IfStmt):
            if s.cond is not None:
                self.expr(s.cond)
            for branch in (s.then, s.els):
                if branch is not None:
                    self.scopes.append({})
                    self.stmt(branch)
                    self.scopes.pop()
        elif isinstance(s, WhileStmt):
            if s.cond is not None:
                self.expr(s.cond)
            if s.body is not None:
                self.scopes.append({})
                self.stmt(s.body)
                self.scopes.pop()
        elif isinstance(s, ForStmt):
            self.scopes.append({})
            if s.init is not None:
                self.stmt(s.init)
            if s.cond is not None:
                self.expr(s.cond)
            if s.update is not None:
                self.expr(s.update)
            if s.body is not None:
                self.stmt(s.body)
            self.scopes.pop()
        elif isinstance(s, Block):
            self.scopes.append({})
            for inner in s.stmts:
                self.stmt(inner)
            self.scopes.pop()
        # holes carry no typed content

    def expr(self, e: Expr) -> TypeRef:
        t = self._expr(e)
        e.type = t
        if t.is_unknown:
            self.typed.unresolved += 1
        return t

    def _expr(self, e: Expr) -> TypeRef:
        toks = self.prog.stream.tokens
        if isinstance(e, Literal):
            return LITERAL_TYPES[toks[e.tok].literal_kind]
        if isinstance(e, This):
            return TypeRef.cls(self.cls.name)
        if isinstance(e, Name):
            local = self.lookup(e.name)
            if local is not None:
                e.binding = "var"
                return local
            found = self.index.find_field(self.cls.name, e.name)
            if found is not None:
                e.binding = "field"
                e.decl_class = found[0]
                return found[1]
            e.binding = "unknown"
            return UNKNOWN
        if isinstance(e, FieldAccess):
            recv = self.expr(e.receiver) if e.receiver is not None else UNKNOWN
            if recv.kind is TypeKind.CLASS:
                found = self.index.find_field(recv.name, e.name)
                if found is not None:
                    e.decl_class = found[0]
                    return found[1]
            return UNKNOWN
        if isinstance(e, MethodCall):
            for a in e.args:
                self.expr(a)
            if e.receiver is None:
                owner = self.cls.name
            else:
                recv = self.expr(e.receiver)
                owner = recv.name if recv.kind is TypeKind.CLASS else None
            if owner is not None:
                found = self.index.find_method(owner, e.name, len(e.args))
                if found is not None:
                    e.decl_class = found[0]
                    e.returns = found[1].returns
                    return found[1].returns
            e.returns = UNKNOWN
            return UNKNOWN
        if isinstance(e, CtorCall):
            for a in e.args:
                self.expr(a)
            return self.index.resolve_name(e.class_name)
        if isinstance(e, Unary):
            t = self.expr(e.operand)
            if e.op == "!":
                return TypeRef.primitive("boolean")
            return t if t.is_numeric else UNKNOWN
        if isinstance(e, Binary):
            lt = self.expr(e.left)
            rt = self.expr(e.right)
            if e.op in BOOLEAN_RESULT_OPS:
                return TypeRef.primitive("boolean")
            joined = numeric_join(lt, rt)
            if joined is not None:
                return joined
            if lt.is_unknown and rt.is_numeric:
                return rt
            if rt.is_unknown and lt.is_numeric:
                return lt
            return UNKNOWN
        if isinstance(e, Assign):
            tt = self.expr(e.target)
            vt = self.expr(e.value)
            return tt if not tt.is_unknown else vt
        if isinstance(e, Paren):
            return self.expr(e.inner)
        return UNKNOWN


# --- accessible environment ------------------------------------------------


def accessible_env(typed: TypedProgram, source_id: str, position: int) -> ScopeEnv:
    """The set V of accessible variables at a token position.

    Includes method parameters and every local whose declaration statement
    ends before the position, walking only the block chain that contains
    the position (inner declarations shadow outer ones).
    """
    method = typed.method_at(source_id, position)
    cls = typed.class_of_method(source_id, method)
    variables: dict[str, TypeRef] = {}
    for p in method.params:
        variables[p.name] = typed.index.resolve_name(p.type_name)
    if method.body is not None:
        _collect_scope(method.body.stmts, position, typed.index, variables)
    return ScopeEnv(
        variables=variables,
        enclosing_class=cls.name,
        enclosing_method_return=typed.index.resolve_name(method.ret_name),
        index=typed.index,
    )


def _collect_scope(stmts, position: int, index: ClassIndex,
                   variables: dict[str, TypeRef]) -> None:
    for s in stmts:
        if isinstance(s, VarDecl):
            if s.end < position:
                variables[s.name] = index.resolve_name(s.type_name)
        elif s.start <= position <= s.end:
            if isinstance(s, Block):
                _collect_scope(s.stmts, position, index, variables)
            elif isinstance(s, IfStmt):
                for branch in (s.then, s.els):
                    if branch is not None and branch.start <= position <= branch.end:
                        _collect_scope([branch], position, index, variables)
            elif isinstance(s, WhileStmt):
                if s.body is not None and s.body.start <= position <= s.body.end:
                    _collect_scope([s.body], position, index, variables)
            elif isinstance(s, ForStmt):
                if isinstance(s.init, VarDecl) and s.init_semi < position:
                    variables[s.init.name] = index.resolve_name(s.init.type_name)
                if s.body is not None and s.body.start <= position <= s.body.end:
                    _collect_scope([s.body], position, index, variables)


def load_sources(named_sources: list[tuple[str, str]],
                 stub_texts: list[str] | None = None) -> TypedProgram:
    """Lex, parse, index and resolve a list of (source_id, text) pairs."""
    from .lexer import tokenize
    from .parser import parse_partial

    programs = [parse_partial(tokenize(text, sid)) for sid, text in named_sources]
    index, diags = build_class_index(programs, stub_texts)
    typed = resolve_types(programs, index)
    typed.diagnostics.extend(diags)
    return typed
