"""Error-recovering recursive-descent parser for the AJava subset.

The parser never aborts: a syntax error inside a statement turns the
enclosing statement into a hole node covering the offending token range,
and parsing resumes at the next ";" or "}".  Every token of a method body
ends up inside exactly one AST node or hole node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import CodeToken, TokenRole, TokenStream

TYPE_KEYWORDS = frozenset(
    ["int", "long", "short", "char", "boolean", "float", "double", "String"]
)

PREFIX_OPS = frozenset(["!", "++", "--", "-"])
POSTFIX_OPS = frozenset(["++", "--"])

# Binary precedence tiers, loosest first.
BINARY_TIERS = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)


@dataclass
class Node:
    start: int = -1  # token indices, inclusive
    end: int = -1


# --- expressions ---------------------------------------------------------


@dataclass
class Expr(Node):
    type: object = None  # TypeRef, set by the analyzer


@dataclass
class Literal(Expr):
    tok: int = -1


@dataclass
class Name(Expr):
    """Bare identifier; the analyzer classifies it as a local variable, an
    implicit-this field, or unknown."""

    tok: int = -1
    name: str = ""
    binding: str = "unknown"  # var | field | unknown
    decl_class: str | None = None  # declaring class when binding == field


@dataclass
class This(Expr):
    tok: int = -1


@dataclass
class FieldAccess(Expr):
    receiver: Expr | None = None
    name_tok: int = -1
    name: str = ""
    decl_class: str | None = None


@dataclass
class MethodCall(Expr):
    receiver: Expr | None = None  # None => implicit this
    name_tok: int = -1
    name: str = ""
    args: list[Expr] = field(default_factory=list)
    decl_class: str | None = None
    returns: object = None


@dataclass
class CtorCall(Expr):
    name_tok: int = -1
    class_name: str = ""
    args: list[Expr] = field(default_factory=list)


@dataclass
class Unary(Expr):
    op_tok: int = -1
    op: str = ""
    operand: Expr | None = None
    prefix: bool = True


@dataclass
class Binary(Expr):
    left: Expr | None = None
    op_tok: int = -1
    op: str = ""
    right: Expr | None = None


@dataclass
class Assign(Expr):
    target: Expr | None = None
    op_tok: int = -1
    value: Expr | None = None


@dataclass
class Paren(Expr):
    inner: Expr | None = None


# --- statements ----------------------------------------------------------


@dataclass
class Stmt(Node):
    pass


@dataclass
class VarDecl(Stmt):
    type_tok: int = -1
    type_name: str = ""
    name_tok: int = -1
    name: str = ""
    init: Expr | None = None


@dataclass
class ExprStmt(Stmt):
    expr: Expr | None = None


@dataclass
class IfStmt(Stmt):
    kw_tok: int = -1
    lp_tok: int = -1
    cond: Expr | None = None
    rp_tok: int = -1
    then: Stmt | None = None
    els: Stmt | None = None


@dataclass
class WhileStmt(Stmt):
    kw_tok: int = -1
    lp_tok: int = -1
    cond: Expr | None = None
    rp_tok: int = -1
    body: Stmt | None = None


@dataclass
class ForStmt(Stmt):
    kw_tok: int = -1
    lp_tok: int = -1
    init: Stmt | None = None  # VarDecl or ExprStmt without their own SEMI
    init_semi: int = -1
    cond: Expr | None = None
    cond_semi: int = -1
    update: Expr | None = None
    rp_tok: int = -1
    body: Stmt | None = None


@dataclass
class ReturnStmt(Stmt):
    kw_tok: int = -1
    expr: Expr | None = None


@dataclass
class Block(Stmt):
    stmts: list[Stmt] = field(default_factory=list)


@dataclass
class Hole(Stmt):
    """Statement-shaped region the parser could not understand."""


# --- declarations --------------------------------------------------------


@dataclass
class Param(Node):
    type_tok: int = -1
    type_name: str = ""
    name_tok: int = -1
    name: str = ""


@dataclass
class FieldDecl(Node):
    type_tok: int = -1
    type_name: str = ""
    name_tok: int = -1
    name: str = ""


@dataclass
class MethodDecl(Node):
    ret_tok: int = -1
    ret_name: str = ""
    name_tok: int = -1
    name: str = ""
    params: list[Param] = field(default_factory=list)
    body: Block | None = None
    body_start: int = -1  # first token after '{'
    body_end: int = -1  # token index of the matching '}' (exclusive bound)


@dataclass
class ClassDecl(Node):
    name_tok: int = -1
    name: str = ""
    fields: list[FieldDecl] = field(default_factory=list)
    methods: list[MethodDecl] = field(default_factory=list)


@dataclass
class ParseDiagnostic:
    message: str
    token_index: int


@dataclass
class PartialProgram:
    """Best-effort AST for one source file."""

    stream: TokenStream
    classes: list[ClassDecl] = field(default_factory=list)
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)

    @property
    def source_id(self) -> str:
        return self.stream.source_id


class _ParseError(Exception):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.message = message
        self.index = index


def parse_partial(stream: TokenStream) -> PartialProgram:
    """Parse one token stream into a maximal AST with hole recovery."""
    return _Parser(stream).parse()


class _Parser:
    def __init__(self, stream: TokenStream):
        self.toks = stream.tokens
        self.stream = stream
        self.pos = 0
        self.diags: list[ParseDiagnostic] = []

    # -- token helpers --

    def _at_end(self) -> bool:
        return self.pos >= len(self.toks)

    def _peek(self, offset: int = 0) -> CodeToken | None:
        i = self.pos + offset
        return self.toks[i] if i < len(self.toks) else None

    def _check(self, lexeme: str, offset: int = 0) -> bool:
        t = self._peek(offset)
        return t is not None and t.lexeme == lexeme

    def _advance(self) -> CodeToken:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def _expect(self, lexeme: str, what: str) -> int:
        if self._check(lexeme):
            i = self.pos
            self._advance()
            return i
        raise _ParseError(f"expected {lexeme!r} {what}", self.pos)

    def _error(self, message: str) -> _ParseError:
        return _ParseError(message, self.pos)

    # -- top level --

    def parse(self) -> PartialProgram:
        classes: list[ClassDecl] = []
        while not self._at_end():
            if self._check("class"):
                cls = self._parse_class()
                if cls is not None:
                    classes.append(cls)
            else:
                self.diags.append(
                    ParseDiagnostic("expected 'class' at top level", self.pos))
                self._advance()
        return PartialProgram(self.stream, classes, self.diags)

    def _parse_class(self) -> ClassDecl | None:
        start = self.pos
        self._advance()  # class
        t = self._peek()
        if t is None or t.role is not TokenRole.IDENTIFIER:
            self.diags.append(ParseDiagnostic("expected class name", self.pos))
            return None
        name_tok = self.pos
        self._advance()
        cls = ClassDecl(start=start, name_tok=name_tok, name=t.lexeme)
        try:
            self._expect("{", "to open class body")
        except _ParseError as e:
            self.diags.append(ParseDiagnostic(e.message, e.index))
            return cls
        while not self._at_end() and not self._check("}"):
            try:
                self._parse_member(cls)
            except _ParseError as e:
                self.diags.append(ParseDiagnostic(e.message, e.index))
                self._resync_member()
        if self._check("}"):
            self._advance()
        cls.end = self.pos - 1
        return cls

    def _resync_member(self) -> None:
        depth = 0
        while not self._at_end():
            lex = self._peek().lexeme
            if lex == "{":
                depth += 1
            elif lex == "}":
                if depth == 0:
                    return
                depth -= 1
            elif lex == ";" and depth == 0:
                self._advance()
                return
            self._advance()

    def _parse_member(self, cls: ClassDecl) -> None:
        start = self.pos
        type_tok = self._parse_type_token("member type")
        t = self._peek()
        if t is None or t.role is not TokenRole.IDENTIFIER:
            raise self._error("expected member name")
        name_tok = self.pos
        self._advance()
        if self._check("("):
            method = MethodDecl(
                start=start,
                ret_tok=type_tok,
                ret_name=self.toks[type_tok].lexeme,
                name_tok=name_tok,
                name=t.lexeme,
            )
            self._advance()  # (
            if not self._check(")"):
                while True:
                    ptype = self._parse_type_token("parameter type")
                    pt = self._peek()
                    if pt is None or pt.role is not TokenRole.IDENTIFIER:
                        raise self._error("expected parameter name")
                    pname_tok = self.pos
                    self._advance()
                    method.params.append(
                        Param(start=ptype, end=pname_tok, type_tok=ptype,
                              type_name=self.toks[ptype].lexeme,
                              name_tok=pname_tok, name=pt.lexeme))
                    if self._check(","):
                        self._advance()
                        continue
                    break
            self._expect(")", "after parameters")
            lb = self._expect("{", "to open method body")
            method.body_start = lb + 1
            method.body = self._parse_block_items(stop="}")
            method.body_end = self.pos
            self._expect("}", "to close method body")
            method.end = self.pos - 1
            cls.methods.append(method)
        else:
            semi = self._expect(";", "after field declaration")
            cls.fields.append(
                FieldDecl(start=start, end=semi, type_tok=type_tok,
                          type_name=self.toks[type_tok].lexeme,
                          name_tok=name_tok, name=t.lexeme))

    def _parse_type_token(self, what: str) -> int:
        t = self._peek()
        if t is None:
            raise self._error(f"expected {what}")
        if t.lexeme in TYPE_KEYWORDS or t.lexeme == "void" \
                or t.role is TokenRole.IDENTIFIER:
            i = self.pos
            self._advance()
            return i
        raise self._error(f"expected {what}")

    # -- statements --

    def _parse_block_items(self, stop: str) -> Block:
        block = Block(start=self.pos, stmts=[])
        while not self._at_end() and not self._check(stop):
            block.stmts.append(self._parse_statement_recovering())
        block.end = self.pos - 1
        return block

    def _parse_statement_recovering(self) -> Stmt:
        start = self.pos
        try:
            return self._parse_statement()
        except _ParseError as e:
            self.diags.append(ParseDiagnostic(e.message, e.index))
            # Consume through the next ';' at brace depth 0, or stop before '}'.
            depth = 0
            while not self._at_end():
                lex = self._peek().lexeme
                if lex == "{":
                    depth += 1
                elif lex == "}":
                    if depth == 0:
                        break
                    depth -= 1
                elif lex == ";" and depth == 0:
                    self._advance()
                    break
                self._advance()
            if self.pos == start:  # guarantee progress
                self._advance()
            return Hole(start=start, end=self.pos - 1)

    def _parse_statement(self) -> Stmt:
        t = self._peek()
        if t is None:
            raise self._error("unexpected end of input in statement")
        start = self.pos
        lex = t.lexeme
        if lex == "{":
            self._advance()
            block = self._parse_block_items(stop="}")
            self._expect("}", "to close block")
            block.start = start
            block.end = self.pos - 1
            return block
        if lex == "if":
            return self._parse_if(start)
        if lex == "while":
            return self._parse_while(start)
        if lex == "for":
            return self._parse_for(start)
        if lex == "return":
            self._advance()
            expr = None
            if not self._check(";"):
                expr = self._parse_expr()
            semi = self._expect(";", "after return")
            return ReturnStmt(start=start, end=semi, kw_tok=start, expr=expr)
        if self._looks_like_var_decl():
            return self._parse_var_decl(start)
        expr = self._parse_expr()
        semi = self._expect(";", "after expression")
        return ExprStmt(start=start, end=semi, expr=expr)

    def _looks_like_var_decl(self) -> bool:
        t = self._peek()
        nxt = self._peek(1)
        if t is None or nxt is None:
            return False
        is_type = t.lexeme in TYPE_KEYWORDS or t.role is TokenRole.IDENTIFIER
        return is_type and nxt.role is TokenRole.IDENTIFIER

    def _parse_var_decl(self, start: int, need_semi: bool = True) -> VarDecl:
        type_tok = self.pos
        self._advance()
        name_tok = self.pos
        name = self._advance().lexeme
        init = None
        if self._check("="):
            self._advance()
            init = self._parse_expr()
        end = self.pos - 1
        if need_semi:
            end = self._expect(";", "after variable declaration")
        return VarDecl(start=start, end=end, type_tok=type_tok,
                       type_name=self.toks[type_tok].lexeme,
                       name_tok=name_tok, name=name, init=init)

    def _parse_if(self, start: int) -> IfStmt:
        self._advance()
        lp = self._expect("(", "after 'if'")
        cond = self._parse_expr()
        rp = self._expect(")", "after condition")
        then = self._parse_statement_recovering()
        els = None
        if self._check("else"):
            self._advance()
            els = self._parse_statement_recovering()
        node = IfStmt(start=start, kw_tok=start, lp_tok=lp, cond=cond,
                      rp_tok=rp, then=then, els=els)
        node.end = self.pos - 1
        return node

    def _parse_while(self, start: int) -> WhileStmt:
        self._advance()
        lp = self._expect("(", "after 'while'")
        cond = self._parse_expr()
        rp = self._expect(")", "after condition")
        body = self._parse_statement_recovering()
        node = WhileStmt(start=start, kw_tok=start, lp_tok=lp, cond=cond,
                         rp_tok=rp, body=body)
        node.end = self.pos - 1
        return node

    def _parse_for(self, start: int) -> ForStmt:
        self._advance()
        lp = self._expect("(", "after 'for'")
        init: Stmt | None = None
        if not self._check(";"):
            if self._looks_like_var_decl():
                init = self._parse_var_decl(self.pos, need_semi=False)
            else:
                e = self._parse_expr()
                init = ExprStmt(start=e.start, end=e.end, expr=e)
        init_semi = self._expect(";", "after for-init")
        cond = None
        if not self._check(";"):
            cond = self._parse_expr()
        cond_semi = self._expect(";", "after for-condition")
        update = None
        if not self._check(")"):
            update = self._parse_expr()
        rp = self._expect(")", "after for-update")
        body = self._parse_statement_recovering()
        node = ForStmt(start=start, kw_tok=start, lp_tok=lp, init=init,
                       init_semi=init_semi, cond=cond, cond_semi=cond_semi,
                       update=update, rp_tok=rp, body=body)
        node.end = self.pos - 1
        return node

    # -- expressions --

    def _parse_expr(self) -> Expr:
        return self._parse_assign()

    def _parse_assign(self) -> Expr:
        left = self._parse_binary(0)
        if self._check("="):
            if not isinstance(left, (Name, FieldAccess)):
                raise self._error("invalid assignment target")
            op_tok = self.pos
            self._advance()
            value = self._parse_assign()
            return Assign(start=left.start, end=value.end, target=left,
                          op_tok=op_tok, value=value)
        return left

    def _parse_binary(self, tier: int) -> Expr:
        if tier >= len(BINARY_TIERS):
            return self._parse_unary()
        ops = BINARY_TIERS[tier]
        left = self._parse_binary(tier + 1)
        while True:
            t = self._peek()
            if t is None or t.role is not TokenRole.OPERATOR or t.lexeme not in ops:
                return left
            op_tok = self.pos
            self._advance()
            right = self._parse_binary(tier + 1)
            left = Binary(start=left.start, end=right.end, left=left,
                          op_tok=op_tok, op=t.lexeme, right=right)

    def _parse_unary(self) -> Expr:
        t = self._peek()
        if t is not None and t.role is TokenRole.OPERATOR and t.lexeme in PREFIX_OPS:
            op_tok = self.pos
            self._advance()
            operand = self._parse_unary()
            return Unary(start=op_tok, end=operand.end, op_tok=op_tok,
                         op=t.lexeme, operand=operand, prefix=True)
        return self._parse_postfix()

    def _parse_postfix(self) -> Expr:
        expr = self._parse_primary()
        while True:
            t = self._peek()
            if t is None or t.role is not TokenRole.OPERATOR:
                return expr
            if t.lexeme in POSTFIX_OPS:
                op_tok = self.pos
                self._advance()
                expr = Unary(start=expr.start, end=op_tok, op_tok=op_tok,
                             op=t.lexeme, operand=expr, prefix=False)
                continue
            if t.lexeme == ".":
                self._advance()
                nt = self._peek()
                if nt is None or nt.role is not TokenRole.IDENTIFIER:
                    raise self._error("expected member name after '.'")
                name_tok = self.pos
                self._advance()
                if self._check("("):
                    self._advance()
                    args = self._parse_args()
                    rp = self._expect(")", "after arguments")
                    expr = MethodCall(start=expr.start, end=rp, receiver=expr,
                                      name_tok=name_tok, name=nt.lexeme,
                                      args=args)
                else:
                    expr = FieldAccess(start=expr.start, end=name_tok,
                                       receiver=expr, name_tok=name_tok,
                                       name=nt.lexeme)
                continue
            return expr

    def _parse_args(self) -> list[Expr]:
        args: list[Expr] = []
        if self._check(")"):
            return args
        while True:
            args.append(self._parse_expr())
            if self._check(","):
                self._advance()
                continue
            return args

    def _parse_primary(self) -> Expr:
        t = self._peek()
        if t is None:
            raise self._error("unexpected end of input in expression")
        start = self.pos
        if t.role is TokenRole.LITERAL:
            self._advance()
            return Literal(start=start, end=start, tok=start)
        if t.lexeme == "this":
            self._advance()
            return This(start=start, end=start, tok=start)
        if t.lexeme == "new":
            self._advance()
            ct = self._peek()
            if ct is None or ct.role is not TokenRole.IDENTIFIER:
                raise self._error("expected class name after 'new'")
            name_tok = self.pos
            self._advance()
            self._expect("(", "after constructor name")
            args = self._parse_args()
            rp = self._expect(")", "after constructor arguments")
            return CtorCall(start=start, end=rp, name_tok=name_tok,
                            class_name=ct.lexeme, args=args)
        if t.lexeme == "(":
            self._advance()
            inner = self._parse_expr()
            rp = self._expect(")", "to close parenthesized expression")
            return Paren(start=start, end=rp, inner=inner)
        if t.role is TokenRole.IDENTIFIER:
            self._advance()
            if self._check("("):
                self._advance()
                args = self._parse_args()
                rp = self._expect(")", "after arguments")
                return MethodCall(start=start, end=rp, receiver=None,
                                  name_tok=start, name=t.lexeme, args=args)
            return Name(start=start, end=start, tok=start, name=t.lexeme)
        raise self._error(f"unexpected token {t.lexeme!r} in expression")
