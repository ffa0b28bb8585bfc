"""Lexer for the AJava subset language.

Produces role-tagged code tokens with exact source spans, recovers from
lexical errors, and splits identifiers into normalized subtokens for the
lexical language model.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class TokenRole(enum.Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    LITERAL = "literal"
    SEPARATOR = "separator"
    OPERATOR = "operator"


class LiteralKind(enum.Enum):
    INT = "int"
    LONG = "long"
    FLOAT = "float"
    DOUBLE = "double"
    CHAR = "char"
    STRING = "String"
    BOOLEAN = "boolean"
    NULL = "null"


# Reserved words that tag tokens with the KEYWORD role.  true/false/null are
# reserved too (they can never be identifiers) but lex as literals so that
# downstream literal typing has a kind for them.
KEYWORDS = frozenset(
    [
        "class", "int", "long", "short", "char", "boolean", "float",
        "double", "String", "void", "if", "else", "while", "for",
        "return", "new", "this",
    ]
)

LITERAL_WORDS = {"true": LiteralKind.BOOLEAN, "false": LiteralKind.BOOLEAN,
                 "null": LiteralKind.NULL}

PRIMITIVE_TYPE_KEYWORDS = frozenset(
    ["int", "long", "short", "char", "boolean", "float", "double"]
)

SEPARATORS = frozenset("(){}[];,")

# Multi-character operators first so the scanner can maximal-munch.
TWO_CHAR_OPERATORS = frozenset(["==", "!=", "<=", ">=", "&&", "||", "++", "--"])
ONE_CHAR_OPERATORS = frozenset(["=", "<", ">", "+", "-", "*", "/", "%", "!", "."])


@dataclass(frozen=True)
class CodeToken:
    """One lexical token: lexeme, role and exact source span.

    The span is a half-open (start, end) pair of offsets into the source
    text; ``source[start:end] == lexeme`` always holds.  ``literal_kind``
    is present exactly when ``role`` is LITERAL.
    """

    lexeme: str
    role: TokenRole
    span: tuple[int, int]
    literal_kind: LiteralKind | None = None


@dataclass(frozen=True)
class LexDiagnostic:
    kind: str  # UnterminatedString | UnterminatedComment | IllegalCharacter
    span: tuple[int, int]
    message: str


@dataclass
class TokenStream:
    """Ordered token list for one source file plus lexical diagnostics."""

    tokens: list[CodeToken]
    source_id: str
    source: str = ""
    errors: list[LexDiagnostic] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]


def tokenize(source: str, source_id: str = "<memory>") -> TokenStream:
    """Tokenize AJava source text.

    Comments and whitespace are dropped.  Lexical errors are recorded as
    diagnostics and scanning continues, so a stream is always produced.
    """
    tokens: list[CodeToken] = []
    errors: list[LexDiagnostic] = []
    pos = 0
    n = len(source)

    def err(kind: str, start: int, end: int, message: str) -> None:
        errors.append(LexDiagnostic(kind, (start, end), message))

    while pos < n:
        ch = source[pos]
        if ch in " \t\r\n":
            pos += 1
            continue
        if ch == "/" and pos + 1 < n and source[pos + 1] == "/":
            while pos < n and source[pos] != "\n":
                pos += 1
            continue
        if ch == "/" and pos + 1 < n and source[pos + 1] == "*":
            start = pos
            pos += 2
            closed = False
            while pos + 1 < n:
                if source[pos] == "*" and source[pos + 1] == "/":
                    pos += 2
                    closed = True
                    break
                pos += 1
            if not closed:
                pos = n
                err("UnterminatedComment", start, n, "unterminated block comment")
            continue
        if ch == '"':
            tok, pos = _scan_string(source, pos, err)
            if tok is not None:
                tokens.append(tok)
            continue
        if ch == "'":
            tok, pos = _scan_char(source, pos, err)
            if tok is not None:
                tokens.append(tok)
            continue
        if ch.isdigit():
            tok, pos = _scan_number(source, pos)
            tokens.append(tok)
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < n and (source[pos].isalnum() or source[pos] == "_"):
                pos += 1
            word = source[start:pos]
            if word in LITERAL_WORDS:
                tokens.append(CodeToken(word, TokenRole.LITERAL, (start, pos),
                                        LITERAL_WORDS[word]))
            elif word in KEYWORDS:
                tokens.append(CodeToken(word, TokenRole.KEYWORD, (start, pos)))
            else:
                tokens.append(CodeToken(word, TokenRole.IDENTIFIER, (start, pos)))
            continue
        two = source[pos:pos + 2]
        if two in TWO_CHAR_OPERATORS:
            tokens.append(CodeToken(two, TokenRole.OPERATOR, (pos, pos + 2)))
            pos += 2
            continue
        if ch in ONE_CHAR_OPERATORS:
            tokens.append(CodeToken(ch, TokenRole.OPERATOR, (pos, pos + 1)))
            pos += 1
            continue
        if ch in SEPARATORS:
            tokens.append(CodeToken(ch, TokenRole.SEPARATOR, (pos, pos + 1)))
            pos += 1
            continue
        err("IllegalCharacter", pos, pos + 1, f"illegal character {ch!r}")
        pos += 1

    return TokenStream(tokens, source_id, source, errors)


def _scan_string(source, pos, err):
    start = pos
    pos += 1
    n = len(source)
    while pos < n:
        ch = source[pos]
        if ch == "\\" and pos + 1 < n:
            pos += 2
            continue
        if ch == '"':
            pos += 1
            return (CodeToken(source[start:pos], TokenRole.LITERAL,
                              (start, pos), LiteralKind.STRING), pos)
        if ch == "\n":
            break
        pos += 1
    err("UnterminatedString", start, pos, "unterminated string literal")
    return None, pos


def _scan_char(source, pos, err):
    start = pos
    pos += 1
    n = len(source)
    if pos < n and source[pos] == "\\":
        pos += 2
    elif pos < n and source[pos] != "'":
        pos += 1
    if pos < n and source[pos] == "'":
        pos += 1
        return (CodeToken(source[start:pos], TokenRole.LITERAL,
                          (start, pos), LiteralKind.CHAR), pos)
    err("UnterminatedString", start, min(pos, n), "unterminated char literal")
    return None, min(pos, n)


def _scan_number(source, pos):
    # Decimal only; kind inferred from suffix or decimal point.
    start = pos
    n = len(source)
    while pos < n and source[pos].isdigit():
        pos += 1
    kind = LiteralKind.INT
    if pos + 1 < n and source[pos] == "." and source[pos + 1].isdigit():
        pos += 1
        while pos < n and source[pos].isdigit():
            pos += 1
        kind = LiteralKind.DOUBLE
    if pos < n and source[pos] in "lL":
        pos += 1
        kind = LiteralKind.LONG
    elif pos < n and source[pos] in "fF":
        pos += 1
        kind = LiteralKind.FLOAT
    elif pos < n and source[pos] in "dD":
        pos += 1
        kind = LiteralKind.DOUBLE
    return CodeToken(source[start:pos], TokenRole.LITERAL, (start, pos), kind), pos


def split_subtokens(identifier: str) -> list[str]:
    """Split an identifier at camel-case, digit and underscore boundaries.

    Pieces come back lowercased, in order, never empty.  The Hungarian
    convention (short lowercase prefix before an uppercase letter, e.g.
    ``strName``) is covered by the lowercase-to-uppercase boundary rule.
    """
    pieces: list[str] = []
    cur = ""
    for ch in identifier:
        if ch == "_":
            if cur:
                pieces.append(cur)
            cur = ""
            continue
        if cur and ((cur[-1].islower() and ch.isupper())
                    or (cur[-1].isdigit() != ch.isdigit())):
            pieces.append(cur)
            cur = ""
        cur += ch
    if cur:
        pieces.append(cur)
    return [p.lower() for p in pieces]
