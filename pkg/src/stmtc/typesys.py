"""Type references, the project class index, and the subtype relation.

Types are either primitives, named classes from the index, ``void``, or
``Unknown``.  Unknown stands in for anything the best-effort analyzer could
not resolve; the subtype relation itself never accepts Unknown (callers
decide how permissive to be).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class TypeKind(enum.Enum):
    PRIMITIVE = "primitive"
    CLASS = "class"
    UNKNOWN = "unknown"
    VOID = "void"


PRIMITIVES = frozenset(["int", "long", "short", "char", "boolean", "float", "double"])

# Widening chain; boolean deliberately has no numeric relation.
NUMERIC_ORDER = ("char", "short", "int", "long", "float", "double")


@dataclass(frozen=True)
class TypeRef:
    kind: TypeKind
    name: str | None = None

    @staticmethod
    def primitive(name: str) -> "TypeRef":
        if name not in PRIMITIVES:
            raise ValueError(f"not a primitive: {name}")
        return TypeRef(TypeKind.PRIMITIVE, name)

    @staticmethod
    def cls(name: str) -> "TypeRef":
        return TypeRef(TypeKind.CLASS, name)

    def render(self) -> str:
        if self.kind is TypeKind.UNKNOWN:
            return "Unk"
        if self.kind is TypeKind.VOID:
            return "void"
        return self.name or "?"

    @property
    def is_unknown(self) -> bool:
        return self.kind is TypeKind.UNKNOWN

    @property
    def is_numeric(self) -> bool:
        return self.kind is TypeKind.PRIMITIVE and self.name in NUMERIC_ORDER


UNKNOWN = TypeRef(TypeKind.UNKNOWN)
VOID = TypeRef(TypeKind.VOID)
INT = TypeRef.primitive("int")
BOOLEAN = TypeRef.primitive("boolean")


@dataclass
class MethodSig:
    name: str
    params: list[TypeRef]
    returns: TypeRef

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass
class ClassInfo:
    name: str
    supertype: str | None = None
    fields: dict[str, TypeRef] = field(default_factory=dict)
    methods: dict[tuple[str, int], MethodSig] = field(default_factory=dict)


@dataclass
class ClassIndex:
    """Project-wide class declarations (source classes merged with stubs)."""

    classes: dict[str, ClassInfo] = field(default_factory=dict)

    def resolve_name(self, name: str) -> TypeRef:
        """Map a type name to a TypeRef; unresolvable class names collapse
        to Unknown."""
        if name in PRIMITIVES:
            return TypeRef.primitive(name)
        if name == "void":
            return VOID
        if name in self.classes:
            return TypeRef.cls(name)
        return UNKNOWN

    def supertype_chain(self, name: str) -> list[str]:
        """Names from ``name`` upward, cycle-guarded."""
        chain: list[str] = []
        seen: set[str] = set()
        cur: str | None = name
        while cur is not None and cur in self.classes and cur not in seen:
            chain.append(cur)
            seen.add(cur)
            cur = self.classes[cur].supertype
        return chain

    def find_field(self, class_name: str, field_name: str):
        """Return (declaring class name, field type) or None."""
        for cname in self.supertype_chain(class_name):
            info = self.classes[cname]
            if field_name in info.fields:
                return cname, info.fields[field_name]
        return None

    def find_method(self, class_name: str, method_name: str, arity: int):
        """Return (declaring class name, MethodSig) or None."""
        for cname in self.supertype_chain(class_name):
            info = self.classes[cname]
            sig = info.methods.get((method_name, arity))
            if sig is not None:
                return cname, sig
        return None

    def members_of(self, class_name: str):
        """All (declaring class, field/method entries) visible on a class."""
        fields: dict[str, tuple[str, TypeRef]] = {}
        methods: dict[tuple[str, int], tuple[str, MethodSig]] = {}
        for cname in reversed(self.supertype_chain(class_name)):
            info = self.classes[cname]
            for fname, ftype in info.fields.items():
                fields[fname] = (cname, ftype)
            for key, sig in info.methods.items():
                methods[key] = (cname, sig)
        return fields, methods


def is_subtype(sub: TypeRef, sup: TypeRef, index: ClassIndex) -> bool:
    """Reflexive subtype check with numeric widening and supertype chains.

    Unknown is handled by callers, never here: is_subtype(Unknown, _) and
    is_subtype(_, Unknown) are both False.
    """
    if sub.is_unknown or sup.is_unknown:
        return False
    if sub == sup:
        return True
    if sub.kind is TypeKind.PRIMITIVE and sup.kind is TypeKind.PRIMITIVE:
        if sub.name in NUMERIC_ORDER and sup.name in NUMERIC_ORDER:
            return NUMERIC_ORDER.index(sub.name) <= NUMERIC_ORDER.index(sup.name)
        return False
    if sub.kind is TypeKind.CLASS and sup.kind is TypeKind.CLASS:
        return sup.name in index.supertype_chain(sub.name)
    return False


def numeric_join(a: TypeRef, b: TypeRef) -> TypeRef | None:
    """The wider of two numeric types, or None if either is not numeric."""
    if not (a.is_numeric and b.is_numeric):
        return None
    ia = NUMERIC_ORDER.index(a.name)
    ib = NUMERIC_ORDER.index(b.name)
    return a if ia >= ib else b


class StubFormatError(Exception):
    pass


def parse_stub_text(text: str, origin: str = "<stub>") -> list[ClassInfo]:
    """Parse the line-oriented stub format.

    ::

        class <Name> [extends <Name>]
          field <name> : <Type>
          method <name>(<Type>,...) : <ReturnType>

    Type names are kept as raw strings at this stage; the index builder
    resolves them once every class is registered.
    """
    classes: list[ClassInfo] = []
    raw_members: list[tuple[ClassInfo, str]] = []
    current: ClassInfo | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        words = stripped.split()
        if words[0] == "class":
            if len(words) == 2:
                current = ClassInfo(words[1])
            elif len(words) == 4 and words[2] == "extends":
                current = ClassInfo(words[1], supertype=words[3])
            else:
                raise StubFormatError(f"{origin}:{lineno}: bad class line")
            classes.append(current)
        elif words[0] in ("field", "method"):
            if current is None:
                raise StubFormatError(f"{origin}:{lineno}: member before class")
            raw_members.append((current, stripped))
        else:
            raise StubFormatError(f"{origin}:{lineno}: unrecognized line")
    for info, line in raw_members:
        _parse_stub_member(info, line, origin)
    return classes


def _parse_stub_member(info: ClassInfo, line: str, origin: str) -> None:
    kind, rest = line.split(None, 1)
    if kind == "field":
        name_part, _, type_part = rest.partition(":")
        name = name_part.strip()
        tname = type_part.strip()
        if not name or not tname:
            raise StubFormatError(f"{origin}: bad field line: {line}")
        info.fields[name] = _raw_type(tname)
    else:
        head, _, ret_part = rest.partition(":")
        head = head.strip()
        if "(" not in head or not head.endswith(")"):
            raise StubFormatError(f"{origin}: bad method line: {line}")
        name, _, params_part = head.partition("(")
        name = name.strip()
        params_part = params_part[:-1].strip()
        params = [
            _raw_type(p.strip()) for p in params_part.split(",") if p.strip()
        ]
        ret = _raw_type(ret_part.strip())
        info.methods[(name, len(params))] = MethodSig(name, params, ret)


def _raw_type(name: str) -> TypeRef:
    # Placeholder Class ref; resolved (or collapsed to Unknown) during
    # index finalization.
    if name in PRIMITIVES:
        return TypeRef.primitive(name)
    if name == "void":
        return VOID
    return TypeRef.cls(name)


# Minimal built-in signatures for String; always merged into the index so
# string-typed expressions have members to resolve against.
BUILTIN_STUBS = """\
class String
  method length() : int
  method substring(int) : String
"""
