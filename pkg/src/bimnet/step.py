"""ISO 10303-21 (STEP physical file) tokenizer, parser and writer.

Attribute values map onto plain Python objects where that is unambiguous:

    $            -> None
    *            -> DERIVED
    integers     -> int
    reals        -> float
    strings      -> str (escapes decoded)
    .T. / .F.    -> bool
    other enums  -> EnumValue (a str subclass)
    #N           -> Ref(N)
    ( ... )      -> tuple
    NAME(v)      -> Typed(NAME, v)

No EXPRESS schema is consulted; downstream code reads attributes positionally.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Iterator, NamedTuple


class StepError(ValueError):
    """Base class for parse failures. ``offset`` is a character offset into the source."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)


class StepSyntaxError(StepError):
    pass


class UnterminatedString(StepError):
    pass


class BadEscape(StepError):
    pass


class MissingSection(StepError):
    pass


class DuplicateId(StepError):
    def __init__(self, entity_id: int, first_offset: int, second_offset: int):
        self.entity_id = entity_id
        self.first_offset = first_offset
        self.second_offset = second_offset
        super().__init__(
            f"#{entity_id} defined twice (offsets {first_offset} and {second_offset})",
            second_offset,
        )


class DanglingRef(StepError):
    def __init__(self, missing: list[int]):
        self.missing = missing
        shown = ", ".join(f"#{i}" for i in missing[:10])
        more = f" and {len(missing) - 10} more" if len(missing) > 10 else ""
        super().__init__(f"unresolved references: {shown}{more}")


class NoSuchEntity(KeyError):
    pass


class IndexOutOfRange(IndexError):
    pass


# --------------------------------------------------------------------------
# attribute values
# --------------------------------------------------------------------------


class EnumValue(str):
    """An enumeration literal such as ``.NOTDEFINED.``, stored without dots."""

    __slots__ = ()

    def __repr__(self) -> str:
        return f"EnumValue({str.__repr__(self)})"


class Binary(str):
    """A binary literal, kept as its hex text (including the leading pad digit)."""

    __slots__ = ()


class _Derived:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DERIVED"

    def __reduce__(self):
        return (_Derived, ())


DERIVED = _Derived()


@dataclass(frozen=True, slots=True)
class Ref:
    id: int

    def __post_init__(self):
        if self.id <= 0:
            raise ValueError(f"entity reference must be positive, got {self.id}")

    def __repr__(self) -> str:
        return f"#{self.id}"


@dataclass(frozen=True, slots=True)
class Typed:
    """A defined-type wrapper, e.g. ``IFCLENGTHMEASURE(3.)``."""

    name: str
    value: Any


def unwrap(value: Any) -> Any:
    while isinstance(value, Typed):
        value = value.value
    return value


@dataclass(frozen=True, slots=True)
class EntityInstance:
    id: int
    type_name: str
    attrs: tuple

    def __getitem__(self, index: int) -> Any:
        return self.attrs[index]

    def __len__(self) -> int:
        return len(self.attrs)


@dataclass(eq=False)
class EntityTable:
    entities: dict[int, EntityInstance]
    schema_name: str = ""
    by_type: dict[str, list[int]] = field(default_factory=dict)
    dangling: list[int] = field(default_factory=list)
    header: tuple = ()
    # derived indexes memoised by downstream modules; not part of identity
    cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_entities(cls, entities, schema_name="", dangling=(), header=()):
        by_type: dict[str, list[int]] = {}
        for eid in sorted(entities):
            by_type.setdefault(entities[eid].type_name, []).append(eid)
        return cls(dict(entities), schema_name, by_type, sorted(dangling), tuple(header))

    @property
    def partially_resolved(self) -> bool:
        return bool(self.dangling)

    def __len__(self) -> int:
        return len(self.entities)

    def __contains__(self, eid: int) -> bool:
        return eid in self.entities

    def __getitem__(self, eid) -> EntityInstance:
        if isinstance(eid, Ref):
            eid = eid.id
        try:
            return self.entities[eid]
        except KeyError:
            raise NoSuchEntity(eid) from None

    def get(self, ref) -> EntityInstance | None:
        if isinstance(ref, Ref):
            ref = ref.id
        if not isinstance(ref, int):
            return None
        return self.entities.get(ref)

    def of_type(self, *type_names: str) -> list[EntityInstance]:
        ids: list[int] = []
        for name in type_names:
            ids.extend(self.by_type.get(name.upper(), ()))
        return [self.entities[i] for i in sorted(ids)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EntityTable):
            return NotImplemented
        return self.schema_name == other.schema_name and self.entities == other.entities


def get_attr(table: EntityTable, entity_id: int, index: int, unwrapped: bool = False) -> Any:
    inst = table[entity_id]
    if not 0 <= index < len(inst.attrs):
        raise IndexOutOfRange(
            f"#{entity_id} ({inst.type_name}) has {len(inst.attrs)} attributes, index {index} requested"
        )
    value = inst.attrs[index]
    return unwrap(value) if unwrapped else value


# --------------------------------------------------------------------------
# tokenizer
# --------------------------------------------------------------------------


class Token(NamedTuple):
    kind: str
    value: Any
    offset: int


ID, KEYWORD, STRING, ENUM, REAL, INTEGER, BINARY, PUNCT, UNSET, DERIVED_TOKEN = (
    "ID", "KEYWORD", "STRING", "ENUM", "REAL", "INTEGER", "BINARY", "PUNCT", "UNSET", "DERIVED",
)

_TOKEN_RE = re.compile(
    r"""
     (?P<ws>\s+|/\*.*?\*/)
    |(?P<id>\#\d+)
    |(?P<real>[+-]?\d+(?:\.\d*(?:[Ee][+-]?\d+)?|[Ee][+-]?\d+))
    |(?P<int>[+-]?\d+)
    |(?P<str>'[^']*(?:''[^']*)*')
    |(?P<enum>\.[A-Za-z_][A-Za-z0-9_]*\.)
    |(?P<kw>!?[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)
    |(?P<bin>"[0-3][0-9A-Fa-f]*")
    |(?P<punct>[=(),;])
    |(?P<unset>\$)
    |(?P<derived>\*)
    |(?P<bad>.)
    """,
    re.S | re.X,
)

_ESCAPE_RE = re.compile(r"\\(?:X2\\((?:[0-9A-Fa-f]{4})*)\\X0\\|X4\\((?:[0-9A-Fa-f]{8})*)\\X0\\|X\\([0-9A-Fa-f]{2})|S\\(.)|P[A-I]\\|\\|(X))", re.S)


def _decode_escapes(raw: str, offset: int) -> str:
    def repl(m: re.Match) -> str:
        if m.group(1) is not None:
            h = m.group(1)
            return "".join(chr(int(h[i:i + 4], 16)) for i in range(0, len(h), 4))
        if m.group(2) is not None:
            h = m.group(2)
            return "".join(chr(int(h[i:i + 8], 16)) for i in range(0, len(h), 8))
        if m.group(3) is not None:
            return chr(int(m.group(3), 16))
        if m.group(4) is not None:
            return chr(ord(m.group(4)) + 128)
        if m.group(5) is not None:
            raise BadEscape("malformed \\X escape", offset + m.start())
        if m.group(0) == "\\\\":
            return "\\"
        return ""  # \PA\ .. \PI\ code page switches

    return _ESCAPE_RE.sub(repl, raw)


def _decode_string(lexeme: str, offset: int) -> str:
    body = lexeme[1:-1].replace("''", "'")
    if "\\" in body:
        body = _decode_escapes(body, offset + 1)
    return body


def _scan(text: str) -> list[tuple]:
    """Token triples ``(kind, value, offset)``; the hot path of the parser."""
    out: list[tuple] = []
    append = out.append
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        # branches ordered by frequency in typical files
        if kind == "punct":
            append((PUNCT, m.group(), m.start()))
        elif kind == "real":
            append((REAL, float(m.group()), m.start()))
        elif kind == "id":
            append((ID, int(m.group()[1:]), m.start()))
        elif kind == "ws":
            continue
        elif kind == "unset":
            append((UNSET, None, m.start()))
        elif kind == "kw":
            append((KEYWORD, m.group().upper(), m.start()))
        elif kind == "enum":
            append((ENUM, m.group()[1:-1].upper(), m.start()))
        elif kind == "str":
            pos = m.start()
            append((STRING, _decode_string(m.group(), pos), pos))
        elif kind == "int":
            append((INTEGER, int(m.group()), m.start()))
        elif kind == "derived":
            append((DERIVED_TOKEN, DERIVED, m.start()))
        elif kind == "bin":
            append((BINARY, m.group()[1:-1], m.start()))
        else:
            pos, lex = m.start(), m.group()
            if lex == "'":
                raise UnterminatedString("string runs to end of input", pos)
            if text.startswith("/*", pos):
                raise StepSyntaxError("unterminated comment", pos)
            raise StepSyntaxError(f"unexpected character {lex!r}", pos)
    return out


def tokenize(text: str) -> Iterator[Token]:
    """Tokens of a STEP source; whitespace and comments are dropped."""
    return map(Token._make, _scan(text))


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

_SCALAR_KINDS = {STRING, REAL, INTEGER, UNSET, DERIVED_TOKEN}


def _enum_value(name: str):
    if name == "T":
        return True
    if name == "F":
        return False
    return EnumValue(name)


class _Parser:
    def __init__(self, text: str):
        self.tokens = _scan(text)
        self.pos = 0
        self.refs: set[int] = set()

    def _peek(self) -> tuple | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self) -> tuple:
        if self.pos >= len(self.tokens):
            end = self.tokens[-1][2] if self.tokens else 0
            raise StepSyntaxError("unexpected end of input", end)
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _expect(self, value: str) -> tuple:
        tok = self._next()
        if tok[0] not in (PUNCT, KEYWORD) or tok[1] != value:
            raise StepSyntaxError(f"expected {value!r}, found {tok[1]!r}", tok[2])
        return tok

    def _keyword(self, name: str) -> None:
        tok = self._next()
        if tok[0] != KEYWORD or tok[1] != name:
            raise StepSyntaxError(f"expected {name}, found {tok[1]!r}", tok[2])

    def parse_list(self) -> tuple:
        """Parse ``( v, v, ... )``; the opening parenthesis is already consumed."""
        tokens = self.tokens
        refs = self.refs
        stack: list[list] = [[]]
        typed: list[str | None] = [None]
        expect_value = True
        while True:
            if self.pos >= len(tokens):
                raise StepSyntaxError("unexpected end of input inside attribute list",
                                      tokens[-1][2] if tokens else 0)
            kind, value, offset = tokens[self.pos]
            self.pos += 1
            cur = stack[-1]
            if kind == PUNCT:
                if value == ")":
                    done = stack.pop()
                    name = typed.pop()
                    if not stack:
                        return tuple(done)
                    if name is None:
                        stack[-1].append(tuple(done))
                    else:
                        if len(done) != 1:
                            raise StepSyntaxError(f"typed parameter {name} takes one value", offset)
                        stack[-1].append(Typed(name, done[0]))
                    expect_value = False
                    continue
                if value == "," and not expect_value:
                    expect_value = True
                    continue
                if value == "(" and expect_value:
                    stack.append([])
                    typed.append(None)
                    continue
                raise StepSyntaxError(f"unexpected {value!r}", offset)
            if not expect_value:
                raise StepSyntaxError(f"missing ',' before {value!r}", offset)
            if kind in _SCALAR_KINDS:
                cur.append(value)
            elif kind == ID:
                if value <= 0:
                    raise StepSyntaxError("entity ids must be positive", offset)
                refs.add(value)
                cur.append(Ref(value))
            elif kind == ENUM:
                cur.append(_enum_value(value))
            elif kind == KEYWORD:
                nxt = self._next()
                if nxt[0] != PUNCT or nxt[1] != "(":
                    raise StepSyntaxError(f"expected '(' after {value}", nxt[2])
                stack.append([])
                typed.append(value)
                continue
            elif kind == BINARY:
                cur.append(Binary(value))
            else:  # pragma: no cover - tokenizer emits no other kinds
                raise StepSyntaxError(f"unexpected token {value!r}", offset)
            expect_value = False

    def parse_record_body(self) -> tuple[str, tuple]:
        tok = self._next()
        if tok[0] == KEYWORD:
            self._expect("(")
            return tok[1], self.parse_list()
        if tok[0] == PUNCT and tok[1] == "(":
            # complex entity instance: ( A(...) B(...) )
            parts = []
            while True:
                t = self._next()
                if t[0] == PUNCT and t[1] == ")":
                    break
                if t[0] != KEYWORD:
                    raise StepSyntaxError("expected partial entity name", t[2])
                self._expect("(")
                parts.append(Typed(t[1], self.parse_list()))
            return "", tuple(parts)
        raise StepSyntaxError(f"expected entity type, found {tok[1]!r}", tok[2])

    def parse(self, strict_refs: bool) -> EntityTable:
        self._keyword("ISO-10303-21")
        self._expect(";")
        self._keyword("HEADER")
        self._expect(";")
        header = []
        while True:
            tok = self._peek()
            if tok is None:
                raise MissingSection("HEADER section not terminated", self.tokens[-1][2])
            if tok[0] == KEYWORD and tok[1] == "ENDSEC":
                self.pos += 1
                self._expect(";")
                break
            name, args = self.parse_record_body()
            self._expect(";")
            header.append(Typed(name, args))

        schema = ""
        for rec in header:
            if rec.name == "FILE_SCHEMA" and rec.value:
                names = rec.value[0]
                if isinstance(names, tuple) and names:
                    schema = str(names[0])
                elif isinstance(names, str):
                    schema = names

        entities: dict[int, EntityInstance] = {}
        offsets: dict[int, int] = {}
        saw_data = False
        while True:
            tok = self._peek()
            if tok is None:
                break
            if tok[0] == KEYWORD and tok[1] == "END-ISO-10303-21":
                self.pos += 1
                self._expect(";")
                break
            if tok[0] != KEYWORD or tok[1] != "DATA":
                raise StepSyntaxError(f"expected DATA section, found {tok[1]!r}", tok[2])
            self.pos += 1
            # DATA may carry a parameter list in edition 3 files
            if self._peek() is not None and self._peek()[1] == "(":
                self.pos += 1
                self.parse_list()
            self._expect(";")
            saw_data = True
            while True:
                tok = self._next()
                if tok[0] == KEYWORD and tok[1] == "ENDSEC":
                    self._expect(";")
                    break
                if tok[0] != ID:
                    raise StepSyntaxError(f"expected entity id, found {tok[1]!r}", tok[2])
                eid = tok[1]
                if eid <= 0:
                    raise StepSyntaxError("entity ids must be positive", tok[2])
                self._expect("=")
                type_name, attrs = self.parse_record_body()
                self._expect(";")
                if eid in entities:
                    raise DuplicateId(eid, offsets[eid], tok[2])
                entities[eid] = EntityInstance(eid, type_name, attrs)
                offsets[eid] = tok[2]
        if not saw_data:
            raise MissingSection("no DATA section", self.tokens[-1][2] if self.tokens else 0)

        dangling = sorted(self.refs.difference(entities))
        if dangling and strict_refs:
            raise DanglingRef(dangling)
        return EntityTable.from_entities(entities, schema, dangling, header)


def parse_step(text: str, strict_refs: bool = True) -> EntityTable:
    """Parse STEP text into an :class:`EntityTable`.

    With ``strict_refs=False`` unresolved references are tolerated and listed in
    ``table.dangling`` instead of raising :class:`DanglingRef`.
    """
    return _Parser(text).parse(strict_refs)


def read_step_text(path) -> str:
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        return data.decode("latin-1")


# --------------------------------------------------------------------------
# writer
# --------------------------------------------------------------------------


def format_real(x: float) -> str:
    r = repr(float(x))
    if r in ("inf", "-inf", "nan"):
        raise ValueError(f"{r} cannot be written to STEP")
    mantissa, e, exp = r.partition("e")
    if "." not in mantissa:
        mantissa += "."
    return mantissa + ("E" + exp if e else "")


def encode_string(s: str) -> str:
    out = []
    for ch in s:
        o = ord(ch)
        if ch == "'":
            out.append("''")
        elif ch == "\\":
            out.append("\\\\")
        elif 32 <= o <= 126:
            out.append(ch)
        elif o <= 0xFFFF:
            out.append(f"\\X2\\{o:04X}\\X0\\")
        else:
            out.append(f"\\X4\\{o:08X}\\X0\\")
    return "'" + "".join(out) + "'"


def format_value(v: Any) -> str:
    if v is None:
        return "$"
    if v is DERIVED:
        return "*"
    if isinstance(v, bool):
        return ".T." if v else ".F."
    if isinstance(v, Ref):
        return f"#{v.id}"
    if isinstance(v, EnumValue):
        return f".{v}."
    if isinstance(v, Binary):
        return f'"{v}"'
    if isinstance(v, str):
        return encode_string(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_real(v)
    if isinstance(v, Typed):
        return f"{v.name}({format_value(v.value)})"
    if isinstance(v, (tuple, list)):
        return "(" + ",".join(format_value(x) for x in v) + ")"
    raise TypeError(f"cannot format {type(v).__name__} as a STEP value")


def format_record(eid: int, type_name: str, attrs) -> str:
    if type_name == "":
        body = "(" + "".join(f"{p.name}{format_value(tuple(p.value))}" for p in attrs) + ")"
    else:
        body = type_name + format_value(tuple(attrs))
    return f"#{eid}={body};"


def unparse(table: EntityTable) -> str:
    """Write a table back to STEP text (used for round-trip checks)."""
    lines = ["ISO-10303-21;", "HEADER;"]
    header = list(table.header)
    if not any(h.name == "FILE_SCHEMA" for h in header):
        header.append(Typed("FILE_SCHEMA", ((table.schema_name,),)))
    for rec in header:
        lines.append(f"{rec.name}{format_value(tuple(rec.value))};")
    lines.append("ENDSEC;")
    lines.append("DATA;")
    for eid in sorted(table.entities):
        inst = table.entities[eid]
        lines.append(format_record(eid, inst.type_name, inst.attrs))
    lines.append("ENDSEC;")
    lines.append("END-ISO-10303-21;")
    return "\n".join(lines) + "\n"
