"""Recursive-descent parser for HCL compilation units.

Concrete grammar (EBNF in docs/grammar.md):

    unit        := abstract | concrete
    abstract    := kind NAME repl? publics? params? ("extends" NAME)?
                   "begin" iterator* inner* unitDecl+ "end"
    concrete    := kind NAME repl? params? "implements" typeRef
                   "version" NAT "." NAT "." NAT "." NAT
                   "begin" iterator* concreteUnit+ "end"

A bare identifier in type position is a variable when a context parameter of
that name is in scope, otherwise a configuration reference; kind keywords in
type position denote the top of that kind. One configuration per file.
"""

from __future__ import annotations

from .errors import HclSyntaxError, Pos, UnknownKind
from .lexer import Lexer, Token
from .syntax import (
    AbstractConfig,
    AppRef,
    Config,
    ConcreteConfig,
    ConcreteUnit,
    IndexExpr,
    InnerDecl,
    IteratorDecl,
    Kind,
    KIND_KEYWORDS,
    Param,
    SliceDecl,
    TopRef,
    TypeRef,
    UnitDecl,
    VarRef,
)
from .tracelang import parse_regex


def parse(source: str, path: str = "<input>") -> Config:
    """Parse one HCL compilation unit into an AST."""
    return _Parser(source, path).parse_unit()


def parse_type_ref(text: str) -> TypeRef:
    """Parse a standalone type expression (the cFunApp grammar, as used on
    the command line). No variables are in scope."""
    p = _Parser(text, "<expr>")
    ref = p.type_ref(frozenset())
    p.expect_eof()
    return ref


class _Parser:
    def __init__(self, source: str, path: str):
        self.lexer = Lexer(source, path)
        self.path = path
        self._buf: list[Token] = []

    # token plumbing ---------------------------------------------------------

    def peek(self) -> Token:
        if not self._buf:
            self._buf.append(self.lexer.next_token())
        return self._buf[0]

    def take(self) -> Token:
        return self._buf.pop(0) if self._buf else self.lexer.next_token()

    def at(self, type_: str, value: str | None = None) -> bool:
        tok = self.peek()
        return tok.type == type_ and (value is None or tok.value == value)

    def expect(self, type_: str, value: str | None = None, expected: tuple[str, ...] = ()) -> Token:
        tok = self.take()
        if tok.type != type_ or (value is not None and tok.value != value):
            want = expected or ((value,) if value else (type_.lower(),))
            raise HclSyntaxError(f"unexpected {tok}", tok.pos, expected=want)
        return tok

    def expect_eof(self):
        tok = self.peek()
        if tok.type != "EOF":
            raise HclSyntaxError(f"trailing input after configuration: {tok}", tok.pos)

    # entry points -------------------------------------------------------------

    def parse_unit(self) -> Config:
        kind = self.kind_keyword()
        name_tok = self.expect("IDENT", expected=("configuration name",))
        replication = self.replication()
        publics: list[str] = []
        publics_pos: dict[str, Pos] = {}
        if self.at("("):
            self.take()
            while True:
                tok = self.expect("IDENT", expected=("public inner name",))
                publics.append(tok.value)
                publics_pos[tok.value] = tok.pos
                if self.at(","):
                    self.take()
                    continue
                break
            self.expect(")")
        params = self.param_list()
        visible = frozenset(p.var for p in params)
        if self.at("KW", "implements"):
            cfg = self.concrete_tail(kind, name_tok, replication, params, visible)
        else:
            cfg = self.abstract_tail(kind, name_tok, replication, tuple(publics), publics_pos, params, visible)
        self.expect_eof()
        return cfg

    def kind_keyword(self) -> Kind:
        tok = self.take()
        if tok.type == "KW" and tok.value in KIND_KEYWORDS:
            return KIND_KEYWORDS[tok.value]
        raise UnknownKind(f"unknown kind {tok}", tok.pos, expected=tuple(sorted(KIND_KEYWORDS)))

    def replication(self) -> str | None:
        if not self.at("<"):
            return None
        self.take()
        tok = self.take()
        if tok.type not in ("IDENT", "NAT"):
            raise HclSyntaxError(f"unexpected {tok}", tok.pos, expected=("replication symbol",))
        self.expect(">")
        return tok.value

    def param_list(self) -> tuple[Param, ...]:
        if not self.at("["):
            return ()
        self.take()
        params: list[Param] = []
        seen: set[str] = set()
        while True:
            var_tok = self.expect("IDENT", expected=("context parameter name",))
            if var_tok.value in seen:
                raise HclSyntaxError(f"duplicate context parameter {var_tok.value!r}", var_tok.pos)
            seen.add(var_tok.value)
            self.expect(":")
            bound = self.type_ref(frozenset(seen - {var_tok.value}))
            params.append(Param(var_tok.value, bound, pos=var_tok.pos))
            if self.at(","):
                self.take()
                continue
            break
        self.expect("]")
        return tuple(params)

    def type_ref(self, visible: frozenset[str]) -> TypeRef:
        tok = self.take()
        if tok.type == "KW" and tok.value in KIND_KEYWORDS:
            return TopRef(KIND_KEYWORDS[tok.value], pos=tok.pos)
        if tok.type != "IDENT":
            raise HclSyntaxError(f"unexpected {tok}", tok.pos, expected=("type reference",))
        if tok.value in visible:
            if self.at("[") or self.at("<"):
                raise HclSyntaxError(f"context variable {tok.value!r} cannot be applied", tok.pos)
            return VarRef(tok.value, pos=tok.pos)
        replication = self.replication()
        args: list[TypeRef] = []
        if self.at("["):
            self.take()
            while True:
                args.append(self.type_ref(visible))
                if self.at(","):
                    self.take()
                    continue
                break
            self.expect("]")
        return AppRef(tok.value, tuple(args), replication, pos=tok.pos)

    # abstract configurations ----------------------------------------------------

    def abstract_tail(self, kind, name_tok, replication, publics, publics_pos, params, visible) -> AbstractConfig:
        extends_parent = None
        if self.at("KW", "extends"):
            self.take()
            extends_parent = self.expect("IDENT", expected=("parent configuration name",)).value
        self.expect("KW", "begin")
        iterators = self.iterator_decls()
        inners: list[InnerDecl] = []
        inner_ids: set[str] = set()
        while self.peek().type == "KW" and self.peek().value in KIND_KEYWORDS:
            decl = self.inner_decl(visible)
            if decl.inner_id in inner_ids:
                raise HclSyntaxError(f"duplicate inner component {decl.inner_id!r}", decl.pos)
            inner_ids.add(decl.inner_id)
            inners.append(decl)
        units: list[UnitDecl] = []
        unit_names: set[str] = set()
        while self.at("KW", "unit"):
            unit = self.unit_decl()
            if unit.name in unit_names:
                raise HclSyntaxError(f"duplicate unit {unit.name!r}", unit.pos)
            unit_names.add(unit.name)
            units.append(unit)
        end_tok = self.expect("KW", "end", expected=("unit", "end"))
        if not units:
            raise HclSyntaxError("a configuration declares at least one unit", end_tok.pos)
        for pub in publics:
            if pub not in inner_ids:
                raise HclSyntaxError(f"public inner {pub!r} is not a declared inner component", publics_pos[pub])
        return AbstractConfig(
            name=name_tok.value,
            kind=kind,
            replication=replication,
            params=params,
            public_inners=publics,
            inners=tuple(inners),
            units=tuple(units),
            iterators=iterators,
            extends_parent=extends_parent,
            pos=name_tok.pos,
        )

    def iterator_decls(self) -> tuple[IteratorDecl, ...]:
        decls: list[IteratorDecl] = []
        while self.at("KW", "iterator"):
            kw = self.take()
            var = self.expect("IDENT", expected=("iterator variable",)).value
            self.expect("KW", "from")
            lo = self.index_expr()
            self.expect("KW", "to")
            hi = self.index_expr()
            decls.append(IteratorDecl(var, lo, hi, pos=kw.pos))
        return tuple(decls)

    def index_expr(self) -> IndexExpr:
        terms: list[tuple[int, int | str]] = []
        sign = 1
        while True:
            tok = self.take()
            if tok.type == "NAT":
                terms.append((sign, int(tok.value)))
            elif tok.type == "IDENT":
                terms.append((sign, tok.value))
            else:
                raise HclSyntaxError(f"unexpected {tok}", tok.pos, expected=("number", "iterator variable"))
            if self.at("+"):
                self.take()
                sign = 1
            elif self.at("-"):
                self.take()
                sign = -1
            else:
                return IndexExpr(tuple(terms))

    def inner_decl(self, visible: frozenset[str]) -> InnerDecl:
        kind = self.kind_keyword()
        name_tok = self.expect("IDENT", expected=("inner component name",))
        self.expect(":")
        ref = self.type_ref(visible)
        supplied: list[str] = []
        if self.at("("):
            self.take()
            while True:
                supplied.append(self.expect("IDENT", expected=("supplied inner name",)).value)
                if self.at(","):
                    self.take()
                    continue
                break
            self.expect(")")
        return InnerDecl(kind, name_tok.value, ref, tuple(supplied), pos=name_tok.pos)

    def unit_decl(self) -> UnitDecl:
        self.expect("KW", "unit")
        name_tok = self.expect("IDENT", expected=("unit name",))
        iterator = self.unit_iterator()
        slices: list[SliceDecl] = []
        action = None
        if self.at("KW", "begin"):
            self.take()
            slice_ids: set[str] = set()
            while self.at("KW", "slice"):
                decl = self.slice_decl()
                if decl.slice_id in slice_ids:
                    raise HclSyntaxError(f"duplicate slice {decl.slice_id!r}", decl.pos)
                slice_ids.add(decl.slice_id)
                slices.append(decl)
            if self.at("KW", "action"):
                action_tok = self.take()
                action = self.action_body(action_tok.pos)
            self.expect("KW", "end", expected=("slice", "action", "end"))
        return UnitDecl(name_tok.value, iterator, tuple(slices), action, pos=name_tok.pos)

    def unit_iterator(self) -> str | None:
        if not self.at("["):
            return None
        self.take()
        tok = self.expect("IDENT", expected=("iterator variable",))
        self.expect("]")
        return tok.value

    def slice_decl(self) -> SliceDecl:
        self.expect("KW", "slice")
        slice_tok = self.expect("IDENT", expected=("slice name",))
        self.expect("KW", "from")
        inner = self.expect("IDENT", expected=("inner component name",)).value
        self.expect(".")
        unit = self.expect("IDENT", expected=("unit name",)).value
        index = None
        if self.at("["):
            self.take()
            index = self.index_expr()
            self.expect("]")
        return SliceDecl(slice_tok.value, inner, unit, index, pos=slice_tok.pos)

    def action_body(self, at: Pos):
        # Collect tokens until the closing "end", then reuse the trace-language
        # regex parser on the reassembled text.
        pieces: list[str] = []
        while not self.at("KW", "end"):
            tok = self.take()
            if tok.type == "EOF":
                raise HclSyntaxError("unterminated action (missing end)", tok.pos)
            pieces.append(tok.value)
        if not pieces:
            raise HclSyntaxError("empty action", at)
        try:
            return parse_regex(" ".join(pieces))
        except HclSyntaxError as exc:
            raise HclSyntaxError(f"bad action expression: {exc.message}", at) from exc

    # concrete configurations ------------------------------------------------------

    def concrete_tail(self, kind, name_tok, replication, params, visible) -> ConcreteConfig:
        self.expect("KW", "implements")
        target = self.type_ref(visible)
        if not isinstance(target, AppRef):
            raise HclSyntaxError("implements target must name an abstract configuration", name_tok.pos)
        self.expect("KW", "version")
        version = self.version_literal()
        self.expect("KW", "begin")
        iterators = self.iterator_decls()
        units: list[ConcreteUnit] = []
        unit_names: set[str] = set()
        while self.at("KW", "unit"):
            self.take()
            unit_tok = self.expect("IDENT", expected=("unit name",))
            if unit_tok.value in unit_names:
                raise HclSyntaxError(f"duplicate unit {unit_tok.value!r}", unit_tok.pos)
            unit_names.add(unit_tok.value)
            iterator = self.unit_iterator()
            source = ""
            if self.at("KW", "begin"):
                begin_tok = self.take()
                assert not self._buf
                source = self.lexer.capture_block(begin_tok.end_offset)
            units.append(ConcreteUnit(unit_tok.value, iterator, source, pos=unit_tok.pos))
        end_tok = self.expect("KW", "end", expected=("unit", "end"))
        if not units:
            raise HclSyntaxError("a configuration declares at least one unit", end_tok.pos)
        return ConcreteConfig(
            name=name_tok.value,
            kind=kind,
            replication=replication,
            params=params,
            implements_target=target,
            version=version,
            units=tuple(units),
            iterators=iterators,
            pos=name_tok.pos,
        )

    def version_literal(self) -> tuple[int, int, int, int]:
        first = self.expect("NAT", expected=("version number",))
        numbers = [int(first.value)]
        for _ in range(3):
            self.expect(".")
            numbers.append(int(self.expect("NAT", expected=("version component",)).value))
        return tuple(numbers)  # type: ignore[return-value]
