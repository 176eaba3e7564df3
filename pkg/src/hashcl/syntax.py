"""AST for HCL compilation units.

One source file holds one configuration, either abstract (a specification of
a concern, with bounded context parameters, inner components and units built
by folding inner units as slices) or concrete (an implementation of an
abstract configuration at specialized bounds, with opaque unit bodies).

Nodes keep their source position for diagnostics; positions are excluded from
structural equality. Treat all nodes as immutable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import Pos
from .tracelang import Regex, render_regex


class Kind(enum.Enum):
    APPLICATION = "application"
    COMPUTATION = "computation"
    SYNCHRONIZER = "synchronizer"
    DATA = "data"
    ENVIRONMENT = "environment"
    ARCHITECTURE = "architecture"
    QUALIFIER = "qualifier"

    def __str__(self):
        return self.value


KIND_KEYWORDS = {k.value: k for k in Kind}


# --- index expressions (iterator bounds and indexed references) -------------

@dataclass(eq=True)
class IndexExpr:
    """Sum of signed atoms; an atom is a natural literal or an iterator/size
    variable. Covers the forms that appear in practice (``0``, ``N-1``, ``k``,
    ``k+1``)."""

    terms: tuple[tuple[int, int | str], ...]  # (sign, atom)

    def evaluate(self, env: dict[str, int]) -> int:
        total = 0
        for sign, atom in self.terms:
            if isinstance(atom, int):
                total += sign * atom
            elif atom in env:
                total += sign * env[atom]
            else:
                raise KeyError(atom)
        return total

    def variables(self) -> set[str]:
        return {a for _, a in self.terms if isinstance(a, str)}

    def render(self) -> str:
        out = []
        for i, (sign, atom) in enumerate(self.terms):
            if i == 0:
                out.append(("-" if sign < 0 else "") + str(atom))
            else:
                out.append(("-" if sign < 0 else "+") + str(atom))
        return "".join(out)

    @classmethod
    def var(cls, name: str) -> "IndexExpr":
        return cls(((1, name),))

    @classmethod
    def nat(cls, value: int) -> "IndexExpr":
        return cls(((1, value),))


# --- type references ---------------------------------------------------------

class TypeRef:
    """Base for the three reference forms usable in bounds and arguments."""

    __slots__ = ()


@dataclass(eq=True)
class VarRef(TypeRef):
    name: str
    pos: Pos = field(default_factory=Pos, compare=False)


@dataclass(eq=True)
class AppRef(TypeRef):
    """A configuration applied to argument references; zero arguments is the
    degenerate form used for parameterless components."""

    name: str
    args: tuple[TypeRef, ...] = ()
    replication: str | None = None
    pos: Pos = field(default_factory=Pos, compare=False)


@dataclass(eq=True)
class TopRef(TypeRef):
    """A kind keyword in type position: the top of that kind."""

    kind: Kind
    pos: Pos = field(default_factory=Pos, compare=False)


# --- declarations -------------------------------------------------------------

@dataclass(eq=True)
class Param:
    var: str
    bound: TypeRef
    pos: Pos = field(default_factory=Pos, compare=False)


@dataclass(eq=True)
class InnerDecl:
    kind: Kind
    inner_id: str
    type_ref: TypeRef
    supplied: tuple[str, ...] = ()
    pos: Pos = field(default_factory=Pos, compare=False)


@dataclass(eq=True)
class SliceDecl:
    slice_id: str
    inner_id: str
    unit_id: str
    index: IndexExpr | None = None
    pos: Pos = field(default_factory=Pos, compare=False)


@dataclass(eq=True)
class UnitDecl:
    name: str
    iterator: str | None = None
    slices: tuple[SliceDecl, ...] = ()
    action: Regex | None = None
    pos: Pos = field(default_factory=Pos, compare=False)


@dataclass(eq=True)
class IteratorDecl:
    var: str
    lo: IndexExpr
    hi: IndexExpr
    pos: Pos = field(default_factory=Pos, compare=False)


@dataclass(eq=True)
class AbstractConfig:
    name: str
    kind: Kind
    replication: str | None
    params: tuple[Param, ...]
    public_inners: tuple[str, ...]
    inners: tuple[InnerDecl, ...]
    units: tuple[UnitDecl, ...]
    iterators: tuple[IteratorDecl, ...] = ()
    extends_parent: str | None = None
    pos: Pos = field(default_factory=Pos, compare=False)

    def param_names(self) -> tuple[str, ...]:
        return tuple(p.var for p in self.params)

    def inner(self, inner_id: str) -> InnerDecl | None:
        for decl in self.inners:
            if decl.inner_id == inner_id:
                return decl
        return None


@dataclass(eq=True)
class ConcreteUnit:
    name: str
    iterator: str | None = None
    source: str = ""
    pos: Pos = field(default_factory=Pos, compare=False)


@dataclass(eq=True)
class ConcreteConfig:
    name: str
    kind: Kind
    replication: str | None
    params: tuple[Param, ...]
    implements_target: AppRef
    version: tuple[int, int, int, int]
    units: tuple[ConcreteUnit, ...]
    iterators: tuple[IteratorDecl, ...] = ()
    pos: Pos = field(default_factory=Pos, compare=False)

    def param_names(self) -> tuple[str, ...]:
        return tuple(p.var for p in self.params)


Config = AbstractConfig | ConcreteConfig


# --- pretty printer -----------------------------------------------------------

def render_type_ref(ref: TypeRef) -> str:
    if isinstance(ref, VarRef):
        return ref.name
    if isinstance(ref, TopRef):
        return ref.kind.value
    if isinstance(ref, AppRef):
        out = ref.name
        if ref.replication:
            out += f"<{ref.replication}>"
        if ref.args:
            out += "[" + ", ".join(render_type_ref(a) for a in ref.args) + "]"
        return out
    raise TypeError(f"not a type reference: {ref!r}")


def pretty_print(cfg: Config) -> str:
    """Emit canonical HCL source; reparsing it yields a structurally equal AST."""
    out: list[str] = []
    head = f"{cfg.kind.value} {cfg.name}"
    if cfg.replication:
        head += f"<{cfg.replication}>"
    if isinstance(cfg, AbstractConfig) and cfg.public_inners:
        head += " (" + ", ".join(cfg.public_inners) + ")"
    if cfg.params:
        head += " [" + ", ".join(f"{p.var}: {render_type_ref(p.bound)}" for p in cfg.params) + "]"
    out.append(head)
    if isinstance(cfg, AbstractConfig):
        if cfg.extends_parent:
            out.append(f"  extends {cfg.extends_parent}")
    else:
        out.append(f"  implements {render_type_ref(cfg.implements_target)}")
        out.append("  version " + ".".join(str(n) for n in cfg.version))
    out.append("begin")
    for it in cfg.iterators:
        out.append(f"  iterator {it.var} from {it.lo.render()} to {it.hi.render()}")
    if isinstance(cfg, AbstractConfig):
        for inner in cfg.inners:
            line = f"  {inner.kind.value} {inner.inner_id} : {render_type_ref(inner.type_ref)}"
            if inner.supplied:
                line += " (" + ", ".join(inner.supplied) + ")"
            out.append(line)
        for unit in cfg.units:
            name = unit.name + (f"[{unit.iterator}]" if unit.iterator else "")
            if not unit.slices and unit.action is None:
                out.append(f"  unit {name}")
                continue
            out.append(f"  unit {name}")
            out.append("  begin")
            for sl in unit.slices:
                target = f"{sl.inner_id}.{sl.unit_id}"
                if sl.index is not None:
                    target += f"[{sl.index.render()}]"
                out.append(f"    slice {sl.slice_id} from {target}")
            if unit.action is not None:
                out.append(f"    action {render_regex(unit.action)}")
            out.append("  end")
    else:
        for unit in cfg.units:
            name = unit.name + (f"[{unit.iterator}]" if unit.iterator else "")
            out.append(f"  unit {name}")
            out.append("  begin")
            if unit.source:
                for line in unit.source.splitlines():
                    out.append("    " + line)
            out.append("  end")
    out.append("end")
    return "\n".join(out) + "\n"
