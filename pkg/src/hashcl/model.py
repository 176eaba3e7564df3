"""The configuration-type language and typing context.

A configuration types as one of:

  * ``TopType`` - the top of one of the seven kinds;
  * ``VarType`` - a context variable;
  * ``Shape`` - the structural form (kind, public and private inners, unit
    signatures), also the body of every abstract type;
  * ``AbstractType`` - named, with an ordered list of bounded variables over
    a shape (zero bounds is the parameterless case, which renders as its
    shape alone);
  * ``HashType`` - an abstract type applied to argument types, one per bound
    (zero arguments is the degenerate parameterless application).

Bounds and applied arguments are always in H-form: a variable, a hash type,
or a top. Values are immutable tuples throughout and freely shareable.
Equality is structural and name-sensitive; alpha-renaming is NOT identified
(bound-variable names are significant).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import UnboundVariable
from .syntax import Kind
from .tracelang import TraceLang


class ComponentType:
    __slots__ = ()


@dataclass(frozen=True)
class TopType(ComponentType):
    kind: Kind


@dataclass(frozen=True)
class VarType(ComponentType):
    name: str


@dataclass(frozen=True)
class UnitSig:
    """One unit of a shape: a finite slice map and a trace language over the
    slice labels."""

    name: str
    sigma: tuple[tuple[str, tuple[str, str]], ...]  # (slice, (inner, unit))
    trace: TraceLang

    def sigma_map(self) -> dict[str, tuple[str, str]]:
        return dict(self.sigma)

    def slice_labels(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.sigma)


@dataclass(frozen=True)
class Shape(ComponentType):
    kind: Kind
    public_inners: tuple[tuple[str, ComponentType], ...]
    private_inners: tuple[tuple[str, ComponentType], ...]
    units: tuple[UnitSig, ...]

    def all_inners(self) -> tuple[tuple[str, ComponentType], ...]:
        return self.public_inners + self.private_inners

    def inner_type(self, label: str) -> ComponentType | None:
        for lab, t in self.all_inners():
            if lab == label:
                return t
        return None

    def unit(self, name: str) -> UnitSig | None:
        for u in self.units:
            if u.name == name:
                return u
        return None


@dataclass(frozen=True)
class AbstractType(ComponentType):
    name: str
    bounds: tuple[tuple[str, ComponentType], ...]
    shape: Shape


@dataclass(frozen=True)
class HashType(ComponentType):
    base: AbstractType
    args: tuple[ComponentType, ...]

    def __post_init__(self):
        if len(self.args) != len(self.base.bounds):
            raise ValueError(
                f"{self.base.name} applied to {len(self.args)} arguments, has {len(self.base.bounds)} bounds"
            )


class Context:
    """Ordered variable bindings; lookup respects shadowing by the innermost
    binding."""

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[tuple[str, ComponentType]] = ()):
        self.entries: tuple[tuple[str, ComponentType], ...] = tuple(entries)

    def extend(self, name: str, bound: ComponentType) -> "Context":
        return Context(self.entries + ((name, bound),))

    def extend_all(self, bindings: Iterable[tuple[str, ComponentType]]) -> "Context":
        return Context(self.entries + tuple(bindings))

    def lookup(self, name: str) -> ComponentType:
        for var, bound in reversed(self.entries):
            if var == name:
                return bound
        raise UnboundVariable(f"variable {name!r} is not bound in the context")

    def __contains__(self, name: str) -> bool:
        return any(var == name for var, _ in self.entries)

    def names(self) -> tuple[str, ...]:
        return tuple(var for var, _ in self.entries)

    def __repr__(self):
        return "Context(" + ", ".join(f"{v}<:{render_type(b)}" for v, b in self.entries) + ")"


EMPTY_CONTEXT = Context()


# --- variables and substitution ------------------------------------------------

def free_vars(t: ComponentType) -> frozenset[str]:
    if isinstance(t, VarType):
        return frozenset((t.name,))
    if isinstance(t, TopType):
        return frozenset()
    if isinstance(t, HashType):
        out = free_vars(t.base)
        for a in t.args:
            out |= free_vars(a)
        return out
    if isinstance(t, AbstractType):
        out: frozenset[str] = frozenset()
        bound_so_far: set[str] = set()
        for var, b in t.bounds:
            out |= free_vars(b) - frozenset(bound_so_far)
            bound_so_far.add(var)
        out |= _shape_free_vars(t.shape) - frozenset(bound_so_far)
        return out
    if isinstance(t, Shape):
        return _shape_free_vars(t)
    raise TypeError(f"not a component type: {t!r}")


def _shape_free_vars(s: Shape) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for _, t in s.all_inners():
        out |= free_vars(t)
    return out


def _fresh_name(base: str, avoid: set[str]) -> str:
    if base not in avoid:
        return base
    i = 1
    while f"{base}_{i}" in avoid:
        i += 1
    return f"{base}_{i}"


def substitute(t: ComponentType, mapping: Mapping[str, ComponentType]) -> ComponentType:
    """Capture-avoiding simultaneous substitution of H-form types for
    variables. Bound variables of abstract types shadow the mapping and are
    renamed when a substituted value would otherwise capture them. Only
    variables actually free in ``t`` are touched, so closed types (every
    registry type in particular) pass through unchanged."""
    if not mapping:
        return t
    mapping = {k: v for k, v in mapping.items() if k in free_vars(t)}
    if not mapping:
        return t
    if isinstance(t, VarType):
        return mapping.get(t.name, t)
    if isinstance(t, TopType):
        return t
    if isinstance(t, HashType):
        base = substitute(t.base, mapping)
        assert isinstance(base, AbstractType)
        return HashType(base, tuple(substitute(a, mapping) for a in t.args))
    if isinstance(t, Shape):
        return _substitute_shape(t, mapping)
    if isinstance(t, AbstractType):
        incoming = {
            name
            for val in mapping.values()
            for name in free_vars(val)
        }
        bound_names = [var for var, _ in t.bounds]
        if any(b in incoming for b in bound_names):
            t = rename_bounds(t, incoming | set(mapping))
        active = dict(mapping)
        new_bounds: list[tuple[str, ComponentType]] = []
        for var, b in t.bounds:
            new_bounds.append((var, substitute(b, active)))
            active.pop(var, None)
        new_shape = _substitute_shape(t.shape, active)
        return AbstractType(t.name, tuple(new_bounds), new_shape)
    raise TypeError(f"not a component type: {t!r}")


def _substitute_shape(s: Shape, mapping: Mapping[str, ComponentType]) -> Shape:
    if not mapping:
        return s
    return Shape(
        s.kind,
        tuple((lab, substitute(t, mapping)) for lab, t in s.public_inners),
        tuple((lab, substitute(t, mapping)) for lab, t in s.private_inners),
        s.units,
    )


def rename_bounds(t: AbstractType, avoid: set[str]) -> AbstractType:
    """Alpha-rename every bound variable of ``t`` away from ``avoid``."""
    taken = set(avoid)
    renaming: dict[str, ComponentType] = {}
    new_bounds: list[tuple[str, ComponentType]] = []
    for var, b in t.bounds:
        fresh = _fresh_name(var, taken)
        taken.add(fresh)
        new_bounds.append((fresh, substitute(b, renaming)))
        renaming[var] = VarType(fresh)
    return AbstractType(t.name, tuple(new_bounds), _substitute_shape(t.shape, renaming))


# --- head inspection --------------------------------------------------------------

def kind_of(t: ComponentType, gamma: Context = EMPTY_CONTEXT) -> Kind:
    """Kind of the shape reached through the head; variables are chased
    through their bounds."""
    if isinstance(t, TopType):
        return t.kind
    if isinstance(t, Shape):
        return t.kind
    if isinstance(t, AbstractType):
        return t.shape.kind
    if isinstance(t, HashType):
        return t.base.shape.kind
    if isinstance(t, VarType):
        return kind_of(gamma.lookup(t.name), gamma)
    raise TypeError(f"not a component type: {t!r}")


def units_of(t: ComponentType, gamma: Context = EMPTY_CONTEXT) -> tuple[str, ...]:
    """Unit names offered by the component a reference of this type denotes."""
    if isinstance(t, Shape):
        return tuple(u.name for u in t.units)
    if isinstance(t, AbstractType):
        return tuple(u.name for u in t.shape.units)
    if isinstance(t, HashType):
        return tuple(u.name for u in t.base.shape.units)
    if isinstance(t, VarType):
        return units_of(gamma.lookup(t.name), gamma)
    if isinstance(t, TopType):
        return ()
    raise TypeError(f"not a component type: {t!r}")


def shape_of(t: ComponentType, gamma: Context = EMPTY_CONTEXT) -> Shape | None:
    """The shape denoted by a type, with hash arguments substituted for the
    base's bound variables. Tops have no shape."""
    if isinstance(t, Shape):
        return t
    if isinstance(t, AbstractType):
        return t.shape
    if isinstance(t, HashType):
        mapping = {var: arg for (var, _), arg in zip(t.base.bounds, t.args)}
        return _substitute_shape(t.base.shape, mapping)
    if isinstance(t, VarType):
        return shape_of(gamma.lookup(t.name), gamma)
    if isinstance(t, TopType):
        return None
    raise TypeError(f"not a component type: {t!r}")


# --- canonical rendering --------------------------------------------------------

def render_type(t: ComponentType) -> str:
    """The canonical one-line rendering used by diagnostics, CLI output, and
    golden tests: ``[X1<:B1, ...] |> kind • <pub> -> <priv; units>`` for
    abstract types and ``Base <| [H1, ...]`` for hash types."""
    if isinstance(t, TopType):
        return f"Top_{t.kind.value}"
    if isinstance(t, VarType):
        return t.name
    if isinstance(t, HashType):
        if not t.args:
            return t.base.name
        return f"{t.base.name} <| [" + ", ".join(render_type(a) for a in t.args) + "]"
    if isinstance(t, AbstractType):
        shape = render_type(t.shape)
        if not t.bounds:
            return shape
        bounds = ", ".join(f"{v}<:{render_type(b)}" for v, b in t.bounds)
        return f"[{bounds}] |> {shape}"
    if isinstance(t, Shape):
        pub = ", ".join(f"{lab}:{render_type(ty)}" for lab, ty in t.public_inners)
        priv = ", ".join(f"{lab}:{render_type(ty)}" for lab, ty in t.private_inners)
        units = ", ".join(_render_unit(u) for u in t.units)
        return f"{t.kind.value} • <{pub}> -> <{priv}; {units}>"
    raise TypeError(f"not a component type: {t!r}")


def _render_unit(u: UnitSig) -> str:
    sigma = ", ".join(f"{s}->{inner}.{unit}" for s, (inner, unit) in u.sigma)
    return f"{u.name}:<{{{sigma}}}, {u.trace.render()}>"
