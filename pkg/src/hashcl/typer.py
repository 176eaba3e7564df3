"""Computing the type of a configuration.

The five cases: an abstract configuration types as a named abstract type over
its shape (bounds elaborated left to right so later bounds may mention earlier
variables); an application types as a hash type after discharging one subtype
obligation per argument against the instantiated bound; supplying public
inners retypes them at the supplied references and consumes them into the
private row; a variable types as itself provided it is in the context; a
concrete configuration types as the implemented abstract applied at this
configuration's declared parameter bounds.

``extends`` clauses contribute nothing here; the hierarchy enters only
through the subtyping axioms held by the registry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

from .errors import (
    ArityMismatch,
    BoundViolation,
    FreeVariable,
    NotAnAbstractTarget,
    SupplyArityMismatch,
    UncoveredInner,
    UnknownConfig,
    UnknownUnit,
)
from .model import (
    AbstractType,
    ComponentType,
    Context,
    EMPTY_CONTEXT,
    HashType,
    Shape,
    TopType,
    UnitSig,
    VarType,
    free_vars,
    rename_bounds,
    render_type,
    substitute,
    units_of,
)
from .subtyping import SubtypeQuery, SubtypeTrace, is_subtype
from .syntax import AbstractConfig, AppRef, ConcreteConfig, TopRef, TypeRef, VarRef
from .tracelang import TraceLang, regex_symbols


class TypeEnv(Protocol):
    """What the typer needs from a registry."""

    def abstract_type(self, name: str) -> AbstractType: ...

    def has_abstract(self, name: str) -> bool: ...

    def parent_of(self, name: str) -> str | None: ...

    def is_concrete_name(self, name: str) -> bool: ...


@dataclass
class Obligation:
    """A discharged subtype premise, kept for reporting."""

    description: str
    trace: SubtypeTrace

    def __str__(self):
        return self.description


@dataclass
class TypingResult:
    type: ComponentType
    obligations: list[Obligation] = field(default_factory=list)


def type_ref(ref: TypeRef, gamma: Context, reg: TypeEnv) -> TypingResult:
    """Type any reference form; variables must be bound in the context."""
    if isinstance(ref, VarRef):
        if ref.name not in gamma:
            raise FreeVariable(f"free variable {ref.name!r}", ref.pos)
        return TypingResult(VarType(ref.name))
    if isinstance(ref, TopRef):
        return TypingResult(TopType(ref.kind))
    if isinstance(ref, AppRef):
        return type_apply(ref, gamma, reg)
    raise TypeError(f"not a type reference: {ref!r}")


def type_apply(target: AppRef, gamma: Context, reg: TypeEnv) -> TypingResult:
    """Apply an abstract configuration to argument references.

    Each argument must be a subtype of the corresponding bound with every
    earlier argument substituted in (declaration order is the only coherent
    evaluation order for bounds that mention earlier variables)."""
    if reg.is_concrete_name(target.name):
        raise NotAnAbstractTarget(f"{target.name} names an implementation, not an abstract configuration", target.pos)
    head = reg.abstract_type(target.name)
    if len(target.args) != len(head.bounds):
        raise ArityMismatch(
            f"{target.name} expects {len(head.bounds)} arguments, got {len(target.args)}", target.pos
        )
    obligations: list[Obligation] = []
    args: list[ComponentType] = []
    for ref in target.args:
        sub = type_ref(ref, gamma, reg)
        obligations.extend(sub.obligations)
        args.append(sub.type)
    inst: dict[str, ComponentType] = {}
    for i, ((var, bound), arg) in enumerate(zip(head.bounds, args)):
        expected = substitute(bound, inst)
        ok, trace = is_subtype(SubtypeQuery(gamma, arg, expected), reg)
        if not ok:
            raise BoundViolation(
                f"argument {i + 1} of {target.name}: {render_type(arg)} is not a subtype of "
                f"bound {render_type(expected)}",
                i,
                trace,
                target.pos,
            )
        obligations.append(Obligation(f"{render_type(arg)} <: {render_type(expected)}", trace))
        inst[var] = arg
    return TypingResult(HashType(head, tuple(args)), obligations)


def type_supply(target: AppRef, supplied: list[TypeRef], gamma: Context, reg: TypeEnv) -> TypingResult:
    """Apply, then retype the head's public inners at the supplied references.

    The supplied inners move out of the public row of the resulting shape
    (they are consumed); with nothing supplied this is exactly type_apply."""
    applied = type_apply(target, gamma, reg)
    hash_t = applied.type
    assert isinstance(hash_t, HashType)
    base = hash_t.base
    k = len(base.shape.public_inners)
    if not supplied and k == 0:
        return applied
    if len(supplied) != k:
        raise SupplyArityMismatch(
            f"{target.name} has {k} public inner components, {len(supplied)} supplied", target.pos
        )
    obligations = list(applied.obligations)
    inst = {var: arg for (var, _), arg in zip(base.bounds, hash_t.args)}
    supplied_types: list[ComponentType] = []
    for ref in supplied:
        sub = type_ref(ref, gamma, reg)
        obligations.extend(sub.obligations)
        supplied_types.append(sub.type)
    for (label, declared), given in zip(base.shape.public_inners, supplied_types):
        expected = substitute(declared, inst)
        ok, trace = is_subtype(SubtypeQuery(gamma, given, expected), reg)
        if not ok:
            raise BoundViolation(
                f"supplied inner for {label!r}: {render_type(given)} is not a subtype of {render_type(expected)}",
                0,
                trace,
                target.pos,
            )
        obligations.append(Obligation(f"{render_type(given)} <: {render_type(expected)}", trace))
    incoming = {v for t in supplied_types for v in free_vars(t)}
    if any(var in incoming for var, _ in base.bounds):
        base = rename_bounds(base, incoming | {v for v, _ in base.bounds})
    moved = tuple(
        (label, given) for (label, _), given in zip(base.shape.public_inners, supplied_types)
    )
    rewritten = AbstractType(
        base.name,
        base.bounds,
        Shape(base.shape.kind, (), moved + base.shape.private_inners, base.shape.units),
    )
    return TypingResult(HashType(rewritten, hash_t.args), obligations)


def type_abstract(cfg: AbstractConfig, gamma: Context = EMPTY_CONTEXT, reg: TypeEnv | None = None) -> TypingResult:
    """Type an abstract configuration as a named abstract type."""
    assert reg is not None
    obligations: list[Obligation] = []
    ctx = gamma
    bounds: list[tuple[str, ComponentType]] = []
    for param in cfg.params:
        res = type_ref(param.bound, ctx, reg)
        obligations.extend(res.obligations)
        bounds.append((param.var, res.type))
        ctx = ctx.extend(param.var, res.type)

    inner_types: dict[str, ComponentType] = {}
    for decl in cfg.inners:
        if decl.supplied:
            if not isinstance(decl.type_ref, AppRef):
                raise SupplyArityMismatch(
                    f"inner {decl.inner_id!r} supplies components but is not a configuration application", decl.pos
                )
            refs: list[TypeRef] = []
            for supplier in decl.supplied:
                supplier_decl = cfg.inner(supplier)
                if supplier_decl is None:
                    raise UnknownConfig(f"supplied component {supplier!r} is not a declared inner", decl.pos)
                refs.append(supplier_decl.type_ref)
            res = type_supply(decl.type_ref, refs, ctx, reg)
        else:
            res = type_supply(decl.type_ref, [], ctx, reg) if isinstance(decl.type_ref, AppRef) else type_ref(
                decl.type_ref, ctx, reg
            )
        obligations.extend(res.obligations)
        inner_types[decl.inner_id] = res.type

    covered: set[str] = set()
    units: list[UnitSig] = []
    for unit in cfg.units:
        sigma: list[tuple[str, tuple[str, str]]] = []
        for sl in unit.slices:
            if sl.inner_id not in inner_types:
                raise UnknownConfig(f"slice {sl.slice_id!r} references unknown inner {sl.inner_id!r}", sl.pos)
            offered = units_of(inner_types[sl.inner_id], ctx)
            if sl.unit_id not in offered:
                raise UnknownUnit(
                    f"slice {sl.slice_id!r}: {sl.inner_id}.{sl.unit_id} is not a unit of {sl.inner_id!r}"
                    + (f" (has: {', '.join(offered)})" if offered else ""),
                    sl.pos,
                )
            covered.add(sl.inner_id)
            sigma.append((sl.slice_id, (sl.inner_id, sl.unit_id)))
        labels = {s for s, _ in sigma}
        if unit.action is not None:
            stray = regex_symbols(unit.action) - labels
            if stray:
                raise UnknownUnit(
                    f"action of unit {unit.name!r} uses labels that are not slices: {', '.join(sorted(stray))}",
                    unit.pos,
                )
            trace = TraceLang(unit.action, labels)
        else:
            trace = TraceLang.universal(labels)
        units.append(UnitSig(unit.name, tuple(sigma), trace))

    uncovered = [d.inner_id for d in cfg.inners if d.inner_id not in covered]
    if uncovered:
        raise UncoveredInner(
            f"inner components folded into no unit: {', '.join(uncovered)}", cfg.pos
        )

    public = tuple((label, inner_types[label]) for label in cfg.public_inners)
    private = tuple(
        (d.inner_id, inner_types[d.inner_id]) for d in cfg.inners if d.inner_id not in cfg.public_inners
    )
    shape = Shape(cfg.kind, public, private, tuple(units))
    return TypingResult(AbstractType(cfg.name, tuple(bounds), shape), obligations)


def type_concrete(cfg: ConcreteConfig, reg: TypeEnv) -> TypingResult:
    """Type an implementation: the implemented abstract applied at this
    configuration's declared parameter bounds (variable arguments are
    replaced by their bounds, closed left to right)."""
    target = cfg.implements_target
    if reg.is_concrete_name(target.name) or not reg.has_abstract(target.name):
        raise NotAnAbstractTarget(
            f"implements target {target.name!r} does not name an abstract configuration", target.pos
        )
    head = reg.abstract_type(target.name)
    if len(target.args) != len(head.bounds):
        raise ArityMismatch(
            f"{target.name} expects {len(head.bounds)} arguments, got {len(target.args)}", target.pos
        )
    obligations: list[Obligation] = []

    ctx = EMPTY_CONTEXT
    closed_bounds: dict[str, ComponentType] = {}
    for param in cfg.params:
        res = type_ref(param.bound, ctx, reg)
        obligations.extend(res.obligations)
        closed_bounds[param.var] = substitute(res.type, closed_bounds)
        ctx = ctx.extend(param.var, closed_bounds[param.var])

    args: list[ComponentType] = []
    for ref in target.args:
        res = type_ref(ref, ctx, reg)
        obligations.extend(res.obligations)
        args.append(substitute(res.type, closed_bounds))

    inst: dict[str, ComponentType] = {}
    for i, ((var, bound), arg) in enumerate(zip(head.bounds, args)):
        expected = substitute(bound, inst)
        ok, trace = is_subtype(SubtypeQuery(EMPTY_CONTEXT, arg, expected), reg)
        if not ok:
            raise BoundViolation(
                f"{cfg.name}: declared bound {render_type(arg)} is not a subtype of "
                f"{target.name}'s bound {render_type(expected)}",
                i,
                trace,
                cfg.pos,
            )
        obligations.append(Obligation(f"{render_type(arg)} <: {render_type(expected)}", trace))
        inst[var] = arg
    return TypingResult(HashType(head, tuple(args)), obligations)
