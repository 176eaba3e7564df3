"""Elaboration of replicated configurations.

A configuration declared with a replication symbol may declare unit families
indexed by an iterator running from 0 to N-1. Expansion at a concrete size n
replaces each family ``u[k]`` by the instances ``u_0 .. u_{n-1}`` with slice
references instantiated at each index. Non-replicated configurations pass
through unchanged, and expanding an already-expanded configuration is the
identity.
"""

from __future__ import annotations

from dataclasses import replace

from .errors import IteratorBoundMismatch
from .syntax import (
    AbstractConfig,
    AppRef,
    Config,
    ConcreteUnit,
    IndexExpr,
    InnerDecl,
    SliceDecl,
    TypeRef,
    UnitDecl,
)


def expand_iterators(cfg: Config, n: int) -> Config:
    if cfg.replication is None:
        return cfg
    if n < 1:
        raise IteratorBoundMismatch(f"replication size must be at least 1, got {n}", cfg.pos)
    env = {cfg.replication: n}
    ranges: dict[str, range] = {}
    for decl in cfg.iterators:
        lo = _evaluate(decl.lo, env, decl)
        hi = _evaluate(decl.hi, env, decl)
        if lo != 0 or hi != n - 1:
            raise IteratorBoundMismatch(
                f"iterator {decl.var!r} runs {lo}..{hi}; 0..{n - 1} required", decl.pos
            )
        ranges[decl.var] = range(lo, hi + 1)

    if isinstance(cfg, AbstractConfig):
        units: list[UnitDecl] = []
        for unit in cfg.units:
            if unit.iterator is None:
                units.append(unit)
                continue
            if unit.iterator not in ranges:
                raise IteratorBoundMismatch(
                    f"unit {unit.name!r} uses undeclared iterator {unit.iterator!r}", unit.pos
                )
            for i in ranges[unit.iterator]:
                units.append(_instantiate_unit(unit, {**env, unit.iterator: i}, i))
        inners = tuple(_concretize_inner(d, cfg.replication, n) for d in cfg.inners)
        return replace(cfg, replication=None, iterators=(), inners=inners, units=tuple(units))

    units_c: list[ConcreteUnit] = []
    for unit in cfg.units:
        if unit.iterator is None:
            units_c.append(unit)
            continue
        if unit.iterator not in ranges:
            raise IteratorBoundMismatch(
                f"unit {unit.name!r} uses undeclared iterator {unit.iterator!r}", unit.pos
            )
        for i in ranges[unit.iterator]:
            units_c.append(replace(unit, name=f"{unit.name}_{i}", iterator=None))
    target = _concretize_ref(cfg.implements_target, cfg.replication, n)
    assert isinstance(target, AppRef)
    return replace(cfg, replication=None, iterators=(), implements_target=target, units=tuple(units_c))


def _instantiate_unit(unit: UnitDecl, env: dict[str, int], index: int) -> UnitDecl:
    slices = []
    for sl in unit.slices:
        if sl.index is None:
            slices.append(sl)
            continue
        value = _evaluate(sl.index, env, sl)
        slices.append(SliceDecl(sl.slice_id, sl.inner_id, f"{sl.unit_id}_{value}", None, pos=sl.pos))
    return UnitDecl(f"{unit.name}_{index}", None, tuple(slices), unit.action, pos=unit.pos)


def _concretize_inner(decl: InnerDecl, symbol: str, n: int) -> InnerDecl:
    return replace(decl, type_ref=_concretize_ref(decl.type_ref, symbol, n))


def _concretize_ref(ref: TypeRef, symbol: str, n: int) -> TypeRef:
    if isinstance(ref, AppRef):
        replication = str(n) if ref.replication == symbol else ref.replication
        return AppRef(
            ref.name,
            tuple(_concretize_ref(a, symbol, n) for a in ref.args),
            replication,
            pos=ref.pos,
        )
    return ref


def _evaluate(expr: IndexExpr, env: dict[str, int], node) -> int:
    try:
        return expr.evaluate(env)
    except KeyError as exc:
        raise IteratorBoundMismatch(
            f"index expression {expr.render()!r} uses unknown symbol {exc.args[0]!r}", node.pos
        ) from exc
