"""Structural well-formedness of abstract configurations.

The central rule: every unit of every inner component must be folded as a
slice of exactly one unit of the enclosing configuration. Also checked: no
free variables, slice targets reference declared inners and real units, and
public-inner supply lists are arity- and kind-consistent with the supplied
configuration. Findings come back as diagnostics, never exceptions.
"""

from __future__ import annotations

from .errors import Diagnostic, HclError
from .model import Context, EMPTY_CONTEXT, VarType, units_of
from .syntax import AbstractConfig, AppRef, TopRef, TypeRef, VarRef
from . import typer


def check_wellformed(cfg: AbstractConfig, linked) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    param_names = set(cfg.param_names())

    # Context from the declared bounds; a failing bound is reported and the
    # variable left unbound for the rest of the checks.
    ctx: Context = EMPTY_CONTEXT
    for param in cfg.params:
        try:
            bound = typer.type_ref(param.bound, ctx, linked)
            ctx = ctx.extend(param.var, bound.type)
        except HclError as exc:
            diags.append(Diagnostic(type(exc).__name__, exc.message, exc.pos))

    for ref in _body_refs(cfg):
        if isinstance(ref, VarRef) and ref.name not in param_names:
            diags.append(Diagnostic("FreeVariable", f"free variable {ref.name!r}", ref.pos))

    inner_ids = {d.inner_id for d in cfg.inners}
    inner_units: dict[str, tuple[str, ...] | None] = {}
    for decl in cfg.inners:
        inner_units[decl.inner_id] = _units_offered(decl.type_ref, ctx, linked, diags)
        for supplier in decl.supplied:
            if supplier not in inner_ids:
                diags.append(
                    Diagnostic(
                        "InvalidSupplyRef",
                        f"inner {decl.inner_id!r} supplies {supplier!r}, which is not a declared inner",
                        decl.pos,
                    )
                )
        if decl.supplied and isinstance(decl.type_ref, AppRef) and linked.has_abstract(decl.type_ref.name):
            head_cfg = linked.lookup_abstract(decl.type_ref.name).cfg
            if len(decl.supplied) != len(head_cfg.public_inners):
                diags.append(
                    Diagnostic(
                        "SupplyArityMismatch",
                        f"inner {decl.inner_id!r} supplies {len(decl.supplied)} components; "
                        f"{head_cfg.name} has {len(head_cfg.public_inners)} public inner components",
                        decl.pos,
                    )
                )
            else:
                for supplier, pub_label in zip(decl.supplied, head_cfg.public_inners):
                    supplier_decl = cfg.inner(supplier)
                    target_decl = head_cfg.inner(pub_label)
                    if supplier_decl is None or target_decl is None:
                        continue
                    if supplier_decl.kind != target_decl.kind:
                        diags.append(
                            Diagnostic(
                                "SupplyKindMismatch",
                                f"inner {decl.inner_id!r}: supplied {supplier!r} has kind "
                                f"{supplier_decl.kind} but {head_cfg.name}.{pub_label} expects {target_decl.kind}",
                                decl.pos,
                            )
                        )

    # Slice target validity plus the exactly-once folding rule.
    fold_count: dict[tuple[str, str], int] = {}
    for unit in cfg.units:
        for sl in unit.slices:
            if sl.inner_id not in inner_ids:
                diags.append(
                    Diagnostic(
                        "UnknownInner",
                        f"slice {sl.slice_id!r} references undeclared inner {sl.inner_id!r}",
                        sl.pos,
                        subject=f"{sl.inner_id}.{sl.unit_id}",
                    )
                )
                continue
            offered = inner_units.get(sl.inner_id)
            if offered is not None and sl.unit_id not in offered:
                diags.append(
                    Diagnostic(
                        "UnknownSliceTarget",
                        f"slice {sl.slice_id!r}: {sl.inner_id}.{sl.unit_id} is not a unit of {sl.inner_id!r}",
                        sl.pos,
                        subject=f"{sl.inner_id}.{sl.unit_id}",
                    )
                )
                continue
            fold_count[(sl.inner_id, sl.unit_id)] = fold_count.get((sl.inner_id, sl.unit_id), 0) + 1

    for decl in cfg.inners:
        offered = inner_units.get(decl.inner_id)
        if offered is None:
            continue
        for unit_name in offered:
            count = fold_count.get((decl.inner_id, unit_name), 0)
            if count == 0:
                diags.append(
                    Diagnostic(
                        "UnslicedInnerUnit",
                        f"unit {unit_name!r} of inner {decl.inner_id!r} is a slice of no unit",
                        decl.pos,
                        subject=f"{decl.inner_id}.{unit_name}",
                    )
                )
            elif count > 1:
                diags.append(
                    Diagnostic(
                        "DuplicateSliceTarget",
                        f"unit {unit_name!r} of inner {decl.inner_id!r} is a slice of {count} units; exactly one expected",
                        decl.pos,
                        subject=f"{decl.inner_id}.{unit_name}",
                    )
                )
    return diags


def check_concrete(cfg, linked) -> list[Diagnostic]:
    """Link-level checks for a concrete configuration: it must type against
    its implemented abstract and declare exactly the abstract's unit names."""
    diags: list[Diagnostic] = []
    try:
        typer.type_concrete(cfg, linked)
    except HclError as exc:
        diags.append(Diagnostic(type(exc).__name__, exc.message, exc.pos))
    if linked.has_abstract(cfg.implements_target.name):
        abs_cfg = linked.lookup_abstract(cfg.implements_target.name).cfg
        expected = sorted(u.name for u in abs_cfg.units)
        declared = sorted(u.name for u in cfg.units)
        if expected != declared:
            diags.append(
                Diagnostic(
                    "UnitNamesMismatch",
                    f"{cfg.name} declares units {', '.join(declared)}; "
                    f"{abs_cfg.name} requires {', '.join(expected)}",
                    cfg.pos,
                )
            )
    return diags


def _units_offered(ref: TypeRef, ctx: Context, linked, diags: list[Diagnostic]) -> tuple[str, ...] | None:
    """Unit names the referenced component offers, or None when undecidable
    (the undecidable cases already produced a diagnostic)."""
    if isinstance(ref, AppRef):
        if not linked.has_abstract(ref.name):
            diags.append(Diagnostic("UnknownConfig", f"unknown configuration {ref.name!r}", ref.pos))
            return None
        shape = linked.abstract_type(ref.name).shape
        return tuple(u.name for u in shape.units)
    if isinstance(ref, VarRef):
        try:
            return units_of(VarType(ref.name), ctx)
        except HclError:
            return None
    if isinstance(ref, TopRef):
        return ()
    return None


def _body_refs(cfg: AbstractConfig):
    """Every type reference in the configuration, bounds included, leaves of
    applications walked."""

    def walk(ref: TypeRef):
        yield ref
        if isinstance(ref, AppRef):
            for a in ref.args:
                yield from walk(a)

    for param in cfg.params:
        yield from walk(param.bound)
    for decl in cfg.inners:
        yield from walk(decl.type_ref)
