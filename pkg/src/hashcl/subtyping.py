"""Decidable subtyping over configuration types.

Rules: Reflexive (syntactic equality), Top (kind-guarded), Abstract Component
(identical bounds, shapes compared under the extended context), #-Component
(bases compared recursively, arguments CONTRAVARIANT), Shape (structural
conditions below), plus the nominal hierarchy axioms contributed by declared
``extends`` edges. The Transitive rule is realized by variable promotion and
hierarchy-edge chaining, never by searching for a middle type, which keeps
the checker deterministic and terminating.

Every decision returns a derivation trace; on failure the trace names the
first violated condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Protocol

from .model import (
    AbstractType,
    ComponentType,
    Context,
    EMPTY_CONTEXT,
    HashType,
    Shape,
    TopType,
    VarType,
    kind_of,
    render_type,
)
from .tracelang import includes, project


class Hierarchy(Protocol):
    """What the checker needs from a registry: the declared parent edges."""

    def parent_of(self, name: str) -> Optional[str]: ...

    def has_abstract(self, name: str) -> bool: ...


class _EmptyHierarchy:
    def parent_of(self, name: str) -> Optional[str]:
        return None

    def has_abstract(self, name: str) -> bool:
        return False


EMPTY_HIERARCHY = _EmptyHierarchy()


@dataclass
class SubtypeQuery:
    gamma: Context
    left: ComponentType
    right: ComponentType


@dataclass
class SubtypeTrace:
    rule: str
    conclusion: str
    ok: bool
    note: str = ""
    premises: list["SubtypeTrace"] = field(default_factory=list)

    def render(self, indent: int = 0) -> str:
        mark = "" if self.ok else " [FAILED" + (f": {self.note}" if self.note else "") + "]"
        line = "  " * indent + f"{self.rule}: {self.conclusion}{mark}"
        return "\n".join([line] + [p.render(indent + 1) for p in self.premises])


def _conc(s: ComponentType, t: ComponentType) -> str:
    return f"{render_type(s)} <: {render_type(t)}"


def is_subtype(q: SubtypeQuery, reg: Hierarchy | None = None) -> tuple[bool, SubtypeTrace]:
    """Decide gamma |- left <: right and return the derivation."""
    return _decide(q.gamma, q.left, q.right, reg or EMPTY_HIERARCHY)


def subtypes(left: ComponentType, right: ComponentType, reg: Hierarchy | None = None,
             gamma: Context = EMPTY_CONTEXT) -> bool:
    ok, _ = _decide(gamma, left, right, reg or EMPTY_HIERARCHY)
    return ok


def _decide(gamma: Context, s: ComponentType, t: ComponentType, reg: Hierarchy) -> tuple[bool, SubtypeTrace]:
    conclusion = _conc(s, t)

    if s == t:
        return True, SubtypeTrace("Reflexive", conclusion, True)

    if isinstance(t, TopType):
        kind = kind_of(s, gamma)
        if kind == t.kind:
            return True, SubtypeTrace("Top", conclusion, True)
        return False, SubtypeTrace("Top", conclusion, False, note=f"kind {kind} is not {t.kind.value}")

    if isinstance(s, VarType):
        bound = gamma.lookup(s.name)
        ok, sub = _decide(gamma, bound, t, reg)
        node = SubtypeTrace("Promote", conclusion, ok, note=f"{s.name} promoted to its bound", premises=[sub])
        return ok, node

    if isinstance(t, VarType):
        return False, SubtypeTrace("Fail", conclusion, False, note="nothing but itself is below a variable")

    if isinstance(s, TopType):
        return False, SubtypeTrace("Fail", conclusion, False, note="a top is maximal within its kind")

    if isinstance(s, HashType) and isinstance(t, HashType):
        ok_base, base_trace = _decide(gamma, s.base, t.base, reg)
        node = SubtypeTrace("#-Component", conclusion, True, premises=[base_trace])
        if not ok_base:
            node.ok = False
            node.note = "base abstract components are unrelated"
            return False, node
        if len(s.args) != len(t.args):
            node.ok = False
            node.note = f"argument count {len(s.args)} != {len(t.args)}"
            return False, node
        for i, (sa, ta) in enumerate(zip(s.args, t.args)):
            ok_arg, arg_trace = _decide(gamma, ta, sa, reg)  # contravariant
            node.premises.append(arg_trace)
            if not ok_arg:
                node.ok = False
                node.note = f"argument {i + 1} fails contravariantly"
                return False, node
        return True, node

    if isinstance(s, AbstractType) and isinstance(t, AbstractType):
        chain = _hierarchy_chain(s.name, t.name, reg)
        if chain is not None:
            note = " <: ".join(chain)
            return True, SubtypeTrace("Hierarchy", conclusion, True, note=f"declared extends chain {note}")
        # Nominal discipline: structural shape recursion relates only two
        # views of the same named component (identical bounds); unrelated
        # names need a declared extends chain.
        if s.name == t.name and s.bounds == t.bounds:
            inner = gamma.extend_all(s.bounds)
            ok, sub = _decide(inner, s.shape, t.shape, reg)
            node = SubtypeTrace("Abstract Component", conclusion, ok, premises=[sub])
            return ok, node
        return False, SubtypeTrace(
            "Fail", conclusion, False, note="no declared extends chain relates these components"
        )

    if isinstance(s, Shape) and isinstance(t, Shape):
        return shape_subtype(gamma, s, t, reg)

    # Degenerate parameterless forms: a zero-argument application and its
    # base abstract type denote the same component.
    if isinstance(s, HashType) and not s.args and isinstance(t, (AbstractType, Shape)):
        return _decide(gamma, s.base, t, reg)
    if isinstance(t, HashType) and not t.args and isinstance(s, (AbstractType, Shape)):
        return _decide(gamma, s, t.base, reg)

    if isinstance(s, AbstractType) and not s.bounds and isinstance(t, Shape):
        return shape_subtype(gamma, s.shape, t, reg)
    if isinstance(s, Shape) and isinstance(t, AbstractType) and not t.bounds:
        return shape_subtype(gamma, s, t.shape, reg)

    return False, SubtypeTrace("Fail", conclusion, False, note="no rule relates these forms")


def _hierarchy_chain(sub: str, sup: str, reg: Hierarchy) -> list[str] | None:
    """The declared extends chain from sub up to sup, if one exists."""
    chain = [sub]
    current = sub
    seen = {sub}
    while True:
        parent = reg.parent_of(current)
        if parent is None:
            return None
        chain.append(parent)
        if parent == sup:
            return chain
        if parent in seen:  # defensive; load rejects cycles
            return None
        seen.add(parent)
        current = parent


def shape_subtype(gamma: Context, s1: Shape, s2: Shape, reg: Hierarchy | None = None) -> tuple[bool, SubtypeTrace]:
    """The Shape rule. Conditions, in order: equal kinds; equal public label
    sets; the subtype's full inner label set contains the supertype's; equal
    unit name sets; per unit, the subtype's slice map contains the
    supertype's bindings; per unit, the subtype's trace projected onto the
    supertype's slice domain is included in the supertype's trace; matched
    public inners CONTRAVARIANT; matched private inners COVARIANT."""
    reg = reg or EMPTY_HIERARCHY
    conclusion = _conc(s1, s2)
    node = SubtypeTrace("Shape", conclusion, True)

    def fail(note: str) -> tuple[bool, SubtypeTrace]:
        node.ok = False
        node.note = note
        return False, node

    if s1.kind != s2.kind:
        return fail(f"kind {s1.kind.value} != {s2.kind.value}")

    pub1 = {lab for lab, _ in s1.public_inners}
    pub2 = {lab for lab, _ in s2.public_inners}
    if pub1 != pub2:
        return fail("public inner label sets differ")

    all1 = {lab for lab, _ in s1.all_inners()}
    all2 = {lab for lab, _ in s2.all_inners()}
    if not all2 <= all1:
        missing = ", ".join(sorted(all2 - all1))
        return fail(f"subtype is missing inner components: {missing}")

    units1 = {u.name: u for u in s1.units}
    units2 = {u.name: u for u in s2.units}
    if set(units1) != set(units2):
        return fail("unit name sets differ")

    for name in units2:
        u1, u2 = units1[name], units2[name]
        sig1, sig2 = u1.sigma_map(), u2.sigma_map()
        for label, target in sig2.items():
            if sig1.get(label) != target:
                return fail(f"unit {name}: slice map does not contain {label}->{target[0]}.{target[1]}")
        projected = project(u1.trace, sig2.keys())
        if not includes(projected, u2.trace):
            return fail(f"unit {name}: projected trace language not included in supertype's")

    priv1 = dict(s1.private_inners)
    for label, t2 in s2.public_inners:
        t1 = dict(s1.public_inners)[label]
        ok, sub = _decide(gamma, t2, t1, reg)  # contravariant
        node.premises.append(sub)
        if not ok:
            return fail(f"public inner {label} fails contravariantly")
    for label, t2 in s2.private_inners:
        if label not in priv1:
            continue
        ok, sub = _decide(gamma, priv1[label], t2, reg)  # covariant
        node.premises.append(sub)
        if not ok:
            return fail(f"private inner {label} fails covariantly")

    return True, node
