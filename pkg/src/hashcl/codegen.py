"""Object-oriented stub emission.

Per unit of an abstract configuration: a generic interface extending the kind
interface, one ``where`` clause per context variable that types a
transitively reachable slice of that unit, and one set-only property per
slice whose target inner is public. Per unit of a concrete configuration: a
class extending the base unit class and implementing the matching interface,
with the implementation's tighter bounds as constraints, backing fields and
set-properties for all slices (public visibility only for public slices,
cascading assignments into supplied inners), and a createSlices body that
materializes the private slices through the back-end factory.

Also here: the rendering of configuration types in terms of universal and
existential bounded quantification, used by the ``interp`` command. Output is
deterministic text; repeated generation is byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownConfig
from .model import (
    AbstractType,
    ComponentType,
    Context,
    EMPTY_CONTEXT,
    HashType,
    Shape,
    TopType,
    VarType,
    free_vars,
    render_type,
    shape_of,
    substitute,
)
from .syntax import AbstractConfig, AppRef, ConcreteConfig, Kind, TopRef, TypeRef, VarRef
from . import typer


@dataclass(frozen=True)
class StubFile:
    path: str
    text: str
    role: str  # "interface-stub" | "class-stub" | "interpretation-note"


def _cap(name: str) -> str:
    return name[0].upper() + name[1:] if name else name


def kind_interface(kind: Kind) -> str:
    return f"I{_cap(kind.value)}Kind"


def unit_interface(unit_name: str) -> str:
    return f"I{_cap(unit_name)}"


def unit_class(unit_name: str) -> str:
    return f"H{_cap(unit_name)}"


def _generic_arg(ref: TypeRef, rename: dict[str, str] | None = None) -> str:
    """Render a type reference as a generic argument: variables by name,
    applications as Name<...> (the interface prefix applies only to the
    slice's own interface, as in the published stubs)."""
    if isinstance(ref, VarRef):
        return rename.get(ref.name, ref.name) if rename else ref.name
    if isinstance(ref, TopRef):
        return kind_interface(ref.kind)
    if isinstance(ref, AppRef):
        if not ref.args:
            return ref.name
        return ref.name + "<" + ", ".join(_generic_arg(a, rename) for a in ref.args) + ">"
    raise TypeError(f"not a type reference: {ref!r}")


def _bound_interface(ref: TypeRef) -> str:
    """A context bound as a constraint interface: I + the configuration name
    (nominal), kind interfaces for top bounds."""
    if isinstance(ref, TopRef):
        return kind_interface(ref.kind)
    if isinstance(ref, VarRef):
        return ref.name
    if isinstance(ref, AppRef):
        if not ref.args:
            return f"I{ref.name}"
        return f"I{ref.name}<" + ", ".join(_generic_arg(a) for a in ref.args) + ">"
    raise TypeError(f"not a type reference: {ref!r}")


def _property_type(inner_ref: TypeRef, slice_unit: str, rename: dict[str, str] | None = None) -> str:
    """The interface type of a slice: the unit interface of the target inner's
    configuration, at the inner's type arguments; a variable-typed inner is
    the type parameter itself."""
    if isinstance(inner_ref, VarRef):
        return rename.get(inner_ref.name, inner_ref.name) if rename else inner_ref.name
    if isinstance(inner_ref, AppRef):
        head = unit_interface(slice_unit)
        if not inner_ref.args:
            return head
        return head + "<" + ", ".join(_generic_arg(a, rename) for a in inner_ref.args) + ">"
    raise TypeError(f"slice target cannot have a top type: {inner_ref!r}")


def _reached_vars(shape: Shape, unit_name: str, gamma: Context) -> set[str]:
    """Context variables that type a slice transitively reachable from the
    unit: direct slice target types plus recursion through the slice maps of
    the nested inner shapes (which are instantiated, so their free variables
    are the enclosing configuration's)."""
    unit = shape.unit(unit_name)
    if unit is None:
        return set()
    reached: set[str] = set()
    for _, (label, inner_unit) in unit.sigma:
        t = shape.inner_type(label)
        if t is None:
            continue
        reached |= free_vars(t)
        inner_shape = shape_of(t, gamma)
        if inner_shape is not None and inner_shape.unit(inner_unit) is not None:
            reached |= _reached_vars(inner_shape, inner_unit, gamma)
    return reached


def _typed(cfg: AbstractConfig, reg) -> AbstractType:
    if reg.has_abstract(cfg.name):
        return reg.abstract_type(cfg.name)
    result = typer.type_abstract(cfg, EMPTY_CONTEXT, reg)
    t = result.type
    assert isinstance(t, AbstractType)
    return t


def gen_interface(cfg: AbstractConfig, reg) -> list[StubFile]:
    """One interface stub per unit of an abstract configuration."""
    typed = _typed(cfg, reg)
    gamma = Context(typed.bounds)
    stubs: list[StubFile] = []
    for unit in cfg.units:
        iface = unit_interface(unit.name)
        generics = "<" + ", ".join(cfg.param_names()) + ">" if cfg.params else ""
        reached = _reached_vars(typed.shape, unit.name, gamma)
        lines = [f"namespace {cfg.name}", "{"]
        lines.append(f"  public interface {iface}{generics} : {kind_interface(cfg.kind)}")
        for param in cfg.params:
            if param.var in reached:
                lines.append(f"    where {param.var}: {_bound_interface(param.bound)}")
        lines.append("  {")
        for sl in unit.slices:
            if sl.inner_id not in cfg.public_inners:
                continue
            decl = cfg.inner(sl.inner_id)
            assert decl is not None
            lines.append(f"    {_property_type(decl.type_ref, sl.unit_id)} {_cap(sl.slice_id)} {{set;}}")
        lines.append("  }")
        lines.append("}")
        stubs.append(StubFile(f"{cfg.name}/{iface}.cs", "\n".join(lines) + "\n", "interface-stub"))
    return stubs


def gen_class(cfg: ConcreteConfig, reg) -> list[StubFile]:
    """One class stub per unit of the implemented abstract configuration."""
    target = cfg.implements_target
    if not reg.has_abstract(target.name):
        raise UnknownConfig(f"unknown configuration {target.name!r}", target.pos)
    abs_entry = reg.lookup_abstract(target.name)
    abs_cfg: AbstractConfig = abs_entry.cfg
    typed_abs = reg.abstract_type(target.name)
    gamma = Context(typed_abs.bounds)

    # Positional correspondence: abstract parameter name -> rendered target
    # argument, used to express the abstract's property types in the class's
    # own generic vocabulary.
    rename = {
        abs_param.var: _generic_arg(arg)
        for abs_param, arg in zip(abs_cfg.params, target.args)
    }

    stubs: list[StubFile] = []
    for unit in abs_cfg.units:
        cls = unit_class(unit.name)
        iface = unit_interface(unit.name)
        generics = "<" + ", ".join(cfg.param_names()) + ">" if cfg.params else ""
        iface_args = "<" + ", ".join(_generic_arg(a) for a in target.args) + ">" if target.args else ""
        reached = _reached_vars(typed_abs.shape, unit.name, gamma)
        lines = [f"namespace {cfg.name}", "{"]
        lines.append(f"  public class {cls}{generics} : Unit, {abs_cfg.name}.{iface}{iface_args}")
        for param in cfg.params:
            if _var_reached(param.var, target, abs_cfg, reached):
                lines.append(f"    where {param.var}: {_bound_interface(param.bound)}")
        lines.append("  {")

        private_slices = [sl for sl in unit.slices if sl.inner_id not in abs_cfg.public_inners]
        for sl in unit.slices:
            decl = abs_cfg.inner(sl.inner_id)
            assert decl is not None
            ptype = _property_type(decl.type_ref, sl.unit_id, rename)
            visibility = "private" if sl in private_slices else "public"
            assigns = [f"this.{sl.slice_id}"]
            for other in unit.slices:
                if other is sl:
                    continue
                other_decl = abs_cfg.inner(other.inner_id)
                if other_decl is None or sl.inner_id not in other_decl.supplied:
                    continue
                prop = _supplied_property(other_decl, other.unit_id, sl.inner_id, reg)
                if prop is not None:
                    assigns.append(f"{other.slice_id}.{prop}")
            setter = " = ".join(assigns) + " = value;"
            lines.append(f"    private {ptype} {sl.slice_id} = null;")
            lines.append(f"    {visibility} {ptype} {_cap(sl.slice_id)} {{ set {{ {setter} }} }}")
        lines.append("")
        lines.append("    public void createSlices()")
        lines.append("    {")
        lines.append("      base.createSlices();")
        for sl in private_slices:
            decl = abs_cfg.inner(sl.inner_id)
            assert decl is not None
            ptype = _property_type(decl.type_ref, sl.unit_id, rename)
            lines.append(
                f"      this.{_cap(sl.slice_id)} = ({ptype}) BackEnd.createSlice(this, \"{sl.inner_id}\");"
            )
        lines.append("    }")
        lines.append("")
        lines.append(f"    public {cls}() {{ }}")
        if cfg.kind == Kind.COMPUTATION:
            lines.append("    public void compute()")
            lines.append("    {")
            lines.append("      // Generics are invariant here: a value of a type parameter must be")
            lines.append("      // created reflectively from the parameter itself, never instantiated")
            lines.append("      // from some implementation class chosen at compile time.")
            lines.append("    }")
        lines.append("  }")
        lines.append("}")
        stubs.append(StubFile(f"{cfg.name}/{cls}.cs", "\n".join(lines) + "\n", "class-stub"))
    return stubs


def _var_reached(var: str, target: AppRef, abs_cfg: AbstractConfig, reached: set[str]) -> bool:
    for pos, arg in enumerate(target.args):
        if isinstance(arg, VarRef) and arg.name == var:
            if abs_cfg.params[pos].var in reached:
                return True
    return False


def _supplied_property(inner_decl, inner_unit: str, supplier: str, reg) -> str | None:
    """Property name, in the supplied-to inner's unit interface, of the public
    inner that ``supplier`` fills (positional supply)."""
    ref = inner_decl.type_ref
    if not isinstance(ref, AppRef) or not reg.has_abstract(ref.name):
        return None
    head_cfg: AbstractConfig = reg.lookup_abstract(ref.name).cfg
    try:
        pub_label = head_cfg.public_inners[inner_decl.supplied.index(supplier)]
    except (ValueError, IndexError):
        return None
    unit = next((u for u in head_cfg.units if u.name == inner_unit), None)
    if unit is None:
        return None
    for sl in unit.slices:
        if sl.inner_id == pub_label:
            return _cap(sl.slice_id)
    return None


PRELUDE_PATH = "prelude/Prelude.cs"


def gen_prelude() -> StubFile:
    """Static runtime surface the stubs compile against: the seven kind
    interfaces, the base unit class, and the back-end slice factory. A
    skeleton, not a runtime."""
    lines = []
    for kind in Kind:
        if kind == Kind.COMPUTATION:
            lines.append(f"public interface {kind_interface(kind)} {{ void compute(); }}")
        else:
            lines.append(f"public interface {kind_interface(kind)} {{ }}")
    lines.append("")
    lines.append("public class Unit")
    lines.append("{")
    lines.append("  public virtual void createSlices() { }")
    lines.append("}")
    lines.append("")
    lines.append("public static class BackEnd")
    lines.append("{")
    lines.append("  // Deployment-time factory; createSlices bodies cast its result to the")
    lines.append("  // slice interface. The mutually recursive instantiation walk lives in")
    lines.append("  // the component platform, not in generated code.")
    lines.append("  public static object createSlice(Unit owner, string innerLabel) { return null; }")
    lines.append("}")
    return StubFile(PRELUDE_PATH, "\n".join(lines) + "\n", "interface-stub")


# --- bounded-quantification interpretation -----------------------------------

def emit_interpretation(t: ComponentType) -> str:
    """Render a configuration type with universal and existential bounded
    quantification: an abstract type becomes a type operator over a
    universally quantified package type; an implementation becomes the
    package it provides at its representation bounds."""
    if isinstance(t, AbstractType):
        if not t.bounds:
            return render_type(t.shape)
        n = len(t.bounds)
        xs = _fresh_names("X", n, {v for v, _ in t.bounds})
        ys = _fresh_names("Y", n, {v for v, _ in t.bounds} | set(xs))
        lam_bounds = _operator_bounds(t, xs)
        lams = " ".join(f"λ{x}<:{b}." for x, b in zip(xs, lam_bounds))
        foralls = " ".join(f"∀{y}<:{x}." for y, x in zip(ys, xs))
        exists = " ".join(f"∃{v}<:{render_type(b)};" for v, b in t.bounds)
        return f"{lams} {foralls} {{{exists} {render_type(t.shape)}}}"
    if isinstance(t, HashType):
        base = t.base
        if not base.bounds:
            return render_type(base.shape)
        n = len(base.bounds)
        ys = _fresh_names("Y", n, {v for v, _ in base.bounds})
        lams = " ".join(f"λ{y}<:{render_type(arg)}." for y, arg in zip(ys, t.args))
        package = "{" + ", ".join(f"*{y}" for y in ys) + "; t}"
        exists = " ".join(f"∃{v}<:{render_type(b)};" for v, b in base.bounds)
        return f"{lams} ({package} as {{{exists} {render_type(base.shape)}}})"
    if isinstance(t, (Shape, TopType, VarType)):
        return render_type(t)
    raise TypeError(f"no interpretation for {t!r}")


def _fresh_names(prefix: str, n: int, avoid: set[str]) -> list[str]:
    names = []
    i = 1
    while len(names) < n:
        candidate = f"{prefix}{i}"
        if candidate not in avoid:
            names.append(candidate)
        i += 1
    return names


def _operator_bounds(t: AbstractType, xs: list[str]) -> list[str]:
    """Bounds for the lambda row; a bound mentioning an earlier bound
    variable refers to the corresponding operator parameter there."""
    rendered = []
    mapping: dict[str, ComponentType] = {}
    for (var, bound), x in zip(t.bounds, xs):
        rendered.append(render_type(substitute(bound, mapping)))
        mapping[var] = VarType(x)
    return rendered
