"""The environment of deployed components.

A registry is loaded from a line-oriented manifest plus the HCL files it
references. It indexes the nominal single-inheritance hierarchy of abstract
configurations, holds at most one implementation per abstract (the singleton
discipline that makes resolution deterministic), types everything on load,
and verifies that every declared ``extends`` edge is structurally sound.

Manifest records, one per line, ``#`` comments allowed:

    abstract <Name> kind <kind> extends <Parent|-> file <relpath>
    concrete <Name> implements <Abstract> version <a.b.c.d> file <relpath>

File paths are relative to the manifest's directory. The registry is
immutable once loaded; concurrent readers need no coordination.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import typer
from .errors import (
    CycleInHierarchy,
    DuplicateImplementation,
    HclError,
    ManifestError,
    Pos,
    ShapeInconsistentExtends,
    UnknownConfig,
)
from .model import (
    AbstractType,
    ComponentType,
    Context,
    EMPTY_CONTEXT,
    HashType,
    TopType,
    VarType,
    kind_of,
    render_type,
    substitute,
)
from .parser import parse
from .subtyping import shape_subtype
from .syntax import AbstractConfig, ConcreteConfig, Kind, KIND_KEYWORDS
from .wellformed import check_wellformed

MANIFEST_NAME = "registry.manifest"


@dataclass
class RegisteredAbstract:
    cfg: AbstractConfig
    parent: Optional[str]
    path: str = "<memory>"
    typed: Optional[AbstractType] = None
    obligations: list = field(default_factory=list)


@dataclass
class RegisteredConcrete:
    cfg: ConcreteConfig
    typed: HashType
    version: tuple[int, int, int, int]
    path: str = "<memory>"


class Registry:
    def __init__(self):
        self._abstracts: dict[str, RegisteredAbstract] = {}
        self._concretes: dict[str, RegisteredConcrete] = {}  # keyed by abstract name
        self.kind_tops: dict[Kind, TopType] = {k: TopType(k) for k in Kind}
        self._typing: set[str] = set()

    # --- lookups -------------------------------------------------------------

    def kind_top(self, kind: Kind) -> TopType:
        return self.kind_tops[kind]

    def has_abstract(self, name: str) -> bool:
        return name in self._abstracts

    def is_concrete_name(self, name: str) -> bool:
        return any(entry.cfg.name == name for entry in self._concretes.values())

    def abstract_names(self) -> tuple[str, ...]:
        return tuple(self._abstracts)

    def lookup_abstract(self, name: str) -> RegisteredAbstract:
        entry = self._abstracts.get(name)
        if entry is None:
            raise UnknownConfig(f"unknown configuration {name!r}")
        return entry

    def lookup_concrete(self, abstract_name: str) -> Optional[RegisteredConcrete]:
        return self._concretes.get(abstract_name)

    def parent_of(self, name: str) -> Optional[str]:
        entry = self._abstracts.get(name)
        return entry.parent if entry else None

    def abstract_type(self, name: str) -> AbstractType:
        entry = self.lookup_abstract(name)
        if entry.typed is None:
            if name in self._typing:
                raise CycleInHierarchy(f"cyclic configuration reference through {name!r}")
            self._typing.add(name)
            try:
                result = typer.type_abstract(entry.cfg, EMPTY_CONTEXT, self)
            finally:
                self._typing.discard(name)
            entry.typed = result.type  # type: ignore[assignment]
            entry.obligations = result.obligations
        return entry.typed

    # --- resolution support ----------------------------------------------------

    def least_proper_supertype(self, t: ComponentType) -> ComponentType:
        """One generalization step: the declared parent applied to the same
        arguments (parent arity equals the child's by construction), or the
        kind's top at a hierarchy root."""
        if isinstance(t, HashType):
            name = t.base.name
        elif isinstance(t, AbstractType):
            name = t.name
        else:
            raise UnknownConfig(f"no proper supertype for {render_type(t)}")
        entry = self.lookup_abstract(name)
        if entry.parent is None:
            return self.kind_top(kind_of(t))
        parent_type = self.abstract_type(entry.parent)
        if isinstance(t, HashType):
            return HashType(parent_type, t.args)
        return parent_type

    def implementation_of(self, demand: HashType) -> Optional[tuple[ConcreteConfig, HashType]]:
        """The unique registered implementation whose head matches the
        demand's head and whose type subsumes the demand, if any."""
        from .subtyping import subtypes

        entry = self._concretes.get(demand.base.name)
        if entry is None:
            return None
        if subtypes(entry.typed, demand, self):
            return entry.cfg, entry.typed
        return None

    # --- construction ------------------------------------------------------------

    @classmethod
    def from_configs(
        cls,
        abstracts: Iterable[AbstractConfig | tuple[AbstractConfig, Optional[str]] | tuple[AbstractConfig, Optional[str], str]],
        concretes: Iterable[ConcreteConfig | tuple[ConcreteConfig, str]] = (),
        *,
        wellformedness: bool = True,
    ) -> "Registry":
        """Link a registry from already-parsed configurations. An abstract
        entry may carry an explicit parent name; by default the config's own
        extends clause is used."""
        reg = cls()
        for item in abstracts:
            if isinstance(item, AbstractConfig):
                cfg, parent, path = item, item.extends_parent, "<memory>"
            elif len(item) == 2:
                cfg, parent = item  # type: ignore[misc]
                path = "<memory>"
            else:
                cfg, parent, path = item  # type: ignore[misc]
            if cfg.name in reg._abstracts:
                raise ManifestError(f"duplicate abstract configuration {cfg.name!r}")
            reg._abstracts[cfg.name] = RegisteredAbstract(cfg, parent, path)
        reg._check_hierarchy()
        for name in reg._abstracts:
            reg.abstract_type(name)
        if wellformedness:
            for name, entry in reg._abstracts.items():
                diags = check_wellformed(entry.cfg, reg)
                errors = [d for d in diags if d.severity == "error"]
                if errors:
                    d = errors[0]
                    raise HclError(f"{entry.path}: {name} is not well formed: {d.code}: {d.message}", d.pos)
        reg._check_extends_shapes()
        for item in concretes:
            if isinstance(item, ConcreteConfig):
                cfg, path = item, "<memory>"
            else:
                cfg, path = item
            reg._register_concrete(cfg, path)
        return reg

    def _check_hierarchy(self):
        for name, entry in self._abstracts.items():
            parent = entry.parent
            if parent is None:
                continue
            pentry = self._abstracts.get(parent)
            if pentry is None:
                raise ManifestError(f"{name} extends unknown configuration {parent!r}")
            if pentry.cfg.kind != entry.cfg.kind:
                raise ManifestError(
                    f"{name} (kind {entry.cfg.kind}) cannot extend {parent} (kind {pentry.cfg.kind})"
                )
            if len(pentry.cfg.params) != len(entry.cfg.params):
                raise ManifestError(
                    f"{name} has {len(entry.cfg.params)} context parameters but extends "
                    f"{parent} with {len(pentry.cfg.params)}; arity-changing inheritance is rejected"
                )
        for name in self._abstracts:
            seen = {name}
            current = name
            while True:
                parent = self._abstracts[current].parent
                if parent is None:
                    break
                if parent in seen:
                    raise CycleInHierarchy(f"extends cycle through {parent!r}")
                seen.add(parent)
                current = parent

    def _check_extends_shapes(self):
        """Every declared nominal edge must be structurally sound: the child's
        shape is a shape-subtype of the parent's, with the parent's variables
        read positionally as the child's."""
        for name, entry in self._abstracts.items():
            if entry.parent is None:
                continue
            child_t = self.abstract_type(name)
            parent_t = self.abstract_type(entry.parent)
            renaming = {
                pvar: VarType(cvar)
                for (pvar, _), (cvar, _) in zip(parent_t.bounds, child_t.bounds)
            }
            parent_shape = substitute(parent_t.shape, renaming)
            gamma = Context(child_t.bounds)
            ok, trace = shape_subtype(gamma, child_t.shape, parent_shape, self)
            if not ok:
                raise ShapeInconsistentExtends(
                    f"{name} extends {entry.parent} but its shape is not a shape subtype: {trace.note}"
                )

    def _register_concrete(self, cfg: ConcreteConfig, path: str):
        result = typer.type_concrete(cfg, self)
        typed = result.type
        assert isinstance(typed, HashType)
        abstract_name = cfg.implements_target.name
        abstract_entry = self.lookup_abstract(abstract_name)
        abstract_units = sorted(u.name for u in abstract_entry.cfg.units)
        concrete_units = sorted(u.name for u in cfg.units)
        if abstract_units != concrete_units:
            raise ManifestError(
                f"{cfg.name} implements {abstract_name} but declares units "
                f"{', '.join(concrete_units)} instead of {', '.join(abstract_units)}"
            )
        existing = self._concretes.get(abstract_name)
        if existing is not None:
            if existing.cfg.name != cfg.name:
                raise DuplicateImplementation(
                    f"{abstract_name} already has implementation {existing.cfg.name}; "
                    f"cannot also register {cfg.name}"
                )
            if existing.version >= cfg.version:
                return
        self._concretes[abstract_name] = RegisteredConcrete(cfg, typed, cfg.version, path)

    @classmethod
    def load(cls, manifest_path: str | os.PathLike) -> "Registry":
        """Load and fully link a registry from a manifest file."""
        manifest_path = os.fspath(manifest_path)
        if os.path.isdir(manifest_path):
            manifest_path = os.path.join(manifest_path, MANIFEST_NAME)
        root = os.path.dirname(manifest_path)
        try:
            with open(manifest_path, encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise ManifestError(f"cannot read manifest: {exc}") from exc

        abstracts: list[tuple[AbstractConfig, Optional[str], str]] = []
        concretes: dict[str, tuple[ConcreteConfig, str]] = {}
        for lineno, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            where = Pos(lineno, 1)
            if tokens[0] == "abstract":
                if len(tokens) != 8 or tokens[2] != "kind" or tokens[4] != "extends" or tokens[6] != "file":
                    raise ManifestError(f"malformed abstract record: {line!r}", where)
                name, kind_kw, parent_kw, rel = tokens[1], tokens[3], tokens[5], tokens[7]
                if kind_kw not in KIND_KEYWORDS:
                    raise ManifestError(f"unknown kind {kind_kw!r} in manifest", where)
                cfg = _load_config(root, rel, manifest_path, where)
                if not isinstance(cfg, AbstractConfig):
                    raise ManifestError(f"{rel}: expected an abstract configuration for {name}", where)
                if cfg.name != name:
                    raise ManifestError(f"{rel}: file declares {cfg.name!r}, manifest says {name!r}", where)
                if cfg.kind != KIND_KEYWORDS[kind_kw]:
                    raise ManifestError(f"{name}: manifest kind {kind_kw} != declared {cfg.kind}", where)
                manifest_parent = None if parent_kw == "-" else parent_kw
                if manifest_parent and cfg.extends_parent and manifest_parent != cfg.extends_parent:
                    raise ManifestError(
                        f"{name}: manifest extends {manifest_parent!r} but file declares {cfg.extends_parent!r}",
                        where,
                    )
                parent = manifest_parent or cfg.extends_parent
                abstracts.append((cfg, parent, os.path.join(root, rel)))
            elif tokens[0] == "concrete":
                if len(tokens) != 8 or tokens[2] != "implements" or tokens[4] != "version" or tokens[6] != "file":
                    raise ManifestError(f"malformed concrete record: {line!r}", where)
                name, target, version_text, rel = tokens[1], tokens[3], tokens[5], tokens[7]
                version = _parse_version(version_text, where)
                cfg = _load_config(root, rel, manifest_path, where)
                if not isinstance(cfg, ConcreteConfig):
                    raise ManifestError(f"{rel}: expected a concrete configuration for {name}", where)
                if cfg.name != name:
                    raise ManifestError(f"{rel}: file declares {cfg.name!r}, manifest says {name!r}", where)
                if cfg.implements_target.name != target:
                    raise ManifestError(
                        f"{name}: manifest says implements {target!r}, file says {cfg.implements_target.name!r}",
                        where,
                    )
                if cfg.version != version:
                    raise ManifestError(
                        f"{name}: manifest version {version_text} != declared "
                        + ".".join(map(str, cfg.version)),
                        where,
                    )
                prior = concretes.get(name)
                if prior is None or cfg.version > prior[0].version:
                    concretes[name] = (cfg, os.path.join(root, rel))
            else:
                raise ManifestError(f"unknown manifest record {tokens[0]!r}", where)
        return cls.from_configs(abstracts, concretes.values())

    # --- reporting ----------------------------------------------------------------

    def render(self) -> str:
        """Canonical text of the whole registry (used for the idempotent-load
        check and machine output)."""
        out = []
        for name in sorted(self._abstracts):
            entry = self._abstracts[name]
            parent = entry.parent or "-"
            out.append(f"abstract {name} extends {parent} : {render_type(self.abstract_type(name))}")
        for abstract in sorted(self._concretes):
            entry = self._concretes[abstract]
            version = ".".join(map(str, entry.version))
            out.append(f"concrete {entry.cfg.name} implements {abstract} version {version} : {render_type(entry.typed)}")
        return "\n".join(out) + "\n"


def _load_config(root: str, rel: str, manifest_path: str, where: Pos):
    path = os.path.join(root, rel)
    try:
        with open(path, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        raise ManifestError(f"cannot read {rel!r} referenced by manifest: {exc}", where) from exc
    try:
        return parse(source, path)
    except HclError as exc:
        exc.message = f"{rel}: {exc.message}"
        raise


def _parse_version(text: str, where: Pos) -> tuple[int, int, int, int]:
    parts = text.split(".")
    if len(parts) != 4 or not all(p.isdigit() for p in parts):
        raise ManifestError(f"version must be four dot-separated naturals, got {text!r}", where)
    return tuple(int(p) for p in parts)  # type: ignore[return-value]
