"""hashcl: a toolchain for the HCL component configuration language.

Parse abstract and concrete configurations, compute their types, decide
subtyping, resolve deployed implementations against a registry, and emit
object-oriented stub sources.
"""

from .errors import Diagnostic, HclError, NoImplementation, Pos
from .iterators import expand_iterators
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
    kind_of,
    render_type,
    substitute,
    units_of,
)
from .parser import parse, parse_type_ref
from .registry import Registry
from .resolver import Resolution, resolve, sort
from .subtyping import SubtypeQuery, SubtypeTrace, is_subtype, shape_subtype, subtypes
from .syntax import AbstractConfig, ConcreteConfig, Kind, pretty_print
from .tracelang import TraceLang, equivalent, includes, parse_regex, project
from .typer import TypingResult, type_abstract, type_apply, type_concrete, type_supply
from .codegen import StubFile, emit_interpretation, gen_class, gen_interface, gen_prelude
from .wellformed import check_concrete, check_wellformed

__version__ = "0.1.0"

__all__ = [
    "AbstractConfig",
    "AbstractType",
    "ComponentType",
    "ConcreteConfig",
    "Context",
    "Diagnostic",
    "EMPTY_CONTEXT",
    "HashType",
    "HclError",
    "Kind",
    "NoImplementation",
    "Pos",
    "Registry",
    "Resolution",
    "Shape",
    "StubFile",
    "SubtypeQuery",
    "SubtypeTrace",
    "TopType",
    "TraceLang",
    "TypingResult",
    "UnitSig",
    "VarType",
    "check_concrete",
    "check_wellformed",
    "emit_interpretation",
    "equivalent",
    "expand_iterators",
    "free_vars",
    "gen_class",
    "gen_interface",
    "gen_prelude",
    "includes",
    "is_subtype",
    "kind_of",
    "parse",
    "parse_regex",
    "parse_type_ref",
    "pretty_print",
    "project",
    "render_type",
    "resolve",
    "shape_subtype",
    "sort",
    "subtypes",
    "substitute",
    "type_abstract",
    "type_apply",
    "type_concrete",
    "type_supply",
    "units_of",
]
