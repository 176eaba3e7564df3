"""Deterministic resolution of a demanded component type against a registry.

Two phases. ``sort`` computes a total order over the parameter nodes of the
demand's recursive argument tree: children are marked before their parent and
the demand itself is marked last, with each node's ``next`` pointer running
backward to the previously marked node. ``resolve`` then walks that chain:
each node is reset to its originally demanded type and stepped through its
least proper supertypes, re-entering deeper nodes at every step, until the
current working demand has a deployed implementation or the node's candidate
reaches the kind's top (which is never installed).

The search terminates on every input (finitely many parameter nodes, each
hierarchy chain finite and topped) and is deterministic (single inheritance
gives one supertype per step; the singleton discipline gives at most one
implementation per abstract).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NoImplementation, UnknownConfig
from .model import ComponentType, HashType, TopType, kind_of, render_type
from .registry import Registry
from .syntax import ConcreteConfig

Path = tuple[int, ...]

# Safety valve for the search; generated-hierarchy property runs assert the
# real visit counts stay far below it.
MAX_VISITS = 1_000_000


@dataclass
class Chain:
    """Marking order and backward links over the demand's parameter nodes.

    Paths index into the nested argument tree; () is the demand itself."""

    marking_order: list[Path]
    next_of: dict[Path, Path | None]


def sort(ctop: HashType) -> Chain:
    """Depth-first, children-before-parent marking; ``next`` links run from
    each marked node to the previously marked one. The node handed to the
    generalization walk first is therefore the last-marked parameter."""
    order: list[Path] = []

    def visit(node: ComponentType, path: Path):
        if not isinstance(node, HashType):
            return
        for i, arg in enumerate(node.args):
            visit(arg, path + (i,))
        order.append(path)

    visit(ctop, ())
    next_of: dict[Path, Path | None] = {}
    previous: Path | None = None
    for path in order:
        next_of[path] = previous
        previous = path
    return Chain(order, next_of)


@dataclass
class Resolution:
    implementation: ConcreteConfig
    implementation_type: HashType
    demand: HashType  # the working demand satisfied at success
    visited: list[HashType] = field(default_factory=list)


class _Search:
    def __init__(self, ctop: HashType, reg: Registry):
        self.reg = reg
        self.original: dict[Path, HashType] = {}
        self.heads: dict[Path, ComponentType] = {}
        self.children: dict[Path, list[Path]] = {}

        def index(node: ComponentType, path: Path):
            if not isinstance(node, HashType):
                return
            self.original[path] = node
            self.heads[path] = node.base
            self.children[path] = []
            for i, arg in enumerate(node.args):
                if isinstance(arg, HashType):
                    self.children[path].append(path + (i,))
                index(arg, path + (i,))

        index(ctop, ())
        self.static_args: dict[Path, dict[int, ComponentType]] = {}
        for path, node in self.original.items():
            self.static_args[path] = {
                i: arg for i, arg in enumerate(node.args) if not isinstance(arg, HashType)
            }
        self.chain = sort(ctop)
        self.visited: list[HashType] = []
        self.checks = 0

    def build(self, path: Path = ()) -> HashType:
        node = self.original[path]
        args: list[ComponentType] = []
        for i in range(len(node.args)):
            child = path + (i,)
            if child in self.original:
                args.append(self.build(child))
            else:
                args.append(self.static_args[path][i])
        base = self.heads[path]
        assert not isinstance(base, TopType)
        return HashType(base, tuple(args))  # type: ignore[arg-type]

    def has_implementation(self, demand: HashType) -> bool:
        self.checks += 1
        if self.checks > MAX_VISITS:
            raise RuntimeError("resolution visit budget exceeded")
        return self.reg.implementation_of(demand) is not None

    def record(self, demand: HashType):
        if not self.visited or self.visited[-1] != demand:
            self.visited.append(demand)

    def reset(self, path: Path):
        self.heads[path] = self.original[path].base
        for child in self.children[path]:
            self.reset(child)

    def try_generalize(self, path: Path | None):
        if path is None:
            return
        if self.has_implementation(self.build()):
            return
        self.reset(path)
        candidate: ComponentType = self.build(path)
        while True:
            self.heads[path] = candidate.base  # install the candidate at this node
            self.try_generalize(self.chain.next_of[path])
            working = self.build()
            self.record(working)
            if self.has_implementation(working):
                return
            candidate = self.reg.least_proper_supertype(self.build(path))
            if isinstance(candidate, TopType):
                return


def resolve(ctop: HashType, reg: Registry) -> Resolution:
    """Find the deployed implementation for a demanded component type,
    generalizing context parameters in the deterministic order when the
    demand itself is not satisfied. Raises NoImplementation when the whole
    generalization space is exhausted."""
    if not reg.has_abstract(ctop.base.name):
        raise UnknownConfig(f"unknown configuration {ctop.base.name!r}")
    search = _Search(ctop, reg)
    search.try_generalize(search.chain.next_of[()])
    final = search.build()
    search.record(final)
    found = reg.implementation_of(final)
    if found is None:
        exc = NoImplementation(
            f"no deployed implementation satisfies {render_type(ctop)} "
            f"(kind {kind_of(ctop).value}); last working demand {render_type(final)}"
        )
        exc.visited = search.visited  # type: ignore[attr-defined]
        raise exc
    cfg, typed = found
    return Resolution(cfg, typed, final, search.visited)
