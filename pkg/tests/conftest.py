"""Shared fixtures and independent oracles.

The brute-force language oracle translates trace regexes into Python ``re``
patterns and enumerates words, deliberately avoiding the package's own
NFA/DFA machinery so automaton results are checked against an independent
route.
"""

from __future__ import annotations

import itertools
import random
import re as pyre
from pathlib import Path

import pytest

from hashcl.syntax import (
    AbstractConfig,
    AppRef,
    ConcreteConfig,
    ConcreteUnit,
    Kind,
    Param,
    TopRef,
    UnitDecl,
    VarRef,
)
from hashcl.registry import Registry
from hashcl.tracelang import Alt, Concat, Eps, Regex, Star, Sym, TraceLang

REPO = Path(__file__).resolve().parent.parent
CORPUS = REPO / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def channels_reg() -> Registry:
    return Registry.load(CORPUS / "channels")


@pytest.fixture(scope="session")
def matvec_reg() -> Registry:
    return Registry.load(CORPUS / "matvec")


@pytest.fixture(scope="session")
def matvec_oo_reg() -> Registry:
    return Registry.load(CORPUS / "matvec_oo")


# --- brute-force language oracle ------------------------------------------------

_CHARS = "abcdefghijklmnopqrstuvwxyz"


def _symbol_chars(alphabet) -> dict[str, str]:
    symbols = sorted(alphabet)
    assert len(symbols) <= len(_CHARS)
    return {sym: _CHARS[i] for i, sym in enumerate(symbols)}


def to_python_re(r: Regex, chars: dict[str, str]) -> str:
    if isinstance(r, Eps):
        return "(?:)"
    if isinstance(r, Sym):
        return pyre.escape(chars[r.name])
    if isinstance(r, Concat):
        return "".join(f"(?:{to_python_re(p, chars)})" for p in r.parts)
    if isinstance(r, Alt):
        return "(?:" + "|".join(to_python_re(p, chars) for p in r.parts) + ")"
    if isinstance(r, Star):
        return f"(?:{to_python_re(r.inner, chars)})*"
    raise TypeError(r)


def brute_words(lang: TraceLang, alphabet, max_len: int) -> set[tuple[str, ...]]:
    """All words of the language up to max_len, enumerated over the given
    alphabet and decided by Python's re engine."""
    alphabet = sorted(set(alphabet))
    chars = _symbol_chars(alphabet)
    if lang.regex is None:
        ok = lambda word: all(s in lang.alphabet for s in word)  # noqa: E731
    else:
        pattern = pyre.compile(to_python_re(lang.regex, chars) + r"\Z")
        ok = lambda word: pattern.match("".join(chars[s] for s in word)) is not None  # noqa: E731
    out: set[tuple[str, ...]] = set()
    for n in range(max_len + 1):
        for word in itertools.product(alphabet, repeat=n):
            if ok(word):
                out.add(word)
    return out


def brute_includes(sub: TraceLang, sup: TraceLang, max_len: int) -> bool:
    alphabet = sub.alphabet | sup.alphabet
    return brute_words(sub, alphabet, max_len) <= brute_words(sup, alphabet, max_len)


def random_regex(rng: random.Random, alphabet: list[str], depth: int = 3) -> Regex:
    """Small random regex; shapes bounded so counterexamples to inclusion
    stay short (leaves <= 8, star depth <= 2)."""
    if depth <= 0 or rng.random() < 0.35:
        return Sym(rng.choice(alphabet)) if rng.random() < 0.85 else Eps()
    roll = rng.random()
    if roll < 0.35:
        return Concat(tuple(random_regex(rng, alphabet, depth - 1) for _ in range(rng.randint(2, 3))))
    if roll < 0.7:
        return Alt(tuple(random_regex(rng, alphabet, depth - 1) for _ in range(rng.randint(2, 3))))
    return Star(random_regex(rng, alphabet, depth - 1))


# --- synthetic registries --------------------------------------------------------

def leaf_config(name: str, kind: Kind, parent: str | None = None, params: int = 0) -> AbstractConfig:
    return AbstractConfig(
        name=name,
        kind=kind,
        replication=None,
        params=tuple(Param(f"P{i}", TopRef(kind)) for i in range(params)),
        public_inners=(),
        inners=(),
        units=(UnitDecl("u"),),
        extends_parent=parent,
    )


def impl_config(name: str, head: AbstractConfig, bound_refs: list[AppRef]) -> ConcreteConfig:
    params = tuple(Param(f"X{i}", ref) for i, ref in enumerate(bound_refs))
    args = tuple(VarRef(f"X{i}") for i in range(len(bound_refs)))
    return ConcreteConfig(
        name=name,
        kind=head.kind,
        replication=None,
        params=params,
        implements_target=AppRef(head.name, args),
        version=(1, 0, 0, 0),
        units=tuple(ConcreteUnit(u.name) for u in head.units),
    )


POOL_KINDS = (Kind.DATA, Kind.ENVIRONMENT, Kind.QUALIFIER)


def random_registry(rng: random.Random, max_abstracts: int = 20, max_depth: int = 5, max_params: int = 4):
    """A random but well-formed universe: per-kind single-inheritance forests
    of argument components (some parameterized, equal arity along every
    edge), plus one demandable head per kind with top-bounded parameters.
    Returns (registry, pools, heads)."""
    pools: dict[Kind, list[AbstractConfig]] = {k: [] for k in POOL_KINDS}
    configs: list[AbstractConfig] = []
    for kind in POOL_KINDS:  # every kind gets a parameterless root
        cfg = leaf_config(f"{kind.value[:1].upper()}root", kind)
        pools[kind].append(cfg)
        configs.append(cfg)
    total = rng.randint(4, max_abstracts)
    for i in range(total):
        kind = rng.choice(POOL_KINDS)
        arity = 1 if rng.random() < 0.3 else 0
        candidates = [
            c for c in pools[kind]
            if len(c.params) == arity and _chain_depth(c, pools[kind]) < max_depth
        ]
        parent = rng.choice(candidates).name if candidates and rng.random() < 0.7 else None
        cfg = leaf_config(f"{kind.value[:1].upper()}{i}", kind, parent, params=arity)
        pools[kind].append(cfg)
        configs.append(cfg)
    heads = []
    for kind in POOL_KINDS:
        if not pools[kind]:
            continue
        n_params = rng.randint(1, max_params)
        head = AbstractConfig(
            name=f"Head{kind.value[:1].upper()}",
            kind=Kind.COMPUTATION,
            replication=None,
            params=tuple(Param(f"X{i}", TopRef(rng.choice(POOL_KINDS))) for i in range(n_params)),
            public_inners=(),
            inners=(),
            units=(UnitDecl("u"),),
        )
        heads.append(head)
        configs.append(head)
    reg = Registry.from_configs(configs)
    return reg, pools, heads


def _chain_depth(cfg: AbstractConfig, pool: list[AbstractConfig]) -> int:
    by_name = {c.name: c for c in pool}
    depth = 0
    current = cfg
    while current.extends_parent is not None:
        depth += 1
        current = by_name[current.extends_parent]
    return depth


def random_pool_ref(rng: random.Random, kind: Kind, pools, max_nest: int = 2) -> AppRef:
    """A closed reference drawn from the kind's pool, recursively applied
    when the pick is parameterized."""
    pool = pools[kind]
    flat = [c for c in pool if not c.params]
    deep = [c for c in pool if c.params] if max_nest > 0 else []
    cfg = rng.choice(deep) if deep and rng.random() < 0.5 else rng.choice(flat)
    args = tuple(random_pool_ref(rng, p.bound.kind, pools, max_nest - 1) for p in cfg.params)
    return AppRef(cfg.name, args)


def random_demand_ref(rng: random.Random, head: AbstractConfig, pools, max_nest: int = 2) -> AppRef:
    """A closed demand for a head: each argument drawn from the matching
    kind's pool."""
    args = tuple(random_pool_ref(rng, p.bound.kind, pools, max_nest) for p in head.params)
    return AppRef(head.name, args)
