"""Trace languages for unit actions.

A unit's action denotes a regular language over its slice labels. This module
gives that denotation teeth: a regex surface syntax (identifiers, juxtaposition
for concatenation, ``|``, ``*``, parentheses, ``eps``), compilation to an NFA,
determinization by subset construction, and the two operations the shape
subtype check needs: projection (erase symbols outside a kept set) and
language inclusion (decided via complement + intersection + emptiness).

Values are immutable; compilation happens eagerly so sharing across threads
is safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import HclSyntaxError, Pos


# --- regex AST -------------------------------------------------------------

class Regex:
    """Base class; concrete nodes are Eps, Sym, Concat, Alt, Star."""

    __slots__ = ()


@dataclass(frozen=True)
class Eps(Regex):
    pass


@dataclass(frozen=True)
class Sym(Regex):
    name: str


@dataclass(frozen=True)
class Concat(Regex):
    parts: tuple[Regex, ...]


@dataclass(frozen=True)
class Alt(Regex):
    parts: tuple[Regex, ...]


@dataclass(frozen=True)
class Star(Regex):
    inner: Regex


def regex_symbols(r: Regex) -> frozenset[str]:
    if isinstance(r, Sym):
        return frozenset((r.name,))
    if isinstance(r, (Concat, Alt)):
        out: frozenset[str] = frozenset()
        for p in r.parts:
            out |= regex_symbols(p)
        return out
    if isinstance(r, Star):
        return regex_symbols(r.inner)
    return frozenset()


def render_regex(r: Regex) -> str:
    """Canonical text form, re-parseable by parse_regex."""

    def go(node: Regex, level: int) -> str:
        # level: 0 = alt context, 1 = concat context, 2 = atom context
        if isinstance(node, Eps):
            return "eps"
        if isinstance(node, Sym):
            return node.name
        if isinstance(node, Star):
            return go(node.inner, 2) + "*"
        if isinstance(node, Concat):
            text = " ".join(go(p, 2 if isinstance(p, Star) else 1) for p in node.parts)
            return f"({text})" if level >= 2 else text
        if isinstance(node, Alt):
            text = " | ".join(go(p, 1) for p in node.parts)
            return f"({text})" if level >= 1 else text
        raise TypeError(f"not a regex node: {node!r}")

    def goatom(node: Regex) -> str:
        return go(node, 0)

    return goatom(r)


# --- regex surface parser ---------------------------------------------------

def parse_regex(text: str) -> Regex:
    """Parse the action surface syntax into a Regex tree."""
    tokens = _lex_regex(text)
    pos = 0

    def peek() -> str | None:
        return tokens[pos][0] if pos < len(tokens) else None

    def take() -> tuple[str, Pos]:
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_alt() -> Regex:
        parts = [parse_cat()]
        while peek() == "|":
            take()
            parts.append(parse_cat())
        return parts[0] if len(parts) == 1 else Alt(tuple(parts))

    def parse_cat() -> Regex:
        parts = [parse_rep()]
        while peek() not in (None, "|", ")"):
            parts.append(parse_rep())
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    def parse_rep() -> Regex:
        node = parse_atom()
        while peek() == "*":
            take()
            node = Star(node)
        return node

    def parse_atom() -> Regex:
        tok = peek()
        if tok == "(":
            take()
            node = parse_alt()
            if peek() != ")":
                raise HclSyntaxError("unbalanced ( in action", tokens[pos - 1][1], expected=(")",))
            take()
            return node
        if tok is None or tok in ("|", "*", ")"):
            where = tokens[pos][1] if pos < len(tokens) else Pos()
            raise HclSyntaxError(f"unexpected {tok or 'end of action'}", where, expected=("identifier", "(", "eps"))
        name, _ = take()
        return Eps() if name == "eps" else Sym(name)

    if not tokens:
        raise HclSyntaxError("empty action expression", Pos())
    out = parse_alt()
    if pos != len(tokens):
        raise HclSyntaxError(f"trailing {tokens[pos][0]!r} in action", tokens[pos][1])
    return out


def _lex_regex(text: str) -> list[tuple[str, Pos]]:
    toks: list[tuple[str, Pos]] = []
    line, col, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch in "|*()":
            toks.append((ch, Pos(line, col)))
            i += 1
            col += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append((text[i:j], Pos(line, col)))
            col += j - i
            i = j
            continue
        raise HclSyntaxError(f"bad character {ch!r} in action", Pos(line, col))
    return toks


# --- automata ---------------------------------------------------------------

class _NFA:
    """Thompson construction; one start, one accept, epsilon edges allowed."""

    def __init__(self):
        self.trans: list[dict[str, set[int]]] = []
        self.eps: list[set[int]] = []

    def new_state(self) -> int:
        self.trans.append({})
        self.eps.append(set())
        return len(self.trans) - 1

    def edge(self, src: int, sym: str, dst: int):
        self.trans[src].setdefault(sym, set()).add(dst)

    def eps_edge(self, src: int, dst: int):
        self.eps[src].add(dst)

    def closure(self, states: Iterable[int]) -> frozenset[int]:
        seen = set(states)
        stack = list(seen)
        while stack:
            s = stack.pop()
            for t in self.eps[s]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)


def _compile_nfa(r: Regex) -> tuple[_NFA, int, int]:
    nfa = _NFA()

    def build(node: Regex) -> tuple[int, int]:
        if isinstance(node, Eps):
            s = nfa.new_state()
            return s, s
        if isinstance(node, Sym):
            s, t = nfa.new_state(), nfa.new_state()
            nfa.edge(s, node.name, t)
            return s, t
        if isinstance(node, Concat):
            first, last = None, None
            for p in node.parts:
                s, t = build(p)
                if first is None:
                    first, last = s, t
                else:
                    nfa.eps_edge(last, s)
                    last = t
            if first is None:
                s = nfa.new_state()
                return s, s
            return first, last
        if isinstance(node, Alt):
            s, t = nfa.new_state(), nfa.new_state()
            for p in node.parts:
                ps, pt = build(p)
                nfa.eps_edge(s, ps)
                nfa.eps_edge(pt, t)
            return s, t
        if isinstance(node, Star):
            s, t = nfa.new_state(), nfa.new_state()
            ps, pt = build(node.inner)
            nfa.eps_edge(s, ps)
            nfa.eps_edge(pt, s)
            nfa.eps_edge(s, t)
            return s, t
        raise TypeError(f"not a regex node: {node!r}")

    start, accept = build(r)
    return nfa, start, accept


class _DFA:
    """Total DFA over an explicit alphabet (subset construction output)."""

    def __init__(self, start: int, trans: list[dict[str, int]], accepting: set[int], alphabet: frozenset[str]):
        self.start = start
        self.trans = trans
        self.accepting = accepting
        self.alphabet = alphabet

    def accepts(self, word: Iterable[str]) -> bool:
        state = self.start
        for sym in word:
            if sym not in self.alphabet:
                return False
            state = self.trans[state][sym]
        return state in self.accepting


def _determinize(r: Regex, alphabet: frozenset[str]) -> _DFA:
    nfa, start, accept = _compile_nfa(r)
    symbols = sorted(alphabet)
    start_set = nfa.closure((start,))
    index: dict[frozenset[int], int] = {start_set: 0}
    trans: list[dict[str, int]] = [{}]
    accepting: set[int] = set()
    if accept in start_set:
        accepting.add(0)
    queue = [start_set]
    while queue:
        cur = queue.pop()
        ci = index[cur]
        for sym in symbols:
            moved: set[int] = set()
            for s in cur:
                moved |= nfa.trans[s].get(sym, set())
            nxt = nfa.closure(moved)
            if nxt not in index:
                index[nxt] = len(trans)
                trans.append({})
                if accept in nxt:
                    accepting.add(index[nxt])
                queue.append(nxt)
            trans[ci][sym] = index[nxt]
    return _DFA(0, trans, accepting, alphabet)


# --- public surface ----------------------------------------------------------

class TraceLang:
    """A regular language over slice labels, with an explicit alphabet.

    ``regex is None`` marks the universal language (the denotation of an
    absent action): every word over the alphabet.
    """

    __slots__ = ("regex", "alphabet")

    def __init__(self, regex: Regex | None, alphabet: Iterable[str] = ()):
        self.regex = regex
        alpha = frozenset(alphabet)
        if regex is not None:
            alpha |= regex_symbols(regex)
        self.alphabet = alpha

    @classmethod
    def universal(cls, alphabet: Iterable[str]) -> "TraceLang":
        return cls(None, alphabet)

    @classmethod
    def from_text(cls, text: str, alphabet: Iterable[str] = ()) -> "TraceLang":
        return cls(parse_regex(text), alphabet)

    def __eq__(self, other):
        if not isinstance(other, TraceLang):
            return NotImplemented
        return self.regex == other.regex and self.alphabet == other.alphabet

    def __hash__(self):
        return hash((self.regex, self.alphabet))

    def __repr__(self):
        return f"TraceLang({self.render()!r}, alphabet={sorted(self.alphabet)})"

    def render(self) -> str:
        return "Sigma*" if self.regex is None else render_regex(self.regex)

    def effective_regex(self) -> Regex:
        if self.regex is not None:
            return self.regex
        if not self.alphabet:
            return Eps()
        return Star(Alt(tuple(Sym(a) for a in sorted(self.alphabet))))

    def matches(self, word: Iterable[str]) -> bool:
        word = tuple(word)
        if self.regex is None:
            return all(sym in self.alphabet for sym in word)
        alpha = self.alphabet | frozenset(word)
        return _determinize(self.regex, alpha).accepts(word)


def project(lang: TraceLang, keep: Iterable[str]) -> TraceLang:
    """Image under the homomorphism erasing every symbol outside ``keep``.

    Works on the regex: erased symbols become eps, which is exactly the
    homomorphic image for regular expressions. The result's alphabet is keep.
    """
    keep = frozenset(keep)
    if lang.regex is None:
        if keep <= lang.alphabet:
            return TraceLang(None, keep)
        live = lang.alphabet & keep
        body: Regex = Star(Alt(tuple(Sym(a) for a in sorted(live)))) if live else Eps()
        return TraceLang(body, keep)

    def erase(node: Regex) -> Regex:
        if isinstance(node, Sym):
            return node if node.name in keep else Eps()
        if isinstance(node, Concat):
            return Concat(tuple(erase(p) for p in node.parts))
        if isinstance(node, Alt):
            return Alt(tuple(erase(p) for p in node.parts))
        if isinstance(node, Star):
            return Star(erase(node.inner))
        return node

    return TraceLang(erase(lang.regex), keep)


def includes(sub: TraceLang, sup: TraceLang) -> bool:
    """True iff language(sub) is a subset of language(sup).

    Decided over the unified alphabet by determinizing both sides and
    searching the product for a word accepted by sub and rejected by sup.
    """
    alpha = sub.alphabet | sup.alphabet
    if sup.regex is None and sub.alphabet <= sup.alphabet:
        return True
    sub_dfa = _determinize(sub.effective_regex(), alpha)
    sup_dfa = _determinize(sup.effective_regex(), alpha)
    symbols = sorted(alpha)
    seen = {(sub_dfa.start, sup_dfa.start)}
    queue = [(sub_dfa.start, sup_dfa.start)]
    while queue:
        a, b = queue.pop()
        if a in sub_dfa.accepting and b not in sup_dfa.accepting:
            return False
        for sym in symbols:
            nxt = (sub_dfa.trans[a][sym], sup_dfa.trans[b][sym])
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return True


def equivalent(a: TraceLang, b: TraceLang) -> bool:
    return includes(a, b) and includes(b, a)
