"""One-block factor maps, the induced image language, fiber enumeration and
exact pushforward of Markov measures.

The image subshift Y is never specified independently: its language is
derived from the map via the subset automaton (state = set of domain
symbols a preimage word can currently end in), which keeps membership and
extension queries cheap without enumerating fibers.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Sequence

from .markov import MarkovMeasure, MeasureError
from .shiftcore import EPSILON, Sft, SftError, Word


class FactorError(ValueError):
    pass


class OneBlockFactor:
    def __init__(self, domain: Sft, symbol_map: Mapping[str, str] | Sequence[str]):
        self.domain = domain
        if isinstance(symbol_map, Mapping):
            try:
                targets = [str(symbol_map[name]) for name in domain.alphabet]
            except KeyError as e:
                raise FactorError("symbol map misses domain symbol %s" % e) from None
        else:
            if len(symbol_map) != domain.size:
                raise FactorError("symbol map must cover the whole domain alphabet")
            targets = [str(t) for t in symbol_map]
        self.image_alphabet: tuple[str, ...] = tuple(sorted(set(targets)))
        self._target_index = {name: i for i, name in enumerate(self.image_alphabet)}
        self.symbol_map: tuple[int, ...] = tuple(self._target_index[t] for t in targets)
        self._preimages: tuple[tuple[int, ...], ...] = tuple(
            tuple(x for x in range(domain.size) if self.symbol_map[x] == b)
            for b in range(len(self.image_alphabet))
        )
        self.image = ImageLanguage(self)

    def __repr__(self):
        pairs = ", ".join("%s->%s" % (a, self.image_alphabet[self.symbol_map[i]])
                          for i, a in enumerate(self.domain.alphabet))
        return "OneBlockFactor(%s)" % pairs

    @classmethod
    def identity(cls, sft: Sft) -> "OneBlockFactor":
        return cls(sft, {a: a for a in sft.alphabet})

    def apply(self, word: Word) -> Word:
        return tuple(self.symbol_map[x] for x in word)

    def preimage_symbols(self, b: int) -> tuple[int, ...]:
        return self._preimages[b]


class ImageLanguage:
    """Language of the image subshift, queried through the subset automaton."""

    def __init__(self, factor: OneBlockFactor):
        self.factor = factor
        self.alphabet = factor.image_alphabet
        self._blocks_cache: dict[int, list[Word]] = {0: [EPSILON]}
        self._full_state = frozenset(range(factor.domain.size))

    def index(self, name: str) -> int:
        try:
            return self.alphabet.index(name)
        except ValueError:
            raise FactorError("unknown image symbol %r" % (name,)) from None

    def word_from_names(self, names) -> Word:
        return tuple(self.index(s) for s in names)

    def names(self, word: Word) -> tuple[str, ...]:
        return tuple(self.alphabet[i] for i in word)

    def step(self, state: frozenset, b: int) -> frozenset:
        """Advance the set of possible preimage end-symbols by one image symbol."""
        dom = self.factor.domain
        pre = self.factor.preimage_symbols(b)
        if state is self._full_state:
            return frozenset(x for x in pre)
        return frozenset(x for x in pre if any(dom.follows(s, x) for s in state))

    def run(self, word: Word) -> frozenset:
        state = self._full_state
        for b in word:
            state = self.step(state, b)
            if not state:
                break
        return state

    def is_word(self, word: Word) -> bool:
        if any(not (0 <= b < len(self.alphabet)) for b in word):
            return False
        return bool(self.run(word)) if word else True

    def blocks(self, n: int) -> list[Word]:
        """B_n(Y) = images of B_n(X), deduplicated and sorted."""
        if n < 0:
            raise FactorError("block length must be >= 0")
        if n not in self._blocks_cache:
            m = max(self._blocks_cache)
            frontier = {w: self.run(w) for w in self._blocks_cache[m]}
            for k in range(m + 1, n + 1):
                nxt: dict[Word, frozenset] = {}
                for w, st in frontier.items():
                    for b in range(len(self.alphabet)):
                        st2 = self.step(st, b)
                        if st2:
                            nxt[w + (b,)] = st2
                frontier = nxt
                self._blocks_cache[k] = sorted(frontier)
        return self._blocks_cache[n]

    def extensions(self, word: Word, k: int) -> list[Word]:
        if k == 0:
            return [EPSILON]
        start = self.run(word)
        if not start and word:
            return []
        out: list[Word] = []

        def rec(state: frozenset, acc: Word):
            if len(acc) == k:
                out.append(acc)
                return
            for b in range(len(self.alphabet)):
                st2 = self.step(state, b)
                if st2:
                    rec(st2, acc + (b,))

        rec(start if word else self._full_state, EPSILON)
        return out

    def count_blocks(self, n: int) -> int:
        """|B_n(Y)| by path counting on the determinized subset automaton
        (no enumeration)."""
        if n <= 0:
            return 1
        # discover the DFA lazily, then count length-n paths from the start
        trans: dict[frozenset, dict[int, frozenset]] = {}
        todo = [self._full_state]
        while todo:
            st = todo.pop()
            if st in trans:
                continue
            row = {}
            for b in range(len(self.alphabet)):
                st2 = self.step(st, b)
                if st2:
                    row[b] = st2
                    if st2 not in trans:
                        todo.append(st2)
            trans[st] = row
        counts = {self._full_state: 1}
        for _ in range(n):
            nxt: dict[frozenset, int] = {}
            for st, c in counts.items():
                for st2 in trans[st].values():
                    nxt[st2] = nxt.get(st2, 0) + c
            counts = nxt
        return sum(counts.values())

    def is_periodic_block(self, word: Word) -> bool:
        """(word)^infinity lies in Y iff every repetition stays allowable;
        the subset-state sequence is eventually periodic, so finitely many
        repetitions decide it."""
        if not word or not self.is_word(word):
            return False
        state = self.run(word)
        seen = {state}
        while state:
            for b in word:
                state = self.step(state, b)
                if not state:
                    return False
            if state in seen:
                return True
            seen.add(state)
        return False


def image_blocks(pi: OneBlockFactor, n: int) -> list[Word]:
    return pi.image.blocks(n)


def fiber_words(pi: OneBlockFactor, y: Word) -> list[Word]:
    """All u in B_n(X) with pi(u) = y, lexicographic; empty iff y is not in
    the image language."""
    if not y:
        return [EPSILON]
    dom = pi.domain
    out: list[Word] = []

    def rec(acc: Word, pos: int):
        if pos == len(y):
            out.append(acc)
            return
        for x in pi.preimage_symbols(y[pos]):
            if pos == 0 or dom.follows(acc[-1], x):
                rec(acc + (x,), pos + 1)

    rec(EPSILON, 0)
    return out


class FiberTable:
    """Memoized fibers at one depth: every domain n-block appears in exactly
    one fiber, keyed by its image word."""

    def __init__(self, pi: OneBlockFactor, depth: int):
        self.pi = pi
        self.depth = depth
        table: dict[Word, list[Word]] = {}
        for u in pi.domain.blocks(depth):
            table.setdefault(pi.apply(u), []).append(u)
        self.fibers = table

    def fiber(self, y: Word) -> list[Word]:
        return self.fibers.get(y, [])

    def image_words(self) -> list[Word]:
        return sorted(self.fibers)


def induced_image_sft(pi: OneBlockFactor, verify_depth: int = 8) -> Sft | None:
    """1-step SFT presentation of the image shift when one exists: the
    candidate built from the image 2-blocks, verified against the true
    image language up to verify_depth.  None when the image is not 1-step
    at that depth (it is sofic in general)."""
    lang = pi.image
    k = len(lang.alphabet)
    trans = [[0] * k for _ in range(k)]
    for a, b in lang.blocks(2):
        trans[a][b] = 1
    try:
        candidate = Sft(lang.alphabet, trans)
    except SftError:
        return None
    for n in range(1, verify_depth + 1):
        if candidate.blocks(n) != lang.blocks(n):
            return None
    return candidate


def pushforward_cylinder(mu: MarkovMeasure, pi: OneBlockFactor, y: Word):
    """Mass of the image cylinder [y] under pi(mu): the exact sum of
    mu-cylinder masses over the fiber of y.

    Fractions in, Fractions out; on the float path the per-state sums use
    plain accumulation and the fiber sum is compensated.
    """
    if mu.sft is not pi.domain and mu.alphabet != pi.domain.alphabet:
        raise MeasureError("measure alphabet does not match the factor domain")
    n = len(y)
    if n == 0:
        return Fraction(1) if mu.exact else 1.0
    k = mu.order
    zero = Fraction(0) if mu.exact else 0.0
    if n <= k:
        masses = [mu.cylinder_mass(u) for u in fiber_words(pi, y)]
        if mu.exact:
            return sum(masses, zero)
        return math.fsum(masses)
    dom = pi.domain
    state_masses: dict[Word, object] = {}
    for s in mu.states:
        if pi.apply(s) == y[:k]:
            m = mu.state_mass(s)
            if m:
                state_masses[s] = m
    for pos in range(k, n):
        nxt: dict[Word, object] = {}
        for s, m in state_masses.items():
            i = mu._index[s]
            for x in pi.preimage_symbols(y[pos]):
                if not dom.follows(s[-1], x):
                    continue
                t = s[1:] + (x,)
                j = mu._index.get(t)
                if j is None:
                    continue
                p = mu.matrix[i][j]
                if p:
                    nxt[t] = nxt.get(t, zero) + m * p
        state_masses = nxt
        if not state_masses:
            return zero
    total = zero
    for m in state_masses.values():
        total += m
    return total
