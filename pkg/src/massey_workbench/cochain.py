"""Inhomogeneous cochain expressions over a free group, evaluated exactly.

A cochain of degree k is an evaluator on k-tuples of words. Expressions are
immutable trees: quasi-morphism and table leaves combined by coboundary,
cup product, alternation, restriction to the aligned domain, and linear
combination. Aligned-only leaves extend by zero off the aligned tuples
(entries nontrivial, adjacent products concatenating without cancellation).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .errors import ResourceCapError, UsageError
from .quasimorphism import QuasiMorphism
from .words import (
    Letters,
    Word,
    _make,
    _sample_letters,
    enumeration_cap,
    multiply_letters,
    sphere_size,
    words_of_length,
)

_ZERO = Fraction(0)
_HALF = Fraction(1, 2)

WordTuple = tuple[Word, ...]


def is_aligned(t: Sequence[Word]) -> bool:
    """Membership in the aligned tuple set: no identity entries, and every
    adjacent product concatenates with zero cancellation. The empty tuple
    is aligned."""
    prev_last = 0
    for w in t:
        letters = w.letters
        if not letters:
            return False
        if prev_last and letters[0] == -prev_last:
            return False
        prev_last = letters[-1]
    return True


def flip(t: WordTuple) -> WordTuple:
    """Reverse the tuple and invert each entry; preserves alignment."""
    return tuple(w.inverse() for w in reversed(t))


class EvalContext:
    """Per-run caches. Not shared across processes; create one per worker.

    The cache is cleared wholesale when it reaches ``limit`` entries, which
    keeps long exhaustive scans at bounded memory.
    """

    __slots__ = ("node_values", "limit")

    def __init__(self, limit: int = 1_500_000):
        self.node_values: dict[tuple, Fraction] = {}
        self.limit = limit

    def store(self, key: tuple, value: Fraction) -> Fraction:
        if len(self.node_values) >= self.limit:
            self.node_values.clear()
        self.node_values[key] = value
        return value


def _key(node: "Cochain", t: WordTuple) -> tuple:
    return (id(node), tuple(w.letters for w in t))


class Cochain:
    """Base expression node; subclasses set ``degree`` and ``_eval``."""

    degree: int

    def _eval(self, t: WordTuple, ctx: EvalContext) -> Fraction:
        raise NotImplementedError


def evaluate(expr: Cochain, t: Sequence[Word], ctx: EvalContext | None = None) -> Fraction:
    """Evaluate an expression on a tuple whose arity matches its degree."""
    t = tuple(t)
    if len(t) != expr.degree:
        raise UsageError(f"arity {len(t)} does not match degree {expr.degree}")
    return expr._eval(t, ctx if ctx is not None else EvalContext())


@dataclass(frozen=True)
class ConstantCochain(Cochain):
    value: Fraction
    degree: int = 0

    def _eval(self, t, ctx):
        return self.value


class TableCochain(Cochain):
    """Finite-support cochain on aligned tuples, zero elsewhere."""

    __slots__ = ("degree", "table")

    def __init__(self, degree: int, table: Mapping[WordTuple, Fraction | int | str]):
        self.degree = degree
        store: dict[tuple[Letters, ...], Fraction] = {}
        for key, raw in table.items():
            key = tuple(key)
            if len(key) != degree:
                raise UsageError(f"table key arity {len(key)} != degree {degree}")
            if not is_aligned(key):
                raise UsageError(f"table key {tuple(map(str, key))} is not aligned")
            store[tuple(w.letters for w in key)] = Fraction(raw)
        self.table = store

    def _eval(self, t, ctx):
        return self.table.get(tuple(w.letters for w in t), _ZERO)


@dataclass(frozen=True)
class QMCochain(Cochain):
    """Degree-1 leaf evaluating a quasi-morphism (vanishes at the identity)."""

    qm: QuasiMorphism
    degree: int = 1

    def _eval(self, t, ctx):
        return self.qm.value_letters(t[0].letters)


@dataclass(frozen=True)
class Restriction(Cochain):
    """Extension by zero off the aligned domain."""

    child: Cochain

    @property
    def degree(self) -> int:
        return self.child.degree

    def _eval(self, t, ctx):
        key = _key(self, t)
        cached = ctx.node_values.get(key)
        if cached is not None:
            return cached
        value = self.child._eval(t, ctx) if is_aligned(t) else _ZERO
        return ctx.store(key, value)


@dataclass(frozen=True)
class Coboundary(Cochain):
    child: Cochain

    @property
    def degree(self) -> int:
        return self.child.degree + 1

    def _eval(self, t, ctx):
        k = self.child.degree
        child = self.child
        total = child._eval(t[1:], ctx)
        sign = 1
        for i in range(k):
            sign = -sign
            merged = _make(
                multiply_letters(t[i].letters, t[i + 1].letters), t[i].rank
            )
            face_value = child._eval(t[:i] + (merged,) + t[i + 2 :], ctx)
            total = total + face_value if sign > 0 else total - face_value
        last = child._eval(t[:-1], ctx)
        return total + last if (k + 1) % 2 == 0 else total - last


@dataclass(frozen=True)
class CupProduct(Cochain):
    """Front block into the left factor, back block into the right factor."""

    left: Cochain
    right: Cochain

    @property
    def degree(self) -> int:
        return self.left.degree + self.right.degree

    def _eval(self, t, ctx):
        p = self.left.degree
        a = self.left._eval(t[:p], ctx)
        if not a:
            return _ZERO
        return a * self.right._eval(t[p:], ctx)


@dataclass(frozen=True)
class Alternation(Cochain):
    """alt(f)(t) = (f(t) + (-1)^ceil(k/2) f(flip t)) / 2; identity in degree 0."""

    child: Cochain

    @property
    def degree(self) -> int:
        return self.child.degree

    def _eval(self, t, ctx):
        k = self.child.degree
        straight = self.child._eval(t, ctx)
        flipped = self.child._eval(flip(t), ctx)
        if ((k + 1) // 2) % 2 == 0:
            return (straight + flipped) * _HALF
        return (straight - flipped) * _HALF


class LinearCombination(Cochain):
    __slots__ = ("degree", "terms")

    def __init__(self, terms: Sequence[tuple[Fraction | int | str, Cochain]]):
        terms = tuple((Fraction(c), e) for c, e in terms)
        if not terms:
            raise UsageError("empty linear combination has no degree")
        degrees = {e.degree for _, e in terms}
        if len(degrees) != 1:
            raise UsageError(f"mixed degrees in linear combination: {sorted(degrees)}")
        self.terms = terms
        self.degree = degrees.pop()

    def _eval(self, t, ctx):
        total = _ZERO
        for c, e in self.terms:
            if c:
                total += c * e._eval(t, ctx)
        return total


def constant(value: Fraction | int | str) -> ConstantCochain:
    return ConstantCochain(Fraction(value))


def qm_cochain(q: QuasiMorphism) -> QMCochain:
    return QMCochain(q)


def coboundary(e: Cochain) -> Coboundary:
    return Coboundary(e)


def cup(e1: Cochain, e2: Cochain) -> CupProduct:
    return CupProduct(e1, e2)


def alternate(e: Cochain) -> Alternation:
    return Alternation(e)


def restrict(e: Cochain) -> Restriction:
    return Restriction(e)


def lincomb(*terms: tuple[Fraction | int | str, Cochain]) -> LinearCombination:
    return LinearCombination(terms)


# ---------------------------------------------------------------------------
# Aligned tuple domains


def _compositions(total: int, parts: int, max_part: int) -> Iterator[tuple[int, ...]]:
    """Ordered positive compositions of `total` into `parts`, each <= max_part."""
    if parts == 1:
        if 1 <= total <= max_part:
            yield (total,)
        return
    lo = max(1, total - max_part * (parts - 1))
    hi = min(max_part, total - (parts - 1))
    for first in range(lo, hi + 1):
        for rest in _compositions(total - first, parts - 1, max_part):
            yield (first,) + rest


def count_exhaustive_aligned_tuples(
    rank: int, arity: int, total_budget: int, entry_cap: int | None = None
) -> int:
    if arity == 0:
        return 1
    entry_cap = entry_cap or total_budget
    total = 0
    for length in range(arity, total_budget + 1):
        ncomp = sum(1 for _ in _compositions(length, arity, entry_cap))
        total += sphere_size(rank, length) * ncomp
    return total


def exhaustive_aligned_tuples(
    rank: int,
    arity: int,
    total_budget: int,
    entry_cap: int | None = None,
    cap: int | None = None,
) -> Iterator[WordTuple]:
    """All aligned tuples whose entries concatenate to a reduced word of
    length <= total_budget, each entry of length <= entry_cap.

    Aligned tuples are exactly the cut decompositions of reduced words, so
    the domain is enumerated as (word, cut positions) pairs.
    """
    count = count_exhaustive_aligned_tuples(rank, arity, total_budget, entry_cap)
    limit = enumeration_cap(cap)
    if count > limit:
        raise ResourceCapError(
            f"{count} aligned tuples exceed the enumeration cap {limit}"
        )
    if arity == 0:
        yield ()
        return
    entry_cap = entry_cap or total_budget
    for length in range(arity, total_budget + 1):
        comps = list(_compositions(length, arity, entry_cap))
        if not comps:
            continue
        for letters in words_of_length(rank, length):
            for comp in comps:
                out = []
                pos = 0
                for c in comp:
                    out.append(_make(letters[pos : pos + c], rank))
                    pos += c
                yield tuple(out)


def random_aligned_tuple(
    rng: random.Random, rank: int, arity: int, max_len: int
) -> WordTuple:
    """Aligned tuple with entry lengths uniform in [1, max_len]."""
    out: list[Word] = []
    last = 0
    for _ in range(arity):
        length = rng.randint(1, max_len)
        letters = _sample_letters(rank, length, rng, first_banned=last)
        out.append(_make(letters, rank))
        last = letters[-1]
    return tuple(out)


def random_aligned_tuples(
    rank: int, arity: int, count: int, max_len: int, seed: int | str
) -> list[WordTuple]:
    rng = random.Random(f"{seed}:aligned:{arity}:{max_len}")
    return [random_aligned_tuple(rng, rank, arity, max_len) for _ in range(count)]


@dataclass
class SupNormStats:
    """Largest observed |value| of a cochain over a sampled domain."""

    max_abs: Fraction
    argmax: WordTuple | None
    checked: int
    histogram: dict[str, int]

    def to_json(self) -> dict:
        return {
            "max_abs": str(self.max_abs),
            "argmax": [str(w) for w in self.argmax] if self.argmax else None,
            "checked_count": self.checked,
            "histogram": self.histogram,
        }


def sup_norm_estimate(
    expr: Cochain,
    rank: int,
    exhaustive_budget: int = 0,
    entry_cap: int | None = None,
    samples: int = 0,
    max_len: int = 25,
    seed: int | str = 0,
    ctx: EvalContext | None = None,
    cap: int | None = None,
) -> SupNormStats:
    """Estimate the sup norm over exhaustive small tuples plus random tuples."""
    ctx = ctx if ctx is not None else EvalContext()
    best = _ZERO
    argmax: WordTuple | None = None
    checked = 0
    histogram: dict[str, int] = {}
    domains: list[Iterator[WordTuple]] = []
    if expr.degree == 0:
        domains.append(iter([()]))
    else:
        if exhaustive_budget >= expr.degree:
            domains.append(
                exhaustive_aligned_tuples(rank, expr.degree, exhaustive_budget, entry_cap, cap)
            )
        if samples > 0:
            domains.append(iter(random_aligned_tuples(rank, expr.degree, samples, max_len, seed)))
    for t in itertools.chain(*domains):
        value = expr._eval(t, ctx)
        checked += 1
        key = str(value)
        histogram[key] = histogram.get(key, 0) + 1
        a = abs(value)
        if a > best:
            best = a
            argmax = t
    return SupNormStats(best, argmax, checked, histogram)
