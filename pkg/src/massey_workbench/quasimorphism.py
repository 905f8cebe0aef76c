"""Decomposable quasi-morphisms: bounded alternating piece functions summed
over the pieces of a decomposition.

Values are exact rationals throughout, so every downstream identity can be
asserted with equality rather than tolerance.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .decomposition import (
    DecompositionSpec,
    boundaries,
    piece_lengths,
    triangle_split,
)
from .errors import ConfigError, UsageError
from .words import Letters, Word, _make, enumerate_ball, invert_letters, sample_word


class LambdaTable:
    """Finite alternating rational table on pieces, default 0 off support.

    Construction auto-inserts the negated value on each inverse piece and
    rejects contradictory pairs.
    """

    __slots__ = ("entries", "sup")

    def __init__(self, entries: Mapping[Word, Fraction | int | str]):
        table: dict[Letters, Fraction] = {}
        for piece, raw in entries.items():
            if not piece.letters:
                raise ConfigError("the identity cannot be a piece")
            value = Fraction(raw)
            inv = invert_letters(piece.letters)
            for key, val in ((piece.letters, value), (inv, -value)):
                if key in table and table[key] != val:
                    raise ConfigError(
                        f"contradictory lambda values at piece {_make(key, piece.rank)}"
                    )
                table[key] = val
        self.entries = table
        self.sup = max((abs(v) for v in table.values()), default=Fraction(0))

    def value(self, letters: Letters) -> Fraction:
        return self.entries.get(letters, _ZERO)

    def items(self):
        return self.entries.items()


_ZERO = Fraction(0)


class QuasiMorphism:
    """phi(g) = sum of lambda over the pieces of the decomposition of g."""

    __slots__ = ("spec", "table", "name", "_cache")

    def __init__(self, spec: DecompositionSpec, table: LambdaTable, name: str = "phi"):
        for letters in table.entries:
            if not _is_legal_piece(spec, letters):
                raise ConfigError(
                    f"{_make(letters, spec.rank)} is not a piece of the {spec.describe()} family"
                )
        self.spec = spec
        self.table = table
        self.name = name
        self._cache: dict[Letters, Fraction] = {}

    @property
    def rank(self) -> int:
        return self.spec.rank

    def value(self, g: Word) -> Fraction:
        if g.rank != self.rank:
            raise UsageError(f"word rank {g.rank} differs from {self.rank}")
        return self.value_letters(g.letters)

    def value_letters(self, letters: Letters) -> Fraction:
        cached = self._cache.get(letters)
        if cached is not None:
            return cached
        lookup = self.table.entries.get
        total = _ZERO
        pos = 0
        for length in piece_lengths(self.spec, letters):
            nxt = pos + length
            v = lookup(letters[pos:nxt])
            if v is not None:
                total += v
            pos = nxt
        if len(self._cache) >= 1_000_000:
            self._cache.clear()
        self._cache[letters] = total
        return total

    def __call__(self, g: Word) -> Fraction:
        return self.value(g)

    def __getstate__(self):
        return (self.spec, self.table, self.name)

    def __setstate__(self, state):
        self.spec, self.table, self.name = state
        self._cache = {}


def _is_legal_piece(spec: DecompositionSpec, letters: Letters) -> bool:
    if spec.family == "letter":
        return len(letters) == 1
    if spec.family == "rolli":
        return len(set(letters)) == 1
    w = spec.brooks_word.letters  # type: ignore[union-attr]
    return len(letters) == 1 or letters in (w, invert_letters(w))


def eval_qm(q: QuasiMorphism, g: Word) -> Fraction:
    return q.value(g)


def defect(q: QuasiMorphism, g: Word, h: Word) -> Fraction:
    """phi(g) + phi(h) - phi(g h), exactly."""
    if g.rank != q.rank or h.rank != q.rank:
        raise UsageError("rank mismatch in defect")
    return q.value(g) + q.value(h) - q.value(g * h)


def defect_from_triangle(q: QuasiMorphism, g: Word, h: Word) -> Fraction:
    """The defect equals phi(r1) + phi(r2) + phi(r3) over the tripod remainders."""
    tri = triangle_split(q.spec, g, h)
    return q.value(tri.r1) + q.value(tri.r2) + q.value(tri.r3)


@dataclass
class DefectStats:
    max_abs: Fraction
    argmax: tuple[str, str] | None
    checked: int

    def to_json(self) -> dict:
        return {
            "max_abs_defect": str(self.max_abs),
            "argmax_pair": list(self.argmax) if self.argmax else None,
            "checked_count": self.checked,
        }


def defect_sup(
    q: QuasiMorphism,
    ball_radius: int = 0,
    random_pairs: int = 0,
    max_len: int = 50,
    seed: int = 0,
    cap: int | None = None,
) -> DefectStats:
    """Max |defect| over an exhaustive ball and/or seeded random pairs."""
    best = _ZERO
    argmax: tuple[str, str] | None = None
    checked = 0

    def consider(g: Word, h: Word):
        nonlocal best, argmax, checked
        checked += 1
        d = abs(defect(q, g, h))
        if d > best:
            best = d
            argmax = (str(g), str(h))

    if ball_radius > 0:
        ball = list(enumerate_ball(q.rank, ball_radius, cap))
        for g in ball:
            for h in ball:
                consider(g, h)
    if random_pairs > 0:
        rng = random.Random(f"{seed}:defect")
        for _ in range(random_pairs):
            lg = rng.randint(0, max_len)
            lh = rng.randint(0, max_len)
            consider(sample_word(q.rank, lg, rng), sample_word(q.rank, lh, rng))
    return DefectStats(best, argmax, checked)


def piece_values(q: QuasiMorphism, g: Word) -> list[Fraction]:
    """lambda evaluated on each piece of g, in order."""
    letters = g.letters
    cuts = boundaries(piece_lengths(q.spec, letters))
    return [
        q.table.value(letters[cuts[i] : cuts[i + 1]]) for i in range(len(cuts) - 1)
    ]


def tampered_lambda(table: LambdaTable, piece: Word, value: Fraction | int | str) -> LambdaTable:
    """Copy of a table with one entry overwritten, skipping the alternation
    completion. Breaks the alternating invariant on purpose; only mutation
    tests should use this.
    """
    clone = LambdaTable.__new__(LambdaTable)
    entries = dict(table.entries)
    entries[piece.letters] = Fraction(value)
    clone.entries = entries
    clone.sup = max((abs(v) for v in entries.values()), default=_ZERO)
    return clone
