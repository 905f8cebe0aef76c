"""Massey triple product machinery for a decomposable quasi-morphism middle
class, with the explicit bounded primitive and its tripod cancellation.

Given a quasi-morphism phi with decomposition D, bounded aligned cocycles
omega1 (degree k1) and omega2 (degree k2), the operators below realize:

* eta1(g_1..g_{k1})   = sum_j omega1(g_1,..,g_{k1-1}, z<_j(g_{k1})) * phi(piece_j)
* eta2(h_1..h_{k2})   = sum_j phi(piece_j) * omega2(z>_j(h_1), h_2,..,h_{k2})
* beta1 = (-1)^{k1} omega1 cup phi - delta eta1   (primitive of omega1 cup delta phi)
* beta2 = phi cup omega2 + delta eta2             (primitive of delta phi cup omega2)
* mu    = (-1)^{k1} omega1 cup beta2 - beta1 cup omega2   (the Massey representative)
* eta   = the bridging sum over the decomposition of the middle entry
* P     = omega1 cup eta2 + eta1 cup omega2 - (-1)^{k1} delta eta

with delta P = mu pointwise and P equal, tuple by tuple, to three sums that
cancel positionally down to the thick parts of the tripod of (1, g_{k1},
g_{k1} h_1); at most 3 R-hat terms survive, which bounds sup |P|.

Here z<_j / z>_j are the products of the pieces before / after the j-th one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ._parallel import chunked_map
from .checks import (
    describe_tuple,
    identity_stage,
    merge_scan_parts,
    stage_tasks,
    sup_scan,
    vanishing_stage,
)
from .cochain import (
    Cochain,
    EvalContext,
    WordTuple,
    _key,
    coboundary,
    cup,
    is_aligned,
    lincomb,
    qm_cochain,
    random_aligned_tuples,
)
from .decomposition import boundaries, measure_r_hat, piece_lengths, triangle_split
from .errors import UsageError
from .quasimorphism import QuasiMorphism
from .report import ExperimentPlan, Report, StageResult
from .words import Letters, _make, multiply_letters

_ZERO = Fraction(0)

MUTATIONS = ("flip-eta-sign", "shift-z-boundary", "flip-beta1-cup-sign")


@dataclass(frozen=True)
class MasseyInstance:
    """A triple (omega1, delta phi, omega2) prepared for verification.

    ``mutation`` deliberately corrupts one construction step so the test
    suite can confirm the exact checks are not vacuous:

    * ``flip-eta-sign``: the bridge cochain enters the primitive with the
      wrong sign.
    * ``shift-z-boundary``: the prefix/suffix piece products inside the
      eta sums are shifted by one piece.
    * ``flip-beta1-cup-sign``: the cup term of beta1 gets the wrong sign.
    """

    phi: QuasiMorphism
    omega1: Cochain
    omega2: Cochain
    k1: int
    k2: int
    mutation: str | None = None

    def __post_init__(self):
        if self.k1 < 1 or self.k2 < 1:
            raise UsageError("k1 and k2 must be >= 1")
        if self.omega1.degree != self.k1:
            raise UsageError(f"omega1 degree {self.omega1.degree} != k1 {self.k1}")
        if self.omega2.degree != self.k2:
            raise UsageError(f"omega2 degree {self.omega2.degree} != k2 {self.k2}")
        if self.mutation is not None and self.mutation not in MUTATIONS:
            raise UsageError(f"unknown mutation {self.mutation!r}")

    @property
    def rank(self) -> int:
        return self.phi.rank

    @property
    def convention_dependent(self) -> bool:
        """Degree-1 factors rely on implicit tuple-shrinking conventions."""
        return min(self.k1, self.k2) == 1


def _piece_runs(m: MasseyInstance, letters: Letters):
    """Per piece j: (lambda value, prefix letters, suffix letters).

    Prefix/suffix are the piece products before/after j; the shift mutation
    moves both cut points one piece outward.
    """
    cuts = boundaries(piece_lengths(m.phi.spec, letters))
    shift = 1 if m.mutation == "shift-z-boundary" else 0
    phi = m.phi
    out = []
    npieces = len(cuts) - 1
    for j in range(1, npieces + 1):
        piece = letters[cuts[j - 1] : cuts[j]]
        pre_cut = cuts[min(j - 1 + shift, npieces)]
        suf_cut = cuts[max(j - shift, 0)]
        out.append((phi.value_letters(piece), letters[:pre_cut], letters[suf_cut:]))
    return out


class _EtaBase(Cochain):
    """Shared caching for the eta family of leaves."""

    __slots__ = ("m", "degree")

    def _eval(self, t, ctx):
        key = _key(self, t)
        cached = ctx.node_values.get(key)
        if cached is not None:
            return cached
        return ctx.store(key, self._compute(t, ctx))

    def _compute(self, t: WordTuple, ctx: EvalContext) -> Fraction:
        raise NotImplementedError


class Eta1(_EtaBase):
    """Correction term whose coboundary makes beta1 bounded."""

    def __init__(self, m: MasseyInstance):
        self.m = m
        self.degree = m.k1

    def _compute(self, t, ctx):
        m = self.m
        rank = m.rank
        head = t[:-1]
        omega1 = m.omega1
        total = _ZERO
        for lam, pre, _suf in _piece_runs(m, t[-1].letters):
            if not lam:
                continue
            v = omega1._eval(head + (_make(pre, rank),), ctx)
            if v:
                total += v * lam
        return total


class Eta2(_EtaBase):
    """Correction term whose coboundary makes beta2 bounded."""

    def __init__(self, m: MasseyInstance):
        self.m = m
        self.degree = m.k2

    def _compute(self, t, ctx):
        m = self.m
        rank = m.rank
        tail = t[1:]
        omega2 = m.omega2
        total = _ZERO
        for lam, _pre, suf in _piece_runs(m, t[0].letters):
            if not lam:
                continue
            v = omega2._eval((_make(suf, rank),) + tail, ctx)
            if v:
                total += lam * v
        return total


class EtaBridge(_EtaBase):
    """Triple-product sum over the decomposition of the middle entry."""

    def __init__(self, m: MasseyInstance):
        self.m = m
        self.degree = m.k1 + m.k2 - 1

    def _compute(self, t, ctx):
        m = self.m
        rank = m.rank
        mid = m.k1 - 1
        head, e, tail = t[:mid], t[mid], t[mid + 1 :]
        omega1, omega2 = m.omega1, m.omega2
        total = _ZERO
        for lam, pre, suf in _piece_runs(m, e.letters):
            if not lam:
                continue
            v1 = omega1._eval(head + (_make(pre, rank),), ctx)
            if not v1:
                continue
            v2 = omega2._eval((_make(suf, rank),) + tail, ctx)
            if v2:
                total += v1 * lam * v2
        return total


def eta1(m: MasseyInstance) -> Eta1:
    return Eta1(m)


def eta2(m: MasseyInstance) -> Eta2:
    return Eta2(m)


def eta_bridge(m: MasseyInstance) -> EtaBridge:
    if m.k1 + m.k2 < 2:
        raise UsageError("bridge cochain needs k1 + k2 >= 2")
    return EtaBridge(m)


def _sign(k: int) -> Fraction:
    return Fraction(1) if k % 2 == 0 else Fraction(-1)


def beta1(m: MasseyInstance) -> Cochain:
    """Bounded primitive of omega1 cup delta phi."""
    s = _sign(m.k1)
    if m.mutation == "flip-beta1-cup-sign":
        s = -s
    return lincomb(
        (s, cup(m.omega1, qm_cochain(m.phi))),
        (-1, coboundary(eta1(m))),
    )


def beta2(m: MasseyInstance) -> Cochain:
    """Bounded primitive of delta phi cup omega2."""
    return lincomb(
        (1, cup(qm_cochain(m.phi), m.omega2)),
        (1, coboundary(eta2(m))),
    )


def massey_representative(m: MasseyInstance) -> Cochain:
    """(-1)^k [ (-1)^{k1} omega1 cup beta2 - beta1 cup omega2 ] with k = 2."""
    return lincomb(
        (_sign(m.k1), cup(m.omega1, beta2(m))),
        (-1, cup(beta1(m), m.omega2)),
    )


def mu_simplified(m: MasseyInstance) -> Cochain:
    """(-1)^{k1} omega1 cup delta eta2 + delta eta1 cup omega2."""
    return lincomb(
        (_sign(m.k1), cup(m.omega1, coboundary(eta2(m)))),
        (1, cup(coboundary(eta1(m)), m.omega2)),
    )


def bounded_primitive(m: MasseyInstance) -> Cochain:
    """P = omega1 cup eta2 + eta1 cup omega2 - (-1)^{k1} delta eta."""
    bridge_coeff = -_sign(m.k1)
    if m.mutation == "flip-eta-sign":
        bridge_coeff = -bridge_coeff
    return lincomb(
        (1, cup(m.omega1, eta2(m))),
        (1, cup(eta1(m), m.omega2)),
        (bridge_coeff, coboundary(eta_bridge(m))),
    )


@dataclass
class TriangleTermLedger:
    """Bookkeeping of the positional cancellation across the three sums.

    ``surviving_terms`` lists every (side, j, value) left after removing the
    index-matched pairs whose values are exactly equal; ``canceled_count``
    counts removed terms (two per matched pair); ``bound`` is the total
    thick length of the tripod, so a correct construction never leaves more
    than ``bound`` survivors.
    """

    surviving_terms: list[tuple[int, int, Fraction]] = field(default_factory=list)
    canceled_count: int = 0
    bound: int = 0
    thick_lengths: tuple[int, int, int] = (0, 0, 0)

    @property
    def within_bound(self) -> bool:
        return len(self.surviving_terms) <= self.bound

    def to_json(self) -> dict:
        return {
            "surviving_terms": [
                {"side": s, "j": j, "value": str(v)} for s, j, v in self.surviving_terms
            ],
            "canceled_count": self.canceled_count,
            "bound": self.bound,
            "thick_lengths": list(self.thick_lengths),
        }


def _side_terms(
    m: MasseyInstance,
    head: WordTuple,
    tail: WordTuple,
    middle: Letters,
    merge_suffix: Letters,
    merge_prefix: Letters,
    ctx: EvalContext,
) -> list[Fraction]:
    """Terms of one of the three boundary sums, for the decomposition of
    ``middle``. ``merge_suffix`` is appended to the suffix product before it
    enters omega2 (side 1 merges h_1 there); ``merge_prefix`` is prepended
    to the prefix product before it enters omega1 (side 2 merges g_{k1})."""
    rank = m.rank
    omega1, omega2 = m.omega1, m.omega2
    cuts = boundaries(piece_lengths(m.phi.spec, middle))
    phi = m.phi
    terms: list[Fraction] = []
    for j in range(1, len(cuts)):
        piece = middle[cuts[j - 1] : cuts[j]]
        lam = phi.value_letters(piece)
        if not lam:
            terms.append(_ZERO)
            continue
        pre = multiply_letters(merge_prefix, middle[: cuts[j - 1]])
        suf = multiply_letters(middle[cuts[j] :], merge_suffix)
        v1 = omega1._eval(head + (_make(pre, rank),), ctx)
        if not v1:
            terms.append(_ZERO)
            continue
        v2 = omega2._eval((_make(suf, rank),) + tail, ctx)
        terms.append(v1 * lam * v2)
    return terms


def three_sum_residual(
    m: MasseyInstance, t: WordTuple, ctx: EvalContext | None = None
) -> tuple[Fraction, TriangleTermLedger]:
    """Evaluate the three decomposition sums directly and cancel the
    index-matched corner pairs.

    Side 1 runs over the pieces of g_{k1}, side 2 over those of h_1, side 3
    (negated) over those of g_{k1} h_1. For aligned input the first
    |D(c1)| terms of sides 1 and 3 coincide pairwise, as do the last
    |D(c3)| terms of sides 2 and 3; a pair is only removed if its two
    values are exactly equal, so any construction error surfaces as excess
    survivors. The returned value always equals the full alternating total.
    """
    if len(t) != m.k1 + m.k2:
        raise UsageError(f"expected arity {m.k1 + m.k2}, got {len(t)}")
    if not is_aligned(t):
        raise UsageError("three-sum residual is defined on aligned tuples")
    ctx = ctx if ctx is not None else EvalContext()
    g, h = t[m.k1 - 1], t[m.k1]
    head, tail = t[: m.k1 - 1], t[m.k1 + 1 :]
    spec = m.phi.spec
    empty: Letters = ()

    side1 = _side_terms(m, head, tail, g.letters, h.letters, empty, ctx)
    side2 = _side_terms(m, head, tail, h.letters, empty, g.letters, ctx)
    gh = multiply_letters(g.letters, h.letters)
    side3 = _side_terms(m, head, tail, gh, empty, empty, ctx)

    total = sum(side1, _ZERO) + sum(side2, _ZERO) - sum(side3, _ZERO)

    tri = triangle_split(spec, g, h)
    n1 = len(piece_lengths(spec, tri.c1.letters))
    n3 = len(piece_lengths(spec, tri.c3.letters))

    ledger = TriangleTermLedger(bound=tri.thick_total, thick_lengths=tri.thick_lengths)
    canceled1 = [False] * len(side1)
    canceled2 = [False] * len(side2)
    canceled3 = [False] * len(side3)
    for j in range(min(n1, len(side1), len(side3))):
        if side1[j] == side3[j]:
            canceled1[j] = canceled3[j] = True
            ledger.canceled_count += 2
    for i in range(1, min(n3, len(side2), len(side3)) + 1):
        if canceled3[len(side3) - i]:
            continue
        if side2[len(side2) - i] == side3[len(side3) - i]:
            canceled2[len(side2) - i] = canceled3[len(side3) - i] = True
            ledger.canceled_count += 2
    for side_no, terms, canceled in (
        (1, side1, canceled1),
        (2, side2, canceled2),
        (3, side3, canceled3),
    ):
        for j, value in enumerate(terms):
            if not canceled[j]:
                ledger.surviving_terms.append((side_no, j + 1, value))
    return total, ledger


def _three_sum_worker(payload, start: int, chunk) -> dict:
    m, primitive, r_bound = payload
    ctx = EvalContext()
    out = {
        "checked": len(chunk),
        "bad_index": None,
        "counterexample": None,
        "ledger_bad_index": None,
        "ledger_counterexample": None,
        "max_survivors": 0,
        "max_bound": 0,
    }
    for i, t in enumerate(chunk):
        total, ledger = three_sum_residual(m, t, ctx)
        direct = primitive._eval(t, ctx)
        if total != direct and out["bad_index"] is None:
            out["bad_index"] = start + i
            out["counterexample"] = {
                "tuple": describe_tuple(t),
                "three_sum": str(total),
                "primitive": str(direct),
            }
        survivors = len(ledger.surviving_terms)
        out["max_survivors"] = max(out["max_survivors"], survivors)
        out["max_bound"] = max(out["max_bound"], ledger.bound)
        if (survivors > ledger.bound or ledger.bound > r_bound) and out[
            "ledger_bad_index"
        ] is None:
            out["ledger_bad_index"] = start + i
            out["ledger_counterexample"] = {
                "tuple": describe_tuple(t),
                "survivors": survivors,
                "bound": ledger.bound,
                "three_r_hat": r_bound,
            }
    return out


def verify_massey_triviality(
    m: MasseyInstance, plan: ExperimentPlan, r_hat: int | None = None
) -> Report:
    """Run the full verification ladder for one instance.

    Stages, in order: the omega factors are cocycles on aligned tuples; the
    beta primitives satisfy their coboundary identities; the representative
    collapses to the eta form; delta P equals the representative; the
    three-sum display reproduces P with the cancellation ledger inside the
    thick bound; sup |P| plateaus along the length ladder and stays under
    3 R-hat times the product of the measured norms.
    """
    report = Report(command="massey")
    jobs = plan.jobs
    if r_hat is None:
        r_hat = measure_r_hat(m.phi.spec, plan.pair_radius, plan.enumeration_cap, jobs)
    lambda_sup = m.phi.table.sup
    report.notes = {
        "r_hat": r_hat,
        "pair_radius": plan.pair_radius,
        "lambda_sup": str(lambda_sup),
        "k1": m.k1,
        "k2": m.k2,
        "mutation": m.mutation,
        "convention_dependent": m.convention_dependent,
    }

    phi_expr = qm_cochain(m.phi)
    delta_phi = coboundary(phi_expr)

    report.add(
        vanishing_stage(
            "cocycle-omega1",
            coboundary(m.omega1),
            stage_tasks(plan, m.k1 + 1, "cocycle"),
            jobs,
        )
    )
    report.add(
        vanishing_stage(
            "cocycle-omega2",
            coboundary(m.omega2),
            stage_tasks(plan, m.k2 + 1, "cocycle"),
            jobs,
        )
    )

    report.add(
        identity_stage(
            "primitive-beta1",
            coboundary(beta1(m)),
            cup(m.omega1, delta_phi),
            stage_tasks(plan, m.k1 + 2, "primitive"),
            jobs,
        )
    )
    report.add(
        identity_stage(
            "primitive-beta2",
            coboundary(beta2(m)),
            cup(delta_phi, m.omega2),
            stage_tasks(plan, m.k2 + 2, "primitive"),
            jobs,
        )
    )

    mu = massey_representative(m)
    arity = m.k1 + m.k2 + 1
    report.add(
        identity_stage(
            "mu-simplification",
            mu,
            mu_simplified(m),
            stage_tasks(plan, arity, "mu_simplification"),
            jobs,
        )
    )
    report.add(
        vanishing_stage(
            "mu-cocycle",
            coboundary(mu),
            stage_tasks(plan, arity + 1, "mu_cocycle"),
            jobs,
        )
    )

    primitive = bounded_primitive(m)
    report.add(
        identity_stage(
            "delta-p-equals-mu",
            coboundary(primitive),
            mu,
            stage_tasks(plan, arity, "delta_p"),
            jobs,
        )
    )

    tasks = stage_tasks(plan, m.k1 + m.k2, "three_sum")
    parts = chunked_map(_three_sum_worker, (m, primitive, 3 * r_hat), tasks, jobs)
    merged = merge_scan_parts(
        [
            {
                "checked": p["checked"],
                "bad_index": p["bad_index"],
                "counterexample": p["counterexample"],
            }
            for p in parts
        ]
    )
    ledger_merged = merge_scan_parts(
        [
            {
                "checked": p["checked"],
                "bad_index": p["ledger_bad_index"],
                "counterexample": p["ledger_counterexample"],
            }
            for p in parts
        ]
    )
    max_survivors = max((p["max_survivors"] for p in parts), default=0)
    max_bound = max((p["max_bound"] for p in parts), default=0)
    report.add(
        StageResult(
            "three-sum-equality",
            merged["counterexample"] is None,
            merged["checked"],
            merged["counterexample"],
            stats={"max_survivors": max_survivors, "max_thick_bound": max_bound},
        )
    )
    report.add(
        StageResult(
            "ledger-bound",
            ledger_merged["counterexample"] is None,
            ledger_merged["checked"],
            ledger_merged["counterexample"],
            stats={"max_survivors": max_survivors, "three_r_hat": 3 * r_hat},
        )
    )

    norm1 = sup_scan(m.omega1, stage_tasks(plan, m.k1, "norms"), jobs)
    norm2 = sup_scan(m.omega2, stage_tasks(plan, m.k2, "norms"), jobs)
    sup_bound = Fraction(3 * r_hat) * norm1["max"] * lambda_sup * norm2["max"]
    ladder_stats: list[dict] = []
    sups: list[Fraction] = []
    for max_len in plan.max_len_ladder:
        rung_tasks = random_aligned_tuples(
            plan.rank,
            m.k1 + m.k2,
            plan.ladder_samples,
            max_len,
            f"{plan.seed}:ladder:{max_len}",
        )
        rung = sup_scan(primitive, rung_tasks, jobs)
        sups.append(rung["max"])
        ladder_stats.append(
            {
                "max_len": max_len,
                "sup": str(rung["max"]),
                "argmax": rung["argmax"],
                "checked": rung["checked"],
            }
        )
    plateau_ok = all(s <= sups[0] for s in sups[1:]) if sups else True
    within = all(s <= sup_bound for s in sups)
    counterexample = None
    if not (plateau_ok and within):
        counterexample = {
            "ladder": [str(s) for s in sups],
            "bound": str(sup_bound),
        }
    report.add(
        StageResult(
            "sup-p-ladder",
            plateau_ok and within,
            sum(r["checked"] for r in ladder_stats),
            counterexample,
            stats={
                "ladder": ladder_stats,
                "bound": str(sup_bound),
                "omega1_norm": str(norm1["max"]),
                "omega2_norm": str(norm2["max"]),
                "lambda_sup": str(lambda_sup),
                "r_hat": r_hat,
            },
        )
    )
    return report


def verify_primitives(m: MasseyInstance, plan: ExperimentPlan) -> Report:
    """Cocycle preconditions and the two beta identities only."""
    report = Report(command="verify-primitive")
    jobs = plan.jobs
    report.notes = {"k1": m.k1, "k2": m.k2, "mutation": m.mutation}
    delta_phi = coboundary(qm_cochain(m.phi))
    report.add(
        vanishing_stage(
            "cocycle-omega1",
            coboundary(m.omega1),
            stage_tasks(plan, m.k1 + 1, "cocycle"),
            jobs,
        )
    )
    report.add(
        vanishing_stage(
            "cocycle-omega2",
            coboundary(m.omega2),
            stage_tasks(plan, m.k2 + 1, "cocycle"),
            jobs,
        )
    )
    report.add(
        identity_stage(
            "primitive-beta1",
            coboundary(beta1(m)),
            cup(m.omega1, delta_phi),
            stage_tasks(plan, m.k1 + 2, "primitive"),
            jobs,
        )
    )
    report.add(
        identity_stage(
            "primitive-beta2",
            coboundary(beta2(m)),
            cup(delta_phi, m.omega2),
            stage_tasks(plan, m.k2 + 2, "primitive"),
            jobs,
        )
    )
    return report
