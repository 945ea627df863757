"""
Embedding diagnostics: when does  ||.||_{target} <= C ||.||_{source}  hold
uniformly over coefficient sequences on a cube system?

Both directions of the characterization are exercised:

  necessity    a one-coefficient sequence at cube (k0, a0) has closed-form
               norms delta^{-k0 s} mass^{1/p - 1/2} on both sides, so a
               uniform embedding constant forces the per-cube constants
               c(k0, a0) = mass / delta^{k0 omega} to stay bounded below.
               On finite data the verdict is a trend statement: a cube
               ancestry chain whose fitted mass exponent strays from omega
               while its constants decay declares failure.

  sufficiency  a seeded batch of sequences (deltas, single-level,
               multi-level, and mass-concentrated adversarial draws) scans
               the ratio target/source. For Besov pairs the scan also pins
               the constructive constant c_min^{1/p1 - 1/p2} coming from
               the minimal cube constant: when the lower bound holds, no
               ratio may exceed it.

``characterize`` runs the measure lower-bound check, the necessity scan,
and the ratio scan, and asserts their verdicts agree.

The A_p product test for lattice weights lives here as well: it bounds
avg_Q(w) * avg_Q(w^{-1/(p-1)})^{p-1} over dyadic cubes of an R^n grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from homspace.common import DEFAULT_SEED, TrendConfig, decay_span, fit_loglog, rng_stream
from homspace.dyadic import CubeSystem
from homspace.gallery import RnDyadicGrid
from homspace.seqnorm import CoefSequence, NormParams, sequence_norm
from homspace.space import (
    FiniteHomSpace,
    LowerBoundReport,
    check_local_lower_bound,
    check_lower_bound,
)

TRACE_TOL = 1e-9


@dataclass(frozen=True)
class EmbedParams:
    """Source/target norm parameters tied to the trace line
    s1 - omega/p1 = s2 - omega/p2 (within 1e-9), s1 <= s2.

    Besov pairs share q; Triebel-Lizorkin pairs may differ in q but need
    finite p on both sides and |s_i - omega/p_i| < eta (eta is the
    regularity budget of the kernel model, default 1).
    """

    source: NormParams          # (s2, p2, q2)
    target: NormParams          # (s1, p1, q1)
    omega: float
    eta: float = 1.0

    def __post_init__(self):
        src, tgt = self.source, self.target
        if src.family != tgt.family:
            raise ValueError("source and target families must match")
        if src.variant != tgt.variant:
            raise ValueError("source and target variants must match")
        if abs(src.delta - tgt.delta) > 1e-12:
            raise ValueError("source and target deltas must match")
        if tgt.s > src.s:
            raise ValueError("target smoothness s1 must not exceed source s2")
        lhs = tgt.s - _ratio(self.omega, tgt.p)
        rhs = src.s - _ratio(self.omega, src.p)
        if abs(lhs - rhs) > TRACE_TOL:
            raise ValueError(
                f"trace-line constraint violated: s1 - omega/p1 = {lhs!r} "
                f"differs from s2 - omega/p2 = {rhs!r}"
            )
        if src.family == "besov" and abs(src.q - tgt.q) > 1e-12 \
                and not (math.isinf(src.q) and math.isinf(tgt.q)):
            raise ValueError("besov embeddings share a single q")
        if src.family == "triebel_lizorkin":
            if not (self.eta > 0):
                raise ValueError("eta must be positive")
            for params in (src, tgt):
                if abs(params.s - _ratio(self.omega, params.p)) >= self.eta:
                    raise ValueError(
                        "triebel_lizorkin pairs need |s - omega/p| < eta"
                    )

    @property
    def family(self) -> str:
        return self.source.family

    @property
    def variant(self) -> str:
        return self.source.variant

    def to_dict(self) -> dict:
        return {
            "source": self.source.to_dict(),
            "target": self.target.to_dict(),
            "omega": self.omega,
            "eta": self.eta,
        }


def _ratio(omega: float, p: float) -> float:
    return 0.0 if math.isinf(p) else omega / p


# ---------------------------------------------------------------------------
# Necessity: delta sequences force per-cube constants
# ---------------------------------------------------------------------------

@dataclass
class NecessityReport:
    verdict: str                     # "PASS" | "FAIL" | "VACUOUS"
    min_constant: Optional[float]
    witness: Optional[dict]
    per_level_min: dict
    worst_chain: Optional[dict]
    constants: dict                  # (k, alpha) key as "k:alpha" -> constant
    resolved_levels: list
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "min_constant": self.min_constant,
            "witness": self.witness,
            "per_level_min": {str(k): v for k, v in self.per_level_min.items()},
            "worst_chain": self.worst_chain,
            "constants": {f"{k}:{a}": c for (k, a), c in self.constants.items()},
            "resolved_levels": self.resolved_levels,
            "notes": self.notes,
        }


def implied_constant(cubes: CubeSystem, k: int, alpha: int, omega: float) -> float:
    """mass(Q) / delta^{k * omega}, the constant a uniform embedding forces."""
    return cubes.mass(k, alpha) / cubes.delta ** (k * omega)


def delta_ratio(cubes: CubeSystem, k0: int, alpha0: int, params: EmbedParams) -> float:
    """target/source norm ratio of the one-coefficient sequence at (k0, a0),
    in closed form: delta^{-k0 (s1 - s2)} * mass^{1/p1 - 1/p2}."""
    mass = cubes.mass(k0, alpha0)
    d = cubes.delta
    s1, p1 = params.target.s, params.target.p
    s2, p2 = params.source.s, params.source.p
    return d ** (-k0 * (s1 - s2)) * mass ** (_inv(p1) - _inv(p2))


def _inv(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


def delta_necessity_test(cubes: CubeSystem, params: EmbedParams, *,
                         trend: Optional[TrendConfig] = None) -> NecessityReport:
    """Closed-form delta-sequence scan over every fresh cube in the variant
    window, with an ancestry-chain trend verdict.

    Chains walk each finest resolved cube up to the window root; a chain
    fails when its fitted mass exponent deviates from omega by more than
    the tolerance AND its constants decay by 1/decay_frac between
    extremes. With p1 = p2 the embedding is an identity and the scan is
    vacuous.
    """
    trend = trend or TrendConfig()
    if abs(_inv(params.target.p) - _inv(params.source.p)) < 1e-15:
        return NecessityReport(
            verdict="VACUOUS", min_constant=None, witness=None, per_level_min={},
            worst_chain=None, constants={}, resolved_levels=[],
            notes=["p1 = p2 forces s1 = s2 on the trace line: identity embedding"],
        )

    omega = params.omega
    window = [k for k in cubes.levels
              if params.variant == "homogeneous" or k >= 0]
    resolved = [k for k in cubes.resolved_levels() if k in window]

    constants: dict = {}
    for k in window:
        if k == cubes.net.k_min:
            continue
        for alpha in cubes.fresh_cubes(k):
            constants[(k, int(alpha))] = implied_constant(cubes, k, int(alpha), omega)

    if not constants:
        return NecessityReport(
            verdict="VACUOUS", min_constant=None, witness=None, per_level_min={},
            worst_chain=None, constants={}, resolved_levels=resolved,
            notes=["no fresh cubes in the variant window"],
        )

    min_key = min(constants, key=lambda key: constants[key])
    per_level_min = {}
    for k in window:
        vals = [c for (kk, _), c in constants.items() if kk == k]
        if vals:
            per_level_min[k] = min(vals)

    # ancestry-chain trend over resolved levels (all cubes, not only fresh:
    # the chain tracks one spatial location across scales)
    worst_chain = None
    failing = False
    if len(resolved) >= 2:
        k_fine = resolved[-1]
        for leaf in cubes.cubes(k_fine):
            chain_levels = []
            chain_masses = []
            chain_consts = []
            alpha = int(leaf)
            for k in reversed(resolved):
                alpha_k = cubes.point_cube(k, alpha)
                chain_levels.append(k)
                chain_masses.append(cubes.mass(k, alpha_k))
                chain_consts.append(implied_constant(cubes, k, alpha_k, omega))
            span = decay_span(chain_consts)
            fit = fit_loglog([cubes.scale(k) for k in chain_levels], chain_masses)
            exponent = fit[0] if fit else None
            flagged = (exponent is not None
                       and abs(exponent - omega) > trend.exponent_tol
                       and span <= trend.decay_frac)
            if worst_chain is None or span < worst_chain["span"]:
                worst_chain = {
                    "leaf": int(leaf),
                    "levels": list(chain_levels),
                    "constants": [float(c) for c in chain_consts],
                    "exponent": exponent,
                    "span": float(span),
                    "flagged": bool(flagged),
                }
            if flagged:
                failing = True

    return NecessityReport(
        verdict="FAIL" if failing else "PASS",
        min_constant=float(constants[min_key]),
        witness={"level": min_key[0], "cube": min_key[1],
                 "constant": float(constants[min_key])},
        per_level_min=per_level_min,
        worst_chain=worst_chain,
        constants=constants,
        resolved_levels=resolved,
    )


# ---------------------------------------------------------------------------
# Sufficiency: ratio scans over sequence batches
# ---------------------------------------------------------------------------

@dataclass
class ScanReport:
    sup_ratio: float
    witness_id: Optional[str]
    n_sequences: int
    n_nonzero: int
    proof_constant: Optional[float]
    c_min: Optional[float]
    violations: list = field(default_factory=list)
    verdict: str = "OK"
    exploratory: bool = False

    def to_dict(self) -> dict:
        return {
            "sup_ratio": self.sup_ratio,
            "witness_id": self.witness_id,
            "n_sequences": self.n_sequences,
            "n_nonzero": self.n_nonzero,
            "proof_constant": self.proof_constant,
            "c_min": self.c_min,
            "witnesses": self.violations,
            "verdict": self.verdict,
            "exploratory": self.exploratory,
        }


def generate_batch(cubes: CubeSystem, variant: str, n_sequences: int,
                   seed: int) -> list:
    """Deterministic scan batch: every fresh-cube delta first, then equal
    thirds of single-level, multi-level, and adversarial draws (the latter
    concentrate coefficients on the smallest-mass cubes per level)."""
    index = cubes.index_cubes(variant, "fresh")
    batch = []
    for k, alpha in index:
        batch.append((f"delta:{k}:{alpha}",
                      CoefSequence(cubes, {(k, alpha): 1.0})))
    if not index:
        return batch
    rng = rng_stream(seed, 0xBA7C4)
    levels = sorted({k for k, _ in index})
    by_level = {k: [a for kk, a in index if kk == k] for k in levels}
    smallest = {
        k: min(by_level[k], key=lambda a: cubes.mass(k, a))
        for k in levels
    }
    i = 0
    while len(batch) < n_sequences:
        mode = i % 3
        if mode == 0:
            k = levels[int(rng.integers(len(levels)))]
            ids = by_level[k]
            take = ids if len(ids) <= 6 else list(rng.choice(ids, size=6, replace=False))
            entries = {(k, int(a)): float(v)
                       for a, v in zip(take, rng.standard_normal(len(take)))}
            batch.append((f"single-level:{i}", CoefSequence(cubes, entries)))
        elif mode == 1:
            entries = {}
            for k in levels:
                ids = by_level[k]
                take = ids if len(ids) <= 3 else list(rng.choice(ids, size=3, replace=False))
                for a, v in zip(take, rng.standard_normal(len(take))):
                    entries[(k, int(a))] = float(v)
            batch.append((f"multi-level:{i}", CoefSequence(cubes, entries)))
        else:
            entries = {(k, int(smallest[k])): float(abs(v) + 0.5)
                       for k, v in zip(levels, rng.standard_normal(len(levels)))}
            batch.append((f"adversarial:{i}", CoefSequence(cubes, entries)))
        i += 1
    return batch[:max(n_sequences, len(index))]


def proof_constant_besov(cubes: CubeSystem, params: EmbedParams) -> tuple:
    """(c_min, constant): c_min is the minimal fresh-cube constant in the
    window; the explicit Besov chain gives target <= c_min^{1/p1 - 1/p2} * source
    (the exponent is <= 0, so a smaller c_min weakens the bound)."""
    window = [k for k in cubes.levels
              if params.variant == "homogeneous" or k >= 0]
    consts = []
    for k in window:
        if k == cubes.net.k_min:
            continue
        for alpha in cubes.fresh_cubes(k):
            consts.append(implied_constant(cubes, k, int(alpha), params.omega))
    if not consts:
        return None, None
    c_min = min(consts)
    expo = _inv(params.target.p) - _inv(params.source.p)
    return float(c_min), float(c_min**expo)


def sequence_ratio(seq: CoefSequence, params: EmbedParams) -> Optional[float]:
    """target/source norm ratio; None for the neutral 0/0 of a zero
    sequence. A vanishing source with a nonzero target is impossible (the
    supports coincide) and is asserted."""
    src = sequence_norm(seq, params.source)
    tgt = sequence_norm(seq, params.target)
    if src == 0.0 and tgt == 0.0:
        return None
    if src == 0.0:
        raise AssertionError(
            f"source norm vanished with target norm {tgt!r}; impossible "
            "since the supports coincide"
        )
    return tgt / src


def embedding_ratio_scan(cubes: CubeSystem, params: EmbedParams, *,
                         n_sequences: int = 256, seed: int = DEFAULT_SEED,
                         lower_bound_holds: Optional[bool] = None) -> ScanReport:
    """Scan target/source ratios over a seeded batch.

    Zero sequences are skipped as neutral. For Besov pairs, when the lower
    bound holds every ratio must stay below the constructive constant;
    violations carry the witness sequence id.
    """
    batch = generate_batch(cubes, params.variant, n_sequences, seed)
    sup_ratio = 0.0
    witness_id = None
    n_nonzero = 0
    ratios = []
    for label, seq in batch:
        ratio = sequence_ratio(seq, params)
        if ratio is None:
            continue
        n_nonzero += 1
        ratios.append((label, ratio))
        if ratio > sup_ratio:
            sup_ratio = ratio
            witness_id = label

    c_min = None
    proof_c = None
    violations = []
    verdict = "OK"
    exploratory = False
    if params.family == "besov":
        c_min, proof_c = proof_constant_besov(cubes, params)
        if lower_bound_holds is False:
            exploratory = True
        elif proof_c is not None:
            for label, ratio in ratios:
                if ratio > proof_c * (1 + 1e-9):
                    violations.append({"id": label, "ratio": float(ratio),
                                       "bound": proof_c})
            if violations:
                verdict = "BOUND_VIOLATED"
    else:
        exploratory = True

    return ScanReport(
        sup_ratio=float(sup_ratio),
        witness_id=witness_id,
        n_sequences=len(batch),
        n_nonzero=n_nonzero,
        proof_constant=proof_c,
        c_min=c_min,
        violations=violations,
        verdict=verdict,
        exploratory=exploratory,
    )


# ---------------------------------------------------------------------------
# The full characterization loop
# ---------------------------------------------------------------------------

@dataclass
class CharacterizationReport:
    verdict: str                         # PASS | FAIL | DISCREPANCY | NOT_APPLICABLE
    lower_bound: Optional[LowerBoundReport]
    necessity: Optional[NecessityReport]
    scan: Optional[ScanReport]
    notes: list = field(default_factory=list)

    def consistent(self) -> bool:
        return self.verdict in ("PASS", "FAIL", "NOT_APPLICABLE")

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "lower_bound": self.lower_bound.to_dict() if self.lower_bound else None,
            "necessity": self.necessity.to_dict() if self.necessity else None,
            "scan": self.scan.to_dict() if self.scan else None,
            "notes": self.notes,
        }


def characterize(space: FiniteHomSpace, cubes: CubeSystem, params: EmbedParams, *,
                 n_sequences: int = 256, seed: int = DEFAULT_SEED,
                 trend: Optional[TrendConfig] = None) -> CharacterizationReport:
    """Run the lower-bound check, the delta-sequence necessity scan, and
    the ratio scan, and assert the three agree.

    Homogeneous pairs check the bound over the full radius window,
    inhomogeneous ones over r <= 1. Disagreement yields DISCREPANCY with
    all three sub-reports attached (a scale-resolution artifact worth
    inspecting, not silently resolved).
    """
    if space.n == 1:
        return CharacterizationReport(
            verdict="NOT_APPLICABLE", lower_bound=None, necessity=None, scan=None,
            notes=["atomic space: the point carries positive mass, the "
                   "vanishing-point-mass hypothesis fails, no verdict"],
        )
    trend = trend or TrendConfig()
    omega = params.omega
    if params.variant == "inhomogeneous":
        lb = check_local_lower_bound(space, omega, seed=seed, trend=trend)
    else:
        lb = check_lower_bound(space, omega, space.r_floor, max(space.diameter, space.r_floor * 2),
                               seed=seed, trend=trend)
    necessity = delta_necessity_test(cubes, params, trend=trend)
    scan = embedding_ratio_scan(cubes, params, n_sequences=n_sequences, seed=seed,
                                lower_bound_holds=(lb.verdict == "PASS"))

    notes = []
    if necessity.verdict == "VACUOUS":
        notes.append("necessity scan vacuous (identity embedding); verdict from the lower bound")
        agreed = lb.verdict
    elif lb.verdict == necessity.verdict:
        agreed = lb.verdict
    else:
        agreed = None
        notes.append(
            f"lower bound says {lb.verdict} but delta necessity says {necessity.verdict}"
        )
    if agreed == "PASS" and scan.verdict == "BOUND_VIOLATED":
        agreed = None
        notes.append("ratio scan exceeded the constructive constant on a "
                     "lower-bound-passing space")
    return CharacterizationReport(
        verdict=agreed if agreed else "DISCREPANCY",
        lower_bound=lb,
        necessity=necessity,
        scan=scan,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# A_p product test for lattice weights
# ---------------------------------------------------------------------------

@dataclass
class ApReport:
    estimate: float
    p: float
    witness: Optional[dict]
    per_level_max: dict

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "p": self.p,
            "witness": self.witness,
            "per_level_max": {str(k): v for k, v in self.per_level_max.items()},
        }


def ap_weight_check(grid: RnDyadicGrid, w, p: float) -> ApReport:
    """sup over dyadic cubes Q of avg_Q(w) * avg_Q(w^{-1/(p-1)})^{p-1}.

    Averages are arithmetic means over the lattice points inside Q (a
    uniform lattice makes them Lebesgue averages). Requires p > 1 and a
    positive weight field.
    """
    if p <= 1:
        raise ValueError("the A_p product needs p > 1")
    w = np.asarray(w, dtype=float)
    if w.shape != (grid.points.shape[0],):
        raise ValueError("weight field length must match the grid")
    if np.any(w <= 0):
        raise ValueError("weight field must be positive")
    dual = w ** (-1.0 / (p - 1.0))
    best = 0.0
    witness = None
    per_level = {}
    for j in grid.levels:
        level_best = 0.0
        for kvec in grid.cubes(j):
            members = grid.members(j, kvec)
            avg_w = float(np.mean(w[members]))
            avg_dual = float(np.mean(dual[members]))
            value = avg_w * avg_dual ** (p - 1.0)
            if value > level_best:
                level_best = value
            if value > best:
                best = value
                witness = {"level": j, "cube": [int(v) for v in kvec], "value": value}
        per_level[j] = level_best
    return ApReport(estimate=best, p=float(p), witness=witness, per_level_max=per_level)
