"""
Finite quasi-metric measure spaces and their geometric constants.

A finite space is a point cloud 0..n-1 carrying a symmetric pairwise
distance table and strictly positive per-point masses. The estimators here
measure the constants that control the geometry:

  * the quasi-triangle constant A0 in  d(x,y) <= A0 [d(x,z) + d(z,y)],
  * the doubling constant C_d in  mu(B(x,2r)) <= C_d mu(B(x,r)) and the
    upper dimension omega = log2(C_d),
  * the lower-bound constant C in  mu(B(x,r)) >= C r^omega, globally and
    for r <= 1 (the local variant),
  * the reverse-doubling constant c in  c lam^kappa mu(B(x,r)) <= mu(B(x,lam r)).

Balls use strict inequality, B(x,r) = {y : d(x,y) < r}; membership flips
exactly when r crosses a pairwise distance.

Resolution contract: each point stands for a cell of an underlying
continuum, so no scaling claim is evaluated below the resolution floor
r_floor (the smallest positive pairwise distance). Checkers clip radii to
r_floor and record a warning when they do.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from homspace.common import (
    DEFAULT_SEED,
    TrendConfig,
    decay_span,
    fit_loglog,
    rng_stream,
    stable_sum,
)

# Exhaustive triple scans above this size fall back to seeded sampling.
EXHAUSTIVE_TRIPLE_CUTOFF = 512


@dataclass(frozen=True)
class FiniteHomSpace:
    """Point cloud with a symmetric distance table and positive masses.

    Point identifiers are 0..n-1. ``coords`` is optional geometry kept by
    the gallery constructors; every estimator consumes only ``dist`` and
    ``weight``.
    """

    dist: np.ndarray
    weight: np.ndarray
    coords: Optional[np.ndarray] = None
    declared_A0: Optional[float] = None
    declared_omega: Optional[float] = None

    def __post_init__(self):
        dist = np.asarray(self.dist, dtype=float)
        weight = np.asarray(self.weight, dtype=float)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise ValueError("dist must be a square table")
        if weight.shape != (dist.shape[0],):
            raise ValueError("weight length must match the point count")
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "weight", weight)
        if self.coords is not None:
            object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))

    # -- basic geometry -----------------------------------------------------

    @property
    def n(self) -> int:
        return int(self.dist.shape[0])

    @property
    def points(self) -> range:
        return range(self.n)

    @cached_property
    def total_mass(self) -> float:
        return stable_sum(self.weight)

    @cached_property
    def diameter(self) -> float:
        return float(self.dist.max()) if self.n else 0.0

    @cached_property
    def r_floor(self) -> float:
        """Smallest positive pairwise distance; 1.0 for a single point."""
        pos = self.dist[self.dist > 0]
        return float(pos.min()) if pos.size else 1.0

    def ball(self, center: int, radius: float) -> "Ball":
        row = self.dist[center]
        members = np.flatnonzero(row < radius)
        return Ball(
            center=int(center),
            radius=float(radius),
            members=members,
            mass=stable_sum(self.weight[members]),
        )

    def ball_mass(self, centers, radii) -> np.ndarray:
        """Masses of B(x, r) for every center x and radius r: (c, r) table."""
        centers = np.asarray(centers, dtype=int)
        radii = np.asarray(radii, dtype=float)
        rows = self.dist[centers]
        out = np.empty((centers.size, radii.size), dtype=float)
        for j, r in enumerate(radii):
            out[:, j] = (rows < r) @ self.weight
        return out

    def scaled(self, dist_factor: float = 1.0, weight_factor: float = 1.0) -> "FiniteHomSpace":
        """Copy with distances and/or weights rescaled by positive factors."""
        if dist_factor <= 0 or weight_factor <= 0:
            raise ValueError("scale factors must be positive")
        return FiniteHomSpace(
            dist=self.dist * dist_factor,
            weight=self.weight * weight_factor,
            coords=self.coords,
            declared_A0=self.declared_A0,
            declared_omega=self.declared_omega,
        )

    def resolved_a0(self, a0: Optional[float] = None, seed: int = DEFAULT_SEED) -> float:
        """Explicit a0, else declared_A0, else the measured estimate."""
        if a0 is not None:
            return float(a0)
        if self.declared_A0 is not None:
            return float(self.declared_A0)
        return estimate_quasi_triangle_constant(self, seed=seed).value


@dataclass(frozen=True)
class Ball:
    """Open ball: members = {y : d(center, y) < radius} (strict)."""

    center: int
    radius: float
    members: np.ndarray
    mass: float


@dataclass
class MetricValidation:
    ok: bool
    a0_used: float
    violations: list = field(default_factory=list)
    truncated: bool = False

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "a0_used": self.a0_used,
            "violations": self.violations,
            "truncated": self.truncated,
        }


@dataclass
class TriangleEstimate:
    value: float
    exact: bool            # exhaustive scan certifies the constant
    degenerate: bool       # fewer than 3 points
    witness: Optional[tuple] = None   # (x, y, z) attaining the max ratio
    n_triples: int = 0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "exact": self.exact,
            "degenerate": self.degenerate,
            "witness": list(self.witness) if self.witness else None,
            "n_triples": self.n_triples,
        }


@dataclass
class DoublingEstimate:
    c_doubling: float
    omega_est: float
    witness: tuple          # (center, radius) attaining the max ratio
    radii: list

    def to_dict(self) -> dict:
        return {
            "c_doubling": self.c_doubling,
            "omega_est": self.omega_est,
            "witness": list(self.witness),
            "radii": list(self.radii),
        }


@dataclass
class LowerBoundReport:
    verdict: str                 # "PASS" | "FAIL"
    c_est: float
    witness: tuple               # (center, radius) attaining the min constant
    omega: float
    r_min: float
    r_max: float
    exponent_pooled: Optional[float]
    flagged_centers: list = field(default_factory=list)
    variant: str = "global"
    scale_factor: float = 1.0
    warnings: list = field(default_factory=list)
    radii: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "c_est": self.c_est,
            "witness": list(self.witness),
            "omega": self.omega,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "exponent_pooled": self.exponent_pooled,
            "witnesses": self.flagged_centers,
            "variant": self.variant,
            "scale_factor": self.scale_factor,
            "warnings": self.warnings,
            "radii": self.radii,
        }


@dataclass
class ReverseDoublingReport:
    verdict: str                 # "PASS" | "FAIL" | "NOT_APPLICABLE"
    c_emp: float
    kappa: float
    worst: Optional[tuple]       # (center, r, lam) attaining the min ratio
    atomic_like: bool = False
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "c_emp": self.c_emp,
            "kappa": self.kappa,
            "worst": list(self.worst) if self.worst else None,
            "atomic_like": self.atomic_like,
            "warnings": self.warnings,
        }


@dataclass
class SpaceStats:
    a0_est: float
    c_doubling_est: float
    omega_est: float
    kappa_est: Optional[float] = None
    a0_exact: bool = True
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "a0_est": self.a0_est,
            "c_doubling_est": self.c_doubling_est,
            "omega_est": self.omega_est,
            "kappa_est": self.kappa_est,
            "a0_exact": self.a0_exact,
            "degenerate": self.degenerate,
        }


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

_MAX_VIOLATIONS = 20


def validate_quasi_metric(space: FiniteHomSpace, a0: Optional[float] = None,
                          seed: int = DEFAULT_SEED) -> MetricValidation:
    """Check symmetry, identity of indiscernibles, nonnegativity, and the
    quasi-triangle inequality at the declared (or measured) constant.

    Raises ValueError("empty space") for n = 0 and
    ValueError("invalid measure") for nonpositive or non-finite weights.
    Structural defects of the distance table are returned as violations,
    not raised, so callers can report all of them at once.
    """
    if space.n == 0:
        raise ValueError("empty space")
    if not np.all(np.isfinite(space.weight)) or np.any(space.weight <= 0):
        bad = int(np.flatnonzero(~(np.isfinite(space.weight) & (space.weight > 0)))[0])
        raise ValueError(f"invalid measure: weight[{bad}] = {space.weight[bad]!r} is not a positive real")

    d = space.dist
    violations = []

    def push(v):
        if len(violations) < _MAX_VIOLATIONS:
            violations.append(v)
        return len(violations) >= _MAX_VIOLATIONS

    neg = np.argwhere(d < 0)
    for i, j in neg[:_MAX_VIOLATIONS]:
        push({"kind": "nonnegativity", "pair": [int(i), int(j)], "value": float(d[i, j])})

    asym = np.argwhere(d != d.T)
    seen = set()
    for i, j in asym:
        key = (min(i, j), max(i, j))
        if key in seen:
            continue
        seen.add(key)
        push({"kind": "symmetry", "pair": [int(i), int(j)],
              "values": [float(d[i, j]), float(d[j, i])]})

    diag_bad = np.flatnonzero(np.diag(d) != 0)
    for i in diag_bad[:_MAX_VIOLATIONS]:
        push({"kind": "identity", "pair": [int(i), int(i)], "value": float(d[i, i])})
    offdiag_zero = np.argwhere((d == 0) & ~np.eye(space.n, dtype=bool))
    seen = set()
    for i, j in offdiag_zero:
        key = (min(i, j), max(i, j))
        if key in seen:
            continue
        seen.add(key)
        push({"kind": "identity", "pair": [int(i), int(j)], "value": 0.0})

    if space.declared_A0 is not None and a0 is None:
        a0_used = float(space.declared_A0)
    elif a0 is not None:
        a0_used = float(a0)
    else:
        a0_used = estimate_quasi_triangle_constant(space, seed=seed).value

    # Quasi-triangle at a0_used; tiny relative slack absorbs roundoff only.
    slack = 1.0 + 1e-12
    n = space.n
    if n >= 3 and not np.any(d != d.T):
        for z in range(n):
            den = d[:, z][:, None] + d[z, :][None, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                bad = d > a0_used * den * slack
            np.fill_diagonal(bad, False)
            bad[:, z] = False
            bad[z, :] = False
            if bad.any():
                xs, ys = np.nonzero(bad)
                for x, y in zip(xs[:_MAX_VIOLATIONS], ys[:_MAX_VIOLATIONS]):
                    if push({"kind": "triangle", "triple": [int(x), int(y), int(z)],
                             "lhs": float(d[x, y]), "rhs": float(a0_used * den[x, y])}):
                        break
            if len(violations) >= _MAX_VIOLATIONS:
                break

    return MetricValidation(
        ok=not violations,
        a0_used=a0_used,
        violations=violations,
        truncated=len(violations) >= _MAX_VIOLATIONS,
    )


# ---------------------------------------------------------------------------
# Constant estimators
# ---------------------------------------------------------------------------

def estimate_quasi_triangle_constant(space: FiniteHomSpace, *,
                                     exhaustive_cutoff: int = EXHAUSTIVE_TRIPLE_CUTOFF,
                                     n_samples: int = 200_000,
                                     seed: int = DEFAULT_SEED) -> TriangleEstimate:
    """Largest ratio d(x,y) / (d(x,z) + d(z,y)) over triples, clamped at 1.

    Exhaustive below the cutoff (the result then certifies the constant);
    above it, a seeded uniform triple sample gives a lower bound, flagged
    via ``exact=False``.
    """
    n = space.n
    d = space.dist
    if n < 3:
        return TriangleEstimate(value=1.0, exact=True, degenerate=True, n_triples=0)

    best = 1.0
    witness = None
    if n <= exhaustive_cutoff:
        count = 0
        offdiag = ~np.eye(n, dtype=bool)
        for z in range(n):
            den = d[:, z][:, None] + d[z, :][None, :]
            mask = offdiag.copy()
            mask[:, z] = False
            mask[z, :] = False
            mask &= den > 0
            count += int(mask.sum())
            if not mask.any():
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(mask, d / den, 0.0)
            idx = int(np.argmax(ratios))
            x, y = divmod(idx, n)
            if ratios[x, y] > best:
                best = float(ratios[x, y])
                witness = (int(x), int(y), int(z))
        return TriangleEstimate(value=best, exact=True, degenerate=False,
                                witness=witness, n_triples=count)

    rng = rng_stream(seed, 0xA0)
    xs = rng.integers(0, n, n_samples)
    ys = rng.integers(0, n, n_samples)
    zs = rng.integers(0, n, n_samples)
    keep = (xs != ys) & (zs != xs) & (zs != ys)
    xs, ys, zs = xs[keep], ys[keep], zs[keep]
    den = d[xs, zs] + d[zs, ys]
    ok = den > 0
    ratios = np.where(ok, d[xs, ys] / np.where(ok, den, 1.0), 0.0)
    if ratios.size:
        i = int(np.argmax(ratios))
        if ratios[i] > best:
            best = float(ratios[i])
            witness = (int(xs[i]), int(ys[i]), int(zs[i]))
    return TriangleEstimate(value=best, exact=False, degenerate=False,
                            witness=witness, n_triples=int(xs.size))


def estimate_doubling(space: FiniteHomSpace, radii) -> DoublingEstimate:
    """Doubling constant max_x,r mu(B(x,2r)) / mu(B(x,r)) and omega = log2 of it.

    Radii should span at least a decade for a stable exponent, though any
    nonempty list is accepted.
    """
    radii = [float(r) for r in radii]
    if not radii:
        raise ValueError("radii list is empty")
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    centers = np.arange(space.n)
    m1 = space.ball_mass(centers, radii)
    m2 = space.ball_mass(centers, [2 * r for r in radii])
    ratios = m2 / m1  # denominators are positive: balls contain their center
    i = int(np.argmax(ratios))
    ci, rj = divmod(i, len(radii))
    c = float(ratios[ci, rj])
    c = max(c, 1.0)
    return DoublingEstimate(
        c_doubling=c,
        omega_est=float(np.log2(c)) if c > 1 else 0.0,
        witness=(int(centers[ci]), radii[rj]),
        radii=radii,
    )


def fit_mass_exponent(space: FiniteHomSpace, r_min: Optional[float] = None,
                      r_max: Optional[float] = None, *, n_radii: int = 12,
                      max_centers: Optional[int] = None,
                      seed: int = DEFAULT_SEED) -> Optional[float]:
    """Pooled log-log slope of ball mass against radius (measured dimension).

    The default window stops at a quarter of the diameter: beyond that,
    balls saturate against the boundary and flatten the slope.
    """
    r_min = space.r_floor if r_min is None else max(float(r_min), space.r_floor)
    if r_max is None:
        # at least most of a decade above r_min, capped at the diameter
        r_max = max(space.diameter / 4, min(space.diameter, 8.0 * r_min))
    else:
        r_max = float(r_max)
    if r_max <= r_min or space.n < 2:
        return None
    radii = np.geomspace(r_min * (1 + 1e-9), r_max, n_radii)
    centers = _pick_centers(space, max_centers, seed)
    masses = space.ball_mass(centers, radii)
    rs = np.broadcast_to(radii, masses.shape).ravel()
    fit = fit_loglog(rs, masses.ravel())
    return None if fit is None else fit[0]


def _pick_centers(space, max_centers, seed):
    centers = np.arange(space.n)
    if max_centers is not None and space.n > max_centers:
        rng = rng_stream(seed, 0xCE)
        centers = np.sort(rng.choice(space.n, size=max_centers, replace=False))
    return centers


def check_lower_bound(space: FiniteHomSpace, omega: float, r_min: float, r_max: float, *,
                      n_radii: int = 12, max_centers: Optional[int] = None,
                      seed: int = DEFAULT_SEED, trend: Optional[TrendConfig] = None,
                      variant: str = "global", scale_factor: float = 1.0) -> LowerBoundReport:
    """Empirical lower-bound constant C = min mu(B(x,r)) / r^omega with a
    per-center trend verdict.

    A center is flagged when its fitted radial exponent deviates from
    omega by more than the tolerance AND its running constant decays by
    at least 1/decay_frac between its extremes over the sampled radii
    (both directions: excess exponent decays toward small r, deficient
    exponent toward large r). Verdict is FAIL when any center is flagged.
    """
    if space.n == 0:
        raise ValueError("empty space")
    if not (0 < r_min < r_max):
        raise ValueError("need 0 < r_min < r_max")
    if omega <= 0:
        raise ValueError("omega must be positive")
    trend = trend or TrendConfig()

    warnings = []
    if r_min < space.r_floor:
        warnings.append(
            f"r_min {r_min:g} below resolution floor {space.r_floor:g}; clipped"
        )
        r_min = space.r_floor
        if r_min >= r_max:
            warnings.append("radius window collapsed at the resolution floor")
            r_max = r_min * (1 + 1e-9)

    radii = np.geomspace(r_min * (1 + 1e-12), r_max, n_radii)
    centers = _pick_centers(space, max_centers, seed)
    masses = space.ball_mass(centers, radii)
    consts = masses / radii[None, :] ** omega

    flat_idx = int(np.argmin(consts))
    ci, rj = divmod(flat_idx, radii.size)
    c_est = float(consts[ci, rj])
    witness = (int(centers[ci]), float(radii[rj]))

    if np.all(masses == masses[:, :1]):
        warnings.append("resolution too coarse: no ball transition in the radius window")

    flagged = []
    for row, center in enumerate(centers):
        fit = fit_loglog(radii, masses[row]) if radii.size >= 4 else None
        exponent = fit[0] if fit else None
        span = decay_span(consts[row])
        if exponent is not None and abs(exponent - omega) > trend.exponent_tol \
                and span <= trend.decay_frac:
            flagged.append({
                "center": int(center),
                "exponent": float(exponent),
                "c_min": float(consts[row].min()),
                "c_max": float(consts[row].max()),
                "worst_radius": float(radii[int(np.argmin(consts[row]))]),
            })
    if radii.size < 4:
        warnings.append("fewer than 4 radii: per-center exponents not fitted (insufficient data)")

    rs = np.broadcast_to(radii, masses.shape).ravel()
    pooled = fit_loglog(rs, masses.ravel())
    return LowerBoundReport(
        verdict="FAIL" if flagged else "PASS",
        c_est=c_est,
        witness=witness,
        omega=float(omega),
        r_min=float(r_min),
        r_max=float(r_max),
        exponent_pooled=None if pooled is None else pooled[0],
        flagged_centers=flagged,
        variant=variant,
        scale_factor=scale_factor,
        warnings=warnings,
        radii=[float(r) for r in radii],
    )


def check_local_lower_bound(space: FiniteHomSpace, omega: float, *,
                            rescale: bool = False, n_radii: int = 12,
                            max_centers: Optional[int] = None,
                            seed: int = DEFAULT_SEED,
                            trend: Optional[TrendConfig] = None) -> LowerBoundReport:
    """Lower-bound check restricted to r <= 1.

    With ``rescale`` the distance table is first divided by the diameter
    (recorded in the report's scale_factor), so "local" means "below one
    diameter".
    """
    factor = 1.0
    target = space
    if rescale and space.diameter > 0:
        factor = space.diameter
        target = space.scaled(dist_factor=1.0 / factor)
    r_min = target.r_floor
    if r_min >= 1.0:
        # Degenerate window: everything at or above scale 1. Report on the
        # single admissible radius and warn.
        report = check_lower_bound(target, omega, r_min * 0.5, 1.0, n_radii=n_radii,
                                   max_centers=max_centers, seed=seed, trend=trend,
                                   variant="local", scale_factor=factor)
        report.warnings.append("resolution floor at or above r = 1; local window degenerate")
        return report
    return check_lower_bound(target, omega, r_min, 1.0, n_radii=n_radii,
                             max_centers=max_centers, seed=seed, trend=trend,
                             variant="local", scale_factor=factor)


def check_reverse_doubling(space: FiniteHomSpace, kappa: float, *,
                           n_radii: int = 6, n_lambdas: int = 6,
                           max_centers: Optional[int] = None,
                           seed: int = DEFAULT_SEED,
                           pass_threshold: float = 0.1) -> ReverseDoublingReport:
    """Empirical reverse-doubling constant
    c = min mu(B(x, lam r)) / (lam^kappa mu(B(x, r))) over sampled
    (x, r, lam) with r below half the diameter and 1 <= lam < diam / (2r).

    Verdict PASS when c stays above ``pass_threshold``. Spaces whose balls
    cannot grow (single point, or window empty) are flagged atomic-like.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    diam = space.diameter
    if space.n < 2 or diam <= 0:
        return ReverseDoublingReport(
            verdict="NOT_APPLICABLE", c_emp=0.0, kappa=kappa, worst=None,
            atomic_like=True,
            warnings=["atomic-like space: balls cannot grow, reverse doubling is vacuous"],
        )

    r_lo = space.r_floor
    r_hi = diam / 2
    if r_hi <= r_lo:
        r_hi = r_lo * (1 + 1e-9)
    radii = np.geomspace(r_lo * (1 + 1e-12), r_hi, n_radii)
    centers = _pick_centers(space, max_centers, seed)

    best = math.inf
    worst = None
    sampled = False
    for r in radii:
        lam_max = diam / (2 * r)
        if lam_max <= 1.0:
            continue
        lams = np.geomspace(1.0, lam_max * (1 - 1e-12), n_lambdas)
        base = space.ball_mass(centers, [r])[:, 0]
        grown = space.ball_mass(centers, lams * r)
        ratios = grown / (lams[None, :] ** kappa * base[:, None])
        sampled = True
        i = int(np.argmin(ratios))
        ci, lj = divmod(i, lams.size)
        if ratios[ci, lj] < best:
            best = float(ratios[ci, lj])
            worst = (int(centers[ci]), float(r), float(lams[lj]))

    if not sampled:
        return ReverseDoublingReport(
            verdict="NOT_APPLICABLE", c_emp=0.0, kappa=kappa, worst=None,
            atomic_like=True,
            warnings=["atomic-like space: no admissible (r, lambda) window"],
        )
    return ReverseDoublingReport(
        verdict="PASS" if best > pass_threshold else "FAIL",
        c_emp=best, kappa=kappa, worst=worst,
    )


def estimate_reverse_doubling_exponent(space: FiniteHomSpace, *,
                                       n_radii: int = 5,
                                       max_centers: Optional[int] = None,
                                       seed: int = DEFAULT_SEED) -> Optional[float]:
    """Weakest observed ball-growth exponent
    min log(mass(B(x, lam r)) / mass(B(x, r))) / log(lam) at the widest
    admissible lam per base radius. None on atomic-like spaces."""
    diam = space.diameter
    if space.n < 2 or diam <= 0:
        return None
    r_lo = space.r_floor
    r_hi = max(diam / 4, r_lo * (1 + 1e-9))
    centers = _pick_centers(space, max_centers, seed)
    worst = None
    for r in np.geomspace(r_lo * (1 + 1e-12), r_hi, n_radii):
        lam = diam / (2 * r)
        if lam <= 1.5:
            continue
        base = space.ball_mass(centers, [r])[:, 0]
        grown = space.ball_mass(centers, [lam * r])[:, 0]
        slopes = np.log(grown / base) / np.log(lam)
        low = float(slopes.min())
        worst = low if worst is None else min(worst, low)
    return worst


def space_stats(space: FiniteHomSpace, *, seed: int = DEFAULT_SEED) -> SpaceStats:
    """Bundle the constant estimates used by reports and the CLI."""
    tri = estimate_quasi_triangle_constant(space, seed=seed)
    if space.n >= 2 and space.diameter > 0:
        r_lo = space.r_floor
        r_hi = max(space.diameter / 4, r_lo * (1 + 1e-9))
        radii = np.geomspace(r_lo * (1 + 1e-12), r_hi, 8)
        doubling = estimate_doubling(space, radii)
    else:
        doubling = DoublingEstimate(c_doubling=1.0, omega_est=0.0, witness=(0, 1.0), radii=[1.0])
    kappa_est = estimate_reverse_doubling_exponent(space, seed=seed)
    if kappa_est is not None:
        kappa_est = min(max(kappa_est, 0.0), doubling.omega_est) or None
    return SpaceStats(
        a0_est=tri.value,
        c_doubling_est=doubling.c_doubling,
        omega_est=doubling.omega_est,
        kappa_est=kappa_est,
        a0_exact=tri.exact,
        degenerate=tri.degenerate,
    )
