"""
Nested net hierarchies and the cube partitions they generate.

Construction contract (all of it re-verified on every build):

  * nets: nested maximal nets, one per level k, separated by c0*delta^k
    and covering within C0*delta^k, grown greedily in a seed-keyed order
    so that coarse centers persist at every finer level;
  * cubes: top-down assignment. At the coarsest level each point joins
    its nearest center; below that, the nearest center lying inside its
    current cube (ties break to the lowest center id). Nested nets
    guarantee each cube contains at least one next-level center (its own);
  * every level partitions the space, cubes nest across levels, and each
    cube sits between the balls B(z, c1*delta^k) and B(z, C1*delta^k)
    around its center z, with c1 = c0 / (3 A0^2) and C1 = 2 A0 C0;
  * the constants must satisfy the admissibility inequality
    12 * A0^3 * C0 * delta <= c0.

Cube indices are center point ids, so level-k cube alpha is the set of
points whose level-k assignment equals alpha. A cube is "fresh" at the
first level where its center enters the net; fresh cubes are the index
set carried by coefficient sequences.

Scale bookkeeping: levels whose nominal scale delta^k drops below the
space's resolution floor exist for completeness but are excluded from
trend diagnostics (the "resolved" window).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from homspace.common import DEFAULT_SEED, rng_stream, stable_sum
from homspace.space import FiniteHomSpace


class InadmissibleConstants(ValueError):
    """(delta, c0, C0) violate 12 * A0^3 * C0 * delta <= c0."""


class CubeConstructionError(RuntimeError):
    """A built system failed its own axiom verification (a bug detector)."""


class ScaleOutOfRange(ValueError):
    """Requested radius resolves to a level outside the built window."""


class HypothesisViolated(ValueError):
    """Input cube masses do not satisfy the assumed lower bound."""


def admissibility_gap(delta: float, c0: float, C0: float, a0: float) -> float:
    """c0 - 12*A0^3*C0*delta; admissible iff nonnegative."""
    return c0 - 12.0 * a0**3 * C0 * delta


def default_constants(space: FiniteHomSpace, *, c0: float = 1.0, C0: float = 2.0,
                      a0: Optional[float] = None, seed: int = DEFAULT_SEED):
    """(delta, c0, C0): delta is the largest power of 1/2 that is admissible
    for the measured (or declared) quasi-triangle constant."""
    a0 = space.resolved_a0(a0, seed=seed)
    # smallest j with 2^-j <= c0 / (12 A0^3 C0)
    bound = c0 / (12.0 * a0**3 * C0)
    j = max(1, int(math.ceil(-math.log2(bound) - 1e-12)))
    return 0.5**j, c0, C0


def default_level_range(space: FiniteHomSpace, delta: float, c0: float, C0: float):
    """Level window [k_min, k_max] with C0*delta^k_min >= diameter and
    c0*delta^k_max <= r_floor (one cube at the top, all points centers at
    the bottom)."""
    diam = space.diameter
    if diam <= 0:
        return (0, 0)
    log_delta = math.log(delta)
    k_min = math.floor(math.log(diam / C0) / log_delta + 1e-9)
    k_max = math.ceil(math.log(space.r_floor / c0) / log_delta - 1e-9)
    return (min(k_min, k_max), max(k_min, k_max))


@dataclass(frozen=True)
class NetSystem:
    """Nested center sets X^k, k_min <= k <= k_max."""

    delta: float
    c0: float
    C0: float
    a0: float
    k_min: int
    k_max: int
    centers: dict                   # level -> sorted ndarray of point ids

    @property
    def levels(self) -> range:
        return range(self.k_min, self.k_max + 1)

    def separation(self, k: int) -> float:
        return self.c0 * self.delta**k

    def covering(self, k: int) -> float:
        return self.C0 * self.delta**k

    def new_centers(self, k: int) -> np.ndarray:
        """X^{k+1} minus X^k, for k in [k_min, k_max - 1]."""
        if not (self.k_min <= k < self.k_max):
            raise KeyError(f"new centers undefined at level {k}")
        return np.setdiff1d(self.centers[k + 1], self.centers[k])

    def fresh_centers(self, k: int) -> np.ndarray:
        """Centers entering the net at level k (k_min excluded: birth levels
        of the coarsest centers predate the window)."""
        if not (self.k_min < k <= self.k_max):
            raise KeyError(f"fresh centers undefined at level {k}")
        return self.new_centers(k - 1)


def build_nets(space: FiniteHomSpace, delta: float, c0: float, C0: float,
               k_range=None, seed: int = DEFAULT_SEED,
               a0: Optional[float] = None) -> NetSystem:
    """Greedy nested maximal nets at separations c0*delta^k.

    Candidates are visited in a seed-keyed shuffled order, identical at
    every level, so builds are reproducible. Raises InadmissibleConstants
    when 12*A0^3*C0*delta > c0.
    """
    if not (0 < delta < 1):
        raise ValueError("delta must lie in (0, 1)")
    if not (0 < c0 <= C0):
        raise ValueError("need 0 < c0 <= C0")
    a0 = space.resolved_a0(a0, seed=seed)
    if admissibility_gap(delta, c0, C0, a0) < 0:
        raise InadmissibleConstants(
            f"inadmissible constants: 12*A0^3*C0*delta = "
            f"{12 * a0**3 * C0 * delta:g} > c0 = {c0:g}"
        )
    if k_range is None:
        k_range = default_level_range(space, delta, c0, C0)
    k_min, k_max = int(k_range[0]), int(k_range[1])
    if k_min > k_max:
        raise ValueError("empty level range")

    n = space.n
    order = rng_stream(seed, 0xD7).permutation(n)
    dist = space.dist

    centers: dict = {}
    chosen: list = []
    min_dist = np.full(n, np.inf)
    for k in range(k_min, k_max + 1):
        sep = c0 * delta**k
        for i in order:
            if min_dist[i] >= sep:
                chosen.append(int(i))
                np.minimum(min_dist, dist[i], out=min_dist)
        centers[k] = np.array(sorted(chosen), dtype=int)

    net = NetSystem(delta=float(delta), c0=float(c0), C0=float(C0), a0=float(a0),
                    k_min=k_min, k_max=k_max, centers=centers)
    _verify_net(net, space)
    return net


def _verify_net(net: NetSystem, space: FiniteHomSpace) -> None:
    prev = None
    for k in net.levels:
        ids = net.centers[k]
        if ids.size == 0:
            raise CubeConstructionError(f"level {k}: empty net")
        if prev is not None and not np.all(np.isin(prev, ids)):
            raise CubeConstructionError(f"level {k}: net not nested")
        sub = space.dist[np.ix_(ids, ids)]
        sep = net.separation(k)
        off = sub[~np.eye(ids.size, dtype=bool)]
        if off.size and float(off.min()) < sep * (1 - 1e-12):
            raise CubeConstructionError(f"level {k}: separation violated")
        cov = space.dist[:, ids].min(axis=1)
        if float(cov.max()) >= net.covering(k):
            raise CubeConstructionError(f"level {k}: covering violated")
        prev = ids


@dataclass
class CubeSystem:
    """Partition hierarchy built on a net system.

    assignment[k][x] is the id of the level-k center whose cube holds x;
    cube_mass[k][alpha] the total weight of that cube.
    """

    space: FiniteHomSpace
    net: NetSystem
    assignment: dict                # level -> ndarray (n,) of center ids
    cube_mass: dict                 # level -> {alpha: mass}
    members_map: dict               # level -> {alpha: sorted ndarray}
    c1: float
    C1: float

    @property
    def delta(self) -> float:
        return self.net.delta

    @property
    def levels(self) -> range:
        return self.net.levels

    def scale(self, k: int) -> float:
        return self.net.delta**k

    def cubes(self, k: int) -> np.ndarray:
        return self.net.centers[k]

    def members(self, k: int, alpha: int) -> np.ndarray:
        return self.members_map[k][int(alpha)]

    def mass(self, k: int, alpha: int) -> float:
        return self.cube_mass[k][int(alpha)]

    def parent(self, k: int, alpha: int) -> int:
        """Id of the level-(k-1) cube containing cube (k, alpha)."""
        if k <= self.net.k_min:
            raise KeyError("coarsest level has no parent")
        return int(self.assignment[k - 1][int(alpha)])

    def children(self, k: int, alpha: int) -> list:
        """Ids of the level-(k+1) cubes contained in cube (k, alpha)."""
        if k >= self.net.k_max:
            return []
        kids = self.net.centers[k + 1]
        return [int(b) for b in kids[self.assignment[k][kids] == int(alpha)]]

    def fresh_cubes(self, k: int) -> np.ndarray:
        return self.net.fresh_centers(k)

    def index_cubes(self, variant: str = "homogeneous", mode: str = "fresh"):
        """Deterministic (k, alpha) index list for coefficient sequences.

        ``fresh`` restricts to cubes at the level where their center enters
        the net (the wavelet-style index set); ``all`` exposes every cube.
        The inhomogeneous variant keeps levels k >= 0 only.
        """
        out = []
        for k in self.levels:
            if variant == "inhomogeneous" and k < 0:
                continue
            if mode == "fresh":
                if k == self.net.k_min:
                    continue
                ids = self.fresh_cubes(k)
            elif mode == "all":
                ids = self.cubes(k)
            else:
                raise ValueError(f"unknown index mode {mode!r}")
            out.extend((k, int(a)) for a in ids)
        return out

    def resolved_levels(self) -> list:
        """Levels whose nominal scale delta^k stays at or above r_floor."""
        rf = self.space.r_floor
        return [k for k in self.levels if self.scale(k) >= rf * (1 - 1e-12)]

    def point_cube(self, k: int, x: int) -> int:
        return int(self.assignment[k][int(x)])

    def to_dict(self) -> dict:
        return {
            "delta": self.net.delta,
            "c0": self.net.c0,
            "C0": self.net.C0,
            "c1": self.c1,
            "C1": self.C1,
            "levels": [
                {
                    "k": k,
                    "centers": [int(a) for a in self.cubes(k)],
                    "assignment": [int(a) for a in self.assignment[k]],
                }
                for k in self.levels
            ],
        }


def build_cubes(net: NetSystem, space: FiniteHomSpace) -> CubeSystem:
    """Top-down cube assignment on a valid net system.

    Verifies the partition, nesting, ball-sandwich, and center-containment
    axioms before returning; any violation raises CubeConstructionError
    with a witness (it indicates a construction bug, not bad user input).
    """
    n = space.n
    dist = space.dist
    assignment: dict = {}
    for k in net.levels:
        ids = net.centers[k]
        assign = np.empty(n, dtype=int)
        if k == net.k_min:
            # nearest center overall; argmin on the sorted id list breaks
            # ties toward the lowest id
            assign[:] = ids[np.argmin(dist[:, ids], axis=1)]
        else:
            prev = assignment[k - 1]
            center_parent = prev[ids]
            for alpha in net.centers[k - 1]:
                members = np.flatnonzero(prev == alpha)
                if members.size == 0:
                    raise CubeConstructionError(f"level {k - 1}: empty cube {int(alpha)}")
                cands = ids[center_parent == alpha]
                if cands.size == 0:
                    # impossible under nested nets: the parent center itself
                    # is a level-k center sitting in its own cube
                    raise CubeConstructionError(
                        f"level {k}: cube {int(alpha)} contains no next-level center"
                    )
                assign[members] = cands[np.argmin(dist[np.ix_(members, cands)], axis=1)]
        assignment[k] = assign

    members_map: dict = {}
    cube_mass: dict = {}
    for k in net.levels:
        per = {}
        mass = {}
        for alpha in net.centers[k]:
            m = np.flatnonzero(assignment[k] == alpha)
            per[int(alpha)] = m
            mass[int(alpha)] = stable_sum(space.weight[m])
        members_map[k] = per
        cube_mass[k] = mass

    cubes = CubeSystem(
        space=space,
        net=net,
        assignment=assignment,
        cube_mass=cube_mass,
        members_map=members_map,
        c1=net.c0 / (3.0 * net.a0**2),
        C1=2.0 * net.a0 * net.C0,
    )
    report = verify_cube_axioms(cubes)
    if not report.ok:
        raise CubeConstructionError(f"cube axioms violated: {report.violations[0]}")
    return cubes


@dataclass
class AxiomReport:
    ok: bool
    violations: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": self.violations, "notes": self.notes}


def verify_cube_axioms(cubes: CubeSystem) -> AxiomReport:
    """Exhaustive re-check of the four finite-space cube axioms.

    partition   every level covers all points with disjoint, nonempty
                cubes whose masses sum to the total mass (1e-12 relative);
    nesting     for l >= k every level-l cube meets exactly one level-k cube;
    sandwich    B(z, c1*d^k) inside the cube inside B(z, C1*d^k);
    containment B(z_desc, C1*d^l) inside B(z_anc, C1*d^k) along ancestry.

    The open/closed interior-closure distinction is vacuous on a finite
    point set and reported as not applicable.
    """
    space = cubes.space
    net = cubes.net
    violations = []

    for k in net.levels:
        ids = net.centers[k]
        assign = cubes.assignment[k]
        if not np.all(np.isin(assign, ids)):
            violations.append({"axiom": "partition", "level": k,
                               "detail": "assignment to a non-center"})
        total = stable_sum([cubes.cube_mass[k][int(a)] for a in ids])
        if abs(total - space.total_mass) > 1e-12 * max(1.0, abs(space.total_mass)):
            violations.append({"axiom": "partition", "level": k,
                               "detail": f"mass sum {total!r} != total {space.total_mass!r}"})
        for alpha in ids:
            if cubes.members_map[k][int(alpha)].size == 0:
                violations.append({"axiom": "partition", "level": k, "cube": int(alpha),
                                   "detail": "empty cube"})
            elif assign[alpha] != alpha:
                violations.append({"axiom": "partition", "level": k, "cube": int(alpha),
                                   "detail": "center assigned outside its own cube"})

    levels = list(net.levels)
    for i, k in enumerate(levels):
        for ell in levels[i + 1:]:
            coarse = cubes.assignment[k]
            fine = cubes.assignment[ell]
            order = np.argsort(fine, kind="stable")
            f_sorted = fine[order]
            c_sorted = coarse[order]
            same_cube = f_sorted[1:] == f_sorted[:-1]
            split = same_cube & (c_sorted[1:] != c_sorted[:-1])
            if np.any(split):
                j = int(np.flatnonzero(split)[0])
                violations.append({
                    "axiom": "nesting", "levels": [k, ell],
                    "cube": int(f_sorted[j]),
                    "detail": f"level-{ell} cube meets two level-{k} cubes "
                              f"({int(c_sorted[j])}, {int(c_sorted[j + 1])})",
                })

    for k in net.levels:
        rk_in = cubes.c1 * net.delta**k
        rk_out = cubes.C1 * net.delta**k
        for alpha in net.centers[k]:
            row = space.dist[alpha]
            members = cubes.members_map[k][int(alpha)]
            inner = np.flatnonzero(row < rk_in)
            if not np.all(np.isin(inner, members)):
                bad = int(np.setdiff1d(inner, members)[0])
                violations.append({"axiom": "sandwich", "level": k, "cube": int(alpha),
                                   "detail": f"inner-ball point {bad} outside the cube"})
            outside = members[row[members] >= rk_out]
            if outside.size:
                violations.append({"axiom": "sandwich", "level": k, "cube": int(alpha),
                                   "detail": f"member {int(outside[0])} outside the outer ball"})

    for i, k in enumerate(levels):
        for ell in levels[i + 1:]:
            rk = cubes.C1 * net.delta**k
            rl = cubes.C1 * net.delta**ell
            for beta in net.centers[ell]:
                alpha = cubes.assignment[k][beta]
                fine_ball = space.dist[beta] < rl
                coarse_ball = space.dist[alpha] < rk
                if np.any(fine_ball & ~coarse_ball):
                    bad = int(np.flatnonzero(fine_ball & ~coarse_ball)[0])
                    violations.append({
                        "axiom": "center-containment", "levels": [k, ell],
                        "cubes": [int(alpha), int(beta)],
                        "detail": f"point {bad} in the fine center ball escapes the coarse one",
                    })

    return AxiomReport(
        ok=not violations,
        violations=violations,
        notes={"interior_closure": "not applicable on a finite point set"},
    )


@dataclass
class ChainReport:
    max_chain_len: int
    bound_N: int
    ok: bool
    branching: dict                  # level -> {alpha: child count}
    witnesses: list = field(default_factory=list)
    atomic_note: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "max_chain_len": self.max_chain_len,
            "bound_N": self.bound_N,
            "ok": self.ok,
            "branching": {str(k): {str(a): int(m) for a, m in v.items()}
                          for k, v in self.branching.items()},
            "witnesses": self.witnesses,
            "atomic_note": self.atomic_note,
        }


def chain_length_bound(delta: float, c1: float, C1: float) -> int:
    """floor(log_{1/delta}(C1 / c1)) + 1."""
    return int(math.floor(math.log(C1 / c1) / math.log(1.0 / delta) + 1e-9)) + 1


def max_single_child_chain(cubes: CubeSystem) -> ChainReport:
    """Longest run of levels over which a multi-point cube has exactly one
    child (which then equals the cube itself).

    Single-point cubes repeat forever on finite data, so their runs are
    excluded from the bound and reported through ``atomic_note``. ``ok``
    asserts max_chain_len <= bound_N.
    """
    net = cubes.net
    all_singleton = all(cubes.members_map[k][int(a)].size == 1
                        for k in net.levels for a in net.centers[k])
    if net.k_max - net.k_min < 1:
        bound = chain_length_bound(net.delta, cubes.c1, cubes.C1)
        return ChainReport(
            max_chain_len=0, bound_N=bound, ok=True, branching={},
            atomic_note=("atomic space: every cube is a single point; "
                         "chain bound not applicable") if all_singleton else None,
        )

    branching: dict = {}
    for k in list(net.levels)[:-1]:
        branching[k] = {int(a): len(cubes.children(k, a)) for a in net.centers[k]}

    run: dict = {}
    for k in reversed(list(net.levels)):
        for alpha in net.centers[k]:
            alpha = int(alpha)
            if k == net.k_max or branching[k][alpha] != 1:
                run[(k, alpha)] = 0
            else:
                child = cubes.children(k, alpha)[0]
                run[(k, alpha)] = 1 + run[(k + 1, child)]

    bound = chain_length_bound(net.delta, cubes.c1, cubes.C1)
    best = 0
    atomic_best = 0
    witnesses = []
    for (k, alpha), length in run.items():
        if cubes.members_map[k][alpha].size > 1:
            if length > best:
                best = length
                witnesses = [{"level": k, "cube": alpha, "length": length}]
            elif length == best and best > 0 and len(witnesses) < 5:
                witnesses.append({"level": k, "cube": alpha, "length": length})
        else:
            atomic_best = max(atomic_best, length)

    note = None
    if atomic_best > bound:
        note = ("atomic cubes present: single-point chains exceed the bound, "
                "which does not apply below the resolution floor")
    elif all_singleton:
        note = "atomic space: every cube is a single point; chain bound not applicable"
    return ChainReport(
        max_chain_len=best,
        bound_N=bound,
        ok=best <= bound,
        branching=branching,
        witnesses=witnesses,
        atomic_note=note,
    )


@dataclass
class PropagationReport:
    verdict: str
    c_input: float
    c_tilde: float
    m_min: Optional[int]
    bound_N: int
    omega: float
    index_set: str
    witness: Optional[dict] = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "c_input": self.c_input,
            "c_tilde": self.c_tilde,
            "m_min": self.m_min,
            "bound_N": self.bound_N,
            "omega": self.omega,
            "index_set": self.index_set,
            "witness": self.witness,
            "notes": self.notes,
        }


def propagate_cube_lower_bound(cubes: CubeSystem, C: float, omega: float,
                               index_set: str = "fresh-all") -> PropagationReport:
    """Propagate mass(Q) >= C*delta^{k*omega} from fresh cubes to all cubes.

    The hypothesis is verified on the fresh cubes selected by ``index_set``
    ("fresh-all" for every level, "fresh-nonneg" for levels k >= 0); a
    violation raises HypothesisViolated with the offending cube. The
    constructive constant is

        C_tilde = C * (M_min - 1) * delta^{(N+1)*omega},

    where N is the single-child chain bound and M_min >= 2 the smallest
    branching count reached at the end of each maximal single-child chain.
    The conclusion mass(Q) >= C_tilde*delta^{k*omega} is then checked on
    every cube of the window.
    """
    if index_set not in ("fresh-all", "fresh-nonneg"):
        raise ValueError(f"unknown index set {index_set!r}")
    net = cubes.net
    if C < 0:
        raise ValueError("C must be nonnegative")

    slack = 1.0 - 1e-12
    for k in net.levels:
        if k == net.k_min:
            continue
        if index_set == "fresh-nonneg" and k < 0:
            continue
        for alpha in cubes.fresh_cubes(k):
            need = C * net.delta ** (k * omega)
            if cubes.mass(k, alpha) < need * slack:
                raise HypothesisViolated(
                    f"hypothesis violated: fresh cube (k={k}, alpha={int(alpha)}) has "
                    f"mass {cubes.mass(k, alpha):g} < {need:g}"
                )

    chain = max_single_child_chain(cubes)
    m_end = []
    for k in list(net.levels)[:-1]:
        for alpha in net.centers[k]:
            m = chain.branching[k][int(alpha)]
            if m >= 2:
                m_end.append(m)
    notes = []
    if not m_end:
        # single chain down the whole window: nothing ever branches
        return PropagationReport(
            verdict="NOT_APPLICABLE", c_input=C, c_tilde=0.0, m_min=None,
            bound_N=chain.bound_N, omega=omega, index_set=index_set,
            notes=["no branching cube in the window (atomic-like system)"],
        )
    m_min = min(m_end)
    c_tilde = C * (m_min - 1) * net.delta ** ((chain.bound_N + 1) * omega)

    witness = None
    verdict = "PASS"
    for k in net.levels:
        for alpha in net.centers[k]:
            need = c_tilde * net.delta ** (k * omega)
            if cubes.mass(k, alpha) < need * slack:
                verdict = "FAIL"
                witness = {"level": k, "cube": int(alpha),
                           "mass": cubes.mass(k, alpha), "required": need}
                break
        if witness:
            break
    return PropagationReport(
        verdict=verdict, c_input=C, c_tilde=c_tilde, m_min=m_min,
        bound_N=chain.bound_N, omega=omega, index_set=index_set,
        witness=witness, notes=notes,
    )


@dataclass
class BallBoundReport:
    verdict: str
    certified: float
    actual: float
    level: int
    alpha_shrink: float
    n_cubes: int
    cube_sum_bound: float
    containment_ok: bool
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "certified": self.certified,
            "actual": self.actual,
            "level": self.level,
            "alpha_shrink": self.alpha_shrink,
            "n_cubes": self.n_cubes,
            "cube_sum_bound": self.cube_sum_bound,
            "containment_ok": self.containment_ok,
            "witness": self.witness,
        }


def shrink_factor(delta: float) -> float:
    """alpha = (1 + 2/delta)^(-1), the ball-shrink used to pick the level."""
    return 1.0 / (1.0 + 2.0 / delta)


def ball_lower_bound_from_cubes(cubes: CubeSystem, space: FiniteHomSpace,
                                x: int, r: float, C: float, omega: float) -> BallBoundReport:
    """Certify mu(B(x,r)) >= C * (alpha/C1)^omega * r^omega from cube masses.

    Picks the level k with C1*delta^(k+1) <= alpha*r < C1*delta^k, collects
    the level-k cubes meeting the shrunken ball B(x, alpha*r), checks each
    is contained in B(x, r), and compares the certified value against the
    actual ball mass. Requires mass(Q) >= C*delta^{k*omega} on that level.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    if r < space.r_floor:
        raise ScaleOutOfRange(
            f"scale out of range: r = {r:g} below the resolution floor {space.r_floor:g}"
        )
    net = cubes.net
    alpha_shrink = shrink_factor(net.delta)
    t = alpha_shrink * r / cubes.C1
    level = math.ceil(math.log(t) / math.log(net.delta) - 1e-9) - 1
    if not (net.k_min <= level <= net.k_max):
        raise ScaleOutOfRange(
            f"scale out of range: r = {r:g} resolves to level {level}, "
            f"window is [{net.k_min}, {net.k_max}]"
        )

    slack = 1.0 - 1e-12
    for beta in cubes.cubes(level):
        need = C * net.delta ** (level * omega)
        if cubes.mass(level, beta) < need * slack:
            raise HypothesisViolated(
                f"hypothesis violated: cube (k={level}, alpha={int(beta)}) has mass "
                f"{cubes.mass(level, beta):g} < {need:g}"
            )

    row = space.dist[int(x)]
    small = row < alpha_shrink * r
    big = row < r
    meeting = [int(b) for b in cubes.cubes(level)
               if np.any(small[cubes.members_map[level][int(b)]])]
    containment_ok = True
    witness = None
    for beta in meeting:
        members = cubes.members_map[level][beta]
        escaped = members[~big[members]]
        if escaped.size:
            containment_ok = False
            witness = {"cube": beta, "point": int(escaped[0])}
            break

    certified = C * (alpha_shrink / cubes.C1) ** omega * r**omega
    cube_sum = len(meeting) * C * net.delta ** (level * omega)
    actual = stable_sum(space.weight[big])
    verdict = "PASS" if containment_ok and certified <= actual * (1 + 1e-12) else "FAIL"
    return BallBoundReport(
        verdict=verdict,
        certified=certified,
        actual=actual,
        level=level,
        alpha_shrink=alpha_shrink,
        n_cubes=len(meeting),
        cube_sum_bound=cube_sum,
        containment_ok=containment_ok,
        witness=witness,
    )
