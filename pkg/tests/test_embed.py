import math

import numpy as np
import pytest

from homspace import gallery
from homspace.embed import (
    EmbedParams,
    ap_weight_check,
    characterize,
    delta_necessity_test,
    delta_ratio,
    embedding_ratio_scan,
    implied_constant,
    proof_constant_besov,
)
from homspace.gallery import unit_dyadic_lattice
from homspace.seqnorm import CoefSequence, NormParams, sequence_norm
from homspace.space import FiniteHomSpace

from conftest import build_system


def besov_pair(delta, s1, p1, s2, p2, q=1.0, omega=1.0, variant="homogeneous"):
    return EmbedParams(
        source=NormParams(s=s2, p=p2, q=q, delta=delta, omega=omega,
                          variant=variant, family="besov"),
        target=NormParams(s=s1, p=p1, q=q, delta=delta, omega=omega,
                          variant=variant, family="besov"),
        omega=omega,
    )


# ---------------------------------------------------------------------------
# parameter validation
# ---------------------------------------------------------------------------

def test_trace_line_enforced():
    with pytest.raises(ValueError, match="trace-line"):
        besov_pair(1 / 32, s1=0.4, p1=2.0, s2=1.0, p2=1.0)  # 0.4 - 0.5 != 0


def test_family_and_variant_must_match():
    src = NormParams(s=1.0, p=1.0, q=1.0, delta=1 / 32, family="besov")
    tgt = NormParams(s=0.5, p=2.0, q=1.0, delta=1 / 32, family="triebel_lizorkin")
    with pytest.raises(ValueError, match="families"):
        EmbedParams(source=src, target=tgt, omega=1.0)
    tgt2 = NormParams(s=0.5, p=2.0, q=1.0, delta=1 / 32, family="besov",
                      variant="inhomogeneous")
    with pytest.raises(ValueError, match="variants"):
        EmbedParams(source=src, target=tgt2, omega=1.0)


def test_besov_requires_shared_q():
    src = NormParams(s=1.0, p=1.0, q=1.0, delta=1 / 32, family="besov")
    tgt = NormParams(s=0.5, p=2.0, q=2.0, delta=1 / 32, family="besov")
    with pytest.raises(ValueError, match="single q"):
        EmbedParams(source=src, target=tgt, omega=1.0)


def test_target_smoothness_cannot_exceed_source():
    with pytest.raises(ValueError, match="smoothness"):
        besov_pair(1 / 32, s1=1.0, p1=1.0, s2=0.5, p2=2.0)


def test_tl_pair_eta_gate():
    kw = dict(delta=1 / 32, omega=1.0, family="triebel_lizorkin")
    src = NormParams(s=2.0, p=1.0, q=1.0, **kw)     # s - omega/p = 1.0, at eta
    tgt = NormParams(s=1.5, p=2.0, q=2.0, **kw)
    with pytest.raises(ValueError, match="eta"):
        EmbedParams(source=src, target=tgt, omega=1.0, eta=1.0)
    ok = EmbedParams(source=src, target=tgt, omega=1.0, eta=1.5)
    assert ok.family == "triebel_lizorkin"


# ---------------------------------------------------------------------------
# necessity
# ---------------------------------------------------------------------------

def test_implied_constants_match_brute(grid64_cubes):
    params = besov_pair(grid64_cubes.delta, s1=0.5, p1=2.0, s2=1.0, p2=1.0)
    report = delta_necessity_test(grid64_cubes, params)
    assert report.verdict == "PASS"
    for (k, alpha), c in report.constants.items():
        assert c == pytest.approx(
            grid64_cubes.mass(k, alpha) / grid64_cubes.delta ** k, rel=1e-12)
    brute_min = min(report.constants.values())
    assert report.min_constant == pytest.approx(brute_min)
    assert report.witness["constant"] == pytest.approx(brute_min)


def test_necessity_vacuous_when_p_equal(grid64_cubes):
    params = besov_pair(grid64_cubes.delta, s1=0.5, p1=2.0, s2=0.5, p2=2.0)
    report = delta_necessity_test(grid64_cubes, params)
    assert report.verdict == "VACUOUS"


def test_necessity_fails_on_singular_weight():
    sp = gallery.build(gallery.GallerySpec(kind="weighted_grid", n=129, dim=1,
                                           alpha=2.0, beta=0.0, extent=2.0))
    cubes = build_system(sp)
    params = besov_pair(cubes.delta, s1=0.5, p1=2.0, s2=1.0, p2=1.0,
                        variant="inhomogeneous")
    report = delta_necessity_test(cubes, params)
    assert report.verdict == "FAIL"
    assert report.worst_chain["flagged"]
    assert report.worst_chain["span"] <= 0.1


def test_ratio_rearrangement_recovers_constant(grid64_cubes):
    # embedding with constant C on deltas forces mass >= C' delta^{k omega}:
    # invert ratio = c^{1/p1 - 1/p2} per cube and compare
    params = besov_pair(grid64_cubes.delta, s1=0.5, p1=2.0, s2=1.0, p2=1.0)
    expo = 1.0 / 2.0 - 1.0 / 1.0
    for k, alpha in grid64_cubes.index_cubes("homogeneous", "fresh")[::7]:
        ratio = delta_ratio(grid64_cubes, k, alpha, params)
        recovered = ratio ** (1.0 / expo)
        assert recovered == pytest.approx(
            implied_constant(grid64_cubes, k, alpha, 1.0), rel=1e-12)


# ---------------------------------------------------------------------------
# ratio scans
# ---------------------------------------------------------------------------

def test_scan_delta_ratios_match_closed_form(grid64_cubes):
    params = besov_pair(grid64_cubes.delta, s1=0.5, p1=2.0, s2=1.0, p2=1.0)
    index = grid64_cubes.index_cubes("homogeneous", "fresh")
    for k, alpha in index[::9]:
        seq = CoefSequence(grid64_cubes, {(k, alpha): 1.0})
        measured = (sequence_norm(seq, params.target)
                    / sequence_norm(seq, params.source))
        assert measured == pytest.approx(delta_ratio(grid64_cubes, k, alpha, params),
                                         rel=1e-12)


def test_scan_sound_on_uniform_grid(grid64_cubes):
    params = besov_pair(grid64_cubes.delta, s1=0.5, p1=2.0, s2=1.0, p2=1.0)
    report = embedding_ratio_scan(grid64_cubes, params, n_sequences=128)
    assert report.verdict == "OK"
    assert not report.violations
    assert report.sup_ratio <= report.proof_constant * (1 + 1e-9)
    c_min, proof = proof_constant_besov(grid64_cubes, params)
    assert report.c_min == pytest.approx(c_min)
    assert proof == pytest.approx(c_min ** (1 / 2 - 1 / 1))


def test_zero_sequence_ratio_neutral(grid64_cubes):
    from homspace.embed import sequence_ratio

    params = besov_pair(grid64_cubes.delta, s1=0.5, p1=2.0, s2=1.0, p2=1.0)
    key = grid64_cubes.index_cubes("homogeneous", "fresh")[0]
    assert sequence_ratio(CoefSequence(grid64_cubes, {key: 0.0}), params) is None
    assert sequence_ratio(CoefSequence(grid64_cubes, {key: 2.0}), params) is not None


def test_scan_deterministic(grid64_cubes):
    params = besov_pair(grid64_cubes.delta, s1=0.0, p1=math.inf, s2=1.0, p2=1.0)
    a = embedding_ratio_scan(grid64_cubes, params, n_sequences=64, seed=42)
    b = embedding_ratio_scan(grid64_cubes, params, n_sequences=64, seed=42)
    assert a.to_dict() == b.to_dict()


def test_scan_tl_exploratory(grid64_cubes):
    kw = dict(delta=grid64_cubes.delta, omega=1.0, family="triebel_lizorkin")
    params = EmbedParams(
        source=NormParams(s=0.75, p=1.0, q=1.0, **kw),
        target=NormParams(s=0.25, p=2.0, q=2.0, **kw),
        omega=1.0,
    )
    report = embedding_ratio_scan(grid64_cubes, params, n_sequences=48)
    assert report.exploratory
    assert report.proof_constant is None
    assert report.sup_ratio > 0


# ---------------------------------------------------------------------------
# characterize
# ---------------------------------------------------------------------------

def test_characterize_uniform_pass(grid64, grid64_cubes):
    params = besov_pair(grid64_cubes.delta, s1=0.5, p1=2.0, s2=1.0, p2=1.0)
    report = characterize(grid64, grid64_cubes, params, n_sequences=96)
    assert report.verdict == "PASS"
    assert report.lower_bound.verdict == "PASS"
    assert report.necessity.verdict == "PASS"
    assert report.scan.sup_ratio <= report.scan.proof_constant * (1 + 1e-9)


def test_characterize_singular_weight_fails():
    sp = gallery.build(gallery.GallerySpec(kind="weighted_grid", n=129, dim=1,
                                           alpha=2.0, beta=0.0, extent=2.0))
    cubes = build_system(sp)
    params = besov_pair(cubes.delta, s1=0.5, p1=2.0, s2=1.0, p2=1.0,
                        variant="inhomogeneous")
    report = characterize(sp, cubes, params, n_sequences=64)
    assert report.verdict == "FAIL"
    assert report.lower_bound.verdict == "FAIL"
    assert report.necessity.verdict == "FAIL"


def test_characterize_atomic_space():
    sp = FiniteHomSpace(dist=np.zeros((1, 1)), weight=np.ones(1))
    report = characterize(sp, None, None)
    assert report.verdict == "NOT_APPLICABLE"
    assert "atomic" in report.notes[0]


def test_characterize_deterministic(grid64, grid64_cubes):
    params = besov_pair(grid64_cubes.delta, s1=0.5, p1=2.0, s2=1.0, p2=1.0)
    a = characterize(grid64, grid64_cubes, params, n_sequences=48, seed=7)
    b = characterize(grid64, grid64_cubes, params, n_sequences=48, seed=7)
    assert a.to_dict() == b.to_dict()


# ---------------------------------------------------------------------------
# A_p product
# ---------------------------------------------------------------------------

def test_ap_constant_one_for_unit_weight():
    grid = unit_dyadic_lattice(5)
    report = ap_weight_check(grid, np.ones(grid.points.shape[0]), p=2.0)
    assert report.estimate == 1.0


def test_ap_admissible_weight_stable_under_refinement():
    # exponents 0.5 / -0.5 sit inside the admissible wedge
    # -1 < -0.5 < 0.5 < 1 for p = 2 on the line; the kink at x = 1/3 is
    # never a lattice point, so discrete averages track the integrals
    def density(pts):
        r = np.abs(pts[:, 0] - 1.0 / 3.0)
        return np.where(r <= 0.25, (r / 0.25) ** 0.5, (r / 0.25) ** (-0.5))

    coarse = unit_dyadic_lattice(6, density=density)
    fine = unit_dyadic_lattice(8, density=density)
    est_c = ap_weight_check(coarse, coarse.weights * 2**6, p=2.0).estimate
    est_f = ap_weight_check(fine, fine.weights * 2**8, p=2.0).estimate
    assert est_f < 2.0 * est_c
    assert est_f < 50.0


def test_ap_supercritical_weight_blows_up():
    def density(pts):
        r = np.abs(pts[:, 0] - 1.0 / 3.0)
        return r ** (-1.0)   # exponent -n on the line: outside the A_p range

    # the blow-up is logarithmic in the resolution, so compare far-apart grids
    estimates = []
    for j in (4, 7, 11):
        grid = unit_dyadic_lattice(j, density=density)
        estimates.append(ap_weight_check(grid, grid.weights * 2**j, p=2.0).estimate)
    assert estimates[0] < estimates[1] < estimates[2]
    assert estimates[2] > 2.0 * estimates[0]


def test_ap_requires_p_above_one():
    grid = unit_dyadic_lattice(3)
    with pytest.raises(ValueError, match="p > 1"):
        ap_weight_check(grid, np.ones(grid.points.shape[0]), p=1.0)
