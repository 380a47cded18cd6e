import math
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from obstructions import (
    AnnulusSpec,
    BudgetError,
    Pattern,
    Placement,
    bertrand_prime,
    density,
    erdos_turan_bound,
    member,
    members,
    no_copy_check,
    one_variable_measure,
    pattern_gap,
    reduce_to_polynomial,
    sample_lp_sphere,
    thin_pattern,
)


# ---------------------------------------------------------------------------
# membership


def test_member_examples():
    assert member(AnnulusSpec(3, 2, 0.5), [0.0, 0.0, 0.0])
    assert not member(AnnulusSpec(1, 2, 0.2), [math.sqrt(0.5)])
    assert member(AnnulusSpec(2, 3, 0.1), [1.0, 1.0])


def test_member_strict_boundary():
    # dist exactly (1-eps)/2 is NOT a member
    spec = AnnulusSpec(1, 2, 0.5)  # halfwidth 0.25
    assert not member(spec, [0.5])  # 0.25 -> dist 0.25
    assert member(spec, [math.sqrt(0.25 - 1e-9)])


def test_member_symmetry_under_permutation_and_sign():
    rng = np.random.default_rng(2)
    for p in (2, 3):
        spec = AnnulusSpec(3, p, 0.15)
        for _ in range(50):
            x = rng.normal(size=3) * 3
            base = member(spec, x)
            for perm in permutations(range(3)):
                assert member(spec, x[list(perm)]) == base
            flip = x * rng.choice([-1.0, 1.0], size=3)
            assert member(spec, flip) == base


def test_members_vectorized_consistency():
    spec = AnnulusSpec(2, 3, 0.2)
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(200, 2)) * 4
    vec = members(spec, pts)
    assert all(vec[i] == member(spec, pts[i]) for i in range(len(pts)))


def test_spec_validation():
    with pytest.raises(ValueError):
        AnnulusSpec(0, 2, 0.1)
    with pytest.raises(ValueError):
        AnnulusSpec(2, 1, 0.1)
    with pytest.raises(ValueError):
        AnnulusSpec(2, 2, 1.0)


# ---------------------------------------------------------------------------
# one-variable measure


def test_measure_full_circle():
    assert one_variable_measure(2, 1, 1, (0.0, 1.0)) == 1.0


def test_measure_single_branch():
    assert one_variable_measure(2, 1, 2, (0.0, 0.25)) == pytest.approx(1.0)


def test_measure_against_monte_carlo():
    rng = np.random.default_rng(4)
    for p, sigma in ((2, 1), (3, 1), (3, -1), (4, -1)):
        start, length = float(rng.random()), float(rng.uniform(0.2, 0.8))
        R = 20.0
        exact = one_variable_measure(p, sigma, R, (start, length))
        t = rng.uniform(-R / 2, R / 2, size=400_000)
        frac = ((sigma * t ** p) % 1.0)
        inside = ((frac - start) % 1.0) < length
        mc = float(inside.mean()) * R
        assert abs(exact - mc) < 0.12, (p, sigma, exact, mc)


def test_measure_bounded_deviation_across_scales():
    rng = np.random.default_rng(5)
    prev_bound = 0.0
    for p in (2, 3, 4):
        for _ in range(5):
            start, length = float(rng.random()), float(rng.uniform(0.1, 0.9))
            for R in (1, 2, 4, 8, 16, 32):
                m = one_variable_measure(p, 1, R, (start, length))
                assert abs(m - length * R) <= 3.0


def test_measure_budget_error_suggests_monte_carlo():
    with pytest.raises(BudgetError, match="Monte Carlo"):
        one_variable_measure(4, 1, 1000.0, (0.2, 0.3))


def test_measure_validation():
    with pytest.raises(ValueError):
        one_variable_measure(2, 0, 4.0, (0.0, 0.5))
    with pytest.raises(ValueError):
        one_variable_measure(2, 1, 0.5, (0.0, 0.5))


# ---------------------------------------------------------------------------
# density


def test_density_exact_slice_d1():
    rep = density(AnnulusSpec(1, 2, 0.1), 100, method="exact-slice")
    assert rep.target == pytest.approx(0.9)
    assert abs(rep.fraction - 0.9) <= 0.05


def test_density_exact_slice_d2_matches_monte_carlo():
    spec = AnnulusSpec(2, 2, 0.2)
    ex = density(spec, 40, method="exact-slice")
    mc = density(spec, 40, method="monte-carlo", samples=400_000, seed=9)
    assert abs(ex.fraction - mc.fraction) < 0.01


def test_density_monte_carlo_even_target():
    rep = density(AnnulusSpec(2, 2, 0.1), 200, method="monte-carlo",
                  samples=200_000, seed=1)
    assert rep.target_kind == "limit"
    assert abs(rep.fraction - 0.9) < 0.02


def test_density_odd_lower_bound():
    spec = AnnulusSpec(2, 3, 0.05)
    rep = density(spec, 100, method="monte-carlo", samples=200_000, seed=2)
    assert rep.target == pytest.approx(1 - 4 * 0.05)
    assert rep.target_kind == "lower-bound"
    assert rep.fraction >= rep.target - 0.02


def test_density_monotone_in_epsilon():
    # same seed, same samples: shrinking the band can only lose points
    fracs = []
    for eps in (0.1, 0.3, 0.5, 0.7, 0.9):
        rep = density(AnnulusSpec(2, 2, eps), 50, samples=50_000, seed=77)
        fracs.append(rep.fraction)
    assert all(a >= b for a, b in zip(fracs, fracs[1:]))


def test_density_exact_slice_odd_rejected():
    with pytest.raises(ValueError, match="[Mm]onte"):
        density(AnnulusSpec(2, 3, 0.1), 10, method="exact-slice")


def test_density_converges_like_one_over_R():
    # fit the deviation constant from two scales, validate at a third
    spec = AnnulusSpec(1, 2, 0.2)
    devs = {}
    for R in (25, 50, 100):
        rep = density(spec, R, method="exact-slice")
        devs[R] = abs(rep.fraction - 0.8)
    C = max(devs[25] * 25, devs[50] * 50)
    assert devs[100] <= 1.5 * C / 100 + 1e-9, (devs, C)


def test_density_merge():
    spec = AnnulusSpec(2, 2, 0.2)
    a = density(spec, 30, samples=50_000, seed=1)
    b = density(spec, 30, samples=50_000, seed=2)
    merged = a.merge(b)
    assert merged.detail["samples"] == 100_000
    assert min(a.fraction, b.fraction) <= merged.fraction <= max(a.fraction, b.fraction)


# ---------------------------------------------------------------------------
# placements and reduction


def test_lp_sphere_unit_norms():
    rng = np.random.default_rng(6)
    for p in (1.5, 2, 3, 5):
        v = sample_lp_sphere(rng, 500, 4, p)
        norms = (np.abs(v) ** p).sum(axis=1) ** (1 / p)
        assert np.allclose(norms, 1.0, atol=1e-12)


def test_placement_renormalizes_or_rejects():
    pl = Placement.at([0.0, 0.0], [0.6 + 1e-9, 0.8], 1, 0.5, 2)
    assert (np.abs(np.array(pl.v)) ** 2).sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        Placement.at([0.0, 0.0], [1.0, 1.0], 1, 0.5, 2)
    with pytest.raises(ValueError):
        Placement.at([0.0], [1.0], 1, -3.0, 2)


def test_reduction_axis_direction_kills_cross_terms():
    pat = Pattern(tuple(range(5)))
    for p in (2, 4):
        spec = AnnulusSpec(3, p, 0.2)
        pl = Placement.at([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], 2, 0.25, p)
        poly, cert = reduce_to_polynomial(spec, pat, pl, Fraction(1, 4))
        assert all(abs(c) < 1e-12 for c in poly.lower)
        assert cert.leading_value == pytest.approx(2.25)
        assert cert.leading_residual < 1e-12


def test_reduction_orthogonal_example():
    # |x + 2k e_2|^2 with x = e_1: 1 + 4k^2 (orthogonal axes, no linear term)
    spec = AnnulusSpec(2, 2, 0.2)
    pat = Pattern((0, 1, 2, 3))
    pl = Placement(x=(1.0, 0.0), v=(0.0, 1.0), scale_index=2, scale=2.0)
    poly, cert = reduce_to_polynomial(spec, pat, pl, Fraction(2))
    assert poly.lower[0] == pytest.approx(0.0)
    assert cert.leading_value == pytest.approx(4.0)
    assert cert.constant_term == pytest.approx(1.0)
    assert cert.leading_residual < 1e-12


def test_reduction_known_coefficients():
    spec = AnnulusSpec(2, 2, 0.2)
    pat = Pattern((0, 1, 2, 3))
    pl = Placement(x=(1.0, 1.0), v=(0.6, 0.8), scale_index=24, scale=5.0)
    poly, cert = reduce_to_polynomial(spec, pat, pl, Fraction(1))
    assert poly.lower[0] == pytest.approx(14.0)
    assert cert.leading_value == pytest.approx(25.0)
    assert cert.constant_term == pytest.approx(2.0)
    # direct expansion oracle over k in {-3..3}
    for k in range(-3, 4):
        y = np.array([1.0, 1.0]) + 5.0 * k * np.array([0.6, 0.8])
        assert (y ** 2).sum() == pytest.approx(25.0 * k * k + 14.0 * k + 2.0)


def test_reduction_identity_random_even_and_odd():
    rng = np.random.default_rng(7)
    pat = Pattern(tuple(range(-5, 6)))
    for p in (2, 3, 4, 5):
        spec = AnnulusSpec(3, p, 0.2)
        for _ in range(200):
            x = rng.normal(size=3) * 5
            v = sample_lp_sphere(rng, 1, 3, p)[0]
            r = float(rng.uniform(0.5, 8))
            pl = Placement(x=tuple(x), v=tuple(v), scale_index=1, scale=r)
            poly, cert = reduce_to_polynomial(spec, pat, pl, Fraction(1))
            assert cert.norm_residual < 1e-9
            assert cert.identity_residual < 1e-9


def test_reduction_rejects_non_unit_direction():
    spec = AnnulusSpec(2, 2, 0.2)
    pl = Placement(x=(0.0, 0.0), v=(1.0, 1.0), scale_index=1, scale=1.0)
    with pytest.raises(ValueError, match="unit"):
        reduce_to_polynomial(spec, Pattern((0, 1)), pl, Fraction(1))


# ---------------------------------------------------------------------------
# no-copy checks


def test_no_copy_degenerate_epsilon_zero_has_violations():
    q = 101
    pat = thin_pattern(20, q, seed=1)
    spec = AnnulusSpec(2, 2, 0.0)
    rep = no_copy_check(spec, pat, Fraction(1, q), [1], 500, seed=3)
    assert rep.violations_total > 0
    assert not rep.passed


def test_no_copy_full_set_above_et_bound():
    # with every index present the values spread out; above the ET-certified
    # discrepancy no sampled copy can sit inside the set
    q = 101
    pat = Pattern(tuple(range(q)), q)
    pts = [((k * k) % q) / q for k in range(q)]
    et = erdos_turan_bound(pts, q)
    eps = min(0.9, max(0.8, et + 0.01))
    spec = AnnulusSpec(2, 2, eps)
    rep = no_copy_check(spec, pat, Fraction(1, q), [1, 2], 2000, seed=4)
    assert rep.violations_total == 0
    assert rep.route_mismatches == 0


def test_no_copy_epsilon_consistency_check():
    q = 101
    pat = thin_pattern(20, q, seed=1)
    spec = AnnulusSpec(2, 2, 0.3)
    with pytest.raises(ValueError, match="inconsistent"):
        no_copy_check(spec, pat, Fraction(1, q), [1], 10, seed=0,
                      pattern_epsilon=0.5)


def test_no_copy_axis_placement_leaves_set():
    # explicit direct-scan oracle for one axis placement
    q = bertrand_prime(16, 2)
    pat = thin_pattern(16, q, seed=2)
    gap0 = pattern_gap(pat, Fraction(1, q), 2, (Fraction(0),))
    eps = min(0.95, float(gap0) + 0.05)
    spec = AnnulusSpec(2, 2, eps)
    r = math.sqrt(1.0 / q + 1.0)
    outside = [k for k in pat.indices
               if not member(spec, [r * k, 0.0])]
    assert outside  # some point of the copy x=0, v=e_1, j=1 escapes
