import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rvnorm.bounds import (
    BoundCertificate,
    SearchConfig,
    certificates_to_csv,
    check_d2_comparison,
    check_frobenius_sandwich,
    check_lower_d_le2,
    check_stable_sandwich,
    check_upper_d_ge2,
    comparison_coefficient,
    estimate_c,
    gamma_d,
    gamma_d2,
    jensen_comparison_coefficient,
    lower_coefficient_d_le2,
    mz_constants,
    sharpness_ratio,
    submult_criterion_d2,
    upper_coefficient_d_ge2,
)
from rvnorm.distributions import DistributionSpec, moments
from rvnorm.engine import NormParams, full_norm, full_norm_closed_d2, hermitian_norm
from rvnorm.errors import DomainError, MomentError
from rvnorm.matrix import (
    ComplexMatrix,
    HermitianMatrix,
    identity,
    ones_minus_identity,
    random_complex,
    random_hermitian,
)

N01 = DistributionSpec.normal(0, 1)
N11 = DistributionSpec.normal(1, 1)
RAD = DistributionSpec.rademacher()
U01 = DistributionSpec.uniform(0, 1)
FAST = dict(mc_samples=20_000, quad_nodes=32)


# --- constants ---------------------------------------------------------------


def test_mz_examples():
    assert mz_constants(2).a_d == 0.25
    assert mz_constants(2).b_d == pytest.approx(4.0, rel=1e-13)
    assert mz_constants(4).a_d == 1 / 16
    assert mz_constants(4).b_d == pytest.approx(48.0, rel=1e-13)
    assert mz_constants(3).b_d == pytest.approx(16 * math.sqrt(2) / math.sqrt(math.pi), rel=1e-13)


@given(st.floats(min_value=2.0, max_value=10.0))
def test_mz_ordering(d):
    c = mz_constants(d)
    assert 0 < c.a_d <= 1 <= c.b_d


def test_mz_domain():
    with pytest.raises(DomainError):
        mz_constants(1.9)


def test_comparison_coefficient_d2_is_one():
    assert comparison_coefficient(2.0) == pytest.approx(1.0, abs=1e-12)
    assert jensen_comparison_coefficient(2.0) == pytest.approx(1.0, abs=1e-12)


@given(st.floats(min_value=1.0, max_value=12.0))
def test_coefficients_differ_by_power_of_two_pi(d):
    ratio = comparison_coefficient(d) / jensen_comparison_coefficient(d)
    assert ratio == pytest.approx((2 * math.pi) ** (0.5 - 1 / d), rel=1e-12)


@pytest.mark.parametrize("d", [1.0, 1.5, 3.0, 4.0])
def test_stated_comparison_fails_on_scalars(d):
    # n = 1 with Gaussian entries: |||z|||_d / |||z|||_2 = ||1||_d / ||1||_2 exactly
    true_ratio = (moments(N01, d).mu_d / math.gamma(d + 1)) ** (1 / d) / math.sqrt(0.5)
    stated, jensen = comparison_coefficient(d), jensen_comparison_coefficient(d)
    if d > 2:
        assert stated > true_ratio >= jensen
    else:
        assert stated < true_ratio <= jensen


def test_stated_comparison_certificate_reports_failure_at_n1():
    z = ComplexMatrix([[1.0 + 0.5j]])
    p = NormParams(4, **FAST)
    assert not check_d2_comparison(z, N01, 4, p).passed
    assert check_d2_comparison(z, N01, 4, p, "jensen").passed


@pytest.mark.parametrize("spec", [N01, RAD, U01])
@pytest.mark.parametrize("d", [2.0, 2.5, 3.0, 4.0, 6.0])
def test_lower_never_exceeds_upper(spec, d):
    coef, _ = upper_coefficient_d_ge2(spec, d)
    assert comparison_coefficient(d) <= coef
    assert jensen_comparison_coefficient(d) <= coef


def test_lower_coefficient_d2_is_one():
    for eps in (0.5, 1.0, 2.0):
        assert lower_coefficient_d_le2(N11, 2.0, eps)[0] == pytest.approx(1.0, rel=1e-12)


def test_coefficient_domains():
    with pytest.raises(DomainError):
        upper_coefficient_d_ge2(N01, 1.5)
    with pytest.raises(DomainError):
        lower_coefficient_d_le2(N01, 2.5)
    with pytest.raises(DomainError):
        lower_coefficient_d_le2(N01, 1.5, 0.0)
    with pytest.raises(MomentError):
        upper_coefficient_d_ge2(DistributionSpec.stable(1.5), 2.0)


# --- certificates ------------------------------------------------------------


def test_certificate_pass_logic_and_row():
    c = BoundCertificate("x", 1.0, 1.5, 2.0, 0.0, {"d": 3.0, "n": 2, "spec": "rademacher",
                                                   "seed": 7})
    assert c.passed and c.slack_lower == 0.5 and c.slack_upper == 0.5
    assert not BoundCertificate("x", 2.0, 1.5, None, 0.4, {}).passed
    assert BoundCertificate("x", 2.0, 1.5, None, 0.5, {}).passed
    row = c.row()
    assert row["pass"] == "true" and row["measured"] == "1.5" and row["seed"] == 7
    text = certificates_to_csv([c], ["hello"])
    assert text.splitlines()[0] == "# hello"
    assert text.splitlines()[1] == "name,d,n,spec,seed,lower,measured,upper,pass"


def test_frobenius_d2_normal():
    a = random_hermitian(4, 3)
    fro2 = np.linalg.norm(a.entries) ** 2
    c = check_frobenius_sandwich(a, N01, 2, NormParams(2, 200_000))
    assert c.lower == pytest.approx(fro2 / 4) and c.upper == pytest.approx(4 * fro2)
    assert abs(c.measured - fro2) < 4 * c.context.get("stderr", c.tolerance)
    assert c.passed


def test_frobenius_zero_matrix():
    c = check_frobenius_sandwich(HermitianMatrix(np.zeros((3, 3))), N01, 3)
    assert c.lower == c.measured == c.upper == 0.0 and c.passed


def test_frobenius_rademacher_d4():
    c = check_frobenius_sandwich(random_hermitian(6, 1), RAD, 4, NormParams(4, 50_000))
    assert c.passed and c.slack_lower > 0 and c.slack_upper > 0


def test_frobenius_requires_mean_zero():
    with pytest.raises(DomainError, match="mean-zero"):
        check_frobenius_sandwich(identity(2), N11, 2)


def test_d2_comparison_equality_at_two():
    c = check_d2_comparison(random_complex(4, 2), N11, 2.0)
    assert c.lower == c.upper == pytest.approx(c.measured, rel=1e-12)
    assert c.passed and c.context["coefficient"] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("d,spec", [(4.0, N01), (1.5, N11), (3.0, RAD), (1.0, U01)])
def test_jensen_comparison_certificate(d, spec):
    c = check_d2_comparison(random_complex(4, 5), spec, d, NormParams(d, **FAST), "jensen")
    assert c.passed
    assert (c.lower is None) == (d < 2) and (c.upper is None) == (d > 2)


def test_comparison_rejects_unknown_coefficient():
    with pytest.raises(DomainError):
        check_d2_comparison(identity(2), N01, 3, coefficient="other")


def test_upper_examples():
    assert check_upper_d_ge2(identity(4), N01, 4, NormParams(4, **FAST)).passed
    assert check_upper_d_ge2(random_complex(4, 1), RAD, 3, NormParams(3, **FAST)).passed
    z0 = check_upper_d_ge2(ComplexMatrix(np.zeros((2, 2))), N01, 3)
    assert z0.measured == 0.0 and z0.upper == 0.0 and z0.passed


def test_lower_examples():
    assert check_lower_d_le2(random_complex(4, 1), N01, 1.0, 1.0, NormParams(1.0, **FAST)).passed
    z0 = check_lower_d_le2(ComplexMatrix(np.zeros((2, 2))), N01, 1.5)
    assert z0.measured == 0.0 and z0.lower == 0.0 and z0.passed
    c = check_lower_d_le2(random_complex(3, 2), N11, 2.0, 0.7)
    assert c.lower == pytest.approx(c.measured, rel=1e-12) and c.passed


def test_lower_requires_moment():
    with pytest.raises(MomentError):
        check_lower_d_le2(identity(2), DistributionSpec.stable(1.5), 1.0)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([N01, N11, RAD, U01]),
       st.sampled_from([2.0, 3.0, 4.0]), st.integers(1, 4))
def test_upper_certificate_property(seed, spec, d, n):
    c = check_upper_d_ge2(random_complex(n, seed), spec, d,
                          NormParams(d, 5000, 16, seed=seed))
    assert c.passed, c.context


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([N01, N11, RAD, U01]),
       st.sampled_from([1.0, 1.25, 1.5, 2.0]), st.integers(1, 4))
def test_lower_certificate_property(seed, spec, d, n):
    c = check_lower_d_le2(random_complex(n, seed), spec, d, 1.0,
                          NormParams(d, 5000, 16, seed=seed))
    assert c.passed, c.context


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([N01, RAD]), st.sampled_from([2.0, 3.0, 4.0]),
       st.integers(1, 8))
def test_frobenius_certificate_property(seed, spec, d, n):
    c = check_frobenius_sandwich(random_hermitian(n, seed), spec, d, NormParams(d, 5000, seed=seed))
    assert c.passed, c.context


def test_certificate_context_reproducible():
    z = random_complex(3, 11)
    p = NormParams(3, 3000, 16, seed=4)
    a, b = check_upper_d_ge2(z, RAD, 3, p), check_upper_d_ge2(z, RAD, 3, p)
    assert a == b and a.context["seed"] == 4


# --- submultiplicativity ---------------------------------------------------


def test_gamma_d2_examples():
    assert gamma_d2(N01) == pytest.approx(math.sqrt(2), rel=1e-14)
    assert gamma_d2(N11) == pytest.approx(2.0, rel=1e-14)
    assert gamma_d2(U01) == pytest.approx(12 * math.sqrt(2 / 3), rel=1e-13)
    with pytest.raises(MomentError):
        gamma_d2(DistributionSpec.stable(1.5))


def test_gamma_d_examples():
    assert gamma_d(N01, 2.0) == pytest.approx(4.0, abs=1e-12)
    expected = 2 * math.sqrt(2) / math.pi * (2 * math.pi * 48 * math.gamma(2.5) ** 2) ** 0.25
    assert gamma_d(RAD, 4.0) == pytest.approx(expected, rel=1e-12)
    g = gamma_d(N01, 1.5, 0.5)
    assert math.isfinite(g) and g > 0


def test_gamma_d_low_branch_is_cm_over_cm_squared():
    c_m = lower_coefficient_d_le2(N01, 1.5, 1.0)[0] ** (1 / 1.5)
    assert gamma_d(N01, 1.5, 1.0) == pytest.approx(comparison_coefficient(1.5) / c_m**2,
                                                   rel=1e-13)


def test_gamma_d_high_branch_is_cm_over_cm_squared():
    for d in (2.0, 3.0, 4.0):
        up, _ = upper_coefficient_d_ge2(N01, d)
        assert gamma_d(N01, d) == pytest.approx(up / comparison_coefficient(d) ** 2, rel=1e-12)


def test_criterion_examples():
    assert submult_criterion_d2(DistributionSpec.normal(0, 2))
    assert not submult_criterion_d2(N01)
    thr = 1 + math.sqrt(19)
    assert submult_criterion_d2(DistributionSpec.normal(3, math.sqrt(thr) * (1 + 1e-12)))
    assert not submult_criterion_d2(DistributionSpec.normal(3, math.sqrt(thr) * (1 - 1e-9)))


@given(st.floats(-5, 5), st.floats(0.1, 5))
def test_criterion_equivalent_to_gamma_at_most_one(mu, sigma):
    spec = DistributionSpec.normal(mu, sigma)
    g = gamma_d2(spec)
    if abs(g - 1.0) > 1e-9:
        assert submult_criterion_d2(spec) == (g <= 1.0)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([N01, N11, RAD, U01,
                                               DistributionSpec.exponential(1)]),
       st.integers(1, 6))
def test_d2_submultiplicative_with_gamma(seed, spec, n):
    g = gamma_d2(spec)
    a, b = random_complex(n, seed), random_complex(n, seed + 1)
    f = lambda z: g * full_norm_closed_d2(z, spec).value
    # n = 1 with mean zero is an equality case, hence the roundoff allowance
    assert f(a @ b) <= f(a) * f(b) * (1 + 1e-12)


def test_sharpness_examples():
    comp, ana = sharpness_ratio(N11, 3)
    assert comp == pytest.approx(math.sqrt(0.75), abs=1e-12)
    assert ana == pytest.approx(math.sqrt(0.75), abs=1e-15)
    for n in (2, 5, 20):
        comp, ana = sharpness_ratio(N01, n)
        assert ana == pytest.approx(math.sqrt(1 - (2 * n - 3) / (n * (n - 1))), rel=1e-14)


@pytest.mark.parametrize("spec", [N11, N01, U01])
def test_sharpness_agreement_and_monotone(spec):
    vals = []
    for n in range(2, 65):
        comp, ana = sharpness_ratio(spec, n)
        assert abs(comp - ana) <= 1e-10
        vals.append(ana)
    assert vals[0] == vals[1]  # n = 2 and n = 3 tie exactly
    assert all(b > a for a, b in zip(vals[1:], vals[2:]))
    assert vals[-1] < 1


def test_sharpness_symbolic_square_matches_matmul():
    for n in (2, 7, 30):
        a = ones_minus_identity(n)
        sym = (n - 2) * a.entries + (n - 1) * np.eye(n)
        direct = (a @ a).entries
        assert full_norm_closed_d2(ComplexMatrix(direct), N11).value == pytest.approx(
            full_norm_closed_d2(ComplexMatrix(sym), N11).value, rel=1e-13)


def test_sharpness_domain():
    with pytest.raises(DomainError):
        sharpness_ratio(N11, 1)


SMALL_SEARCH = SearchConfig(restarts=3, iters=80)


@pytest.mark.parametrize("n", [2, 4, 8])
def test_estimate_c_below_gamma_d2(n):
    c = estimate_c(N11, 2.0, n, search=SMALL_SEARCH)
    assert c <= gamma_d2(N11) * (1 + 1e-9)


def test_estimate_c_recovers_ones_minus_identity_ratio():
    for n in (8, 16):
        c = estimate_c(N11, 2.0, n, search=SearchConfig(restarts=1, iters=10))
        assert c >= gamma_d2(N11) * sharpness_ratio(N11, n)[1] * (1 - 1e-12)


def test_estimate_c_already_submultiplicative():
    spec = DistributionSpec.normal(0, 2)
    assert estimate_c(spec, 2.0, 4, search=SMALL_SEARCH) <= 1.0


def test_estimate_c_deterministic():
    a = estimate_c(N01, 3.0, 2, NormParams(3, 1000, 8, seed=3), SearchConfig(2, 20))
    b = estimate_c(N01, 3.0, 2, NormParams(3, 1000, 8, seed=3), SearchConfig(2, 20))
    assert a == b


def test_gamma_d_above_c_estimate_low_order():
    g = gamma_d(N01, 1.5, 0.5)
    c = estimate_c(N01, 1.5, 2, NormParams(1.5, 1000, 8), SearchConfig(2, 30))
    assert c <= g


def test_stable_sandwich_certificate():
    c = check_stable_sandwich(random_complex(3, 2), 1.5)
    assert c.passed and c.lower < c.measured < c.upper
