import math
import random

import numpy as np
import pytest

from extsource.weights import (
    IntervalSet, GaussianWeight, LaguerreWeight, ExpPolyWeight,
    deform_weight, weight_from_spec, moment, MomentTable, integrate,
    orthonormal_basis, gamma_coeff, HankelNotPD, QuadratureError,
    integrate_pieces, domain_pieces,
)

GAUSS = GaussianWeight()
LAG = LaguerreWeight()
QUARTIC = ExpPolyWeight([0, 0, 0, 0, 0.25])  # V(x) = x^4/4


def test_interval_set_canonicalizes():
    E = IntervalSet([[2, 3], [1, 2.5], [5, "inf"]])
    assert E.intervals == ((1.0, 3.0), (5.0, math.inf))
    assert E.to_spec() == [[1.0, 3.0], [5.0, "inf"]]
    assert IntervalSet.from_spec(E.to_spec()) == E


def test_interval_indicator():
    E = IntervalSet([[-1, 1]])
    x = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    assert list(E.indicator(x)) == [False, True, True, True, False]


def test_gaussian_exact_moments():
    assert [moment(GAUSS, j) for j in range(5)] == [1, 0, 1, 0, 3]


def test_laguerre_exact_moments():
    assert moment(LAG, 3) == 6
    assert moment(LAG, 0) == 1


def test_deformed_full_line_kills_mass():
    W = deform_weight(GAUSS, IntervalSet([["-inf", "inf"]]), 1.0)
    assert abs(moment(W, 0)) < 1e-12


def test_deform_s_zero_and_empty_E():
    W0 = deform_weight(GAUSS, IntervalSet([[0, 1]]), 0.0)
    # s = 0 keeps a DeformedWeight wrapper but integrates identically
    assert abs(moment(W0, 2) - 1.0) < 1e-12
    We = deform_weight(GAUSS, IntervalSet(), 1.0)
    assert abs(moment(We, 2) - 1.0) < 1e-12


def test_deformed_half_line():
    W = deform_weight(GAUSS, IntervalSet([[0, "inf"]]), 1.0)
    assert abs(moment(W, 0) - 0.5) < 1e-12


def test_moment_linearity_in_s():
    rng = random.Random(2)
    E = IntervalSet([[0.5, 2.0]])
    ref = moment(deform_weight(GAUSS, E, 1.0), 3)
    base = float(moment(GAUSS, 3))
    removed = base - ref
    for _ in range(3):
        s = rng.uniform(-1.5, 1.5)
        got = moment(deform_weight(GAUSS, E, s), 3)
        assert abs(got - (base - s * removed)) < 1e-11


def test_exact_vs_quadrature_moments():
    for W in (GAUSS, LAG):
        for j in range(21):
            exact = float(moment(W, j))
            # tolerance scales with the integrand mass (even-moment neighbor),
            # which is what limits float accuracy for the odd (zero) moments
            scale = max(1.0, float(moment(W, j + (j % 2))))
            quad = integrate(W, lambda x, j=j: x ** j if j else np.ones_like(x),
                             tol=1e-9 * scale)
            assert abs(quad.value - exact) <= 1e-9 * scale


def test_integrate_normalization_and_tilt():
    assert abs(integrate(GAUSS, lambda x: np.ones_like(x)).value - 1.0) < 1e-12
    # complete the square: E[e^x] = e^{1/2}
    v = integrate(GAUSS, lambda x: np.exp(x)).value
    assert abs(v - math.exp(0.5)) < 1e-11
    half = integrate(GAUSS, lambda x: (x >= 0).astype(float)).value
    assert abs(half - 0.5) < 1e-9


def test_integrate_rejects_impossible_tol():
    with pytest.raises(QuadratureError):
        # tilt 1 is not integrable against the Laguerre weight
        domain_pieces(LAG, tilt=1.0)


def test_weight_spec_roundtrip():
    W = deform_weight(LAG, IntervalSet([[1, "inf"]]), 0.5)
    spec = W.to_spec()
    W2 = weight_from_spec(spec)
    assert W2 == W
    assert weight_from_spec({"kind": "gaussian"}) == GAUSS


def test_moment_table():
    T = MomentTable(GAUSS, 6)
    assert T[6] == 15
    assert T.jmax == 6


def test_orthonormal_gaussian_low_degrees():
    B = orthonormal_basis(GAUSS, 4)
    # p0 = 1, p1 = x, p2 = (x^2 - 1)/sqrt(2)
    assert abs(B.coeffs[0, 0] - 1.0) < 1e-13
    assert abs(B.coeffs[1, 1] - 1.0) < 1e-13 and abs(B.coeffs[1, 0]) < 1e-13
    assert abs(B.coeffs[2, 2] - 1 / math.sqrt(2)) < 1e-13
    assert abs(B.coeffs[2, 0] + 1 / math.sqrt(2)) < 1e-13


def test_orthonormal_laguerre_p1():
    B = orthonormal_basis(LAG, 3)
    # Gram-Schmidt on {1, x}: p1 = x - 1 up to sign; leading coeff positive
    assert abs(B.coeffs[1, 1] - 1.0) < 1e-12
    assert abs(B.coeffs[1, 0] + 1.0) < 1e-12


def test_orthonormal_rejects_zero_weight():
    dead = deform_weight(GAUSS, IntervalSet([["-inf", "inf"]]), 1.0)
    with pytest.raises(HankelNotPD):
        orthonormal_basis(dead, 3)


@pytest.mark.parametrize("W", [GAUSS, LAG, QUARTIC], ids=["gaussian", "laguerre", "quartic"])
def test_gram_identity(W):
    n = 12
    B = orthonormal_basis(W, n)

    def fv(x):
        vals = B.eval_all(x)  # (npts, n)
        prods = vals[:, :, None] * vals[:, None, :]
        return prods.reshape(len(x), n * n) * np.exp(W.log_density(x))[:, None]

    pieces = domain_pieces(W, 0.0, 2 * n)
    res = integrate_pieces(fv, pieces, rel_tol=1e-13, abs_tol=1e-13)
    G = res.value.reshape(n, n)
    assert np.max(np.abs(G - np.eye(n))) < 1e-10


@pytest.mark.parametrize("W", [GAUSS, LAG, QUARTIC], ids=["gaussian", "laguerre", "quartic"])
def test_recurrence_pointwise(W):
    n = 8
    B = orthonormal_basis(W, n)
    lo = 0.0 if W is LAG else -4.0
    x = np.linspace(lo, 4.0, 41)
    vals = B.eval_all(x)
    for j in range(n - 1):
        lhs = x * vals[:, j]
        rhs = math.sqrt(B.beta[j + 1]) * vals[:, j + 1] + B.alpha[j] * vals[:, j]
        if j > 0:
            rhs = rhs + math.sqrt(B.beta[j]) * vals[:, j - 1]
        assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_gamma_closed_form_gaussian():
    B = orthonormal_basis(GAUSS, 6)
    for a in (0.3, 1.0, -0.7):
        for j in range(5):
            expect = a ** j * math.exp(a * a / 2) / math.sqrt(math.factorial(j))
            got = gamma_coeff(B, j, a)
            assert abs(got - expect) < 1e-11 * max(1.0, abs(expect))


def test_gamma_closed_form_laguerre():
    B = orthonormal_basis(LAG, 6)
    # with positive leading coefficients, Gamma_j(a) = a^j / (1-a)^{j+1}
    for a in (0.3, 0.9, -0.5):
        for j in range(5):
            expect = a ** j / (1 - a) ** (j + 1)
            got = gamma_coeff(B, j, a)
            assert abs(got - expect) < 1e-10 * max(1.0, abs(expect))


def test_gamma_at_zero_orthogonality():
    for W in (GAUSS, LAG):
        B = orthonormal_basis(W, 5)
        assert abs(gamma_coeff(B, 0, 0.0) - 1.0) < 1e-12  # sqrt(M_0) = 1
        for j in range(1, 4):
            assert abs(gamma_coeff(B, j, 0.0)) < 1e-12


def test_gamma_rejects_divergent_tilt():
    B = orthonormal_basis(LAG, 4)
    with pytest.raises(QuadratureError):
        gamma_coeff(B, 1, 1.4)


def test_engine_matches_mpmath_reference():
    # independent high-precision reference for the adaptive engine,
    # including an indicator deformation with interior endpoints
    import mpmath as mp
    W = deform_weight(LAG, IntervalSet([[1, 3]]), 0.5)
    got = integrate(W, lambda x: np.exp(0.4 * x) * (x ** 3 - 2 * x), tol=1e-11)
    with mp.workdps(30):
        f = lambda x: mp.exp(mp.mpf("0.4") * x) * (x ** 3 - 2 * x) * mp.exp(-x)
        ref = mp.quad(f, [0, 1]) + mp.mpf("0.5") * mp.quad(f, [1, 3]) \
            + mp.quad(f, [3, mp.inf])
    assert abs(got.value - float(ref)) < 1e-10 * abs(float(ref))


def test_engine_negative_deformation_factor():
    # s > 1 flips the sign of the weight on E; the engine is unaffected
    import mpmath as mp
    W = deform_weight(GAUSS, IntervalSet([[-1, 1]]), 1.5)
    got = integrate(W, lambda x: x * x, tol=1e-11)
    with mp.workdps(30):
        f = lambda x: x * x * mp.exp(-x * x / 2) / mp.sqrt(2 * mp.pi)
        ref = mp.quad(f, [-mp.inf, -1]) + mp.quad(f, [1, mp.inf]) \
            - mp.mpf("0.5") * mp.quad(f, [-1, 1])
    assert abs(got.value - float(ref)) < 1e-10


def test_deformed_basis_exists():
    # measure supported on [0, 1] still yields a PD Hankel matrix
    W = deform_weight(LAG, IntervalSet([[1, "inf"]]), 1.0)
    B = orthonormal_basis(W, 9)

    def fv(x):
        vals = B.eval_all(x)
        prods = vals[:, :, None] * vals[:, None, :]
        return prods.reshape(len(x), 81) * np.exp(W.log_density(x))[:, None]

    res = integrate_pieces(fv, domain_pieces(W, 0.0, 18), rel_tol=1e-13, abs_tol=1e-13)
    G = res.value.reshape(9, 9)
    assert np.max(np.abs(G - np.eye(9))) < 1e-9
