from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import lambertw

from mtqc.noise import (LossBudget, NoiseParams, Variant, balanced_budget, compose_loss, delay_loss,
                        dephasing_rate, encoded_dephasing, invert_dephasing_rate, invert_encoded_dephasing,
                        lambert_threshold_approx, lambert_w, mechanism_probabilities, min_n_for_variant,
                        nbsm_failure_rate, nbsm_failure_rate_small_eta, qubit_survival, removal_threshold_pf,
                        threshold_to_loss)


def sig(x: float, n: int) -> float:
    return float(f"{x:.{n}g}")


def test_nbsm_failure_values():
    assert nbsm_failure_rate(0.01, 8) == pytest.approx(0.50995**8, rel=1e-12)
    assert sig(nbsm_failure_rate_small_eta(0.01, 8), 3) == 4.58e-3
    assert nbsm_failure_rate(0.0, 5) == 2.0**-5
    assert nbsm_failure_rate(0.01, 1) == pytest.approx(0.50995, abs=1e-12)
    assert nbsm_failure_rate_small_eta(0.0, 3) == 0.125


@given(st.floats(0, 0.4), st.floats(0, 0.4), st.integers(1, 10))
def test_nbsm_monotone(e1, e2, n):
    lo, hi = sorted((e1, e2))
    assert nbsm_failure_rate(lo, n) <= nbsm_failure_rate(hi, n)
    assert nbsm_failure_rate(lo, n + 1) <= nbsm_failure_rate(lo, n)


def test_dephasing_examples():
    assert dephasing_rate(0.01, 2) == pytest.approx(0.00995, abs=1e-12)
    assert dephasing_rate(0.0, 7) == 0.0
    assert dephasing_rate(0.1078, 2) == pytest.approx(0.102, abs=1e-3)


@given(st.floats(0, 0.9), st.integers(1, 6))
def test_dephasing_inverse_round_trip(eta, l):
    p = dephasing_rate(eta, l)
    assert 0.0 <= p <= 0.5
    assert invert_dephasing_rate(p, l) == pytest.approx(eta, abs=1e-9)


def binom_tail(p: float, n: int) -> float:
    p = Fraction(p)
    return float(sum(math.comb(n, k) * p**k * (1 - p) ** (n - k) for k in range(n // 2 + 1, n + 1)))


@pytest.mark.parametrize("n", [1, 3, 5, 11, 63, 65, 101])
@pytest.mark.parametrize("p", [1e-6, 0.01, 0.102, 0.3, 0.5])
def test_encoded_dephasing_exact(p, n):
    assert encoded_dephasing(p, n) == pytest.approx(binom_tail(p, n), rel=1e-9, abs=1e-300)


def test_encoded_dephasing_examples():
    assert encoded_dephasing(0.01, 3) == pytest.approx(2.98e-4, abs=5e-7)
    assert encoded_dephasing(0.0, 3) == 0.0
    assert encoded_dephasing(1.0, 3) == 1.0
    assert encoded_dephasing(0.102, 3) == pytest.approx(0.029, abs=1e-3)
    for n in (1, 3, 9, 99):
        assert encoded_dephasing(0.5, n) == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=50)
@given(st.floats(1e-6, 0.499), st.sampled_from([3, 5, 7, 21, 101]))
def test_encoded_suppression_and_inverse(p, n):
    assert encoded_dephasing(p, n) < p
    assert invert_encoded_dephasing(encoded_dephasing(p, n), n) == pytest.approx(p, abs=1e-10)


def test_invert_encoded_domain():
    assert invert_encoded_dephasing(0.0, 5) == 0.0
    with pytest.raises(ValueError):
        invert_encoded_dephasing(0.6, 3)


def test_threshold_to_loss_examples():
    assert sig(threshold_to_loss(0.029, 2, 1), 2) == 0.029
    assert threshold_to_loss(0.029, 2, 3) == pytest.approx(0.107, abs=1e-3)
    # 0.1137 exactly; the reference 11.1% sits inside the 0.3 point tolerance
    assert threshold_to_loss(0.032, 2, 3) == pytest.approx(0.111, abs=3e-3)
    assert threshold_to_loss(0.0, 2, 1) == 0.0


@pytest.mark.parametrize("x", [0.0, 0.1, 1.0, math.e, 10.0, 1e3, 1e8, 1e20])
def test_lambert_w_against_scipy(x):
    assert lambert_w(x) == pytest.approx(lambertw(x).real, rel=1e-9, abs=1e-12)


def test_lambert_identity_and_trends():
    assert lambert_w(math.e) == pytest.approx(1.0, abs=1e-12)
    exact = lambda n: invert_dephasing_rate(invert_encoded_dephasing(0.01, n), 2)
    err = lambda n: abs(lambert_threshold_approx(0.01, n, 2) - exact(n)) / exact(n)
    assert err(101) < err(11)
    assert lambert_threshold_approx(0.01, 11, 3) < lambert_threshold_approx(0.01, 11, 2)
    seq = [lambert_threshold_approx(0.01, 10**k, 2) for k in (2, 4, 8, 12)]
    assert seq == sorted(seq) and seq[-1] > 0.99
    with pytest.raises(ValueError):
        lambert_threshold_approx(0.0, 3, 2)


def test_loss_budget():
    assert sig(delay_loss(3), 2) == 4.1e-3
    assert sig(delay_loss(4), 2) == 5.4e-3
    assert compose_loss(LossBudget()) == 0.0
    assert compose_loss(LossBudget(eta_det=0.02)) == pytest.approx(0.02)
    assert compose_loss(LossBudget(eta_soc=0.013)) == pytest.approx(0.013)
    # a switch traversal implies a delay step as well
    assert compose_loss(LossBudget(eta_s=0.01, kappa=1)) == pytest.approx(1 - 0.99 * (1 - delay_loss(1)))


@given(st.floats(0.006, 0.3), st.integers(1, 6))
def test_balanced_budget_recomposes(eta, kappa):
    if delay_loss(kappa) > eta:
        with pytest.raises(ValueError, match="infeasible"):
            balanced_budget(eta, kappa)
        return
    b = balanced_budget(eta, kappa)
    assert compose_loss(b) == pytest.approx(eta, rel=1e-12)
    assert b.eta_soc == pytest.approx(b.eta_swc, rel=1e-9) == pytest.approx(b.eta_det, rel=1e-9)


def test_balanced_budget_delay_only():
    eta = delay_loss(3)
    b = balanced_budget(eta, 3)
    assert b.eta_soc == pytest.approx(0.0, abs=1e-15)
    assert b.eta_s == pytest.approx(0.0, abs=1e-15)


def test_removal_model():
    assert qubit_survival(0.0, Variant.MTQC1) == 1.0
    p = 0.03
    assert qubit_survival(p, "mtqc1") == pytest.approx((1 - p) ** 4 * (1 - p / 2) ** 4)
    assert qubit_survival(p, "mtqc2") == pytest.approx((1 - p) ** 4)
    assert qubit_survival(p, "mtqc2", "missing-edge") == pytest.approx((1 - p / 2) ** 4)
    assert len(mechanism_probabilities(p, "mtqc1")) == 8
    assert sig(removal_threshold_pf(), 2) == 0.047


def test_min_n():
    assert min_n_for_variant(0.0, "mtqc1") == 5
    assert min_n_for_variant(0.0, "mtqc2") == 3
    assert min_n_for_variant(0.49, "mtqc1", n_max=8) is None
    assert min_n_for_variant(0.49, "mtqc2", n_max=2) is None


def test_noise_params():
    npar = NoiseParams(eta=0.01, n=8, variant="mtqc2")
    assert npar.p_f == nbsm_failure_rate(0.01, 8)
    assert npar.p_z == pytest.approx(dephasing_rate(0.01, 2))
    with pytest.raises(ValueError):
        NoiseParams(eta=1.0, n=8)
