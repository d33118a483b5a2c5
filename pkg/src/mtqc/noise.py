"""Photon-loss noise algebra for multiphoton lattice qubits.

Everything here is a pure function of value parameters: loss to dephasing,
collective-BSM failure, component loss composition, repetition-code
suppression, qubit-removal probabilities and the analytic threshold
machinery built on the Lambert W function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Default optical constants for the delay-line model.
SIGNAL_SPEED_KM_S = 2.0e5
BSM_DURATION_S = 150e-9
ATTENUATION_LENGTH_KM = 22.0

# Largest tolerable qubit-removal probability for the lattice-qubit removal
# model, and the largest tolerable n-BSM failure rate for post-selected stars.
MTQC1_LOSS_BOUND = 0.249
MTQC2_FAILURE_BOUND = 0.145

_BISECT_TOL = 1e-12


class Variant(str, Enum):
    """Protocol subvariant: keep distorted stars (1) or post-select intact ones (2)."""

    MTQC1 = "mtqc1"
    MTQC2 = "mtqc2"

    @classmethod
    def parse(cls, value: "Variant | str | int") -> "Variant":
        if isinstance(value, Variant):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        if key in ("mtqc1", "1"):
            return cls.MTQC1
        if key in ("mtqc2", "2"):
            return cls.MTQC2
        raise ValueError(f"unknown variant {value!r}; expected mtqc1 or mtqc2")


class Mtqc2Removal(str, Enum):
    """Removal model for post-selected star clusters.

    ``STATED`` removes a lattice qubit with probability ``1 - (1 - p_f)**4``;
    ``MISSING_EDGE`` uses ``1 - (1 - p_f/2)**4``, treating each failed n-BSM as
    removing one of its two qubits.
    """

    STATED = "stated"
    MISSING_EDGE = "missing-edge"


@dataclass(frozen=True)
class NoiseParams:
    """Operating point of the architecture.

    Attributes:
        eta: photon-loss rate per photon, ``0 <= eta < 1``.
        n: photons per surrounding qubit.
        m: photons per lattice (central) qubit.
        n_rep: size of the phase-flip repetition code, odd; 1 means unencoded.
        variant: protocol subvariant.
    """

    eta: float
    n: int
    m: int = 2
    n_rep: int = 1
    variant: Variant = Variant.MTQC2

    def __post_init__(self):
        if not 0.0 <= self.eta < 1.0:
            raise ValueError(f"eta must lie in [0, 1), got {self.eta}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.n_rep < 1 or self.n_rep % 2 == 0:
            raise ValueError(f"n_rep must be an odd integer >= 1, got {self.n_rep}")
        object.__setattr__(self, "variant", Variant.parse(self.variant))

    @property
    def p_f(self) -> float:
        return nbsm_failure_rate(self.eta, self.n)

    @property
    def p_z(self) -> float:
        """Dephasing rate seen by the lattice, after repetition decoding."""
        return encoded_dephasing(dephasing_rate(self.eta, self.m), self.n_rep)


def dephasing_rate(eta: float, l: int) -> float:
    """Dephasing probability of an ``l``-photon qubit when each photon is lost w.p. ``eta``."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    if l < 1:
        raise ValueError(f"photon count must be >= 1, got {l}")
    return 0.5 * (1.0 - (1.0 - eta) ** l)


def invert_dephasing_rate(p_z: float, l: int) -> float:
    """Loss rate ``eta`` for which :func:`dephasing_rate` equals ``p_z``."""
    if not 0.0 <= p_z <= 0.5:
        raise ValueError(f"p_z must lie in [0, 1/2], got {p_z}")
    return 1.0 - (1.0 - 2.0 * p_z) ** (1.0 / l)


def bs_success_rate(eta: float) -> float:
    """Success probability of a single linear-optics BSM with both photons exposed to loss."""
    return (1.0 - eta) ** 2 / 2.0


def nbsm_failure_rate(eta: float, n: int) -> float:
    """Failure probability of a collective BSM on two ``n``-photon qubits."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return (1.0 - bs_success_rate(eta)) ** n


def nbsm_failure_rate_small_eta(eta: float, n: int) -> float:
    """First-order approximation ``(1/2 + eta)**n``; kept only for comparison."""
    return (0.5 + eta) ** n


@dataclass(frozen=True)
class LossBudget:
    """Component decomposition of the per-photon loss rate.

    ``eta_dly`` and ``eta_swc`` are derived from ``kappa`` (time steps a lattice
    photon waits) and the per-switch loss ``eta_s``.
    """

    eta_soc: float = 0.0
    eta_s: float = 0.0
    eta_det: float = 0.0
    kappa: int = 0
    c: float = SIGNAL_SPEED_KM_S
    tau0: float = BSM_DURATION_S
    L0: float = ATTENUATION_LENGTH_KM

    def __post_init__(self):
        for name in ("eta_soc", "eta_s", "eta_det"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {v}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")

    @property
    def eta_dly(self) -> float:
        return delay_loss(self.kappa, self.c, self.tau0, self.L0)

    @property
    def eta_swc(self) -> float:
        return 1.0 - (1.0 - self.eta_s) ** self.kappa

    @property
    def components(self) -> dict[str, float]:
        return {
            "eta_soc": self.eta_soc,
            "eta_dly": self.eta_dly,
            "eta_swc": self.eta_swc,
            "eta_det": self.eta_det,
        }


def delay_loss(kappa: int, c: float = SIGNAL_SPEED_KM_S, tau0: float = BSM_DURATION_S,
               L0: float = ATTENUATION_LENGTH_KM) -> float:
    """Fiber loss accumulated over ``kappa`` BSM durations of delay."""
    return -math.expm1(-c * tau0 * kappa / L0)


def compose_loss(budget: LossBudget) -> float:
    """Overall per-photon loss of independent lossy components in series."""
    survive = 1.0
    for v in budget.components.values():
        survive *= 1.0 - v
    return 1.0 - survive


def balanced_budget(eta_total: float, kappa: int, c: float = SIGNAL_SPEED_KM_S,
                    tau0: float = BSM_DURATION_S, L0: float = ATTENUATION_LENGTH_KM) -> LossBudget:
    """Split ``eta_total`` equally between source, switching and detection.

    The delay contribution is fixed by ``kappa``; the remaining three components
    share what is left, and the per-switch loss follows from ``kappa`` switches.
    """
    if not 0.0 <= eta_total < 1.0:
        raise ValueError(f"eta_total must lie in [0, 1), got {eta_total}")
    eta_dly = delay_loss(kappa, c, tau0, L0)
    rest = (1.0 - eta_total) / (1.0 - eta_dly)
    if rest > 1.0 + 1e-15:
        raise ValueError(
            f"infeasible budget: delay loss {eta_dly:.4g} alone exceeds eta_total {eta_total:.4g}")
    rest = min(rest, 1.0)
    each = 1.0 - rest ** (1.0 / 3.0)
    if kappa == 0:
        # no switches traversed; the switching share cannot be attributed to eta_s
        if each > 0.0:
            raise ValueError("kappa = 0 leaves no switches to carry the switching loss")
        eta_s = 0.0
    else:
        eta_s = 1.0 - (1.0 - each) ** (1.0 / kappa)
    return LossBudget(eta_soc=each, eta_s=eta_s, eta_det=each, kappa=kappa, c=c, tau0=tau0, L0=L0)


def encoded_dephasing(p_z: float, n_rep: int) -> float:
    """Majority-vote failure of an ``n_rep``-qubit phase-flip repetition code."""
    if not 0.0 <= p_z <= 1.0:
        raise ValueError(f"p_z must lie in [0, 1], got {p_z}")
    if n_rep < 1 or n_rep % 2 == 0:
        raise ValueError(f"n_rep must be an odd integer >= 1, got {n_rep}")
    if n_rep == 1:
        return p_z
    if p_z == 0.0:
        return 0.0
    if p_z == 1.0:
        return 1.0
    first = (n_rep + 1) // 2
    if n_rep <= 64:
        return math.fsum(math.comb(n_rep, q) * p_z**q * (1.0 - p_z) ** (n_rep - q)
                         for q in range(first, n_rep + 1))
    lp, lq = math.log(p_z), math.log1p(-p_z)
    logs = [math.lgamma(n_rep + 1) - math.lgamma(q + 1) - math.lgamma(n_rep - q + 1)
            + q * lp + (n_rep - q) * lq for q in range(first, n_rep + 1)]
    top = max(logs)
    return math.exp(top) * math.fsum(math.exp(v - top) for v in logs)


def _bisect(f, lo: float, hi: float, tol: float = _BISECT_TOL) -> float:
    flo = f(lo)
    if flo == 0.0:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def invert_encoded_dephasing(p_target: float, n_rep: int) -> float:
    """Physical dephasing rate in ``[0, 1/2]`` whose encoded rate equals ``p_target``."""
    if not 0.0 <= p_target <= 0.5:
        raise ValueError(f"p_target must lie in [0, 1/2], got {p_target}")
    if p_target == 0.0:
        return 0.0
    if n_rep == 1:
        return p_target
    return _bisect(lambda p: encoded_dephasing(p, n_rep) - p_target, 0.0, 0.5)


def lambert_w(x: float, rtol: float = 1e-10) -> float:
    """Principal branch of the Lambert W function for ``x >= 0``.

    Newton iteration started from the large-argument asymptotic series
    (``log1p(x)`` below ``e`` where the series is not defined).
    """
    if x < 0.0:
        raise ValueError(f"lambert_w is implemented for x >= 0 only, got {x}")
    if x == 0.0:
        return 0.0
    if x >= math.e:
        l1 = math.log(x)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1 + (l2 - 2.0) * l2 / (2.0 * l1 * l1)
    else:
        w = math.log1p(x)
    for _ in range(100):
        ew = math.exp(w)
        step = (w * ew - x) / (ew * (w + 1.0))
        w -= step
        if abs(step) <= rtol * abs(w):
            break
    return w


def lambert_threshold_approx(p_target: float, n_rep: int, m: int) -> float:
    """Large-``n_rep`` approximation to the encoded loss threshold.

    Uses the Gaussian limit of the binomial tail with the asymptotic form of
    the complementary error function, solved in closed form with Lambert W.
    """
    if not 0.0 < p_target < 0.5:
        raise ValueError(f"p_target must lie in (0, 1/2), got {p_target}")
    if n_rep < 1 or m < 1:
        raise ValueError("n_rep and m must be >= 1")
    w = lambert_w(1.0 / (2.0 * math.pi * p_target**2))
    return 1.0 - (1.0 + n_rep / w) ** (-1.0 / (2 * m))


def mechanism_probabilities(p_f: float, variant: Variant | str,
                            mtqc2_model: Mtqc2Removal | str = Mtqc2Removal.STATED) -> tuple[float, ...]:
    """Independent removal mechanisms acting on every lattice qubit.

    A qubit is removed if any mechanism fires, so the survival probability is
    the product of ``1 - p`` over the returned tuple.
    """
    if not 0.0 <= p_f <= 1.0:
        raise ValueError(f"p_f must lie in [0, 1], got {p_f}")
    variant = Variant.parse(variant)
    if variant is Variant.MTQC1:
        return (p_f,) * 4 + (p_f / 2.0,) * 4
    if Mtqc2Removal(mtqc2_model) is Mtqc2Removal.MISSING_EDGE:
        return (p_f / 2.0,) * 4
    return (p_f,) * 4


def qubit_survival(p_f: float, variant: Variant | str,
                   mtqc2_model: Mtqc2Removal | str = Mtqc2Removal.STATED) -> float:
    """Probability that a lattice qubit is kept given n-BSM failure rate ``p_f``."""
    out = 1.0
    for p in mechanism_probabilities(p_f, variant, mtqc2_model):
        out *= 1.0 - p
    return out


def removal_threshold_pf(loss_bound: float = MTQC1_LOSS_BOUND, variant: Variant | str = Variant.MTQC1,
                         mtqc2_model: Mtqc2Removal | str = Mtqc2Removal.STATED) -> float:
    """Value of ``p_f`` at which the removal probability reaches ``loss_bound``."""
    return _bisect(lambda p: 1.0 - qubit_survival(p, variant, mtqc2_model) - loss_bound, 0.0, 1.0)


def min_n_for_variant(eta: float, variant: Variant | str, n_max: int = 64,
                      mtqc2_model: Mtqc2Removal | str = Mtqc2Removal.STATED) -> int | None:
    """Smallest photon number per surrounding qubit that keeps the variant viable.

    Returns ``None`` when no ``n <= n_max`` works.
    """
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"eta must lie in [0, 1), got {eta}")
    variant = Variant.parse(variant)
    for n in range(1, n_max + 1):
        p_f = nbsm_failure_rate(eta, n)
        if variant is Variant.MTQC1:
            ok = 1.0 - qubit_survival(p_f, variant) < MTQC1_LOSS_BOUND
        else:
            ok = p_f < MTQC2_FAILURE_BOUND
        if ok:
            return n
    return None


def threshold_to_loss(p_z_th: float, m: int = 2, n_rep: int = 1) -> float:
    """Convert a lattice dephasing threshold into a per-photon loss threshold."""
    if not 0.0 <= p_z_th < 0.5:
        raise ValueError(f"p_z_th must lie in [0, 1/2), got {p_z_th}")
    p_phys = invert_encoded_dephasing(p_z_th, n_rep)
    return invert_dephasing_rate(p_phys, m)

