"""Label-level model of Bell-state measurements on multiphoton polarization qubits.

A logical Bell state of two ``n``-photon qubits is an equal-weight sum over
products of per-mode-pair Bell states.  phi-type logical states only involve
phi mode labels, psi-type only psi labels, and the logical sign is the parity
of the number of minus labels.  A linear-optics B_S on one mode pair
identifies phi- and psi- and fails on the two plus states; a lost photon
makes the B_S fail.  Everything the collective measurement claims is a
counting statement over these labels, so no Fock-space amplitudes are kept.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb

import numpy as np

from .noise import bs_success_rate, nbsm_failure_rate
from .resources import resource_state_depth

N_MAX = 12


class Bell(Enum):
    """Bell label; used both per mode pair and for the logical two-qubit state."""

    PHI_P = ("phi", 1)
    PHI_M = ("phi", -1)
    PSI_P = ("psi", 1)
    PSI_M = ("psi", -1)

    @property
    def kind(self) -> str:
        return self.value[0]

    @property
    def sign(self) -> int:
        return self.value[1]

    @classmethod
    def of(cls, kind: str, sign: int) -> "Bell":
        return cls((kind, 1 if sign > 0 else -1))

    def __str__(self) -> str:
        return f"{self.kind}{'+' if self.sign > 0 else '-'}"


def _check_n(n: int) -> None:
    if not isinstance(n, int) or not 1 <= n <= N_MAX:
        raise ValueError(f"n must be an integer in [1, {N_MAX}], got {n!r}")


def enumerate_decomposition(n: int) -> dict[Bell, list[tuple[Bell, ...]]]:
    """Mode-label products with nonzero amplitude in each logical Bell state.

    Every listed term carries amplitude ``decomposition_amplitude(n)``.
    """
    _check_n(n)
    out = {}
    for logical in Bell:
        plus, minus = Bell.of(logical.kind, 1), Bell.of(logical.kind, -1)
        want_odd = logical.sign < 0
        out[logical] = [t for t in itertools.product((plus, minus), repeat=n)
                        if (t.count(minus) % 2 == 1) == want_odd]
    return out


def decomposition_amplitude(n: int) -> float:
    return 2.0 ** (-(n - 1) / 2)


def permutation_sum(n: int, k: int, a: Bell = Bell.PHI_P, b: Bell = Bell.PHI_M) -> list[tuple[Bell, ...]]:
    """Distinct orderings of ``n - k`` copies of ``a`` and ``k`` copies of ``b``."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    terms = []
    for idx in itertools.combinations(range(n), k):
        terms.append(tuple(b if i in idx else a for i in range(n)))
    assert len(terms) == comb(n, k)
    return terms


# ---------------------------------------------------------------------------
# single B_S


@dataclass(frozen=True)
class BsOutcome:
    success: bool
    label: Bell | None = None


def simulate_bs(label: Bell, lost: tuple[bool, bool] = (False, False)) -> BsOutcome:
    """Outcome of one B_S on a mode pair in Bell state ``label``."""
    if not isinstance(label, Bell):
        raise TypeError(f"expected a Bell label, got {label!r}")
    if len(lost) != 2:
        raise ValueError("loss flags must cover exactly two photons")
    if any(lost) or label.sign > 0:
        return BsOutcome(False)
    return BsOutcome(True, label)


def bs_success_exact() -> Fraction:
    """Lossless success over uniformly random Bell inputs, by enumeration."""
    hits = sum(simulate_bs(b).success for b in Bell)
    return Fraction(hits, len(Bell))


def bs_success_lossy(eta: float, trials: int, rng: np.random.Generator) -> float:
    """Empirical B_S success over uniform inputs with independent photon loss."""
    minus = rng.integers(0, 2, size=trials).astype(bool)
    kept = ~(rng.random((trials, 2)) < eta).any(axis=1)
    return float((minus & kept).mean())


# ---------------------------------------------------------------------------
# collective n-BSM


def infer_logical(outcomes) -> Bell | None:
    """Logical label from per-pair B_S outcomes; ``None`` if every B_S failed.

    The kind is read off any success. Failed pairs are taken as plus, so the
    sign is the parity of the number of successes.
    """
    hits = [o.label for o in outcomes if o.success]
    if not hits:
        return None
    kinds = {h.kind for h in hits}
    if len(kinds) != 1:
        raise ValueError("successful B_S outcomes disagree on the Bell kind")
    return Bell.of(kinds.pop(), -1 if len(hits) % 2 else 1)


def nbsm_success_exact(n: int) -> Fraction:
    """Lossless n-BSM success over uniform logical inputs, by enumerating every term.

    Also asserts that every successful inference returns the prepared label.
    """
    _check_n(n)
    ok = total = 0
    for logical, terms in enumerate_decomposition(n).items():
        for t in terms:
            total += 1
            inferred = infer_logical([simulate_bs(b) for b in t])
            if inferred is not None:
                if inferred is not logical:
                    raise AssertionError(f"inferred {inferred} for prepared {logical} via {t}")
                ok += 1
    return Fraction(ok, total)


def nbsm_failure_exact(n: int, eta: float) -> float:
    """Failure probability by enumerating terms and pairwise loss, as a check on the closed form."""
    _check_n(n)
    p_keep = (1.0 - eta) ** 2
    fail = 0.0
    n_terms = 0
    for terms in enumerate_decomposition(n).values():
        for t in terms:
            n_terms += 1
            # each minus pair must lose a photon; plus pairs fail regardless
            k = sum(b.sign < 0 for b in t)
            fail += (1.0 - p_keep) ** k
    return fail / n_terms


@dataclass(frozen=True)
class NbsmStats:
    n: int
    eta: float
    trials: int
    successes: int
    label_correct: int
    label_flips: int

    @property
    def failure_rate(self) -> float:
        return 1.0 - self.successes / self.trials

    @property
    def failure_sigma(self) -> float:
        p = nbsm_failure_rate(self.eta, self.n)
        return float(np.sqrt(p * (1.0 - p) / self.trials))

    @property
    def inference_sound(self) -> bool:
        return self.label_correct == self.successes


def simulate_nbsm(n: int, eta: float, trials: int, rng: np.random.Generator) -> NbsmStats:
    """Sample collective BSMs on uniformly random logical Bell inputs.

    The kind is read off any successful pair and so is always right; only the
    sign can go wrong.  Without loss every success reproduces the prepared
    label.  With loss, a photon lost from a minus pair hides that pair and
    flips the inferred sign; such successes are counted as ``label_flips``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    sign_minus = rng.integers(0, 2, size=trials).astype(bool)
    # a uniformly random term of the prepared state: n-1 free signs, the last fixes the parity
    minus = np.empty((trials, n), dtype=bool)
    minus[:, :-1] = rng.integers(0, 2, size=(trials, n - 1)).astype(bool)
    minus[:, -1] = (minus[:, :-1].sum(axis=1) % 2 == 1) != sign_minus
    kept = ~(rng.random((trials, n, 2)) < eta).any(axis=2)

    hit = minus & kept
    n_hit = hit.sum(axis=1)
    success = n_hit > 0
    # every successful pair reveals the kind, and the parity of successes gives the sign
    inferred_minus = n_hit % 2 == 1
    correct = success & (inferred_minus == sign_minus)
    flips = success & ~correct
    return NbsmStats(n=n, eta=eta, trials=trials, successes=int(success.sum()),
                     label_correct=int(correct.sum()), label_flips=int(flips.sum()))


# ---------------------------------------------------------------------------
# resource states


def resource_state_success_rate(n: int, kind: str = "C3", eta: float = 0.0, m: int | None = None) -> float:
    """Probability that a C3 or C3' state is made within its minimal number of fusion rounds.

    Each B_S on the critical path succeeds with ``(1 - eta)**2 / 2``.  For
    C3' the middle GHZ_{m+2} is built in parallel with the arms and only
    lengthens the path when ``m + 2 > n + 1``.
    """
    depth = resource_state_depth(n, kind)
    if kind == "C3prime" and m is not None:
        depth = max(depth, resource_state_depth(m + 1, "C3prime"))
    return bs_success_rate(eta) ** depth


# ---------------------------------------------------------------------------
# verification table


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def verify_optics(trials: int = 1_000_000, seed: int = 0, n_max: int = 8) -> list[Check]:
    """Run the label-level property checks and return one row per property."""
    rng = np.random.default_rng(seed)
    checks = []

    ok = True
    for n in range(1, n_max + 1):
        dec = enumerate_decomposition(n)
        allterms = [t for ts in dec.values() for t in ts]
        ok &= len(allterms) == 4 * 2 ** (n - 1) == len(set(allterms))
        ok &= all(len(ts) == 2 ** (n - 1) for ts in dec.values())
    checks.append(Check("decomposition complete and distinct", ok, f"n<={n_max}"))

    b = bs_success_exact()
    checks.append(Check("B_S lossless success 1/2", b == Fraction(1, 2), str(b)))

    bad = [n for n in range(1, n_max + 1) if nbsm_success_exact(n) != 1 - Fraction(1, 2**n)]
    checks.append(Check("n-BSM success 1-2^-n", not bad, f"n<={n_max}" + (f" failed {bad}" if bad else "")))

    for n, eta in ((1, 0.01), (8, 0.01)):
        st = simulate_nbsm(n, eta, trials, rng)
        p = nbsm_failure_rate(eta, n)
        z = abs(st.failure_rate - p) / st.failure_sigma
        checks.append(Check(f"n-BSM failure n={n} eta={eta}", z <= 3.0,
                            f"{st.failure_rate:.6g} vs {p:.6g} ({z:.2f} sigma)"))

    for n in (4, 8):
        st = simulate_nbsm(n, 0.0, trials, rng)
        checks.append(Check(f"label inference lossless n={n}", st.inference_sound,
                            f"{st.label_correct}/{st.successes}"))

    rates = [(4, "C3", Fraction(1, 16)), (2, "C3prime", Fraction(1, 4)), (8, "C3", Fraction(1, 32))]
    ok = all(resource_state_success_rate(n, k) == float(r) for n, k, r in rates)
    checks.append(Check("resource-state success rates", ok, "C3 n=4, C3' n=2, C3 n=8"))
    return checks
