"""Resource accounting in units of consumed GHZ3 states and photon-pair operations.

Every cost follows one rule: fusing two states that cost ``c1`` and ``c2`` on
average, with a fusion that succeeds with probability ``s`` and forces a full
restart on failure, costs ``(c1 + c2) / s``.  Two per-fusion success constants
are supported:

* exact (default): ``s = (1 - eta)**2 / 2``, both photons survive and the
  fusion heralds;
* reference constants (``paper_constants=True``): ``s = (1 - 2 eta) / 2``,
  the first-order form.  In this mode the composite costs (encoded central
  qubit, star cluster, gate) reuse the GHZ costs rounded to two decimals.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Union

from .lattice import gate_qubits_exact
from .noise import Variant, nbsm_failure_rate

TABLE_SIZES = (4, 5, 6, 7, 8, 9, 10, 11, 18)


# ---------------------------------------------------------------------------
# GHZ generation plans


@dataclass(frozen=True)
class GhzNode:
    """A GHZ state in a generation tree; leaves are GHZ3 ingredients."""

    size: int
    children: tuple["GhzNode", "GhzNode"] | None = None

    @property
    def is_leaf(self) -> bool:
        return self.children is None


@dataclass(frozen=True)
class GhzPlan:
    """Round-by-round fusion schedule producing one GHZ_m from ``m - 2`` GHZ3 states.

    Attributes:
        m: target size.
        rounds: per round, the fused size pairs, larger first.
        root: the generation tree.
    """

    m: int
    rounds: tuple[tuple[tuple[int, int], ...], ...]
    root: GhzNode

    @property
    def depth(self) -> int:
        return len(self.rounds)

    @property
    def n_leaves(self) -> int:
        return self.m - 2

    @property
    def n_fusions(self) -> int:
        return sum(len(r) for r in self.rounds)

    def describe(self) -> str:
        lines = [f"GHZ{self.m}: {self.n_leaves} x GHZ3, depth {self.depth}"]
        for k, pairs in enumerate(self.rounds, 1):
            fused = ", ".join(f"({a},{b})->{a + b - 2}" for a, b in pairs)
            lines.append(f"  step {k}: {fused}")
        return "\n".join(lines)


def _check_m(m: int, lo: int = 3) -> None:
    if not isinstance(m, int) or m < lo:
        raise ValueError(f"m must be an integer >= {lo}, got {m!r}")


def plan_ghz(m: int) -> GhzPlan:
    """Pairwise fusion recipe: pair up states, carry one leftover when odd, repeat."""
    _check_m(m)
    items = [GhzNode(3)] * (m - 2)
    rounds = []
    while len(items) > 1:
        odd = len(items) % 2
        fused = []
        pairs = []
        for i in range(0, len(items) - odd, 2):
            a, b = items[i], items[i + 1]
            fused.append(GhzNode(a.size + b.size - 2, (a, b)))
            pairs.append((max(a.size, b.size), min(a.size, b.size)))
        items = ([items[-1]] if odd else []) + fused
        rounds.append(tuple(pairs))
    return GhzPlan(m, tuple(rounds), items[0])


def ghz_depth(m: int) -> int:
    """Number of fusion rounds, ``ceil(log2(m - 2))``."""
    _check_m(m)
    return (m - 3).bit_length()


def success_constant(eta: float, paper_constants: bool = False) -> float:
    """Per-fusion success probability under photon loss ``eta``."""
    if not 0.0 <= eta < 0.5:
        raise ValueError(f"eta must lie in [0, 1/2), got {eta}")
    return (1.0 - 2.0 * eta) / 2.0 if paper_constants else (1.0 - eta) ** 2 / 2.0


def _tree_cost(node: GhzNode, s: float) -> float:
    if node.is_leaf:
        return 1.0
    a, b = node.children
    return (_tree_cost(a, s) + _tree_cost(b, s)) / s


def ghz_cost_closed_form(m: int) -> int:
    """Lossless GHZ3 count ``3M 2**K - 2 * 4**K`` with ``M = m - 2``, ``K = floor(log2 M)``."""
    _check_m(m)
    big_m = m - 2
    k = big_m.bit_length() - 1
    return 3 * big_m * 2**k - 2 * 4**k


def ghz_cost(m: int, eta: float = 0.0, paper_constants: bool = False) -> float:
    """Mean number of GHZ3 states consumed to build one GHZ_m."""
    _check_m(m)
    plan = plan_ghz(m)
    if eta == 0.0:
        exact = _tree_cost(plan.root, 0.5)
        closed = ghz_cost_closed_form(m)
        if exact != closed:
            raise AssertionError(f"closed form {closed} disagrees with the plan ({exact}) at m={m}")
        return float(closed)
    return _tree_cost(plan.root, success_constant(eta, paper_constants))


def ghz_table(eta: float = 0.01, sizes=TABLE_SIZES, paper_constants: bool = False) -> list[tuple[int, int, float]]:
    """Rows ``(m, lossless, lossy)``."""
    return [(m, ghz_cost_closed_form(m), ghz_cost(m, eta, paper_constants)) for m in sizes]


def format_ghz_table(rows, plans: bool = True) -> str:
    out = [f"{'k':>2}  {'state':<7} {'process':<16} {'N (lossy)'}"]
    for m, lossless, lossy in rows:
        plan = plan_ghz(m)
        last = plan.rounds[-1][0] if plan.rounds else None
        proc = f"GHZ{last[0]} + GHZ{last[1]}" if last and plans else "-"
        out.append(f"{plan.depth:>2}  GHZ{m:<4} {proc:<16} {lossless} ({lossy:.2f})")
    return "\n".join(out)


def _component(m: int, eta: float, paper_constants: bool) -> float:
    """GHZ cost as consumed by composite formulas; GHZ3 is the unit."""
    if m == 3:
        return 1.0
    c = ghz_cost(m, eta, paper_constants)
    return round(c, 2) if paper_constants else c


def enc_cost(m: int, eta: float = 0.0, paper_constants: bool = False) -> float:
    """GHZ3 count for the repetition-encoded central qubit.

    One GHZ_{m+1} is fused with a GHZ5, then two further GHZ_{m+1} join in a
    single step whose success needs both fusions.
    """
    _check_m(m, 2)
    s = success_constant(eta, paper_constants)
    a = _component(m + 1, eta, paper_constants)
    first = (a + _component(5, eta, paper_constants)) / s
    if paper_constants:
        first = round(first, 2)
    return (first + 2.0 * a) / s**2


# ---------------------------------------------------------------------------
# star clusters and gates


def _variant_factor(n: int, eta: float, variant: Variant | str) -> float:
    if Variant.parse(variant) is Variant.MTQC2:
        return 1.0 / (1.0 - nbsm_failure_rate(eta, n)) ** 2
    return 1.0


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 3:
        raise ValueError(f"n must be an integer >= 3, got {n!r}")


def star_cost(n: int, m: int, eta: float, variant: Variant | str = Variant.MTQC1,
              encoded: bool = False, paper_constants: bool = False) -> float:
    """Mean GHZ3 count per star cluster: ``(6 N_{n+1} + 2 N_{n+2} + X) / s**2``.

    ``X`` is ``N_{m+2}`` for a bare central qubit and the encoded cost otherwise.
    Post-selection (MTQC-2) divides by the probability ``(1 - p_f)**2`` that
    both n-BSMs succeed.
    """
    _check_n(n)
    _check_m(m, 2)
    s = success_constant(eta, paper_constants)
    x = enc_cost(m, eta, paper_constants) if encoded else _component(m + 2, eta, paper_constants)
    core = 6.0 * _component(n + 1, eta, paper_constants) + 2.0 * _component(n + 2, eta, paper_constants) + x
    return core / s**2 * _variant_factor(n, eta, variant)


def gate_overhead(n: int, m: int, eta: float, variant: Variant | str, encoded: bool, d: int,
                  paper_constants: bool = False) -> float:
    """Mean GHZ3 count per logical gate at distance ``d``: ``6 (5d/4)**3`` star clusters.

    Any non-negative integer ``d`` is accepted; the cubic law is algebraic and
    reference overhead tables quote even distances too.
    """
    if isinstance(d, bool) or not isinstance(d, int) or d < 0:
        raise ValueError(f"d must be a non-negative integer, got {d!r}")
    if d == 0:
        return 0.0
    per_star = star_cost(n, m, eta, variant, encoded, paper_constants)
    return float(gate_qubits_exact(d) * Fraction(per_star))


@dataclass
class ResourceEstimate:
    n: int
    m: int
    eta: float
    variant: str
    encoded: bool
    d: int | None
    n_rep: int
    paper_constants: bool
    N_star: float
    N_gate: float | None
    N_table: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def estimate(n: int, m: int, eta: float, variant: Variant | str = Variant.MTQC1, encoded: bool = False,
             d: int | None = None, paper_constants: bool = False) -> ResourceEstimate:
    """Bundle the star and gate costs with the GHZ cost table they draw on."""
    variant = Variant.parse(variant)
    sizes = sorted({n + 1, n + 2, m + 1 if encoded else m + 2, 5} - {3})
    n_star = star_cost(n, m, eta, variant, encoded, paper_constants)
    n_gate = gate_overhead(n, m, eta, variant, encoded, d, paper_constants) if d is not None else None
    return ResourceEstimate(n=n, m=m, eta=eta, variant=variant.value, encoded=encoded, d=d,
                            n_rep=3 if encoded else 1, paper_constants=paper_constants,
                            N_star=n_star, N_gate=n_gate,
                            N_table=[list(r) for r in ghz_table(eta, sizes, paper_constants)])


# ---------------------------------------------------------------------------
# photon-pair operation counting


@dataclass(frozen=True)
class PpoLeaf:
    """Starting state; costs ``ppo`` photon-pair operations on average (0 for GHZ3)."""

    label: str = "GHZ3"
    ppo: float = 0.0


@dataclass(frozen=True)
class PpoFuse:
    """One fusion of two independently prepared parts, heralded with probability ``p``."""

    left: "PpoTree"
    right: "PpoTree"
    p: float = 0.5


PpoTree = Union[PpoLeaf, PpoFuse]


def ppo_cost(tree: PpoTree) -> float:
    """Mean PPOs with full restart on failure: ``(l1 + l2 + 1) / p`` per fusion."""
    if isinstance(tree, PpoLeaf):
        if tree.ppo < 0:
            raise ValueError("leaf cost must be non-negative")
        return float(tree.ppo)
    if isinstance(tree, PpoFuse):
        if not 0.0 < tree.p <= 1.0:
            raise ValueError(f"fusion success must lie in (0, 1], got {tree.p}")
        return (ppo_cost(tree.left) + ppo_cost(tree.right) + 1.0) / tree.p
    raise TypeError(f"malformed PPO tree node: {tree!r}")


def ghz_ppo_tree(m: int, p: float = 0.5) -> PpoTree:
    def conv(node: GhzNode) -> PpoTree:
        if node.is_leaf:
            return PpoLeaf()
        a, b = node.children
        return PpoFuse(conv(a), conv(b), p)
    return conv(plan_ghz(m).root)


def c3_tree(n: int, middle: int, p: float = 0.5) -> PpoTree:
    """Resource state from two GHZ_{n+1} arms fused one after another onto a middle GHZ."""
    arm = ghz_ppo_tree(n + 1, p)
    return PpoFuse(PpoFuse(arm, ghz_ppo_tree(middle, p), p), arm, p)


def c3prime_tree(n: int, m: int, p: float = 0.5) -> PpoTree:
    return c3_tree(n, m + 2, p)


TM_HERALD = 0.25


def tm_c3prime_tree() -> PpoTree:
    """Single temporal-mode type-I fusion heralded on one detector."""
    return PpoFuse(PpoLeaf("TM"), PpoLeaf("TM"), TM_HERALD)


def tm_c3_tree() -> PpoTree:
    """Three chained temporal-mode fusions, each heralded with probability 1/4."""
    stage = tm_c3prime_tree()
    for _ in range(2):
        stage = PpoFuse(stage, PpoLeaf("TM"), TM_HERALD)
    return stage


def ppo_report(n: int = 8, m: int = 2) -> dict[str, float]:
    return {
        "GHZ4": ppo_cost(ghz_ppo_tree(4)),
        f"GHZ{n + 1}": ppo_cost(ghz_ppo_tree(n + 1)),
        f"C3'({n},{m},{n})": ppo_cost(c3prime_tree(n, m)),
        f"C3({n},{n},{n})": ppo_cost(c3_tree(n, n + 2)),
        "TM C3'": ppo_cost(tm_c3prime_tree()),
        "TM C3": ppo_cost(tm_c3_tree()),
    }


def resource_state_depth(n: int, kind: str) -> int:
    """B_S rounds on the critical path of a C3 (``GHZ_{n+2}`` middle) or C3' (``GHZ_{n+1}`` arms)."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if kind == "C3":
        return ghz_depth(n + 2) + 2
    if kind == "C3prime":
        return ghz_depth(n + 1) + 2
    raise ValueError(f"kind must be C3 or C3prime, got {kind!r}")

