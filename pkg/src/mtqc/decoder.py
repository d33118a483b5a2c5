"""Per-trial error processing on the RHG lattice.

A trial removes qubits, merges the checks around removed qubits into
superchecks (deforming the x boundaries when a removal touches them), aborts
on logical loss when the two x boundaries become connected, assigns
dephasing to the surviving qubits, decodes the syndrome with minimum-weight
perfect matching and finally reports the simulating times at which a
residual error chain joins the two x boundaries.

Nodes of the decoding graph are the cells ``0 .. nc-1`` plus two virtual
boundary nodes ``nc`` (x low) and ``nc + 1`` (x high). Removed qubits are
contracted away; every surviving, non-perfect qubit is a unit-weight edge.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
import pymatching
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, shortest_path

from .blossom import min_weight_perfect_matching
from .lattice import HIGH, LOW, NO_CELL, RhgLattice

BOUNDARY = -1  # partner id for an event matched to an x boundary


@dataclass(frozen=True)
class LogicalLoss:
    """The deformed x boundaries met: the trial is aborted."""

    n_removed: int


@dataclass
class Superchecks:
    """Partition of the cells induced by a removal pattern.

    Attributes:
        lattice: the underlying lattice.
        removed: removal mask over lattice qubits.
        node_label: contracted id of every graph node (cells, then the two boundaries).
        n_nodes: number of contracted ids.
    """

    lattice: RhgLattice
    removed: np.ndarray
    node_label: np.ndarray
    n_nodes: int

    @property
    def low(self) -> int:
        return int(self.node_label[self.lattice.n_cells])

    @property
    def high(self) -> int:
        return int(self.node_label[self.lattice.n_cells + 1])

    @property
    def cell_label(self) -> np.ndarray:
        return self.node_label[: self.lattice.n_cells]

    def ids(self) -> list[int]:
        """Contracted ids that are genuine superchecks (not absorbed by a boundary)."""
        skip = {self.low, self.high}
        return sorted(set(int(v) for v in np.unique(self.cell_label)) - skip)

    def members(self, s: int) -> np.ndarray:
        return np.flatnonzero(self.cell_label == s)

    def support(self, s: int) -> np.ndarray:
        """Surviving qubits of the member cells, with multiplicity."""
        qs = self.lattice.cell_qubits[self.members(s)].ravel()
        qs = qs[qs != NO_CELL]
        return np.sort(qs[~self.removed[qs]])

    @property
    def deformed_x_boundaries(self) -> tuple[np.ndarray, np.ndarray]:
        """Cells swallowed by the low and high x boundaries."""
        return self.members(self.low), self.members(self.high)


@dataclass
class ErrorState:
    removed: np.ndarray
    dephased: np.ndarray
    superchecks: Superchecks | LogicalLoss | None = None


@dataclass
class SyndromeGraph:
    """Detection events with their pairwise and boundary path weights.

    ``weights[i, j]`` is the qubit count of a shortest surviving path between
    events ``i`` and ``j``; ``boundary_weight[i]`` is the distance to the
    nearer x boundary, reached at contracted node ``boundary_target[i]``.
    """

    superchecks: Superchecks
    detection_events: np.ndarray
    boundary_nodes: tuple[int, int]
    weights: np.ndarray
    boundary_weight: np.ndarray
    boundary_target: np.ndarray
    predecessors: np.ndarray
    edge_qubit: dict = field(repr=False)


@dataclass
class Matching:
    """Selected pairing of detection events and the induced correction."""

    pairs: list[tuple[int, int]]
    weight: int
    correction: np.ndarray


@dataclass(frozen=True)
class TrialOutcome:
    logical_loss: bool
    erroneous_times: frozenset = frozenset()


class _Graph:
    """Static node/edge arrays of a lattice shared by every trial."""

    def __init__(self, lattice: RhgLattice):
        self.lattice = lattice
        nc = lattice.n_cells
        self.n_nodes = nc + 2
        active = np.flatnonzero(~lattice.perfect)
        self.active = active
        cells = lattice.qubit_cells[active]
        ends = cells.copy()
        single = ends[:, 1] == NO_CELL
        side = lattice.x_side[active]
        ends[single & (side == LOW), 1] = nc
        ends[single & (side == HIGH), 1] = nc + 1
        if (ends[:, 1] == NO_CELL).any():
            raise AssertionError("non-perfect qubit with a single cell off the x boundaries")
        self.ends = ends
        self.time = np.minimum(lattice.qubit_coords[active, 2] // 2, lattice.T - 1)
        rows = ends.ravel()
        cols = np.repeat(np.arange(len(active)), 2)
        keep = rows < nc
        self.H = sp.csc_matrix((np.ones(int(keep.sum()), dtype=np.uint8), (rows[keep], cols[keep])),
                               shape=(nc, len(active)))
        self._fixed: pymatching.Matching | None = None

    def fixed_matching(self) -> pymatching.Matching:
        if self._fixed is None:
            self._fixed = pymatching.Matching.from_check_matrix(self.H)
        return self._fixed

    def labels(self, removed_active: np.ndarray) -> np.ndarray:
        e = self.ends[removed_active]
        g = sp.coo_matrix((np.ones(len(e), dtype=np.int8), (e[:, 0], e[:, 1])),
                          shape=(self.n_nodes, self.n_nodes))
        _, lab = connected_components(g, directed=False)
        return lab

    def syndrome(self, dephased_active: np.ndarray) -> np.ndarray:
        e = self.ends[dephased_active].ravel()
        return (np.bincount(e, minlength=self.n_nodes)[: self.lattice.n_cells] & 1).astype(np.uint8)


def _graph(lattice: RhgLattice) -> _Graph:
    g = lattice._lookups.get("_graph")
    if g is None:
        g = _Graph(lattice)
        lattice._lookups["_graph"] = g
    return g


# -- removal and merging ---------------------------------------------------------


def apply_removals(lattice: RhgLattice, p_removal_per_mechanism, rng: np.random.Generator) -> ErrorState:
    """Remove qubits i.i.d.; a qubit goes if any mechanism fires. Perfect qubits are exempt."""
    probs = np.asarray(tuple(p_removal_per_mechanism), dtype=float)
    removed = np.zeros(lattice.n_qubits, dtype=bool)
    if len(probs) and probs.max() > 0.0:
        active = ~lattice.perfect
        draws = rng.random((len(probs), int(active.sum())))
        removed[active] = (draws < probs[:, None]).any(axis=0)
    return ErrorState(removed=removed, dephased=np.zeros(lattice.n_qubits, dtype=bool))


def merge_superchecks(lattice: RhgLattice, removed: np.ndarray) -> Superchecks | LogicalLoss:
    """Union the cells (and boundaries) that share a removed qubit."""
    removed = np.asarray(removed, dtype=bool)
    if (removed & lattice.perfect).any():
        raise ValueError("time-boundary qubits cannot be removed")
    g = _graph(lattice)
    lab = g.labels(removed[g.active])
    nc = lattice.n_cells
    if lab[nc] == lab[nc + 1]:
        return LogicalLoss(int(removed.sum()))
    return Superchecks(lattice, removed, lab, int(lab.max()) + 1)


def assign_dephasing(lattice: RhgLattice, removed: np.ndarray, p_z: float,
                     rng: np.random.Generator) -> np.ndarray:
    """Dephase each surviving non-perfect qubit independently with probability ``p_z``."""
    if not 0.0 <= p_z <= 1.0:
        raise ValueError(f"p_z must lie in [0, 1], got {p_z}")
    out = np.zeros(lattice.n_qubits, dtype=bool)
    active = ~lattice.perfect
    out[active] = rng.random(int(active.sum())) < p_z
    out &= ~np.asarray(removed, dtype=bool)
    return out


# -- syndrome and matching -------------------------------------------------------


def _contracted_edges(sc: Superchecks):
    """Surviving edges as (u, v, lattice qubit) in contracted ids, self-loops dropped."""
    g = _graph(sc.lattice)
    keep = ~sc.removed[g.active]
    u = sc.node_label[g.ends[keep, 0]]
    v = sc.node_label[g.ends[keep, 1]]
    q = g.active[keep]
    ok = u != v
    return u[ok], v[ok], q[ok]


def extract_syndrome(superchecks: Superchecks, dephased: np.ndarray) -> SyndromeGraph:
    """Detection events and shortest-path weights over the surviving lattice."""
    sc = superchecks
    dephased = np.asarray(dephased, dtype=bool)
    if (dephased & sc.removed).any():
        raise ValueError("removed qubits cannot carry dephasing")
    g = _graph(sc.lattice)
    flips = g.ends[dephased[g.active]].ravel()
    parity = np.bincount(sc.node_label[flips], minlength=sc.n_nodes) & 1
    parity[[sc.low, sc.high]] = 0
    events = np.flatnonzero(parity)

    u, v, q = _contracted_edges(sc)
    edge_qubit: dict[tuple[int, int], int] = {}
    for a, b, qq in zip(u.tolist(), v.tolist(), q.tolist()):
        edge_qubit.setdefault((a, b), qq)
        edge_qubit.setdefault((b, a), qq)
    # boundaries are sinks so that no path runs through them
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    ok = (src != sc.low) & (src != sc.high)
    adj = sp.csr_matrix((np.ones(int(ok.sum())), (src[ok], dst[ok])), shape=(sc.n_nodes, sc.n_nodes))

    k = len(events)
    if k:
        dist, pred = shortest_path(adj, directed=True, unweighted=True, indices=events,
                                   return_predecessors=True)
    else:
        dist = np.zeros((0, sc.n_nodes))
        pred = np.zeros((0, sc.n_nodes), dtype=np.int32)
    weights = dist[:, events] if k else np.zeros((0, 0))
    to_b = dist[:, [sc.low, sc.high]] if k else np.zeros((0, 2))
    pick = np.argmin(to_b, axis=1) if k else np.zeros(0, dtype=int)
    boundary_weight = to_b[np.arange(k), pick] if k else np.zeros(0)
    boundary_target = np.where(pick == 0, sc.low, sc.high)
    return SyndromeGraph(sc, events, (sc.low, sc.high), weights, boundary_weight,
                         boundary_target, pred, edge_qubit)


def _trace_path(graph: SyndromeGraph, i: int, target: int, correction: np.ndarray):
    """Toggle the qubits along the stored shortest path from event ``i`` to ``target``."""
    pred = graph.predecessors[i]
    node = target
    source = int(graph.detection_events[i])
    while node != source:
        prev = int(pred[node])
        if prev < 0:
            raise RuntimeError("no path to matched partner")
        correction[graph.edge_qubit[(prev, node)]] ^= True
        node = prev


def mwpm_decode(graph: SyndromeGraph) -> Matching:
    """Exact minimum-weight matching where any event may instead pair with its nearest boundary.

    Each event ``i`` gets a boundary copy ``k + i`` joined at the boundary
    distance; copies pair among themselves at zero cost.
    """
    k = len(graph.detection_events)
    correction = np.zeros(graph.superchecks.lattice.n_qubits, dtype=bool)
    if k == 0:
        return Matching([], 0, correction)
    edges = []
    for i, j in itertools.combinations(range(k), 2):
        w = graph.weights[i, j]
        if np.isfinite(w):
            edges.append((i, j, int(w)))
        edges.append((k + i, k + j, 0))
    for i in range(k):
        w = graph.boundary_weight[i]
        if np.isfinite(w):
            edges.append((i, k + i, int(w)))
    mate, total = min_weight_perfect_matching(2 * k, edges)
    pairs = []
    for i in range(k):
        j = mate[i]
        if j >= k:
            pairs.append((int(graph.detection_events[i]), BOUNDARY))
            _trace_path(graph, i, int(graph.boundary_target[i]), correction)
        elif i < j:
            pairs.append((int(graph.detection_events[i]), int(graph.detection_events[j])))
            _trace_path(graph, i, int(graph.detection_events[j]), correction)
    return Matching(pairs, int(total), correction)


# -- classification --------------------------------------------------------------


def _spanning_times(u, v, times, low: int, high: int) -> frozenset:
    """Walk residual chains from the low boundary; collect start times of those ending high.

    Every non-boundary node has even residual degree, so a walk entering it
    can always leave. Starts are processed in (time, edge) order and each node
    leaves through its lowest-index unused edge, which makes the
    decomposition deterministic.
    """
    adj: dict[int, list[int]] = defaultdict(list)
    for e in range(len(u) - 1, -1, -1):
        adj[u[e]].append(e)
        adj[v[e]].append(e)
    used = bytearray(len(u))
    starts = sorted((times[e], e) for e in range(len(u)) if u[e] == low or v[e] == low)
    found = set()
    for t, e in starts:
        if used[e]:
            continue
        used[e] = 1
        node = v[e] if u[e] == low else u[e]
        while node != low and node != high:
            lst = adj[node]
            while used[lst[-1]]:
                lst.pop()
            e2 = lst.pop()
            used[e2] = 1
            node = v[e2] if u[e2] == node else u[e2]
        if node == high:
            found.add(int(t))
    return frozenset(found)


def classify_logical_error(superchecks: Superchecks, dephased: np.ndarray,
                           correction: np.ndarray) -> TrialOutcome:
    """Find residual chains (error plus correction) joining the two x boundaries."""
    sc = superchecks
    g = _graph(sc.lattice)
    residual = (np.asarray(dephased, bool) ^ np.asarray(correction, bool)) & ~sc.removed
    return TrialOutcome(False, _classify_active(g, sc.node_label, residual[g.active], sc.low, sc.high))


def _classify_active(g: _Graph, labels: np.ndarray, residual_active: np.ndarray, low: int,
                     high: int) -> frozenset:
    idx = np.flatnonzero(residual_active)
    if len(idx) == 0:
        return frozenset()
    u = labels[g.ends[idx, 0]]
    v = labels[g.ends[idx, 1]]
    ok = u != v
    return _spanning_times(u[ok].tolist(), v[ok].tolist(), g.time[idx[ok]].tolist(), low, high)


# -- fast per-trial driver -------------------------------------------------------


class TrialDecoder:
    """Runs complete trials on one lattice.

    ``backend="pymatching"`` decodes with the sparse blossom implementation of
    PyMatching on the uncontracted graph, giving removed qubits weight zero
    (which is the same as merging their cells). ``backend="blossom"`` uses the
    dense shortest-path reduction and the exact matcher in this package.
    """

    def __init__(self, lattice: RhgLattice, mechanisms, p_z: float, backend: str = "pymatching"):
        if backend not in ("pymatching", "blossom"):
            raise ValueError(f"unknown backend {backend!r}")
        self.lattice = lattice
        self.g = _graph(lattice)
        self.mechanisms = np.asarray(tuple(mechanisms), dtype=float)
        self.draw_removals = len(self.mechanisms) > 0 and self.mechanisms.max() > 0.0
        self.p_z = float(p_z)
        self.backend = backend
        self.na = len(self.g.active)
        nc = lattice.n_cells
        self._identity = np.arange(nc + 2)

    def sample(self, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Removal and dephasing masks over the non-perfect qubits."""
        if self.draw_removals:
            removed = (rng.random((len(self.mechanisms), self.na)) < self.mechanisms[:, None]).any(axis=0)
        else:
            removed = np.zeros(self.na, dtype=bool)
        dephased = (rng.random(self.na) < self.p_z) & ~removed
        return removed, dephased

    def run(self, rng: np.random.Generator) -> TrialOutcome:
        removed, dephased = self.sample(rng)
        return self.decode(removed, dephased)

    def decode(self, removed: np.ndarray, dephased: np.ndarray) -> TrialOutcome:
        return self.decode_residual(removed, dephased)[0]

    def decode_residual(self, removed: np.ndarray,
                        dephased: np.ndarray) -> tuple[TrialOutcome, np.ndarray | None, np.ndarray]:
        """Outcome, residual over non-perfect qubits (``None`` on logical loss) and node labels."""
        g = self.g
        nc = self.lattice.n_cells
        if removed.any():
            labels = g.labels(removed)
            if labels[nc] == labels[nc + 1]:
                return TrialOutcome(True), None, labels
        else:
            labels = self._identity
        if not dephased.any():
            return TrialOutcome(False), dephased, labels
        if self.backend == "blossom":
            full_r = np.zeros(self.lattice.n_qubits, dtype=bool)
            full_d = np.zeros(self.lattice.n_qubits, dtype=bool)
            full_r[g.active] = removed
            full_d[g.active] = dephased
            sc = Superchecks(self.lattice, full_r, labels, int(labels.max()) + 1)
            m = mwpm_decode(extract_syndrome(sc, full_d))
            residual = dephased ^ m.correction[g.active]
        else:
            residual = dephased ^ self.correction(removed, dephased)
        return TrialOutcome(False, self.spanning_times(residual, labels)), residual, labels

    def correction(self, removed: np.ndarray, dephased: np.ndarray) -> np.ndarray:
        """PyMatching correction over the non-perfect qubits, restricted to survivors."""
        syndrome = self.g.syndrome(dephased)
        if removed.any():
            w = np.where(removed, 0.0, 1.0)
            matcher = pymatching.Matching.from_check_matrix(self.g.H, weights=w)
        else:
            matcher = self.g.fixed_matching()
        return matcher.decode(syndrome).astype(bool) & ~removed

    def correction_batch(self, dephased: np.ndarray) -> np.ndarray:
        """Corrections for many removal-free trials; ``dephased`` is ``(shots, na)``."""
        syn = np.asarray((self.g.H @ dephased.T.astype(np.uint8)).T % 2, dtype=np.uint8)
        return self.g.fixed_matching().decode_batch(syn).astype(bool)

    def low_crossing_parity(self, residual: np.ndarray, labels: np.ndarray | None = None) -> int:
        """Parity of residual edges entering the (deformed) low x boundary."""
        nc = self.lattice.n_cells
        labels = self._identity if labels is None else labels
        idx = np.flatnonzero(residual)
        u = labels[self.g.ends[idx, 0]]
        v = labels[self.g.ends[idx, 1]]
        low = labels[nc]
        return int(((u == low) != (v == low)).sum()) % 2

    def spanning_times(self, residual: np.ndarray, labels: np.ndarray | None = None) -> frozenset:
        """Erroneous times of a residual over the non-perfect qubits."""
        nc = self.lattice.n_cells
        labels = self._identity if labels is None else labels
        return _classify_active(self.g, labels, residual, int(labels[nc]), int(labels[nc + 1]))


def format_trace(index: int, lattice: RhgLattice, state: ErrorState, graph: SyndromeGraph | None,
                 matching: Matching | None, outcome: TrialOutcome) -> str:
    """Line-oriented debug record of one trial."""
    lines = [f"trial {index}"]
    lines.append("removed " + " ".join(str(q) for q in np.flatnonzero(state.removed)))
    lines.append("dephased " + " ".join(str(q) for q in np.flatnonzero(state.dephased)))
    if graph is not None:
        lines.append("events " + " ".join(str(e) for e in graph.detection_events))
    if matching is not None:
        lines.append("pairs " + " ".join(f"{a}-{'B' if b == BOUNDARY else b}" for a, b in matching.pairs))
        lines.append(f"weight {matching.weight}")
    if outcome.logical_loss:
        lines.append("outcome logical-loss")
    else:
        lines.append("outcome times " + " ".join(str(t) for t in sorted(outcome.erroneous_times)))
    return "\n".join(lines) + "\n"
