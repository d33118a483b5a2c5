"""RHG cluster-lattice geometry as an index-based combinatorial structure.

Coordinate convention (all integers, doubled so nothing is half-integral):

* primal cells sit at points whose three coordinates are all odd;
* a face qubit sits at a cell centre shifted by one along a single axis, so
  exactly one of its coordinates is even; that axis is its orientation tag;
* ``x`` runs over ``[0, 2(d-1)]``: cells at ``x = 1, 3, ..., 2d-3`` and primal
  boundary faces at ``x = 0`` and ``x = 2d-2``;
* ``y`` runs over ``[1, 2d-1]``: the dual boundaries pass through the cell
  centres at ``y = 1`` and ``y = 2d-1``, so the end rows are half cells that
  lack their outer ``y`` face (5 qubits instead of 6);
* ``t`` runs over ``[0, 2T]``: cells at ``t = 1, 3, ..., 2T-1``; the faces at
  ``t = 0`` and ``t = 2T`` are the primal time boundaries and are tagged
  perfect (never removed, never dephased).

Only primal faces are materialised. Edge qubits of the primal lattice carry
the dual checks and never enter a primal parity check, so they are omitted.
A chain of faces crossing ``x`` has ``d`` qubits and a chain crossing ``y``
has ``d`` as well, so both distances equal ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

AXES = ("x", "y", "t")
NO_CELL = -1

# boundary side codes for ``RhgLattice.x_side``
INTERIOR, LOW, HIGH = 0, 1, 2


@dataclass(frozen=True)
class LatticeConfig:
    """Size of the simulated cuboid.

    Attributes:
        d: code distance, odd and at least 3.
        T: extent in simulating time, in cells; defaults to ``4d + 1``.
    """

    d: int
    T: int | None = None

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 3 or self.d % 2 == 0:
            raise ValueError(f"code distance must be odd and >= 3, got {self.d}")
        if self.T is None:
            object.__setattr__(self, "T", 4 * int(self.d) + 1)
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")


@dataclass(frozen=True, eq=False)
class RhgLattice:
    """Primal cells and face qubits of an RHG cuboid.

    Qubits and cells are both ordered lexicographically by ``(t, y, x)``.
    Arrays are read-only after construction.

    Attributes:
        cfg: the configuration that produced this lattice.
        qubit_coords: ``(nq, 3)`` doubled ``(x, y, t)`` coordinates.
        qubit_axis: ``(nq,)`` orientation, index into ``AXES``.
        qubit_cells: ``(nq, 2)`` owning cell indices, ``NO_CELL`` padded.
        x_side: ``(nq,)`` ``LOW``/``HIGH`` for faces on the primal x boundaries.
        perfect: ``(nq,)`` faces on the time boundaries.
        cell_coords: ``(nc, 3)`` doubled cell-centre coordinates.
        cell_qubits: ``(nc, 6)`` incident qubits, ``NO_CELL`` padded for half cells.
        half_cell: ``(nc,)`` cells cut by a dual y boundary.
    """

    cfg: LatticeConfig
    qubit_coords: np.ndarray
    qubit_axis: np.ndarray
    qubit_cells: np.ndarray
    x_side: np.ndarray
    perfect: np.ndarray
    cell_coords: np.ndarray
    cell_qubits: np.ndarray
    half_cell: np.ndarray
    boundary_class: dict = field(default_factory=lambda: {"x": "primal", "y": "dual", "t": "primal"})
    _lookups: dict = field(default_factory=dict, repr=False)

    @property
    def d(self) -> int:
        return self.cfg.d

    @property
    def T(self) -> int:
        return self.cfg.T

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_coords)

    @property
    def n_cells(self) -> int:
        return len(self.cell_coords)

    @property
    def cell_extents(self) -> tuple[int, int, int]:
        """Number of cell layers along ``x``, ``y`` (full-cell widths) and ``t``."""
        return (self.d - 1, self.d - 1, self.T)

    def cells_of(self, q: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.qubit_cells[q] if c != NO_CELL)

    def incidence(self, c: int) -> tuple[int, ...]:
        return tuple(int(q) for q in self.cell_qubits[c] if q != NO_CELL)

    def qubit_index(self, x: int, y: int, t: int) -> int:
        return self._qubit_lookup()[(x, y, t)]

    def cell_index(self, x: int, y: int, t: int) -> int:
        return self._cell_lookup()[(x, y, t)]

    def time_index(self, q: int) -> int:
        """Simulating-time layer of a qubit: the cell layer it belongs to (clipped)."""
        return min(int(self.qubit_coords[q, 2]) // 2, self.T - 1)

    def _qubit_lookup(self) -> dict:
        return self._lookup("qubit_coords")

    def _cell_lookup(self) -> dict:
        return self._lookup("cell_coords")

    def _lookup(self, attr: str) -> dict:
        if attr not in self._lookups:
            self._lookups[attr] = {tuple(v): i for i, v in enumerate(getattr(self, attr).tolist())}
        return self._lookups[attr]

    def dump(self) -> str:
        """Line-oriented text listing of every qubit then every cell, in index order."""
        lines = []
        for q, (x, y, t) in enumerate(self.qubit_coords.tolist()):
            tags = []
            if self.perfect[q]:
                tags.append("perfect")
            if self.x_side[q] == LOW:
                tags.append("boundary=x-low")
            elif self.x_side[q] == HIGH:
                tags.append("boundary=x-high")
            cells = ",".join(str(c) for c in self.cells_of(q))
            lines.append(f"qubit {q} {x} {y} {t} {AXES[self.qubit_axis[q]]} cells={cells}"
                         + "".join(" " + s for s in tags))
        for c, (x, y, t) in enumerate(self.cell_coords.tolist()):
            qs = ",".join(str(q) for q in self.incidence(c))
            half = " half" if self.half_cell[c] else ""
            lines.append(f"cell {c} {x} {y} {t} qubits={qs}{half}")
        return "\n".join(lines) + "\n"


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _sorted_tyx(coords: np.ndarray) -> np.ndarray:
    return np.lexsort((coords[:, 0], coords[:, 1], coords[:, 2]))


def build_lattice(cfg: LatticeConfig) -> RhgLattice:
    """Construct the cuboid described by ``cfg``; identical configs give identical indexing."""
    d, T = int(cfg.d), int(cfg.T)
    xs = np.arange(1, 2 * d - 2, 2)
    ys = np.arange(1, 2 * d, 2)
    ts = np.arange(1, 2 * T, 2)
    tt, yy, xx = np.meshgrid(ts, ys, xs, indexing="ij")
    cell_coords = np.stack([xx.ravel(), yy.ravel(), tt.ravel()], axis=1)
    cell_coords = cell_coords[_sorted_tyx(cell_coords)]
    nc = len(cell_coords)

    # every (cell, axis, sign) face candidate, dropping the outer y faces of half cells
    shifts = np.array([[s if a == ax else 0 for a in range(3)] for ax in range(3) for s in (-1, 1)])
    cand = (cell_coords[:, None, :] + shifts[None, :, :]).reshape(-1, 3)
    owner = np.repeat(np.arange(nc), 6)
    keep = (cand[:, 1] >= 1) & (cand[:, 1] <= 2 * d - 1)
    cand, owner = cand[keep], owner[keep]

    uniq, inverse = np.unique(cand, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    order = _sorted_tyx(uniq)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    qubit_coords = uniq[order]
    qid = rank[inverse]
    nq = len(qubit_coords)

    qubit_cells = np.full((nq, 2), NO_CELL, dtype=np.int64)
    # owners arrive in increasing cell order, so slot 0 gets the lower cell index
    by_q = np.lexsort((owner, qid))
    q_sorted, o_sorted = qid[by_q], owner[by_q]
    first = np.ones(len(q_sorted), dtype=bool)
    first[1:] = q_sorted[1:] != q_sorted[:-1]
    qubit_cells[q_sorted[first], 0] = o_sorted[first]
    qubit_cells[q_sorted[~first], 1] = o_sorted[~first]

    cell_qubits = np.full((nc, 6), NO_CELL, dtype=np.int64)
    by_c = np.lexsort((qid, owner))
    c_sorted, qq = owner[by_c], qid[by_c]
    starts = np.searchsorted(c_sorted, np.arange(nc))
    slot = np.arange(len(c_sorted)) - starts[c_sorted]
    cell_qubits[c_sorted, slot] = qq

    axis = np.argmax(qubit_coords % 2 == 0, axis=1).astype(np.int8)
    x_side = np.zeros(nq, dtype=np.int8)
    x_side[qubit_coords[:, 0] == 0] = LOW
    x_side[qubit_coords[:, 0] == 2 * d - 2] = HIGH
    perfect = (qubit_coords[:, 2] == 0) | (qubit_coords[:, 2] == 2 * T)
    half_cell = (cell_coords[:, 1] == 1) | (cell_coords[:, 1] == 2 * d - 1)

    return RhgLattice(
        cfg=cfg,
        qubit_coords=_frozen(qubit_coords),
        qubit_axis=_frozen(axis),
        qubit_cells=_frozen(qubit_cells),
        x_side=_frozen(x_side),
        perfect=_frozen(perfect),
        cell_coords=_frozen(cell_coords),
        cell_qubits=_frozen(cell_qubits),
        half_cell=_frozen(half_cell),
    )


@lru_cache(maxsize=16)
def cached_lattice(d: int, T: int | None = None) -> RhgLattice:
    """Shared read-only lattice for repeated Monte Carlo use."""
    return build_lattice(LatticeConfig(d, T))


def count_lattice_qubits_for_gate(d: int) -> float:
    """Qubits in a cubic lattice block of side ``5d/4``: ``6 (5d/4)**3``, computed exactly."""
    if d < 0:
        raise ValueError(f"d must be >= 0, got {d}")
    return float(gate_qubits_exact(d))


def gate_qubits_exact(d: int) -> Fraction:
    side = Fraction(5 * d, 4)
    return 6 * side**3
