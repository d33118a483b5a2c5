from __future__ import annotations

import itertools
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mtqc.lattice import (HIGH, LOW, NO_CELL, LatticeConfig, build_lattice, count_lattice_qubits_for_gate,
                          gate_qubits_exact)


def brute_force(d: int, T: int):
    """Faces and cells by scanning every integer point of the bounding box."""
    cells = {(x, y, t) for x in range(1, 2 * d - 2, 2) for y in range(1, 2 * d, 2) for t in range(1, 2 * T, 2)}
    faces = {}
    for x, y, t in itertools.product(range(0, 2 * d - 1), range(1, 2 * d), range(0, 2 * T + 1)):
        if sum(c % 2 == 0 for c in (x, y, t)) != 1:
            continue
        owners = []
        for ax in range(3):
            for s in (-1, 1):
                c = [x, y, t]
                c[ax] += s
                if tuple(c) in cells and [x, y, t][ax] % 2 == 0:
                    owners.append(tuple(c))
        if owners:
            faces[(x, y, t)] = sorted(owners)
    return cells, faces


@pytest.mark.parametrize("d,T", [(3, 2), (3, 13), (5, 3)])
def test_matches_brute_force_enumeration(d, T):
    lat = build_lattice(LatticeConfig(d, T))
    cells, faces = brute_force(d, T)
    assert lat.n_cells == len(cells)
    assert lat.n_qubits == len(faces)
    for q, xyz in enumerate(map(tuple, lat.qubit_coords.tolist())):
        got = sorted(tuple(lat.cell_coords[c]) for c in lat.cells_of(q))
        assert got == faces[xyz]


def test_small_counts():
    lat = build_lattice(LatticeConfig(3, 2))
    cells, faces = brute_force(3, 2)
    half = sum(1 for (x, y, t) in cells if y in (1, 5))
    assert (lat.n_qubits, lat.n_cells, int(lat.half_cell.sum())) == (len(faces), len(cells), half)
    assert all(len(lat.incidence(c)) == 5 for c in np.flatnonzero(lat.half_cell))
    assert all(len(lat.incidence(c)) == 6 for c in np.flatnonzero(~lat.half_cell))


def test_default_extent():
    lat = build_lattice(LatticeConfig(3))
    assert lat.T == 13
    assert lat.cell_extents == (2, 2, 13)


@pytest.mark.parametrize("d", [4, 1, 0, -3])
def test_invalid_distance(d):
    with pytest.raises(ValueError, match="code distance must be odd"):
        LatticeConfig(d)


@settings(max_examples=15, deadline=None)
@given(d=st.sampled_from([3, 5, 7]), T=st.integers(1, 6))
def test_incidence_and_boundaries(d, T):
    lat = build_lattice(LatticeConfig(d, T))
    n_owner = (lat.qubit_cells != NO_CELL).sum(axis=1)
    on_x_boundary = lat.x_side != 0
    on_t_boundary = lat.perfect
    single = on_x_boundary | on_t_boundary
    assert (n_owner[~single] == 2).all()
    assert (n_owner[single] == 1).all()
    for c in range(lat.n_cells):
        for q in lat.incidence(c):
            assert c in lat.cells_of(q)
    for q in range(lat.n_qubits):
        for c in lat.cells_of(q):
            assert q in lat.incidence(c)
    assert set(lat.x_side[lat.qubit_coords[:, 0] == 0]) == {LOW}
    assert set(lat.x_side[lat.qubit_coords[:, 0] == 2 * d - 2]) == {HIGH}


def _x_distance(lat) -> int:
    """Fewest faces on a path of cells joining the two x boundaries."""
    nc = lat.n_cells
    start = [lat.cells_of(q)[0] for q in np.flatnonzero(lat.x_side == LOW)]
    dist = {c: 1 for c in start}
    queue = deque(start)
    while queue:
        c = queue.popleft()
        for q in lat.incidence(c):
            if lat.x_side[q] == HIGH:
                return dist[c] + 1
            for c2 in lat.cells_of(q):
                if c2 not in dist:
                    dist[c2] = dist[c] + 1
                    queue.append(c2)
    raise AssertionError(f"boundaries not connected ({nc} cells)")


@pytest.mark.parametrize("d", [3, 5, 7])
def test_primal_distance_is_d(d):
    assert _x_distance(build_lattice(LatticeConfig(d, 3))) == d


def test_deterministic_dump():
    a = build_lattice(LatticeConfig(3, 2)).dump()
    b = build_lattice(LatticeConfig(3, 2)).dump()
    assert a == b
    assert a.splitlines()[0].startswith("qubit 0 ")


def test_lookup_and_time_index():
    lat = build_lattice(LatticeConfig(3, 4))
    q = lat.qubit_index(2, 3, 5)
    assert tuple(lat.qubit_coords[q]) == (2, 3, 5)
    assert lat.time_index(q) == 2
    assert lat.time_index(lat.qubit_index(1, 3, 8)) == 3  # t = 2T clipped into the last layer
    c = lat.cell_index(1, 1, 1)
    assert lat.half_cell[c]


def test_arrays_are_read_only():
    lat = build_lattice(LatticeConfig(3, 2))
    with pytest.raises(ValueError):
        lat.qubit_coords[0, 0] = 5


def test_gate_block_size():
    assert count_lattice_qubits_for_gate(4) == 750
    assert count_lattice_qubits_for_gate(0) == 0
    assert count_lattice_qubits_for_gate(15) == pytest.approx(6 * 18.75**3)
    assert gate_qubits_exact(8) / gate_qubits_exact(4) == 8
