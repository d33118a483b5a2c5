"""Simulation and resource accounting for multiphoton-qubit topological cluster computing."""

from .lattice import LatticeConfig, RhgLattice, build_lattice, count_lattice_qubits_for_gate
from .noise import NoiseParams, Variant, nbsm_failure_rate
from .decoder import TrialDecoder
from .montecarlo import SimJob, SimResult, find_threshold, run_job, run_grid
from .resources import enc_cost, gate_overhead, ghz_cost, plan_ghz, ppo_cost, star_cost

__version__ = "0.1.0"
