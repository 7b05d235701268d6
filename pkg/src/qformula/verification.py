"""Randomized property sweeps for the toolkit's algebraic trust anchors.

Four suites, each running a configurable number of seeded cases:

* tensor factorization: norms and inner products of tensor products
  factor exactly (tolerance 1e-12);
* product families: tensor products of two orthonormal families stay
  orthonormal (1e-12);
* disjoint commuting split: a subcircuit over two disjoint qubit sets
  equals both sequential orders, on basis states and on random
  entangled inputs (1e-10);
* postponement: relocating the trailing partner-line gates behind a
  chain preserves the full operator (1e-10).

The CLI exposes them as ``verify-lemmas``; the acceptance suite runs
them at 1000 cases each.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Gate, build_circuit, constant
from .gates import random_unitary
from .rewrite import decompose_disjoint, postpone
from .simulator import apply_gate, to_unitary
from .tensor import inner_product, kron, orthonormalize

FACTORIZATION_TOL = 1e-12
OPERATOR_TOL = 1e-10


@dataclass(frozen=True)
class SweepResult:
    name: str
    cases: int
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def _random_vector(rng: np.random.Generator, dim: int, unit: bool = False) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v) if unit else v


def sweep_tensor_factorization(cases: int, seed: int) -> SweepResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        ka, kb = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        a1, a2 = (_random_vector(rng, 2 ** ka) for _ in range(2))
        b1, b2 = (_random_vector(rng, 2 ** kb) for _ in range(2))
        norm_gap = abs(
            np.linalg.norm(kron(a1, b1)) - np.linalg.norm(a1) * np.linalg.norm(b1)
        )
        ip_gap = abs(
            inner_product(kron(a1, b1), kron(a2, b2))
            - inner_product(a1, a2) * inner_product(b1, b2)
        )
        worst = max(worst, float(norm_gap), float(ip_gap))
    return SweepResult("tensor-factorization", cases, worst, FACTORIZATION_TOL)


def sweep_product_family(cases: int, seed: int) -> SweepResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        ka, kb = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        na = int(rng.integers(1, min(4, 2 ** ka) + 1))
        nb = int(rng.integers(1, min(4, 2 ** kb) + 1))
        family_a, _ = orthonormalize([_random_vector(rng, 2 ** ka) for _ in range(na)])
        family_b, _ = orthonormalize([_random_vector(rng, 2 ** kb) for _ in range(nb)])
        products = [kron(a, b) for a in family_a for b in family_b]
        gram = np.array([[inner_product(x, y) for y in products] for x in products])
        worst = max(worst, float(np.max(np.abs(gram - np.eye(len(products))))))
    return SweepResult("product-family", cases, worst, FACTORIZATION_TOL)


def _apply_gates(state: np.ndarray, gates, width: int) -> np.ndarray:
    for gate in gates:
        state = apply_gate(state, gate, width)
    return state


def sweep_disjoint_split(cases: int, seed: int) -> SweepResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        width = int(rng.integers(4, 7))
        cut = int(rng.integers(1, width))
        q1, q2 = list(range(cut)), list(range(cut, width))
        gates = []
        for step in range(int(rng.integers(2, 7))):
            side = q1 if (rng.random() < 0.5 or len(q2) < 2) else q2
            if len(side) < 2:
                side = q2 if side is q1 else q1
            pair = rng.choice(side, size=min(2, len(side)), replace=False)
            gates.append(
                Gate(step=step + 1, targets=tuple(int(t) for t in pair),
                     matrix=random_unitary(2 ** len(pair), rng))
            )
        c1, c2 = decompose_disjoint(gates, q1, q2)
        basis = np.zeros(2 ** width, dtype=complex)
        basis[int(rng.integers(0, 2 ** width))] = 1.0
        for state in (basis, _random_vector(rng, 2 ** width, unit=True)):
            reference = _apply_gates(state, gates, width)
            first = _apply_gates(_apply_gates(state, c1, width), c2, width)
            second = _apply_gates(_apply_gates(state, c2, width), c1, width)
            worst = max(
                worst,
                float(np.max(np.abs(reference - first))),
                float(np.max(np.abs(reference - second))),
            )
    return SweepResult("disjoint-split", cases, worst, OPERATOR_TOL)


def _random_postpone_instance(rng: np.random.Generator):
    """Chain on line 0 with partners 1..t and movable cone gates."""
    t = int(rng.integers(2, 4))
    spare = int(rng.integers(1, 3))
    width = 1 + t + spare
    specs = []
    cone_pool: list[int] = []
    free_pool = list(range(1 + t, width))
    for j in range(1, t + 1):
        specs.append(((0, j), random_unitary(4, rng)))
        cone_pool.append(j)
        if j < t and rng.random() < 0.8:
            partner = int(rng.choice(cone_pool))
            if free_pool and rng.random() < 0.7:
                other = free_pool.pop()
            else:
                other = int(rng.choice(cone_pool))
                if other == partner:
                    continue
            specs.append(((partner, other), random_unitary(4, rng)))
            cone_pool.append(other)
    circuit = build_circuit(
        num_qubits=width,
        labels=[constant(0)] * width,
        gate_specs=specs,
        output_qubit=0,
    )
    return circuit, 0, list(range(1, t + 1))


def sweep_postponement(cases: int, seed: int) -> SweepResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        circuit, q, partners = _random_postpone_instance(rng)
        moved = postpone(circuit, q, partners)
        gap = np.max(np.abs(to_unitary(circuit) - to_unitary(moved)))
        worst = max(worst, float(gap))
    return SweepResult("postponement", cases, worst, OPERATOR_TOL)


def run_all_sweeps(cases: int = 1000, seed: int = 7) -> tuple[SweepResult, ...]:
    """The four suites with per-suite derived seeds; deterministic."""
    return (
        sweep_tensor_factorization(cases, seed),
        sweep_product_family(cases, seed + 1),
        sweep_disjoint_split(cases, seed + 2),
        sweep_postponement(cases, seed + 3),
    )
