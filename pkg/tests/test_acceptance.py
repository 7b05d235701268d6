"""Acceptance criteria for the toolkit, one test per criterion.

Each test prints a single PASS/FAIL line (visible with pytest -rA or -s)
and asserts the criterion at its stated tolerance.
"""
import math
import time

import numpy as np
import pytest

from qformula import (
    CountingParams,
    GateNet,
    appendix_bound,
    build_circuit,
    computation_graph,
    constant,
    enumerate_functions,
    evaluate,
    grid_sign_patterns,
    has_unique_paths,
    is_formula,
    probability_vector,
    restrict,
    run,
    squeeze_all,
    variable,
    warren_bound,
)
from qformula.counting import poly_degree, random_polynomial
from qformula.gates import random_unitary
from qformula.nechiporuk import ed_sigma_check, nechiporuk_bound, ed_function, ed_partition
from qformula.samples import formula_example, nonformula_example, toffoli_and_circuit
from qformula.simulator import embed_gate, initial_state
from qformula.verification import run_all_sweeps


def _criterion(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f": {detail}"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def squeezed_corpus(corpus):
    """Every corpus member restricted and squeezed with verification on."""
    results = []
    started = time.perf_counter()
    for member in corpus:
        f_rho = restrict(member.formula, member.block, member.restriction)
        results.append((member, f_rho, squeeze_all(f_rho, tol=1e-9)))
    return results, time.perf_counter() - started


def test_criterion_1_lemma_suite():
    started = time.perf_counter()
    results = run_all_sweeps(cases=1000, seed=7)
    elapsed = time.perf_counter() - started
    ok = all(r.passed for r in results) and elapsed < 60
    detail = (
        ", ".join(f"{r.name} {r.max_deviation:.2e}<={r.tolerance:.0e}" for r in results)
        + f", {elapsed:.1f}s"
    )
    _criterion("criterion 1 (lemma suite, 1000 cases each)", ok, detail)


def test_criterion_2_squeeze_soundness(corpus, squeezed_corpus):
    results, elapsed = squeezed_corpus
    assert len(results) >= 100
    deviations, ranks, companion_counts = [], [], set()
    has_long_path = 0
    for member, f_rho, squeezed in results:
        assert member.formula.num_qubits <= 12
        deviations.append(squeezed.max_deviation)  # verified at 1e-9 inside
        ranks.extend(squeezed.ranks)
        companion_counts.update(r.num_companions for r in squeezed.records)
        if squeezed.records or any(s.squeezable for s in squeezed.skipped_segments):
            has_long_path += 1
        if any(s.squeezable for s in squeezed.skipped_segments):
            companion_counts.add(0)
        # verdict agreement on a threshold table and its complement
        p = probability_vector(f_rho)
        for table in ((p > 0.5).astype(int), (p <= 0.5).astype(int)):
            before = evaluate(f_rho, table)
            after = evaluate(squeezed.circuit, table)
            assert (before.status, before.alpha) == (after.status, after.alpha)
    ok = (
        max(deviations) <= 1e-9
        and all(1 <= r <= 16 for r in ranks)
        and companion_counts >= {0, 1, 2, 3, 4}
        and has_long_path == len(results)
        and elapsed < 300
    )
    detail = (
        f"{len(results)} formulas, max |dp| = {max(deviations):.2e}, "
        f"ranks in [{min(ranks)}, {max(ranks)}], companion counts {sorted(companion_counts)}, "
        f"{elapsed:.1f}s"
    )
    _criterion("criterion 2 (squeeze soundness at 1e-9)", ok, detail)


def test_criterion_3_squeeze_size(corpus, squeezed_corpus):
    results, _ = squeezed_corpus
    worst_margin = min(
        (4 * sq.s_j + 1) - sq.gate_count for _, _, sq in results
    )
    size_ok = worst_margin >= 0

    # two restrictions of one formula differ only in the composite matrices
    pairs_checked = 0
    topo_ok = True
    for member, _, _ in results:
        if not member.rho or pairs_checked >= 3:
            continue
        flipped = {var: 1 - bit for var, bit in member.rho}
        a = squeeze_all(restrict(member.formula, member.block, member.restriction))
        b = squeeze_all(restrict(member.formula, member.block, flipped))
        if not a.records:
            continue
        pairs_checked += 1
        topo_ok &= [(g.step, g.targets) for g in a.circuit.gates] == [
            (g.step, g.targets) for g in b.circuit.gates
        ]
        topo_ok &= a.circuit.labels == b.circuit.labels
        composites = set(a.composite_steps)
        for ga, gb in zip(a.circuit.gates, b.circuit.gates):
            if ga.step not in composites:
                topo_ok &= bool(np.array_equal(ga.matrix, gb.matrix))
    ok = size_ok and topo_ok and pairs_checked >= 3
    _criterion(
        "criterion 3 (size <= 4*s_j + 1, restriction-independent topology)",
        ok,
        f"min bound margin {worst_margin}, {pairs_checked} restriction pairs compared",
    )


def test_criterion_4_formula_detection(corpus):
    top, bottom = nonformula_example(), formula_example()
    class_ok = (not is_formula(top)) and is_formula(bottom)
    agreement = True
    for circuit in [top, bottom] + [m.formula for m in corpus]:
        agreement &= computation_graph(circuit).is_tree == has_unique_paths(circuit)
    ok = class_ok and agreement
    _criterion(
        "criterion 4 (reference pair classified, tree == unique-path on corpus)",
        ok,
        f"{len(corpus) + 2} circuits checked",
    )


def test_criterion_5_nechiporuk_element_distinctness():
    report2 = ed_sigma_check(2)
    bound2 = nechiporuk_bound(ed_function(2), ed_partition(2))
    small_ok = (
        report2.sigmas == (4, 4)
        and report2.binomial == 4
        and bound2.total == pytest.approx(4.0)
    )
    started = time.perf_counter()
    report3 = ed_sigma_check(3)
    elapsed = time.perf_counter() - started
    big_ok = (
        report3.binomial == math.comb(9, 2) == 36
        and all(s >= 36 for s in report3.sigmas)
        and report3.symmetric
        and elapsed < 10
    )
    _criterion(
        "criterion 5 (element distinctness sigma counts)",
        small_ok and big_ok,
        f"ell=2 sigmas {report2.sigmas} (= C(4,1)), total {bound2.total}; "
        f"ell=3 sigmas {report3.sigmas} >= 36 in {elapsed:.2f}s",
    )


def test_criterion_6_counting_bounds():
    rng = np.random.default_rng(31)
    systems = 0
    dominance = True
    for _ in range(60):
        t = int(rng.integers(1, 3))
        m = int(rng.integers(1, 4))
        deg = int(rng.integers(1, 3))
        polys = [random_polynomial(rng, t, deg) for _ in range(m)]
        worst_deg = max(max(poly_degree(p) for p in polys), 1)
        dominance &= len(grid_sign_patterns(polys, t)) <= warren_bound(m, t, worst_deg)
        systems += 1

    single = enumerate_functions(1, 1, GateNet.default(), num_qubits=1)
    bound11 = appendix_bound(CountingParams(n=1, N=1, d=1))
    from qformula.gates import CNOT, I2, X

    pair = enumerate_functions(
        2, 2, GateNet.of([("I", I2), ("X", X), ("CNOT", CNOT)]), num_qubits=2
    )
    bound22 = appendix_bound(CountingParams(n=2, N=2, d=2))
    counts_ok = (
        single.count == 2
        and math.log2(single.count) <= bound11.log2_total
        and math.log2(pair.count) <= bound22.log2_total
    )

    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 60
    exact = float((4 * mpmath.e * 1 * mpmath.mpf(2) ** 2 / 8) ** 8)
    value_ok = abs(bound11.sign_factor - exact) / exact <= 1e-6

    ok = dominance and systems >= 50 and counts_ok and value_ok
    _criterion(
        "criterion 6 (counting bounds)",
        ok,
        f"{systems} sign systems dominated; enumerate(1,1,(I,X,H))={single.count}; "
        f"appendix(1,1,1)={bound11.sign_factor:.6g} vs oracle {exact:.6g}",
    )


def _small_random_circuit(seed):
    rng = np.random.default_rng(seed)
    width = int(rng.integers(2, 5))
    labels = [variable(1)] + [
        variable(1) if rng.random() < 0.2 else constant(int(rng.integers(0, 2)))
        for _ in range(width - 1)
    ]
    specs = []
    for _ in range(int(rng.integers(1, 6))):
        arity = 1 if width == 1 or rng.random() < 0.3 else 2
        targets = tuple(int(q) for q in rng.choice(width, size=arity, replace=False))
        specs.append((targets, random_unitary(2 ** arity, rng)))
    return build_circuit(width, labels, specs, output_qubit=int(rng.integers(0, width)))


def test_criterion_7_simulator_oracle(corpus):
    circuits = [formula_example(), nonformula_example(), toffoli_and_circuit()]
    circuits += [m.formula for m in corpus if m.formula.num_qubits <= 4]
    circuits += [_small_random_circuit(1000 + i) for i in range(20)]
    assert len(circuits) > 25
    worst = 0.0
    worst_norm = 0.0
    for circuit in circuits:
        m = circuit.num_qubits
        full = np.eye(2 ** m, dtype=complex)
        for gate in sorted(circuit.gates, key=lambda g: g.step):
            full = embed_gate(gate, m) @ full
        n = circuit.num_variables
        for idx in range(2 ** n):
            bits = [(idx >> (n - 1 - j)) & 1 for j in range(n)]
            state, _ = run(circuit, bits)
            expected = full @ initial_state(circuit, bits)
            worst = max(worst, float(np.max(np.abs(state - expected))))
            worst_norm = max(worst_norm, abs(float(np.linalg.norm(state)) - 1.0))
    ok = worst <= 1e-10 and worst_norm <= 1e-10
    _criterion(
        "criterion 7 (simulator vs embedded-matrix oracle)",
        ok,
        f"{len(circuits)} circuits, max entry gap {worst:.2e}, max norm drift {worst_norm:.2e}",
    )
