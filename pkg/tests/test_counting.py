import math

import numpy as np
import pytest

from qformula import (
    CountingParams,
    GateNet,
    appendix_bound,
    enumerate_functions,
    equiv_class_bound,
    grid_sign_patterns,
    warren_bound,
    warren_bound_log2,
)
from qformula.counting import evaluate_poly, poly_degree, random_polynomial
from qformula.gates import CNOT, H, I2, X

E = math.e


def test_warren_smallest_case():
    assert warren_bound(1, 1, 1) == pytest.approx(4 * E, rel=1e-12)


def test_warren_direct_substitution():
    assert warren_bound(3, 2, 2) == pytest.approx((12 * E) ** 2, rel=1e-12)


def test_warren_log_form_matches_value():
    for m, t, deg in [(1, 1, 1), (3, 2, 2), (7, 5, 3)]:
        assert warren_bound_log2(m, t, deg) == pytest.approx(
            math.log2(warren_bound(m, t, deg)), rel=1e-12
        )


def test_warren_rejects_nonpositive_inputs():
    with pytest.raises(ValueError):
        warren_bound(0, 1, 1)
    with pytest.raises(ValueError):
        warren_bound_log2(1, -2, 1)


def test_single_linear_polynomial_has_two_grid_patterns():
    poly = ((1.0, (1,)),)  # P(x) = x
    patterns = grid_sign_patterns([poly], 1)
    assert patterns == {(-1,), (1,)}
    assert len(patterns) <= warren_bound(1, 1, 1)


def test_grid_pattern_counts_never_exceed_warren():
    rng = np.random.default_rng(31)
    for _ in range(60):
        t = int(rng.integers(1, 3))
        m = int(rng.integers(1, 4))
        deg = int(rng.integers(1, 3))
        polys = [random_polynomial(rng, t, deg) for _ in range(m)]
        worst_deg = max(max(poly_degree(p) for p in polys), 1)
        assert len(grid_sign_patterns(polys, t)) <= warren_bound(m, t, worst_deg)


def test_poly_evaluation():
    poly = ((2.0, (1, 0)), (-1.0, (0, 2)), (0.5, (0, 0)))  # 2x - y^2 + 0.5
    points = np.array([[1.0, 2.0], [0.0, 0.0]])
    assert np.allclose(evaluate_poly(poly, points), [-1.5, 0.5])


def test_equiv_class_bound_values():
    assert equiv_class_bound(CountingParams(n=1, N=1, d=2, n_prime=2)).binomial_form == 1
    b = equiv_class_bound(CountingParams(n=2, N=3, d=2))
    assert b.binomial_form == pytest.approx(15 ** 3) == 3375
    assert b.power_form == pytest.approx(6 ** 6) == 46656
    assert b.power_form >= b.binomial_form


def test_counting_params_invariants():
    with pytest.raises(ValueError, match="n <= N"):
        CountingParams(n=3, N=2, d=2)
    assert CountingParams(n=1, N=2, d=2).mu == 32


def test_appendix_bound_smallest_case():
    bound = appendix_bound(CountingParams(n=1, N=1, d=1))
    assert bound.mu == 4
    assert bound.sign_factor == pytest.approx((2 * E) ** 8, rel=1e-9)
    # class count is trivial at this size: one wiring class
    assert bound.log2_class_count == 0.0


def test_appendix_log_space_matches_high_precision_oracle():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 60
    for n, N, d in [(1, 1, 1), (2, 2, 2), (3, 5, 2)]:
        params = CountingParams(n=n, N=N, d=d)
        bound = appendix_bound(params)
        mu = params.mu
        exact = (4 * mpmath.e * N ** 2 * mpmath.mpf(2) ** (n + 1) / (2 * mu)) ** (2 * mu)
        oracle = float(mpmath.log(exact, 2))
        assert bound.log2_sign_factor == pytest.approx(oracle, rel=1e-9)


def test_appendix_bound_monotone_in_n():
    values = [
        appendix_bound(CountingParams(n=n, N=4, d=2)).log2_sign_factor
        for n in (1, 2, 3, 4)
    ]
    assert values == sorted(values)


def test_enumerate_single_qubit_single_gate():
    result = enumerate_functions(1, 1, GateNet.default(), num_qubits=1)
    assert result.count == 2
    assert result.tables == ("01", "10")  # x1 and its negation
    assert result.undetermined_circuits == 1  # the Hadamard circuit


def test_enumerate_gateless_single_qubit():
    result = enumerate_functions(1, 0, GateNet.default(), num_qubits=1)
    # the lone line must carry x1, so only the identity function appears
    assert result.tables == ("01",)


def test_enumerate_with_ancilla_reaches_constants():
    result = enumerate_functions(1, 0, GateNet.default(), num_qubits=2)
    assert set(result.tables) == {"01", "00", "11"}


def test_enumerate_two_qubits_with_cnot():
    net = GateNet.of([("I", I2), ("X", X), ("CNOT", CNOT)])
    result = enumerate_functions(2, 1, net, num_qubits=2)
    # one two-qubit gate cannot make anything undetermined from basis inputs
    assert result.undetermined_circuits == 0
    assert "0110" in result.tables  # CNOT writes x1 xor x2
    assert all(t in {"0011", "0101", "1100", "1010", "0110", "1001"} for t in result.tables)


def test_enumerate_counts_stay_under_appendix_bound():
    result = enumerate_functions(1, 1, GateNet.default(), num_qubits=1)
    bound = appendix_bound(CountingParams(n=1, N=1, d=1))
    assert math.log2(result.count) <= bound.log2_total
    assert result.count <= 2 ** (2 ** 1)


def test_enumerate_caps():
    with pytest.raises(ValueError):
        enumerate_functions(4, 1, GateNet.default(), num_qubits=4)
    with pytest.raises(ValueError):
        enumerate_functions(1, 9, GateNet.default(), num_qubits=1)
    with pytest.raises(ValueError):
        enumerate_functions(2, 1, GateNet.default(), num_qubits=1)


def test_gate_net_rejects_non_unitaries():
    with pytest.raises(ValueError, match="unitary"):
        GateNet.of([("bad", np.array([[1, 0], [0, 2]]))])


def test_h_gate_on_undetermined_band_example():
    net = GateNet.of([("H", H)])
    result = enumerate_functions(1, 1, net, num_qubits=1)
    assert result.count == 0 and result.undetermined_circuits == 1
