import numpy as np
import pytest

from qformula import (
    FormatError,
    read_circuit,
    read_partition,
    read_truth_table,
    write_circuit,
    write_partition,
    write_truth_table,
)
from qformula.samples import formula_example, nonformula_example, random_formula


def test_round_trip_reference_circuits(tmp_path):
    for i, circuit in enumerate([formula_example(), nonformula_example()]):
        path = tmp_path / f"c{i}.json"
        write_circuit(circuit, path)
        back = read_circuit(path)
        assert back.num_qubits == circuit.num_qubits
        assert back.labels == circuit.labels
        assert back.output_qubit == circuit.output_qubit
        assert back.arity_bound == circuit.arity_bound
        for g1, g2 in zip(back.gates, circuit.gates):
            assert g1.step == g2.step and g1.targets == g2.targets
            assert np.array_equal(g1.matrix, g2.matrix)  # bit-exact


def test_round_trip_random_formulas(tmp_path):
    for seed in (1, 9, 23):
        circuit = random_formula(seed).formula
        path = tmp_path / f"r{seed}.json"
        write_circuit(circuit, path)
        back = read_circuit(path)
        assert all(
            np.array_equal(a.matrix, b.matrix) for a, b in zip(back.gates, circuit.gates)
        )


def test_round_trip_holds_on_the_whole_corpus(tmp_path, corpus):
    path = tmp_path / "member.json"
    for member in corpus:
        write_circuit(member.formula, path)
        back = read_circuit(path)
        assert back.labels == member.formula.labels
        assert back.output_qubit == member.formula.output_qubit
        for g1, g2 in zip(back.gates, member.formula.gates):
            assert (g1.step, g1.targets) == (g2.step, g2.targets)
            assert np.array_equal(g1.matrix, g2.matrix)


def test_reference_file_shape(tmp_path):
    path = tmp_path / "tree.json"
    write_circuit(formula_example(), path)
    circuit = read_circuit(path)
    assert circuit.num_qubits == 4
    assert len(circuit.gates) == 4


def test_empty_gate_list_is_a_valid_identity_circuit(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text(
        '{"num_qubits": 1, "labels": [{"const": 1}], "gates": [], "output_qubit": 0}'
    )
    circuit = read_circuit(path)
    assert circuit.check().gates == ()


def test_truncated_file_is_a_parse_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"num_qubits": 2, "labels": [{"var": 1}')
    with pytest.raises(FormatError, match="not valid JSON"):
        read_circuit(path)


def test_missing_field_diagnostics(tmp_path):
    path = tmp_path / "nofield.json"
    path.write_text('{"num_qubits": 1, "labels": [{"var": 1}], "gates": []}')
    with pytest.raises(FormatError, match="output_qubit"):
        read_circuit(path)


def test_bad_matrix_length_names_the_gate(tmp_path):
    path = tmp_path / "badmat.json"
    path.write_text(
        '{"num_qubits": 1, "labels": [{"var": 1}], "output_qubit": 0,'
        ' "gates": [{"step": 1, "targets": [0], "matrix": [[1, 0]]}]}'
    )
    with pytest.raises(FormatError, match=r"gates\[0\]"):
        read_circuit(path)


def test_bad_label_is_rejected(tmp_path):
    path = tmp_path / "badlabel.json"
    path.write_text(
        '{"num_qubits": 1, "labels": [{"const": 3}], "gates": [], "output_qubit": 0}'
    )
    with pytest.raises(FormatError, match=r"labels\[0\]"):
        read_circuit(path)


def test_truth_table_round_trip(tmp_path):
    path = tmp_path / "t.tt"
    write_truth_table(2, [0, 1, 1, 0], path)
    n, bits = read_truth_table(path)
    assert n == 2
    assert list(bits) == [0, 1, 1, 0]


def test_truth_table_length_mismatch(tmp_path):
    path = tmp_path / "bad.tt"
    path.write_text("2\n010\n")
    with pytest.raises(FormatError, match="expected 4 bits"):
        read_truth_table(path)


def test_partition_round_trip(tmp_path):
    path = tmp_path / "p.part"
    blocks = [frozenset({1, 2}), frozenset({3, 4})]
    write_partition(blocks, path)
    assert read_partition(path) == blocks
