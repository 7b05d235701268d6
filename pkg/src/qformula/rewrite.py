"""Verified circuit transformations.

Four rewrites, each preserving acceptance probabilities:

* ``restrict`` pins every variable outside a block to a constant,
  producing the circuit of a subfunction.
* ``decompose_disjoint`` splits a subcircuit whose gates act on two
  disjoint qubit sets into two independently composable halves.
* ``postpone`` moves the gates hanging off a chain's partner lines to
  after the chain, when they never touch the chain's own line.
* ``squeeze_all`` compresses every squeezable segment of a formula's
  block paths: the segment's gates, the preparation of its constant
  companion lines, and the junk gates on already-consumed lines are
  replaced by one six-qubit composite gate acting on the two head lines
  plus four fresh |0> qubits.  The companion lines disappear from the
  circuit.  Acceptance probabilities agree with the original within
  1e-9 for every block assignment, which ``verify_squeeze`` checks by
  exhaustive simulation.

The composite gate realizes the segment's action in an orthonormal
basis of the at-most-16 states the companion register can reach; the
remaining matrix columns are completed deterministically and are never
excited by valid inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .tensor import expansion_coefficients, orthonormalize
from .analysis import (
    CompanionSet,
    PathSegment,
    PathSet,
    StructuralError,
    companion_set_of_path,
    computation_graph,
    is_formula,
    NotAFormulaError,
    path_segments,
    path_sets,
)
from .circuit import Circuit, Gate, InputLabel, constant, variable
from .simulator import apply_gate, probability_vector

RECONSTRUCTION_TOL = 1e-10
ISOMETRY_TOL = 1e-9
SQUEEZE_TOL = 1e-9
COMPOSITE_ARITY = 6
FRESH_QUBITS = 4


class NumericalError(ArithmeticError):
    """A numerical invariant of the rewrite failed beyond tolerance."""


class VerificationError(AssertionError):
    """A rewrite changed an acceptance probability beyond tolerance."""


# ---------------------------------------------------------------------------
# restriction


@dataclass(frozen=True)
class Restriction:
    """Constant values for every variable outside a block."""

    block: frozenset[int]
    assignment: tuple[tuple[int, int], ...]  # (variable, bit), sorted

    @classmethod
    def make(cls, block, assignment: Mapping[int, int]) -> "Restriction":
        return cls(
            block=frozenset(int(j) for j in block),
            assignment=tuple(sorted((int(k), int(v)) for k, v in assignment.items())),
        )


def restrict(formula: Circuit, block, rho: Mapping[int, int]) -> Circuit:
    """Fix every variable outside ``block`` to the bit given by ``rho``.

    The remaining block variables are renumbered 1..k in ascending
    original order so the result is a self-contained circuit computing
    the subfunction.  Gates are untouched.
    """
    if not is_formula(formula):
        raise NotAFormulaError("restrict expects a formula")
    block = frozenset(int(j) for j in block)
    used = set(formula.variable_indices)
    outside = used - block
    missing = outside - set(rho)
    if missing:
        raise ValueError(f"restriction must assign every outside variable; missing {sorted(missing)}")
    bad = [v for v in rho if rho[v] not in (0, 1)]
    if bad:
        raise ValueError(f"restriction values must be bits; got {[(v, rho[v]) for v in bad]}")
    renumber = {old: i + 1 for i, old in enumerate(sorted(used & block))}
    labels = []
    for lb in formula.labels:
        if lb.var is None:
            labels.append(lb)
        elif lb.var in block:
            labels.append(variable(renumber[lb.var]))
        else:
            labels.append(constant(int(rho[lb.var])))
    return formula.relabel(labels)


# ---------------------------------------------------------------------------
# disjoint decomposition (lemma-style commuting split)


def decompose_disjoint(
    gates: Sequence[Gate], q1: Sequence[int], q2: Sequence[int]
) -> tuple[tuple[Gate, ...], tuple[Gate, ...]]:
    """Split a gate list into the gates on q1 and the gates on q2.

    Every gate must act wholly inside one of the two disjoint sets; the
    two returned lists keep their internal order and are re-stepped as
    standalone subcircuits.  Applying them in either order reproduces
    the original interleaved subcircuit on any input state.
    """
    s1, s2 = set(q1), set(q2)
    if s1 & s2:
        raise ValueError(f"qubit sets overlap: {sorted(s1 & s2)}")
    c1, c2 = [], []
    for gate in sorted(gates, key=lambda g: g.step):
        targets = set(gate.targets)
        if targets <= s1:
            c1.append(gate)
        elif targets <= s2:
            c2.append(gate)
        else:
            raise StructuralError(
                f"gate at step {gate.step} straddles the two qubit sets: {gate.targets}"
            )
    restep = lambda gs: tuple(
        Gate(step=i + 1, targets=g.targets, matrix=g.matrix) for i, g in enumerate(gs)
    )
    return restep(c1), restep(c2)


# ---------------------------------------------------------------------------
# gate postponement


def postpone(circuit: Circuit, q: int, r_list: Sequence[int]) -> Circuit:
    """Move the gates trailing each partner line r_j behind the chain on q.

    The chain is the gates touching ``q``; the j-th must act on exactly
    ``{q, r_list[j]}``.  Gates inside the chain's window that act on the
    forward cone of an already-consumed partner are relocated directly
    after the chain's last gate, preserving their relative order.  The
    move is rejected if a cone gate would feed the chain again (touching
    q, or a partner line before its own chain gate executes).
    """
    circuit.check()
    r_list = tuple(int(r) for r in r_list)
    chain = [g for g in sorted(circuit.gates, key=lambda g: g.step) if q in g.targets]
    if len(chain) != len(r_list):
        raise StructuralError(
            f"{len(chain)} gates act on qubit {q}, but {len(r_list)} partners were given"
        )
    for gate, r in zip(chain, r_list):
        if set(gate.targets) != {q, r}:
            raise StructuralError(
                f"gate at step {gate.step} acts on {gate.targets}, expected ({q}, {r})"
            )
    if len(chain) <= 1:
        return circuit

    last_step = chain[-1].step
    partner_of = {g.step: r for g, r in zip(chain, r_list)}
    pending = {r: g.step for g, r in zip(chain, r_list)}  # partner -> its chain step
    cone: set[int] = set()
    movable: list[Gate] = []
    movable_steps: set[int] = set()
    for gate in sorted(circuit.gates, key=lambda g: g.step):
        if not (chain[0].step <= gate.step <= last_step):
            continue
        targets = set(gate.targets)
        if q in targets:
            r = partner_of[gate.step]
            if r in cone:
                raise StructuralError(
                    f"partner line {r} is entangled with an earlier partner's cone "
                    f"before its chain gate at step {gate.step}"
                )
            pending.pop(r, None)
            cone.add(r)
            continue
        if targets & cone:
            late = targets & set(pending)
            if late:
                raise StructuralError(
                    f"gate at step {gate.step} links a consumed line to the future "
                    f"partner(s) {sorted(late)}"
                )
            movable.append(gate)
            movable_steps.add(gate.step)
            cone |= targets

    reordered = (
        [g for g in sorted(circuit.gates, key=lambda g: g.step)
         if g.step <= last_step and g.step not in movable_steps]
        + movable
        + [g for g in sorted(circuit.gates, key=lambda g: g.step) if g.step > last_step]
    )
    gates = tuple(
        Gate(step=i + 1, targets=g.targets, matrix=g.matrix)
        for i, g in enumerate(reordered)
    )
    return Circuit(
        num_qubits=circuit.num_qubits,
        labels=circuit.labels,
        gates=gates,
        output_qubit=circuit.output_qubit,
        arity_bound=circuit.arity_bound,
    )


# ---------------------------------------------------------------------------
# path squeezing


@dataclass(frozen=True)
class SqueezeRecord:
    """Everything extracted from one squeezable segment.

    ``vectors[a0, a1, c0, c1]`` is the companion-register state produced
    by running the companion preparation plus the segment's inner gates
    from head inputs |a0>|a1>, decomposed on the two head lines.
    ``basis`` spans those 16 vectors (rank 1..16) and ``coefficients``
    holds their expansion, indexed [a0, a1, c0, c1, j].  ``postponed``
    are the steps of gates on already-consumed lines inside the window;
    they cannot change any outcome norm and are dropped by the rewrite.
    """

    segment: PathSegment
    companions: CompanionSet
    companion_order: tuple[int, ...]
    vectors: np.ndarray
    basis: np.ndarray
    coefficients: np.ndarray
    rank: int
    prep_steps: tuple[int, ...]
    postponed_steps: tuple[int, ...]
    borderline_rank: bool

    @property
    def num_companions(self) -> int:
        return len(self.companion_order)


def _classify_window_gates(
    circuit: Circuit, segment: PathSegment, cs: CompanionSet
) -> tuple[list[Gate], list[Gate]]:
    """Split non-segment gates before the terminator into preparation
    gates (feeding companion lines not yet consumed) and postponable
    junk.

    A line is tainted once the path consumes it or a postponed gate
    touches it; any later gate on a tainted line is postponed as well,
    and must not reach a line the path still has to consume (its effect
    would then flow back into the path, which the record cannot
    represent).
    """
    inner = segment.inner_hops
    segment_steps = {h.step for h in segment.hops}
    consumed_at = {h.step: set(h.gate.targets) - {cs.q0} for h in inner}
    pool = set(cs.qubits) | {cs.q1}
    tainted: set[int] = set()
    preps: list[Gate] = []
    postponed: list[Gate] = []
    for gate in sorted(circuit.gates, key=lambda g: g.step):
        if gate.step >= cs.j1:
            break
        if gate.step in segment_steps:
            tainted |= consumed_at.get(gate.step, set())
            continue
        targets = set(gate.targets)
        if not targets & (pool | {cs.q0}):
            continue
        if cs.q0 in targets or (cs.q1 in targets and gate.step < cs.j0):
            if gate.step < cs.j0:
                continue  # history of the head inputs, summarized by the record's basis inputs
            raise StructuralError(
                f"gate at step {gate.step} touches the carrier line inside the segment"
            )
        if not targets <= pool:
            raise StructuralError(
                f"gate at step {gate.step} links companion lines to {sorted(targets - pool)}"
            )
        if targets & tainted:
            future = set().union(
                *(consumed_at[h.step] for h in inner if h.step > gate.step)
            ) - tainted
            if targets & future:
                raise StructuralError(
                    f"gate at step {gate.step} links a consumed line to the future "
                    f"partner(s) {sorted(targets & future)}"
                )
            postponed.append(gate)
            tainted |= targets
        else:
            preps.append(gate)
    return preps, postponed


def squeeze_path(
    circuit: Circuit,
    pathset: PathSet,
    segment: PathSegment,
    companions_info: CompanionSet | None = None,
    *,
    rank_tol: float = 1e-9,
) -> SqueezeRecord:
    """Simulate a segment's action and factor it over an orthonormal
    basis of the companion register.

    Runs the companion preparation plus the segment's inner gates from
    each of the four basis inputs on the two head lines (companion lines
    start at their constant labels), splits the results on the head
    lines, and orthonormalizes the 16 companion vectors.  The expansion
    is verified to reconstruct the vectors within 1e-10 and to be an
    isometry on the four inputs.
    """
    cs = companions_info or companion_set_of_path(circuit, pathset, segment)
    if not segment.squeezable:
        raise StructuralError("segment has no gates strictly inside; nothing to squeeze")
    for c in cs.qubits:
        if circuit.labels[c].is_variable:
            raise StructuralError(f"companion line {c} is not a constant input")
    preps, postponed = _classify_window_gates(circuit, segment, cs)

    order = tuple(sorted(cs.qubits))
    v = len(order)
    local = {cs.q0: 0, cs.q1: 1, **{c: i + 2 for i, c in enumerate(order)}}
    width = 2 + v
    sim_gates = sorted(
        list(preps) + [h.gate for h in segment.inner_hops], key=lambda g: g.step
    )
    const_bits = tuple(circuit.labels[c].const for c in order)

    vectors = np.empty((2, 2, 2, 2, 2 ** v), dtype=complex)
    for a0 in (0, 1):
        for a1 in (0, 1):
            index = (a0 << (width - 1)) | (a1 << (width - 2))
            for i, bit in enumerate(const_bits):
                index |= bit << (width - 3 - i)
            state = np.zeros(2 ** width, dtype=complex)
            state[index] = 1.0
            for gate in sim_gates:
                mapped = Gate(
                    step=gate.step,
                    targets=tuple(local[t] for t in gate.targets),
                    matrix=gate.matrix,
                )
                state = apply_gate(state, mapped, width)
            vectors[a0, a1] = state.reshape(2, 2, 2 ** v)

    flat = vectors.reshape(16, 2 ** v)
    basis_list, rank = orthonormalize(list(flat), tol=rank_tol)
    if not 1 <= rank <= 16:
        raise NumericalError(f"companion basis rank {rank} outside 1..16")
    basis = np.array(basis_list)
    coeffs = expansion_coefficients(basis_list, list(flat)).T.reshape(2, 2, 2, 2, rank)

    rebuilt = np.tensordot(coeffs, basis, axes=([4], [0]))
    residual = float(np.max(np.abs(rebuilt - vectors)))
    if residual > RECONSTRUCTION_TOL:
        raise NumericalError(f"basis reconstruction residual {residual:.3e}")
    weights = np.sum(np.abs(coeffs) ** 2, axis=(2, 3, 4))
    if float(np.max(np.abs(weights - 1.0))) > RECONSTRUCTION_TOL:
        raise NumericalError("expansion is not an isometry on the head inputs")

    sing = np.linalg.svd(flat, compute_uv=False)
    threshold = rank_tol * (sing[0] if sing.size else 1.0)
    borderline = bool(np.any((sing > threshold / 10) & (sing < threshold * 10)))

    return SqueezeRecord(
        segment=segment,
        companions=cs,
        companion_order=order,
        vectors=vectors,
        basis=basis,
        coefficients=coeffs,
        rank=rank,
        prep_steps=tuple(g.step for g in preps),
        postponed_steps=tuple(g.step for g in postponed),
        borderline_rank=borderline,
    )


def build_composite_gate(
    record: SqueezeRecord,
    *,
    step: int = 1,
    targets: Sequence[int] | None = None,
    candidate_order: Sequence[int] | None = None,
) -> Gate:
    """Turn a squeeze record into one six-qubit gate.

    The four columns indexed |a0 a1 0000> map to
    sum_{c0 c1 j} coeff[a0,a1,c0,c1,j] |c0 c1>|j>, with the basis index
    j written in binary on the four fresh qubits.  The 60 unspecified
    columns are completed deterministically by projecting standard
    basis vectors against the columns placed so far (``candidate_order``
    picks the probe order; any valid completion yields the same
    acceptance probabilities because those columns are never excited).
    """
    dim = 2 ** COMPOSITE_ARITY
    u = np.zeros((dim, dim), dtype=complex)
    specified = []
    for a0 in (0, 1):
        for a1 in (0, 1):
            col = np.zeros(dim, dtype=complex)
            for c0 in (0, 1):
                for c1 in (0, 1):
                    base = (c0 << 5) | (c1 << 4)
                    col[base : base + record.rank] = record.coefficients[a0, a1, c0, c1]
            index = (a0 << 5) | (a1 << 4)
            u[:, index] = col
            specified.append(index)

    gram = u[:, specified].conj().T @ u[:, specified]
    if float(np.max(np.abs(gram - np.eye(4)))) > ISOMETRY_TOL:
        raise NumericalError("coefficient columns fail the isometry check")

    placed = [u[:, i] for i in specified]
    free_slots = [i for i in range(dim) if i not in specified]
    probes = list(candidate_order) if candidate_order is not None else list(range(dim))
    slot = 0
    for k in probes:
        if slot >= len(free_slots):
            break
        w = np.zeros(dim, dtype=complex)
        w[k] = 1.0
        for _ in range(2):
            for b in placed:
                w -= np.vdot(b, w) * b
        norm = float(np.linalg.norm(w))
        if norm < 1e-6:
            continue
        w /= norm
        u[:, free_slots[slot]] = w
        placed.append(w)
        slot += 1
    if slot != len(free_slots):
        raise NumericalError("unitary completion ran out of independent directions")
    deviation = float(np.max(np.abs(u.conj().T @ u - np.eye(dim))))
    if deviation > 1e-10:
        raise NumericalError(f"completed gate deviates from unitarity by {deviation:.3e}")

    if targets is None:
        targets = tuple(range(COMPOSITE_ARITY))
    return Gate(step=step, targets=tuple(targets), matrix=u)


@dataclass(frozen=True)
class SqueezedCircuit:
    """The compressed circuit plus bookkeeping for every rewrite step."""

    circuit: Circuit
    block: frozenset[int]
    s_j: int
    records: tuple[SqueezeRecord, ...]
    composite_steps: tuple[int, ...]
    skipped_segments: tuple[PathSegment, ...]
    qubit_map: tuple[tuple[int, int], ...]  # (old line, new line) for kept lines
    pruned_steps: tuple[int, ...]
    max_deviation: float | None

    @property
    def gate_count(self) -> int:
        return len(self.circuit.gates)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(r.rank for r in self.records)


def squeeze_all(
    f_rho: Circuit,
    block=None,
    *,
    rank_tol: float = 1e-9,
    verify: bool = True,
    tol: float = SQUEEZE_TOL,
) -> SqueezedCircuit:
    """Squeeze every eligible segment of the block's paths.

    Segments are processed in the natural order (last gate ascending).
    For each squeezed segment the companion lines are removed and four
    fresh |0> lines appear at the end of the qubit list; segments with
    no companions or with nothing strictly inside keep their original
    gates.  Gates outside the computation graph never influence the
    output line and are pruned.  With ``verify`` the acceptance
    probabilities of input and output circuits are compared on every
    block assignment and a deviation beyond ``tol`` raises.
    """
    f_rho.check()
    if block is None:
        block = set(f_rho.variable_indices)
    block = frozenset(int(j) for j in block)
    pathset = path_sets(f_rho, block)
    segments = path_segments(f_rho, pathset)
    graph = computation_graph(f_rho)
    live_steps = set(graph.gate_steps)
    pruned = tuple(g.step for g in f_rho.gates if g.step not in live_steps)

    records: list[SqueezeRecord] = []
    skipped: list[PathSegment] = []
    for segment in segments:
        if not segment.squeezable:
            skipped.append(segment)
            continue
        cs = companion_set_of_path(f_rho, pathset, segment)
        if cs.size == 0:
            skipped.append(segment)
            continue
        records.append(squeeze_path(f_rho, pathset, segment, cs, rank_tol=rank_tol))

    used: set[int] = set()
    for rec in records:
        mine = set(rec.companions.qubits)
        if mine & used:
            raise StructuralError(
                f"companion sets of two segments overlap on lines {sorted(mine & used)}"
            )
        used |= mine
    removed_lines = used
    deleted_steps: set[int] = set(pruned)
    for rec in records:
        deleted_steps.update(h.step for h in rec.segment.inner_hops)
        deleted_steps.update(rec.prep_steps)
        deleted_steps.update(rec.postponed_steps)

    kept_lines = [q for q in range(f_rho.num_qubits) if q not in removed_lines]
    line_map = {old: new for new, old in enumerate(kept_lines)}
    labels: list[InputLabel] = [f_rho.labels[q] for q in kept_lines]
    entries: list[tuple[int, tuple[int, ...], np.ndarray]] = []
    for gate in f_rho.gates:
        if gate.step in deleted_steps:
            continue
        entries.append(
            (gate.step, tuple(line_map[t] for t in gate.targets), gate.matrix)
        )
    composite_keys: list[int] = []
    for rec in records:
        fresh_base = len(kept_lines) + FRESH_QUBITS * len(composite_keys)
        targets = (
            line_map[rec.companions.q0],
            line_map[rec.companions.q1],
            *range(fresh_base, fresh_base + FRESH_QUBITS),
        )
        gate = build_composite_gate(rec, targets=targets)
        entries.append((rec.companions.j0, gate.targets, gate.matrix))
        labels.extend(constant(0) for _ in range(FRESH_QUBITS))
        composite_keys.append(rec.companions.j0)

    entries.sort(key=lambda e: e[0])
    gates = tuple(
        Gate(step=i + 1, targets=t, matrix=m) for i, (_, t, m) in enumerate(entries)
    )
    key_to_step = {key: i + 1 for i, (key, _, _) in enumerate(entries)}
    arity = max([f_rho.arity_bound] + [COMPOSITE_ARITY] * (1 if records else 0))
    circuit = Circuit(
        num_qubits=len(labels),
        labels=tuple(labels),
        gates=gates,
        output_qubit=line_map[f_rho.output_qubit],
        arity_bound=arity,
    )
    circuit.check()

    result = SqueezedCircuit(
        circuit=circuit,
        block=block,
        s_j=pathset.s_j,
        records=tuple(records),
        composite_steps=tuple(key_to_step[k] for k in composite_keys),
        skipped_segments=tuple(skipped),
        qubit_map=tuple((old, line_map[old]) for old in kept_lines),
        pruned_steps=pruned,
        max_deviation=None,
    )
    if verify:
        deviation = verify_squeeze(f_rho, circuit, tol=tol)
        result = replace(result, max_deviation=deviation)
    return result


def verify_squeeze(original: Circuit, squeezed: Circuit, *, tol: float = SQUEEZE_TOL) -> float:
    """Max |p_alpha difference| over all assignments; raises beyond tol."""
    p_orig = probability_vector(original)
    p_new = probability_vector(squeezed)
    if p_orig.shape != p_new.shape:
        raise VerificationError(
            f"variable counts differ: {original.num_variables} vs {squeezed.num_variables}"
        )
    deviation = float(np.max(np.abs(p_orig - p_new))) if p_orig.size else 0.0
    if deviation > tol:
        raise VerificationError(
            f"acceptance probability deviates by {deviation:.3e} (tolerance {tol:.1e})"
        )
    return deviation
