from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hgpdefects.defect import apply_puncture, make_puncture
from hgpdefects.deform import (
    BAD,
    GOOD,
    DeformError,
    StabilizerState,
    check_nonmixing,
    compose,
    measure_round,
    partition_by_weight,
    release,
)
from hgpdefects.f2core import BitMatrix, matmul, rank, vstack
from hgpdefects.fgraph import repetition_code
from hgpdefects.hgp import build, embedded_logical_pairs
from hgpdefects.pauli import SymplecticOp, commutation_violations, css_matrix
from hgpdefects.trace import connecting_qubit


def base_state(code) -> StabilizerState:
    lx, lz = embedded_logical_pairs(code)
    return StabilizerState.from_css(code.hx, code.hz, lx, lz)


def x_on(n, *qs):
    return SymplecticOp.from_supports(n, qs)


def z_on(n, *qs):
    return SymplecticOp.from_supports(n, (), qs)


def z_stab(code, c, v):
    return SymplecticOp.z_type(code.hz.row(code.z_stab(c, v)))


def same_group(a: BitMatrix, b: BitMatrix) -> bool:
    return rank(a) == rank(b) == rank(vstack([a, b]))


def test_measuring_a_stabilizer_is_identity(rep3):
    state = base_state(rep3)
    new, step = measure_round(state, [z_stab(rep3, 0, 0)])
    assert step.record[0]["case"] == "already in group"
    assert np.array_equal(step.logical_block.to_dense(), np.eye(2, dtype=np.uint8))
    assert same_group(new.stabilizer_matrix(), state.stabilizer_matrix())


def test_anticommuting_round_rejected(rep3):
    with pytest.raises(DeformError):
        measure_round(base_state(rep3), [x_on(13, 4), z_on(13, 4)])


def test_single_z_matches_rough_puncture(rep3):
    spec = make_puncture(rep3, "rough", [0], [0])
    assert spec.interior_qubits == (0,)
    new, step = measure_round(base_state(rep3), [z_on(13, 0)])
    d = apply_puncture(rep3, spec)
    ref = vstack([css_matrix(d.sx, d.sz, 13), css_matrix(None, BitMatrix.from_supports([[0]], 13), 13)])
    assert same_group(new.stabilizer_matrix(), ref)
    # a corner qubit touches a single X stabilizer, so no logical is created
    assert step.promoted == [] and len(new.logicals) == 1


def test_single_z_on_shared_qubit_promotes_product(rep3):
    q = rep3.cc(1, 0)
    x_rows = [r for r in range(rep3.hx.rows) if rep3.hx.row(r)[q]]
    assert len(x_rows) == 2
    merged = SymplecticOp.x_type(rep3.hx.row(x_rows[0]) ^ rep3.hx.row(x_rows[1]))
    kept, _ = measure_round(base_state(rep3), [z_on(13, q)], promote=False)
    assert kept.in_stabilizer_group(merged) and len(kept.logicals) == 1
    new, step = measure_round(base_state(rep3), [z_on(13, q)])
    assert step.promoted == [merged]
    assert not new.in_stabilizer_group(merged)
    assert new.logicals[-1][0] == merged and len(new.logicals) == 2


def test_redundant_checks_give_non_qubit():
    # cyclic repetition code: the checks sum to zero, so the lattice has no boundary
    d = np.zeros((4, 4), np.uint8)
    for i in range(4):
        d[i, i] = d[i, (i + 1) % 4] = 1
    code = build(BitMatrix.from_dense(d))
    state = base_state(code)
    spec = make_puncture(code, "smooth", [1, 2], [1, 2])
    new, step = measure_round(state, [x_on(code.n_qubits, q) for q in spec.interior_qubits])
    assert step.promoted == []
    assert len(step.non_qubit) == 1
    assert len(new.logicals) == len(state.logicals)
    assert any("non_qubit" in r for r in step.record)


def _grow_shrink(code):
    n = code.n_qubits
    p1 = make_puncture(code, "smooth", [2], [1, 2])
    p2 = make_puncture(code, "smooth", [2, 3], [1, 2])
    rounds = [
        [x_on(n, q) for q in p1.interior_qubits],
        [x_on(n, q) for q in p2.interior_qubits if q not in p1.interior_qubits],
        [z_stab(code, c, 3) for c in (1, 2)],
        [z_stab(code, c, 2) for c in (1, 2)],
    ]
    state = base_state(code)
    steps = []
    for r in rounds:
        state, step = measure_round(state, r)
        steps.append(step)
    return state, steps


def test_round_trip_composes_to_identity(rep5):
    start = base_state(rep5)
    end, steps = _grow_shrink(rep5)
    q = compose(steps)
    assert np.array_equal(q.to_dense(), np.eye(2, dtype=np.uint8))
    assert same_group(end.stabilizer_matrix(), start.stabilizer_matrix())
    assert [len(s.promoted) for s in steps] == [1, 0, 0, 0]


def test_grown_puncture_matches_direct_construction(rep5):
    state = base_state(rep5)
    p2 = make_puncture(rep5, "smooth", [2, 3], [1, 2])
    n = rep5.n_qubits
    new, _ = measure_round(state, [x_on(n, q) for q in p2.interior_qubits])
    d = apply_puncture(rep5, p2)
    ref = vstack([css_matrix(d.sx, d.sz, n), css_matrix(BitMatrix.from_supports([[q] for q in p2.interior_qubits], n), None, n)])
    assert same_group(new.stabilizer_matrix(), ref)


def test_compose_rejects_mismatch(rep5):
    _, steps = _grow_shrink(rep5)
    with pytest.raises(DeformError):
        compose([steps[0], _fake_step(3)])
    with pytest.raises(DeformError):
        compose([])


def _fake_step(k):
    class S:
        logical_block = BitMatrix.identity(k)

    return S()


def test_deterministic_records(rep5):
    _, a = _grow_shrink(rep5)
    _, b = _grow_shrink(rep5)
    assert [s.to_json() for s in a] == [s.to_json() for s in b]


def test_check_nonmixing_blocks():
    q = BitMatrix.from_dense(np.eye(4, dtype=np.uint8))
    labels = [GOOD, GOOD, BAD, BAD]
    assert check_nonmixing(q, labels) == {"nonmixing": True, "small": True}
    d = np.eye(4, dtype=np.uint8)
    d[0, 2] = 1
    assert check_nonmixing(BitMatrix.from_dense(d), labels)["nonmixing"] is False
    d = np.eye(4, dtype=np.uint8)
    d[1, 1] = 0
    assert check_nonmixing(BitMatrix.from_dense(d), labels)["small"] is False


def two_puncture_state(code):
    """Two point punctures encoding one good qubit and one low-weight gauge qubit."""
    n = code.n_qubits
    nx = code.hx.rows
    p1, p2 = (1, 1), (1, 3)
    state = base_state(code)
    state, _ = release(state, [nx + code.z_stab(*p1), nx + code.z_stab(*p2)], kind="X")
    chain_a = x_on(n, code.cc(1, 1), code.cc(1, 2))
    x_bar = x_on(n, code.vv(1, 1), code.vv(0, 1))
    pairs = [state.logicals[0], (x_bar, z_stab(code, *p1) * z_stab(code, *p2)), (chain_a, z_stab(code, *p2))]
    # threshold 4 lies between the gauge chain (weight 2) and the encircling loop (weight 8)
    return state.with_logicals(pairs, partition_by_weight(pairs, 4)), p1


def move(code, state, path):
    n = code.n_qubits
    steps = []
    for a, b in zip(path, path[1:]):
        q = connecting_qubit(code, a, b)
        for meas in ([x_on(n, q)], [z_stab(code, *a)]):
            cols = [lbl for lbl in state.labels for _ in range(2)]
            state, step = measure_round(state, meas)
            rows = [lbl for lbl in state.labels for _ in range(2)]
            steps.append((step, rows, cols))
    return state, steps


def test_braid_avoiding_gauge_chain_is_nonmixing(rep5):
    state, p1 = two_puncture_state(rep5)
    assert state.labels == [GOOD, GOOD, BAD]
    end, steps = move(rep5, state, [p1, (2, 1), (2, 0), (1, 0), p1])
    for step, rows, cols in steps:
        assert check_nonmixing(step.logical_block, rows, cols) == {"nonmixing": True, "small": True}
    q = compose([s for s, _, _ in steps])
    labels = [lbl for lbl in state.labels for _ in range(2)]
    assert check_nonmixing(q, labels, labels)["nonmixing"]
    assert np.array_equal(q.to_dense(), np.eye(6, dtype=np.uint8))


def test_closing_a_puncture_mixes(rep5):
    state, p1 = two_puncture_state(rep5)
    new, step = measure_round(state, [z_stab(rep5, *p1)])
    rows = [lbl for lbl in new.labels for _ in range(2)]
    cols = [lbl for lbl in state.labels for _ in range(2)]
    assert check_nonmixing(step.logical_block, rows, cols)["nonmixing"] is False
    assert len(step.demoted) == 1


def test_release_creates_pairs(rep5):
    state = base_state(rep5)
    nx = rep5.hx.rows
    new, promoted = release(state, [nx + rep5.z_stab(0, 0)], kind="X")
    assert len(promoted) == 1 and len(new.logicals) == 2
    assert not new.logicals[-1][1].z.any()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("XZ"), st.integers(0, 12)), min_size=1, max_size=6), st.booleans())
def test_random_single_qubit_rounds_keep_invariants(seq, promote):
    code = build(repetition_code(3))
    state = base_state(code)
    for kind, q in seq:
        op = x_on(13, q) if kind == "X" else z_on(13, q)
        before = rank(state.stabilizer_matrix()) + len(state.logicals)
        state, step = measure_round(state, [op], promote=promote)
        state.validate()
        assert not commutation_violations(state.stabilizers)
        assert rank(state.stabilizer_matrix()) + len(state.logicals) == 13
        assert before == 13
        assert step.q_matrix.rows == 2 * len(state.logicals)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("XZ"), st.integers(0, 12)), min_size=3, max_size=3))
def test_composition_is_associative(seq):
    code = build(repetition_code(3))
    state = base_state(code)
    steps = []
    for kind, q in seq:
        op = x_on(13, q) if kind == "X" else z_on(13, q)
        state, step = measure_round(state, [op])
        steps.append(step)
    a, b, c = (s.logical_block for s in steps)
    if a.rows == b.cols and b.rows == c.cols:
        assert matmul(c, matmul(b, a)) == matmul(matmul(c, b), a) == compose(steps)
