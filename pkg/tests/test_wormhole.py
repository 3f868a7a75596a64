from __future__ import annotations

import warnings

import numpy as np
import pytest

from hgpdefects.f2core import left_kernel_basis, rank
from hgpdefects.fgraph import repetition_code
from hgpdefects.hgp import build, logical_count
from hgpdefects.pauli import SymplecticOp, commutation_violations, ops_matrix, symplectic_product
from hgpdefects.wormhole import (
    WormholeError,
    apply_wormhole,
    check_extended_correctable,
    make_wormhole_spec,
    measurement_ops,
    two_qubit_measurements,
    wormhole_logical_operators,
    wormhole_report,
)

from conftest import random_check_matrix

# (repetition length, S, T) -> (measurement pairs, hybrids, logical qubits, type-1 loops, type-2 loops)
FIXTURES = {
    (9, (1, 2), (5, 6)): (8, 8, 3, 1, 1),
    (7, (1,), (4,)): (4, 4, 3, 1, 1),
    (8, (1, 2), (5,)): (6, 6, 3, 1, 1),
    (9, (1, 2, 3), (5, 6, 7)): (9, 10, 2, 0, 1),
    (7, (1, 2), (4, 5)): (6, 7, 2, 0, 1),
}


@pytest.fixture(scope="module", params=sorted(FIXTURES))
def fixture(request):
    n, S, T = request.param
    code = build(repetition_code(n))
    wh = apply_wormhole(code, S, T)
    return request.param, code, wh, wormhole_logical_operators(code, wh)


def test_fixture_counts(fixture):
    key, code, wh, logs = fixture
    pairs, hybrids, k, t1, t2 = FIXTURES[key]
    spec = wh.spec
    assert len(spec.measurements) == pairs
    assert len(spec.measurements) == len(set(spec.N) - set(spec.A)) * len(spec.T) + len(spec.S) * len(
        set(spec.M) - set(spec.B)
    )
    assert len(spec.hybrids) == hybrids == len(spec.M) * len(spec.N) - len(spec.B) * len(spec.A)
    assert (len(logs.type1_loops), len(logs.type2_loops)) == (t1, t2)
    assert wh.logical_count() == k == logical_count(code) + logs.count


def test_generators_commute_and_stay_ldpc(fixture):
    _, code, wh, _ = fixture
    assert commutation_violations(wh.generators) == []
    base = max(int(r.sum()) for r in np.vstack([code.hx.to_dense(), code.hz.to_dense()]))
    assert wh.max_weight() <= 2 * base


def test_generators_avoid_measured_qubits(fixture):
    _, _, wh, _ = fixture
    for q, basis in wh.measured_out.items():
        for g in wh.generators:
            assert not (g.z if basis == "X" else g.x)[q]


def test_measurement_pairs_on_boundaries(fixture):
    _, code, wh, _ = fixture
    from hgpdefects.defect import make_puncture

    smooth = make_puncture(code, "smooth", wh.spec.S, wh.spec.T)
    rough = make_puncture(code, "rough", wh.spec.S, wh.spec.T)
    for xq, zq in wh.spec.measurements:
        assert xq != zq
        assert xq in rough.boundary_qubits
        assert zq in smooth.boundary_qubits


def test_hybrid_halves_frustrated_but_pair_commutes(fixture):
    _, code, wh, _ = fixture
    meas = measurement_ops(code, wh.spec)
    n = code.n_qubits
    some_frustrated = False
    for hyb in wh.spec.hybrids:
        x_half = SymplecticOp(hyb.x, np.zeros(n, np.uint8))
        if any(symplectic_product(x_half, m) for m in meas):
            some_frustrated = True
        assert all(symplectic_product(hyb, m) == 0 for m in meas)
    assert some_frustrated


def test_loop_witnesses(fixture):
    _, code, wh, logs = fixture
    assert all(w is not None for w in logs.type1_witnesses)
    assert all(w is not None for w in logs.type2_witnesses)
    lo, hi = wh.blocks["hybrid"][0], wh.blocks["measurement"][1]
    rows = ops_matrix(wh.generators[lo:hi]).to_dense().astype(int)
    for z, x, w in zip(logs.type1_loops, logs.type1_x_partners, logs.type1_witnesses):
        assert np.array_equal((w.astype(int) @ rows) % 2, (z * x).vector())


def test_type2_loops_avoid_measurement_qubits(fixture):
    _, _, wh, logs = fixture
    touched = {q for pair in wh.spec.measurements for q in pair}
    for op in logs.type2_loops:
        assert not set(op.support()) & touched


def test_chain_conjugates_pair_with_their_loop(fixture):
    _, _, wh, logs = fixture
    for i, c in enumerate(logs.chain_conjugates):
        assert all(symplectic_product(c, g) == 0 for g in wh.generators)
        assert [symplectic_product(c, l) for l in logs.type1_loops] == [int(j == i) for j in range(len(logs.type1_loops))]


def test_loops_are_logical(fixture):
    _, code, wh, logs = fixture
    gm = wh.generator_matrix(live_only=False)
    base_rank = rank(gm)
    for op in logs.type1_loops + logs.type2_loops:
        assert all(symplectic_product(op, g) == 0 for g in wh.generators)
        assert rank(ops_matrix(wh.generators + [op])) == base_rank + 1


def test_report_serializes(fixture):
    _, code, wh, logs = fixture
    rep = wormhole_report(code, wh, logs)
    assert rep["max_generator_weight"] == wh.max_weight()
    assert len(rep["hybrids"]) == len(wh.spec.hybrids)


def test_overlapping_neighbourhoods_fail_before_kernels():
    code = build(repetition_code(7))
    rep = check_extended_correctable(code, [2], [2])
    assert not rep.disjoint and not rep.passed and rep.conditions == []
    with pytest.raises(WormholeError):
        make_wormhole_spec(code, [2], [2])
    with pytest.raises(WormholeError):
        apply_wormhole(code, [2], [2])


def test_whole_graph_fails():
    code = build(repetition_code(5))
    assert not check_extended_correctable(code, range(5), range(4)).passed


def test_random_wormholes_commute():
    rng = np.random.default_rng(5)
    done = 0
    for _ in range(1500):
        m, n = int(rng.integers(3, 9)), int(rng.integers(4, 11))
        code = build(random_check_matrix(rng, m, n, 3))
        S = sorted(rng.choice(n, int(rng.integers(1, 3)), replace=False).tolist())
        T = sorted(rng.choice(m, int(rng.integers(1, 3)), replace=False).tolist())
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if not check_extended_correctable(code, S, T).passed:
                continue
            wh = apply_wormhole(code, S, T)
        assert not commutation_violations(wh.generators)
        logs = wormhole_logical_operators(code, wh)
        assert all(w is not None for w in logs.type1_witnesses)
        if wh.logical_count() != logical_count(code) + logs.count:
            # only codes with redundant checks show a count gap
            assert left_kernel_basis(code.h).rows > 0
        done += 1
    assert done >= 40


def test_two_qubit_measurement_formula():
    code = build(repetition_code(9))
    spec = make_wormhole_spec(code, [1, 2], [5, 6])
    assert two_qubit_measurements(code, spec) == spec.measurements
    assert len(spec.measurements) == 8
