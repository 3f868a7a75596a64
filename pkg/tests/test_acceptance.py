"""Acceptance criteria, one test per criterion, each reporting a PASS/FAIL line."""

from __future__ import annotations

import functools
import itertools
import time
import warnings

import numpy as np

from hgpdefects.defect import apply_puncture, check_correctable, make_puncture, puncture_stabilizers
from hgpdefects.f2core import matmul, rank, row_space_contains, transpose, vstack
from hgpdefects.fgraph import NodeSet, repetition_code
from hgpdefects.hgp import build, logical_count, parameters
from hgpdefects.pauli import commutation_violations, ops_matrix
from hgpdefects.trace import eulerian_traceable, is_closed_walk, move_point_puncture
from hgpdefects.wormhole import apply_wormhole, wormhole_logical_operators

from conftest import crossing, random_check_matrix, random_subsets
from test_deform import GOOD, BAD, _grow_shrink, base_state, check_nonmixing, compose, move, same_group, two_puncture_state
from test_trace import LOOP20, has_circuit

RESULTS: dict[int, tuple[str, bool, str]] = {}

# (length, S, T) wormhole fixtures on repetition codes, all with at least one type-1 loop
WORMHOLES = [(9, (1, 2), (5, 6)), (7, (1,), (4,)), (8, (1, 2), (5,))]
# smooth and rough punctures on repetition codes: (length, S, T)
PUNCTURES = [(5, (2, 3), (1, 2)), (5, (2,), (1, 2)), (6, (2, 3), (1, 3)), (7, (2, 3, 4), (2, 3))]


def criterion(num: int, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs) or ""
            except AssertionError as exc:
                RESULTS[num] = (title, False, str(exc).splitlines()[0] if str(exc) else "assertion failed")
                raise
            RESULTS[num] = (title, True, detail)

        return run

    return wrap


def report_lines() -> list[str]:
    return [
        f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
        for num, (title, ok, detail) in sorted(RESULTS.items())
    ]


def _quiet(fn, *args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fn(*args, **kwargs)


def _random_correctable(seed: int, need: int, kinds=("smooth", "rough"), tries: int = 20000):
    rng = np.random.default_rng(seed)
    out = []
    for trial in range(tries):
        m, n = int(rng.integers(2, 8)), int(rng.integers(3, 10))
        code = build(random_check_matrix(rng, m, n))
        S, T = random_subsets(rng, n, m)
        spec = _quiet(make_puncture, code, kinds[trial % len(kinds)], S, T)
        if check_correctable(code, spec).correctable:
            out.append((code, spec))
            if len(out) == need:
                break
    return out


@criterion(1, "parameter reproduction")
def test_criterion_01_parameters():
    t = time.perf_counter()
    assert parameters(build(repetition_code(3))) == (13, 1, 3)
    p = parameters(build(repetition_code(5)), distance_budget=5)
    assert p == (41, 1, 5), p
    elapsed = time.perf_counter() - t
    assert elapsed < 5, f"took {elapsed:.2f} s"
    return f"{elapsed:.2f} s"


@criterion(2, "fixture fidelity")
def test_criterion_02_fixture(rep5):
    spec = make_puncture(rep5, "smooth", [2, 3], [1, 2])
    # 1-based M={2,3,4}, B={3} over variables and N={b,c,d}, A={c} over checks
    assert spec.M == NodeSet("var", (1, 2, 3))
    assert spec.B == NodeSet("var", (2,))
    assert spec.N == NodeSet("check", (1, 2, 3))
    assert spec.A == NodeSet("check", (2,))
    from hgpdefects.defect import restrict_checks, restrict_vars

    assert restrict_checks(rep5.h, [1, 2]).to_dense().tolist() == [[0] * 5, [0, 1, 1, 0, 0], [0, 0, 1, 1, 0], [0] * 5]
    assert restrict_vars(rep5.h, [2, 3]).to_dense().tolist() == [[0] * 5, [0, 0, 1, 0, 0], [0, 0, 1, 1, 0], [0, 0, 0, 1, 0]]


@criterion(3, "CSS validity")
def test_criterion_03_css_validity():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        m, n = int(rng.integers(1, 13)), int(rng.integers(2, 17))
        code = build(random_check_matrix(rng, m, n, 4))
        assert matmul(code.hx, transpose(code.hz)).is_zero()
    found = _random_correctable(31, 25)
    assert len(found) == 25
    for code, spec in found:
        d = apply_puncture(code, spec)
        assert matmul(d.sx, transpose(d.sz)).is_zero()
    return "100 codes, 25 punctures"


@criterion(4, "correctability implication")
def test_criterion_04_implication():
    rng = np.random.default_rng(404)
    correctable = 0
    for trial in range(200):
        m, n = int(rng.integers(2, 8)), int(rng.integers(3, 10))
        code = build(random_check_matrix(rng, m, n))
        S, T = random_subsets(rng, n, m)
        spec = _quiet(make_puncture, code, ("smooth", "rough")[trial % 2], S, T)
        rep = check_correctable(code, spec)
        if all(c.passed for c in rep.primary()):
            correctable += 1
            assert all(c.passed for c in rep.implied()), (S, T)
    return f"{correctable} of 200 correctable"


def _fixture_codes():
    for length in (3, 5, 7):
        code = build(repetition_code(length))
        yield "base", code, apply_puncture(code, None), logical_count(code)
    for length, S, T in PUNCTURES:
        code = build(repetition_code(length))
        for kind in ("smooth", "rough"):
            spec = _quiet(make_puncture, code, kind, S, T)
            d = apply_puncture(code, spec)
            loops = d.new_logical_z if kind == "smooth" else d.new_logical_x
            yield kind, code, d, logical_count(code) + loops.rows


@criterion(5, "logical-count consistency")
def test_criterion_05_counts():
    checked = 0
    for _, _, d, expected in _fixture_codes():
        # X and Z generators act on disjoint halves of the symplectic space
        assert len(d.live_qubits) - rank(d.live(d.sx)) - rank(d.live(d.sz)) == expected
        checked += 1
    for length, S, T in WORMHOLES + [(9, (1, 2, 3), (5, 6, 7)), (7, (1, 2), (4, 5))]:
        code = build(repetition_code(length))
        wh = apply_wormhole(code, S, T)
        logs = wormhole_logical_operators(code, wh)
        assert len(wh.live_qubits) - rank(wh.generator_matrix()) == logical_count(code) + logs.count
        checked += 1
    return f"{checked} codes"


@criterion(6, "independence oracles")
def test_criterion_06_independence():
    cases = []
    for length, S, T in PUNCTURES:
        code = build(repetition_code(length))
        cases += [(code, _quiet(make_puncture, code, kind, S, T)) for kind in ("smooth", "rough")]
    cases += _random_correctable(61, 150)
    rank_fail, span_fail, crossed = 0, 0, 0
    for code, spec in cases:
        d = apply_puncture(code, spec)
        hxp, hzp = puncture_stabilizers(code, spec)
        if spec.kind == "smooth":
            kept, inner, chains, span = d.sz, hzp, d.new_logical_x, d.sx
        else:
            kept, inner, chains, span = d.sx, hxp, d.new_logical_z, d.sz
        additive = rank(vstack([kept, inner])) == rank(kept) + rank(inner)
        chains_new = not any(row_space_contains(span, r) for r in chains.to_dense())
        rank_fail += not additive
        span_fail += not chains_new
        crossed += (not additive or not chains_new) and crossing(code.h, spec.S, spec.T)
    assert rank_fail == span_fail == 0, (
        f"{len(cases)} correctable punctures: rank additivity fails {rank_fail}, "
        f"chain rows in stabilizer span {span_fail}, failures with crossing codewords {crossed}"
    )
    return f"{len(cases)} punctures"


@criterion(7, "wormhole commutation closure")
def test_criterion_07_wormhole_closure():
    for length, S, T in WORMHOLES:
        code = build(repetition_code(length))
        wh = apply_wormhole(code, S, T)
        assert commutation_violations(wh.generators) == []
        sp = wh.spec
        assert len(sp.hybrids) == len(sp.M) * len(sp.N) - len(sp.B) * len(sp.A)
        base = max(int(r.sum()) for r in np.vstack([code.hx.to_dense(), code.hz.to_dense()]))
        assert wh.max_weight() <= 2 * base
    return f"{len(WORMHOLES)} fixtures"


@criterion(8, "loop equivalence witness")
def test_criterion_08_witness():
    total = 0
    for length, S, T in WORMHOLES:
        code = build(repetition_code(length))
        wh = apply_wormhole(code, S, T)
        logs = wormhole_logical_operators(code, wh)
        lo, hi = wh.blocks["hybrid"][0], wh.blocks["measurement"][1]
        rows = ops_matrix(wh.generators[lo:hi]).to_dense().astype(int)
        for z, x, w in zip(logs.type1_loops, logs.type1_x_partners, logs.type1_witnesses):
            assert w is not None
            assert np.array_equal((w.astype(int) @ rows) % 2, (z * x).vector())
            total += 1
    assert total >= len(WORMHOLES)
    return f"{total} of {total} loops"


@criterion(9, "deformation round trip and nonmixing")
def test_criterion_09_round_trip(rep5):
    start = base_state(rep5)
    end, steps = _grow_shrink(rep5)
    assert np.array_equal(compose(steps).to_dense(), np.eye(2, dtype=np.uint8))
    assert same_group(end.stabilizer_matrix(), start.stabilizer_matrix())
    state, p1 = two_puncture_state(rep5)
    assert state.labels == [GOOD, GOOD, BAD]
    _, braid = move(rep5, state, [p1, (2, 1), (2, 0), (1, 0), p1])
    labels = [lbl for lbl in state.labels for _ in range(2)]
    q = compose([s for s, _, _ in braid])
    assert check_nonmixing(q, labels, labels)["nonmixing"]
    assert all(check_nonmixing(s.logical_block, r, c)["nonmixing"] for s, r, c in braid)


@criterion(10, "Eulerian oracle equivalence")
def test_criterion_10_eulerian():
    t = time.perf_counter()
    # five vertices, self-loops allowed
    kinds = [(a, b) for a in range(5) for b in range(a, 5)]
    cases = 0
    for m in range(0, 7):
        for edges in itertools.combinations_with_replacement(kinds, m):
            edges = list(edges)
            r = eulerian_traceable(edges)
            assert r["traceable"] == has_circuit(edges), edges
            if r["traceable"]:
                assert is_closed_walk(edges, r["cycle"]), edges
            cases += 1
    elapsed = time.perf_counter() - t
    assert elapsed < 60, f"took {elapsed:.1f} s"
    return f"{cases} multigraphs, {elapsed:.1f} s"


@criterion(11, "point-puncture step law")
def test_criterion_11_step_law(rep5):
    tr = move_point_puncture(rep5, LOOP20)
    assert len(tr.steps) == 20
    limit = int(rep5.h.to_dense().sum(axis=1).max()) - 1
    prev: set[int] = set()
    for s in tr.steps:
        cur = set(s.beta_support)
        assert prev < cur and len(cur - prev) == 1, s.position
        assert len(s.frustrated) <= limit, s.position
        prev = cur
    return f"max frustrated {tr.max_frustrated()} <= {limit}"


if __name__ == "__main__":
    import sys

    import pytest

    code = pytest.main([__file__, "-q"])
    sys.exit(code)
