from __future__ import annotations

import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from hgpdefects.f2core import BitMatrix, kernel_basis, left_kernel_basis
from hgpdefects.fgraph import repetition_code
from hgpdefects.hgp import build


def random_check_matrix(rng: np.random.Generator, m: int, n: int, max_weight: int = 4) -> BitMatrix:
    """Sparse checks with row weight between 2 and ``max_weight``."""
    d = np.zeros((m, n), np.uint8)
    for i in range(m):
        w = min(n, int(rng.integers(2, max_weight + 1)))
        d[i, rng.choice(n, w, replace=False)] = 1
    return BitMatrix.from_dense(d)


def random_subsets(rng: np.random.Generator, n: int, m: int) -> tuple[list[int], list[int]]:
    S = sorted(rng.choice(n, int(rng.integers(1, n)), replace=False).tolist())
    T = sorted(rng.choice(m, int(rng.integers(1, m + 1)), replace=False).tolist())
    return S, T


def crossing(h: BitMatrix, S, T) -> bool:
    """Some codeword of ker h touches S and some codeword of ker h^t touches T."""
    k = kernel_basis(h).to_dense()
    kt = left_kernel_basis(h).to_dense()
    x = bool(len(k) and k[:, list(S)].any())
    y = bool(len(kt) and kt[:, list(T)].any())
    return x and y


@st.composite
def bit_matrices(draw, max_rows: int = 8, max_cols: int = 8, min_rows: int = 1, min_cols: int = 1):
    r = draw(st.integers(min_rows, max_rows))
    c = draw(st.integers(min_cols, max_cols))
    bits = draw(st.lists(st.integers(0, 1), min_size=r * c, max_size=r * c))
    return BitMatrix.from_dense(np.array(bits, np.uint8).reshape(r, c), c)


@pytest.fixture(scope="session")
def rep3():
    return build(repetition_code(3))


@pytest.fixture(scope="session")
def rep5():
    return build(repetition_code(5))


@pytest.fixture(scope="session")
def rep7():
    return build(repetition_code(7))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
