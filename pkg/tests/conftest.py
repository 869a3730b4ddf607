import numpy as np
import pytest

from ossnls.problems import Problem


def affine_problem(A, b, C=None, d=None, name="affine"):
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    if C is None:
        C, d = np.zeros((0, n)), np.zeros(0)
    C = np.asarray(C, dtype=float)
    d = np.asarray(d, dtype=float)
    return Problem(name, n, A.shape[0], C.shape[0], np.zeros(n),
                   lambda x: A @ x + b, lambda x: C @ x + d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def report(criterion, passed, detail):
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
