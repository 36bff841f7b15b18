import itertools

import numpy as np
import pytest

_CRITERIA = []


@pytest.fixture
def report():
    """Record one acceptance line: ``report(number, name, passed, detail)``."""

    def record(number, name, passed, detail=""):
        _CRITERIA.append((number, name, bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_CRITERIA, key=lambda c: c[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:>2}: {name} -- {detail}")


def brute_force_svm(phi, y):
    """Hard-margin SVM by enumerating every active set (small n only).

    For each subset S, solve the equality system on S and keep the candidate
    with non-negative multipliers whose margins are all at least 1; among
    those the smallest-norm predictor is optimal.
    """
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.size
    Q = (y[:, None] * (phi @ phi.T)) * y[None, :]
    best = None
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            idx = list(subset)
            sub = Q[np.ix_(idx, idx)]
            try:
                g_s = np.linalg.solve(sub, np.ones(size))
            except np.linalg.LinAlgError:
                continue
            if np.any(g_s < -1e-12):
                continue
            g = np.zeros(n)
            g[idx] = g_s
            alpha = phi.T @ (y * g)
            if np.min(y * (phi @ alpha)) < 1 - 1e-9:
                continue
            if best is None or alpha @ alpha < best @ best - 1e-12:
                best = alpha
    return best
