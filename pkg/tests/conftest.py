import numpy as np
import pytest

from heatstab import DomainSpec


@pytest.fixture
def half_interval():
    """1D, L=1, actuation on (0, 1/2)."""
    return DomainSpec.box([1.0], [(0.0, 0.5)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def sine_mode(index, lengths):
    """Independent eigenfunction evaluator for quadrature oracles."""
    index = np.atleast_1d(index)
    lengths = np.atleast_1d(lengths)

    def f(*x):
        out = 1.0
        for k, L, xi in zip(index, lengths, x):
            out *= np.sqrt(2.0 / L) * np.sin(k * np.pi * xi / L)
        return out

    return f


_CRITERIA = []


@pytest.fixture
def criterion(request):
    """Time a numbered acceptance criterion and record a PASS/FAIL line.

    Use as ``with criterion(3, "title", budget_s) as note:``; ``note`` takes
    short measured values to print alongside the verdict.
    """
    import contextlib
    import time

    @contextlib.contextmanager
    def run(number, title, budget_s):
        details = []
        start = time.perf_counter()
        ok = False
        try:
            yield details.append
            elapsed = time.perf_counter() - start
            details.append(f"{elapsed:.2f}s of {budget_s:g}s")
            assert elapsed < budget_s, f"criterion {number} took {elapsed:.2f}s (budget {budget_s}s)"
            ok = True
        finally:
            line = f"{'PASS' if ok else 'FAIL'}  #{number:<2d} {title}: " + "; ".join(details)
            _CRITERIA.append((number, line))
            print(line)

    return run


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_CRITERIA):
        terminalreporter.write_line(line)
