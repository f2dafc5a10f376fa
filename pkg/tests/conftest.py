import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20260101)


def wigner_overlap(mean1, cov1, mean2, cov2, half_width=14.0, points=701):
    """``Tr(rho sigma)`` of two single-mode Gaussians by quadrature of Wigner functions.

    With vacuum variance 1 the overlap is ``4*pi * integral W1 W2 dx dp``.
    """
    grid = np.linspace(-half_width, half_width, points)
    X, P = np.meshgrid(grid, grid, indexing="ij")
    pts = np.stack([X, P], axis=-1)

    def density(mean, cov):
        d = pts - np.asarray(mean)
        inv = np.linalg.inv(cov)
        q = np.einsum("...i,ij,...j->...", d, inv, d)
        return np.exp(-0.5 * q) / (2 * np.pi * np.sqrt(np.linalg.det(cov)))

    integrand = density(mean1, cov1) * density(mean2, cov2)
    return 4 * np.pi * np.trapezoid(np.trapezoid(integrand, grid, axis=1), grid)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion.

    Usage: ``criterion(number, label, ok, detail)``; asserts ``ok`` afterwards.
    """

    def record(number, label, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {label} {detail}".rstrip())
        assert ok, f"criterion {number} failed: {label} {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
