"""Using partial estimation to beat lossy, erasing and noisy channels.

The quantum output of the tap-and-displace scheme goes through the channel
while the classical record travels on a separate noiseless classical link;
the receiver applies the feed-forward displacement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .gaussian import DomainError
from .schemes import NoiseBudget

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
PRESCAN_POINTS = 1000
T_TOL = 1e-8
# Interior values this close to the T -> 1 supremum count as no improvement.
SUPREMUM_TOL = 1e-9


@dataclass(frozen=True)
class LossyChannelSpec:
    eta: float

    def __post_init__(self) -> None:
        if not 0.0 < self.eta <= 1.0:
            raise DomainError(f"eta must lie in (0, 1], got {self.eta}")


@dataclass(frozen=True)
class ErasureChannelSpec:
    p: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class AdditiveNoiseSpec:
    chi: float

    def __post_init__(self) -> None:
        if not self.chi >= 0.0:
            raise DomainError(f"chi must be >= 0, got {self.chi}")


@dataclass(frozen=True)
class OptimizationResult:
    T_star: float
    F_star: float
    baseline: float
    improvement: float
    strategy: str  # "classical", "quantum" or "hybrid"

    @property
    def relative_improvement(self) -> float:
        return self.improvement / self.baseline

    def as_dict(self) -> dict[str, float | str]:
        return {
            "T_star": self.T_star,
            "F_star": self.F_star,
            "baseline": self.baseline,
            "improvement": self.improvement,
            "relative_improvement": self.relative_improvement,
            "strategy": self.strategy,
        }


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = T_TOL) -> float:
    """Argmax of a unimodal ``f`` on ``[a, b]`` to within ``tol``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def prescan_then_refine(f: Callable[[float], float], lo: float, hi: float, points: int = PRESCAN_POINTS) -> float:
    """Locate the best grid cell of ``f`` on ``[lo, hi]`` then refine by golden section."""
    grid = np.linspace(lo, hi, points)
    values = np.array([f(t) for t in grid])
    i = int(np.argmax(values))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, points - 1)]
    t = golden_section_max(f, a, b)
    return float(t) if f(t) >= values[i] else float(grid[i])


# -- lossy channel ------------------------------------------------------------


def lossy_amplifier_fidelity(eta: float) -> float:
    """Loss followed by a phase-insensitive amplifier of gain ``1/eta``.

    The added noise is ``2(1 - eta)/eta`` so the fidelity is ``eta``.
    """
    LossyChannelSpec(eta)
    var_n = 2.0 * (1.0 - eta) / eta
    return 2.0 / (2.0 + var_n)


def _lossy_var_n(eta: float, T: float) -> float:
    st, s1 = math.sqrt(T), math.sqrt(1.0 - T)
    se = math.sqrt(eta * T)
    cross = math.sqrt(eta) * s1 - st * (1.0 - se) / s1
    return cross**2 + (1.0 - eta) + (1.0 - se) ** 2 / (1.0 - T)


def lossy_hybrid_noise(eta: float, T: float) -> NoiseBudget:
    """Added noise when the tapped state crosses a loss ``eta`` before feed-forward.

    The receiver's displacement gain is set so the overall gain is one. The
    vacuum entering at the tap leaks into the output through the transmitted
    and the measured path with opposite signs; at ``T = eta`` they cancel.
    """
    LossyChannelSpec(eta)
    if not 0.0 <= T < 1.0:
        raise DomainError(f"T must lie in [0, 1), got {T}")
    # The tap's measurement noise does not depend on the channel.
    return NoiseBudget(g=1.0, var_n=_lossy_var_n(eta, T), var_m=(1.0 + T) / (1.0 - T))


def lossy_hybrid_fidelity(eta: float, T: float) -> float:
    return 2.0 / (2.0 + lossy_hybrid_noise(eta, T).var_n)


def lossy_hybrid_optimal_fidelity(eta: float) -> float:
    LossyChannelSpec(eta)
    return 1.0 / (2.0 - eta)


def lossy_hybrid_optimize(eta: float) -> OptimizationResult:
    """Choose the tap that minimises the added noise through loss ``eta``."""
    LossyChannelSpec(eta)
    baseline = lossy_amplifier_fidelity(eta)
    if eta == 1.0:
        # Lossless: leave the state untouched (T -> 1 supremum).
        return OptimizationResult(1.0, 1.0, baseline, 0.0, "quantum")
    T = prescan_then_refine(lambda t: -_lossy_var_n(eta, t), 0.0, 1.0 - 1e-9)
    F = 2.0 / (2.0 + _lossy_var_n(eta, T))
    if F <= baseline + SUPREMUM_TOL:
        return OptimizationResult(1.0, baseline, baseline, 0.0, "quantum")
    strategy = "classical" if T == 0.0 else "hybrid"
    return OptimizationResult(T, F, baseline, F - baseline, strategy)


# -- erasure channel ----------------------------------------------------------


def _transfer_fidelity(T: float) -> float:
    # (1 - T)/(2 - 2 sqrt T), continuous at T = 0
    return 0.5 * (1.0 + math.sqrt(T))


def _estimation_fidelity(T: float) -> float:
    return (1.0 - T) / (2.0 - T)


def erasure_fidelity(p: float, T: float) -> float:
    """Average fidelity when the channel delivers the state with probability ``p``.

    On failure only the classical estimate is available.
    """
    ErasureChannelSpec(p)
    if not 0.0 <= T < 1.0:
        raise DomainError(f"T must lie in [0, 1), got {T}")
    return p * _transfer_fidelity(T) + (1.0 - p) * _estimation_fidelity(T)


def erasure_optimize(p: float) -> OptimizationResult:
    """Best tap for erasure probability ``1 - p``, including the pure strategies.

    The supremum ``p`` reached as ``T -> 1`` (quantum channel only) is never
    attained in the interior and is compared explicitly.
    """
    ErasureChannelSpec(p)
    baseline = max(p, 0.5)
    T = prescan_then_refine(lambda t: erasure_fidelity(p, t), 0.0, 1.0 - 1e-9)
    F = erasure_fidelity(p, T)
    if F <= p + SUPREMUM_TOL:
        return OptimizationResult(1.0, p, baseline, p - baseline, "quantum")
    strategy = "classical" if T == 0.0 else "hybrid"
    return OptimizationResult(T, F, baseline, F - baseline, strategy)


# -- additive noise -----------------------------------------------------------


def additive_noise_fidelities(chi: float) -> tuple[float, float]:
    """``(quantum, classical)`` fidelities for a channel adding noise ``chi``."""
    AdditiveNoiseSpec(chi)
    return 2.0 / (2.0 + chi), 0.5


def additive_noise_decision(chi: float) -> str:
    quantum, classical = additive_noise_fidelities(chi)
    if quantum > classical:
        return "quantum"
    if quantum < classical:
        return "classical"
    return "tie"
