"""Noise budgets and fidelity tradeoffs for partial estimation of coherent states.

A machine with a quantum output and a classical output adds noise of
variance ``var_n`` to the quantum state and ``var_m`` to the measurement.
At unity gain the transfer fidelity is ``2/(2+var_n)`` and the estimation
fidelity ``2/(3+var_m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian import (
    DomainError,
    GaussianState,
    beam_splitter,
    make_coherent,
    phase_flip,
    quadratic_readout,
    two_mode_squeezer,
)

BUDGET_TOL = 1e-12

# In-loop detector figures of the reference setup.
DETECTOR_EFFICIENCY = 0.95
VISIBILITY = 0.99


@dataclass(frozen=True)
class NoiseBudget:
    g: float
    var_n: float
    var_m: float

    def __post_init__(self) -> None:
        if not self.g > 0:
            raise DomainError(f"gain must be positive, got {self.g}")
        if self.var_m < 1.0 - BUDGET_TOL:
            raise DomainError(f"measurement noise {self.var_m} below one shot-noise unit")
        floor = abs(1.0 - self.g**2) / self.g**2
        if self.var_n < floor - BUDGET_TOL:
            raise DomainError(f"added noise {self.var_n} below the gain floor {floor}")
        if self.var_n * self.var_m < 1.0 - BUDGET_TOL:
            raise DomainError(f"noise product {self.var_n * self.var_m} violates var_n*var_m >= 1")

    @property
    def product(self) -> float:
        return self.var_n * self.var_m


@dataclass(frozen=True)
class TradeoffPoint:
    """One operating point; ``parameter`` is T (feed-forward) or r (teleportation)."""

    parameter: float
    budget: NoiseBudget
    G: float
    F: float

    def as_row(self) -> dict[str, float]:
        return {
            "parameter": self.parameter,
            "var_m": self.budget.var_m,
            "var_n": self.budget.var_n,
            "G": self.G,
            "F": self.F,
        }


@dataclass(frozen=True)
class FeedForwardScheme:
    """Tap-and-displace scheme with its unity-gain feed-forward settings.

    The tap reflects a fraction ``1 - T`` of the signal into a heterodyne
    detector. Raw outcomes are scaled by ``kappa`` to form the estimate and by
    ``lam`` to displace the transmitted signal. The in-loop detector is a loss
    of ``detector_efficiency * visibility**2`` ahead of ideal heterodyne.
    """

    T: float
    detector_efficiency: float = 1.0
    visibility: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.T < 1.0:
            raise DomainError(f"T must lie in (0, 1), got {self.T}")
        if not 0.0 < self.detector_efficiency <= 1.0:
            raise DomainError(f"detector efficiency must lie in (0, 1], got {self.detector_efficiency}")
        if not 0.0 < self.visibility <= 1.0:
            raise DomainError(f"visibility must lie in (0, 1], got {self.visibility}")

    @property
    def eta_eff(self) -> float:
        return self.detector_efficiency * self.visibility**2

    @property
    def lam(self) -> float:
        # sqrt(T) + lam * sqrt(eta_eff * (1 - T) / 2) = 1
        return math.sqrt(2.0 * (1.0 - self.T) / self.eta_eff) / (1.0 + math.sqrt(self.T))

    @property
    def kappa(self) -> float:
        return math.sqrt(2.0) / math.sqrt(self.eta_eff * (1.0 - self.T))


@dataclass(frozen=True)
class TeleportationScheme:
    r: float

    def __post_init__(self) -> None:
        if not self.r >= 0:
            raise DomainError(f"squeezing parameter must be >= 0, got {self.r}")


def _check_T(T: float) -> None:
    if not 0.0 < T < 1.0:
        raise DomainError(f"T must lie in (0, 1), got {T}")


def feedforward_noises(T: float) -> NoiseBudget:
    _check_T(T)
    st = math.sqrt(T)
    return NoiseBudget(
        g=1.0,
        # 2(1 - sqrt T)^2 / (1 - T), with 1 - sqrt T = (1 - T)/(1 + sqrt T) for T near 1
        var_n=2.0 * (1.0 - T) / (1.0 + st) ** 2,
        var_m=(1.0 + T) / (1.0 - T),
    )


def fidelities_from_budget(b: NoiseBudget) -> tuple[float, float]:
    """Return ``(G, F)``; only defined at unity gain."""
    if b.g != 1.0:
        raise DomainError(f"fidelity maps require unity gain, got g={b.g}")
    return 2.0 / (3.0 + b.var_m), 2.0 / (2.0 + b.var_n)


def tradeoff_bound(G: float) -> float:
    """Largest transfer fidelity compatible with estimation fidelity ``G``."""
    if not 0.0 < G <= 0.5:
        raise DomainError(f"G must lie in (0, 1/2], got {G}")
    return G / (2.0 * (1.0 - G - math.sqrt((1.0 - G) * (1.0 - 2.0 * G))))


def unity_gain_noise_bound(var_m: float) -> float:
    """Smallest added noise at unity gain for measurement noise ``var_m``."""
    if not var_m >= 1.0:
        raise DomainError(f"var_m must be >= 1, got {var_m}")
    # 2(v - sqrt(v^2 - 1)) rewritten as 2/(v + sqrt(v^2 - 1)) to avoid cancellation
    return 2.0 / (var_m + math.sqrt(var_m * var_m - 1.0))


def general_noise_bound(var_m: float) -> float:
    """Smallest added noise when the gain may be chosen freely: ``1/var_m``."""
    if not var_m >= 1.0:
        raise DomainError(f"var_m must be >= 1, got {var_m}")
    return 1.0 / var_m


def _point(parameter: float, budget: NoiseBudget) -> TradeoffPoint:
    G, F = fidelities_from_budget(budget)
    return TradeoffPoint(parameter, budget, G, F)


def feedforward_point(T: float) -> TradeoffPoint:
    return _point(T, feedforward_noises(T))


def teleportation_point(r: float) -> TradeoffPoint:
    """Teleportation with a two-mode squeezed resource of strength ``r``.

    The Bell measurement adds ``cosh 2r`` to the classical record and the
    teleported state carries ``2 exp(-2r)`` of added noise.
    """
    TeleportationScheme(r)
    return _point(r, NoiseBudget(g=1.0, var_n=2.0 * math.exp(-2.0 * r), var_m=math.cosh(2.0 * r)))


def degraded_feedforward_noises(T: float, detector_efficiency: float, visibility: float) -> NoiseBudget:
    """Noise budget when the in-loop heterodyne has efficiency ``ηd·v²``.

    With the loss ahead of detection and the feed-forward gain re-tuned for
    unity gain, the added noise scales as ``1/eta_eff`` and the measurement
    noise becomes ``(2 - eta_eff (1 - T)) / (eta_eff (1 - T))``.
    """
    scheme = FeedForwardScheme(T, detector_efficiency, visibility)
    eta = scheme.eta_eff
    ideal = feedforward_noises(T)
    return NoiseBudget(
        g=1.0,
        var_n=ideal.var_n / eta,
        var_m=(2.0 - eta * (1.0 - T)) / (eta * (1.0 - T)),
    )


def degraded_feedforward_point(
    T: float, detector_efficiency: float = DETECTOR_EFFICIENCY, visibility: float = VISIBILITY
) -> TradeoffPoint:
    if detector_efficiency == 1.0 and visibility == 1.0:
        return feedforward_point(T)
    return _point(T, degraded_feedforward_noises(T, detector_efficiency, visibility))


# -- circuit-level checks ----------------------------------------------------


def feedforward_output(
    T: float,
    amplitude: tuple[float, float] = (0.0, 0.0),
    detector_efficiency: float = 1.0,
    visibility: float = 1.0,
) -> tuple[GaussianState, GaussianState]:
    """Propagate the tap-and-displace circuit through the Gaussian core.

    Returns ``(output, estimate)`` as single-mode states: the displaced
    quantum output and the distribution of the scaled classical estimate.
    Mode layout: 0 = reflected tap arm, 1 = signal, 2 = heterodyne vacuum port,
    3 = detector-loss environment.
    """
    scheme = FeedForwardScheme(T, detector_efficiency, visibility)
    state = make_coherent([(0.0, 0.0), amplitude, (0.0, 0.0), (0.0, 0.0)])
    # Signal in port 2, so the reflected arm carries +sqrt(1-T) of it.
    state = beam_splitter(T).apply(state, [0, 1])
    state = beam_splitter(scheme.eta_eff).apply(state, [0, 3])
    # Heterodyne record y = (r + (u_x, -u_p)) / sqrt(2).
    het = np.zeros((2, 8))
    het[0, 0], het[0, 4] = 1.0, 1.0
    het[1, 1], het[1, 5] = 1.0, -1.0
    het /= np.sqrt(2.0)
    transmitted = np.zeros((2, 8))
    transmitted[0, 2] = transmitted[1, 3] = 1.0
    output = quadratic_readout(state, transmitted + scheme.lam * het)
    estimate = quadratic_readout(state, scheme.kappa * het)
    return output, estimate


def teleportation_output(r: float, amplitude: tuple[float, float] = (0.0, 0.0)) -> tuple[GaussianState, GaussianState]:
    """Propagate a unity-gain teleporter through the Gaussian core.

    Modes: 0 = input, 1 = sender half of the resource, 2 = receiver half.
    The sender half is phase flipped so the Bell measurement reads
    ``x_in - x_1`` and ``p_in + p_1``, which the resource correlates with
    ``-x_2`` and ``-p_2``; adding them to the receiver mode cancels the resource
    noise up to ``2 exp(-2r)``.
    """
    TeleportationScheme(r)
    state = make_coherent([amplitude, (0.0, 0.0), (0.0, 0.0)])
    state = two_mode_squeezer(r).apply(state, [1, 2])
    state = phase_flip().apply(state, [1])
    state = beam_splitter(0.5).apply(state, [0, 1])
    # After the 50/50 mix, x of mode 0 and p of mode 1 are measured; mode 1
    # carries -p_in/sqrt(2), so its record enters with a minus sign.
    bell = np.zeros((2, 6))
    bell[0, 0] = math.sqrt(2.0)
    bell[1, 3] = -math.sqrt(2.0)
    receiver = np.zeros((2, 6))
    receiver[0, 4] = receiver[1, 5] = 1.0
    return quadratic_readout(state, receiver + bell), quadratic_readout(state, bell)


def budget_from_outputs(output: GaussianState, estimate: GaussianState) -> NoiseBudget:
    """Read a phase-insensitive unity-gain budget off propagated output moments.

    Both the output and the estimate still carry the input's own unit of
    shot noise, which is removed here.
    """
    var_n = float(np.mean(np.diag(output.cov))) - 1.0
    var_m = float(np.mean(np.diag(estimate.cov))) - 1.0
    return NoiseBudget(g=1.0, var_n=var_n, var_m=var_m)
