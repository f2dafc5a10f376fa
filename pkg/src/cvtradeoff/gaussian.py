"""Gaussian states, symplectic maps, Gaussian channels and heterodyne detection.

Conventions used throughout the package:

* quadratures obey ``[x, p] = 2i`` so the vacuum has unit variance
  (shot-noise units);
* phase-space vectors are ordered ``(x1, p1, x2, p2, ...)``;
* the symplectic form is block diagonal with blocks ``[[0, 1], [-1, 0]]``.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from typing import Sequence

import numpy as np

ADMISSIBILITY_TOL = 1e-9
SYMPLECTIC_TOL = 1e-12


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form for ``n_modes`` modes."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def is_admissible(cov: np.ndarray, tol: float = ADMISSIBILITY_TOL) -> bool:
    """Check the uncertainty principle ``cov + i*Omega >= 0``."""
    n = cov.shape[0] // 2
    herm = cov + 1j * symplectic_form(n)
    return bool(np.linalg.eigvalsh(herm).min() >= -tol)


@dataclass(frozen=True)
class GaussianState:
    """First and second moments of an ``n_modes`` Gaussian state.

    ``check=False`` skips the admissibility test; used on hot paths where the
    covariance is known to be valid by construction.
    """

    mean: np.ndarray
    cov: np.ndarray
    check: InitVar[bool] = True

    def __post_init__(self, check: bool) -> None:
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.size == 0 or mean.size % 2:
            raise DomainError(f"mean must have even, nonzero length, got {mean.size}")
        if cov.shape != (mean.size, mean.size):
            raise DomainError(f"cov shape {cov.shape} does not match mean length {mean.size}")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise DomainError("moments must be finite")
        cov = 0.5 * (cov + cov.T)
        if check and not is_admissible(cov):
            raise DomainError("covariance violates the uncertainty principle")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def mode_mean(self, mode: int) -> np.ndarray:
        _check_mode(self, mode)
        return self.mean[2 * mode : 2 * mode + 2].copy()

    def mode_cov(self, mode: int) -> np.ndarray:
        _check_mode(self, mode)
        return self.cov[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2].copy()

    def reduced(self, modes: Sequence[int]) -> "GaussianState":
        """Marginal state of the listed modes, in the given order."""
        for m in modes:
            _check_mode(self, m)
        idx = _quad_indices(modes)
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)], check=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GaussianState):
            return NotImplemented
        return np.array_equal(self.mean, other.mean) and np.array_equal(self.cov, other.cov)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class SymplecticTransform:
    """Affine phase-space map ``X -> S X + d`` of a lossless optical element."""

    S: np.ndarray
    d: np.ndarray | None = None

    def __post_init__(self) -> None:
        S = np.array(self.S, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise DomainError(f"S must be square with even size, got {S.shape}")
        d = np.zeros(S.shape[0]) if self.d is None else np.array(self.d, dtype=float).reshape(-1)
        if d.shape != (S.shape[0],):
            raise DomainError("displacement length does not match S")
        # Rounding in S Omega S^T grows with |S|^2, so strongly squeezing maps
        # get a proportionally larger allowance.
        if symplectic_residual(S) >= SYMPLECTIC_TOL * max(1.0, float(np.sum(S * S))):
            raise DomainError("matrix is not symplectic")
        S.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "d", d)

    @property
    def n_modes(self) -> int:
        return self.S.shape[0] // 2

    def compose(self, other: "SymplecticTransform") -> "SymplecticTransform":
        """Return the map that applies ``other`` first, then ``self``."""
        if other.n_modes != self.n_modes:
            raise DomainError("mode counts differ")
        return SymplecticTransform(self.S @ other.S, self.S @ other.d + self.d)

    def apply(self, state: GaussianState, modes: Sequence[int] | None = None) -> GaussianState:
        """Act on ``modes`` of ``state`` (all modes when omitted)."""
        if modes is None:
            modes = range(state.n_modes)
        modes = list(modes)
        if len(modes) != self.n_modes or len(set(modes)) != len(modes):
            raise DomainError(f"transform acts on {self.n_modes} modes, got {modes}")
        for m in modes:
            _check_mode(state, m)
        idx = _quad_indices(modes)
        full = np.eye(2 * state.n_modes)
        full[np.ix_(idx, idx)] = self.S
        shift = np.zeros(2 * state.n_modes)
        shift[idx] = self.d
        return GaussianState(full @ state.mean + shift, full @ state.cov @ full.T, check=False)


@dataclass(frozen=True)
class MeasurementOutcome:
    """One heterodyne record: amplitude-arm and phase-arm detector outcomes."""

    x_a: float
    p_b: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.x_a) and np.isfinite(self.p_b)):
            raise DomainError("measurement outcomes must be finite")


def symplectic_residual(S: np.ndarray) -> float:
    """Frobenius norm of ``S Omega S^T - Omega``."""
    omega = symplectic_form(S.shape[0] // 2)
    return float(np.linalg.norm(S @ omega @ S.T - omega))


def _quad_indices(modes: Sequence[int]) -> np.ndarray:
    return np.array([2 * m + k for m in modes for k in (0, 1)], dtype=int)


def _check_mode(state: GaussianState, mode: int) -> None:
    if not isinstance(mode, (int, np.integer)) or not 0 <= mode < state.n_modes:
        raise DomainError(f"mode index {mode!r} invalid for {state.n_modes}-mode state")


def _check_unit_interval(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


# -- states and elements -----------------------------------------------------


def make_coherent(amplitudes: Sequence[tuple[float, float]]) -> GaussianState:
    """Product of coherent states with the given ``(x, p)`` means."""
    amps = np.asarray(amplitudes, dtype=float).reshape(-1, 2)
    if amps.shape[0] == 0:
        raise DomainError("need at least one mode")
    return GaussianState(amps.reshape(-1), np.eye(amps.size), check=False)


def vacuum(n_modes: int = 1) -> GaussianState:
    return make_coherent([(0.0, 0.0)] * n_modes)


def beam_splitter(T: float) -> SymplecticTransform:
    """Two-mode beam splitter with power transmittance ``T``.

    Mode 1 leaves as ``sqrt(T) a1 + sqrt(1-T) a2`` and mode 2 as
    ``-sqrt(1-T) a1 + sqrt(T) a2``, identically for both quadratures.
    """
    _check_unit_interval("T", T)
    t, r = np.sqrt(T), np.sqrt(1.0 - T)
    return SymplecticTransform(np.kron(np.array([[t, r], [-r, t]]), np.eye(2)))


def two_mode_squeezer(r: float) -> SymplecticTransform:
    """Two-mode squeezer; ``x1 - x2`` and ``p1 + p2`` are squeezed by ``exp(-r)``."""
    if not r >= 0:
        raise DomainError(f"squeezing parameter must be >= 0, got {r}")
    c, s = np.cosh(r), np.sinh(r)
    z = np.diag([1.0, -1.0])
    return SymplecticTransform(np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]]))


def squeezer(r: float) -> SymplecticTransform:
    """Single-mode squeezer ``x -> exp(-r) x``, ``p -> exp(r) p`` (any real ``r``)."""
    return SymplecticTransform(np.diag([np.exp(-r), np.exp(r)]))


def rotation(theta: float) -> SymplecticTransform:
    """Single-mode phase rotation by ``theta``."""
    c, s = np.cos(theta), np.sin(theta)
    return SymplecticTransform(np.array([[c, -s], [s, c]]))


def phase_flip() -> SymplecticTransform:
    """The pi rotation ``(x, p) -> (-x, -p)``, built exactly."""
    return SymplecticTransform(-np.eye(2))


# -- single-mode Gaussian channels --------------------------------------------


def _channel(state: GaussianState, mode: int, scale: float, noise: float) -> GaussianState:
    """Apply ``X_mode -> scale * X_mode + noise`` with phase-insensitive noise."""
    _check_mode(state, mode)
    idx = _quad_indices([mode])
    k = np.ones(2 * state.n_modes)
    k[idx] = scale
    mean = k * state.mean
    cov = state.cov * np.outer(k, k)
    cov[idx, idx] += noise
    return GaussianState(mean, cov, check=False)


def attenuate(state: GaussianState, mode: int, eta: float) -> GaussianState:
    """Pure-loss channel of transmissivity ``eta`` on one mode."""
    _check_unit_interval("eta", eta)
    return _channel(state, mode, np.sqrt(eta), 1.0 - eta)


def amplify(state: GaussianState, mode: int, power_gain: float) -> GaussianState:
    """Phase-insensitive amplifier with power gain ``power_gain >= 1``."""
    if not power_gain >= 1.0:
        raise DomainError(f"amplifier gain must be >= 1, got {power_gain}")
    return _channel(state, mode, np.sqrt(power_gain), power_gain - 1.0)


def add_classical_noise(state: GaussianState, mode: int, chi: float) -> GaussianState:
    """Add Gaussian noise of variance ``chi`` to both quadratures of one mode."""
    if not chi >= 0:
        raise DomainError(f"noise variance must be >= 0, got {chi}")
    return _channel(state, mode, 1.0, chi)


def displace(state: GaussianState, mode: int, dx: float, dp: float) -> GaussianState:
    _check_mode(state, mode)
    mean = state.mean.copy()
    mean[2 * mode] += dx
    mean[2 * mode + 1] += dp
    return GaussianState(mean, state.cov, check=False)


# -- heterodyne detection -----------------------------------------------------


@dataclass(frozen=True)
class HeterodyneModel:
    """Outcome distribution of a heterodyne on one mode and its conditioning map.

    Outcomes ``y = (x_a, p_b)`` are Gaussian with ``outcome_mean`` and
    ``outcome_cov``; the unmeasured modes are left with mean
    ``rest_mean + gain @ (y - outcome_mean)`` and covariance ``rest_cov``.
    """

    outcome_mean: np.ndarray
    outcome_cov: np.ndarray
    rest_mean: np.ndarray
    rest_cov: np.ndarray
    gain: np.ndarray


def heterodyne_model(state: GaussianState, mode: int) -> HeterodyneModel:
    """Exact statistics of a heterodyne on ``mode``.

    The signal is mixed 50/50 with vacuum; ``x`` is read on one arm and ``p``
    on the other, giving ``y = (r + (u_x, -u_p)) / sqrt(2)`` with ``r`` the
    measured mode and ``u`` the vacuum port.
    """
    _check_mode(state, mode)
    m_idx = _quad_indices([mode])
    rest = [k for k in range(state.n_modes) if k != mode]
    r_idx = _quad_indices(rest)

    v_mm = state.cov[np.ix_(m_idx, m_idx)]
    outcome_mean = state.mean[m_idx] / np.sqrt(2.0)
    outcome_cov = 0.5 * (v_mm + np.eye(2))

    if not rest:
        empty = np.zeros(0)
        return HeterodyneModel(outcome_mean, outcome_cov, empty, np.zeros((0, 0)), np.zeros((0, 2)))

    v_rm = state.cov[np.ix_(r_idx, m_idx)]
    # Cov(rest, y) = v_rm / sqrt(2); Schur complement against Cov(y, y).
    gain = (v_rm / np.sqrt(2.0)) @ np.linalg.inv(outcome_cov)
    rest_cov = state.cov[np.ix_(r_idx, r_idx)] - v_rm @ np.linalg.solve(v_mm + np.eye(2), v_rm.T)
    return HeterodyneModel(outcome_mean, outcome_cov, state.mean[r_idx].copy(), rest_cov, gain)


def heterodyne_sample_many(
    state: GaussianState, mode: int, rng: np.random.Generator, size: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`heterodyne_sample`: ``size`` records and conditional means.

    Returns arrays of shape ``(size, 2)`` and ``(size, 2 * (n_modes - 1))``;
    the conditional covariance is outcome independent (``heterodyne_model``).
    """
    model = heterodyne_model(state, mode)
    chol = np.linalg.cholesky(model.outcome_cov)
    y = model.outcome_mean + rng.standard_normal((size, 2)) @ chol.T
    cond = model.rest_mean + (y - model.outcome_mean) @ model.gain.T
    return y, cond


def heterodyne_sample(
    state: GaussianState, mode: int, rng: np.random.Generator
) -> tuple[MeasurementOutcome, GaussianState | None]:
    """Draw one heterodyne record on ``mode`` and condition the other modes.

    Returns the outcome and the conditional state of the remaining modes
    (in their original order), or ``None`` if nothing is left unmeasured.
    """
    model = heterodyne_model(state, mode)
    y = rng.multivariate_normal(model.outcome_mean, model.outcome_cov, method="cholesky")
    outcome = MeasurementOutcome(float(y[0]), float(y[1]))
    if model.rest_mean.size == 0:
        return outcome, None
    mean = model.rest_mean + model.gain @ (y - model.outcome_mean)
    return outcome, GaussianState(mean, model.rest_cov)


# -- fidelity -----------------------------------------------------------------


def fidelity_vs_coherent(amplitude: tuple[float, float], output: GaussianState) -> float:
    """Overlap ``<alpha| rho |alpha>`` of a single-mode Gaussian state with a coherent state.

    ``2 / sqrt(det(I + V)) * exp(-d^T (I + V)^-1 d / 2)`` with ``d`` the mean
    mismatch; for ``V = (1 + n) I`` and ``d = 0`` this is ``2 / (2 + n)``.
    """
    if output.n_modes != 1:
        raise DomainError(f"fidelity needs a single-mode output, got {output.n_modes} modes")
    total = output.cov + np.eye(2)
    delta = output.mean - np.asarray(amplitude, dtype=float)
    penalty = float(delta @ np.linalg.solve(total, delta))
    return float(2.0 / np.sqrt(np.linalg.det(total)) * np.exp(-0.5 * penalty))


def quadratic_readout(state: GaussianState, L: np.ndarray, offset: np.ndarray | None = None) -> GaussianState:
    """Moments of the linear combination ``L @ X + offset`` of the quadratures.

    ``L`` has two rows, giving a single-mode state. Measuring commuting
    quadratures and feeding them forward linearly is equivalent to such a
    deterministic combination, which lets feed-forward circuits be checked
    without sampling.
    """
    L = np.asarray(L, dtype=float)
    if L.shape != (2, 2 * state.n_modes):
        raise DomainError(f"readout matrix must have shape (2, {2 * state.n_modes})")
    mean = L @ state.mean + (0.0 if offset is None else np.asarray(offset, dtype=float))
    return GaussianState(mean, L @ state.cov @ L.T)
