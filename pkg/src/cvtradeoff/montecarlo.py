"""Shot-by-shot simulation of the tap-and-displace scheme.

Shots are generated in fixed-size blocks. Block ``b`` draws from a Philox
stream keyed by ``(seed, b)``, so the raw record does not depend on how
blocks are grouped into shards or on how many threads run them. Moments are
accumulated per block and merged in block order for the same reason.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .gaussian import DomainError, beam_splitter, heterodyne_model, make_coherent
from .schemes import FeedForwardScheme

BLOCK_SIZE = 1 << 16
WORKERS_ENV = "CVTRADEOFF_WORKERS"


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Counter-based stream for one block of shots."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise DomainError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class ShotBatch:
    n_shots: int
    input_amplitude: tuple[float, float]
    T: float
    seed: int
    outcomes: np.ndarray  # (n, 2) raw heterodyne records (x_a, p_b)
    outputs: np.ndarray  # (n, 2) sampled output quadratures
    estimates: np.ndarray  # (n, 2) kappa * outcomes

    def __post_init__(self) -> None:
        for name in ("outcomes", "outputs", "estimates"):
            if getattr(self, name).shape != (self.n_shots, 2):
                raise DomainError(f"{name} must have shape ({self.n_shots}, 2)")


@dataclass(frozen=True)
class Moments:
    """Count, mean and centred sum of squares per column (Chan et al. merge)."""

    count: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def of(cls, data: np.ndarray) -> "Moments":
        mean = data.mean(axis=0)
        return cls(data.shape[0], mean, ((data - mean) ** 2).sum(axis=0))

    def merge(self, other: "Moments") -> "Moments":
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        m2 = self.m2 + other.m2 + delta**2 * (self.count * other.count / n)
        return Moments(n, mean, m2)

    @property
    def variance(self) -> np.ndarray:
        return self.m2 / (self.count - 1)


@dataclass(frozen=True)
class BatchMoments:
    """Pooled moments of the outputs and of the estimation errors."""

    outputs: Moments
    errors: Moments

    def merge(self, other: "BatchMoments") -> "BatchMoments":
        return BatchMoments(self.outputs.merge(other.outputs), self.errors.merge(other.errors))


@dataclass(frozen=True)
class EmpiricalSummary:
    n_shots: int
    gain_x: float | None  # None when the input quadrature is zero
    gain_p: float | None
    gain_x_stderr: float | None
    gain_p_stderr: float | None
    var_n_hat: float
    var_n_stderr: float
    var_m_hat: float
    var_m_stderr: float
    F_hat: float
    F_stderr: float
    G_hat: float
    G_stderr: float
    var_n_x: float
    var_n_p: float

    def as_dict(self) -> dict[str, float | int | None]:
        return dict(self.__dict__)


class _Circuit:
    """Per-T quantities shared by every block: heterodyne model and gains."""

    def __init__(self, T: float, amplitude: tuple[float, float]):
        scheme = FeedForwardScheme(T)
        # Signal enters port 2 so the reflected arm (mode 0) carries +sqrt(1-T) of it.
        state = beam_splitter(T).apply(make_coherent([(0.0, 0.0), amplitude]))
        self.model = heterodyne_model(state, 0)
        self.lam = scheme.lam
        self.kappa = scheme.kappa
        self.outcome_chol = np.linalg.cholesky(self.model.outcome_cov)
        self.rest_chol = np.linalg.cholesky(self.model.rest_cov)

    def block(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        m = self.model
        y = m.outcome_mean + rng.standard_normal((n, 2)) @ self.outcome_chol.T
        cond = m.rest_mean + (y - m.outcome_mean) @ m.gain.T
        out = cond + self.lam * y + rng.standard_normal((n, 2)) @ self.rest_chol.T
        return y, out, self.kappa * y


def _check_run(T: float, n_shots: int, seed: int) -> None:
    if not 0.0 < T < 1.0:
        raise DomainError(f"T must lie in (0, 1), got {T}")
    if n_shots < 1:
        raise DomainError(f"n_shots must be >= 1, got {n_shots}")
    if not 0 <= seed < 2**64:
        raise DomainError("seed must be a 64-bit unsigned integer")


def _block_sizes(n_shots: int) -> list[int]:
    full, rem = divmod(n_shots, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rem] if rem else [])


def _shard_ranges(n_blocks: int, shards: int) -> list[range]:
    shards = max(1, min(shards, n_blocks))
    edges = np.linspace(0, n_blocks, shards + 1).round().astype(int)
    return [range(a, b) for a, b in zip(edges[:-1], edges[1:])]


def _run_blocks(circuit: _Circuit, seed: int, sizes: list[int], blocks: range):
    return [circuit.block(block_rng(seed, b), sizes[b]) for b in blocks]


def run_feedforward(
    T: float,
    input_amplitude: tuple[float, float],
    n_shots: int,
    seed: int,
    shards: int = 1,
    workers: int | None = None,
) -> ShotBatch:
    """Simulate ``n_shots`` passes of a coherent state through the scheme.

    Each shot splits the input on the tap, samples a heterodyne record on the
    reflected arm, displaces the transmitted arm by ``lam * record`` and samples
    the output quadratures from the conditional state.
    """
    _check_run(T, n_shots, seed)
    amp = (float(input_amplitude[0]), float(input_amplitude[1]))
    circuit = _Circuit(T, amp)
    sizes = _block_sizes(n_shots)
    ranges = _shard_ranges(len(sizes), shards)
    workers = default_workers() if workers is None else workers
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        parts = list(pool.map(lambda r: _run_blocks(circuit, seed, sizes, r), ranges))
    blocks = [blk for part in parts for blk in part]
    outcomes, outputs, estimates = (np.concatenate([b[k] for b in blocks]) for k in range(3))
    return ShotBatch(n_shots, amp, T, seed, outcomes, outputs, estimates)


def batch_moments(batch: ShotBatch) -> BatchMoments:
    """Block-wise moments of a batch merged in block order."""
    amp = np.asarray(batch.input_amplitude)
    total = None
    start = 0
    for size in _block_sizes(batch.n_shots):
        sl = slice(start, start + size)
        part = BatchMoments(Moments.of(batch.outputs[sl]), Moments.of(batch.estimates[sl] - amp))
        total = part if total is None else total.merge(part)
        start += size
    return total


def run_feedforward_moments(
    T: float,
    input_amplitude: tuple[float, float],
    n_shots: int,
    seed: int,
    shards: int = 1,
    workers: int | None = None,
) -> BatchMoments:
    """Streaming variant of :func:`run_feedforward` that keeps only moments.

    Gives bit-identical moments to ``batch_moments(run_feedforward(...))``.
    """
    _check_run(T, n_shots, seed)
    amp = (float(input_amplitude[0]), float(input_amplitude[1]))
    circuit = _Circuit(T, amp)
    sizes = _block_sizes(n_shots)
    amp_arr = np.asarray(amp)

    def shard(blocks: range) -> list[BatchMoments]:
        out = []
        for b in blocks:
            _, outputs, estimates = circuit.block(block_rng(seed, b), sizes[b])
            out.append(BatchMoments(Moments.of(outputs), Moments.of(estimates - amp_arr)))
        return out

    workers = default_workers() if workers is None else workers
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        parts = list(pool.map(shard, _shard_ranges(len(sizes), shards)))
    flat = [m for part in parts for m in part]
    total = flat[0]
    for m in flat[1:]:
        total = total.merge(m)
    return total


def summarize_moments(moments: BatchMoments, input_amplitude: tuple[float, float]) -> EmpiricalSummary:
    out, err = moments.outputs, moments.errors
    n = out.count
    if n < 100:
        raise DomainError(f"need at least 100 shots to summarize, got {n}")
    var_out = out.variance
    var_n_xp = var_out - 1.0
    var_n = float(var_n_xp.mean())
    # Known-mean squared error; the input's own shot noise is subtracted.
    mse = err.m2 / n + err.mean**2
    var_m = float(mse.mean()) - 1.0

    chi2 = math.sqrt(2.0 / (n - 1))
    var_n_se = float(np.sqrt(np.sum((var_out * chi2) ** 2)) / 2.0)
    var_m_se = float(np.sqrt(np.sum((mse * chi2) ** 2)) / 2.0)

    gains: list[float | None] = []
    gain_se: list[float | None] = []
    for k, a in enumerate(input_amplitude):
        if a == 0.0:
            gains.append(None)
            gain_se.append(None)
        else:
            gains.append(float(out.mean[k] / a))
            gain_se.append(float(math.sqrt(var_out[k] / n) / abs(a)))

    F = 2.0 / (2.0 + var_n)
    G = 2.0 / (3.0 + var_m)
    return EmpiricalSummary(
        n_shots=n,
        gain_x=gains[0],
        gain_p=gains[1],
        gain_x_stderr=gain_se[0],
        gain_p_stderr=gain_se[1],
        var_n_hat=var_n,
        var_n_stderr=var_n_se,
        var_m_hat=var_m,
        var_m_stderr=var_m_se,
        F_hat=F,
        F_stderr=2.0 / (2.0 + var_n) ** 2 * var_n_se,
        G_hat=G,
        G_stderr=2.0 / (3.0 + var_m) ** 2 * var_m_se,
        var_n_x=float(var_n_xp[0]),
        var_n_p=float(var_n_xp[1]),
    )


def summarize(batch: ShotBatch) -> EmpiricalSummary:
    """Gains, added noises and fidelities inferred from ensemble variances."""
    return summarize_moments(batch_moments(batch), batch.input_amplitude)
