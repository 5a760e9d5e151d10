"""Signal and orbit analysis for generated bitstreams.

Four tool families: auto/cross-correlation of the +/-1-mapped sequence,
its power spectrum with a flatness summary, cycle detection over the
generator's digital state orbit (with the ideal-period law for forced
periodic drivers), and a phase-space distance combining a Boolean
component with a strategy-prefix component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .generator import ChaoticBitGenerator, GeneratorConfig, TranscriptDriver

__all__ = [
    "CorrelationSeries",
    "PowerSpectrum",
    "CycleReport",
    "BudgetExceeded",
    "autocorrelation",
    "cross_correlation",
    "power_spectrum",
    "detect_cycle",
    "ideal_period",
    "phase_distance",
    "phase_distance_tail_bound",
]


@dataclass(frozen=True)
class CorrelationSeries:
    """Correlation values over a lag range.

    lags runs 0..max_lag.  For an autocorrelation of any non-constant
    input, the value at lag 0 is exactly 1.  degenerate marks inputs
    whose centered energy vanishes (constant sequences), for which the
    estimator is undefined and a fixed convention is reported instead.
    """

    lags: tuple[int, ...]
    values: tuple[float, ...]
    degenerate: bool = False


@dataclass(frozen=True)
class PowerSpectrum:
    """Squared-magnitude spectrum of the +/-1-mapped sequence.

    bins holds frequency indices 0..n//2 (DC through Nyquist) with
    their |X_k|^2 powers.  flatness is the ratio of the largest non-DC
    bin to the mean non-DC bin (infinite when the non-DC spectrum is
    empty of energy).  time_energy is sum(x^2) = n and spectral_energy
    is the full-spectrum (1/n) sum |X_k|^2; Parseval makes them equal
    up to rounding.
    """

    bins: tuple[int, ...]
    power: tuple[float, ...]
    flatness: float
    time_energy: float
    spectral_energy: float

    def pairs(self) -> list[tuple[int, float]]:
        """The spectrum as (frequency_index, power) pairs."""
        return list(zip(self.bins, self.power))


@dataclass(frozen=True)
class CycleReport:
    """Transient length, cycle period and orbit length of a state orbit."""

    transient_length: int
    cycle_period: int
    orbit_length: int

    def __post_init__(self) -> None:
        if self.cycle_period < 1:
            raise ValueError("CycleReport: cycle_period must be >= 1")
        if self.transient_length < 0:
            raise ValueError("CycleReport: transient_length must be >= 0")
        if self.orbit_length != self.transient_length + self.cycle_period:
            raise ValueError("CycleReport: orbit_length must equal transient + period")


@dataclass(frozen=True)
class BudgetExceeded:
    """Explicit no-cycle-found-within-budget result (not an error)."""

    budget: int
    steps_executed: int


def _pm_one(bits) -> np.ndarray:
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise ValueError("bit sequence must be one-dimensional")
    if arr.size and np.any((arr != 0) & (arr != 1)):
        raise ValueError("bit sequence must contain only 0s and 1s")
    return 2.0 * arr.astype(np.float64) - 1.0


def autocorrelation(bits, max_lag: int) -> CorrelationSeries:
    """Mean-centered, biased autocorrelation of the +/-1 sequence.

    r(tau) = sum a_i a_(i+tau) / sum a_i^2 over the overlap, where a is
    the centered sequence; the full-length energy in the denominator
    keeps values across lags comparable.  A constant input has no
    centered energy: it is flagged degenerate and reported with the
    convention r(0)=1, r(tau!=0)=0.
    """
    x = _pm_one(bits)
    n = x.size
    if not isinstance(max_lag, int) or isinstance(max_lag, bool) or max_lag < 1:
        raise ValueError(f"autocorrelation: max_lag must be a positive integer, got {max_lag!r}")
    if n <= max_lag:
        raise ValueError(f"autocorrelation: sequence length {n} must exceed max_lag {max_lag}")
    a = x - x.mean()
    energy = float(a @ a)
    lags = tuple(range(max_lag + 1))
    if energy == 0.0:
        values = (1.0,) + (0.0,) * max_lag
        return CorrelationSeries(lags, values, degenerate=True)
    values = tuple(float(a[: n - t] @ a[t:]) / energy if t else 1.0 for t in lags)
    return CorrelationSeries(lags, values)


def cross_correlation(bits_a, bits_b, max_lag: int) -> CorrelationSeries:
    """Mean-centered cross-correlation of two equal-length sequences.

    Same estimator as the autocorrelation, normalized by the geometric
    mean of the two centered energies.  Positive lag shifts the second
    sequence forward: r(tau) = sum a_i b_(i+tau) / norm.  If either
    sequence is constant the estimator is undefined; the series is
    flagged degenerate and all values are reported as 0.
    """
    xa = _pm_one(bits_a)
    xb = _pm_one(bits_b)
    if xa.size != xb.size:
        raise ValueError(f"cross_correlation: lengths differ ({xa.size} vs {xb.size})")
    n = xa.size
    if not isinstance(max_lag, int) or isinstance(max_lag, bool) or max_lag < 0:
        raise ValueError(f"cross_correlation: max_lag must be a non-negative integer, got {max_lag!r}")
    if n <= max_lag:
        raise ValueError(f"cross_correlation: sequence length {n} must exceed max_lag {max_lag}")
    a = xa - xa.mean()
    b = xb - xb.mean()
    norm = math.sqrt(float(a @ a) * float(b @ b))
    lags = tuple(range(max_lag + 1))
    if norm == 0.0:
        return CorrelationSeries(lags, (0.0,) * (max_lag + 1), degenerate=True)
    values = tuple(float(a[: n - t] @ b[t:]) / norm for t in lags)
    return CorrelationSeries(lags, values)


def power_spectrum(bits) -> PowerSpectrum:
    """Squared-magnitude DFT spectrum of the +/-1 sequence.

    Emits bins 0..n//2 (DC through Nyquist).  Requires at least 64
    bits; below that a spectrum is too coarse to summarize.
    """
    x = _pm_one(bits)
    n = x.size
    if n < 64:
        raise ValueError(f"power_spectrum: sequence length {n} is below the minimum 64")
    spectrum = np.fft.rfft(x)
    power = np.abs(spectrum) ** 2
    half = n // 2
    bins = tuple(range(half + 1))
    power = power[: half + 1]
    # Full-spectrum energy from the half spectrum: every bin except DC
    # (and Nyquist, for even n) appears twice in the full transform.
    full = 2.0 * float(power.sum()) - float(power[0])
    if n % 2 == 0:
        full -= float(power[-1])
    spectral_energy = full / n
    time_energy = float(n)
    non_dc = power[1:]
    mean_non_dc = float(non_dc.mean()) if non_dc.size else 0.0
    if mean_non_dc > 0.0:
        flatness = float(non_dc.max()) / mean_non_dc
    else:
        flatness = math.inf
    return PowerSpectrum(
        bins=bins,
        power=tuple(float(v) for v in power),
        flatness=flatness,
        time_energy=time_energy,
        spectral_energy=spectral_energy,
    )


class _Budget:
    __slots__ = ("limit", "used")

    def __init__(self, limit: int) -> None:
        self.limit = limit
        self.used = 0

    def step(self, gen: ChaoticBitGenerator) -> None:
        if self.used >= self.limit:
            raise _BudgetHit
        gen.advance_block()
        self.used += 1


class _BudgetHit(Exception):
    pass


def detect_cycle(config: GeneratorConfig, *, transcript=None, budget: int = 10 ** 8):
    """Transient and period of the block-to-block state orbit.

    The orbit element is the full digital state: cell vector plus
    complete driver state (the binary64 logistic value, or the phase
    pair of a cycling transcript).  Anything less would report spurious
    periods.  Detection is Brent's algorithm over fresh generator
    restarts; the result is verified by re-simulating two aligned
    copies through 3 periods past the transient.  transcript, when
    given, is an (m_seq, s_seq) pair forced as a cycling driver in
    place of the logistic one.  If no cycle is confirmed within
    ``budget`` state steps a BudgetExceeded result is returned rather
    than an error or a guess.
    """
    if not isinstance(budget, int) or isinstance(budget, bool) or budget < 1:
        raise ValueError(f"detect_cycle: budget must be a positive integer, got {budget!r}")

    def fresh() -> ChaoticBitGenerator:
        driver = None
        if transcript is not None:
            m_seq, s_seq = transcript
            driver = TranscriptDriver(m_seq, s_seq, cycle=True)
        return ChaoticBitGenerator(config, driver=driver)

    meter = _Budget(budget)
    try:
        # Brent phase 1: period. The tortoise is a stored key, teleported
        # to the hare's position at each power-of-two boundary.
        power = lam = 1
        hare = fresh()
        tortoise_key = hare.state_key()
        meter.step(hare)
        hare_key = hare.state_key()
        while hare_key != tortoise_key:
            if power == lam:
                tortoise_key = hare_key
                power *= 2
                lam = 0
            meter.step(hare)
            hare_key = hare.state_key()
            lam += 1

        # Phase 2: transient, from two fresh restarts lam apart.
        ahead = fresh()
        for _ in range(lam):
            meter.step(ahead)
        behind = fresh()
        mu = 0
        while behind.state_key() != ahead.state_key():
            meter.step(behind)
            meter.step(ahead)
            mu += 1

        # Verification: two aligned copies must agree for 3 periods.
        check_a = fresh()
        for _ in range(mu):
            meter.step(check_a)
        check_b = fresh()
        for _ in range(mu + lam):
            meter.step(check_b)
        for _ in range(3 * lam):
            if check_a.state_key() != check_b.state_key():
                raise RuntimeError(
                    "detect_cycle: verification failed; the state key does not "
                    "determine the orbit (this is a bug)"
                )
            meter.step(check_a)
            meter.step(check_b)
    except _BudgetHit:
        return BudgetExceeded(budget=budget, steps_executed=meter.used)

    return CycleReport(transient_length=mu, cycle_period=lam, orbit_length=mu + lam)


def ideal_period(n_m: int, n_s: int) -> int:
    """Ideal full-state period under forced periodic drivers.

    For a gap transcript of period n_m and a strategy transcript of
    period n_s, the state orbit's period divides 2*n_m*n_s: after one
    driver period the cell vector has been XOR-ed with a fixed mask,
    and applying the same mask again cancels it.  Equality is the
    ideal, non-degenerate case; divisibility is what is guaranteed.
    """
    if not isinstance(n_m, int) or isinstance(n_m, bool) or n_m < 1:
        raise ValueError(f"ideal_period: n_m must be a positive integer, got {n_m!r}")
    if not isinstance(n_s, int) or isinstance(n_s, bool) or n_s < 1:
        raise ValueError(f"ideal_period: n_s must be a positive integer, got {n_s!r}")
    return 2 * n_m * n_s


def phase_distance(
    s_a: Sequence[int],
    e_a: Sequence[int],
    s_b: Sequence[int],
    e_b: Sequence[int],
    *,
    prefix_k: int = 30,
) -> float:
    """Distance between two phase-space points (strategy, cell vector).

    The Boolean component d_e counts differing cells (an integer in
    [0, N]).  The strategy component compares the first K terms of the
    two strategy prefixes:

        d_s = (9/N) * sum_{k=1..K} |S_a^k - S_b^k| / 10^k

    which always lies in [0, 1).  K is the shorter prefix length capped
    at prefix_k; terms beyond K are bounded by
    phase_distance_tail_bound(N, K), below 1e-12 for K >= 15 at any N.
    The default K = 30 pushes the tail far below binary64 resolution.
    """
    ea = tuple(int(v) for v in e_a)
    eb = tuple(int(v) for v in e_b)
    if len(ea) != len(eb):
        raise ValueError(f"phase_distance: cell vectors differ in length ({len(ea)} vs {len(eb)})")
    if not ea:
        raise ValueError("phase_distance: cell vectors must be non-empty")
    if any(v not in (0, 1) for v in ea + eb):
        raise ValueError("phase_distance: cell vectors must contain only 0s and 1s")
    n = len(ea)
    sa = tuple(int(v) for v in s_a)
    sb = tuple(int(v) for v in s_b)
    if any(not 1 <= v <= n for v in sa + sb):
        raise ValueError(f"phase_distance: strategy values must lie in [1, {n}]")
    if not isinstance(prefix_k, int) or isinstance(prefix_k, bool) or prefix_k < 0:
        raise ValueError(f"phase_distance: prefix_k must be a non-negative integer, got {prefix_k!r}")
    d_e = sum(1 for u, v in zip(ea, eb) if u != v)
    k_eff = min(len(sa), len(sb), prefix_k)
    acc = 0.0
    scale = 1.0
    for k in range(k_eff):
        scale /= 10.0
        acc += abs(sa[k] - sb[k]) * scale
    d_s = (9.0 / n) * acc
    return d_e + d_s


def phase_distance_tail_bound(n_cells: int, prefix_k: int) -> float:
    """Worst-case contribution of strategy terms beyond the prefix.

    Each neglected term is at most (N-1)/10^k, so the tail after K
    terms is bounded by (9/N) * (N-1) * 10^-K / 9 = ((N-1)/N) * 10^-K.
    """
    if not isinstance(n_cells, int) or isinstance(n_cells, bool) or n_cells < 1:
        raise ValueError(f"phase_distance_tail_bound: n_cells must be a positive integer, got {n_cells!r}")
    if not isinstance(prefix_k, int) or isinstance(prefix_k, bool) or prefix_k < 0:
        raise ValueError(f"phase_distance_tail_bound: prefix_k must be a non-negative integer, got {prefix_k!r}")
    return (n_cells - 1) / n_cells * 10.0 ** (-prefix_k)
