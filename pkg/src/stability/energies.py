"""
energies - Corrected-difference energies I_k(t) along a trajectory and their exponential decay fits.
alpha = omega(t) - omega~, beta = phi(t) - phi~, I_k = int |nabla^k alpha|^2 + |nabla^k beta|^2.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from lattice.spectral import derivative_energy

logger = logging.getLogger(__name__)

# Share of samples discarded as the nonlinear transient, and share fitted after it
FIT_SKIP = 0.2
FIT_SPAN = 0.6

# Samples allowed before I_0 must be non-increasing
TRANSIENT_SAMPLES = 5

# Tolerated slack of the I_1 rate against the I_0 rate
RATE_SLACK = 0.1


@dataclass
class DecayFit:
    rate: float
    r_squared: float
    window: tuple


@dataclass
class EnergyReport:
    times: list
    i_k: dict
    fitted_delta: float
    fit_window: tuple
    r_squared: float
    rates: dict = field(default_factory=dict)
    orthogonality: float = 0.0
    monotone: bool = True
    i1_check: bool = None

    def summary(self):
        """Scalar verdict entries"""
        return {
            "fitted_delta": self.fitted_delta,
            "fit_window": list(self.fit_window) if self.fit_window else None,
            "r_squared": self.r_squared,
            "rates": {str(k): rate for k, rate in self.rates.items()},
            "orthogonality": self.orthogonality,
            "monotone": self.monotone,
            "i1_check": self.i1_check,
        }

    def rows(self):
        orders = sorted(self.i_k)
        return [[time] + [self.i_k[k][index] for k in orders] for index, time in enumerate(self.times)]

    def columns(self):
        return ["t"] + [f"I_{k}" for k in sorted(self.i_k)]


def fit_window(count):
    """Sample indices [start, stop) of the fit: skip the first 20%, fit the next 60%"""
    start = int(np.floor(FIT_SKIP * count))
    stop = min(count, start + max(3, int(round(FIT_SPAN * count))))
    return start, stop


def fit_decay(times, values):
    """Least-squares fit of log I = c - rate t on the fit window; None when I is not positive there"""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    start, stop = fit_window(len(values))
    window = values[start:stop]
    if stop - start < 3 or np.any(window <= 0.0) or np.ptp(times[start:stop]) == 0.0:
        return None
    fit = stats.linregress(times[start:stop], np.log(window))
    return DecayFit(rate=float(-fit.slope), r_squared=float(fit.rvalue ** 2), window=(float(times[start]), float(times[stop - 1])))


def is_monotone(values, transient=TRANSIENT_SAMPLES):
    values = np.asarray(values, dtype=float)[transient:]
    if values.size < 2:
        return True
    return bool(np.all(np.diff(values) <= 1e-12 * max(float(values[0]), 1e-300)))


def energies(trajectory, corrected, k_max=2):
    """I_0..I_k_max along a trajectory, decay rates and the harmonic parts of the corrected differences"""
    if not 0 <= k_max <= 10:
        raise ValueError("k_max must lie in [0, 10]")
    times = []
    series = {k: [] for k in range(k_max + 1)}
    orthogonality = 0.0
    for sample in trajectory.samples:
        alpha = sample.omega - corrected.omega_tilde
        beta = sample.phi - corrected.phi_tilde
        orthogonality = max(orthogonality, alpha.mean().max_abs(), beta.mean().max_abs())
        times.append(sample.time)
        for k in series:
            series[k].append(derivative_energy(alpha, k) + derivative_energy(beta, k))

    i_k = {k: np.array(values) for k, values in series.items()}
    rates = {}
    primary = None
    for k, values in i_k.items():
        fit = fit_decay(times, values)
        if fit is not None:
            rates[k] = fit.rate
            if k == 0:
                primary = fit
    i1_check = None
    if 0 in rates and 1 in rates:
        i1_check = rates[1] >= rates[0] * (1.0 - RATE_SLACK)

    report = EnergyReport(
        times=times,
        i_k=i_k,
        fitted_delta=primary.rate if primary else None,
        fit_window=primary.window if primary else None,
        r_squared=primary.r_squared if primary else None,
        rates=rates,
        orthogonality=orthogonality,
        monotone=is_monotone(i_k[0]),
        i1_check=i1_check,
    )
    if primary is not None:
        logger.info("I_0 decay rate %.6g (r^2=%.6f) on t in [%.4g, %.4g]", primary.rate, primary.r_squared, *primary.window)
        if primary.r_squared < 0.99:
            logger.warning("log I_0 is far from linear on the fit window (r^2=%.4f)", primary.r_squared)
    return report
