"""Empirical verification of the identification scheme.

The threshold detector commutes with the displaced number basis, so both
error events reduce to classical total-photon-count thresholds: a first-kind
error is "k thermal modes exceed k(N+delta)", and a second-kind error for the
pair (m, m') is "k displaced thermal modes with amplitudes Delta = alpha_m' -
alpha_m stay at or below k(N+delta)".  The simulators realize exactly those
events; exact tail masses from `photonstats.exact_total_pmf` are the ground
truth.  A heterodyne baseline (ball test on the induced Gaussian channel) is
included with its closed-form chi-square error probabilities.

Trials are split into chunks with independently seeded streams derived from
(master seed, chunk index); results merge by summation and are bit-identical
for a fixed (seed, chunk count).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln
from scipy.stats import norm

from .photonstats import ChannelModel, DetectorSpec, exact_total_pmf
from .scheme import SignatureSet

__all__ = [
    "McEstimate",
    "HeterodyneSpec",
    "estimate_lambda1",
    "estimate_lambda2",
    "exact_lambda1",
    "exact_lambda2",
    "worst_pair_delta",
    "heterodyne_simulate",
    "heterodyne_analytic",
    "wilson_interval",
]

DEFAULT_CHUNKS = 8


@dataclass(frozen=True)
class McEstimate:
    successes: int
    trials: int
    point: float
    stderr: float
    seed: int


@dataclass(frozen=True)
class HeterodyneSpec:
    """Ball-test receiver on the heterodyne output: accept iff ||z - alpha_m||^2 <= threshold.

    noise_variance is the per-mode complex variance; >= 1 (shot-noise floor,
    equal to N+1 under the thermal extension).
    """

    noise_variance: float
    threshold: float

    def __post_init__(self):
        if self.noise_variance < 1:
            raise ValueError(
                f"noise_variance must be >= 1 (shot noise), got {self.noise_variance}"
            )
        if self.threshold < 0:
            raise ValueError(f"threshold must be >= 0, got {self.threshold}")


def _make_estimate(successes: int, trials: int, seed: int) -> McEstimate:
    p = successes / trials
    return McEstimate(
        successes=successes,
        trials=trials,
        point=p,
        stderr=math.sqrt(p * (1 - p) / trials),
        seed=seed,
    )


def wilson_interval(successes: int, trials: int, confidence: float = 0.997):
    """Wilson score interval; well behaved in small-probability regimes."""
    z = norm.ppf(1 - (1 - confidence) / 2)
    p = successes / trials
    denom = 1 + z**2 / trials
    center = (p + z**2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z**2 / (4 * trials**2)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _chunk_sizes(trials: int, chunks: int) -> list[int]:
    base, extra = divmod(trials, chunks)
    return [base + (1 if i < extra else 0) for i in range(chunks)]


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _count_total(
    deltas: np.ndarray, channel: ChannelModel, rng: np.random.Generator, n: int
) -> np.ndarray:
    """Total photon counts of k modes displaced by ``deltas`` (length-k complex)."""
    k = deltas.size
    N = channel.n_thermal
    if N == 0:
        intensity = np.broadcast_to(np.abs(deltas) ** 2, (n, k))
        return rng.poisson(intensity).sum(axis=1)
    noise = rng.normal(scale=math.sqrt(N / 2), size=(n, k, 2))
    intensity = (deltas.real + noise[:, :, 0]) ** 2 + (deltas.imag + noise[:, :, 1]) ** 2
    return rng.poisson(intensity).sum(axis=1)


def estimate_lambda1(
    code: SignatureSet,
    channel: ChannelModel,
    detector: DetectorSpec,
    trials: int,
    seed: int,
    chunks: int = DEFAULT_CHUNKS,
) -> McEstimate:
    """First-kind error rate: total thermal count exceeds k(N+delta).

    By unitary invariance the event is identical for every signature, so the
    code enters only through k.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    zeros = np.zeros(code.k, dtype=complex)
    successes = 0
    for i, n in enumerate(_chunk_sizes(trials, chunks)):
        if n == 0:
            continue
        counts = _count_total(zeros, channel, _chunk_rng(seed, i), n)
        successes += int(np.count_nonzero(counts > detector.threshold))
    return _make_estimate(successes, trials, seed)


def worst_pair_delta(code: SignatureSet) -> np.ndarray:
    """Difference vector of the minimum-distance pair (lowest-index tie-break)."""
    if len(code) < 2:
        raise ValueError("need at least 2 signatures")
    sigs = code.signatures
    best = (math.inf, 0, 1)
    for i in range(len(code) - 1):
        d2 = np.sum(np.abs(sigs[i + 1 :] - sigs[i]) ** 2, axis=1)
        j = int(np.argmin(d2))
        if d2[j] < best[0]:
            best = (float(d2[j]), i, i + 1 + j)
    return sigs[best[2]] - sigs[best[1]]


def estimate_lambda2(
    code: SignatureSet,
    channel: ChannelModel,
    detector: DetectorSpec,
    trials: int,
    seed: int,
    pair_strategy: str = "worst_pair",
    chunks: int = DEFAULT_CHUNKS,
) -> McEstimate:
    """Second-kind (false-accept) error rate of the threshold detector.

    The event for a pair depends only on Delta = alpha_m' - alpha_m:
    displaced thermal counts with amplitudes Delta_t total at most k(N+delta).
    worst_pair uses the minimum-distance pair; all_pairs_sampled averages over
    uniformly sampled ordered pairs.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if pair_strategy not in ("worst_pair", "all_pairs_sampled"):
        raise ValueError(f"unknown pair_strategy {pair_strategy!r}")
    successes = 0
    if pair_strategy == "worst_pair":
        delta_vec = worst_pair_delta(code)
        for i, n in enumerate(_chunk_sizes(trials, chunks)):
            if n == 0:
                continue
            counts = _count_total(delta_vec, channel, _chunk_rng(seed, i), n)
            successes += int(np.count_nonzero(counts <= detector.threshold))
    else:
        m = len(code)
        if m < 2:
            raise ValueError("need at least 2 signatures")
        for i, n in enumerate(_chunk_sizes(trials, chunks)):
            if n == 0:
                continue
            rng = _chunk_rng(seed, i)
            send = rng.integers(0, m, size=n)
            recv = rng.integers(0, m - 1, size=n)
            recv += recv >= send  # uniform over ordered pairs with recv != send
            for t in range(n):
                delta_vec = code.signatures[send[t]] - code.signatures[recv[t]]
                count = _count_total(delta_vec, channel, rng, 1)[0]
                successes += int(count <= detector.threshold)
    return _make_estimate(successes, trials, seed)


def exact_lambda1(channel: ChannelModel, detector: DetectorSpec) -> float:
    """Exact P(S_k > k(N+delta)) at zero signal energy."""
    pmf = exact_total_pmf(detector.k, 0.0, channel)
    n_keep = int(math.floor(detector.threshold))
    return float(max(0.0, 1.0 - pmf[: n_keep + 1].sum()))


def exact_lambda2(delta_vec, channel: ChannelModel, detector: DetectorSpec) -> float:
    """Exact P(S_k <= k(N+delta)) at per-mode energies |Delta_t|^2."""
    energies = np.abs(np.asarray(delta_vec, dtype=complex)) ** 2
    pmf = exact_total_pmf(detector.k, float(energies.sum()), channel, energies=energies)
    n_keep = int(math.floor(detector.threshold))
    return float(min(1.0, pmf[: n_keep + 1].sum()))


def heterodyne_simulate(
    code: SignatureSet,
    spec: HeterodyneSpec,
    trials: int,
    seed: int,
    chunks: int = DEFAULT_CHUNKS,
) -> dict:
    """Ball-test errors on the Gaussian channel z = alpha + w.

    Returns {"lambda1": ..., "lambda2_worst": ...} as McEstimates; lambda1 is
    the event ||w||^2 > threshold, lambda2 the worst-pair event
    ||Delta + w||^2 <= threshold.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    k = code.k
    sigma = math.sqrt(spec.noise_variance / 2)  # per real quadrature
    delta_vec = worst_pair_delta(code)
    succ1 = 0
    succ2 = 0
    for i, n in enumerate(_chunk_sizes(trials, chunks)):
        if n == 0:
            continue
        rng = _chunk_rng(seed, i)
        w = rng.normal(scale=sigma, size=(n, k, 2))
        norm1 = (w**2).sum(axis=(1, 2))
        succ1 += int(np.count_nonzero(norm1 > spec.threshold))
        w = rng.normal(scale=sigma, size=(n, k, 2))
        norm2 = ((delta_vec.real + w[:, :, 0]) ** 2 + (delta_vec.imag + w[:, :, 1]) ** 2).sum(
            axis=1
        )
        succ2 += int(np.count_nonzero(norm2 <= spec.threshold))
    return {
        "lambda1": _make_estimate(succ1, trials, seed),
        "lambda2_worst": _make_estimate(succ2, trials, seed),
    }


def _noncentral_chi2_cdf(
    x: float, dof: int, noncentrality: float, tol: float = 1e-10, max_terms: int = 100_000
) -> float:
    """Noncentral chi-square CDF by the Poisson mixture of regularized
    incomplete gammas, truncated once the remaining Poisson weight is < tol."""
    if x <= 0:
        return 0.0
    half = noncentrality / 2
    total = 0.0
    weight_sum = 0.0
    for j in range(max_terms):
        logw = -half + j * math.log(half) - gammaln(j + 1) if half > 0 else (0.0 if j == 0 else -math.inf)
        w = math.exp(logw)
        total += w * gammainc(dof / 2 + j, x / 2)
        weight_sum += w
        if weight_sum >= 1 - tol:
            return min(1.0, total)
    raise RuntimeError(
        f"noncentral chi-square series did not converge (noncentrality={noncentrality})"
    )


def heterodyne_analytic(k: int, spec: HeterodyneSpec, distance: float) -> dict:
    """Exact ball-test error probabilities from chi-square laws.

    ||w||^2 scaled by 2/noise_variance is central chi-square with 2k degrees
    of freedom; ||Delta + w||^2 is noncentral with noncentrality
    2 distance^2 / noise_variance.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if distance < 0:
        raise ValueError("distance must be >= 0")
    x = 2 * spec.threshold / spec.noise_variance
    lambda1 = 1.0 - float(gammainc(k, x / 2))
    nc = 2 * distance**2 / spec.noise_variance
    lambda2 = _noncentral_chi2_cdf(x, 2 * k, nc)
    return {"lambda1": lambda1, "lambda2": lambda2}
