"""Identification-code construction and the analytic bound calculators.

A code of M signatures in C^k under the energy constraint ||alpha||^2 <= k E
is built by packing the ball of radius sqrt(k E) in R^{2k} at separation
2 rho.  The calculators cover the achievable cardinality, the detector error
bounds exp(-k Lambda) / exp(-4 rho^2 Theta), the converse cardinality bound,
and the near-k log k scaling choice rho^2 = gamma ln k.  All cardinalities
are handled in log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry, photonstats
from .photonstats import ChannelModel

__all__ = [
    "SignatureSet",
    "ErrorBoundReport",
    "ScalingChoice",
    "build_code",
    "achievable_users_log",
    "analytic_error_bounds",
    "converse_users_log",
    "scaling_choice",
    "delta_for_lambda1",
    "rho_for_lambda2",
    "save_signature_set",
    "load_signature_set",
]


@dataclass(frozen=True)
class SignatureSet:
    """Codebook of complex amplitude vectors plus its construction parameters."""

    k: int
    energy_budget: float  # E; per-signature energy is bounded by k * E
    rho: float
    signatures: np.ndarray  # complex, shape (M, k)
    min_distance: float

    def __post_init__(self):
        if self.signatures.ndim != 2 or self.signatures.shape[1] != self.k:
            raise ValueError("signatures must have shape (M, k)")

    def __len__(self) -> int:
        return self.signatures.shape[0]

    def energies(self) -> np.ndarray:
        return np.sum(np.abs(self.signatures) ** 2, axis=1)


@dataclass(frozen=True)
class ErrorBoundReport:
    """Log error bounds of the threshold detector for a (k, delta, rho) design."""

    lambda1_log: float  # log of the first-kind bound exp(-k Lambda)
    lambda2_log: float  # log of the second-kind bound exp(-4 rho^2 Theta)
    lambda_exp: float
    theta_exp: float
    delta: float


@dataclass(frozen=True)
class ScalingChoice:
    """Derived design for rho^2 = gamma ln k."""

    rho: float
    lambda1_log: float
    lambda2_log: float
    logM_lower: float


def _check_rho(k: int, energy: float, rho: float) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if energy <= 0:
        raise ValueError(f"E must be > 0, got {energy}")
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    if 2 * rho > math.sqrt(k * energy):
        raise ValueError(
            f"need 2 rho <= sqrt(k E): 2*{rho} > sqrt({k}*{energy})"
        )


def build_code(
    k: int, energy: float, rho: float, rng: np.random.Generator,
    rejection_budget: int = geometry.DEFAULT_REJECTION_BUDGET,
) -> SignatureSet:
    """Pack the energy ball at separation 2 rho and read points as C^k signatures."""
    _check_rho(k, energy, rho)
    spec = geometry.PackingSpec(
        dim=2 * k,
        radius=math.sqrt(k * energy),
        separation=2 * rho,
        rejection_budget=rejection_budget,
    )
    ps = geometry.greedy_packing(spec, rng)
    sigs = ps.points[:, 0::2] + 1j * ps.points[:, 1::2]
    return SignatureSet(
        k=k,
        energy_budget=energy,
        rho=rho,
        signatures=sigs,
        min_distance=ps.achieved_min_distance,
    )


def achievable_users_log(k: int, energy: float, rho: float) -> float:
    """log of the guaranteed code size (k E / (4 rho^2))^k."""
    _check_rho(k, energy, rho)
    return k * math.log(k * energy / (4 * rho**2))


def analytic_error_bounds(
    k: int, delta: float, rho: float, channel: ChannelModel
) -> ErrorBoundReport:
    """First/second-kind log bounds -k Lambda and -4 rho^2 Theta."""
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    lam = photonstats.lambda_exponent(delta, channel)
    theta = photonstats.theta_exponent(delta, channel)
    return ErrorBoundReport(
        lambda1_log=-k * lam,
        lambda2_log=-4 * rho**2 * theta,
        lambda_exp=lam,
        theta_exp=theta,
        delta=delta,
    )


def converse_users_log(
    k: int, energy: float, delta_k: float, channel: ChannelModel
) -> float:
    """log of the converse cardinality bound at error level delta_k.

    The bound (1 + 4 sqrt(kE)/sqrt((2N+1) ln(1/(4 delta_k))))^{2k} is only
    meaningful for delta_k < 1/4, where the inner log is positive.
    """
    if k < 1 or energy <= 0:
        raise ValueError("k >= 1 and E > 0 required")
    if not (0 < delta_k < 0.25):
        raise ValueError(
            f"delta_k={delta_k} outside (0, 1/4): the converse bound's inner "
            "logarithm must be positive (its stated range (0, 1/2) is vacuous "
            "for delta_k >= 1/4)"
        )
    denom = math.sqrt((2 * channel.n_thermal + 1) * math.log(1 / (4 * delta_k)))
    return 2 * k * math.log1p(4 * math.sqrt(k * energy) / denom)


def scaling_choice(
    k: int, gamma: float, energy: float, delta: float, channel: ChannelModel
) -> ScalingChoice:
    """Evaluate the rho^2 = gamma ln k design.

    Returns lambda2_log = -4 gamma Theta ln k (so lambda2 <= k^{-4 gamma Theta}),
    lambda1_log = -k Lambda, and logM_lower = k ln k - k ln ln k + k ln(E/(4 gamma)).
    """
    if k < 3:
        raise ValueError(f"k must be >= 3 (need ln ln k > 0), got {k}")
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    rho = math.sqrt(gamma * math.log(k))
    _check_rho(k, energy, rho)
    bounds = analytic_error_bounds(k, delta, rho, channel)
    log_m = k * math.log(k) - k * math.log(math.log(k)) + k * math.log(energy / (4 * gamma))
    return ScalingChoice(
        rho=rho,
        lambda1_log=bounds.lambda1_log,
        lambda2_log=bounds.lambda2_log,
        logM_lower=log_m,
    )


def delta_for_lambda1(k: int, lambda1_target: float, channel: ChannelModel) -> float:
    """Invert the first-kind bound: smallest delta with exp(-k Lambda) <= target.

    Lambda(delta, N) is increasing in delta; solved by bisection.
    """
    if not (0 < lambda1_target < 1):
        raise ValueError("lambda1_target must be in (0, 1)")
    need = -math.log(lambda1_target) / k
    lo, hi = 1e-12, 1.0
    while photonstats.lambda_exponent(hi, channel) < need:
        hi *= 2
        if hi > 1e9:
            raise ValueError("lambda1_target unreachable")
    for _ in range(200):
        mid = (lo + hi) / 2
        if photonstats.lambda_exponent(mid, channel) < need:
            lo = mid
        else:
            hi = mid
    return hi


def rho_for_lambda2(lambda2_target: float, delta: float, channel: ChannelModel) -> float:
    """Invert the second-kind bound: rho with exp(-4 rho^2 Theta) = target."""
    if not (0 < lambda2_target < 1):
        raise ValueError("lambda2_target must be in (0, 1)")
    theta = photonstats.theta_exponent(delta, channel)
    return math.sqrt(-math.log(lambda2_target) / (4 * theta))


def save_signature_set(path, code: SignatureSet) -> None:
    """Point-set text format with a signature header (k, E, rho, M, min_distance)."""
    pts = np.empty((len(code), 2 * code.k))
    pts[:, 0::2] = code.signatures.real
    pts[:, 1::2] = code.signatures.imag
    spec = geometry.PackingSpec(
        dim=2 * code.k,
        radius=math.sqrt(code.k * code.energy_budget),
        separation=2 * code.rho,
    )
    with open(path, "w") as fh:
        fh.write(
            f"# signature-set k={code.k} energy_budget={code.energy_budget:.12g} "
            f"rho={code.rho:.12g} M={len(code)} min_distance={code.min_distance:.12g}\n"
        )
        fh.write(
            f"# dim={spec.dim} radius={spec.radius:.12g} separation={spec.separation:.12g}\n"
        )
        for row in pts:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")


def load_signature_set(path) -> SignatureSet:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# signature-set "):
            raise ValueError(f"{path}: missing signature-set header")
        fields = dict(tok.split("=") for tok in header[len("# signature-set ") :].split())
        fh.readline()  # point-set header, redundant with the signature header
        rows = [[float(x) for x in line.split()] for line in fh if line.strip()]
    k = int(fields["k"])
    arr = np.array(rows) if rows else np.zeros((0, 2 * k))
    if arr.size and arr.shape[1] != 2 * k:
        raise ValueError(f"{path}: row width {arr.shape[1]} != 2k = {2 * k}")
    sigs = arr[:, 0::2] + 1j * arr[:, 1::2]
    return SignatureSet(
        k=k,
        energy_budget=float(fields["energy_budget"]),
        rho=float(fields["rho"]),
        signatures=sigs,
        min_distance=geometry.min_pairwise_distance(arr),
    )
