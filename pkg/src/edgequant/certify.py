"""Lyapunov stability certificate for quantized second-order edge agreement.

Given the essential edge Laplacian ``Lh`` of a decomposition and the gain
``sigma`` (with ``alpha = sigma**2``, ``beta = sigma**3``), the certificate is
built from

* ``H``, the symmetric positive definite solution of ``H Lh + Lh^T H = I``;
* ``P = [[sigma H, H], [H, sigma H]]``;
* ``Q = -(P L_T + L_T^T P)`` with ``L_T = [[0, I], [-sigma^2 Lh, -sigma^3 Lh]]``.

All matrix norms are spectral norms.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    InfeasibleDelta,
    InfeasibleGain,
    InfeasibleMargin,
    NotPositiveStable,
    RadiusTooLarge,
)
from .graph import EdgeDecomposition

__all__ = [
    "LipschitzBounds",
    "GainParams",
    "StabilityCertificate",
    "solve_lyapunov",
    "build_certificate",
    "envelope",
    "printed_envelope",
    "convergence_time",
    "printed_convergence_time",
    "estimate_lipschitz",
    "check_lipschitz",
]


@dataclass(frozen=True)
class LipschitzBounds:
    """Constants with ``|f(x,v,t) - f(y,z,t)| <= xi1 |x - y| + xi2 |v - z|``."""

    xi1: float = 0.0
    xi2: float = 0.0

    def __post_init__(self):
        for name in ("xi1", "xi2"):
            val = float(getattr(self, name))
            if not (val >= 0 and math.isfinite(val)):
                raise ValueError(f"{name}: must be a nonnegative finite number, got {val}")
            object.__setattr__(self, name, val)

    @property
    def xi(self) -> float:
        return max(self.xi1, self.xi2)


@dataclass(frozen=True)
class GainParams:
    """Coupling gains ``alpha = sigma**2`` and ``beta = sigma**3``.

    Any ``sigma > 0`` is accepted so that simulations can explore weak
    coupling; certificates additionally need ``sigma > 1``.
    """

    sigma: float

    def __post_init__(self):
        s = float(self.sigma)
        if not (s > 0 and math.isfinite(s)):
            raise ValueError(f"sigma: must be a positive finite number, got {self.sigma}")
        object.__setattr__(self, "sigma", s)

    @property
    def alpha(self) -> float:
        return self.sigma**2

    @property
    def beta(self) -> float:
        return self.sigma**3


def solve_lyapunov(L_hat_e: np.ndarray) -> np.ndarray:
    """Solve ``H L + L^T H = I`` for the symmetric positive definite ``H``.

    Uses a dense solve of the row-major vectorized system
    ``(I kron L^T + L^T kron I) vec(H) = vec(I)``.

    Raises
    ------
    NotPositiveStable
        If some eigenvalue of ``L_hat_e`` has nonpositive real part.
    """
    Lh = np.atleast_2d(np.asarray(L_hat_e, dtype=float))
    m = Lh.shape[0]
    eig = np.linalg.eigvals(Lh)
    if np.any(eig.real <= 0):
        raise NotPositiveStable(f"eigenvalue with nonpositive real part: {eig[np.argmin(eig.real)]}")
    I = np.eye(m)
    K = np.kron(I, Lh.T) + np.kron(Lh.T, I)
    H = np.linalg.solve(K, I.ravel()).reshape(m, m)
    return 0.5 * (H + H.T)


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


@dataclass(frozen=True, eq=False)
class StabilityCertificate:
    """Certificate quantities; see :func:`build_certificate`."""

    sigma: float
    lipschitz: LipschitzBounds
    n: int
    num_edges: int
    H: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    L_T: np.ndarray
    L_T1: np.ndarray
    lambda_max_H: float
    lambda_min_Q: float
    lambda_min_P: float
    lambda_max_P: float
    sigma_min: float
    norm_P: float
    norm_PLT1: float
    norm_RT: float
    margin: float
    delta_l_max: float
    lyapunov_residual: float
    q_block_residual: float
    schur_residual: float
    q_pd_by_eig: bool
    q_pd_by_schur: bool
    reasons: tuple[str, ...] = ()
    notes: tuple[str, ...] = field(default=())

    @property
    def feasible(self) -> bool:
        return not self.reasons

    def require_feasible(self) -> None:
        """Raise the first feasibility failure, if any."""
        if "InfeasibleGain" in self.reasons:
            raise InfeasibleGain(
                f"sigma = {self.sigma:g} does not exceed sigma_min = {self.sigma_min:.6g}"
            )
        if "InfeasibleMargin" in self.reasons:
            raise InfeasibleMargin(f"stability margin {self.margin:.6g} is not positive")

    def radius(self, delta_u: float) -> float:
        """Certified ultimate bound on ``|z_T|`` under a uniform quantizer."""
        coeff = 2.0 * math.sqrt(2 * self.n * self.num_edges) * self.norm_PLT1 / self.margin
        return coeff * delta_u

    def decay_constant(self, delta_l: float) -> float:
        """``pi(delta_l)``; positive exactly when ``delta_l < delta_l_max``."""
        return self.margin - 2.0 * delta_l * self.norm_PLT1 * self.norm_RT

    # aliases matching the functional names used in reports
    radius_fn = radius
    pi_fn = decay_constant


def build_certificate(d: EdgeDecomposition, gains: GainParams, lip: LipschitzBounds,
                      n: int) -> StabilityCertificate:
    """Assemble the stability certificate.

    Always returns; failures are listed in ``reasons`` (``"InfeasibleGain"``,
    ``"InfeasibleMargin"``) and ``feasible`` is False.  Call
    :meth:`StabilityCertificate.require_feasible` to turn them into
    exceptions.
    """
    if n < 1:
        raise ValueError(f"n: state dimension must be positive, got {n}")
    s = gains.sigma
    Lh, LO = d.L_hat_e, d.L_hat_O
    m, L = Lh.shape[0], d.num_edges
    I, Z = np.eye(m), np.zeros((m, m))
    H = solve_lyapunov(Lh)
    P = np.block([[s * H, H], [H, s * H]])
    L_T = np.block([[Z, I], [-s**2 * Lh, -s**3 * Lh]])
    zL = np.zeros((m, L))
    L_T1 = np.block([[zL, zL], [-s**2 * LO, -s**3 * LO]])
    Q_raw = -(P @ L_T + L_T.T @ P)
    Q = _sym(Q_raw)

    Q_closed = np.block([[s**2 * I, s**3 * I - s * H], [s**3 * I - s * H, s**4 * I - 2 * H]])
    Q1, Q2, Q3 = Q_raw[:m, :m], Q_raw[:m, m:], Q_raw[m:, m:]
    schur = Q3 - Q2.T @ np.linalg.solve(Q1, Q2)
    schur_closed = H @ (2 * (s**2 - 1) * I - H)

    eig_H = np.linalg.eigvalsh(H)
    eig_P = np.linalg.eigvalsh(_sym(P))
    lam_min_Q = float(np.linalg.eigvalsh(Q)[0])
    sigma_min = math.sqrt(eig_H[-1] / 2 + 1)
    norm_P = float(np.linalg.norm(P, 2))
    norm_PLT1 = float(np.linalg.norm(P @ L_T1, 2))
    norm_RT = float(np.linalg.norm(d.R.T, 2))
    margin = lam_min_Q - 2 * lip.xi * norm_P

    reasons = []
    if not s > sigma_min:
        reasons.append("InfeasibleGain")
    if not margin > 0:
        reasons.append("InfeasibleMargin")
    notes = []
    if lip.xi1 > 0 and lip.xi2 > 0:
        notes.append(
            "both Lipschitz constants are nonzero: the drift bound max(xi1, xi2)|z_T| "
            "may be optimistic by a factor sqrt(2)"
        )

    return StabilityCertificate(
        sigma=s,
        lipschitz=lip,
        n=int(n),
        num_edges=L,
        H=H,
        P=P,
        Q=Q,
        L_T=L_T,
        L_T1=L_T1,
        lambda_max_H=float(eig_H[-1]),
        lambda_min_Q=lam_min_Q,
        lambda_min_P=float(eig_P[0]),
        lambda_max_P=float(eig_P[-1]),
        sigma_min=sigma_min,
        norm_P=norm_P,
        norm_PLT1=norm_PLT1,
        norm_RT=norm_RT,
        margin=margin,
        delta_l_max=margin / (2 * norm_PLT1 * norm_RT),
        lyapunov_residual=float(np.abs(H @ Lh + Lh.T @ H - I).max()),
        q_block_residual=float(np.abs(Q_raw - Q_closed).max()),
        schur_residual=float(np.abs(schur - schur_closed).max()),
        q_pd_by_eig=lam_min_Q > 0,
        q_pd_by_schur=bool(np.all(np.diag(Q1) > 0) and np.linalg.eigvalsh(_sym(schur))[0] > 0),
        reasons=tuple(reasons),
        notes=tuple(notes),
    )


def _rate_inputs(cert: StabilityCertificate, delta_l: float) -> float:
    cert.require_feasible()
    if not 0 <= delta_l < cert.delta_l_max:
        raise InfeasibleDelta(
            f"delta_l = {delta_l:g} must lie in [0, delta_l_max = {cert.delta_l_max:.6g})"
        )
    return cert.decay_constant(delta_l)


def envelope(cert: StabilityCertificate, delta_l: float, z0_norm: float, t):
    """Exponential bound on ``|z_T(t)|`` under a logarithmic quantizer.

    ``sqrt(lmax(P)/lmin(P)) * exp(-pi t / (2 lmax(P))) * |z_T(0)|``;
    ``t`` may be an array.
    """
    pi = _rate_inputs(cert, delta_l)
    lmax, lmin = cert.lambda_max_P, cert.lambda_min_P
    return math.sqrt(lmax / lmin) * np.exp(-pi * np.asarray(t, dtype=float) / (2 * lmax)) * z0_norm


def printed_envelope(cert: StabilityCertificate, delta_l: float, z0_norm: float, t):
    """Variant with prefactor ``lmax/lmin`` and rate ``pi/lmax`` (for comparison only)."""
    pi = _rate_inputs(cert, delta_l)
    lmax, lmin = cert.lambda_max_P, cert.lambda_min_P
    return (lmax / lmin) * np.exp(-pi * np.asarray(t, dtype=float) / lmax) * z0_norm


def convergence_time(cert: StabilityCertificate, delta_l: float, z0_norm: float, r: float) -> float:
    """Smallest ``T`` with ``envelope(T) <= r``.

    Raises
    ------
    RadiusTooLarge
        If ``r`` exceeds the envelope at ``t = 0``.
    """
    pi = _rate_inputs(cert, delta_l)
    if not r > 0:
        raise ValueError(f"r: must be positive, got {r}")
    lmax = cert.lambda_max_P
    start = math.sqrt(lmax / cert.lambda_min_P) * z0_norm
    if r > start:
        raise RadiusTooLarge(f"r = {r:g} exceeds the initial envelope {start:.6g}")
    return max(0.0, -(2 * lmax / pi) * math.log(r / start))


def printed_convergence_time(cert: StabilityCertificate, delta_l: float, z0_norm: float,
                             r: float) -> float:
    """Convergence-time estimate derived from :func:`printed_envelope`."""
    pi = _rate_inputs(cert, delta_l)
    lmax, lmin = cert.lambda_max_P, cert.lambda_min_P
    return -(lmax / pi) * math.log(lmin * r / (lmax * z0_norm))


def estimate_lipschitz(f: Callable, low, high, samples: int = 2000, seed: int = 0,
                       n: int | None = None, t: float = 0.0) -> LipschitzBounds:
    """Sampled lower bounds on the Lipschitz constants of a drift ``f(x, v, t)``.

    Pairs of states are drawn uniformly from the box ``[low, high]`` (scalars or
    arrays of length ``2n`` laid out as ``(x, v)``).  ``xi1`` is the largest
    observed ``|f(x,v) - f(y,v)| / |x - y|`` and ``xi2`` the largest
    ``|f(x,v) - f(x,z)| / |v - z|``; any valid constants are at least as
    large.  ``f`` must broadcast over leading axes.
    """
    if samples < 2:
        raise ValueError("samples: need at least 2")
    if n is None:
        size = np.size(low) if np.size(low) > 1 else np.size(high)
        if size <= 1:
            raise ValueError("n: state dimension required when the box bounds are scalars")
        n = size // 2
    lo = np.broadcast_to(np.asarray(low, dtype=float), (2 * n,))
    hi = np.broadcast_to(np.asarray(high, dtype=float), (2 * n,))
    rng = np.random.default_rng(seed)
    a = rng.uniform(lo, hi, size=(samples, 2 * n))
    b = rng.uniform(lo, hi, size=(samples, 2 * n))
    x, v = a[:, :n], a[:, n:]
    y, z = b[:, :n], b[:, n:]
    fxv = np.asarray(f(x, v, t), dtype=float)
    dx = np.linalg.norm(np.asarray(f(y, v, t)) - fxv, axis=-1)
    dv = np.linalg.norm(np.asarray(f(x, z, t)) - fxv, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(np.linalg.norm(x - y, axis=-1) > 0, dx / np.linalg.norm(x - y, axis=-1), 0.0)
        r2 = np.where(np.linalg.norm(v - z, axis=-1) > 0, dv / np.linalg.norm(v - z, axis=-1), 0.0)
    return LipschitzBounds(float(np.max(r1)), float(np.max(r2)))


def check_lipschitz(declared: LipschitzBounds, estimate: LipschitzBounds) -> bool:
    """Warn when a sampled estimate exceeds the declared constants."""
    ok = True
    for name in ("xi1", "xi2"):
        dec, est = getattr(declared, name), getattr(estimate, name)
        if est > dec * (1 + 1e-9):
            warnings.warn(
                f"sampled {name} = {est:.6g} exceeds the declared value {dec:.6g}",
                RuntimeWarning,
                stacklevel=2,
            )
            ok = False
    return ok
