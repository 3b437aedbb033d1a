"""Closed-loop simulation of second-order agents under quantized coupling.

Agent ``i`` obeys ``x_i' = v_i``, ``v_i' = f(x_i, v_i, t) + u_i`` with

    u = -sigma^2 (E_odot^w kron I) Q((E^T kron I) x) - sigma^3 (E_odot^w kron I) Q((E^T kron I) v).

States are kept as ``(N, n)`` arrays; the stacked vector of the matrix form
is ``X.ravel()``.  Drifts are callables ``f(x, v, t)`` acting on the last
axis and broadcasting over leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from . import _kernel
from .certify import GainParams
from .errors import DimensionMismatch, InsufficientSamples, NonFiniteState
from .graph import EdgeDecomposition
from .quantizers import Family, QuantizerSpec, quantize_vector

__all__ = [
    "ChuaParams",
    "chua_drift",
    "zero_drift",
    "control_input",
    "seeded_initial_state",
    "simulate",
    "Trajectory",
    "ReducedCheck",
    "reduced_rhs_check",
    "steady_state_error",
]


@dataclass(frozen=True)
class ChuaParams:
    """Chua-circuit drift parameters (defaults: the chaotic regime).

    Instances are drifts themselves: ``p(x, v, t)`` evaluates
    :func:`chua_drift`.
    """

    zeta: float = 0.01
    tau: float = 0.001
    chi: float = 0.018
    a: float = -4.0 / 3.0
    b: float = -3.0 / 4.0

    def __post_init__(self):
        for name in ("zeta", "tau", "chi", "a", "b"):
            val = float(getattr(self, name))
            if not np.isfinite(val):
                raise ValueError(f"{name}: must be finite")
            object.__setattr__(self, name, val)

    def as_array(self) -> np.ndarray:
        return np.array([self.zeta, self.tau, self.chi, self.a, self.b])

    def __call__(self, x, v, t=0.0):
        return chua_drift(v, self)


def chua_drift(v, p: ChuaParams = ChuaParams()) -> np.ndarray:
    """Chua drift; depends on the velocity only, last axis must have length 3."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != 3:
        raise DimensionMismatch(f"Chua drift needs n = 3, got {v.shape[-1]}")
    v1, v2, v3 = v[..., 0], v[..., 1], v[..., 2]
    ell = p.b * v1 + 0.5 * (p.a - p.b) * (np.abs(v1 + 1.0) - np.abs(v1 - 1.0))
    return np.stack([p.zeta * (-v1 + v2 - ell), p.tau * (v1 - v2 + v3), -p.chi * v2], axis=-1)


def zero_drift(x, v, t=0.0):
    return np.zeros_like(np.asarray(v, dtype=float))


def _check_states(d: EdgeDecomposition, x, v) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.ndim != 2 or x.shape[0] != d.num_nodes:
        raise DimensionMismatch(f"positions must have shape (N={d.num_nodes}, n), got {x.shape}")
    if v.shape != x.shape:
        raise DimensionMismatch(f"velocities {v.shape} do not match positions {x.shape}")
    return x, v


def control_input(d: EdgeDecomposition, gains: GainParams, spec: QuantizerSpec, x, v) -> np.ndarray:
    """Quantized consensus input for positions/velocities of shape ``(N, n)``."""
    x, v = _check_states(d, x, v)
    qx = quantize_vector(d.E.T @ x, spec)
    qv = quantize_vector(d.E.T @ v, spec)
    return -gains.alpha * (d.E_odot_w @ qx) - gains.beta * (d.E_odot_w @ qv)


def seeded_initial_state(num_nodes: int, n: int, low: float = -2.0, high: float = 2.0,
                         seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Uniform random positions and velocities in ``[low, high]``."""
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(low, high, size=(num_nodes, n))
    v0 = rng.uniform(low, high, size=(num_nodes, n))
    return x0, v0


@dataclass(eq=False)
class Trajectory:
    """Sampled closed-loop run with derived edge and spanning-tree states.

    Edge-indexed arrays follow the decomposition's tree-first ordering.
    """

    times: np.ndarray
    x: np.ndarray
    v: np.ndarray
    decomposition: EdgeDecomposition
    gains: GainParams
    quantizer: QuantizerSpec
    drift: Callable
    dt: float
    sample_every: int

    @property
    def num_samples(self) -> int:
        return self.times.size

    @cached_property
    def x_e(self) -> np.ndarray:
        return np.matmul(self.decomposition.E.T, self.x)

    @cached_property
    def v_e(self) -> np.ndarray:
        return np.matmul(self.decomposition.E.T, self.v)

    @cached_property
    def x_T(self) -> np.ndarray:
        return np.matmul(self.decomposition.E_T.T, self.x)

    @cached_property
    def v_T(self) -> np.ndarray:
        return np.matmul(self.decomposition.E_T.T, self.v)

    @cached_property
    def z_T_norm(self) -> np.ndarray:
        return np.sqrt(np.sum(self.x_T**2, axis=(1, 2)) + np.sum(self.v_T**2, axis=(1, 2)))

    def identity_residual(self) -> float:
        """Max deviation in ``x_e = (E^T kron I) x = (R^T kron I) x_T`` and the v analogue."""
        d = self.decomposition
        res = [
            np.abs(np.matmul(d.R.T, self.x_T) - self.x_e).max(),
            np.abs(np.matmul(d.R.T, self.v_T) - self.v_e).max(),
        ]
        return float(max(res))


def _resolve_drift(drift) -> tuple[Callable, int | None, np.ndarray]:
    if drift is None or (isinstance(drift, str) and drift == "zero") or drift is zero_drift:
        return zero_drift, _kernel.DRIFT_ZERO, np.zeros(5)
    if isinstance(drift, str) and drift == "chua":
        drift = ChuaParams()
    if isinstance(drift, ChuaParams):
        return drift, _kernel.DRIFT_CHUA, drift.as_array()
    if callable(drift):
        return drift, None, np.zeros(5)
    raise TypeError(f"unsupported drift {drift!r}")


def _rk4_numpy(d, gains, spec, f, X0, V0, dt, nsteps, sample_every):
    def rhs(X, V, t):
        return V, f(X, V, t) + control_input(d, gains, spec, X, V)

    nsamp = nsteps // sample_every + 1
    Xs = np.empty((nsamp,) + X0.shape)
    Vs = np.empty_like(Xs)
    X, V = X0.copy(), V0.copy()
    Xs[0], Vs[0] = X, V
    h2, h6 = dt / 2.0, dt / 6.0
    # blow-up is reported through NonFiniteState, not floating-point warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(nsteps):
            t = step * dt
            k1x, k1v = rhs(X, V, t)
            k2x, k2v = rhs(X + h2 * k1x, V + h2 * k1v, t + h2)
            k3x, k3v = rhs(X + h2 * k2x, V + h2 * k2v, t + h2)
            k4x, k4v = rhs(X + dt * k3x, V + dt * k3v, t + dt)
            X = X + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            V = V + h6 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            if not (np.all(np.isfinite(X)) and np.all(np.isfinite(V))):
                return Xs, Vs, step
            if (step + 1) % sample_every == 0:
                s = (step + 1) // sample_every
                Xs[s], Vs[s] = X, V
    return Xs, Vs, -1


def simulate(d: EdgeDecomposition, gains: GainParams, spec: QuantizerSpec, drift, x0, v0,
             horizon: float, dt: float = 1e-3, sample_every: int = 100,
             backend: str = "auto") -> Trajectory:
    """Integrate the closed loop with classical fixed-step RK4.

    The quantizer is evaluated inside every stage.  ``horizon`` is rounded to
    a whole number of steps and samples are taken at ``k * sample_every * dt``.

    Parameters
    ----------
    drift : None, "zero", "chua", ChuaParams or callable
        Built-in drifts run in a compiled loop; any other callable
        ``f(x, v, t)`` uses the numpy loop.
    backend : {"auto", "compiled", "numpy"}
        Force a code path; "compiled" is only available for built-in drifts.

    Raises
    ------
    NonFiniteState
        If the state blows up; the exception's ``time`` is the failing instant.
    """
    x0, v0 = _check_states(d, x0, v0)
    if not dt > 0:
        raise ValueError(f"dt: must be positive, got {dt}")
    if not horizon >= dt:
        raise ValueError(f"horizon: must be at least dt, got {horizon}")
    if sample_every < 1:
        raise ValueError("sample_every: must be >= 1")
    nsteps = int(round(horizon / dt))
    f, dcode, chua = _resolve_drift(drift)
    if dcode == _kernel.DRIFT_CHUA and x0.shape[1] != 3:
        raise DimensionMismatch(f"Chua drift needs n = 3, got {x0.shape[1]}")
    if backend == "compiled" and dcode is None:
        raise ValueError("compiled backend supports only the built-in drifts")
    if backend not in ("auto", "compiled", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")

    if dcode is not None and backend != "numpy":
        Xs, Vs, fail = _kernel.rk4_run(
            d.tails, d.heads, d.weights, gains.alpha, gains.beta, spec.code, spec.delta_u,
            dcode, chua, np.ascontiguousarray(x0), np.ascontiguousarray(v0), float(dt),
            nsteps, int(sample_every),
        )
    else:
        Xs, Vs, fail = _rk4_numpy(d, gains, spec, f, x0, v0, dt, nsteps, sample_every)
    if fail >= 0:
        t_fail = (fail + 1) * dt
        raise NonFiniteState(f"state became non-finite at t = {t_fail:.6g} s", time=t_fail)

    times = np.arange(Xs.shape[0]) * (sample_every * dt)
    return Trajectory(times, Xs, Vs, d, gains, spec, f, float(dt), int(sample_every))


def steady_state_error(traj: Trajectory, fraction: float = 0.1) -> float:
    """Max of ``|z_T|`` over the final ``fraction`` of the horizon."""
    start = traj.times[-1] * (1.0 - fraction)
    return float(traj.z_T_norm[traj.times >= start - 1e-12].max())


@dataclass(frozen=True)
class ReducedCheck:
    max_residual: float
    residuals: np.ndarray
    indices: np.ndarray
    switching: np.ndarray

    @property
    def num_excluded(self) -> int:
        return int(self.switching.sum())


def _crosses_lattice(window: np.ndarray, reach: np.ndarray, spec: QuantizerSpec) -> bool:
    """Whether the quantizer output can change anywhere near a sample window.

    Both quantizers are monotone, so the output is constant on an interval
    iff it agrees at the endpoints.  The hull of the window is padded by the
    largest inter-sample step and by ``reach`` (how far an RK4 stage can move
    the state) to catch crossings that never show up at the samples.
    """
    lo, hi = window.min(axis=0), window.max(axis=0)
    pad = np.maximum(np.abs(np.diff(window, axis=0)).max(axis=0), reach)
    return not np.array_equal(quantize_vector(lo - pad, spec), quantize_vector(hi + pad, spec))


def reduced_rhs_check(traj: Trajectory, indices=None, mask_switching: bool = True) -> ReducedCheck:
    """Compare the reduced spanning-tree model against the simulated run.

    At each interior sample the right side
    ``F_T + (L_T kron I) z_T + (L_T1 kron I) omega`` is evaluated from the
    stored node states and compared with a centered difference of ``z_T``.
    Samples whose three-point window, widened by the distance an edge state
    can travel in one integrator step, straddles a quantizer lattice boundary
    are flagged as switching and left out of ``max_residual``.  Under
    quantization the closed loop tends to chatter along boundaries, so most
    samples can end up flagged; ``max_residual`` is NaN when all are.
    """
    if traj.num_samples < 3:
        raise InsufficientSamples(f"need at least 3 samples, got {traj.num_samples}")
    d, s, spec = traj.decomposition, traj.gains.sigma, traj.quantizer
    if indices is None:
        indices = np.arange(1, traj.num_samples - 1)
    indices = np.asarray(indices, dtype=int)
    if np.any(indices < 1) or np.any(indices > traj.num_samples - 2):
        raise InsufficientSamples("indices must have a neighbouring sample on each side")

    m, L = d.num_nodes - 1, d.num_edges
    I, Z = np.eye(m), np.zeros((m, m))
    L_T = np.block([[Z, I], [-s**2 * d.L_hat_e, -s**3 * d.L_hat_e]])
    zL = np.zeros((m, L))
    L_T1 = np.block([[zL, zL], [-s**2 * d.L_hat_O, -s**3 * d.L_hat_O]])

    z_T = np.concatenate([traj.x_T, traj.v_T], axis=1)
    h = traj.sample_every * traj.dt
    qx = quantize_vector(traj.x_e, spec)
    qv = quantize_vector(traj.v_e, spec)

    residuals = np.empty(indices.size)
    switching = np.zeros(indices.size, dtype=bool)
    for j, i in enumerate(indices):
        F = np.asarray(traj.drift(traj.x[i], traj.v[i], traj.times[i]), dtype=float)
        F_T = np.vstack([np.zeros((m, F.shape[1])), d.E_T.T @ F])
        omega = np.vstack([qx[i] - traj.x_e[i], qv[i] - traj.v_e[i]])
        rhs = F_T + L_T @ z_T[i] + L_T1 @ omega
        fd = (z_T[i + 1] - z_T[i - 1]) / (2.0 * h)
        residuals[j] = np.abs(fd - rhs).max()
        if spec.family is not Family.NONE:
            window = slice(i - 1, i + 2)
            acc = F + control_input(d, traj.gains, spec, traj.x[i], traj.v[i])
            reach_x = traj.dt * np.abs(traj.v_e[window]).max(axis=0)
            reach_v = 2 * traj.dt * np.abs(d.E.T @ acc)
            switching[j] = (_crosses_lattice(traj.x_e[window], reach_x, spec)
                            or _crosses_lattice(traj.v_e[window], reach_v, spec))
    keep = ~switching if mask_switching else np.ones_like(switching)
    max_res = float(residuals[keep].max()) if keep.any() else float("nan")
    return ReducedCheck(max_res, residuals, indices, switching)
