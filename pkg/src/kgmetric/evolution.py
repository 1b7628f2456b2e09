"""Time evolution for the doubled system and the underlying field equation.

Two integrators:

* ``evolve_schrodinger`` steps i dPsi/dt = H(t) Psi with midpoint-rule
  propagators exp(-i dt H(t_mid)). Each step exponential comes from the
  closed-form eigensystem of H built out of the spectral data of D(t_mid),
  so for constant D the step is exact and the only error source is the
  midpoint sampling of a time-dependent D (second order).
* ``evolve_field`` integrates psi'' + D(t) psi = 0 by classical fixed-step
  RK4 on (psi, psi_dot), an independent route used to cross-check the
  doubled evolution and to feed the drift monitors.

Both guard against blow-up (pseudo-real spectra can grow exponentially) and
record samples along the way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonFiniteStateError,
    ZeroStepsError,
)
from .spectral import DEFAULT_TOL, SpectralDecomposition, hermitian_eigendecompose
from .two_component import FieldState, TwoComponentState, eigen_system

BLOWUP_LIMIT = 1e12

MONITOR_NAMES = ("solution_inner", "kg_inner", "frozen_inner")


@dataclass
class EvolutionResult:
    """Doubled-state trajectory with its accumulated propagator."""

    times: np.ndarray
    state_matrix: np.ndarray  # (n_samples, 2n)
    lam: float
    propagator: np.ndarray  # (2n, 2n), full-interval U
    propagator_samples: np.ndarray | None = None  # (n_samples, 2n, 2n)
    drift: dict | None = None

    def __len__(self) -> int:
        return self.times.shape[0]

    def state(self, i: int) -> TwoComponentState:
        return TwoComponentState.from_vector(self.state_matrix[i], self.lam)

    @property
    def samples(self) -> list:
        """(t, TwoComponentState) pairs for every recorded sample."""
        return [(float(t), self.state(i)) for i, t in enumerate(self.times)]


@dataclass
class FieldTrajectory:
    """Sampled field data along an integration."""

    times: np.ndarray
    psis: np.ndarray  # (n_samples, n)
    psi_dots: np.ndarray  # (n_samples, n)

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def n(self) -> int:
        return self.psis.shape[1]

    def state(self, i: int) -> FieldState:
        return FieldState(self.psis[i], self.psi_dots[i])

    def at_time(self, t: float, atol: float = 1e-9) -> FieldState:
        """Sample closest to t; raises if none lies within atol."""
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > atol:
            raise ValueError(
                f"no sample at t={t} (closest is {self.times[i]}, atol {atol})"
            )
        return self.state(i)


@dataclass
class MonitorSeries:
    """One monitored product along a trajectory."""

    values: np.ndarray
    deviations: np.ndarray
    max_deviation: float


@dataclass
class DriftTable:
    """Per-monitor drift relative to the initial value."""

    monitors: dict

    @property
    def max_deviation(self) -> float:
        if not self.monitors:
            return 0.0
        return max(series.max_deviation for series in self.monitors.values())


def _check_steps(steps) -> int:
    if not isinstance(steps, (int, np.integer)) or steps < 1:
        raise ZeroStepsError(f"steps must be a positive integer, got {steps!r}")
    return int(steps)


def _spectral_source(d_of_t, tol: float):
    """Normalize a D source to (t -> SpectralDecomposition, is_constant)."""
    if isinstance(d_of_t, SpectralDecomposition):
        return (lambda t: d_of_t), True
    if callable(d_of_t):
        def query(t: float) -> SpectralDecomposition:
            out = d_of_t(t)
            if isinstance(out, SpectralDecomposition):
                return out
            return hermitian_eigendecompose(np.asarray(out, dtype=complex), tol)

        return query, False
    spec = hermitian_eigendecompose(np.asarray(d_of_t, dtype=complex), tol)
    return (lambda t: spec), True


def _matrix_source(d_of_t):
    """Normalize a D source to (t -> ndarray, is_constant)."""
    if isinstance(d_of_t, SpectralDecomposition):
        mat = d_of_t.matrix()
        return (lambda t: mat), True
    if callable(d_of_t):
        def query(t: float) -> np.ndarray:
            out = d_of_t(t)
            if isinstance(out, SpectralDecomposition):
                return out.matrix()
            return np.asarray(out, dtype=complex)

        return query, False
    mat = np.asarray(d_of_t, dtype=complex)
    return (lambda t: mat), True


def _guard(vec: np.ndarray, t: float) -> None:
    peak = float(np.max(np.abs(vec))) if vec.size else 0.0
    if not np.isfinite(peak) or peak > BLOWUP_LIMIT:
        raise NonFiniteStateError(
            f"state blew past {BLOWUP_LIMIT:.0e} at t={t:.6g} (max {peak:.3e})"
        )


def _step_propagator(
    spec: SpectralDecomposition, lam: float, dt: float, allow_complex: bool
) -> np.ndarray:
    """exp(-i dt H) from the closed-form eigensystem of H."""
    sys = eigen_system(spec, lam, allow_complex=allow_complex)
    phases = np.exp(-1j * dt * sys.energies)
    return (sys.right_vectors * phases) @ sys.left_vectors.conj().T


def evolve_schrodinger(
    d_of_t,
    psi0: TwoComponentState,
    t0: float,
    t1: float,
    steps: int,
    tol: float = DEFAULT_TOL,
    sample_every: int = 1,
    store_propagators: bool = False,
    allow_complex: bool = False,
) -> EvolutionResult:
    """Midpoint-rule propagation of the doubled system.

    Parameters
    ----------
    d_of_t : matrix, SpectralDecomposition, or callable t -> either
        The spatial operator source. Callables are re-diagonalized at each
        step midpoint; constant sources are diagonalized once and reuse a
        single exact step exponential.
    psi0 : TwoComponentState
        Initial doubled state; its lam fixes the Hamiltonian packing.
    steps : int
        Number of equal steps from t0 to t1 (ZeroStepsError if < 1).
    sample_every : int
        Record every k-th step (the endpoint is always recorded).
    store_propagators : bool
        Also record the accumulated propagator at each sample.

    Returns
    -------
    EvolutionResult
        samples, the full-interval propagator U(t1, t0) as an ordered
        product of step exponentials, and optionally per-sample propagators.
    """
    steps = _check_steps(steps)
    sample_every = max(1, int(sample_every))
    source, constant = _spectral_source(d_of_t, tol)
    dt = (t1 - t0) / steps
    n2 = 2 * psi0.n

    u_total = np.eye(n2, dtype=complex)
    vec = psi0.vector.copy()
    times = [t0]
    states = [vec.copy()]
    props = [u_total.copy()] if store_propagators else None

    u_step = None
    if constant:
        u_step = _step_propagator(source(t0), psi0.lam, dt, allow_complex)
    for k in range(1, steps + 1):
        if not constant:
            t_mid = t0 + (k - 0.5) * dt
            u_step = _step_propagator(source(t_mid), psi0.lam, dt, allow_complex)
        vec = u_step @ vec
        u_total = u_step @ u_total
        t_k = t0 + k * dt
        _guard(vec, t_k)
        if k % sample_every == 0 or k == steps:
            times.append(t_k)
            states.append(vec.copy())
            if props is not None:
                props.append(u_total.copy())

    return EvolutionResult(
        times=np.asarray(times, dtype=float),
        state_matrix=np.asarray(states),
        lam=psi0.lam,
        propagator=u_total,
        propagator_samples=np.asarray(props) if props is not None else None,
    )


def evolve_field(
    d_of_t,
    f0: FieldState,
    t0: float,
    t1: float,
    steps: int,
    sample_every: int = 1,
) -> FieldTrajectory:
    """Classical RK4 for psi'' + D(t) psi = 0 on stacked (psi, psi_dot).

    An integration route independent of the doubled propagator: no spectral
    data is used, only D(t) matrix-vector products at the RK4 stage times.
    Fourth-order accurate in the step; blow-up guarded at 1e12.
    """
    steps = _check_steps(steps)
    sample_every = max(1, int(sample_every))
    source, constant = _matrix_source(d_of_t)
    dt = (t1 - t0) / steps

    psi = f0.psi.astype(complex).copy()
    dot = f0.psi_dot.astype(complex).copy()
    times = [t0]
    psis = [psi.copy()]
    dots = [dot.copy()]

    d_lo = source(t0) if constant else None
    for k in range(1, steps + 1):
        t_prev = t0 + (k - 1) * dt
        if constant:
            d0 = d_mid = d1 = d_lo
        else:
            d0 = source(t_prev)
            d_mid = source(t_prev + 0.5 * dt)
            d1 = source(t_prev + dt)
        # k1..k4 on y = (psi, dot), y' = (dot, -D(t) psi)
        k1p = dot
        k1d = -(d0 @ psi)
        k2p = dot + 0.5 * dt * k1d
        k2d = -(d_mid @ (psi + 0.5 * dt * k1p))
        k3p = dot + 0.5 * dt * k2d
        k3d = -(d_mid @ (psi + 0.5 * dt * k2p))
        k4p = dot + dt * k3d
        k4d = -(d1 @ (psi + dt * k3p))
        psi = psi + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        dot = dot + (dt / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
        t_k = t0 + k * dt
        _guard(psi, t_k)
        _guard(dot, t_k)
        if k % sample_every == 0 or k == steps:
            times.append(t_k)
            psis.append(psi.copy())
            dots.append(dot.copy())

    return FieldTrajectory(
        times=np.asarray(times, dtype=float),
        psis=np.asarray(psis),
        psi_dots=np.asarray(dots),
    )


def field_trajectory(result: EvolutionResult) -> FieldTrajectory:
    """Unpack a doubled-system run into field samples."""
    n = result.state_matrix.shape[1] // 2
    upper = result.state_matrix[:, :n]
    lower = result.state_matrix[:, n:]
    return FieldTrajectory(
        times=result.times,
        psis=0.5 * (upper + lower),
        psi_dots=(upper - lower) / (2j * result.lam),
    )


def _deviations(values: np.ndarray) -> tuple[np.ndarray, float]:
    v0 = values[0]
    scale = abs(v0) if abs(v0) > 1e-12 else 1.0
    dev = np.abs(values - v0) / scale
    return dev, float(np.max(dev))


def drift_report(
    traj: FieldTrajectory,
    d_spec,
    spec,
    monitors=("solution_inner",),
    traj2: FieldTrajectory | None = None,
    lam: float = 1.0,
) -> DriftTable:
    """Track inner products along a trajectory (pair) against their t0 value.

    Parameters
    ----------
    traj, traj2 : FieldTrajectory
        The monitored pair; traj2 defaults to traj (self products).
    d_spec : SpectralDecomposition or callable t -> SpectralDecomposition
        Constant sources evaluate every monitor vectorized; a callable makes
        ``solution_inner`` instantaneous (re-evaluated at each sample time)
        while ``frozen_inner`` stays pinned to the t0 operator.
    monitors : iterable of {"solution_inner", "kg_inner", "frozen_inner"}

    Deviation is relative to the t0 value, falling back to absolute when the
    t0 value is below 1e-12 in magnitude.
    """
    from .inner_products import solution_inner  # local import avoids a cycle

    other = traj if traj2 is None else traj2
    if other.n != traj.n or len(other) != len(traj):
        raise DimensionMismatchError("trajectories must share shape and sampling")
    names = tuple(monitors)
    for name in names:
        if name not in MONITOR_NAMES:
            raise ValueError(f"unknown monitor {name!r}; pick from {MONITOR_NAMES}")

    constant = isinstance(d_spec, SpectralDecomposition)
    spec_at = (lambda t: d_spec) if constant else d_spec

    table = {}
    if "solution_inner" in names or "frozen_inner" in names:
        if constant:
            sol_values = _pair_inner_vectorized(traj, other, d_spec, spec)
        else:
            sol_values = np.array(
                [
                    solution_inner(traj.state(i), other.state(i), spec_at(t), spec)
                    for i, t in enumerate(traj.times)
                ]
            )
        if "solution_inner" in names:
            dev, peak = _deviations(sol_values)
            table["solution_inner"] = MonitorSeries(sol_values, dev, peak)
        if "frozen_inner" in names:
            frozen = np.full(len(traj), sol_values[0])
            dev, peak = _deviations(frozen)
            table["frozen_inner"] = MonitorSeries(frozen, dev, peak)
    if "kg_inner" in names:
        kg_values = 2j * lam * (
            np.sum(np.conj(traj.psis) * other.psi_dots, axis=1)
            - np.sum(np.conj(traj.psi_dots) * other.psis, axis=1)
        )
        dev, peak = _deviations(kg_values)
        table["kg_inner"] = MonitorSeries(kg_values, dev, peak)
    return DriftTable(table)


def _pair_inner_vectorized(traj, other, d_spec, spec) -> np.ndarray:
    """solution_inner across all samples at once (constant D)."""
    w = d_spec.eigenvalues
    v = d_spec.eigenvectors
    c1 = traj.psis @ np.conj(v)
    d1 = traj.psi_dots @ np.conj(v)
    c2 = other.psis @ np.conj(v)
    d2 = other.psi_dots @ np.conj(v)
    lp = spec.l_plus_coeff
    lm = spec.l_minus_coeff
    root_w = np.sqrt(w)
    total = (
        (np.conj(c1) * c2) @ lp
        + (np.conj(d1) * d2) @ (lp / w)
        + 1j * ((np.conj(c1) * d2 - np.conj(d1) * c2) @ (lm / root_w))
    )
    return 0.5 * total
