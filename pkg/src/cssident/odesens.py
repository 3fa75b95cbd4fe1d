"""Sensitivity matrices from the SVIR compartment model, and a linear
dynamical system realizing a prescribed sensitivity SVD.

The SVIR right-hand side is implemented exactly as printed in the source
model: the susceptible equation carries no -nu*S term, so the total
population is not conserved; d(S+V+I+R)/dt = nu*S along trajectories.
That defect is measurable through :func:`population_defect` rather than
silently corrected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError, IntegrationFailureError
from .linalg import SvdFactors

_CBRT_EPS = float(np.finfo(np.float64).eps) ** (1.0 / 3.0)


@dataclass(frozen=True)
class SvirParams:
    """SVIR rate parameters (1/day except alpha, dimensionless)."""

    beta: float = 0.80    # transmission coefficient
    nu: float = 0.004     # vaccination rate
    alpha: float = 0.10   # infection probability after vaccination
    gamma: float = 0.14   # recovery rate

    def __post_init__(self):
        vals = (self.beta, self.nu, self.alpha, self.gamma)
        if any(not np.isfinite(v) or np.real(v) < 0 for v in vals):
            raise InputDomainError("SVIR parameters must be nonnegative and finite")

    def as_array(self, dtype=float) -> np.ndarray:
        return np.array([self.beta, self.nu, self.alpha, self.gamma], dtype=dtype)

    @classmethod
    def from_array(cls, q) -> "SvirParams":
        beta, nu, alpha, gamma = (float(np.real(x)) for x in q)
        return cls(beta=beta, nu=nu, alpha=alpha, gamma=gamma)


NOMINAL_SVIR = SvirParams()

PARAM_NAMES = ("beta", "nu", "alpha", "gamma")


@dataclass(frozen=True)
class SvirState:
    """Compartment counts S, V, I, R and the population constant N."""

    s: float
    v: float
    i: float
    r: float
    n: float = 1e5

    def __post_init__(self):
        if not np.isfinite(self.n) or self.n <= 0:
            raise InputDomainError("population N must be positive and finite")

    def as_array(self, dtype=float) -> np.ndarray:
        return np.array([self.s, self.v, self.i, self.r], dtype=dtype)


def default_initial_state(n_total: float = 1e5, i0: float = 10.0) -> SvirState:
    """Artifact default: I0 infectious seeded into an otherwise
    susceptible population."""
    return SvirState(s=n_total - i0, v=0.0, i=i0, r=0.0, n=n_total)


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing observation times (days)."""

    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 1:
            raise InputDomainError("time grid must be a nonempty 1-D sequence")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise InputDomainError("time grid must be strictly increasing")
        object.__setattr__(self, "times", t)
        t.flags.writeable = False

    def __len__(self) -> int:
        return self.times.size

    @classmethod
    def days(cls, count: int) -> "TimeGrid":
        """Daily grid t = 0, 1, ..., count-1."""
        return cls(np.arange(float(count)))


DEFAULT_GRID = TimeGrid.days(31)


@dataclass(frozen=True)
class SensMethod:
    """Derivative approximation: 'central-fd' (relative step) or
    'complex-step' (absolute step)."""

    kind: str
    step: float

    def __post_init__(self):
        if self.kind not in ("central-fd", "complex-step"):
            raise InputDomainError(f"unknown sensitivity method {self.kind!r}")
        if not self.step > 0:
            raise InputDomainError("step must be positive")

    @classmethod
    def central_fd(cls, step: float = _CBRT_EPS) -> "SensMethod":
        return cls(kind="central-fd", step=step)

    @classmethod
    def complex_step(cls, step: float = 1e-20) -> "SensMethod":
        return cls(kind="complex-step", step=step)


def svir_rhs(state, params: SvirParams, n_total: float | None = None):
    """Time derivative of (S, V, I, R), exactly as printed.

    ``state`` may be an :class:`SvirState` or a length-4 array (real or
    complex); arrays are required for complex-step evaluation.
    """
    if isinstance(state, SvirState):
        x = state.as_array()
        n_total = state.n
    else:
        x = np.asarray(state)
        if n_total is None:
            raise InputDomainError("array state needs an explicit n_total")
    s, v, i, r = x
    beta, nu, alpha, gamma = (params.beta, params.nu, params.alpha, params.gamma)
    infection_s = beta * i * s / n_total
    infection_v = alpha * beta * i * v / n_total
    return np.array(
        [-infection_s,
         nu * s - infection_v,
         infection_s + infection_v - gamma * i,
         gamma * i],
        dtype=np.result_type(x.dtype, float),
    )


def integrate(rhs, x0, grid: TimeGrid, substeps: int = 100) -> np.ndarray:
    """Classical fixed-step RK4 over the grid.

    ``rhs(t, x)`` must return dx/dt; each grid interval is split into
    ``substeps`` uniform steps.  Works on real and complex states.  The
    first output row is x0 at grid.times[0].
    """
    if substeps < 1:
        raise InputDomainError("substeps must be >= 1")
    x = np.asarray(x0)
    if x.ndim != 1:
        raise InputDomainError("x0 must be a 1-D state vector")
    dtype = np.result_type(x.dtype, float)
    x = x.astype(dtype)
    times = grid.times
    out = np.empty((times.size, x.size), dtype=dtype)
    out[0] = x
    for idx in range(times.size - 1):
        h = (times[idx + 1] - times[idx]) / substeps
        t = times[idx]
        for _ in range(substeps):
            k1 = rhs(t, x)
            k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2)
            k4 = rhs(t + h, x + h * k3)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t = t + h
            if not np.all(np.isfinite(x)):
                raise IntegrationFailureError(
                    f"non-finite state at t={float(np.real(t)):.6g}",
                    time=float(np.real(t)),
                )
        out[idx + 1] = x
    return out


def svir_infectious_trajectory(q, ic: SvirState, grid: TimeGrid,
                               substeps: int = 100) -> np.ndarray:
    """I(t) over the grid for a parameter vector q (real or complex)."""
    q = np.asarray(q)
    dtype = np.result_type(q.dtype, float)
    beta, nu, alpha, gamma = q
    n_total = ic.n

    def rhs(_t, x):
        s, v, i, _r = x
        inf_s = beta * i * s / n_total
        inf_v = alpha * beta * i * v / n_total
        return np.array(
            [-inf_s, nu * s - inf_v, inf_s + inf_v - gamma * i, gamma * i],
            dtype=dtype,
        )

    traj = integrate(rhs, ic.as_array(dtype), grid, substeps)
    return traj[:, 2]


def svir_sensitivity(params: SvirParams, ic: SvirState | None = None,
                     grid: TimeGrid | None = None,
                     method: SensMethod | None = None,
                     substeps: int = 100) -> np.ndarray:
    """n x 4 sensitivity of I(t_i) to (beta, nu, alpha, gamma).

    central-fd perturbs each parameter by step*max(|q_j|, 1e-8) on both
    sides; complex-step evaluates Im f(q + ih e_j)/h with absolute step h.
    """
    ic = ic or default_initial_state()
    grid = grid or DEFAULT_GRID
    method = method or SensMethod.complex_step()
    if len(grid) < 4:
        raise InputDomainError("sensitivity grid needs at least 4 observations")
    q0 = params.as_array()
    n = len(grid)
    sens = np.empty((n, 4))
    if method.kind == "central-fd":
        for j in range(4):
            h = method.step * max(abs(q0[j]), 1e-8)
            qp = q0.copy()
            qp[j] += h
            qm = q0.copy()
            qm[j] -= h
            fp = svir_infectious_trajectory(qp, ic, grid, substeps)
            fm = svir_infectious_trajectory(qm, ic, grid, substeps)
            sens[:, j] = (fp - fm) / (2.0 * h)
    else:
        h = method.step
        for j in range(4):
            qc = q0.astype(complex)
            qc[j] += 1j * h
            sens[:, j] = np.imag(
                svir_infectious_trajectory(qc, ic, grid, substeps)
            ) / h
    return sens


def population_defect(params: SvirParams, ic: SvirState, grid: TimeGrid,
                      substeps: int, reference_integral: float) -> float:
    """|(S+V+I+R)(T) - (S+V+I+R)(0) - nu * integral(S dt)|.

    ``reference_integral`` must be an accurate value of integral(S dt);
    the defect then isolates the RK4 error of the trajectory itself.
    """
    def rhs(_t, x):
        return svir_rhs(x, params, ic.n)

    traj = integrate(rhs, ic.as_array(), grid, substeps)
    total_change = float(traj[-1].sum() - traj[0].sum())
    return abs(total_change - params.nu * reference_integral)


def susceptible_integral(params: SvirParams, ic: SvirState, grid: TimeGrid,
                         substeps: int = 800) -> float:
    """integral of S dt over the grid, via an augmented quadrature state."""
    def rhs(_t, x):
        d = svir_rhs(x[:4], params, ic.n)
        return np.concatenate([d, x[:1]])

    x0 = np.concatenate([ic.as_array(), [0.0]])
    traj = integrate(rhs, x0, grid, substeps)
    return float(traj[-1, 4])


def sample_nominal_neighborhood(params: SvirParams, fraction: float,
                                seed) -> SvirParams:
    """Uniform draw of each component from [(1-f) q_j, (1+f) q_j]."""
    if not 0.0 <= fraction < 1.0:
        raise InputDomainError("fraction must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    q = params.as_array()
    lo, hi = (1.0 - fraction) * q, (1.0 + fraction) * q
    return SvirParams.from_array(rng.uniform(lo, hi))


@dataclass(frozen=True)
class PrescribedSystem:
    """Diagonal linear system dx/dt = diag(lam) x, x(0) = V^T q, y = U x,
    whose sensitivity matrix at t = horizon equals U diag(sigma) V^T."""

    lam: np.ndarray
    u: np.ndarray
    v: np.ndarray
    horizon: float

    def __post_init__(self):
        for arr in (self.lam, self.u, self.v):
            np.asarray(arr).flags.writeable = False

    @property
    def sigma(self) -> np.ndarray:
        return np.exp(self.horizon * self.lam)


def build_prescribed_system(factors: SvdFactors, horizon: float) -> PrescribedSystem:
    """Pick decay rates lam_j = ln(sigma_j)/T so exp(T lam_j) = sigma_j.

    Zero singular values are rejected: the logarithm is undefined and the
    construction has no limit there.
    """
    if not horizon > 0:
        raise InputDomainError("horizon T must be positive")
    sigma = np.asarray(factors.sigma, dtype=float)
    if np.any(sigma <= 0.0):
        raise InputDomainError(
            "prescribed system needs strictly positive singular values"
        )
    lam = np.log(sigma) / horizon
    return PrescribedSystem(lam=lam, u=np.asarray(factors.u, dtype=float),
                            v=np.asarray(factors.v, dtype=float), horizon=horizon)


def observe_prescribed(system: PrescribedSystem, q, t: float) -> np.ndarray:
    """Closed-form observation y(t) = U diag(exp(t lam)) V^T q."""
    q = np.asarray(q, dtype=float)
    return system.u @ (np.exp(t * system.lam) * (system.v.T @ q))


def observe_prescribed_integrated(system: PrescribedSystem, q, t: float,
                                  substeps: int = 2000) -> np.ndarray:
    """Same observation through RK4 integration (closed-form cross-check)."""
    q = np.asarray(q, dtype=float)
    x0 = system.v.T @ q
    grid = TimeGrid(np.array([0.0, t]) if t > 0 else np.array([0.0]))
    if t == 0:
        return system.u @ x0
    traj = integrate(lambda _t, x: system.lam * x, x0, grid, substeps)
    return system.u @ traj[-1]


@dataclass(frozen=True)
class PrescribedReport:
    rel_error: float
    tol: float
    passed: bool


def verify_prescribed_sensitivity(system: PrescribedSystem, q,
                                  tol: float = 1e-10) -> PrescribedReport:
    """Central finite differences of the observation over q at t = T,
    compared against U diag(sigma) V^T in the spectral norm.

    The observation is linear in q, so the check is h-independent up to
    roundoff; steps of max(1, |q_j|) keep the subtraction well scaled.
    """
    q = np.asarray(q, dtype=float)
    p = q.size
    target = system.u @ (system.sigma[:, None] * system.v.T)
    fd = np.empty_like(target)
    for j in range(p):
        h = max(1.0, abs(q[j]))
        qp = q.copy()
        qp[j] += h
        qm = q.copy()
        qm[j] -= h
        fd[:, j] = (
            observe_prescribed(system, qp, system.horizon)
            - observe_prescribed(system, qm, system.horizon)
        ) / (2.0 * h)
    sigma1 = float(np.max(system.sigma))
    rel = float(np.linalg.norm(fd - target, 2) / sigma1)
    return PrescribedReport(rel_error=rel, tol=tol, passed=rel <= tol)
