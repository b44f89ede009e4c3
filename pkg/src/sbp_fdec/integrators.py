"""Time stepping: explicit SSPRK3, Crank-Nicolson via GMRES, and the run loop."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np

from .linalg import SolveStats, SolverError, gmres
from .maxwell import MaxwellState, TestCase, divergence, hamiltonian, initial_state
from .operators import GlobalOperators2D, poisson_matrix, system_matrix

log = logging.getLogger(__name__)

SCHEMES = ("ssprk3", "crank_nicolson")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    """Exactly one of ``dt`` and ``cfl`` must be given; ``cfl`` scales the
    smallest entry of the B^z mass matrix."""

    scheme: str
    end_time: float
    dt: Optional[float] = None
    cfl: Optional[float] = None
    tol: float = 1e-12
    stride: int = 1
    restart: int = 50

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme: unknown {self.scheme!r}, expected one of {SCHEMES}")
        if (self.dt is None) == (self.cfl is None):
            raise ConfigError("dt/cfl: exactly one of dt and cfl must be set")
        if self.dt is not None and not self.dt > 0:
            raise ConfigError("dt: must be positive")
        if self.cfl is not None and not self.cfl > 0:
            raise ConfigError("cfl: must be positive")
        if not self.end_time >= 0 or not math.isfinite(self.end_time):
            raise ConfigError("end_time: must be a finite non-negative number")
        if self.scheme == "crank_nicolson" and not self.tol > 0:
            raise ConfigError("tol: must be positive")
        if self.stride < 1:
            raise ConfigError("stride: must be at least 1")
        if self.restart < 1:
            raise ConfigError("restart: must be at least 1")

    def timestep(self, ops: GlobalOperators2D) -> float:
        return self.dt if self.dt is not None else cfl_timestep(ops, self.cfl)


def cfl_timestep(ops: GlobalOperators2D, cfl: float) -> float:
    return cfl * float(np.min(ops.mass_hat_diag))


def ssprk3_step(rhs: Callable[[np.ndarray], np.ndarray], u: np.ndarray, dt: float) -> np.ndarray:
    """Three-stage, third-order strong-stability-preserving Runge-Kutta step."""
    with np.errstate(over="ignore", invalid="ignore"):  # checked below
        u1 = u + dt * rhs(u)
        u2 = 0.75 * u + 0.25 * (u1 + dt * rhs(u1))
        out = u / 3.0 + (2.0 / 3.0) * (u2 + dt * rhs(u2))
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite value in SSPRK3 stage")
    return out


class CrankNicolson:
    """Implicit midpoint stepping ``(I - dt/2 A) u+ = (I + dt/2 A) u`` for ``A = J K``.

    ``A`` is applied matrix-free as ``J (K u)`` inside GMRES; with the energy
    quadratic this is the average-vector-field discrete gradient method.
    """

    def __init__(self, apply_A: Callable[[np.ndarray], np.ndarray], tol: float = 1e-12,
                 restart: int = 50, max_iters: Optional[int] = None) -> None:
        self.apply_A = apply_A
        self.tol = tol
        self.restart = restart
        self.max_iters = max_iters
        self.last_stats: Optional[SolveStats] = None

    def step(self, u: np.ndarray, dt: float) -> np.ndarray:
        if dt == 0:
            return u.copy()
        half = 0.5 * dt
        rhs = u + half * self.apply_A(u)
        x, stats = gmres(
            lambda v: v - half * self.apply_A(v),
            rhs,
            tol=self.tol,
            restart=self.restart,
            max_iters=self.max_iters,
            x0=u,
        )
        self.last_stats = stats
        if not stats.converged:
            raise SolverError(
                f"GMRES did not converge: {stats.iterations} iterations, "
                f"relative residual {stats.final_residual:.3e}",
                stats,
            )
        return x


def poisson_apply(ops: GlobalOperators2D) -> Callable[[np.ndarray], np.ndarray]:
    """``u -> J (K u)`` as two block sparse products."""
    J, K = poisson_matrix(ops)
    return lambda u: J @ (K @ u)


def crank_nicolson_step(ops: GlobalOperators2D, state: MaxwellState, dt: float,
                        tol: float = 1e-12) -> MaxwellState:
    cn = CrankNicolson(poisson_apply(ops), tol=tol)
    u = cn.step(state.as_vector(), dt)
    return MaxwellState.from_vector(u, state.t + dt)


def maxwell_ssprk3_step(ops: GlobalOperators2D, state: MaxwellState, dt: float) -> MaxwellState:
    L = system_matrix(ops)
    u = ssprk3_step(lambda v: L @ v, state.as_vector(), dt)
    return MaxwellState.from_vector(u, state.t + dt)


# {{{ run loop


class Sample(NamedTuple):
    step: int
    t: float
    energy: float
    energy_drift: float
    div_max_nodal: float
    div_max_coeff: float


@dataclass
class RunResult:
    samples: List[Sample]
    state: MaxwellState
    dt: float
    n_steps: int
    gmres_iterations: int = 0


def step_schedule(end_time: float, dt: float) -> Tuple[int, float]:
    """Number of full steps and the length of a trailing partial step (0 if none)."""
    if end_time == 0:
        return 0, 0.0
    n = round(end_time / dt)
    if n >= 1 and abs(n * dt - end_time) <= 1e-10 * end_time:
        return n, 0.0
    n = math.floor(end_time / dt)
    return n, end_time - n * dt


def integrate(
    config: IntegratorConfig,
    ops: GlobalOperators2D,
    case: Optional[TestCase] = None,
    state: Optional[MaxwellState] = None,
    progress: Optional[Callable[[int, int], None]] = None,
) -> RunResult:
    """Advance from ``state`` (default: the test case at t = 0) to ``end_time``.

    Diagnostics are sampled at step 0, every ``stride`` steps and at the end.
    """
    if state is None:
        state = initial_state(ops) if case is None else initial_state(ops, case)
    dt = config.timestep(ops)
    n_full, tail = step_schedule(config.end_time, dt)
    n_total = n_full + (1 if tail > 0 else 0)

    if config.scheme == "ssprk3":
        L = system_matrix(ops)

        def advance(u, h):
            return ssprk3_step(lambda v: L @ v, u, h)

        cn = None
    else:
        cn = CrankNicolson(poisson_apply(ops), tol=config.tol, restart=config.restart)
        advance = cn.step

    t0 = state.t
    h0 = hamiltonian(ops, state)
    samples: List[Sample] = []
    gmres_its = 0

    def record(step: int, s: MaxwellState) -> None:
        h = hamiltonian(ops, s)
        div = divergence(ops, s)
        samples.append(Sample(step, s.t, h, h - h0, div.max_abs_nodal, div.max_abs_coeff))

    record(0, state)
    u = state.as_vector()
    for k in range(1, n_total + 1):
        h = dt if k <= n_full else tail
        u = advance(u, h)
        if cn is not None:
            gmres_its += cn.last_stats.iterations
        t = t0 + (config.end_time if k == n_total else k * dt)
        if k % config.stride == 0 or k == n_total:
            record(k, MaxwellState.from_vector(u, t))
        if progress is not None:
            progress(k, n_total)

    final_t = t0 + (config.end_time if n_total else 0.0)
    return RunResult(samples, MaxwellState.from_vector(u, final_t), dt, n_total, gmres_its)


# }}}
