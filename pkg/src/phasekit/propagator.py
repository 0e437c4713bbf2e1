"""Classical boundary-value trajectories and time-sliced kernel phases.

The kernel over a slice chain accumulates the phase (1/hbar) sum (L - E) dt
with left-endpoint sampling; its N -> infinity limit is the classical
action minus E (t_b - t_a).  Free and harmonic families have analytic
two-point paths and actions; everything else is solved by shooting with
RK4 on the same grid the action integral uses.  The Jacobian prefactor of
the slice product is m per slice and is reported only as N ln m, never
exponentiated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConjugatePointError, TrajectoryError
from .potentials import Harmonic, Polynomial, Potential, Rotor

#: boundary-value residual |q(t_b) - q_b| accepted by the shooting solver
SHOOTING_TOL = 1e-10
SHOOTING_CAP = 100


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    mass: float

    @property
    def slices(self) -> int:
        return len(self.times) - 1

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def sampled_energy(self, potential: Potential) -> np.ndarray:
        v = np.asarray(potential.value(self.positions), dtype=float)
        return 0.5 * self.mass * self.velocities**2 + v


@dataclass(frozen=True)
class KernelPhase:
    S_cl: float
    energy: float
    energy_phase: float
    total_phase: float
    prefactor_log: float
    slices: int


def _constant_value(potential: Potential) -> float | None:
    """V0 when the force vanishes identically, else None."""
    if isinstance(potential, Rotor):
        return 0.0
    if isinstance(potential, Polynomial) and all(c == 0.0 for c in potential.coeffs[1:]):
        return float(potential.coeffs[0])
    return None


def _lagrangian(traj: Trajectory, potential: Potential) -> np.ndarray:
    v = np.asarray(potential.value(traj.positions), dtype=float)
    return 0.5 * traj.mass * traj.velocities**2 - v


def _rk4(potential: Potential, q0: float, v0: float, t: float, N: int):
    m = potential.mass
    dt = t / N
    qs = np.empty(N + 1)
    vs = np.empty(N + 1)
    q, v = float(q0), float(v0)
    qs[0], vs[0] = q, v
    force = potential.derivative
    for i in range(1, N + 1):
        a1 = -float(force(q)) / m
        k1q, k1v = v, a1
        a2 = -float(force(q + 0.5 * dt * k1q)) / m
        k2q, k2v = v + 0.5 * dt * k1v, a2
        a3 = -float(force(q + 0.5 * dt * k2q)) / m
        k3q, k3v = v + 0.5 * dt * k2v, a3
        a4 = -float(force(q + dt * k3q)) / m
        k4q, k4v = v + dt * k3v, a4
        q += dt * (k1q + 2.0 * k2q + 2.0 * k3q + k4q) / 6.0
        v += dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        qs[i], vs[i] = q, v
    return qs, vs


def initial_value_trajectory(potential: Potential, q0: float, v0: float,
                             t: float, N: int) -> Trajectory:
    """Integrate the equations of motion forward from (q0, v0)."""
    if t <= 0 or N < 1:
        raise ValueError("need t > 0 and N >= 1")
    qs, vs = _rk4(potential, q0, v0, t, N)
    return Trajectory(times=np.linspace(0.0, t, N + 1), positions=qs,
                      velocities=vs, mass=potential.mass)


def classical_trajectory(potential: Potential, q_a: float, q_b: float,
                         t: float, N: int) -> Trajectory:
    """Path from q_a to q_b in time t solving the Euler-Lagrange dynamics.

    Force-free and harmonic families use their analytic two-point
    solutions; other potentials shoot on the initial velocity with secant
    updates until |q(t_b) - q_b| <= SHOOTING_TOL.  Harmonic focal times
    (omega t a multiple of pi) raise ConjugatePointError: the two-point
    problem is there either unsolvable or degenerate.
    """
    if t <= 0 or N < 1:
        raise ValueError("need t > 0 and N >= 1")
    times = np.linspace(0.0, t, N + 1)

    if _constant_value(potential) is not None:
        vel = (q_b - q_a) / t
        return Trajectory(times=times, positions=q_a + vel * times,
                          velocities=np.full(N + 1, vel), mass=potential.mass)

    if isinstance(potential, Harmonic):
        w = potential.omega
        s = math.sin(w * t)
        if abs(s) < 1e-12:
            raise ConjugatePointError(
                f"omega*t = {w * t:g} is a focal time; endpoints conjugate"
            )
        b = (q_b - q_a * math.cos(w * t)) / s
        qs = q_a * np.cos(w * times) + b * np.sin(w * times)
        vs = w * (-q_a * np.sin(w * times) + b * np.cos(w * times))
        return Trajectory(times=times, positions=qs, velocities=vs, mass=potential.mass)

    v_lo = (q_b - q_a) / t
    v_hi = v_lo + max(1e-3, 1e-3 * abs(v_lo))
    r_lo = _rk4(potential, q_a, v_lo, t, N)[0][-1] - q_b
    for _ in range(SHOOTING_CAP):
        qs, vs = _rk4(potential, q_a, v_hi, t, N)
        r_hi = qs[-1] - q_b
        if abs(r_hi) <= SHOOTING_TOL:
            return Trajectory(times=times, positions=qs, velocities=vs,
                              mass=potential.mass)
        if r_hi == r_lo:
            v_hi += max(1e-6, 1e-6 * abs(v_hi))
            continue
        v_next = v_hi - r_hi * (v_hi - v_lo) / (r_hi - r_lo)
        v_lo, r_lo = v_hi, r_hi
        v_hi = v_next
    raise TrajectoryError(
        f"shooting failed to hit q_b={q_b:g} within {SHOOTING_CAP} iterations "
        f"(last residual {r_hi:.3e})"
    )


def harmonic_two_point_action(m: float, omega: float, q_a: float, q_b: float,
                              t: float) -> float:
    """Closed-form action of the harmonic two-point path."""
    s = math.sin(omega * t)
    if abs(s) < 1e-12:
        raise ConjugatePointError(f"omega*t = {omega * t:g} is a focal time")
    return (m * omega / (2.0 * s)) * ((q_a**2 + q_b**2) * math.cos(omega * t)
                                      - 2.0 * q_a * q_b)


def classical_action(traj: Trajectory, potential: Potential) -> float:
    """Trapezoid integral of L = m v^2 / 2 - V along the sampled path."""
    return float(np.trapezoid(_lagrangian(traj, potential), traj.times))


def loop_action(traj: Trajectory) -> float:
    """Integral of p dq = m v^2 dt accumulated along the sampled path."""
    return float(np.trapezoid(traj.mass * traj.velocities**2, traj.times))


def sliced_phase(traj: Trajectory, potential: Potential, E: float,
                 hbar: float = 1.0, N: int | None = None) -> KernelPhase:
    """Left-endpoint Riemann sum of (L - E) dt / hbar over the slice chain."""
    if N is not None and N != traj.slices:
        raise ValueError(f"trajectory carries {traj.slices} slices, not {N}")
    n = traj.slices
    dt = traj.duration / n
    lag = _lagrangian(traj, potential)
    s_sliced = float(np.sum(lag[:-1]) * dt)
    energy_phase = E * traj.duration
    return KernelPhase(
        S_cl=s_sliced,
        energy=E,
        energy_phase=energy_phase,
        total_phase=(s_sliced - energy_phase) / hbar,
        prefactor_log=n * math.log(traj.mass),
        slices=n,
    )


def kernel_phase(potential: Potential, q_a: float, q_b: float, t: float,
                 E: float | str = "auto", hbar: float = 1.0,
                 N: int = 4096) -> KernelPhase:
    """Converged phase (S_cl - E (t_b - t_a)) / hbar of the two-point kernel.

    S_cl comes from the analytic action for free and harmonic families and
    from the trapezoid limit of the shooting path otherwise.  E defaults
    to the conserved energy of the chosen trajectory.
    """
    traj = classical_trajectory(potential, q_a, q_b, t, N)

    v0 = _constant_value(potential)
    if v0 is not None:
        s_cl = potential.mass * (q_b - q_a) ** 2 / (2.0 * t) - v0 * t
    elif isinstance(potential, Harmonic):
        s_cl = harmonic_two_point_action(potential.mass, potential.omega, q_a, q_b, t)
    else:
        s_cl = classical_action(traj, potential)

    if E == "auto":
        E = float(traj.sampled_energy(potential)[0])
    energy_phase = E * t
    return KernelPhase(
        S_cl=s_cl,
        energy=E,
        energy_phase=energy_phase,
        total_phase=(s_cl - energy_phase) / hbar,
        prefactor_log=N * math.log(potential.mass),
        slices=N,
    )
