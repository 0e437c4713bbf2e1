"""Finite-difference eigenvalue oracle for the 1D Schrodinger operator.

Discretizes -(hbar^2 / 2m) psi'' + V psi = E psi with second-order central
differences on a uniform grid and solves the symmetric eigenproblem.  This
is the independent ground truth against which the semiclassical quantizer
and the thermal-amplitude constructions are checked, so it shares no code
with them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.sparse import diags
from scipy.sparse.linalg import eigsh

from .ensemble import CanonicalEnsemble
from .errors import BoxError, ResolutionError
from .potentials import Potential, Stability, find_equilibria

#: wall amplitudes above this fraction of the peak mean the box clips the state
WALL_FRACTION = 1e-6


@dataclass(frozen=True, eq=False)
class EigenSolution:
    box: tuple[float, float]
    M: int
    boundary: str
    grid: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column k is level k, unit norm under sum |psi|^2 h
    spacing: float


def _reference_minimum(potential: Potential) -> tuple[float, float]:
    """(q0, curvature) of the lowest minimum, scanning a generous window."""
    points = [
        pt for pt in find_equilibria(potential, (-10.0, 10.0))
        if pt.stability is Stability.MINIMUM
    ]
    if points:
        best = min(points, key=lambda pt: float(potential.value(pt.q0)))
        return best.q0, best.curvature
    qs = np.linspace(-10.0, 10.0, 4097)
    vals = np.asarray(potential.value(qs), dtype=float)
    i = int(np.argmin(vals))
    return float(qs[i]), max(float(potential.second_derivative(qs[i])), 0.0)


def default_box(potential: Potential, hbar: float, k: int) -> tuple[float, float]:
    """Walls where V clears the highest requested level by a wide margin."""
    if potential.periodic_coordinate:
        return (0.0, potential.period)
    q0, curvature = _reference_minimum(potential)
    m = potential.mass
    omega_local = math.sqrt(max(curvature, 1e-6) / m)
    v0 = float(potential.value(q0))
    target = v0 + hbar * omega_local * (2.0 * k + 11.0)
    half = 1.0
    # steep walls overflow to inf at wide halves; inf still clears the target
    with np.errstate(over="ignore"):
        for _ in range(60):
            if (float(potential.value(q0 - half)) >= target
                    and float(potential.value(q0 + half)) >= target):
                return (q0 - half, q0 + half)
            half *= 2.0
    raise BoxError("potential never clears the requested levels; box cannot confine them")


def _dirichlet_eigensolve(potential: Potential, hbar: float,
                          box: tuple[float, float], M: int, k: int):
    lo, hi = box
    h = (hi - lo) / (M + 1)
    grid = lo + h * np.arange(1, M + 1)
    m = potential.mass
    kin = hbar**2 / (m * h**2)
    diag = kin + np.asarray(potential.value(grid), dtype=float)
    off = np.full(M - 1, -0.5 * kin)
    vals, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1))
    return grid, h, vals, vecs


def _periodic_eigensolve(potential: Potential, hbar: float,
                         box: tuple[float, float], M: int, k: int):
    lo, hi = box
    h = (hi - lo) / M
    grid = lo + h * np.arange(M)
    m = potential.mass
    kin = hbar**2 / (m * h**2)
    v = np.asarray(potential.value(grid), dtype=float)
    mat = diags(
        [np.full(M - 1, -0.5 * kin), kin + v, np.full(M - 1, -0.5 * kin)],
        offsets=[-1, 0, 1],
        format="lil",
    )
    mat[0, M - 1] = -0.5 * kin
    mat[M - 1, 0] = -0.5 * kin
    # shift-invert below the spectrum with a fixed start vector keeps the
    # solve deterministic
    sigma = float(np.min(v)) - 1.0
    vals, vecs = eigsh(mat.tocsc(), k=k, sigma=sigma, which="LM", v0=np.ones(M))
    order = np.argsort(vals)
    return grid, h, vals[order], vecs[:, order]


def fd_eigensolve(potential: Potential, hbar: float = 1.0,
                  box: tuple[float, float] | None = None,
                  M: int = 4096, k: int = 4,
                  boundary: str = "dirichlet",
                  resolution_tolerance: float | None = None) -> EigenSolution:
    """Lowest k eigenpairs of the discretized Schrodinger operator.

    Dirichlet walls use the symmetric tridiagonal matrix on the interior
    grid; periodic boundaries add the two corner couplings and solve the
    sparse problem by shift-invert.  Eigenvectors are normalized under the
    grid measure and sign-fixed (largest-magnitude component positive).

    Wall amplitudes above WALL_FRACTION of the peak raise BoxError.  When
    `resolution_tolerance` is set, a half-resolution solve estimates the
    discretization error of each level and ResolutionError is raised if
    any estimate exceeds the tolerance (relative to |E| + 1).
    """
    if M < 64:
        raise ValueError("M must be at least 64")
    if k < 1 or k > M - 2:
        raise ValueError("level count k out of range")
    if boundary not in ("dirichlet", "periodic"):
        raise ValueError(f"unknown boundary {boundary!r}")
    if boundary == "periodic" and not potential.periodic_coordinate and box is None:
        raise ValueError("periodic boundary needs an explicit box for line potentials")
    if box is None:
        box = default_box(potential, hbar, k)

    solve = _dirichlet_eigensolve if boundary == "dirichlet" else _periodic_eigensolve
    grid, h, vals, vecs = solve(potential, hbar, box, M, k)

    norms = np.sqrt(np.sum(vecs**2, axis=0) * h)
    vecs = vecs / norms
    for j in range(vecs.shape[1]):
        i_peak = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[i_peak, j] < 0:
            vecs[:, j] = -vecs[:, j]

    if boundary == "dirichlet":
        peaks = np.max(np.abs(vecs), axis=0)
        walls = np.maximum(np.abs(vecs[0, :]), np.abs(vecs[-1, :]))
        bad = np.nonzero(walls > WALL_FRACTION * peaks)[0]
        if bad.size:
            raise BoxError(
                f"level {bad[0]} has wall amplitude {walls[bad[0]]:.3e} "
                f"(> {WALL_FRACTION:g} of peak); enlarge the box {box}"
            )

    if resolution_tolerance is not None:
        _, _, coarse, _ = solve(potential, hbar, box, M // 2, k)
        # second-order convergence: err(M) ~ (coarse - fine) / 3
        estimates = np.abs(vals - coarse) / 3.0
        scale = np.abs(vals) + 1.0
        worst = int(np.argmax(estimates / scale))
        if estimates[worst] > resolution_tolerance * scale[worst]:
            raise ResolutionError(
                f"level {worst} discretization error estimate "
                f"{estimates[worst]:.3e} exceeds tolerance; increase M"
            )

    return EigenSolution(
        box=(float(box[0]), float(box[1])),
        M=M,
        boundary=boundary,
        grid=grid,
        eigenvalues=np.asarray(vals, dtype=float),
        eigenvectors=vecs,
        spacing=h,
    )


def richardson_eigenvalues(potential: Potential, hbar: float = 1.0,
                           box: tuple[float, float] | None = None,
                           M: int = 4096, k: int = 4,
                           boundary: str = "dirichlet") -> np.ndarray:
    """Eliminate the leading O(h^2) error by combining M and 2M solves."""
    coarse = fd_eigensolve(potential, hbar, box, M, k, boundary).eigenvalues
    fine = fd_eigensolve(potential, hbar, box, 2 * M + 1 if boundary == "dirichlet" else 2 * M,
                         k, boundary).eigenvalues
    # dirichlet spacing halves exactly at 2M+1 interior points
    return (4.0 * fine - coarse) / 3.0


def ground_state_overlap(potential: Potential, ens: CanonicalEnsemble,
                         solution: EigenSolution) -> float:
    """Squared grid inner product of e^{-beta V} with the ground state."""
    v = np.asarray(potential.value(solution.grid), dtype=float)
    w = np.exp(-ens.beta * (v - np.min(v)))
    w = w / math.sqrt(float(np.sum(w**2) * solution.spacing))
    inner = float(np.sum(w * solution.eigenvectors[:, 0]) * solution.spacing)
    return inner**2
