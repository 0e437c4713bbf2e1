"""One-dimensional potential families with analytic derivatives.

Every family carries its own mass parameter and evaluates V, V' and V''
in closed form, so downstream quadratures and residual checks never pay
finite-difference noise.  Periodic families (the rigid rotor) declare a
coordinate period; all other families live on the real line.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError

TWO_PI = 2.0 * np.pi

#: |V''| below this is classified as a degenerate equilibrium.
DEGENERATE_CURVATURE = 1e-9


class Potential:
    """Base class: value/derivative/second_derivative plus domain metadata."""

    #: mass (or moment of inertia) entering the kinetic term p^2 / 2m
    mass: float
    #: coordinate period of the potential, or None on the real line
    period: float | None = None
    #: True when the coordinate itself is cyclic (domain [0, period))
    periodic_coordinate: bool = False

    def value(self, q):
        raise NotImplementedError

    def derivative(self, q):
        raise NotImplementedError

    def second_derivative(self, q):
        raise NotImplementedError

    def in_domain(self, q) -> bool:
        if self.periodic_coordinate:
            return bool(np.all((np.asarray(q) >= 0.0) & (np.asarray(q) < self.period)))
        return bool(np.all(np.isfinite(q)))

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Harmonic(Potential):
    """V(q) = (1/2) m omega^2 q^2."""

    m: float = 1.0
    omega: float = 1.0

    @property
    def mass(self):
        return self.m

    def value(self, q):
        return 0.5 * self.m * self.omega**2 * np.asarray(q, dtype=float) ** 2

    def derivative(self, q):
        return self.m * self.omega**2 * np.asarray(q, dtype=float)

    def second_derivative(self, q):
        return self.m * self.omega**2 * np.ones_like(np.asarray(q, dtype=float))

    def to_json(self):
        return {"family": "harmonic", "m": self.m, "omega": self.omega}


@dataclass(frozen=True)
class Quartic(Potential):
    """V(q) = lam * q^4 / 4."""

    m: float = 1.0
    lam: float = 1.0

    @property
    def mass(self):
        return self.m

    def value(self, q):
        return 0.25 * self.lam * np.asarray(q, dtype=float) ** 4

    def derivative(self, q):
        return self.lam * np.asarray(q, dtype=float) ** 3

    def second_derivative(self, q):
        return 3.0 * self.lam * np.asarray(q, dtype=float) ** 2

    def to_json(self):
        return {"family": "quartic", "m": self.m, "lam": self.lam}


@dataclass(frozen=True)
class Polynomial(Potential):
    """V(q) = sum_k coeffs[k] q^k, derivatives taken analytically."""

    m: float = 1.0
    coeffs: tuple = (0.0,)

    @property
    def mass(self):
        return self.m

    def value(self, q):
        return npoly.polyval(np.asarray(q, dtype=float), self.coeffs)

    def derivative(self, q):
        return npoly.polyval(np.asarray(q, dtype=float), npoly.polyder(self.coeffs))

    def second_derivative(self, q):
        return npoly.polyval(np.asarray(q, dtype=float), npoly.polyder(self.coeffs, 2))

    def to_json(self):
        return {"family": "polynomial", "m": self.m, "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class Pendulum(Potential):
    """V(q) = -amplitude cos(q), periodic in shape but defined on the real line."""

    m: float = 1.0
    amplitude: float = 1.0

    period = TWO_PI

    @property
    def mass(self):
        return self.m

    def value(self, q):
        return -self.amplitude * np.cos(np.asarray(q, dtype=float))

    def derivative(self, q):
        return self.amplitude * np.sin(np.asarray(q, dtype=float))

    def second_derivative(self, q):
        return self.amplitude * np.cos(np.asarray(q, dtype=float))

    def to_json(self):
        return {"family": "pendulum", "m": self.m, "amplitude": self.amplitude}


@dataclass(frozen=True)
class Rotor(Potential):
    """Free rotation: V = 0 on the cyclic coordinate [0, 2*pi)."""

    inertia: float = 1.0

    period = TWO_PI
    periodic_coordinate = True

    @property
    def mass(self):
        return self.inertia

    def value(self, q):
        return np.zeros_like(np.asarray(q, dtype=float))

    def derivative(self, q):
        return np.zeros_like(np.asarray(q, dtype=float))

    def second_derivative(self, q):
        return np.zeros_like(np.asarray(q, dtype=float))

    def reduce(self, q):
        """Map q onto the fundamental period [0, 2*pi)."""
        return np.mod(q, TWO_PI)

    def to_json(self):
        return {"family": "rotor", "inertia": self.inertia}


@dataclass(frozen=True)
class Morse(Potential):
    """V(q) = depth * (1 - exp(-width q))^2, minimum at q = 0."""

    m: float = 1.0
    depth: float = 1.0
    width: float = 1.0

    @property
    def mass(self):
        return self.m

    def value(self, q):
        y = np.exp(-self.width * np.asarray(q, dtype=float))
        return self.depth * (1.0 - y) ** 2

    def derivative(self, q):
        y = np.exp(-self.width * np.asarray(q, dtype=float))
        return 2.0 * self.depth * self.width * y * (1.0 - y)

    def second_derivative(self, q):
        y = np.exp(-self.width * np.asarray(q, dtype=float))
        return 2.0 * self.depth * self.width**2 * y * (2.0 * y - 1.0)

    def to_json(self):
        return {"family": "morse", "m": self.m, "depth": self.depth, "width": self.width}


_FAMILIES = {
    "harmonic": (Harmonic, ("m", "omega")),
    "quartic": (Quartic, ("m", "lam")),
    "polynomial": (Polynomial, ("m", "coeffs")),
    "pendulum": (Pendulum, ("m", "amplitude")),
    "rotor": (Rotor, ("inertia",)),
    "morse": (Morse, ("m", "depth", "width")),
}


def potential_from_json(obj: dict) -> Potential:
    """Build a potential from its JSON object, rejecting unknown fields."""
    if not isinstance(obj, dict) or "family" not in obj:
        raise ValueError("potential JSON must be an object with a 'family' field")
    family = obj["family"]
    if family not in _FAMILIES:
        raise ValueError(f"unknown potential family {family!r}")
    cls, fields = _FAMILIES[family]
    extra = set(obj) - set(fields) - {"family"}
    if extra:
        raise ValueError(f"unknown field(s) for family {family!r}: {sorted(extra)}")
    kwargs = {}
    try:
        for k in fields:
            if k not in obj:
                continue
            if k == "coeffs":
                kwargs[k] = tuple(float(c) for c in obj[k])
            else:
                kwargs[k] = float(obj[k])
    except (TypeError, ValueError):
        raise ValueError(f"fields of family {family!r} must be numbers")
    return cls(**kwargs)


def eval_potential(potential: Potential, q):
    """Evaluate (V, V', V'') at q, enforcing the family's domain.

    Raises DomainError for coordinates outside the declared domain, e.g.
    an unreduced angle handed to the rotor.
    """
    if not potential.in_domain(q):
        raise DomainError(
            f"q={q!r} outside domain of {type(potential).__name__}"
            + (" (reduce the angle to [0, 2*pi) first)" if potential.periodic_coordinate else "")
        )
    return potential.value(q), potential.derivative(q), potential.second_derivative(q)


class Stability(enum.Enum):
    MINIMUM = "minimum"
    MAXIMUM = "maximum"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class EquilibriumPoint:
    """A root of V' with its curvature and stability classification."""

    q0: float
    curvature: float
    stability: Stability


def _classify(curvature: float) -> Stability:
    if abs(curvature) <= DEGENERATE_CURVATURE:
        return Stability.DEGENERATE
    return Stability.MINIMUM if curvature > 0 else Stability.MAXIMUM


def _bisect_derivative(potential: Potential, lo: float, hi: float, tol: float) -> float:
    flo = float(potential.derivative(lo))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = float(potential.derivative(mid))
        if abs(fmid) <= tol or (hi - lo) < 1e-15 * max(1.0, abs(mid)):
            return mid
        if (flo < 0) == (fmid < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_equilibria(
    potential: Potential,
    interval: tuple[float, float],
    tolerance: float = 1e-12,
    subintervals: int = 2048,
) -> list[EquilibriumPoint]:
    """Locate all roots of V' on a finite interval by bracketing + bisection.

    Returns points sorted by position.  An interval with no sign change of
    V' and no isolated near-zero touch yields an empty list.  Potentials
    whose gradient vanishes identically (the rotor) have no isolated
    equilibria and also yield an empty list.
    """
    a, b = float(interval[0]), float(interval[1])
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise ValueError("interval must be finite with a < b")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")

    grid = np.linspace(a, b, subintervals + 1)
    dv = np.asarray(potential.derivative(grid), dtype=float)
    step = (b - a) / subintervals
    scale = max(1.0, float(np.max(np.abs(dv))))

    if np.all(np.abs(dv) <= tolerance * scale):
        return []  # flat gradient: a continuum, not isolated equilibria

    roots: list[float] = []
    for i in range(subintervals):
        if dv[i] == 0.0:
            roots.append(float(grid[i]))
        elif dv[i] * dv[i + 1] < 0.0:
            roots.append(_bisect_derivative(potential, grid[i], grid[i + 1], tolerance))
    if dv[-1] == 0.0:
        roots.append(float(grid[-1]))

    # isolated touches of zero without a sign change (e.g. V' = q^2)
    small = np.abs(dv) <= tolerance
    for i in np.nonzero(small)[0]:
        qi = float(grid[i])
        if not any(abs(qi - r) <= step for r in roots):
            roots.append(qi)

    roots.sort()
    deduped: list[float] = []
    for r in roots:
        if not deduped or r - deduped[-1] > step:
            deduped.append(r)

    out = []
    for q0 in deduped:
        curv = float(potential.second_derivative(q0))
        out.append(EquilibriumPoint(q0=q0, curvature=curv, stability=_classify(curv)))
    return out


def is_confining(potential: Potential, bound: float = 10.0) -> bool:
    """True when sampled values keep growing outward past ``bound`` on both sides.

    Monotone non-decreasing samples with net growth count, so a dissociating
    well whose outer wall flattens toward a plateau still qualifies, while
    oscillatory and downhill tails do not.  Periodic-coordinate families have
    no far region and are never confining.
    """
    if potential.periodic_coordinate:
        return False
    samples = bound * (1.0 + 0.25 * np.arange(9))
    right = potential.value(samples)
    left = potential.value(-samples)
    for side in (right, left):
        if np.any(np.diff(side) < 0.0):
            return False
        if not side[-1] > side[0]:
            return False
    return True
