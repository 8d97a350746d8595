"""Energy and line grids, weighted states, and dense operator matrices.

Conventions used throughout the library:

* Energy space is L^2([0, e_max], dE) truncated at e_max. States store raw
  samples; quadrature weights live on the grid and appear explicitly in
  every inner product (weighted vector convention).
* The line grid is a uniform lattice of n points (n a power of two) with
  spacing 2l/n, placed at half sample offsets x_k = -l + h(k + 1/2) so that
  no node sits at the origin or at the periodic seam.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, InvalidArgumentError

_RULES = ("midpoint", "trapezoid")


@dataclass(frozen=True)
class EnergyGrid:
    """Quadrature grid on [0, e_max].

    Attributes
    ----------
    e_max : float
        Upper truncation of the energy half line.
    n : int
        Number of nodes.
    nodes : ndarray
        Quadrature nodes, strictly increasing.
    weights : ndarray
        Quadrature weights; they sum to e_max.
    rule : str
        Either "midpoint" or "trapezoid".
    """

    e_max: float
    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    rule: str = "midpoint"

    def __post_init__(self):
        total = float(np.sum(self.weights))
        if abs(total - self.e_max) > 1e-12 * max(self.e_max, 1.0):
            raise InvalidArgumentError(
                f"weights sum to {total!r}, expected e_max={self.e_max!r}")

    @property
    def spacing(self):
        return self.e_max / self.n

    def same_as(self, other):
        return (
            self.n == other.n
            and self.rule == other.rule
            and abs(self.e_max - other.e_max) <= 1e-12 * max(self.e_max, 1.0)
        )


def make_energy_grid(e_max, n, rule="midpoint"):
    """Build an EnergyGrid with the requested quadrature rule.

    Midpoint: nodes (j + 1/2) e_max/n with equal weights e_max/n.
    Trapezoid: nodes j e_max/(n-1) with half weights at both endpoints.
    """
    if not np.isfinite(e_max) or e_max <= 0:
        raise InvalidArgumentError(f"e_max must be positive, got {e_max!r}")
    if n < 2:
        raise InvalidArgumentError(f"need at least 2 nodes, got {n!r}")
    if rule not in _RULES:
        raise InvalidArgumentError(f"unknown rule {rule!r}, expected one of {_RULES}")
    if rule == "midpoint":
        d = e_max / n
        nodes = d * (np.arange(n) + 0.5)
        weights = np.full(n, d)
    else:
        d = e_max / (n - 1)
        nodes = d * np.arange(n)
        weights = np.full(n, d)
        weights[0] = weights[-1] = d / 2
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return EnergyGrid(e_max=float(e_max), n=int(n), nodes=nodes,
                      weights=weights, rule=rule)


@dataclass(frozen=True)
class LineGrid:
    """Uniform lattice on [-l, l) with a power of two node count.

    Nodes are offset by half a sample, x_k = -l + h(k + 1/2), which keeps
    the lattice symmetric under x -> -x and leaves no node at the seam.
    """

    l: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.l) or self.l <= 0:
            raise InvalidArgumentError(f"l must be positive, got {self.l!r}")
        if self.n < 2 or (self.n & (self.n - 1)) != 0:
            raise InvalidArgumentError(
                f"n must be a power of two >= 2, got {self.n!r}")

    @property
    def spacing(self):
        return 2.0 * self.l / self.n

    @property
    def nodes(self):
        h = self.spacing
        return -self.l + h * (np.arange(self.n) + 0.5)

    def same_as(self, other):
        return self.n == other.n and abs(self.l - other.l) <= 1e-12 * self.l


@dataclass(frozen=True)
class EnergyState:
    """Complex amplitudes sampled on an EnergyGrid."""

    grid: EnergyGrid
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.n,):
            raise InvalidArgumentError(
                f"amplitudes shape {amps.shape} does not match grid n={self.grid.n}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


def inner_product(phi, psi):
    """Weighted inner product, conjugate linear in the first argument.

    Reduction runs in fixed grid order so results are bit reproducible.
    """
    if not phi.grid.same_as(psi.grid):
        raise GridMismatchError("states live on different energy grids")
    w = phi.grid.weights
    return complex(np.sum(w * np.conj(phi.amplitudes) * psi.amplitudes))


def state_norm(psi):
    return float(np.sqrt(inner_product(psi, psi).real))


def normalize(psi):
    n = state_norm(psi)
    if n == 0.0:
        raise InvalidArgumentError("cannot normalize the zero state")
    return EnergyState(psi.grid, psi.amplitudes / n)


def evolve(psi, t):
    """Free evolution: multiply amplitudes by exp(-i E t) pointwise."""
    phases = np.exp(-1j * psi.grid.nodes * t)
    return EnergyState(psi.grid, psi.amplitudes * phases)


_FLAG_VALUES = ("asserted", "checked", "unknown")


@dataclass
class OperatorMatrix:
    """Dense operator on an EnergyGrid with self-reported property flags.

    The adjoint is taken with respect to the weighted inner product:
    A_star = W^{-1} A^dagger W where W = diag(weights). Flags record
    whether hermiticity and contractivity were asserted by the builder,
    verified numerically, or left unknown.
    """

    grid: EnergyGrid
    entries: np.ndarray
    hermitian: str = "unknown"
    contraction: str = "unknown"

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=complex)
        if ent.shape != (self.grid.n, self.grid.n):
            raise InvalidArgumentError(
                f"entries shape {ent.shape} does not match grid n={self.grid.n}")
        self.entries = ent
        for name in ("hermitian", "contraction"):
            if getattr(self, name) not in _FLAG_VALUES:
                raise InvalidArgumentError(
                    f"flag {name}={getattr(self, name)!r} not in {_FLAG_VALUES}")

    def apply(self, psi):
        if not self.grid.same_as(psi.grid):
            raise GridMismatchError("operator and state grids differ")
        return EnergyState(self.grid, self.entries @ psi.amplitudes)

    def weighted_adjoint(self):
        """A_star = W^{-1} A^dagger W on the grid weights."""
        w = self.grid.weights
        ent = (self.entries.conj().T * w[None, :]) / w[:, None]
        return OperatorMatrix(self.grid, ent)


def check_hermitian(op, rel_tol=1e-10):
    """Verify hermiticity against the weighted adjoint and update the flag."""
    a = op.entries
    astar = op.weighted_adjoint().entries
    scale = np.linalg.norm(a, 2)
    ok = np.max(np.abs(a - astar)) <= rel_tol * max(scale, 1e-300)
    op.hermitian = "checked" if ok else "unknown"
    return ok


def check_contraction(op, tol=1e-8):
    """Verify the largest singular value is at most 1 + tol."""
    top = np.linalg.norm(op.entries, 2)
    ok = top <= 1.0 + tol
    op.contraction = "checked" if ok else "unknown"
    return ok
