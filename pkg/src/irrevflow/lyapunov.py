"""Lyapounov operator M_F for forward evolution on a truncated energy grid.

Two independent constructions are provided and kept deliberately separate:

* build_mf_cauchy discretizes the double energy integral of the Cauchy
  kernel, split into the delta and principal value parts.
* build_mf_composed squares the quasi-affine bridge map, M = Omega^* Omega.

The expectation value (psi_t, M psi_t) along free evolution is the
Lyapounov trajectory; with the composed construction it is non increasing
to machine precision.
"""

from dataclasses import dataclass

import numpy as np

from .bridge import omega_matrix, _embedding_indices
from .errors import GridMismatchError, InvalidArgumentError
from .grids import EnergyState, OperatorMatrix, evolve, inner_product, normalize

_REG_KINDS = ("sokhotski_plemelj", "epsilon_shift")


@dataclass(frozen=True)
class RegularizationPolicy:
    """How to regularize the singular Cauchy kernel.

    sokhotski_plemelj: boundary value form, half identity plus principal
    value with the diagonal removed. epsilon_shift: displace the pole by
    i*epsilon; epsilon defaults to the grid spacing when not given.
    """

    kind: str = "sokhotski_plemelj"
    epsilon: float | None = None

    def __post_init__(self):
        if self.kind not in _REG_KINDS:
            raise InvalidArgumentError(f"kind {self.kind!r} not in {_REG_KINDS}")
        if self.epsilon is not None and self.epsilon <= 0:
            raise InvalidArgumentError(f"epsilon must be positive, got {self.epsilon!r}")

    def resolve_epsilon(self, grid):
        return self.epsilon if self.epsilon is not None else grid.spacing


def build_mf_cauchy(grid, policy=None):
    """M_F from the regularized Cauchy double integral.

    Sokhotski Plemelj entries: M_jk = delta_jk / 2 + (i / 2 pi) w_k / (E_j - E_k)
    with zero diagonal in the principal value part. The matrix is exactly
    hermitian with respect to the weighted inner product.

    The epsilon shifted variant replaces 1 / (E_j - E_k) by the complex
    displaced kernel including its diagonal, then symmetrizes in the
    weighted metric; it converges to the boundary value form at first
    order in epsilon.
    """
    policy = policy or RegularizationPolicy()
    e = grid.nodes
    w = grid.weights
    de = e[:, None] - e[None, :]
    if policy.kind == "sokhotski_plemelj":
        with np.errstate(divide="ignore"):
            pv = np.where(de != 0.0, 1.0 / np.where(de != 0.0, de, 1.0), 0.0)
        entries = (1j / (2.0 * np.pi)) * (w[None, :] * pv)
        entries[np.arange(grid.n), np.arange(grid.n)] += 0.5
    else:
        eps = policy.resolve_epsilon(grid)
        raw = (1j / (2.0 * np.pi)) * (w[None, :] / (de + 1j * eps))
        # weighted hermitization: (A + W^-1 A^dagger W) / 2
        adj = (raw.conj().T * w[None, :]) / w[:, None]
        entries = 0.5 * (raw + adj)
    op = OperatorMatrix(grid, entries, hermitian="asserted")
    return op


def build_mf_composed(cfg):
    """M_F as the square of the bridge map, Omega^* Omega on the energy grid.

    Positive semidefinite by construction in the weighted metric. On the
    standard commensurate geometry the weight corrections are trivial and
    the entries are simply the projected embedding sampled back at the
    embedding nodes.
    """
    om = omega_matrix(cfg)
    idx, frac = _embedding_indices(cfg)
    h = cfg.line_grid.spacing
    inv_scale = np.sqrt(h / cfg.energy_grid.weights)
    if frac is None:
        rows = om[idx, :]
    else:
        rows = (1.0 - frac)[:, None] * om[idx, :] + frac[:, None] * om[idx + 1, :]
    entries = inv_scale[:, None] * rows
    return OperatorMatrix(cfg.energy_grid, entries, hermitian="asserted")


def mf_expectation(m, psi):
    """Real expectation value (psi, M psi) in the weighted inner product."""
    val = inner_product(psi, m.apply(psi))
    return float(val.real)


def lyapunov_trajectory(m, psi, times):
    """Expectation of M along free evolution of the normalized state.

    times must be sorted and non negative. Returns real values; raises if
    an expectation picks up an imaginary part beyond roundoff, which would
    indicate a non hermitian operator.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise InvalidArgumentError("times must be a non empty 1d sequence")
    if np.any(times < 0):
        raise InvalidArgumentError("times must be non negative")
    if np.any(np.diff(times) < 0):
        raise InvalidArgumentError("times must be sorted ascending")
    psi = normalize(psi)
    out = np.empty(times.size)
    for i, t in enumerate(times):
        psi_t = evolve(psi, t)
        val = inner_product(psi_t, m.apply(psi_t))
        if abs(val.imag) > 1e-10 * max(abs(val.real), 1.0):
            raise InvalidArgumentError(
                f"expectation at t={t} has imaginary part {val.imag:.3e}; "
                "operator is not hermitian enough")
        out[i] = val.real
    return out


def heisenberg_mf(m, t, grid=None):
    """Heisenberg picture operator M(t) = U(t)^dagger M U(t).

    With diagonal free evolution this conjugates the entries by phases:
    M(t)_jk = exp(i E_j t) M_jk exp(-i E_k t).
    """
    grid = grid or m.grid
    if not m.grid.same_as(grid):
        raise GridMismatchError("operator grid does not match requested grid")
    phase = np.exp(1j * grid.nodes * t)
    entries = phase[:, None] * m.entries * np.conj(phase)[None, :]
    return OperatorMatrix(grid, entries, hermitian=m.hermitian)
