"""Quasi-affine bridge between the energy representation and Hardy space.

The embedding places each energy amplitude on the nearest line node with a
weight correcting factor sqrt(w_j / h), then applies the positive frequency
projection. On the standard commensurate geometry (spacings equal, energy
nodes sitting exactly on line nodes) the correction is 1 and the embedding
is exact injection.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, InvalidArgumentError
from .grids import EnergyGrid, EnergyState, LineGrid, OperatorMatrix, make_energy_grid
from .hardy import (
    HardyFunction,
    LineFunction,
    _offset_phase,
    _positive_mask,
    hardy_defect,
    project_plus,
)

_INTERP = ("nearest", "linear")


@dataclass(frozen=True)
class BridgeConfig:
    """Paired grids plus the interpolation rule for the embedding."""

    energy_grid: EnergyGrid
    line_grid: LineGrid
    interpolation: str = "nearest"

    def __post_init__(self):
        if self.interpolation not in _INTERP:
            raise InvalidArgumentError(
                f"interpolation {self.interpolation!r} not in {_INTERP}")
        if self.line_grid.l < self.energy_grid.e_max:
            raise InvalidArgumentError(
                "line half width l must be at least e_max "
                f"(got l={self.line_grid.l!r}, e_max={self.energy_grid.e_max!r})")


def standard_bridge(n_energy=1024, interpolation="nearest"):
    """The commensurate reference geometry used by the acceptance checks.

    Energy grid: midpoint rule on [0, 16 pi] with n_energy nodes.
    Line grid: half width 64 pi with 8 * n_energy nodes.
    Both spacings are equal and every energy node lands exactly on a line
    node, so nearest and linear interpolation coincide and the embedding
    scale factor is 1. Lattice times are multiples of pi / l = 1/64 at the
    default size.
    """
    egrid = make_energy_grid(16.0 * np.pi, n_energy, "midpoint")
    lgrid = LineGrid(l=64.0 * np.pi, n=8 * n_energy)
    return BridgeConfig(egrid, lgrid, interpolation)


def _embedding_indices(cfg):
    """Line node index (or index pair with weights) for each energy node."""
    x0 = cfg.line_grid.nodes[0]
    h = cfg.line_grid.spacing
    pos = (cfg.energy_grid.nodes - x0) / h
    if cfg.interpolation == "nearest":
        idx = np.rint(pos).astype(int)
        return idx, None
    lo = np.floor(pos).astype(int)
    frac = pos - lo
    return lo, frac


def embed(psi, cfg):
    """Inject energy amplitudes onto the line with weight correction."""
    if not psi.grid.same_as(cfg.energy_grid):
        raise GridMismatchError("state grid does not match bridge energy grid")
    h = cfg.line_grid.spacing
    scale = np.sqrt(cfg.energy_grid.weights / h)
    out = np.zeros(cfg.line_grid.n, dtype=complex)
    idx, frac = _embedding_indices(cfg)
    if frac is None:
        np.add.at(out, idx, scale * psi.amplitudes)
    else:
        np.add.at(out, idx, (1.0 - frac) * scale * psi.amplitudes)
        np.add.at(out, idx + 1, frac * scale * psi.amplitudes)
    return LineFunction(cfg.line_grid, out)


def restrict(f, cfg):
    """Adjoint of embed: sample at the embedding nodes with inverse scale."""
    if not f.grid.same_as(cfg.line_grid):
        raise GridMismatchError("function grid does not match bridge line grid")
    h = cfg.line_grid.spacing
    inv_scale = np.sqrt(h / cfg.energy_grid.weights)
    idx, frac = _embedding_indices(cfg)
    if frac is None:
        vals = f.values[idx]
    else:
        vals = (1.0 - frac) * f.values[idx] + frac * f.values[idx + 1]
    return EnergyState(cfg.energy_grid, inv_scale * vals)


def omega_f_apply(psi, cfg):
    """Omega_f psi = P_plus(embed(psi)): the quasi-affine map into Hardy space."""
    return project_plus(embed(psi, cfg))


def omega_f_adjoint_apply(f, cfg):
    """Omega_f^* f = restrict(P_plus f), adjoint in the weighted inner products."""
    return restrict(project_plus(f), cfg)


def omega_matrix(cfg):
    """Dense matrix of Omega_f, line nodes by energy nodes.

    Columns are the projections of the embedded basis vectors, computed by
    one batched FFT.
    """
    nl, ne = cfg.line_grid.n, cfg.energy_grid.n
    h = cfg.line_grid.spacing
    scale = np.sqrt(cfg.energy_grid.weights / h)
    b = np.zeros((nl, ne), dtype=complex)
    idx, frac = _embedding_indices(cfg)
    cols = np.arange(ne)
    if frac is None:
        b[idx, cols] = scale
    else:
        b[idx, cols] = (1.0 - frac) * scale
        b[idx + 1, cols] = frac * scale
    mod = _offset_phase(cfg.line_grid)
    coeffs = np.fft.fft(b * np.conj(mod)[:, None], axis=0)
    coeffs[~_positive_mask(nl), :] = 0.0
    return np.fft.ifft(coeffs, axis=0) * mod[:, None]


def quasi_affine_report(a):
    """Singular value diagnostics for a candidate quasi-affine operator.

    Returns min_singular_value and range_defect = 1 - rank/n, with the rank
    counted above a relative floor of 1e-12 times the top singular value.
    A quasi-affine map has range_defect 0 and min_singular_value > 0 that
    may shrink under refinement, but never reaches zero.
    """
    entries = a.entries if isinstance(a, OperatorMatrix) else np.asarray(a)
    sv = np.linalg.svd(entries, compute_uv=False)
    top = sv[0] if sv.size else 0.0
    rank = int(np.sum(sv > 1e-12 * top)) if top > 0 else 0
    nmin = min(entries.shape)
    return {
        "min_singular_value": float(sv[-1]) if sv.size else 0.0,
        "range_defect": 1.0 - rank / nmin,
    }


def theta_star_direct(f, cfg, kernel="trigonometric"):
    """Adjoint bridge map by direct kernel summation, no FFT involved.

    Serves as an independent cross check of omega_f_adjoint_apply. With
    kernel="trigonometric" the exact discrete Riesz kernel of the offset
    lattice is summed: weight 1/2 on the diagonal and i / (n sin(pi r / n))
    at odd node separations r (even separations carry weight zero). This
    reproduces the FFT path to machine precision.

    kernel="euclidean" instead sums the continuum Cauchy kernel
    i / (2 pi r) over all nonzero separations. That quadrature suffers an
    alternation error of order 1e-2 independent of grid size, so it is
    offered for diagnostics only.
    """
    if kernel not in ("trigonometric", "euclidean"):
        raise InvalidArgumentError(f"unknown kernel {kernel!r}")
    if not f.grid.same_as(cfg.line_grid):
        raise GridMismatchError("function grid does not match bridge line grid")
    n = cfg.line_grid.n
    idx, frac = _embedding_indices(cfg)
    if frac is not None:
        raise InvalidArgumentError("direct summation supports nearest interpolation only")
    # separation matrix between target line nodes and all source nodes
    r = idx[:, None] - np.arange(n)[None, :]
    if kernel == "trigonometric":
        odd = (r % 2) != 0
        kmat = np.zeros(r.shape, dtype=complex)
        kmat[odd] = 1j / (n * np.sin(np.pi * r[odd] / n))
        kmat[r == 0] = 0.5
    else:
        nonzero = r != 0
        kmat = np.zeros(r.shape, dtype=complex)
        kmat[nonzero] = 1j / (2.0 * np.pi * r[nonzero])
        kmat[r == 0] = 0.5
    projected = kmat @ f.values
    h = cfg.line_grid.spacing
    inv_scale = np.sqrt(h / cfg.energy_grid.weights)
    return EnergyState(cfg.energy_grid, inv_scale * projected)
