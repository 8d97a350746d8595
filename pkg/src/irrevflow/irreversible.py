"""Irreversible semigroup representation Z(t) = Lambda_F U(t) Lambda_F^{-1}.

Two construction paths are kept independent so they can pin each other:

* Direct similarity: Lambda_F from a positive square root of M_F, inverted
  through a spectral pseudoinverse. Exact intertwining by construction,
  but the finite grid inverse is not a contraction.
* Hardy bridge: compress the Toeplitz semigroup through the singular
  frame of the bridge map Omega_f. The compression of one lattice step is
  powered, which preserves the semigroup law exactly on lattice times and
  is a contraction up to roundoff.

The bridge stack requires the commensurate geometry of standard_bridge:
equal spacings and energy nodes on line nodes, so the frame is orthonormal
in the plain and weighted metrics at once.
"""

from dataclasses import dataclass

import numpy as np

from .bridge import BridgeConfig, omega_matrix
from .errors import (
    GridMismatchError,
    InvalidArgumentError,
    NotPositiveSemidefiniteError,
)
from .grids import EnergyState, OperatorMatrix, inner_product
from .hardy import _offset_phase, _positive_mask


@dataclass(frozen=True)
class SpectralCutoff:
    """Relative spectral floor for pseudoinversion and frame retention."""

    tau: float = 1e-10

    def __post_init__(self):
        if not (0.0 < self.tau < 1.0):
            raise InvalidArgumentError(f"tau must lie in (0, 1), got {self.tau!r}")


def _weight_transform(grid):
    s = np.sqrt(grid.weights)
    return s, 1.0 / s


def sqrt_positive(m, floor_rel=1e-8):
    """Positive square root of a weighted-hermitian PSD operator.

    Eigenvalues below -floor_rel times the spectral radius raise
    NotPositiveSemidefiniteError; small negative roundoff is clamped to
    zero. The root is hermitian in the same weighted metric as the input.
    """
    s, sinv = _weight_transform(m.grid)
    sym = s[:, None] * m.entries * sinv[None, :]
    sym = 0.5 * (sym + sym.conj().T)
    vals, vecs = np.linalg.eigh(sym)
    top = max(abs(vals[0]), abs(vals[-1]), 1e-300)
    if vals[0] < -floor_rel * top:
        raise NotPositiveSemidefiniteError(
            f"minimum eigenvalue {vals[0]:.3e} below -{floor_rel:.1e} * {top:.3e}")
    root = vecs @ (np.sqrt(np.clip(vals, 0.0, None))[:, None] * vecs.conj().T)
    entries = sinv[:, None] * root * s[None, :]
    return OperatorMatrix(m.grid, entries, hermitian="asserted")


def pinv_spectral(m, cutoff=None):
    """Spectral pseudoinverse of a weighted-hermitian operator.

    Eigenvalues at least tau times the spectral radius are inverted, the
    rest are zeroed. The returned operator carries retained_dimension and
    discarded_dimension attributes.
    """
    cutoff = cutoff or SpectralCutoff()
    s, sinv = _weight_transform(m.grid)
    sym = s[:, None] * m.entries * sinv[None, :]
    sym = 0.5 * (sym + sym.conj().T)
    vals, vecs = np.linalg.eigh(sym)
    top = max(abs(vals[0]), abs(vals[-1]))
    keep = np.abs(vals) >= cutoff.tau * top
    inv_vals = np.where(keep, 1.0 / np.where(keep, vals, 1.0), 0.0)
    pinv = vecs @ (inv_vals[:, None] * vecs.conj().T)
    entries = sinv[:, None] * pinv * s[None, :]
    out = OperatorMatrix(m.grid, entries, hermitian="asserted")
    out.retained_dimension = int(np.sum(keep))
    out.discarded_dimension = int(m.grid.n - np.sum(keep))
    return out


def _toeplitz_columns(mat, t, lgrid):
    """Apply the Toeplitz element T_u(t) to every column of mat."""
    x = lgrid.nodes
    mod = _offset_phase(lgrid)
    shifted = mat * np.exp(-1j * x * t)[:, None]
    coeffs = np.fft.fft(shifted * np.conj(mod)[:, None], axis=0)
    coeffs[~_positive_mask(lgrid.n), :] = 0.0
    return np.fft.ifft(coeffs, axis=0) * mod[:, None]


class HardyBridgeStack:
    """Singular frame of Omega_f plus the compressed Toeplitz semigroup.

    Exposes Z(t) both in retained coordinates (k by k) and as an operator
    on the energy grid, the square root factor Lambda_F in the same frame,
    and the rectangular partial isometry R onto the Hardy side.

    The one step compression W = U_r^* T_u(step) U_r is powered for
    lattice times t = j * step with step = pi / l, which keeps the
    semigroup law exact. Off lattice times fall back to one shot
    compression, which is not semigroup compatible and is intended for
    identity checks only.
    """

    def __init__(self, cfg, cutoff=None):
        if not isinstance(cfg, BridgeConfig):
            raise InvalidArgumentError("expected a BridgeConfig")
        cutoff = cutoff or SpectralCutoff(1e-6)
        egrid, lgrid = cfg.energy_grid, cfg.line_grid
        if egrid.rule != "midpoint":
            raise InvalidArgumentError("bridge stack requires the midpoint rule")
        if abs(egrid.spacing - lgrid.spacing) > 1e-12 * lgrid.spacing:
            raise InvalidArgumentError(
                "bridge stack requires equal energy and line spacings "
                f"(got {egrid.spacing!r} and {lgrid.spacing!r})")
        pos = (egrid.nodes - lgrid.nodes[0]) / lgrid.spacing
        if np.max(np.abs(pos - np.rint(pos))) > 1e-9:
            raise InvalidArgumentError(
                "bridge stack requires energy nodes on line nodes")
        self.cfg = cfg
        self.cutoff = cutoff
        self.omega = omega_matrix(cfg)
        u, sv, vh = np.linalg.svd(self.omega, full_matrices=False)
        keep = sv > cutoff.tau * sv[0]
        self.u = np.ascontiguousarray(u[:, keep])
        self.singulars = sv[keep]
        self.vh = np.ascontiguousarray(vh[keep, :])
        self.retained = int(np.sum(keep))
        self.discarded = int(sv.size - self.retained)
        self.step = np.pi / lgrid.l
        self.w_step = self.u.conj().T @ _toeplitz_columns(self.u, self.step, lgrid)
        self._powers = {0: np.eye(self.retained, dtype=complex), 1: self.w_step}

    # -- coordinate space ------------------------------------------------

    def lattice_index(self, t):
        j = t / self.step
        jr = int(round(j))
        return jr if abs(j - jr) <= 1e-9 else None

    def _power(self, j):
        if j in self._powers:
            return self._powers[j]
        half = self._power(j // 2)
        out = half @ half
        if j % 2:
            out = out @ self.w_step
        self._powers[j] = out
        return out

    def z_coords(self, t):
        """Z(t) in retained coordinates; lattice times use exact powering."""
        if t < 0:
            raise InvalidArgumentError(f"need t >= 0, got {t!r}")
        j = self.lattice_index(t)
        if j is not None:
            return self._power(j)
        return self.one_shot_z_coords(t)

    def one_shot_z_coords(self, t):
        """Single compression U_r^* T_u(t) U_r, valid at any t >= 0."""
        if t < 0:
            raise InvalidArgumentError(f"need t >= 0, got {t!r}")
        return self.u.conj().T @ _toeplitz_columns(self.u, t, self.cfg.line_grid)

    def gram_coords(self, t):
        z = self.z_coords(t)
        return z.conj().T @ z

    def kernel_basis(self, t, lcut=1e-12):
        """Orthonormal basis of the numerically dead subspace of Z(t).

        Columns are eigenvectors of Z(t)^* Z(t) with eigenvalue below lcut
        (the gram is a contraction, so the scale is absolute).
        """
        vals, vecs = np.linalg.eigh(self.gram_coords(t))
        return np.ascontiguousarray(vecs[:, vals < lcut])

    # -- energy grid operators --------------------------------------------

    def to_coords(self, psi):
        amps = psi.amplitudes if isinstance(psi, EnergyState) else np.asarray(psi)
        return self.vh @ amps

    def from_coords(self, c):
        return EnergyState(self.cfg.energy_grid, self.vh.conj().T @ c)

    def frame_operator(self, coords_matrix, contraction="unknown"):
        entries = self.vh.conj().T @ coords_matrix @ self.vh
        return OperatorMatrix(self.cfg.energy_grid, entries, contraction=contraction)

    def z_energy(self, t):
        return self.frame_operator(self.z_coords(t), contraction="asserted")

    def lambda_apply(self, psi):
        """Lambda_F psi through the frame: V^* diag(s) V psi."""
        return self.from_coords(self.singulars * self.to_coords(psi))

    def lambda_matrix(self):
        return self.frame_operator(np.diag(self.singulars).astype(complex))

    def z_lambda_coords(self, psi, t):
        """Coordinates of Z(t) Lambda_F psi, the irreversible side state."""
        return self.z_coords(t) @ (self.singulars * self.to_coords(psi))

    @property
    def r_matrix(self):
        """Partial isometry R = U_r V_r, line nodes by energy nodes.

        Equals the polar factor of Omega_f Lambda_F^+ on the retained
        subspace: Omega (V^* S^{-1} V) = U S V V^* S^{-1} V = U V.
        """
        return self.u @ self.vh


def build_z(t, lambda_f=None, cutoff=None, bridge=None):
    """Construct Z(t) on the energy grid.

    With bridge (a BridgeConfig or HardyBridgeStack) the default path
    compresses the Toeplitz semigroup through the bridge frame; this is
    the contraction semigroup used by the acceptance checks. Without a
    bridge, lambda_f is required and Z is the direct similarity
    Lambda_F U(t) Lambda_F^+ with a spectral pseudoinverse; that path
    intertwines exactly but is not contractive on a finite grid.
    """
    if t < 0:
        raise InvalidArgumentError(f"need t >= 0, got {t!r}")
    if bridge is not None:
        stack = bridge if isinstance(bridge, HardyBridgeStack) else HardyBridgeStack(
            bridge, cutoff or SpectralCutoff(1e-6))
        return stack.z_energy(t)
    if lambda_f is None:
        raise InvalidArgumentError("need either a bridge or a lambda_f operator")
    lam_inv = pinv_spectral(lambda_f, cutoff)
    phases = np.exp(-1j * lambda_f.grid.nodes * t)
    entries = lambda_f.entries @ (phases[:, None] * lam_inv.entries)
    out = OperatorMatrix(lambda_f.grid, entries)
    out.retained_dimension = lam_inv.retained_dimension
    out.discarded_dimension = lam_inv.discarded_dimension
    return out


def intertwining_residual(t, lambda_f, z=None, cutoff=None):
    """Spectral norm of Lambda_F U(t) - Z(t) Lambda_F over the norm of Lambda_F."""
    if z is None:
        z = build_z(t, lambda_f=lambda_f, cutoff=cutoff)
    if not z.grid.same_as(lambda_f.grid):
        raise GridMismatchError("z and lambda_f grids differ")
    phases = np.exp(-1j * lambda_f.grid.nodes * t)
    lhs = lambda_f.entries * phases[None, :]
    rhs = z.entries @ lambda_f.entries
    return float(np.linalg.norm(lhs - rhs, 2) / np.linalg.norm(lambda_f.entries, 2))


def adjoint_intertwining_residual(t, lambda_f, z=None, cutoff=None):
    """Residual of the adjoint identity U(-t) Lambda_F = Lambda_F Z(t)^*."""
    if z is None:
        z = build_z(t, lambda_f=lambda_f, cutoff=cutoff)
    phases = np.exp(1j * lambda_f.grid.nodes * t)
    lhs = phases[:, None] * lambda_f.entries
    rhs = lambda_f.entries @ z.entries.conj().T
    return float(np.linalg.norm(lhs - rhs, 2) / np.linalg.norm(lambda_f.entries, 2))


def build_r(bridge, cutoff=None):
    """Rectangular partial isometry R onto the Hardy side (line by energy).

    R^* R is exactly the projector onto the retained subspace of the
    energy grid; R R^* projects onto the retained span inside the Hardy
    space, so it acts as the identity on every image of Omega_f.
    """
    stack = bridge if isinstance(bridge, HardyBridgeStack) else HardyBridgeStack(
        bridge, cutoff or SpectralCutoff(1e-6))
    return stack.r_matrix


def conjugation_z(t, stack):
    """Z(t) by one shot Hardy side conjugation R^* T_u(t) R.

    Satisfies R Z(t) R^* = compressed T_u(t) identically but does not
    compose as a semigroup at finite resolution; use the powered bridge
    path for evolution and this for identity checks.
    """
    return stack.frame_operator(stack.one_shot_z_coords(t))


def semigroup_defect(stack, s, t):
    """Spectral norm of Z(s+t) - Z(s) Z(t) in retained coordinates."""
    return float(np.linalg.norm(
        stack.z_coords(s + t) - stack.z_coords(s) @ stack.z_coords(t), 2))


def irreversible_matrix_element(x, phi, psi, t, bridge=None, lambda_f=None,
                                cutoff=None):
    """Matrix element of an observable in both dynamical pictures.

    reversible_side: (Lambda_F U(t) phi, X Lambda_F U(t) psi)
    irreversible_side: (Z(t) Lambda_F phi, X Z(t) Lambda_F psi)

    The two agree exactly when Lambda_F U(t) = Z(t) Lambda_F; the residual
    measures how well the semigroup carries expectation values. With
    x=None (identity) and phi=psi the common value is the Lyapounov
    trajectory of psi.
    """
    if t < 0:
        raise InvalidArgumentError(f"need t >= 0, got {t!r}")
    if bridge is not None:
        stack = bridge if isinstance(bridge, HardyBridgeStack) else HardyBridgeStack(
            bridge, cutoff or SpectralCutoff(1e-6))
        grid = stack.cfg.energy_grid
        phases = np.exp(-1j * grid.nodes * t)
        phi_t = EnergyState(grid, phi.amplitudes * phases)
        psi_t = EnergyState(grid, psi.amplitudes * phases)
        rev_l = stack.lambda_apply(phi_t)
        rev_r = stack.lambda_apply(psi_t)
        irr_l = stack.from_coords(stack.z_lambda_coords(phi, t))
        irr_r = stack.from_coords(stack.z_lambda_coords(psi, t))
    else:
        if lambda_f is None:
            raise InvalidArgumentError("need either a bridge or a lambda_f operator")
        grid = lambda_f.grid
        z = build_z(t, lambda_f=lambda_f, cutoff=cutoff)
        phases = np.exp(-1j * grid.nodes * t)
        rev_l = lambda_f.apply(EnergyState(grid, phi.amplitudes * phases))
        rev_r = lambda_f.apply(EnergyState(grid, psi.amplitudes * phases))
        irr_l = EnergyState(grid, z.entries @ lambda_f.entries @ phi.amplitudes)
        irr_r = EnergyState(grid, z.entries @ lambda_f.entries @ psi.amplitudes)
    if x is None:
        rev = inner_product(rev_l, rev_r)
        irr = inner_product(irr_l, irr_r)
    else:
        rev = inner_product(rev_l, x.apply(rev_r))
        irr = inner_product(irr_l, x.apply(irr_r))
    return {"reversible_side": rev, "irreversible_side": irr}
