"""Spectral time observable associated with the semigroup Z(t).

The past subspace at parameter t is the part of the space the semigroup
has already killed; the future is its orthogonal complement within the
operative frame. Three faithful realizations coexist at finite resolution
and are used where each is exact:

* projector algebra: accumulated orthonormal bases of Ker Z(t), giving an
  exactly idempotent, exactly nested projection family (the spectral
  measure approximant);
* contraction weights: the gram Z(t)^* Z(t), whose quadratic form carries
  the sharp time decay of states (used for expectations and decrement
  sums, exactly PSD ordered by the contraction property);
* outgoing representation: on the Hardy side the time observable is the
  diagonal frequency band family, exact to machine precision; conjugating
  it through the bridge isometry reproduces the gram weights.

On a finite grid no single operator realizes all three at once: the gram
has a transition band of eigenvalues strictly between 0 and 1 (so it is
not idempotent), while any 0/1 snap of it misplaces that band's weight.
"""

from dataclasses import dataclass, field

import numpy as np

from .bridge import omega_f_apply
from .errors import InvalidArgumentError, NotProjectorLikeError
from .grids import OperatorMatrix, inner_product
from .hardy import hardy_future_projection
from .irreversible import HardyBridgeStack


def clip_to_projector(entries, tol=0.1):
    """Snap a hermitian matrix to the nearest orthogonal projection.

    Every eigenvalue must lie within tol of 0 or 1; otherwise
    NotProjectorLikeError is raised. Finite resolution grams of the
    semigroup generically carry transition eigenvalues near 1/2, so this
    is expected to fail on them; it exists to make that failure loud
    rather than to hide it.
    """
    entries = np.asarray(entries, dtype=complex)
    herm = 0.5 * (entries + entries.conj().T)
    vals, vecs = np.linalg.eigh(herm)
    snapped = np.where(np.abs(vals) <= tol, 0.0,
                       np.where(np.abs(vals - 1.0) <= tol, 1.0, np.nan))
    if np.any(np.isnan(snapped)):
        bad = vals[np.isnan(snapped)]
        raise NotProjectorLikeError(
            f"{bad.size} eigenvalues not within {tol} of {{0,1}}, "
            f"e.g. {bad[:4]!r}")
    keep = snapped > 0.5
    return vecs[:, keep] @ vecs[:, keep].conj().T


def _kernel_projector(f_matrix, lcut):
    vals, vecs = np.linalg.eigh(0.5 * (f_matrix + f_matrix.conj().T))
    dead = vecs[:, vals < lcut]
    return dead @ dead.conj().T


def past_projection(z_t, z_t_adj=None, lcut=1e-12, frame=None, method="kernel"):
    """Orthogonal projection onto the subspace Z(t) has annihilated.

    method="kernel" (default) builds the eigenspace of Z^* Z with
    eigenvalue below lcut; the gram is a contraction so lcut is an
    absolute scale. method="commutator" forms Z Z^* - Z^* Z and snaps it
    with clip_to_projector; at finite resolution the compression defect
    makes that form non projector like and the snap raises.

    frame, when given, is a (k, n) matrix with orthonormal rows spanning
    the subspace the semigroup operates on; the projection is built inside
    it. Without a frame the full matrix is used, which is only meaningful
    when Z acts on the whole grid (direct construction path).
    """
    z = z_t.entries if isinstance(z_t, OperatorMatrix) else np.asarray(z_t)
    zadj = (z_t_adj.entries if isinstance(z_t_adj, OperatorMatrix)
            else z_t_adj if z_t_adj is not None else z.conj().T)
    grid = z_t.grid if isinstance(z_t, OperatorMatrix) else None
    if frame is not None:
        zc = frame @ z @ frame.conj().T
        zadjc = frame @ zadj @ frame.conj().T
    else:
        zc, zadjc = z, zadj
    if method == "kernel":
        proj_c = _kernel_projector(zadjc @ zc, lcut)
    elif method == "commutator":
        proj_c = clip_to_projector(zc @ zadjc - zadjc @ zc)
    else:
        raise InvalidArgumentError(f"unknown method {method!r}")
    entries = frame.conj().T @ proj_c @ frame if frame is not None else proj_c
    if grid is not None:
        return OperatorMatrix(grid, entries, hermitian="asserted")
    return entries


def future_projection(z_t, z_t_adj=None, lcut=1e-12, frame=None, past=None):
    """Complement of the past projection within the operative frame.

    Exactly idempotent and exactly complementary to the past by
    construction. The raw gram Z^* Z carries the same subspace weighted
    by survival probability; use future_weight for expectation values.
    """
    if past is None:
        past = past_projection(z_t, z_t_adj, lcut=lcut, frame=frame)
    past_entries = past.entries if isinstance(past, OperatorMatrix) else past
    if frame is not None:
        ident = frame.conj().T @ frame
    else:
        ident = np.eye(past_entries.shape[0], dtype=complex)
    entries = ident - past_entries
    if isinstance(past, OperatorMatrix):
        return OperatorMatrix(past.grid, entries, hermitian="asserted")
    return entries


def future_weight(stack, t):
    """Gram operator Z(t)^* Z(t) on the energy grid (survival weights)."""
    return stack.frame_operator(stack.gram_coords(t))


@dataclass(frozen=True)
class SpectralMeasureApprox:
    """Nested projection family P_{(0, t]} sampled on a time grid.

    times starts at 0 where the projection is the zero operator. The
    projections are exactly idempotent and exactly nested because each is
    the span projector of an accumulated orthonormal basis.
    """

    times: np.ndarray = field(repr=False)
    projections: list = field(repr=False)
    frame_rank: int = 0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.size != len(self.projections):
            raise InvalidArgumentError("times and projections length mismatch")
        if times.size == 0 or times[0] != 0.0:
            raise InvalidArgumentError("time grid must start at 0")
        if np.any(np.diff(times) <= 0):
            raise InvalidArgumentError("times must be strictly increasing")
        object.__setattr__(self, "times", times)

    def interval(self, a, b):
        """Measure of the half open interval (a, b] as a PSD operator."""
        ia = int(np.searchsorted(self.times, a))
        ib = int(np.searchsorted(self.times, b))
        if ia >= len(self.projections) or self.times[ia] != a:
            raise InvalidArgumentError(f"a={a!r} is not on the measure time grid")
        if ib >= len(self.projections) or self.times[ib] != b:
            raise InvalidArgumentError(f"b={b!r} is not on the measure time grid")
        if not a < b:
            raise InvalidArgumentError("need a < b for a half open interval")
        pa, pb = self.projections[ia], self.projections[ib]
        return OperatorMatrix(pb.grid, pb.entries - pa.entries,
                              hermitian="asserted")

    def exhaustion_fractions(self):
        """trace(P) / frame rank along the grid; tends to 1 as the
        semigroup kills the whole operative subspace."""
        if self.frame_rank <= 0:
            raise InvalidArgumentError("measure carries no frame rank metadata")
        return np.array([float(np.trace(p.entries).real) / self.frame_rank
                         for p in self.projections])


def _accumulate_basis(basis, new):
    if new.size == 0:
        return basis
    if basis.shape[1] > 0:
        new = new - basis @ (basis.conj().T @ new)
    q, r = np.linalg.qr(new)
    keep = np.abs(np.diag(r)) > 0.3
    q = q[:, keep]
    if q.shape[1] == 0:
        return basis
    q2, _ = np.linalg.qr(np.hstack([basis, q]))
    return q2


def build_spectral_measure(times, z_family, lcut=1e-12):
    """Accumulated kernel projection family over a time grid.

    z_family must be a HardyBridgeStack (the frame tells dead directions
    from discarded ones). New kernel directions found at each time are
    orthogonalized against the running basis and only genuinely new ones
    (component larger than 0.3 after removal) are admitted, so the family
    is nested by construction and insensitive to eigenbasis jitter.
    """
    if not isinstance(z_family, HardyBridgeStack):
        raise InvalidArgumentError("z_family must be a HardyBridgeStack")
    times = np.asarray(times, dtype=float)
    if times.size == 0 or times[0] != 0.0:
        raise InvalidArgumentError("time grid must start at 0")
    stack = z_family
    grid = stack.cfg.energy_grid
    k = stack.retained
    basis = np.zeros((k, 0), dtype=complex)
    projections = []
    for t in times:
        if t > 0.0:
            basis = _accumulate_basis(basis, stack.kernel_basis(t, lcut))
        proj_c = basis @ basis.conj().T
        entries = stack.vh.conj().T @ proj_c @ stack.vh
        projections.append(OperatorMatrix(grid, entries, hermitian="asserted"))
    return SpectralMeasureApprox(times=times, projections=projections,
                                 frame_rank=k)


def time_operator_expectation(measure, psi_lambda):
    """Riemann Stieltjes expectation of the time observable.

    Sums t_mid (psi, [P_{t+} - P_t] psi) / ||psi||^2 over consecutive grid
    intervals. Mass the semigroup has not yet killed by the last grid time
    is not counted, so the value is a resolution limited lower portrait of
    the mean age; it always lies in [0, t_max].
    """
    nrm2 = inner_product(psi_lambda, psi_lambda).real
    if nrm2 <= 0.0:
        raise InvalidArgumentError("state has zero norm")
    total = 0.0
    for i in range(len(measure.projections) - 1):
        t_mid = 0.5 * (measure.times[i] + measure.times[i + 1])
        dp = measure.projections[i + 1].entries - measure.projections[i].entries
        val = np.vdot(psi_lambda.amplitudes * psi_lambda.grid.weights,
                      dp @ psi_lambda.amplitudes).real
        total += t_mid * val
    return total / nrm2


def survival_expectation(stack, psi_lambda, times):
    """Expectation of the time observable from gram decrements.

    Uses the survival weights F(t) = Z(t)^* Z(t) instead of the snapped
    projections; the decrements F(t) - F(t+) are PSD by the contraction
    order, and the sum resolves the transition band the projector path
    cannot see. Same normalization and window conventions as
    time_operator_expectation.
    """
    nrm2 = inner_product(psi_lambda, psi_lambda).real
    if nrm2 <= 0.0:
        raise InvalidArgumentError("state has zero norm")
    times = np.asarray(times, dtype=float)
    if times.size < 2 or times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise InvalidArgumentError("need a strictly increasing time grid from 0")
    c = stack.to_coords(psi_lambda)
    scale = stack.cfg.energy_grid.spacing  # equal weight metric factor
    survive = [float(np.vdot(c, stack.gram_coords(t) @ c).real) * scale
               for t in times]
    total = 0.0
    for i in range(times.size - 1):
        t_mid = 0.5 * (times[i] + times[i + 1])
        total += t_mid * (survive[i] - survive[i + 1])
    return total / nrm2


def mu_future_expectation(psi, cfg, t):
    """Quadratic form of mu_T([t, infinity)) on the image of psi.

    Evaluated in the outgoing translation representation, where the time
    observable is the exact diagonal frequency band family: the value is
    the Hardy mass of Omega_f psi at frequencies t and above. By the
    intertwining relation this equals the Lyapounov expectation
    (psi_t, M_F psi_t) for the composed M_F.
    """
    if t < 0:
        raise InvalidArgumentError(f"need t >= 0, got {t!r}")
    image = omega_f_apply(psi, cfg)
    return hardy_future_projection(t, cfg.line_grid).mass(image)
