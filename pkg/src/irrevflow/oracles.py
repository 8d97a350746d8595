"""Independent oracles for expectation values and closed form images.

These deliberately avoid the production code paths (no shared matrix
builders, no FFT): the epsilon regularized double sum is evaluated
directly and extrapolated, and the rational family answers come from
residue calculus. Each oracle returns its value together with an error
estimate so cross checks can be budgeted.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

_METHODS = ("epsilon_richardson", "residue", "frequency_shift")


@dataclass(frozen=True)
class OracleReport:
    value: complex
    estimated_error: float
    method: str

    def __post_init__(self):
        if self.estimated_error < 0:
            raise InvalidArgumentError("estimated_error must be >= 0")
        if self.method not in _METHODS:
            raise InvalidArgumentError(f"method {self.method!r} not in {_METHODS}")


def _double_sum(psi, eps):
    """(psi, M_eps psi) as a literal double sum over grid nodes."""
    grid = psi.grid
    e = grid.nodes
    w = grid.weights
    a = np.conj(psi.amplitudes) * w
    b = psi.amplitudes * w
    kernel = (1j / (2.0 * np.pi)) / (e[:, None] - e[None, :] + 1j * eps)
    # hermitian part of the quadratic form only; the residue is antihermitian
    val = a @ (kernel @ b)
    return float(val.real)


def oracle_mf_expectation(psi, epsilons=None):
    """Lyapounov expectation (psi, M_F psi) by epsilon extrapolation.

    Evaluates the shifted double sum on a decreasing epsilon ladder
    (default 4, 2, 1 grid spacings) and removes the first order term by
    Richardson extrapolation. The estimated error is the spread of the
    last two extrapolants, or the size of the final correction when only
    two ladder points are given.
    """
    nrm2 = float(np.sum(psi.grid.weights * np.abs(psi.amplitudes) ** 2))
    if nrm2 <= 0.0:
        raise InvalidArgumentError("state has zero norm")
    if epsilons is None:
        delta = psi.grid.spacing
        epsilons = (4.0 * delta, 2.0 * delta, delta)
    epsilons = [float(e) for e in epsilons]
    if len(epsilons) < 2:
        raise InvalidArgumentError("need at least two epsilons")
    if any(e <= 0 for e in epsilons):
        raise InvalidArgumentError("epsilons must be positive")
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise InvalidArgumentError("epsilons must be strictly decreasing")
    values = [_double_sum(psi, e) / nrm2 for e in epsilons]
    extrapolants = []
    for (ea, va), (eb, vb) in zip(zip(epsilons, values), zip(epsilons[1:], values[1:])):
        extrapolants.append((ea * vb - eb * va) / (ea - eb))
    if len(extrapolants) >= 2:
        err = abs(extrapolants[-1] - extrapolants[-2])
    else:
        err = abs(extrapolants[-1] - values[-1])
    # guard against a vanishing estimate from accidental agreement
    err = max(err, 1e-12)
    return OracleReport(value=extrapolants[-1], estimated_error=err,
                        method="epsilon_richardson")


def oracle_toeplitz_rational(t, pole):
    """Exact action of T_u(t) on the rational state 1 / (x - pole).

    For Im pole < 0 residue calculus gives the image
    exp(-i pole t) / (x - pole), so the norm ratio after time t is
    exp(Im(pole) t). The report value is that norm ratio and the error is
    zero: the formula is exact in the continuum.
    """
    if np.imag(pole) >= 0:
        raise InvalidArgumentError(f"need Im pole < 0, got {pole!r}")
    if t < 0:
        raise InvalidArgumentError(f"need t >= 0, got {t!r}")
    ratio = float(np.exp(np.imag(pole) * t))
    return OracleReport(value=ratio, estimated_error=0.0, method="residue")


def oracle_toeplitz_rational_image(t, pole, nodes):
    """Sampled closed form image exp(-i pole t) / (x - pole)."""
    if np.imag(pole) >= 0:
        raise InvalidArgumentError(f"need Im pole < 0, got {pole!r}")
    if t < 0:
        raise InvalidArgumentError(f"need t >= 0, got {t!r}")
    x = np.asarray(nodes, dtype=float)
    return np.exp(-1j * pole * t) / (x - pole)


def oracle_titchmarsh_rational(pole, z):
    """Upper half plane extension of 1 / (x - pole) at the point z.

    For Im pole < 0 and Im z > 0 the Cauchy integral closes around the
    single upper pole of the integrand and gives exactly 1 / (z - pole).
    """
    if np.imag(pole) >= 0:
        raise InvalidArgumentError(f"need Im pole < 0, got {pole!r}")
    if np.imag(z) <= 0:
        raise InvalidArgumentError(f"need Im z > 0, got {z!r}")
    return OracleReport(value=complex(1.0 / (z - pole)), estimated_error=0.0,
                        method="residue")
