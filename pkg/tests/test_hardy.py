import numpy as np
import pytest

from irrevflow.errors import InvalidArgumentError
from irrevflow.grids import LineGrid
from irrevflow.hardy import (
    LineFunction,
    ap_cauchy,
    hardy_defect,
    hardy_future_projection,
    hardy_past_projection,
    kernel_witness,
    line_inner,
    line_norm,
    project_minus,
    project_plus,
    titchmarsh_extend,
    toeplitz_adjoint_apply,
    toeplitz_apply,
)


@pytest.fixture(scope="module")
def lgrid():
    return LineGrid(l=64.0 * np.pi, n=8192)


def _random_line(grid, rng, width=3.0):
    vals = (rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n))
    vals *= np.exp(-(grid.nodes**2) / (2.0 * width**2))
    return LineFunction(grid, vals)


def test_projections_complementary(lgrid, rng):
    f = _random_line(lgrid, rng)
    plus = project_plus(f)
    minus = project_minus(f)
    recon = plus.values + minus.values
    assert np.max(np.abs(recon - f.values)) < 1e-12 * np.max(np.abs(f.values))


def test_rational_lower_pole_is_hardy(lgrid):
    # the lattice realization of 1/(x+i): exactly one sided
    f = LineFunction(lgrid, ap_cauchy(lgrid, -1.0j))
    assert hardy_defect(f) < 1e-6
    p = project_plus(f)
    assert line_norm(LineFunction(lgrid, p.values - f.values)) < 1e-10 * line_norm(f)
    # raw power-law samples violate the decay precondition at the seam;
    # their leakage is a few 1e-4 of mass, kept here as a sanity bound only
    raw = LineFunction(lgrid, 1.0 / (lgrid.nodes + 1.0j))
    assert hardy_defect(raw) < 1e-3


def test_rational_upper_pole_projects_to_zero(lgrid):
    f = LineFunction(lgrid, ap_cauchy(lgrid, +1.0j))
    p = project_plus(f)
    assert line_norm(p) < 1e-10 * line_norm(f)


def test_real_gaussian_splits_half_mass(lgrid):
    g = LineFunction(lgrid, np.exp(-(lgrid.nodes**2) / 8.0))
    p = project_plus(g)
    ratio = (line_norm(p) / line_norm(g)) ** 2
    assert abs(ratio - 0.5) < 1e-8


def test_titchmarsh_rational_example(lgrid):
    f = LineFunction(lgrid, ap_cauchy(lgrid, -1.0j))
    val = titchmarsh_extend(f, 1.0j)
    assert abs(val - (-0.5j)) < 1e-4
    # raw power-law samples reintroduce the truncated-tail bias ~1/(2 pi l)
    raw = LineFunction(lgrid, 1.0 / (lgrid.nodes + 1.0j))
    assert abs(titchmarsh_extend(raw, 1.0j) - (-0.5j)) < 2e-3


def test_titchmarsh_linearity_and_precondition(lgrid, rng):
    f = _random_line(lgrid, rng)
    g = _random_line(lgrid, rng)
    z = 0.3 + 0.9j
    lhs = titchmarsh_extend(LineFunction(lgrid, 2.0 * f.values - 1j * g.values), z)
    rhs = 2.0 * titchmarsh_extend(f, z) - 1j * titchmarsh_extend(g, z)
    assert abs(lhs - rhs) < 1e-12 * max(abs(lhs), 1.0)
    with pytest.raises(InvalidArgumentError):
        titchmarsh_extend(f, 1.0 - 0.5j)


def test_toeplitz_zero_time_is_identity_on_hardy(lgrid, rng):
    f = project_plus(_random_line(lgrid, rng))
    out = toeplitz_apply(f, 0.0)
    assert line_norm(LineFunction(lgrid, out.values - f.values)) < 1e-12 * line_norm(f)
    with pytest.raises(InvalidArgumentError):
        toeplitz_apply(f, -0.1)


def test_toeplitz_rational_closed_form(lgrid):
    # image of the lattice rational under one unit of the semigroup
    f = LineFunction(lgrid, ap_cauchy(lgrid, -1.0j))
    out = toeplitz_apply(f, 1.0)
    expect = np.exp(-1.0) * f.values
    rel = line_norm(LineFunction(lgrid, out.values - expect)) / line_norm(f)
    assert rel < 1e-4  # measured at machine precision on the lattice


def test_toeplitz_adjoint_isometry_and_co_isometry(lgrid, rng):
    f = project_plus(_random_line(lgrid, rng))
    for t in (0.5, 1.0, 5.0):
        up = toeplitz_adjoint_apply(f, t)
        assert abs(line_norm(up) - line_norm(f)) < 1e-10 * line_norm(f)
        back = toeplitz_apply(up, t)
        assert line_norm(LineFunction(lgrid, back.values - f.values)) \
            < 1e-9 * line_norm(f)


def test_kernel_witness_example(lgrid):
    w = kernel_witness(1.0 - 1.0j, 2.0, lgrid)
    assert w.hardy_defect < 1e-6
    n0 = line_norm(w)
    for t in (2.0, 3.0, 5.0):
        assert line_norm(toeplitz_apply(w, t)) < 1e-3 * n0
    assert line_norm(toeplitz_apply(w, 1.0)) > 0.1 * n0


def test_kernel_witness_preconditions(lgrid):
    with pytest.raises(InvalidArgumentError):
        kernel_witness(1.0 + 1.0j, 2.0, lgrid)
    with pytest.raises(InvalidArgumentError):
        kernel_witness(1.0 - 1.0j, 0.0, lgrid)


def test_toeplitz_semigroup_on_lattice_times(lgrid, rng):
    # random lattice times in [0, 5]; the symbol factorizes exactly there
    quantum = np.pi / lgrid.l
    for _ in range(20):
        f = project_plus(_random_line(lgrid, rng))
        t1 = quantum * rng.integers(0, 321)
        t2 = quantum * rng.integers(0, 321)
        a = toeplitz_apply(toeplitz_apply(f, t1), t2)
        b = toeplitz_apply(f, t1 + t2)
        assert line_norm(LineFunction(lgrid, a.values - b.values)) \
            < 1e-9 * max(line_norm(f), 1e-30)


def test_toeplitz_monotone_contraction(lgrid, rng):
    f = project_plus(_random_line(lgrid, rng))
    quantum = np.pi / lgrid.l
    norms = [line_norm(toeplitz_apply(f, quantum * j)) for j in range(0, 280, 40)]
    drops = np.diff(norms)
    assert np.all(drops <= 1e-10 * line_norm(f))


def test_band_projections_complement_and_ranks(lgrid, rng):
    f = project_plus(_random_line(lgrid, rng))
    for t in (0.5, 1.0, 2.0, 4.0):
        past = hardy_past_projection(t, lgrid)
        future = hardy_future_projection(t, lgrid)
        recon = past.apply(f).values + future.apply(f).values
        assert np.max(np.abs(recon - f.values)) < 1e-10 * np.max(np.abs(f.values))
        assert past.rank + future.rank == lgrid.n // 2
    assert hardy_past_projection(0.0, lgrid).rank == 0
    ranks = [hardy_past_projection(t, lgrid).rank for t in (0.5, 1.0, 2.0, 4.0)]
    assert ranks == sorted(ranks)


def test_band_projection_against_semigroup_composition(lgrid, rng):
    # T_u(t)^* T_u(t) equals the diagonal band above t on the lattice
    f = project_plus(_random_line(lgrid, rng))
    for t in (0.5, 2.0):
        composed = toeplitz_adjoint_apply(toeplitz_apply(f, t), t)
        banded = hardy_future_projection(t, lgrid).apply(f)
        assert line_norm(LineFunction(lgrid, composed.values - banded.values)) \
            < 1e-10 * line_norm(f)


def test_band_projection_requires_lattice_time(lgrid):
    with pytest.raises(InvalidArgumentError):
        hardy_past_projection(0.5 + 0.25 / 64.0, lgrid)


def test_witness_survives_past_projection(lgrid):
    # the witness lives below frequency t0, so the past band at t0 keeps it
    w = kernel_witness(1.0 - 1.0j, 2.0, lgrid)
    kept = hardy_past_projection(2.0, lgrid).apply(w)
    assert line_norm(LineFunction(lgrid, kept.values - w.values)) \
        < 1e-3 * line_norm(w)
