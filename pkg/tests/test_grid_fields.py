import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grushin.dims import Dims
from grushin.fields import (DegreeError, GriddedField, SpectralField, analyze,
                            dilate, dilate_gridded, dilate_spectral, lp_norm,
                            mixed_norm, read_field_binary, synthesize,
                            write_field_binary, write_field_csv)
from grushin.grid import GridError, GridSpec, make_grid

from conftest import random_field


def test_dims_derived_values():
    d = Dims(1, 1)
    assert (d.total_dim, d.homogeneous_dim, d.volume_dim, d.threshold_dim) \
        == (2, 3, 2, 2)
    d = Dims(1, 2)
    assert (d.total_dim, d.homogeneous_dim, d.volume_dim, d.threshold_dim) \
        == (3, 5, 4, 4)
    d = Dims(3, 2)
    assert (d.total_dim, d.homogeneous_dim, d.volume_dim, d.threshold_dim) \
        == (5, 7, 5, 5)
    with pytest.raises(ValueError):
        Dims(0, 1)


def test_make_grid_counts(default_grid):
    g = default_grid
    assert g.n_x1 == 64
    assert g.n_lambda == 64          # 32 per sign
    assert g.lambda_min_actual >= g.spec.lambda_min - 1e-12
    assert np.all(g.lambda_weights > 0)
    assert np.all(g.x1_weights > 0)


def test_make_grid_rejects_bad_specs():
    with pytest.raises(GridError):
        make_grid(Dims(1, 1), GridSpec(lambda_min=0.0))
    with pytest.raises(GridError):
        make_grid(Dims(1, 1), GridSpec(lambda_min=-1.0))
    with pytest.raises(GridError):
        make_grid(Dims(1, 1), GridSpec(x1_count=0))
    with pytest.raises(GridError):
        # spacing too coarse for the requested top frequency
        make_grid(Dims(1, 1), GridSpec(x1_count=16, lambda_max=4.0))


def test_make_grid_deterministic():
    a = make_grid(Dims(1, 1), GridSpec())
    b = make_grid(Dims(1, 1), GridSpec())
    assert all((x == y).all() for x, y in zip(a.lambda_axes, b.lambda_axes))
    assert all((x == y).all() for x, y in zip(a.x1_axes, b.x1_axes))
    assert all((x == y).all() for x, y in zip(a.x2_axes, b.x2_axes))


def test_synthesize_zero_and_linearity(default_grid):
    g = default_grid
    f = random_field(g, (0.5, 2.0), 3, seed=1)
    zero = f.copy_with(np.zeros_like(f.coeffs))
    assert np.all(synthesize(zero, g).values == 0)
    a, b = 1.7 - 0.3j, -0.8 + 2.1j
    f2 = random_field(g, (0.5, 2.0), 3, seed=2)
    lhs = synthesize(f.copy_with(a * f.coeffs + b * f2.coeffs), g).values
    rhs = a * synthesize(f, g).values + b * synthesize(f2, g).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def test_synthesize_single_coefficient_closed_form(default_grid):
    g = default_grid
    lam = g.lambda_points[g.n_lambda // 2 + 3]
    f = SpectralField(g.dims, lam[None, :], 0, np.array([[1.0 + 0j]]))
    h = synthesize(f, g)
    w = g.lambda_weights[g.lambda_index(lam)]
    x1 = g.x1_points[:, 0]
    x2 = g.x2_points[:, 0]
    a = abs(lam[0])
    ref = ((2 * np.pi) ** -1 * w * a ** 0.25 * np.pi ** -0.25
           * np.exp(-a * x1 ** 2 / 2)[:, None]
           * np.exp(1j * lam[0] * x2)[None, :])
    assert np.max(np.abs(h.values - ref)) <= 1e-14


def test_round_trip_and_plancherel(default_grid):
    g = default_grid
    f = random_field(g, (1.25, 2.0), 16, seed=7)
    h = synthesize(f, g)
    back = analyze(h, 16, lambda_support=f.lambda_support)
    rel = np.max(np.abs(back.coeffs - f.coeffs)) / np.max(np.abs(f.coeffs))
    assert rel <= 1e-6

    idx = [g.lambda_index(lam) for lam in f.lambda_support]
    w = g.lambda_weights[np.asarray(idx)]
    plancherel = (2 * np.pi) ** -1 * np.sum(w[:, None]
                                            * np.abs(f.coeffs) ** 2)
    assert lp_norm(h, 2.0) ** 2 == pytest.approx(plancherel, rel=1e-6)


def test_analyze_zero_field_and_degree_leakage(default_grid):
    g = default_grid
    zero = GriddedField(g, np.zeros((g.n_x1, g.n_x2), dtype=complex))
    band = g.lambda_points[g.lambda_abs >= 1.0]
    out = analyze(zero, 4, lambda_support=band)
    assert np.all(out.coeffs == 0)

    f0 = random_field(g, (1.25, 2.0), 0, seed=3)
    got = analyze(synthesize(f0, g), 4, lambda_support=f0.lambda_support)
    assert np.max(np.abs(got.coeffs[:, 1:])) <= 1e-8


def test_analyze_rejects_unresolvable_degree(default_grid):
    g = default_grid
    low = g.lambda_points[np.argmin(g.lambda_abs)]
    f = SpectralField(g.dims, low[None, :], 0, np.ones((1, 1), dtype=complex))
    h = synthesize(f, g)
    with pytest.raises(DegreeError):
        analyze(h, 16, lambda_support=low[None, :])


def test_lp_norm_unit_mass_and_errors(default_grid):
    g = default_grid
    vals = np.zeros((g.n_x1, g.n_x2), dtype=complex)
    vals[5, 7] = 1.0 / (g.x1_weights[5] * g.x2_weights[7])
    h = GriddedField(g, vals)
    assert lp_norm(h, 1.0) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        lp_norm(h, 0.0)
    with pytest.raises(ValueError):
        mixed_norm(h, -1.0, 2.0)


@settings(max_examples=25, deadline=None)
@given(scale=st.floats(min_value=1e-3, max_value=1e3),
       p=st.sampled_from([0.5, 2.0 / 3.0, 1.0, 2.0, 4.0, np.inf]))
def test_norm_homogeneity(scale, p):
    g = make_grid(Dims(1, 1), GridSpec(x1_count=16, x2_count=16,
                                       lambda_count=4, lambda_max=0.5,
                                       x1_extent=8.0))
    rng = np.random.default_rng(0)
    h = GriddedField(g, rng.normal(size=(g.n_x1, g.n_x2))
                     + 1j * rng.normal(size=(g.n_x1, g.n_x2)))
    hs = GriddedField(g, scale * h.values)
    assert lp_norm(hs, p) == pytest.approx(scale * lp_norm(h, p), rel=1e-9)
    assert mixed_norm(hs, p, 1.0) == pytest.approx(
        scale * mixed_norm(h, p, 1.0), rel=1e-9)


def test_mixed_norm_pq_consistency_and_separability(default_grid):
    g = default_grid
    rng = np.random.default_rng(4)
    h = GriddedField(g, rng.normal(size=(g.n_x1, g.n_x2))
                     + 1j * rng.normal(size=(g.n_x1, g.n_x2)))
    for p in (0.5, 1.0, 2.0, 3.0):
        assert mixed_norm(h, p, p) == pytest.approx(lp_norm(h, p), rel=1e-12)

    a = np.exp(-0.3 * g.x1_points[:, 0] ** 2)
    b = np.cos(0.2 * g.x2_points[:, 0]) + 1.5
    sep = GriddedField(g, np.multiply.outer(a, b).astype(complex))
    p, q = 2.0, 3.0
    na = np.sum(g.x1_weights * a ** q) ** (1 / q)
    nb = np.sum(g.x2_weights * b ** p) ** (1 / p)
    assert mixed_norm(sep, p, q) == pytest.approx(nb * na, rel=1e-12)


def test_dilate_identity_roundtrip_group(dilation_grid):
    g = dilation_grid
    f = random_field(g, (0.25, 0.75), 2, seed=5)
    d1 = dilate(f, 1.0, g)
    assert np.max(np.abs(d1.coeffs - f.coeffs)) == 0.0
    back = dilate_spectral(dilate_spectral(f, 2.0, g), 0.5)
    assert np.max(np.abs(back.coeffs - f.coeffs)) <= 1e-15
    assert np.max(np.abs(back.lambda_support - f.lambda_support)) <= 1e-12
    # group action: two quarter steps equal one half step
    two = dilate_spectral(dilate_spectral(f, 1.5), 2.0)
    one = dilate_spectral(f, 3.0)
    assert np.max(np.abs(two.coeffs - one.coeffs)) <= 1e-14


def test_dilate_commuting_square(dilation_grid):
    g = dilation_grid
    f = random_field(g, (0.25, 0.75), 2, seed=6)
    lhs = synthesize(dilate_spectral(f, 2.0, g), g)
    rhs = dilate_gridded(synthesize(f, g), 2.0)
    i1 = [int(np.argmin(np.abs(g.x1_axes[0] - v)))
          for v in rhs.grid.x1_axes[0]]
    i2 = [int(np.argmin(np.abs(g.x2_axes[0] - v)))
          for v in rhs.grid.x2_axes[0]]
    dev = np.max(np.abs(lhs.values[np.ix_(i1, i2)] - rhs.values))
    assert dev <= 1e-8 * np.max(np.abs(rhs.values))


def test_dilate_rejects_inadmissible(dilation_grid):
    g = dilation_grid
    f = random_field(g, (0.25, 0.3), 1, seed=8)
    with pytest.raises(GridError):
        dilate_spectral(f, 1.3, g)       # 1.69x is off the lattice
    with pytest.raises(GridError):
        dilate_spectral(f, 64.0, g)      # off the grid range


def test_field_serialization_roundtrip(tmp_path, default_grid):
    g = default_grid
    f = random_field(g, (1.0, 2.0), 2, seed=9)
    h = synthesize(f, g)
    path = tmp_path / "field.grsh"
    write_field_binary(h, str(path))
    back = read_field_binary(str(path), g)
    # complex64 payload: roundtrip at single precision
    assert np.max(np.abs(back.values - h.values)) <= 1e-6 * \
        np.max(np.abs(h.values)) + 1e-12
    raw = path.read_bytes()
    assert raw[:5] == b"GRSH1"

    csv_path = tmp_path / "field.csv"
    write_field_csv(h, str(csv_path), ["config_hash=deadbeef"])
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "# config_hash=deadbeef"
    assert lines[1] == "x1_0,x2_0,re,im"
    assert len(lines) == 2 + g.n_x1 * g.n_x2


def test_field_serialization_rejects_mismatch(tmp_path, default_grid,
                                              riesz_grid):
    h = synthesize(random_field(default_grid, (1.0, 2.0), 1, seed=1),
                   default_grid)
    path = tmp_path / "f.grsh"
    write_field_binary(h, str(path))
    with pytest.raises(ValueError):
        read_field_binary(str(path), riesz_grid)
