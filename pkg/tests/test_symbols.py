import numpy as np
import pytest

from grushin.symbols import (DyadicCutoff, DyadicPiece, RieszParams,
                             builtin_symbol_1d, builtin_symbol_2d,
                             bump_symbol_1d, dyadic_bump, dyadic_piece_symbol,
                             partition_defect, plateau, riesz_symbol,
                             tensor_symbol, truncated_power)


def test_dyadic_partition_of_unity():
    taus = np.concatenate([np.geomspace(1e-6, 1e3, 4001),
                           [0.5, 1.0, 2.0, 0.25, 4.0]])
    assert partition_defect(taus) <= 1e-12


def test_bump_support_and_center():
    assert dyadic_bump(np.array([1.0]))[0] == pytest.approx(1.0)
    assert np.all(dyadic_bump(np.array([0.5, 2.0, 0.1, 5.0])) == 0.0)
    t = np.linspace(0.51, 1.99, 101)
    assert np.all(dyadic_bump(t) >= 0.0)


def test_plateau_shape():
    assert np.all(plateau(np.array([-1.0, -0.3, 0.0, 0.7, 1.0])) == 1.0)
    assert np.all(plateau(np.array([2.0, 2.5, -3.0])) == 0.0)
    mid = plateau(np.array([1.5]))[0]
    assert 0.0 < mid < 1.0


def test_riesz_symbol_values():
    sym = riesz_symbol(RieszParams(1.0, 1.0))
    assert sym(np.array([0.0]), np.array([0.0]))[0] == 1.0
    assert sym(np.array([0.25]), np.array([0.25]))[0] == pytest.approx(0.5)
    assert sym(np.array([0.5]), np.array([0.5]))[0] == 0.0
    for alpha in (0.0, 0.5, 2.0):
        s = riesz_symbol(RieszParams(alpha, 1.0))
        assert s(np.array([0.0]), np.array([0.0]))[0] == 1.0
        assert s(np.array([0.5]), np.array([0.5]))[0] == 0.0
    with pytest.raises(ValueError):
        RieszParams(-1.0)
    with pytest.raises(ValueError):
        RieszParams(1.0, 0.0)


def test_riesz_symbol_scaled():
    sym = riesz_symbol(RieszParams(2.0, 4.0))
    assert sym(np.array([1.0]), np.array([1.0]))[0] == pytest.approx(0.25)


def test_dyadic_piece_support_and_values():
    piece = DyadicPiece(3, 1.0)
    sym = dyadic_piece_symbol(piece)
    # at 1 - eta1 - eta2 = 2^-j the bump sits at its center value 1
    e1 = np.array([0.4])
    val = sym(e1, 1.0 - e1 - 2.0 ** -3)
    assert val[0].real == pytest.approx(2.0 ** -3)
    # outside the shell
    assert sym(e1, 1.0 - e1 - 2.0 ** -1)[0] == 0.0
    lo, hi = piece.shell
    assert (lo, hi) == (2.0 ** -4, 2.0 ** -2)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_dyadic_partial_sum_reconstruction(alpha):
    e1 = np.linspace(0, 1, 231)
    e2 = np.linspace(0, 1, 229)
    E1, E2 = np.meshgrid(e1, e2, indexing="ij")
    s = 1.0 - E1 - E2
    total = np.zeros_like(E1, dtype=complex)
    for j in range(13):
        total += dyadic_piece_symbol(DyadicPiece(j, alpha))(E1, E2)
    target = truncated_power(s, alpha)
    mask = (s >= 2.0 ** -12) | (s <= 0)
    assert np.max(np.abs(total - target)[mask]) <= 1e-10


def test_cutoff_band_and_symbol_masks():
    theta2 = DyadicCutoff(2)
    taus = np.array([0.05, 0.125, 0.2, 0.5, 0.7])
    vals = theta2(taus)
    assert vals[0] == 0.0 and vals[3] == 0.0 and vals[4] == 0.0
    assert vals[1] == 0.0  # boundary of the open support
    assert vals[2] > 0.0

    f = bump_symbol_1d(0.2, 0.8)
    assert np.all(f(np.array([0.1, 0.9])) == 0)
    assert abs(f(np.array([0.5]))[0]) == pytest.approx(1.0)


def test_tensor_symbol_and_builtins():
    f1 = builtin_symbol_1d("riesz", alpha=1.0, R=1.0)
    f2 = builtin_symbol_1d("gaussian", center=0.5, width=0.1)
    g = tensor_symbol(f1, f2)
    assert g.is_separable()
    v = g(np.array([0.5]), np.array([0.5]))
    assert v[0] == pytest.approx(0.5 * 1.0)
    assert builtin_symbol_1d("indicator")(np.array([0.5]))[0] == 1.0
    with pytest.raises(KeyError):
        builtin_symbol_1d("nope")
    sym2 = builtin_symbol_2d("dyadic", j=2, alpha=1.0)
    assert sym2(np.array([2.0]), np.array([2.0]))[0] == 0.0
    with pytest.raises(KeyError):
        builtin_symbol_2d("nope")


def test_truncated_power_convention():
    vals = truncated_power(np.array([-1.0, 0.0, 0.5, 2.0]), 0.0)
    assert list(vals) == [0.0, 0.0, 1.0, 1.0]
    vals = truncated_power(np.array([-1.0, 0.0, 4.0]), 0.5)
    assert list(vals) == [0.0, 0.0, 2.0]
