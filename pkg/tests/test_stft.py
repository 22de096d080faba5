import math

import numpy as np
import pytest

from wienerlab.errors import ConfigurationError, ConstructionError, ResolutionError, UsageError
from wienerlab.field import make_grid, make_shear_grid, synthesize
from wienerlab.schemas.grid import CustomProfile, GaussianProfile, Side
from wienerlab.schemas.timefreq import LatticeSpec, TimeFrequencyMatrix, WindowKind
from wienerlab.stft import (
    chirp_window,
    evaluate_window,
    fourier_symmetry_residual,
    lattice_indices,
    make_lattice,
    make_window,
    normalized,
    shear_residual,
    shift_field,
    stft,
)


@pytest.fixture
def fine_grid():
    return make_grid(1, 4.0, 512)


def test_gaussian_stft_closed_form(grid, gaussian, gaussian_window):
    lattice = make_lattice(grid, x_stride=8, xi_stride=4, x_extent=4.0, xi_extent=4.0)
    tf = stft(gaussian, gaussian_window, lattice)
    x = lattice.x_points()[:, None]
    xi = lattice.xi_points()[None, :]
    expected = math.sqrt(math.pi) * np.exp(-(x**2 + xi**2) / 4)
    assert tf.magnitudes.shape == (lattice.x_count, lattice.xi_count)
    assert np.allclose(tf.magnitudes, expected, atol=1e-10)
    assert tf.magnitudes[lattice.x_count // 2, lattice.xi_count // 2] == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def test_stft_keeps_phases_on_request(grid, gaussian, gaussian_window):
    lattice = make_lattice(grid, x_stride=16, xi_stride=8, x_extent=2.0, xi_extent=2.0)
    tf = stft(gaussian, gaussian_window, lattice, keep_phases=True)
    assert np.allclose(np.abs(tf.phases), tf.magnitudes)


@pytest.mark.parametrize("sign", [-1, 1])
@pytest.mark.parametrize(
    "profile",
    [GaussianProfile(), GaussianProfile(center=0.5, width=0.8, modulation=1.0)],
    ids=["gaussian", "modulated"],
)
def test_shear_residual(shear_grid, profile, sign):
    f = synthesize(shear_grid, profile)
    g = make_window(shear_grid, WindowKind.GAUSSIAN)
    lattice = make_lattice(shear_grid, x_stride=4, xi_stride=2, x_extent=4.0, xi_extent=4.0)
    assert lattice.shear_compatible
    assert shear_residual(f, g, sign, lattice) < 1e-6


@pytest.mark.parametrize("sign", [-1, 1])
def test_shear_residual_of_a_translated_bump(sign):
    grid = make_shear_grid(1, 4096)
    f = synthesize(grid, CustomProfile(evaluator=lambda x: evaluate_window(WindowKind.BUMP, [x - 3.0])))
    g = make_window(grid, WindowKind.GAUSSIAN)
    lattice = make_lattice(grid, x_stride=16, xi_stride=16, x_extent=4.0, xi_extent=8.0)
    assert lattice.shear_compatible
    assert shear_residual(f, g, sign, lattice) < 1e-6


def test_shear_residual_of_zero_field(shear_grid):
    f = synthesize(shear_grid, CustomProfile(evaluator=lambda x: np.zeros_like(x)))
    g = make_window(shear_grid, WindowKind.GAUSSIAN)
    lattice = make_lattice(shear_grid, x_stride=4, xi_stride=2, x_extent=2.0, xi_extent=2.0)
    assert shear_residual(f, g, 1, lattice) == 0.0


def test_shear_residual_needs_a_compatible_lattice(grid, gaussian, gaussian_window):
    lattice = make_lattice(grid, x_stride=1, xi_stride=1, x_extent=1.0, xi_extent=1.0)
    assert not lattice.shear_compatible
    with pytest.raises(ConfigurationError):
        shear_residual(gaussian, gaussian_window, 1, lattice)


@pytest.mark.parametrize(
    "profile",
    [GaussianProfile(), GaussianProfile(center=-1.0, width=1.2, modulation=2.0)],
    ids=["gaussian", "modulated"],
)
def test_fourier_symmetry_residual(grid, gaussian_window, profile):
    f = synthesize(grid, profile)
    lattice = make_lattice(grid, x_stride=8, xi_stride=4, x_extent=4.0, xi_extent=4.0)
    assert fourier_symmetry_residual(f, gaussian_window, lattice) < 1e-6


def test_translation_covariance(grid, gaussian, gaussian_window):
    lattice = make_lattice(grid, x_stride=8, xi_stride=4, x_extent=6.0, xi_extent=3.0)
    base = stft(gaussian, gaussian_window, lattice).magnitudes
    moved = stft(shift_field(gaussian, [2.0]), gaussian_window, lattice).magnitudes
    assert np.allclose(moved[2:], base[:-2], atol=1e-12)


def test_shift_field_needs_grid_aligned_offset(gaussian):
    with pytest.raises(ConfigurationError):
        shift_field(gaussian, [0.3])


def test_bump_certificate(fine_grid):
    bump = make_window(fine_grid, WindowKind.BUMP)
    cert = bump.certificate
    x = fine_grid.space_axis()
    assert np.all(bump.samples.values[np.abs(x) >= 1 / 8] == 0)
    assert cert.support_half_width == 1 / 8
    assert cert.transform_box_half_width == 3 / 8
    assert cert.transform_lower_bound >= 0.9 * cert.transform_peak
    assert cert.sup_norm == pytest.approx(math.exp(-1.0))


def test_plateau_is_exactly_one_on_its_plateau(fine_grid):
    plateau = make_window(fine_grid, WindowKind.PLATEAU)
    x = fine_grid.space_axis()
    values = plateau.samples.values
    assert np.all(values[np.abs(x) <= 1 / 4] == 1)
    assert np.all(values[np.abs(x) >= 3 / 8] == 0)
    assert plateau.certificate.plateau_half_width == 1 / 4


def test_plateau_closed_form_between_the_boxes():
    t = np.linspace(0.26, 0.37, 50)
    values = evaluate_window(WindowKind.PLATEAU, [t]).real
    assert np.all((values > 0) & (values < 1))
    assert np.all(np.diff(values) <= 0)


def test_bump_on_frequency_side(operator_grid):
    bump = make_window(operator_grid, WindowKind.BUMP, side=Side.FREQUENCY)
    assert bump.samples.side == Side.FREQUENCY
    assert bump.certificate.transform_lower_bound > 0


def test_chirp_keeps_modulus(grid, gaussian_window):
    chirped = chirp_window(gaussian_window, 1)
    assert chirped.kind == WindowKind.CHIRPED
    assert chirped.label == "chirped(gaussian,+1)"
    assert np.allclose(np.abs(chirped.samples.values), np.abs(gaussian_window.samples.values), rtol=1e-14)
    with pytest.raises(ConfigurationError):
        chirp_window(chirped, 1)


def test_chirp_on_a_wide_grid():
    wide = make_grid(1, 64.0, 4096)
    chirped = make_window(wide, WindowKind.CHIRPED, base=WindowKind.GAUSSIAN, sign=1)
    base = make_window(wide, WindowKind.GAUSSIAN)
    assert np.allclose(np.abs(chirped.samples.values), np.abs(base.samples.values), rtol=1e-14, atol=1e-300)


def test_normalized_window_has_unit_norm(gaussian_window):
    from wienerlab.field import l2_norm

    assert l2_norm(normalized(gaussian_window).samples) == pytest.approx(1.0, rel=1e-12)


def test_bump_needs_resolution():
    with pytest.raises(ResolutionError):
        make_window(make_grid(1, 16.0, 64), WindowKind.BUMP)


def test_chirped_needs_a_base():
    with pytest.raises(ConfigurationError):
        evaluate_window(WindowKind.CHIRPED, [np.zeros(3)], base_kind=None)


def test_normalizing_a_zero_window_fails(grid):
    window = make_window(grid, WindowKind.GAUSSIAN)
    zero = window.model_copy(update={"samples": window.samples.scaled(0.0)})
    with pytest.raises(ConstructionError):
        normalized(zero)


def test_stft_rejects_mismatched_grids(gaussian, fine_grid):
    other = make_window(fine_grid, WindowKind.GAUSSIAN, width=0.5)
    lattice = make_lattice(fine_grid, x_stride=64, xi_stride=64)
    with pytest.raises(UsageError):
        stft(gaussian, other, lattice)


def test_off_grid_lattice(grid):
    lattice = LatticeSpec(x_step=0.3, xi_step=0.3, x_count=3, xi_count=3, x_offset=-0.3, xi_offset=-0.3)
    with pytest.raises(ConfigurationError):
        lattice_indices(grid, lattice)


def test_time_frequency_matrix_validates_shape(grid):
    lattice = make_lattice(grid, x_stride=64, xi_stride=64)
    with pytest.raises(ValueError):
        TimeFrequencyMatrix(lattice=lattice, dimension=1, magnitudes=np.ones((1, 1)))
