import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wienerlab import gabor
from wienerlab.errors import ConfigurationError, DomainError, ZeroSequenceError
from wienerlab.field import inverse_fourier
from wienerlab.mixed_norm import seq_norm
from wienerlab.schemas.gabor import CoeffProfile, Verdict
from wienerlab.schemas.grid import Side
from wienerlab.settings import get_settings
from wienerlab.stft import make_lattice

SCAN_N = [16, 32, 64, 128, 256]
POWER_ONE_L1 = 1 + 2 * sum((1 + k * k) ** -0.5 for k in range(1, 11))


def test_power_coefficients():
    c = gabor.make_coeffs(1, 10, CoeffProfile.POWER, beta=1.0)
    assert c.values.shape == (21,)
    assert c.values[10] == 1.0
    assert c.values[13] == pytest.approx(10 ** -0.5)
    assert seq_norm(c.values, 1.0) == pytest.approx(POWER_ONE_L1, rel=1e-12)
    assert POWER_ONE_L1 == pytest.approx(6.098, abs=1e-3)


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
def test_kronecker_has_unit_norm(p):
    c = gabor.make_coeffs(2, 3, CoeffProfile.KRONECKER)
    assert c.values.shape == (7, 7)
    assert seq_norm(c.values, p) == 1.0
    assert c.entries() == {(0, 0): 1 + 0j}


def test_random_coefficients_are_reproducible():
    a = gabor.make_coeffs(1, 5, CoeffProfile.RANDOM, seed=7)
    b = gabor.make_coeffs(1, 5, CoeffProfile.RANDOM, seed=7)
    assert np.array_equal(a.values, b.values)


def test_custom_coefficients():
    c = gabor.make_coeffs(1, 2, CoeffProfile.CUSTOM, evaluator=lambda k: k**2)
    assert list(c.values.real) == [4.0, 1.0, 0.0, 1.0, 4.0]


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(dimension=1, support_radius=3, profile=CoeffProfile.POWER),
        dict(dimension=1, support_radius=3, profile=CoeffProfile.CUSTOM),
        dict(dimension=0, support_radius=3, profile=CoeffProfile.CONSTANT),
        dict(dimension=1, support_radius=-1, profile=CoeffProfile.CONSTANT),
    ],
)
def test_make_coeffs_rejects(kwargs):
    with pytest.raises(ConfigurationError):
        gabor.make_coeffs(**kwargs)


def test_lemma_ratio_power_one():
    c = gabor.make_coeffs(1, 10, CoeffProfile.POWER, beta=1.0)
    assert gabor.lemma_ratio(c, 1.0, math.inf, 1.0) == pytest.approx(POWER_ONE_L1, rel=1e-12)


@pytest.mark.parametrize("radius", [4, 64, 512])
def test_lemma_ratio_constant_is_linear(radius):
    c = gabor.make_coeffs(1, radius, CoeffProfile.CONSTANT)
    assert gabor.lemma_ratio(c, 1.0, math.inf, 0.0) == pytest.approx(2 * radius + 1, rel=1e-12)


def test_lemma_ratio_of_zero_sequence():
    c = gabor.make_coeffs(1, 3, CoeffProfile.CUSTOM, evaluator=lambda k: 0 * k)
    with pytest.raises(ZeroSequenceError):
        gabor.lemma_ratio(c, 1.0, 2.0, 0.5)


def test_critical_harmonic_growth():
    ratios = [
        gabor.lemma_ratio(gabor.make_coeffs(1, radius, CoeffProfile.POWER, beta=1.0), 1.0, math.inf, 1.0)
        for radius in (64, 128, 256, 512)
    ]
    for previous, current in zip(ratios, ratios[1:]):
        assert current - previous == pytest.approx(2 * math.log(2), rel=0.1)


def test_dual_weight_sum_grows_logarithmically():
    sums = [gabor.dual_weight_sum(1.0, 2.0, 0.5, radius) for radius in (64, 128, 256, 512)]
    for previous, current in zip(sums, sums[1:]):
        assert current - previous == pytest.approx(2 * math.log(2), rel=0.1)


def test_dual_weight_norm_converges_above_threshold():
    before = gabor.dual_weight_norm(1.0, 2.0, 0.75, 512)
    after = gabor.dual_weight_norm(1.0, 2.0, 0.75, 1024)
    assert 0 <= (after - before) / before < 0.01


@pytest.mark.parametrize("p, q", [(1.0, 2.0), (1.5, 3.0), (2.0, 5.0)])
def test_holder_constant_matches_dual_weight_norm(p, q):
    assert gabor.holder_constant(p, q, 0.8, 40) == pytest.approx(gabor.dual_weight_norm(p, q, 0.8, 40) ** (1 / p), rel=1e-12)


@pytest.mark.parametrize("p, q", [(2.0, 2.0), (3.0, 2.0), (1.0, math.inf), (0.5, 2.0)])
def test_dual_weight_rejects_exponents(p, q):
    with pytest.raises(ConfigurationError):
        gabor.dual_weight_norm(p, q, 1.0, 10)


@given(st.integers(min_value=0, max_value=200), st.floats(min_value=0.0, max_value=3.0))
def test_lemma_ratio_stays_below_holder_constant(radius, s):
    c = gabor.make_coeffs(1, radius, CoeffProfile.POWER, beta=gabor.scan_family_beta(2.0, s))
    assert gabor.lemma_ratio(c, 1.0, 2.0, s) <= gabor.holder_constant(1.0, 2.0, s, radius) * (1 + 1e-12)


@pytest.mark.parametrize("p, q, s", [(1.0, 2.0, 0.75), (1.5, 3.0, 0.5), (1.0, 4.0, 1.0), (2.0, math.inf, 0.75)])
def test_steeper_family_is_held_by_the_holder_constant(p, q, s):
    beta = gabor.scan_family_beta(q, s) + 0.1
    scan = gabor.lemma_scan(p, q, s, [64, 128, 256, 512, 1024], beta=beta)
    assert scan.parameters["beta"] == pytest.approx(beta)
    holder = [gabor.holder_constant(p, q, s, int(radius)) for radius in scan.axis]
    assert all(r <= h * (1 + 1e-12) for r, h in zip(scan.ratios, holder))
    assert max(scan.ratios) <= holder[-1] * (1 + 1e-12)


def test_steeper_endpoint_family_converges():
    scan = gabor.lemma_scan(1.0, math.inf, 1.5, [64, 128, 256, 512, 1024], beta=1.6)
    assert scan.classification == Verdict.BOUNDED
    assert 0 < scan.increments[-1] < 0.01


@pytest.mark.parametrize(
    "p, q, n, expected",
    [(1.0, math.inf, 1, 1.0), (2.0, 2.0, 1, 0.0), (1.0, 2.0, 2, 1.0), (4.0, 2.0, 1, 0.25)],
)
def test_critical_exponent(p, q, n, expected):
    assert gabor.critical_exponent(p, q, n) == pytest.approx(expected)


def test_classify_bounded_sequence():
    report = gabor.classify_trend(SCAN_N, [1.0, 1.01, 1.012, 1.0125, 1.0126])
    assert report.classification == Verdict.BOUNDED


def test_classify_linear_growth():
    report = gabor.classify_trend(SCAN_N, [2.0 * n + 1 for n in SCAN_N])
    assert report.classification == Verdict.GROWING
    assert report.slope == pytest.approx(1.0, abs=0.02)


def test_classify_needs_enough_doublings():
    report = gabor.classify_trend([16, 32, 64], [33.0, 65.0, 129.0])
    assert report.classification == Verdict.INCONCLUSIVE


def test_classify_rejects_mismatched_lengths():
    with pytest.raises(ConfigurationError):
        gabor.classify_trend([1, 2], [1.0])
    with pytest.raises(ConfigurationError):
        gabor.classify_trend([0, 1, 2, 4, 8, 16], [1.0, 2.0, 3.0, 5.0, 9.0, 17.0])


def test_endpoint_scans():
    assert gabor.lemma_scan(1.0, math.inf, 0.5, SCAN_N).classification == Verdict.GROWING
    assert gabor.lemma_scan(1.0, math.inf, 1.0, SCAN_N).classification == Verdict.GROWING
    assert gabor.lemma_scan(1.0, math.inf, 1.5, SCAN_N).classification == Verdict.BOUNDED


def test_supercritical_scan_plateaus():
    report = gabor.lemma_scan(1.0, 2.0, 0.75, [64, 128, 256, 512, 1024])
    assert report.classification == Verdict.BOUNDED
    assert report.increments[-1] < 0.01
    holder = [gabor.holder_constant(1.0, 2.0, 0.75, int(radius)) for radius in report.axis]
    assert all(r <= h * (1 + 1e-12) for r, h in zip(report.ratios, holder))


def test_equal_exponents_are_bounded_at_zero_weight():
    assert gabor.lemma_scan(2.0, 2.0, 0.0, SCAN_N).classification == Verdict.BOUNDED


def test_scan_rejects_bad_n_lists():
    with pytest.raises(ConfigurationError):
        gabor.lemma_scan(1.0, 2.0, 1.0, [])
    with pytest.raises(ConfigurationError):
        gabor.lemma_scan(1.0, 2.0, 1.0, [16, 16, 32])
    with pytest.raises(ConfigurationError):
        gabor.lemma_scan(1.0, 2.0, 1.0, [0, 1, 2, 4, 8, 16])


def test_sequence_verdict_uses_the_adjoint_form_below_the_diagonal():
    report = gabor.sequence_verdict(2.0, 1.0, 0.0, SCAN_N)
    assert report.label.startswith("adjoint_ratio")
    assert report.ratios[-1] == pytest.approx(math.sqrt(2 * 256 + 1), rel=1e-12)


@pytest.mark.parametrize(
    "p, q",
    [(2.0, 1.0), (4.0, 2.0), (math.inf, 2.0), (math.inf, 1.0), (3.0, 1.5), (4.0, 4.0 / 3.0)],
)
@pytest.mark.parametrize("offset, expected", [(1.0, Verdict.BOUNDED), (-0.5, Verdict.GROWING)])
def test_duality_symmetry(p, q, offset, expected):
    s = gabor.critical_exponent(p, q) + offset
    direct, dual = gabor.duality_check(p, q, s, SCAN_N)
    assert direct == dual == expected


def test_scans_are_thread_count_independent(monkeypatch):
    single = gabor.lemma_scan(1.0, 3.0, 0.4, SCAN_N)
    monkeypatch.setenv("WIENERLAB_THREADS", "3")
    get_settings.cache_clear()
    assert get_settings().threads == 3
    assert gabor.lemma_scan(1.0, 3.0, 0.4, SCAN_N) == single


def test_sharpness_scan_endpoint_verdicts():
    reports = gabor.sharpness_scan(1.0, math.inf, [0.5, 1.0, 1.5], SCAN_N)
    assert [r.classification for r in reports] == [Verdict.GROWING, Verdict.GROWING, Verdict.BOUNDED]


def test_lattice_sum_places_translates(operator_windows):
    phi, _ = operator_windows
    c = gabor.make_coeffs(1, 3, CoeffProfile.CUSTOM, evaluator=lambda k: k + 10.0)
    f_hat = gabor.synthesize_lattice_sum(c, phi)
    grid = phi.grid
    assert f_hat.side == Side.FREQUENCY
    for k in range(-3, 4):
        index = grid.index_of(float(k), Side.FREQUENCY)
        assert f_hat.values[index] == pytest.approx((k + 10.0) * math.exp(-1.0))
    assert np.abs(f_hat.values).max() == pytest.approx(13.0 * phi.certificate.sup_norm)
    assert f_hat.values[grid.index_of(4.0, Side.FREQUENCY)] == 0


def test_lattice_sum_needs_room(operator_windows):
    phi, _ = operator_windows
    with pytest.raises(DomainError):
        gabor.synthesize_lattice_sum(gabor.make_coeffs(1, 20, CoeffProfile.CONSTANT), phi)


def _operator_lattice(grid):
    return make_lattice(grid, x_stride=8, xi_stride=8)


def test_operator_ratio_is_unitary_at_p_equal_q(operator_windows):
    phi, g = operator_windows
    c = gabor.make_coeffs(1, 4, CoeffProfile.CONSTANT)
    ratio = gabor.operator_ratio(2.0, 2.0, 0.0, c, phi, g, lattice=_operator_lattice(phi.grid), boundary_tolerance=1e-2)
    assert ratio == pytest.approx(1.0, abs=1e-6)


def test_operator_ratio_is_scale_invariant(operator_windows):
    phi, g = operator_windows
    lattice = _operator_lattice(phi.grid)
    c = gabor.make_coeffs(1, 3, CoeffProfile.RANDOM, seed=3)
    options = dict(lattice=lattice, boundary_tolerance=1e-2)
    base = gabor.operator_ratio(1.0, 2.0, 0.5, c, phi, g, **options)
    scaled = gabor.operator_ratio(1.0, 2.0, 0.5, c.scaled(3.0 - 2.0j), phi, g, **options)
    assert scaled == pytest.approx(base, rel=1e-12)


def test_operator_ratio_grows_below_the_threshold(operator_windows):
    phi, g = operator_windows
    options = dict(lattice=_operator_lattice(phi.grid), boundary_tolerance=1e-2)
    small, large = (
        gabor.operator_ratio(1.0, math.inf, 0.0, gabor.make_coeffs(1, radius, CoeffProfile.CONSTANT), phi, g, **options)
        for radius in (2, 4)
    )
    assert large / small >= gabor.SPOT_GROWTH_FLOOR


def test_operator_ratio_kronecker_is_the_bump_alone(operator_windows):
    phi, g = operator_windows
    options = dict(lattice=_operator_lattice(phi.grid), boundary_tolerance=1e-2)
    kronecker = gabor.make_coeffs(1, 3, CoeffProfile.KRONECKER)
    single = gabor.make_coeffs(1, 0, CoeffProfile.CONSTANT)
    assert gabor.operator_ratio(2.0, 2.0, 0.0, kronecker, phi, g, **options) == pytest.approx(
        gabor.operator_ratio(2.0, 2.0, 0.0, single, phi, g, **options), rel=1e-12
    )


def test_operator_ratio_reports_boundary_leak(operator_windows):
    phi, g = operator_windows
    c = gabor.make_coeffs(1, 2, CoeffProfile.CONSTANT)
    with pytest.raises(DomainError) as excinfo:
        gabor.operator_ratio(1.0, 2.0, 0.0, c, phi, g, lattice=_operator_lattice(phi.grid), boundary_tolerance=1e-300)
    assert excinfo.value.measured > 1e-300


def test_lattice_sum_decays_in_space(operator_windows):
    phi, _ = operator_windows
    f = inverse_fourier(gabor.synthesize_lattice_sum(gabor.make_coeffs(1, 2, CoeffProfile.CONSTANT), phi))
    values = np.abs(f.values)
    assert values[0] < 1e-2 * values.max()


def test_alpha_ratio_at_two_is_the_operator_ratio(operator_windows):
    phi, g = operator_windows
    options = dict(lattice=_operator_lattice(phi.grid), boundary_tolerance=1e-2)
    c = gabor.make_coeffs(1, 2, CoeffProfile.CONSTANT)
    assert gabor.alpha_ratio(2.0, 1.0, 2.0, 0.0, c, phi, g, **options) == gabor.operator_ratio(
        1.0, 2.0, 0.0, c, phi, g, **options
    )


def test_spot_grid_covers_the_box():
    grid = gabor.spot_grid(4)
    assert grid.index_of(5.0, Side.FREQUENCY) is not None
    assert gabor.spot_grid(40).samples_per_dim > grid.samples_per_dim
    with pytest.raises(ConfigurationError):
        gabor.spot_grid(4, dimension=2)


@pytest.mark.slow
def test_operator_spot_path_on_the_default_grid():
    c = gabor.make_coeffs(1, 4, CoeffProfile.CONSTANT)
    assert gabor.operator_ratio(2.0, 2.0, 0.0, c) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.slow
def test_operator_growth_on_the_default_grid():
    p, q, s, radii = gabor.SPOT_GROWTH_CASE
    small, large = (gabor.operator_ratio(p, q, s, gabor.make_coeffs(1, radius, CoeffProfile.CONSTANT)) for radius in radii)
    assert large / small == pytest.approx(1.138, abs=0.01)
    assert large / small >= gabor.SPOT_GROWTH_FLOOR


def test_sharpness_scan_runs_the_operator_path(operator_windows):
    phi, g = operator_windows
    reports = gabor.sharpness_scan(
        1.0,
        math.inf,
        [0.5, 1.5],
        SCAN_N,
        spot_n_list=[2, 4],
        phi=phi,
        g=g,
        lattice=_operator_lattice(phi.grid),
        boundary_tolerance=1e-2,
    )
    assert len(reports) == 4
    fast, spot = reports[:2], reports[2:]
    assert all(r.label.startswith("lemma_ratio") for r in fast)
    assert [r.label for r in spot] == ["operator_ratio p=1 q=inf s=0.5", "operator_ratio p=1 q=inf s=1.5"]
    for report, s in zip(spot, (0.5, 1.5)):
        assert report.axis == [2.0, 4.0]
        assert report.parameters["beta"] == s
        assert report.classification in (Verdict.BOUNDED, Verdict.GROWING)
    direct = gabor.operator_ratio(
        1.0,
        math.inf,
        0.5,
        gabor.make_coeffs(1, 2, CoeffProfile.POWER, beta=0.5),
        phi,
        g,
        lattice=_operator_lattice(phi.grid),
        boundary_tolerance=1e-2,
    )
    assert spot[0].ratios[0] == direct
