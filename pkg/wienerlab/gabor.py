"""Coefficient sequences on Z^n, lattice-translate synthesis and sharpness scans.

The extremal family behind the necessity argument is f^ = sum_l c_l phi(. - l)
with phi a bump supported in [-1/8, 1/8]^n. Boundedness of e^{i Laplacian} from
W^s_{p,q} to W_{p,q} forces

    ||c||_{l^p} <~ ||<k>^s c_k||_{l^q}            (the lemma inequality),

so the asymptotics in N reduce to exact sums over the box |k|_inf <= N. The
fast path scans those sums; the spot path runs the full operator pipeline.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from wienerlab.errors import ConfigurationError, DomainError, ZeroSequenceError
from wienerlab.field import apply_multiplier, boundary_maximum, inverse_fourier, make_grid
from wienerlab.logs import get_logger
from wienerlab.mixed_norm import matrix_norm, seq_norm
from wienerlab.schemas.gabor import CoeffProfile, CoeffSequence, ScanReport, Verdict
from wienerlab.schemas.grid import GridSpec, SampledField, Side, SymbolSpec
from wienerlab.schemas.norms import ExponentPair, NormSpec
from wienerlab.schemas.timefreq import LatticeSpec, Window, WindowKind
from wienerlab.settings import get_settings
from wienerlab.stft import evaluate_window, make_lattice, make_window, stft

logger = get_logger(__name__)

TREND_THRESHOLD = 0.02
BURN_IN = 16
MIN_DOUBLINGS = 4
CONVERGENT_DECAY = 0.75
GROWING_DECAY = 0.85
SPOT_HALF_EXTENT = 1024 * math.pi
SPOT_SAMPLES = 32768
SPOT_WINDOW_WIDTH = 4.0
SPOT_X_STRIDE = 8
SPOT_XI_STRIDE = 32
# (p, q, s, N list) of the recorded operator growth run; constant coefficients there measure
# ratio(N=4) / ratio(N=2) = 1.138 on the default spot grid
SPOT_GROWTH_CASE = (1.0, math.inf, 0.0, (2, 4))
SPOT_GROWTH_FLOOR = 1.1


def _parallel_map(fn: Callable, items: Sequence) -> List:
    threads = get_settings().threads
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _inverse(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


def critical_exponent(p: float, q: float, dimension: int = 1) -> float:
    """n |1/p - 1/q|, the boundary of the boundedness range."""
    return dimension * abs(_inverse(p) - _inverse(q))


def make_coeffs(
    dimension: int,
    support_radius: int,
    profile: CoeffProfile,
    *,
    beta: Optional[float] = None,
    evaluator: Optional[Callable[..., np.ndarray]] = None,
    seed: Optional[int] = None,
) -> CoeffSequence:
    if dimension < 1:
        raise ConfigurationError(f"dimension must be positive, got {dimension}")
    if support_radius < 0:
        raise ConfigurationError(f"support radius must be nonnegative, got {support_radius}")
    side = 2 * support_radius + 1
    shape = (side,) * dimension
    axis = np.arange(-support_radius, support_radius + 1, dtype=float)
    mesh = np.meshgrid(*([axis] * dimension), indexing="ij")
    if profile == CoeffProfile.CONSTANT:
        values = np.ones(shape)
    elif profile == CoeffProfile.POWER:
        if beta is None:
            raise ConfigurationError("power profile needs beta")
        values = np.sqrt(1.0 + sum(c**2 for c in mesh)) ** (-beta)
    elif profile == CoeffProfile.KRONECKER:
        values = np.zeros(shape)
        values[(support_radius,) * dimension] = 1.0
    elif profile == CoeffProfile.CUSTOM:
        if evaluator is None:
            raise ConfigurationError("custom profile needs an evaluator")
        values = np.broadcast_to(np.asarray(evaluator(*mesh), dtype=np.complex128), shape)
    elif profile == CoeffProfile.RANDOM:
        rng = np.random.default_rng(seed)
        values = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    else:
        raise ConfigurationError(f"unknown coefficient profile {profile!r}")
    return CoeffSequence(dimension=dimension, support_radius=support_radius, values=values, profile=profile, beta=beta)


def synthesize_lattice_sum(c: CoeffSequence, phi: Window) -> SampledField:
    """sum_l c_l phi(t - l) on the side of the grid where ``phi`` is sampled.

    Translates have disjoint supports, so every sample gets the single term of its
    nearest lattice point.
    """
    if phi.kind != WindowKind.BUMP:
        raise ConfigurationError("lattice sums need the certified bump window")
    grid, side = phi.grid, phi.samples.side
    if c.dimension != grid.dimension:
        raise ConfigurationError("coefficient and grid dimensions differ")
    axis = grid.axis(side)
    reach = c.support_radius + 1
    if axis.min() > -reach or axis.max() < reach:
        raise DomainError(f"grid axis [{axis.min():.3f}, {axis.max():.3f}] does not contain [-{reach}, {reach}]")
    mesh = grid.mesh(side)
    nearest = [np.rint(x) for x in mesh]
    local = [x - k for x, k in zip(mesh, nearest)]
    inside = np.logical_and.reduce([np.abs(k) <= c.support_radius for k in nearest])
    index = tuple(np.where(inside, k + c.support_radius, 0).astype(int) for k in nearest)
    bump = evaluate_window(WindowKind.BUMP, local) * phi.scale
    values = np.where(inside, c.values[index] * bump, 0.0)
    return SampledField(grid=grid, side=side, values=values)


def lemma_ratio(c: CoeffSequence, p: float, q: float, s: float) -> float:
    """||c||_{l^p} / ||<k>^s c_k||_{l^q} in counting norms."""
    denominator = seq_norm(c.brackets() ** s * c.values, q)
    if denominator == 0:
        raise ZeroSequenceError("lemma_ratio is undefined for the zero sequence")
    return seq_norm(c.values, p) / denominator


def adjoint_ratio(d: CoeffSequence, p: float, q: float, s: float) -> float:
    """||<k>^{-s} d_k||_{l^q} / ||d||_{l^p}: the lemma inequality for (p', q') in adjoint form."""
    denominator = seq_norm(d.values, p)
    if denominator == 0:
        raise ZeroSequenceError("adjoint_ratio is undefined for the zero sequence")
    return seq_norm(d.brackets() ** (-s) * d.values, q) / denominator


def _check_dual_exponents(p: float, q: float) -> None:
    if not (1 <= p < q < math.inf):
        raise ConfigurationError(f"dual weight needs 1 <= p < q < inf, got p={p}, q={q}")


def _box_brackets(support_radius: int, dimension: int) -> np.ndarray:
    return CoeffSequence(
        dimension=dimension,
        support_radius=support_radius,
        values=np.zeros((2 * support_radius + 1,) * dimension),
    ).brackets()


def dual_weight_sum(p: float, q: float, s: float, support_radius: int, dimension: int = 1) -> float:
    """sum_{|k|_inf <= N} <k>^{-s p (q/p)'}."""
    _check_dual_exponents(p, q)
    exponent = s * p * ExponentPair.conjugate(q / p)
    return float(np.sum(_box_brackets(support_radius, dimension) ** (-exponent)))


def dual_weight_norm(p: float, q: float, s: float, support_radius: int, dimension: int = 1) -> float:
    """||<k>^{-sp}||_{l^{(q/p)'}} over the box; bounded in N iff (q/p)' s p > n."""
    r = ExponentPair.conjugate(q / p)
    return dual_weight_sum(p, q, s, support_radius, dimension) ** (1.0 / r)


def holder_constant(p: float, q: float, s: float, support_radius: int, dimension: int = 1) -> float:
    """||<k>^{-s}||_{l^r} over the box with 1/r = |1/p - 1/q|: the best constant in the lemma inequality."""
    inv_r = abs(_inverse(p) - _inverse(q))
    weights = _box_brackets(support_radius, dimension) ** (-s)
    if inv_r == 0:
        return float(weights.max())
    return seq_norm(weights, 1.0 / inv_r)


def _slope(axis: Sequence[float], ratios: Sequence[float]) -> float:
    x = np.log(np.asarray(axis, dtype=float))
    y = np.log(np.asarray(ratios, dtype=float))
    if len(x) < 2 or np.ptp(x) == 0:
        return 0.0
    return float(np.polyfit(x, y, 1)[0])


def classify_trend(
    axis: Sequence[float],
    ratios: Sequence[float],
    *,
    label: str = "scan",
    parameters: Optional[Dict[str, float]] = None,
    threshold: float = TREND_THRESHOLD,
    burn_in: float = BURN_IN,
    min_doublings: float = MIN_DOUBLINGS,
) -> ScanReport:
    """Classify a ratio sequence as bounded, growing or inconclusive."""
    if len(axis) != len(ratios) or not axis:
        raise ConfigurationError("scan axis and ratios must be nonempty and of equal length")
    if any(n <= 0 for n in axis):
        raise ConfigurationError("scan axis must be positive")
    increments = [0.0] + [(b - a) / abs(a) if a else math.inf for a, b in zip(ratios, ratios[1:])]
    post = [d for n, d in zip(axis[1:], increments[1:]) if n > burn_in]
    slope = _slope([n for n in axis if n > burn_in] or axis, [r for n, r in zip(axis, ratios) if n > burn_in] or ratios)
    decay = None
    if len(post) >= 2 and post[-2] > 0:
        decay = post[-1] / post[-2]
    doublings = math.log2(axis[-1] / axis[0]) if axis[0] > 0 else 0.0

    if doublings < min_doublings - 1e-9 or not post:
        verdict = Verdict.INCONCLUSIVE
    elif all(d <= threshold for d in post):
        verdict = Verdict.BOUNDED
    elif (
        decay is not None
        and 0 <= decay <= CONVERGENT_DECAY
        and all(b <= a for a, b in zip(post, post[1:]))
    ):
        verdict = Verdict.BOUNDED
    elif post[-1] > threshold and slope > 0 and (decay is None or decay >= GROWING_DECAY):
        verdict = Verdict.GROWING
    else:
        verdict = Verdict.INCONCLUSIVE
    return ScanReport(
        label=label,
        parameters=parameters or {},
        axis=[float(n) for n in axis],
        ratios=[float(r) for r in ratios],
        increments=increments,
        slope=slope,
        decay_ratio=decay,
        classification=verdict,
    )


def _check_n_list(n_list: Sequence[int]) -> None:
    if not n_list:
        raise ConfigurationError("N list is empty")
    if any(n < 1 for n in n_list):
        raise ConfigurationError("support radii must be at least 1")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigurationError("N list must be strictly increasing")


def scan_family_beta(q: float, s: float, dimension: int = 1) -> float:
    """Decay order of the designated family power(s + n/q)."""
    return s + dimension * _inverse(q)


def lemma_scan(
    p: float,
    q: float,
    s: float,
    n_list: Sequence[int],
    dimension: int = 1,
    beta: Optional[float] = None,
) -> ScanReport:
    """lemma_ratio over power(beta) coefficients for each N (beta defaults to s + n/q)."""
    _check_n_list(n_list)
    beta = scan_family_beta(q, s, dimension) if beta is None else beta

    def cell(radius: int) -> float:
        return lemma_ratio(make_coeffs(dimension, radius, CoeffProfile.POWER, beta=beta), p, q, s)

    ratios = _parallel_map(cell, list(n_list))
    report = classify_trend(
        list(n_list),
        ratios,
        label=f"lemma_ratio p={p:g} q={q:g} s={s:g}",
        parameters={"p": p, "q": q, "s": s, "beta": beta, "n": dimension},
    )
    logger.info("lemma_scan", p=p, q=q, s=s, beta=beta, verdict=report.classification.value)
    return report


def adjoint_scan(p: float, q: float, s: float, n_list: Sequence[int], dimension: int = 1) -> ScanReport:
    """adjoint_ratio for q < p over its extremal family d_k = <k>^{-s r / p}, 1/r = 1/q - 1/p."""
    _check_n_list(n_list)
    if not q < p:
        raise ConfigurationError(f"adjoint scan needs q < p, got p={p}, q={q}")
    inv_r = _inverse(q) - _inverse(p)
    beta = s * _inverse(p) / inv_r

    def cell(radius: int) -> float:
        return adjoint_ratio(make_coeffs(dimension, radius, CoeffProfile.POWER, beta=beta), p, q, s)

    ratios = _parallel_map(cell, list(n_list))
    return classify_trend(
        list(n_list),
        ratios,
        label=f"adjoint_ratio p={p:g} q={q:g} s={s:g}",
        parameters={"p": p, "q": q, "s": s, "beta": beta, "n": dimension},
    )


def sequence_verdict(p: float, q: float, s: float, n_list: Sequence[int], dimension: int = 1) -> ScanReport:
    """Sequence-level classification for any exponent pair (q < p uses the adjoint form)."""
    if q < p:
        return adjoint_scan(p, q, s, n_list, dimension)
    return lemma_scan(p, q, s, n_list, dimension)


def duality_check(p: float, q: float, s: float, n_list: Sequence[int], dimension: int = 1) -> Tuple[Verdict, Verdict]:
    """Verdicts for (p, q, s) and for the dual pair (p', q', s); they must agree.

    The side with q < p is scanned in adjoint form, the other through the lemma ratio.
    """
    p_dual, q_dual = ExponentPair.conjugate(p), ExponentPair.conjugate(q)
    if q < p:
        direct = adjoint_scan(p, q, s, n_list, dimension)
        dual = lemma_scan(p_dual, q_dual, s, n_list, dimension)
    elif p < q:
        direct = lemma_scan(p, q, s, n_list, dimension)
        dual = adjoint_scan(p_dual, q_dual, s, n_list, dimension)
    else:
        direct = lemma_scan(p, q, s, n_list, dimension)
        dual = lemma_scan(p_dual, q_dual, s, n_list, dimension)
    logger.info(
        "duality_check", p=p, q=q, s=s, direct=direct.classification.value, dual=dual.classification.value
    )
    return direct.classification, dual.classification


def spot_grid(support_radius: int, dimension: int = 1) -> GridSpec:
    """Grid for the operator path: integer frequencies are samples and the frequency range covers the box."""
    if dimension != 1:
        raise ConfigurationError("the default operator grid is one-dimensional; pass phi and g explicitly")
    samples = SPOT_SAMPLES
    dxi = math.pi / SPOT_HALF_EXTENT
    while (samples // 2 - 1) * dxi < support_radius + 2:
        samples *= 2
    return make_grid(dimension, SPOT_HALF_EXTENT, samples)


def _check_decay(field: SampledField, label: str, tolerance: float) -> None:
    peak = float(np.abs(field.values).max())
    edge = boundary_maximum(field) / peak if peak > 0 else 0.0
    if edge > tolerance:
        raise DomainError(f"{label} has not decayed at the grid boundary (tolerance {tolerance:.1e})", measured=edge)


def operator_ratio(
    p: float,
    q: float,
    s: float,
    c: CoeffSequence,
    phi: Optional[Window] = None,
    g: Optional[Window] = None,
    *,
    sign: int = -1,
    alpha: float = 2.0,
    lattice: Optional[LatticeSpec] = None,
    boundary_tolerance: float = 1e-8,
) -> float:
    """||e^{sign i|D|^alpha} f||_{W_{p,q}} / ||f||_{W^s_{p,q}} for the lattice sum built from ``c``.

    ``phi`` is the certified bump, sampled on the frequency side for the extremal
    family f^ = sum c_l phi(. - l); the boundary check is relative to max |f|.
    """
    if phi is None:
        phi = make_window(spot_grid(c.support_radius, c.dimension), WindowKind.BUMP, side=Side.FREQUENCY)
    grid = phi.grid
    if g is None:
        g = make_window(grid, WindowKind.GAUSSIAN, width=SPOT_WINDOW_WIDTH)
    if lattice is None:
        lattice = make_lattice(grid, x_stride=SPOT_X_STRIDE, xi_stride=SPOT_XI_STRIDE)

    lattice_sum = synthesize_lattice_sum(c, phi)
    f = inverse_fourier(lattice_sum) if lattice_sum.side == Side.FREQUENCY else lattice_sum
    u = apply_multiplier(f, SymbolSpec.unimodular(alpha, sign))
    _check_decay(f, "lattice sum", boundary_tolerance)
    _check_decay(u, "propagated lattice sum", boundary_tolerance)

    denominator = matrix_norm(stft(f, g, lattice), NormSpec.amalgam(p, q, s=s))
    if denominator == 0:
        raise ZeroSequenceError("operator_ratio is undefined for the zero sequence")
    ratio = matrix_norm(stft(u, g, lattice), NormSpec.amalgam(p, q)) / denominator
    logger.info("operator_ratio", p=p, q=q, s=s, N=c.support_radius, alpha=alpha, ratio=ratio)
    return ratio


def alpha_ratio(
    alpha: float,
    p: float,
    q: float,
    s: float,
    c: CoeffSequence,
    phi: Optional[Window] = None,
    g: Optional[Window] = None,
    **kwargs,
) -> float:
    """operator_ratio for the symbol e^{sign i|xi|^alpha}; no threshold is claimed for alpha != 2."""
    return operator_ratio(p, q, s, c, phi, g, alpha=alpha, **kwargs)


def sharpness_scan(
    p: float,
    q: float,
    s_list: Sequence[float],
    n_list: Sequence[int],
    dimension: int = 1,
    *,
    spot_n_list: Optional[Sequence[int]] = None,
    phi: Optional[Window] = None,
    g: Optional[Window] = None,
    lattice: Optional[LatticeSpec] = None,
    boundary_tolerance: float = 1e-8,
) -> List[ScanReport]:
    """One fast-path report per s, then one operator-path report per s when ``spot_n_list`` is given.

    Without ``phi`` the operator path samples the bump on the default spot grid for the largest N.
    """
    _check_n_list(n_list)
    if not s_list:
        raise ConfigurationError("s list is empty")
    reports = [sequence_verdict(p, q, s, n_list, dimension) for s in s_list]
    if not spot_n_list:
        return reports
    _check_n_list(spot_n_list)
    if phi is None:
        phi = make_window(spot_grid(spot_n_list[-1], dimension), WindowKind.BUMP, side=Side.FREQUENCY)
    for s in s_list:
        beta = scan_family_beta(q, s, dimension)
        ratios = [
            operator_ratio(
                p,
                q,
                s,
                make_coeffs(dimension, radius, CoeffProfile.POWER, beta=beta),
                phi,
                g,
                lattice=lattice,
                boundary_tolerance=boundary_tolerance,
            )
            for radius in spot_n_list
        ]
        reports.append(
            classify_trend(
                list(spot_n_list),
                ratios,
                label=f"operator_ratio p={p:g} q={q:g} s={s:g}",
                parameters={"p": p, "q": q, "s": s, "beta": beta, "n": dimension},
                burn_in=0,
                min_doublings=1,
            )
        )
    return reports
