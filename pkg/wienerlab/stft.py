"""Windows, the discrete short-time Fourier transform and its covariance checks.

V_g f(x, xi) = int e^{-i xi.t} conj(g(t - x)) f(t) dt is evaluated by quadrature
on the grid, one lattice row (window position) at a time, with the translated
window wrapped periodically.
"""
import itertools
import math
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from wienerlab.errors import ConfigurationError, ConstructionError, ResolutionError, UsageError
from wienerlab.field import centered_dft, centered_idft, forward_fourier, l2_norm
from wienerlab.logs import get_logger
from wienerlab.schemas.grid import GridSpec, SampledField, Side
from wienerlab.schemas.timefreq import LatticeSpec, TimeFrequencyMatrix, Window, WindowCertificate, WindowKind

logger = get_logger(__name__)

BUMP_HALF_WIDTH = 1.0 / 8.0
BUMP_TRANSFORM_BOX = 3.0 / 8.0
PLATEAU_HALF_WIDTH = 1.0 / 4.0
PLATEAU_SUPPORT = 3.0 / 8.0
PLATEAU_INDICATOR = 5.0 / 16.0
MOLLIFIER_RADIUS = 1.0 / 16.0
MIN_SAMPLES_ACROSS = 8
CERTIFICATE_POINTS = 25
ROW_BUDGET = 1 << 22


def _bump_factor(u: np.ndarray) -> np.ndarray:
    inside = np.abs(u) < 1.0
    safe = np.where(inside, u, 0.0)
    return np.where(inside, np.exp(-1.0 / (1.0 - safe**2)), 0.0)


def _smooth_step(u: np.ndarray) -> np.ndarray:
    """C^infinity step: 0 for u <= 0, 1 for u >= 1."""

    def e(v):
        positive = v > 0
        return np.where(positive, np.exp(-1.0 / np.where(positive, v, 1.0)), 0.0)

    a, b = e(u), e(1.0 - u)
    return np.where(u <= 0, 0.0, np.where(u >= 1, 1.0, a / np.where(a + b > 0, a + b, 1.0)))


def _plateau_factor(t: np.ndarray) -> np.ndarray:
    # indicator of [-5/16, 5/16] convolved with the derivative of the smooth step on [-1/16, 1/16]
    def cumulative(v):
        return _smooth_step((v + MOLLIFIER_RADIUS) / (2.0 * MOLLIFIER_RADIUS))

    return cumulative(t + PLATEAU_INDICATOR) - cumulative(t - PLATEAU_INDICATOR)


def evaluate_window(
    kind: WindowKind,
    coords: Sequence[np.ndarray],
    *,
    width: float = 1.0,
    base_kind: Optional[WindowKind] = None,
    sign: int = -1,
) -> np.ndarray:
    """Closed-form window profile at arbitrary coordinates (one array per axis)."""
    if kind == WindowKind.GAUSSIAN:
        r2 = sum(c**2 for c in coords)
        return np.exp(-r2 / (2.0 * width**2)) + 0j
    if kind == WindowKind.BUMP:
        return np.prod([_bump_factor(c / BUMP_HALF_WIDTH) for c in coords], axis=0) + 0j
    if kind == WindowKind.PLATEAU:
        return np.prod([_plateau_factor(c) for c in coords], axis=0) + 0j
    if kind == WindowKind.CHIRPED:
        if base_kind is None or base_kind == WindowKind.CHIRPED:
            raise ConfigurationError("chirped window needs a non-chirped base kind")
        r2 = sum(c**2 for c in coords)
        base = evaluate_window(base_kind, coords, width=width)
        return base * np.exp(sign * 1j * r2)
    raise ConfigurationError(f"unknown window kind {kind!r}")


def _transform_on_box(samples: SampledField, half_width: float, points: int = CERTIFICATE_POINTS) -> np.ndarray:
    """|int w(t) e^{-i omega.t} dt| on a uniform mesh of [-half_width, half_width]^n by direct quadrature."""
    grid = samples.grid
    axis = grid.axis(samples.side)
    values = samples.values
    support = np.nonzero(np.abs(values).reshape(-1) > 0)[0]
    if support.size == 0:
        return np.zeros((points,) * grid.dimension)
    index_box = np.unravel_index(support, values.shape)
    lo = [int(ix.min()) for ix in index_box]
    hi = [int(ix.max()) + 1 for ix in index_box]
    block = values[tuple(slice(a, b) for a, b in zip(lo, hi))]
    omega = np.linspace(-half_width, half_width, points)
    result = block
    for dim in range(grid.dimension):
        t = axis[lo[dim]:hi[dim]]
        kernel = np.exp(-1j * np.outer(omega, t))
        result = np.moveaxis(np.tensordot(kernel, result, axes=([1], [dim])), 0, dim)
    return np.abs(result) * samples.step**grid.dimension


def _require_resolution(grid: GridSpec, side: Side, span: float, label: str) -> None:
    across = span / grid.step(side)
    if across < MIN_SAMPLES_ACROSS:
        raise ResolutionError(f"{label} window spans {across:.1f} samples, need at least {MIN_SAMPLES_ACROSS}")


def _box_mask(grid: GridSpec, side: Side, half_width: float, closed: bool = True) -> np.ndarray:
    mesh = grid.mesh(side)
    inside = [np.abs(c) <= half_width if closed else np.abs(c) < half_width for c in mesh]
    return np.logical_and.reduce(inside)


def _certify(kind: WindowKind, samples: SampledField) -> WindowCertificate:
    grid, side = samples.grid, samples.side
    values = samples.values
    sup_norm = float(np.abs(values).max())
    if kind == WindowKind.BUMP:
        outside = ~_box_mask(grid, side, BUMP_HALF_WIDTH, closed=False)
        if np.any(values[outside] != 0):
            raise ConstructionError("bump samples do not vanish outside [-1/8, 1/8]^n")
        magnitude = _transform_on_box(samples, BUMP_TRANSFORM_BOX)
        centre = (CERTIFICATE_POINTS // 2,) * grid.dimension
        lower = float(magnitude.min())
        if not lower > 0:
            raise ConstructionError(f"bump transform lower bound {lower} is not positive")
        return WindowCertificate(
            support_half_width=BUMP_HALF_WIDTH,
            transform_peak=float(magnitude[centre]),
            transform_lower_bound=lower,
            transform_box_half_width=BUMP_TRANSFORM_BOX,
            sup_norm=sup_norm,
        )
    if kind == WindowKind.PLATEAU:
        plateau = _box_mask(grid, side, PLATEAU_HALF_WIDTH)
        outside = ~_box_mask(grid, side, PLATEAU_SUPPORT)
        if np.any(values[plateau] != 1) or np.any(values[outside] != 0):
            raise ConstructionError("plateau samples violate the plateau or support box")
        return WindowCertificate(
            support_half_width=PLATEAU_SUPPORT, plateau_half_width=PLATEAU_HALF_WIDTH, sup_norm=sup_norm
        )
    peak = float(np.abs(values.sum())) * samples.step**grid.dimension
    return WindowCertificate(transform_peak=peak, sup_norm=sup_norm)


def make_window(
    grid: GridSpec,
    kind: WindowKind,
    *,
    side: Side = Side.SPACE,
    width: float = 1.0,
    base: WindowKind = WindowKind.GAUSSIAN,
    sign: int = -1,
    normalize: bool = False,
) -> Window:
    if kind == WindowKind.BUMP:
        _require_resolution(grid, side, 2 * BUMP_HALF_WIDTH, "bump")
    elif kind == WindowKind.PLATEAU:
        _require_resolution(grid, side, 2 * PLATEAU_SUPPORT, "plateau")
    elif kind == WindowKind.GAUSSIAN or (kind == WindowKind.CHIRPED and base == WindowKind.GAUSSIAN):
        _require_resolution(grid, side, 2 * width, "gaussian")

    if kind == WindowKind.CHIRPED:
        base_window = make_window(grid, base, side=side, width=width)
        window = chirp_window(base_window, sign)
    else:
        values = evaluate_window(kind, grid.mesh(side), width=width)
        samples = SampledField(grid=grid, side=side, values=values)
        window = Window(kind=kind, width=width, samples=samples, certificate=_certify(kind, samples))
    if normalize:
        window = normalized(window)
    logger.debug("window_built", window=window.label, side=side.value, sup_norm=window.certificate.sup_norm)
    return window


def chirp_window(window: Window, sign: int) -> Window:
    """window * exp(sign*i*|t|^2); the modulus is unchanged sample by sample."""
    if window.kind == WindowKind.CHIRPED:
        raise ConfigurationError("cannot chirp an already chirped window")
    grid, side = window.grid, window.samples.side
    factor = np.exp(sign * 1j * grid.squared_radius(side))
    # checked on the factor: subnormal window tails carry no relative precision
    if not np.allclose(np.abs(factor), 1.0, rtol=0.0, atol=1e-12):
        raise ConstructionError("chirp factor is not unimodular")
    chirped = window.samples.values * factor
    samples = SampledField(grid=grid, side=side, values=chirped)
    return Window(
        kind=WindowKind.CHIRPED,
        base_kind=window.kind,
        sign=sign,
        width=window.width,
        scale=window.scale,
        samples=samples,
        certificate=window.certificate,
    )


def normalized(window: Window) -> Window:
    norm = l2_norm(window.samples)
    if norm == 0:
        raise ConstructionError("cannot normalize a zero window")
    return window.model_copy(update={"samples": window.samples.scaled(1.0 / norm), "scale": window.scale / norm})


def make_lattice(
    grid: GridSpec,
    *,
    x_stride: int = 1,
    xi_stride: int = 1,
    x_extent: Optional[float] = None,
    xi_extent: Optional[float] = None,
) -> LatticeSpec:
    """Lattice of grid points; symmetric about the origin when an extent is given, else the whole grid."""
    m = grid.samples_per_dim
    x_step = x_stride * grid.dx
    xi_step = xi_stride * grid.dxi
    if x_extent is None:
        x_offset, x_count = -grid.half_extent, math.ceil(m / x_stride)
    else:
        k = min(int(math.floor(x_extent / x_step + 1e-9)), int((m // 2) // x_stride))
        x_offset, x_count = -k * x_step, 2 * k + 1
    if xi_extent is None:
        xi_offset, xi_count = grid.dxi * (-m // 2 + 1), math.ceil(m / xi_stride)
    else:
        k = min(int(math.floor(xi_extent / xi_step + 1e-9)), int((m // 2 - 1) // xi_stride))
        xi_offset, xi_count = -k * xi_step, 2 * k + 1
    return LatticeSpec(
        x_step=x_step, xi_step=xi_step, x_count=x_count, xi_count=xi_count, x_offset=x_offset, xi_offset=xi_offset
    )


def lattice_indices(grid: GridSpec, lattice: LatticeSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Grid indices of the lattice points: (space indices, frequency indices)."""
    x_idx = [grid.index_of(x, Side.SPACE) for x in lattice.x_points()]
    xi_idx = [grid.index_of(xi, Side.FREQUENCY) for xi in lattice.xi_points()]
    if any(i is None for i in x_idx) or any(i is None for i in xi_idx):
        raise ConfigurationError("lattice points must lie on grid points inside the grid")
    return np.asarray(x_idx), np.asarray(xi_idx)


def _check_pair(f: SampledField, g: Window, side: Side = Side.SPACE) -> None:
    if f.grid != g.grid:
        raise UsageError("field and window live on different grids")
    if f.side != side or g.samples.side != side:
        raise UsageError(f"field and window must both be {side.value}-side")


def _row_spectra(
    values: np.ndarray, window: np.ndarray, grid: GridSpec, shifts: List[Tuple[int, ...]], side: Side
) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield (first row, block) of full transforms of conj(window shifted) * values, one row per shift."""
    n = grid.dimension
    axes = tuple(range(1, n + 1))
    size = grid.samples_per_dim**n
    chunk = max(1, ROW_BUDGET // size)
    weight = grid.step(side) ** n
    conj_window = np.conj(window)
    for start in range(0, len(shifts), chunk):
        block_shifts = shifts[start:start + chunk]
        rows = np.stack([np.roll(conj_window, s, axis=tuple(range(n))) * values for s in block_shifts])
        if side == Side.SPACE:
            yield start, centered_dft(rows, grid, axes) * weight
        else:
            yield start, centered_idft(rows, grid, axes) * weight


def _space_shifts(grid: GridSpec, x_idx: np.ndarray) -> List[Tuple[int, ...]]:
    centre = grid.samples_per_dim // 2
    return [tuple(int(i) - centre for i in point) for point in itertools.product(x_idx, repeat=grid.dimension)]


def stft(f: SampledField, g: Window, lattice: LatticeSpec, keep_phases: bool = False) -> TimeFrequencyMatrix:
    _check_pair(f, g)
    grid = f.grid
    n = grid.dimension
    x_idx, xi_idx = lattice_indices(grid, lattice)
    shifts = _space_shifts(grid, x_idx)
    out = np.empty((len(shifts),) + (len(xi_idx),) * n, dtype=np.complex128)
    for start, block in _row_spectra(f.values, g.samples.values, grid, shifts, Side.SPACE):
        rows = np.arange(block.shape[0])
        out[start:start + block.shape[0]] = block[np.ix_(rows, *([xi_idx] * n))]
    shape = (lattice.x_count,) * n + (lattice.xi_count,) * n
    return TimeFrequencyMatrix(
        lattice=lattice,
        dimension=n,
        magnitudes=np.abs(out).reshape(shape),
        phases=out.reshape(shape) if keep_phases else None,
    )


def shift_field(f: SampledField, offset: Sequence[float]) -> SampledField:
    """f(. - offset) for a grid-aligned offset, wrapping periodically."""
    step = f.step
    counts = []
    for o in offset:
        k = o / step
        if abs(k - round(k)) > 1e-9 * max(1.0, abs(k)):
            raise ConfigurationError(f"offset {o} is not a multiple of the grid step {step}")
        counts.append(int(round(k)))
    if len(counts) != f.grid.dimension:
        raise ConfigurationError("offset dimension does not match the grid")
    return f.replace_values(np.roll(f.values, tuple(counts), axis=tuple(range(f.grid.dimension))))


def shear_residual(f: SampledField, g: Window, sign: int, lattice: LatticeSpec) -> float:
    """max | |V_g[e^{sign i|.|^2} f](x, xi)| - |V_{g e^{-sign i|.|^2}} f(x, xi - 2 sign x)| | over the lattice."""
    if sign not in (-1, 1):
        raise ConfigurationError("sign must be +1 or -1")
    if not lattice.shear_compatible:
        raise ConfigurationError("lattice is not shear compatible: 2*x_step must be a multiple of xi_step")
    _check_pair(f, g)
    grid = f.grid
    n = grid.dimension
    chirp = np.exp(sign * 1j * grid.squared_radius(Side.SPACE))
    left = stft(f.replace_values(f.values * chirp), g, lattice).magnitudes

    twisted = chirp_window(g, -sign) if g.kind != WindowKind.CHIRPED else None
    twisted_values = twisted.samples.values if twisted is not None else g.samples.values * np.conj(chirp)
    x_idx, xi_idx = lattice_indices(grid, lattice)
    x_points = lattice.x_points()
    shifts = _space_shifts(grid, x_idx)
    points = list(itertools.product(x_points, repeat=n))
    right = np.empty((len(shifts),) + (len(xi_idx),) * n)
    m = grid.samples_per_dim
    for start, block in _row_spectra(f.values, twisted_values, grid, shifts, Side.SPACE):
        for local in range(block.shape[0]):
            point = points[start + local]
            per_axis = []
            for x in point:
                moved = xi_idx - int(round(2 * sign * x / grid.dxi))
                if moved.min() < 0 or moved.max() >= m:
                    raise ConfigurationError("sheared frequencies leave the grid; shrink the lattice")
                per_axis.append(moved)
            right[start + local] = np.abs(block[local][np.ix_(*per_axis)])
    right = right.reshape(left.shape)
    residual = float(np.max(np.abs(left - right))) if left.size else 0.0
    logger.debug("shear_residual", sign=sign, residual=residual)
    return residual


def fourier_symmetry_residual(f: SampledField, g: Window, lattice: LatticeSpec) -> float:
    """max | |V_g f(x, xi)| - (2 pi)^{-n} |V_{g^} f^(xi, -x)| | over the lattice."""
    _check_pair(f, g)
    grid = f.grid
    n = grid.dimension
    left = stft(f, g, lattice).magnitudes
    f_hat = forward_fourier(f).values
    g_hat = forward_fourier(g.samples).values
    x_idx, xi_idx = lattice_indices(grid, lattice)
    anchor = grid.samples_per_dim // 2 - 1
    shifts = [tuple(int(j) - anchor for j in point) for point in itertools.product(xi_idx, repeat=n)]
    right = np.empty((len(shifts),) + (len(x_idx),) * n)
    for start, block in _row_spectra(f_hat, g_hat, grid, shifts, Side.FREQUENCY):
        rows = np.arange(block.shape[0])
        right[start:start + block.shape[0]] = np.abs(block[np.ix_(rows, *([x_idx] * n))])
    right = right.reshape((lattice.xi_count,) * n + (lattice.x_count,) * n)
    right = np.moveaxis(right, tuple(range(n)), tuple(range(n, 2 * n))) / (2.0 * math.pi) ** n
    residual = float(np.max(np.abs(left - right))) if left.size else 0.0
    logger.debug("fourier_symmetry_residual", residual=residual)
    return residual
