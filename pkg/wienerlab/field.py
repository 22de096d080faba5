"""Uniform grids, sampled fields and the continuous Fourier transform pair.

The transform follows the convention

    f^(xi) = int e^{-i xi.x} f(x) dx,    f(x) = (2 pi)^{-n} int e^{i x.xi} f^(xi) dxi,

approximated by Riemann sums with weights dx^n and (2 pi)^{-n} dxi^n. On the
grid x_k = -L + k dx, xi_m = m dxi the sums are an exact discrete transform pair.
"""
import math
from typing import Tuple, Union

import numpy as np
import scipy.fft

from wienerlab.errors import ConfigurationError, DomainError, ShapeError, UnsupportedDimensionError, UsageError
from wienerlab.logs import get_logger
from wienerlab.schemas.grid import (
    CustomProfile,
    GaussianProfile,
    GridSpec,
    PointMassProfile,
    Profile,
    SampledField,
    Side,
    SymbolKind,
    SymbolSpec,
)
from wienerlab.settings import get_settings

logger = get_logger(__name__)

MAX_DIMENSION = 2
BOUNDARY_WARN_LEVEL = 1e-10


def make_grid(dimension: int, half_extent: float, samples_per_dim: int) -> GridSpec:
    if dimension > MAX_DIMENSION:
        raise UnsupportedDimensionError(f"dimension {dimension} exceeds the supported maximum {MAX_DIMENSION}")
    if dimension < 1:
        raise ConfigurationError(f"dimension must be positive, got {dimension}")
    if not half_extent > 0:
        raise ConfigurationError(f"half_extent must be positive, got {half_extent}")
    if samples_per_dim < 8 or samples_per_dim % 2:
        raise ConfigurationError(f"samples_per_dim must be even and at least 8, got {samples_per_dim}")
    return GridSpec(dimension=dimension, half_extent=float(half_extent), samples_per_dim=samples_per_dim)


def make_shear_grid(dimension: int, samples_per_dim: int) -> GridSpec:
    """Grid with dxi = 2 dx, so that 2x is a frequency sample for every space sample x."""
    return make_grid(dimension, math.sqrt(math.pi * samples_per_dim / 4.0), samples_per_dim)


def _as_vector(value: Union[float, Tuple[float, ...]], dimension: int, name: str) -> Tuple[float, ...]:
    if isinstance(value, (int, float)):
        return (float(value),) * dimension
    if len(value) != dimension:
        raise ConfigurationError(f"{name} has {len(value)} components, expected {dimension}")
    return tuple(float(v) for v in value)


def synthesize(grid: GridSpec, profile: Profile) -> SampledField:
    """Sample a test signal on the space side of ``grid``."""
    mesh = grid.mesh(Side.SPACE)
    if isinstance(profile, GaussianProfile):
        center = _as_vector(profile.center, grid.dimension, "center")
        modulation = _as_vector(profile.modulation, grid.dimension, "modulation")
        for c in center:
            if not -grid.half_extent <= c < grid.half_extent:
                raise DomainError(f"center {center} lies outside [-{grid.half_extent}, {grid.half_extent})")
        r2 = sum((x - c) ** 2 for x, c in zip(mesh, center))
        phase = sum(x * w for x, w in zip(mesh, modulation))
        values = np.exp(-r2 / (2.0 * profile.width**2)) * np.exp(1j * phase)
    elif isinstance(profile, PointMassProfile):
        values = np.zeros(grid.shape, dtype=np.complex128)
        values[(grid.samples_per_dim // 2,) * grid.dimension] = grid.dx ** (-grid.dimension)
    elif isinstance(profile, CustomProfile):
        values = np.broadcast_to(np.asarray(profile.evaluator(*mesh), dtype=np.complex128), grid.shape)
    else:
        raise ConfigurationError(f"unknown profile {profile!r}")
    return SampledField(grid=grid, side=Side.SPACE, values=values)


def _axis_parity(grid: GridSpec, ndim: int, axis: int) -> np.ndarray:
    parity = np.where(grid.frequency_indices() % 2 == 0, 1.0, -1.0)
    view = [np.newaxis] * ndim
    view[axis] = slice(None)
    return parity[tuple(view)]


def centered_dft(values: np.ndarray, grid: GridSpec, axes: Tuple[int, ...]) -> np.ndarray:
    """sum_k e^{-i xi_m x_k} values_k over ``axes``, returned in centered frequency order."""
    shift = grid.samples_per_dim // 2 - 1
    spectrum = scipy.fft.fftn(values, axes=axes, workers=get_settings().threads)
    spectrum = np.roll(spectrum, (shift,) * len(axes), axis=axes)
    for axis in axes:
        spectrum = spectrum * _axis_parity(grid, spectrum.ndim, axis)
    return spectrum


def centered_idft(values: np.ndarray, grid: GridSpec, axes: Tuple[int, ...]) -> np.ndarray:
    """sum_m e^{i x_k xi_m} values_m over ``axes``; inverse of centered_dft up to M^len(axes)."""
    shift = grid.samples_per_dim // 2 - 1
    signed = values
    for axis in axes:
        signed = signed * _axis_parity(grid, signed.ndim, axis)
    signed = np.roll(signed, (-shift,) * len(axes), axis=axes)
    size = grid.samples_per_dim ** len(axes)
    return scipy.fft.ifftn(signed, axes=axes, workers=get_settings().threads) * size


def forward_fourier(f: SampledField) -> SampledField:
    if f.side != Side.SPACE:
        raise UsageError("forward_fourier expects a space-side field")
    grid = f.grid
    axes = tuple(range(grid.dimension))
    values = centered_dft(f.values, grid, axes) * grid.dx**grid.dimension
    return SampledField(grid=grid, side=Side.FREQUENCY, values=values)


def inverse_fourier(F: SampledField) -> SampledField:
    if F.side != Side.FREQUENCY:
        raise UsageError("inverse_fourier expects a frequency-side field")
    grid = F.grid
    axes = tuple(range(grid.dimension))
    weight = (grid.dxi / (2.0 * math.pi)) ** grid.dimension
    values = centered_idft(F.values, grid, axes) * weight
    return SampledField(grid=grid, side=Side.SPACE, values=values)


def evaluate_symbol(symbol: SymbolSpec, grid: GridSpec) -> np.ndarray:
    if symbol.kind == SymbolKind.CUSTOM:
        table = symbol.table
        if table.shape != grid.shape:
            raise ShapeError(f"symbol table shape {table.shape} does not match grid shape {grid.shape}")
        return table
    r2 = grid.squared_radius(Side.FREQUENCY)
    if symbol.kind == SymbolKind.UNIMODULAR:
        return np.exp(symbol.sign * 1j * np.sqrt(r2) ** symbol.alpha)
    if symbol.kind == SymbolKind.BESSEL:
        return (1.0 + r2) ** (symbol.order / 2.0) + 0j
    return np.ones(grid.shape, dtype=np.complex128)


def apply_multiplier(f: SampledField, symbol: SymbolSpec) -> SampledField:
    """symbol(D) f: multiply the transform of ``f`` by ``symbol`` and invert."""
    if f.side != Side.SPACE:
        raise UsageError("apply_multiplier expects a space-side field")
    table = evaluate_symbol(symbol, f.grid)
    spectrum = forward_fourier(f)
    return inverse_fourier(spectrum.replace_values(spectrum.values * table))


def bessel_potential(f: SampledField, order: float) -> SampledField:
    """(I - Laplacian)^{order/2} f."""
    return apply_multiplier(f, SymbolSpec.bessel(order))


def l2_norm(f: SampledField) -> float:
    return float(math.sqrt(f.step**f.grid.dimension * np.sum(np.abs(f.values) ** 2)))


def boundary_maximum(f: SampledField) -> float:
    """Largest |f| over the outer faces of the sample box."""
    magnitude = np.abs(f.values)
    peak = 0.0
    for axis in range(f.grid.dimension):
        for index in (0, -1):
            peak = max(peak, float(np.take(magnitude, index, axis=axis).max()))
    if peak > BOUNDARY_WARN_LEVEL:
        logger.warning("boundary_leak", side=f.side.value, boundary_max=peak, level=BOUNDARY_WARN_LEVEL)
    return peak
