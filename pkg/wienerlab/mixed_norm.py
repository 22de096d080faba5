"""Sequence norms and the weighted mixed norms of modulation and Wiener amalgam spaces."""
import itertools
import math
from typing import Optional, Sequence, Union

import numpy as np

from wienerlab.errors import ExponentError, ShapeError, UsageError
from wienerlab.field import bessel_potential
from wienerlab.logs import get_logger
from wienerlab.schemas.grid import SampledField
from wienerlab.schemas.norms import ExponentPair, Flavor, NormSpec
from wienerlab.schemas.timefreq import LatticeSpec, TimeFrequencyMatrix, Window
from wienerlab.stft import stft

logger = get_logger(__name__)

Weights = Union[float, np.ndarray, None]


def conjugate_exponent(p: float) -> float:
    _check_exponent(p)
    return ExponentPair.conjugate(p)


def _check_exponent(p: float) -> None:
    if not p >= 1:
        raise ExponentError(f"exponent must lie in [1, inf], got {p}")


def _weighted_norm(a: np.ndarray, p: float, axis: Optional[int] = None, weights: Weights = None) -> np.ndarray:
    """(sum w |a|^p)^{1/p} along ``axis``; for p = inf the weights drop out and the result is the max."""
    a = np.abs(a)
    if math.isinf(p):
        return a.max(axis=axis) if a.size else np.zeros(())
    peak = a.max(axis=axis, keepdims=True) if a.size else np.ones(())
    safe = np.where(peak > 0, peak, 1.0)
    terms = (a / safe) ** p
    if weights is not None:
        terms = terms * weights
    total = terms.sum(axis=axis, keepdims=True) ** (1.0 / p) * safe
    return np.squeeze(total, axis=axis) if axis is not None else total.reshape(())


def seq_norm(values: Sequence[complex], p: float) -> float:
    """(sum |a_k|^p)^{1/p}, the maximum for p = inf, 0 for an empty sequence."""
    _check_exponent(p)
    a = np.asarray(values, dtype=np.complex128).reshape(-1)
    if a.size == 0:
        return 0.0
    return float(_weighted_norm(a, p))


def _as_weights(weights: Weights, length: int, name: str) -> Optional[np.ndarray]:
    if weights is None:
        return None
    w = np.broadcast_to(np.asarray(weights, dtype=float), (length,)) if np.ndim(weights) == 0 else np.asarray(weights, dtype=float)
    if w.shape != (length,):
        raise ShapeError(f"{name} has shape {w.shape}, expected ({length},)")
    if np.any(w <= 0):
        raise ShapeError(f"{name} must be positive")
    return w


def mixed_matrix_norm(
    m: np.ndarray,
    inner_axis: int,
    inner_p: float,
    outer_p: float,
    inner_weights: Weights = None,
    outer_weights: Weights = None,
) -> float:
    """Weighted inner norm along ``inner_axis``, then the weighted outer norm of the result.

    Weights are measure factors: an entry a with weight w contributes w |a|^p.
    """
    _check_exponent(inner_p)
    _check_exponent(outer_p)
    m = np.asarray(m)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-axis array, got shape {m.shape}")
    if inner_axis not in (0, 1):
        raise ShapeError(f"inner_axis must be 0 or 1, got {inner_axis}")
    outer_axis = 1 - inner_axis
    w_in = _as_weights(inner_weights, m.shape[inner_axis], "inner_weights")
    w_out = _as_weights(outer_weights, m.shape[outer_axis], "outer_weights")
    if w_in is not None:
        w_in = w_in[:, None] if inner_axis == 0 else w_in[None, :]
    inner = _weighted_norm(m, inner_p, axis=inner_axis, weights=w_in)
    return float(_weighted_norm(inner, outer_p, axis=0, weights=w_out))


def _bracket(points: np.ndarray, dimension: int) -> np.ndarray:
    """<v> = (1 + |v|^2)^{1/2} at every point of the n-fold product of ``points``."""
    r2 = np.array([sum(c**2 for c in v) for v in itertools.product(points, repeat=dimension)])
    return np.sqrt(1.0 + r2)


def matrix_norm(tf: TimeFrequencyMatrix, spec: NormSpec, counting: bool = False) -> float:
    """Norm of a precomputed |V_g f| under ``spec``; ``counting`` drops the quadrature measures."""
    n = tf.dimension
    lattice = tf.lattice
    weighted = tf.as_matrix()
    if spec.s1:
        weighted = weighted * _bracket(lattice.x_points(), n)[:, None] ** spec.s1
    if spec.s:
        weighted = weighted * _bracket(lattice.xi_points(), n)[None, :] ** spec.s
    x_measure = None if counting else lattice.x_step**n
    xi_measure = None if counting else lattice.xi_step**n
    p, q = spec.exponents.p, spec.exponents.q
    if spec.flavor == Flavor.MODULATION:
        return mixed_matrix_norm(weighted, 0, p, q, x_measure, xi_measure)
    return mixed_matrix_norm(weighted, 1, q, p, xi_measure, x_measure)


def modulation_norm(f: SampledField, g: Window, spec: NormSpec, lattice: LatticeSpec) -> float:
    if spec.flavor != Flavor.MODULATION:
        raise UsageError("modulation_norm needs a modulation-flavor NormSpec")
    return matrix_norm(stft(f, g, lattice), spec)


def amalgam_norm(f: SampledField, g: Window, spec: NormSpec, lattice: LatticeSpec) -> float:
    if spec.flavor != Flavor.AMALGAM:
        raise UsageError("amalgam_norm needs an amalgam-flavor NormSpec")
    return matrix_norm(stft(f, g, lattice), spec)


def two_weight_modulation_norm(
    f: SampledField, g: Window, p: float, q: float, s1: float, s2: float, lattice: LatticeSpec
) -> float:
    """Modulation norm with the weight <x>^{s1} <xi>^{s2}."""
    return modulation_norm(f, g, NormSpec.modulation(p, q, s=s2, s1=s1), lattice)


def _norm(f: SampledField, g: Window, spec: NormSpec, lattice: LatticeSpec) -> float:
    return matrix_norm(stft(f, g, lattice), spec)


def lifting_ratio(
    f: SampledField,
    g: Window,
    p: float,
    q: float,
    s: float,
    t: float,
    lattice: LatticeSpec,
    flavor: Flavor = Flavor.AMALGAM,
) -> float:
    """||(I - Laplacian)^{t/2} f||_{X^{s-t}} / ||f||_{X^s}."""
    pair = ExponentPair(p=p, q=q)
    lifted = _norm(bessel_potential(f, t), g, NormSpec(exponents=pair, s=s - t, flavor=flavor), lattice)
    base = _norm(f, g, NormSpec(exponents=pair, s=s, flavor=flavor), lattice)
    ratio = lifted / base
    logger.debug("lifting_ratio", p=p, q=q, s=s, t=t, ratio=ratio)
    return ratio


def embedding_ratio(
    f: SampledField,
    g: Window,
    p: float,
    q1: float,
    q2: float,
    s1: float,
    s2: float,
    lattice: LatticeSpec,
    flavor: Flavor = Flavor.AMALGAM,
) -> float:
    """||f||_{X^{s2}_{p,q2}} / ||f||_{X^{s1}_{p,q1}}, the quantity bounded by the embedding constant."""
    tf = stft(f, g, lattice)
    target = matrix_norm(tf, NormSpec(exponents=ExponentPair(p=p, q=q2), s=s2, flavor=flavor))
    source = matrix_norm(tf, NormSpec(exponents=ExponentPair(p=p, q=q1), s=s1, flavor=flavor))
    return target / source
