"""Angles and orthogonality for discrete functions in lp geometry.

For p other than 2 the sequence space lp has no inner product, but a weaker
pairing can be built from the duality map f -> f*. This module computes that
pairing, the associated Pythagorean defect and angle, and an orthogonality
test, for real or complex sample sequences with a uniform quadrature weight.

The defect has a closed form worth keeping in mind: it always equals
``||f+g||_p^p - ||f||_p^p - ||g||_p^p``. At p = 2 this is twice the classical
inner product; at p = 1 it is the triangle-inequality slack, which is never
positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

__all__ = [
    "DimensionMismatch",
    "DiscreteFunction",
    "PExponent",
    "GeometryResult",
    "dualize",
    "weak_inner_product",
    "pythagorean_defect",
    "angle",
    "is_orthogonal",
    "pair_geometry",
]

DEFAULT_ORTHO_TOL = 1e-10


class DimensionMismatch(ValueError):
    """Raised when two functions do not live on the same sample grid."""


@dataclass(frozen=True)
class DiscreteFunction:
    """A finite sample sequence with a uniform quadrature weight.

    Attributes:
        values: real or complex samples, length >= 1, all finite.
        weight: positive weight applied to every sample when summing.
    """

    values: np.ndarray
    weight: float = 1.0

    def __post_init__(self) -> None:
        vals = np.asarray(self.values)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError("values must be a non-empty 1-d sequence")
        if not np.issubdtype(vals.dtype, np.number):
            raise ValueError("values must be numeric")
        if np.iscomplexobj(vals):
            vals = vals.astype(np.complex128, copy=True)
        else:
            vals = vals.astype(np.float64, copy=True)
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite (no NaN or Inf)")
        if not (isinstance(self.weight, (int, float)) and math.isfinite(self.weight) and self.weight > 0):
            raise ValueError("weight must be a positive finite real")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "weight", float(self.weight))

    def __len__(self) -> int:
        return self.values.size

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)


FunctionLike = Union[DiscreteFunction, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class PExponent:
    """A Lebesgue exponent p >= 1 together with its conjugate q.

    1/p + 1/q = 1, with q = inf when p = 1.
    """

    p: float
    q: float = field(init=False)

    def __post_init__(self) -> None:
        p = float(self.p)
        if not (math.isfinite(p) and p >= 1.0):
            raise ValueError(f"exponent must satisfy p >= 1, got {self.p!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", math.inf if p == 1.0 else p / (p - 1.0))


ExponentLike = Union[PExponent, float, int]


def _as_function(f: FunctionLike) -> DiscreteFunction:
    if isinstance(f, DiscreteFunction):
        return f
    return DiscreteFunction(np.asarray(f))


def _as_exponent(p: ExponentLike) -> PExponent:
    if isinstance(p, PExponent):
        return p
    return PExponent(float(p))


def _check_compatible(f: DiscreteFunction, g: DiscreteFunction) -> None:
    if len(f) != len(g):
        raise DimensionMismatch(f"length mismatch: {len(f)} vs {len(g)}")
    if f.weight != g.weight:
        raise DimensionMismatch(f"weight mismatch: {f.weight} vs {g.weight}")


@dataclass(frozen=True)
class GeometryResult:
    """Everything the pairing says about one (f, g) pair.

    defect equals 2 * weak_inner_product by algebra, and cot_angle equals
    the defect (the angle convention drops the 1/2 prefactor).
    """

    weak_inner_product: float
    cot_angle: float
    angle: float
    defect: float


def dualize(f: FunctionLike, p: ExponentLike) -> DiscreteFunction:
    """Apply the lp duality map to f.

    Real samples map to sign(f) |f|^(p-1); complex samples to
    f |f|^(p-2) with 0 kept at 0. For p = 1 this is the (unimodular) sign,
    for p = 2 the identity, and in all cases
    sum(w * f * conj(f*)) = ||f||_p^p.
    """
    fn = _as_function(f)
    pe = _as_exponent(p)
    v = fn.values
    mag = np.abs(v)
    if fn.is_complex:
        with np.errstate(divide="ignore", invalid="ignore"):
            phase = np.where(mag > 0, v / np.where(mag > 0, mag, 1.0), 0.0)
        dual = phase * mag ** (pe.p - 1.0)
    else:
        dual = np.sign(v) * mag ** (pe.p - 1.0)
    return DiscreteFunction(dual, fn.weight)


def _pair(u: np.ndarray, v: np.ndarray, weight: float) -> float:
    """Weighted pairing sum(w * u * conj(v)), real part."""
    return float(weight * np.sum((u * np.conj(v)).real))


def _norm_power(f: DiscreteFunction, pe: PExponent) -> float:
    return float(f.weight * np.sum(np.abs(f.values) ** pe.p))


def weak_inner_product(f: FunctionLike, g: FunctionLike, p: ExponentLike) -> float:
    """The duality-map pairing of f and g, with the 1/2 prefactor.

    Computed as
    1/2 * sum(w * Re[f conj(h - f*) + g conj(h - g*)]) with h = (f+g)*.
    At p = 2 this is the classical inner product; at p = 1 it equals
    (||f+g||_1 - ||f||_1 - ||g||_1) / 2.
    """
    fn, gn = _as_function(f), _as_function(g)
    _check_compatible(fn, gn)
    pe = _as_exponent(p)
    h = dualize(DiscreteFunction(fn.values + gn.values, fn.weight), pe).values
    fstar = dualize(fn, pe).values
    gstar = dualize(gn, pe).values
    total = _pair(fn.values, h - fstar, fn.weight) + _pair(gn.values, h - gstar, gn.weight)
    return 0.5 * total


def pythagorean_defect(f: FunctionLike, g: FunctionLike, p: ExponentLike) -> float:
    """Pairing of f+g against its own dual, minus the same for f and g alone.

    Equals ||f+g||_p^p - ||f||_p^p - ||g||_p^p; zero exactly when f and g
    are orthogonal in the weak sense. For p = 1 it is never positive.
    """
    fn, gn = _as_function(f), _as_function(g)
    _check_compatible(fn, gn)
    pe = _as_exponent(p)
    s = DiscreteFunction(fn.values + gn.values, fn.weight)
    h = dualize(s, pe).values
    return (
        _pair(s.values, h, fn.weight)
        - _pair(fn.values, dualize(fn, pe).values, fn.weight)
        - _pair(gn.values, dualize(gn, pe).values, gn.weight)
    )


def angle(f: FunctionLike, g: FunctionLike, p: ExponentLike) -> float:
    """Generalized angle between f and g, in (0, pi).

    arccot of the defect on the branch where arccot(0) = pi/2; the
    convention uses the pairing without the 1/2 prefactor, so
    cot(angle) = defect. Monotone decreasing in the defect.
    """
    return math.atan2(1.0, pythagorean_defect(f, g, p))


def is_orthogonal(
    f: FunctionLike,
    g: FunctionLike,
    p: ExponentLike,
    tol: float = DEFAULT_ORTHO_TOL,
) -> bool:
    """True when the weak inner product vanishes to within tol.

    The threshold is hybrid relative/absolute:
    |wip| <= tol * max(1, ||f||_p^p, ||g||_p^p).
    """
    if not (isinstance(tol, (int, float)) and tol > 0):
        raise ValueError("tol must be positive")
    fn, gn = _as_function(f), _as_function(g)
    _check_compatible(fn, gn)
    pe = _as_exponent(p)
    wip = weak_inner_product(fn, gn, pe)
    scale = max(1.0, _norm_power(fn, pe), _norm_power(gn, pe))
    return abs(wip) <= tol * scale


def pair_geometry(f: FunctionLike, g: FunctionLike, p: ExponentLike) -> GeometryResult:
    """Weak inner product, defect, and angle of one pair in a single record."""
    fn, gn = _as_function(f), _as_function(g)
    _check_compatible(fn, gn)
    pe = _as_exponent(p)
    wip = weak_inner_product(fn, gn, pe)
    defect = pythagorean_defect(fn, gn, pe)
    return GeometryResult(
        weak_inner_product=wip,
        cot_angle=defect,
        angle=math.atan2(1.0, defect),
        defect=defect,
    )
