"""Compactly supported polynomial kernels and their tail antiderivatives.

A kernel family is described by a polynomial ``R`` on ``[0, 1]`` in the
variable ``s = |x - y|^2 / (4 delta^2)``; ``R`` vanishes for ``s >= 1``.
The two tail antiderivatives are ``Rbar(r) = int_r^1 R`` and
``Rbarbar(r) = int_r^1 Rbar``.  The scaled kernels carry the factor
``c_delta = alpha2 / (4 delta^2)``: with ``alpha2`` fixed by
``2 pi alpha2 int_0^1 Rbar(r^2) r dr = 1`` this is exactly the scale that
makes ``Rbar_delta`` integrate to one over the plane (substitute
``z = (x - y) / 2 delta``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import InvalidDelta, NonNormalizable

TIERS = ("R", "Rbar", "Rbarbar")


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in the monomial basis, ``p(s) = sum_k coeffs[k] s^k``."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("Polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    def degree(self) -> int:
        for k in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[k] != 0.0:
                return k
        return 0

    def __call__(self, s):
        return npoly.polyval(s, self.coeffs)

    def deriv(self) -> "Polynomial":
        return Polynomial(tuple(npoly.polyder(self.coeffs)) or (0.0,))

    def integral(self, lo: float, hi: float) -> float:
        prim = npoly.polyint(self.coeffs)
        return float(npoly.polyval(hi, prim) - npoly.polyval(lo, prim))

    def as_array(self, length: int | None = None) -> np.ndarray:
        c = np.asarray(self.coeffs[: self.degree() + 1], dtype=float)
        if length is not None:
            out = np.zeros(length)
            out[: len(c)] = c
            return out
        return c


def antiderivative_tail(p: Polynomial) -> Polynomial:
    """Return ``q`` with ``q(r) = int_r^1 p(s) ds``."""
    prim = npoly.polyint(p.coeffs)
    q = -prim
    q[0] += npoly.polyval(1.0, prim)
    return Polynomial(tuple(q))


@dataclass(frozen=True)
class KernelFamily:
    delta: float
    r_poly: Polynomial
    rbar_poly: Polynomial
    rbarbar_poly: Polynomial
    alpha2: float
    c_delta: float

    def poly(self, which: str) -> Polynomial:
        return {"R": self.r_poly, "Rbar": self.rbar_poly, "Rbarbar": self.rbarbar_poly}[which]

    @property
    def horizon(self) -> float:
        """Interaction radius ``2 delta``."""
        return 2.0 * self.delta

    @property
    def max_degree(self) -> int:
        return self.rbarbar_poly.degree()

    def scaled_weights(self, which: str, length: int | None = None) -> np.ndarray:
        """Coefficients of ``c_delta * poly`` as a polynomial in ``(r / 2delta)^2``."""
        n = length if length is not None else self.max_degree + 1
        return self.c_delta * self.poly(which).as_array(n)

    def with_delta(self, delta: float) -> "KernelFamily":
        return make_kernel_family(self.r_poly.coeffs, delta)


def normalization_moment(rbar: Polynomial) -> float:
    """Exact value of ``int_0^1 rbar(r^2) r dr`` (substitute ``u = r^2``)."""
    return 0.5 * rbar.integral(0.0, 1.0)


def make_kernel_family(r_coeffs: Sequence[float], delta: float) -> KernelFamily:
    if not delta > 0.0 or not math.isfinite(delta):
        raise InvalidDelta(f"delta must be positive, got {delta!r}")
    r_poly = Polynomial(tuple(r_coeffs))
    rbar = antiderivative_tail(r_poly)
    rbarbar = antiderivative_tail(rbar)
    moment = normalization_moment(rbar)
    if not moment > 0.0:
        raise NonNormalizable(f"kernel moment int_0^1 Rbar(r^2) r dr = {moment!r} is not positive")
    alpha2 = 1.0 / (2.0 * math.pi * moment)
    return KernelFamily(
        delta=float(delta),
        r_poly=r_poly,
        rbar_poly=rbar,
        rbarbar_poly=rbarbar,
        alpha2=alpha2,
        c_delta=alpha2 / (4.0 * delta**2),
    )


def eval_scaled(kf: KernelFamily, which: str, x, y):
    """``c_delta * poly(|x - y|^2 / 4 delta^2)``, exactly zero outside the support.

    ``x`` and ``y`` broadcast against each other with the coordinate on the
    last axis.
    """
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    s = np.sum(d * d, axis=-1) / (4.0 * kf.delta**2)
    val = kf.c_delta * kf.poly(which)(np.minimum(s, 1.0))
    out = np.where(s < 1.0, val, 0.0)
    return float(out) if out.ndim == 0 else out


PRESETS = {
    "const": (1.0,),
    "quadratic": (1.0, -1.0),
}


def parse_kernel(spec: str) -> tuple:
    """Parse a CLI kernel preset into a coefficient tuple."""
    if spec in PRESETS:
        return PRESETS[spec]
    if spec.startswith("poly:"):
        body = spec[len("poly:"):]
        try:
            coeffs = tuple(float(c) for c in body.split(","))
        except ValueError:
            raise ValueError(f"bad kernel coefficients in {spec!r}") from None
        if not coeffs:
            raise ValueError(f"no kernel coefficients in {spec!r}")
        return coeffs
    raise ValueError(f"unknown kernel {spec!r}; expected const, quadratic or poly:c0,c1,...")
