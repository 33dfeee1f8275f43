"""Manufactured test problems on the unit square.

Each problem supplies the source ``f``, the Neumann flux ``g`` and the exact
solution of the nonlocal problem it was built for.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assembly import ScalarField


@dataclass(frozen=True)
class Problem:
    name: str
    f: ScalarField
    g: ScalarField
    exact: ScalarField
    description: str = ""


def _ones(p):
    return np.ones(len(np.atleast_2d(p)))


def _zeros(p):
    return np.zeros(len(np.atleast_2d(p)))


def _cosine(p):
    p = np.atleast_2d(np.asarray(p, dtype=float))
    return np.cos(math.pi * p[:, 0]) * np.cos(math.pi * p[:, 1])


def _cosine_source(p):
    return (2.0 * math.pi**2 + 1.0) * _cosine(p)


CONSTANT = Problem("constant", f=_ones, g=_zeros, exact=_ones,
                   description="f = 1, g = 0; u = 1 solves the nonlocal problem exactly")
COSINE = Problem("cosine", f=_cosine_source, g=_zeros, exact=_cosine,
                 description="u = cos(pi x) cos(pi y), f = (2 pi^2 + 1) u, g = 0")

PROBLEMS = {p.name: p for p in (CONSTANT, COSINE)}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
