"""Numerical checks of curvature-weighted functional inequalities."""

import json

from . import _core
from ._core import (
    RiccikitError,
    rho_poly_bounded,
    rho_poly_monotone,
    ric_1d_power,
    small_dimension_condition,
)

__all__ = [
    "RiccikitError",
    "catalog",
    "check",
    "check_csv",
    "monotone_map",
    "rho_poly_bounded",
    "rho_poly_monotone",
    "ric_1d_power",
    "sample",
    "small_dimension_condition",
    "spectral_gap",
]


def catalog():
    """Catalog entries as dicts (id, statement, constant_known, parameters, dims)."""
    return json.loads(_core.catalog_json())


def check(config, workers=1):
    """Run one experiment or a suite; returns the report rows as dicts."""
    return json.loads(_core.check_json(json.dumps(config), workers, "json"))["rows"]


def check_csv(config, workers=1):
    return _core.check_json(json.dumps(config), workers, "csv")


def spectral_gap(potential, a, b, n=4096):
    """(lambda_1, Poincare constant) of exp(-V) on [a, b] with Neumann ends."""
    return _core.spectral_gap(json.dumps(potential), a, b, n)


def monotone_map(source, target, xs):
    """List of (T(x), T'(x)) for the increasing map pushing source onto target."""
    return _core.monotone_map(json.dumps(source), json.dumps(target), list(xs))


def sample(measure, dim, n, seed, workers=1):
    import numpy as np

    return np.asarray(_core.sample(json.dumps(measure), dim, n, seed, workers))
