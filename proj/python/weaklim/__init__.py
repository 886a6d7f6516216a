"""Python bindings for the weaklim library.

Vectors are 1-D numpy arrays (or sequences); alpha1 and alpha0 are the two
phase constants. Structured reports come back as dicts.
"""

import json

import numpy as np

from . import _core
from ._core import Error, InfeasibleWitness, InvalidInput, OutsideC

__all__ = [
    "Error",
    "InfeasibleWitness",
    "InvalidInput",
    "OutsideC",
    "gamma",
    "quartic_minimizer",
    "necessary_margin",
    "psi",
    "phi",
    "linear_necessary_margin",
    "check_reachable",
    "build_laminate",
    "verify_laminate",
    "certificate",
    "scan",
]

SCAN_CLASSES = ("infeasible", "necessary_only", "reachable")


def _vec(v):
    return np.asarray(v, dtype=float).reshape(-1)


def gamma(t, alpha1, alpha0):
    return _core.gamma(t, alpha1, alpha0)


def quartic_minimizer(t, U, alpha1, alpha0):
    return _core.quartic_minimizer(t, _vec(U), alpha1, alpha0)


def necessary_margin(t, U, V, alpha1, alpha0):
    return _core.necessary_margin(t, _vec(U), _vec(V), alpha1, alpha0)


def psi(t, U, x, alpha1, alpha0):
    return _core.psi(t, _vec(U), _vec(x), alpha1, alpha0)


def phi(t, U, x, alpha1, alpha0):
    return _core.phi(t, _vec(U), _vec(x), alpha1, alpha0)


def linear_necessary_margin(t, U, V, alpha1, alpha0):
    return _core.linear_necessary_margin(t, _vec(U), _vec(V), alpha1, alpha0)


def check_reachable(t, U, V, alpha1, alpha0, seed=0):
    return json.loads(_core.check_reachable(t, _vec(U), _vec(V), alpha1, alpha0, seed))


def build_laminate(t, U, alpha1, alpha0, *, x=None, V=None):
    """Laminate for a lamination direction x, or for a target mean flux V."""
    if (x is None) == (V is None):
        raise ValueError("give exactly one of x and V")
    if x is not None:
        text = _core.build_laminate(t, _vec(U), _vec(x), alpha1, alpha0)
    else:
        text = _core.build_laminate_for_V(t, _vec(U), _vec(V), alpha1, alpha0)
    return json.loads(text)


def verify_laminate(laminate):
    return json.loads(_core.verify_laminate(json.dumps(laminate)))


def certificate(t, U, V, alpha1, alpha0):
    return json.loads(_core.certificate(t, _vec(U), _vec(V), alpha1, alpha0))


def scan(t, U, alpha1, alpha0, lo, hi, resolution, jobs=0, seed=0):
    """Grid classification. Returns the summary dict plus per-cell arrays."""
    raw = _core.scan(t, _vec(U), alpha1, alpha0, _vec(lo), _vec(hi), resolution, jobs, seed)
    return {
        "summary": json.loads(raw["summary"]),
        "V": raw["V"],
        "necessary_margin": raw["necessary_margin"],
        "cls": np.array([SCAN_CLASSES[c] for c in raw["cls"]]),
    }
