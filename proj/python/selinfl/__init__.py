"""Influential observation detection for high-dimensional regression."""

import json

from ._core import (
    SelinflError,
    __version__,
    bh_reject,
    cv_select,
    gdf_scores,
    him_scores,
    lambda_max,
    lasso_fit,
)
from . import _core

__all__ = [
    "SelinflError",
    "__version__",
    "bh_reject",
    "cv_select",
    "detect",
    "gdf_scores",
    "him_scores",
    "lambda_max",
    "lasso_fit",
    "simulate",
]


def detect(y, X, procedure="clusmip", selector=None, alpha=None, alpha0=None,
           clustering=None, seed=0, threads=1, rgd_m=None, rgd_n_sub=None):
    """Run a detection procedure; returns the result as a dict.

    Row ids in the result are 1-based positions into y.
    """
    text = _core._detect_json(y, X, procedure, selector, alpha, alpha0, clustering,
                              seed, threads, rgd_m, rgd_n_sub)
    return json.loads(text)


def simulate(config, threads=1):
    """Run a simulation grid given as a dict; returns one summary per grid cell."""
    return json.loads(_core._simulate_json(json.dumps(config), threads))
