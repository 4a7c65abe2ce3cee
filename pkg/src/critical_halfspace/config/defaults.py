from __future__ import annotations

from typing import Any

# Single source of every run default; q and p resolve to the critical exponents when None.
DEFAULTS: dict[str, Any] = {
    # problem
    "n": 3,
    "q": None,
    "p": None,
    "lam": 1.0,
    "y_prime": None,
    "family": "bubble",
    "c": 1.0,
    # residual checks
    "samples": 500,
    "sample_radius": 10.0,
    "tol": 1e-9,
    "kelvin_center": None,
    # moving planes
    "lambda_min": -10.0,
    "lambda_max": 10.0,
    "lambda_count": 41,
    "sigma_samples": 2000,
    "sigma_radius": 50.0,
    "plane_tol": 1e-9,
    "bisect_width": 1e-6,
    "axis_tol": 1e-5,
    "asymmetry_tol": 1e-8,
    # decay
    "radii": [1e2, 1e3, 1e4],
    "directions": 10,
    "mu_tol": 1e-4,
    "radial_tol": 1e-3,
    "grad_tol": 1e-3,
    # one-dimensional traces
    "s_lo": None,
    "s_hi": None,
    "scale_tol": 1e-8,
    "step": None,
    "t_max": None,
    # solver
    "mode": "manufactured",
    "extent": 12.0,
    "cells": 64,
    "grid_cells": [32, 64, 128],
    "perturbation": 0.3,
    "newton_tol": 1e-10,
    "max_iter": 30,
    "damping": 1.0,
    "continuation_steps": 5,
    "fit_rtol": 0.02,
    "order_target": 2.0,
    "order_tol": 0.2,
    "skip_unresolved": False,
    # run
    "seed": 0,
    "threads": 1,
    "dump_csv": False,
    "output_dir": "./runs",
}
