# pyranders/pyranders/settings.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import copy
import logging
import os
from typing import Any, Dict


WORKERS_ENV = 'PYRANDERS_WORKERS'

DEFAULT_CTX = {
    'geometry_settings': {
        'eps_dom': 2.0 ** -40,
    },

    'metric_settings': {
        'hessian_step': 1e-5,
    },

    'duality_settings': {
        'scan_nodes': 720,
        'golden_tol': 1e-12,
        'legendre_step': 1e-6,
    },

    'measure_settings': {
        'indicatrix_nodes': 4096,
        'laplacian_step': 1e-4,
        'rule': 'gauss',
        'order': 4,
    },

    'paths_settings': {
        'quad_per_segment': 64,
        'control_points': 3,
        'iterations': 300,
        'initial_step_fraction': 0.1,
        'max_halvings': 20,
    },

    'spectrum_settings': {
        'models': ('funk', 'pdisk', 'hplane'),
        'truncations': (0.9, 0.99, 0.999),
        'h_mesh': 0.02,
        'max_iters': 500,
        'rel_tol': 1e-7,
        'stall_window': 10,
        'fd_step': 1e-6,
        'finsler_threshold': 0.2,
        'reversible_floor': 0.23,
        'max_vertices': 250_000,
        'log_every': 50,
    },

    'verify_settings': {
        'samples': 100_000,
        'seed': 0,
        'truncation': 0.99,
        'tol': 1e-11,
        'commutativity_tol': 1e-12,
    },
}


def default_ctx() -> Dict[str, Dict[str, Any]]:
    """Returns a deep copy of the default context dict"""
    return copy.deepcopy(DEFAULT_CTX)


def setting(section: str, key: str, ctx: Dict = None) -> Any:
    """Looks up a setting in ctx, falling back to DEFAULT_CTX

    Args:
        section (str): e.g. 'spectrum_settings'
        key (str): the setting name
        ctx (dict): optional context dict with overrides

    Returns:
        Any

    """
    if ctx and key in ctx.get(section, {}):
        return ctx[section][key]
    return DEFAULT_CTX[section][key]


def workers() -> int:
    """Number of workers for partitioned computations, from PYRANDERS_WORKERS"""
    raw = os.environ.get(WORKERS_ENV)
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        logging.warning(f'Ignoring non-integer {WORKERS_ENV}={raw!r}')
        return 1
    return max(1, n)
