# pyranders/pyranders/misc.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import json
import os
import tempfile
from pathlib import Path
from typing import Callable, Dict, Union

import numpy as np


def central_gradient(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray, step: float) -> np.ndarray:
    """Central-difference gradient of a scalar function vectorized over (..., 2)

    Args:
        func (Callable): maps (..., 2) to (...)
        x (np.ndarray): evaluation points (..., 2)
        step (float or np.ndarray): step, broadcastable to x[..., 0]

    Returns:
        np.ndarray: shape (..., 2)

    """
    x = np.asarray(x, dtype=float)
    h = np.asarray(step, dtype=float)[..., None, None] * np.eye(2)
    # stack the four stencil points in one call
    pts = np.stack((x + h[..., 0, :], x - h[..., 0, :], x + h[..., 1, :], x - h[..., 1, :]))
    f = func(pts)
    denom = 2 * np.asarray(step, dtype=float)
    return np.stack(((f[0] - f[1]) / denom, (f[2] - f[3]) / denom), axis=-1)


def fd_jacobian(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of a map (..., 2) -> (..., 2), shape (..., 2, 2)"""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(2):
        e = np.zeros(2)
        e[j] = step
        cols.append((func(x + e) - func(x - e)) / (2 * step))
    return np.stack(cols, axis=-1)


def format_number(x: float) -> str:
    """17 significant digits, integers without a trailing .0"""
    return format(float(x), '.17g')


def dumps_record(record: Dict[str, Union[float, str]]) -> str:
    """Serializes a flat dict as one JSON object, numbers with 17 significant digits"""
    parts = []
    for k, v in record.items():
        value = json.dumps(v) if isinstance(v, str) else format_number(v)
        parts.append(f'{json.dumps(k)}: {value}')
    return '{' + ', '.join(parts) + '}'


def atomic_write(path: Union[str, Path], text: str) -> Path:
    """Writes text to path through a temporary file in the same directory and a rename

    Args:
        path (str or Path): destination
        text (str): file contents

    Returns:
        Path

    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', newline='') as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
