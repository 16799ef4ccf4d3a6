# pyranders/pyranders/metric.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from pyranders.base import MetricBase
from pyranders.exceptions import DegenerateDirectionError, InvalidInputError, ModelMismatchError
from pyranders.geometry import Model, ModelId, ModelPoint, TangentVector, check_domain, require_model
from pyranders.plugins import load_plugin
from pyranders.settings import DEFAULT_CTX


HESSIAN_STEP = DEFAULT_CTX['metric_settings']['hessian_step']


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _gap(x: np.ndarray, gap: np.ndarray = None) -> np.ndarray:
    return 1 - _dot(x, x) if gap is None else gap


def _conformal(scale: np.ndarray) -> np.ndarray:
    g = np.zeros(scale.shape + (2, 2), dtype=scale.dtype)
    g[..., 0, 0] = scale
    g[..., 1, 1] = scale
    return g


class FunkMetric(MetricBase):
    """Funk metric on the unit disk; alpha is the Klein metric"""

    domain = 'disk'

    def riemannian(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[..., 0], x[..., 1]
        d = 1 - (x1 * x1 + x2 * x2)
        dd = d * d
        g = np.empty(x.shape + (2,), dtype=d.dtype)
        g[..., 0, 0] = (d + x1 * x1) / dd
        g[..., 0, 1] = g[..., 1, 0] = x1 * x2 / dd
        g[..., 1, 1] = (d + x2 * x2) / dd
        return g

    def one_form(self, x: np.ndarray) -> np.ndarray:
        d = 1 - _dot(x, x)
        return x / d[..., None]

    def alpha(self, x: np.ndarray, v: np.ndarray, gap: np.ndarray = None) -> np.ndarray:
        d = _gap(x, gap)
        xv = _dot(x, v)
        return np.sqrt(d * _dot(v, v) + xv * xv) / d

    def beta(self, x: np.ndarray, v: np.ndarray, gap: np.ndarray = None) -> np.ndarray:
        return _dot(x, v) / _gap(x, gap)

    def defect(self, x: np.ndarray, v: np.ndarray, gap: np.ndarray = None) -> np.ndarray:
        return _dot(v, v) / _gap(x, gap)

    def bound(self, x: np.ndarray) -> np.ndarray:
        return np.hypot(x[..., 0], x[..., 1])


class PoincareDiskMetric(MetricBase):
    """Finsler-Poincare metric on the unit disk"""

    domain = 'disk'

    def riemannian(self, x: np.ndarray) -> np.ndarray:
        d = 1 - _dot(x, x)
        return _conformal(4 / (d * d))

    def one_form(self, x: np.ndarray) -> np.ndarray:
        s = _dot(x, x)
        return 4 * x / (1 - s * s)[..., None]

    def alpha(self, x: np.ndarray, v: np.ndarray, gap: np.ndarray = None) -> np.ndarray:
        return 2 * np.hypot(v[..., 0], v[..., 1]) / _gap(x, gap)

    def beta(self, x: np.ndarray, v: np.ndarray, gap: np.ndarray = None) -> np.ndarray:
        # 1 - |x|^4 = d (2 - d)
        d = _gap(x, gap)
        return 4 * _dot(x, v) / (d * (2 - d))

    def defect(self, x: np.ndarray, v: np.ndarray, gap: np.ndarray = None) -> np.ndarray:
        # |v|^2 (1 + s)^2 - 4 <x, v>^2 = |v|^2 d^2 + 4 (x ^ v)^2
        d = _gap(x, gap)
        c = _cross(x, v)
        c2 = c * c
        if gap is not None:
            # x is taken at norm sqrt(1 - gap) along its direction
            s = _dot(x, x)
            c2 = c2 * (1 - d) / np.where(s > 0, s, 1)
        return 4 * (_dot(v, v) * d * d + 4 * c2) / (d * d * (2 - d) * (2 - d))

    def bound(self, x: np.ndarray) -> np.ndarray:
        return 2 * np.hypot(x[..., 0], x[..., 1]) / (1 + _dot(x, x))


class HalfPlaneMetric(MetricBase):
    """Finsler-Poincare metric on the upper half plane; alpha is the Lobachevsky metric"""

    domain = 'half_plane'

    @staticmethod
    def drift(x: np.ndarray) -> np.ndarray:
        """w(x) = (2 x1 x2, x2^2 - x1^2 - 4)"""
        x1, x2 = x[..., 0], x[..., 1]
        return np.stack((2 * x1 * x2, x2 * x2 - x1 * x1 - 4), axis=-1)

    def riemannian(self, x: np.ndarray) -> np.ndarray:
        x2 = x[..., 1]
        return _conformal(1 / (x2 * x2))

    def one_form(self, x: np.ndarray) -> np.ndarray:
        denom = x[..., 1] * (4 + _dot(x, x))
        return self.drift(x) / denom[..., None]

    def alpha(self, x: np.ndarray, v: np.ndarray, gap: np.ndarray = None) -> np.ndarray:
        return np.hypot(v[..., 0], v[..., 1]) / x[..., 1]

    def beta(self, x: np.ndarray, v: np.ndarray, gap: np.ndarray = None) -> np.ndarray:
        return _dot(self.drift(x), v) / (x[..., 1] * (4 + _dot(x, x)))

    def defect(self, x: np.ndarray, v: np.ndarray, gap: np.ndarray = None) -> np.ndarray:
        # |w|^2 = (4 + |x|^2)^2 - 16 x2^2
        x2, p = x[..., 1], 4 + _dot(x, x)
        c = _cross(self.drift(x), v)
        return (c * c + 16 * x2 * x2 * _dot(v, v)) / (x2 * x2 * p * p)

    def bound(self, x: np.ndarray) -> np.ndarray:
        w = self.drift(x)
        return np.hypot(w[..., 0], w[..., 1]) / (4 + _dot(x, x))


@dataclass(frozen=True)
class MetricValue:
    F: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class FundamentalTensor:
    base: TangentVector
    matrix: np.ndarray
    min_eigenvalue: float


def metric_plugin(model: ModelId) -> MetricBase:
    """The metric plugin registered under the model's tag"""
    return load_plugin('metric', model.tag.value)


def _finite(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    if v.shape[-1:] != (2,) or not np.all(np.isfinite(v)):
        raise InvalidInputError(f'Expected finite vectors of shape (..., 2), got {v.shape}')
    return v


def randers_terms(model: ModelId,
                  x: np.ndarray,
                  v: np.ndarray,
                  check: bool = True,
                  gap: np.ndarray = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized alpha, beta and F

    Where beta < 0 the norm is evaluated as (alpha^2 - beta^2) / (alpha - beta)
    with the plugin's closed form of alpha^2 - beta^2, so F keeps full relative
    precision when |b|_g is close to 1.

    Args:
        model (ModelId): the model; the reversible flag zeroes beta
        x (np.ndarray): base points (..., 2)
        v (np.ndarray): vectors (..., 2)
        check (bool): validate domain membership
        gap (np.ndarray): optional 1 - |x|^2 for the disk models

    Returns:
        Tuple[np.ndarray, np.ndarray, np.ndarray]: alpha, beta, F

    """
    x, v = np.asarray(x), _finite(v)
    if check:
        check_domain(model, x)
    plugin = metric_plugin(model)
    if model.reversible:
        a = plugin.alpha(x, v, gap)
        return a, np.zeros_like(a), a
    return plugin.terms(x, v, gap)


def alpha_beta(model: ModelId,
               x: np.ndarray,
               v: np.ndarray,
               check: bool = True,
               gap: np.ndarray = None) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized alpha and beta terms, see randers_terms"""
    a, b, _ = randers_terms(model, x, v, check, gap)
    return a, b


def finsler_norm(model: ModelId, x: np.ndarray, v: np.ndarray, check: bool = True, gap: np.ndarray = None) -> np.ndarray:
    """Vectorized F(x, v) = alpha + beta"""
    return randers_terms(model, x, v, check, gap)[2]


def riemannian_tensor(model: ModelId, x: np.ndarray) -> np.ndarray:
    return metric_plugin(model).riemannian(np.asarray(x))


def one_form(model: ModelId, x: np.ndarray) -> np.ndarray:
    """Coefficients b(x); zero for reversible counterparts"""
    x = np.asarray(x)
    if model.reversible:
        return np.zeros_like(x)
    return metric_plugin(model).one_form(x)


def co_riemannian(model: ModelId, x: np.ndarray) -> np.ndarray:
    """Explicit 2x2 inverse of g_x"""
    g = riemannian_tensor(model, x)
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    inv = np.empty_like(g)
    inv[..., 0, 0] = g[..., 1, 1] / det
    inv[..., 1, 1] = g[..., 0, 0] / det
    inv[..., 0, 1] = -g[..., 0, 1] / det
    inv[..., 1, 0] = -g[..., 1, 0] / det
    return inv


def co_dot(ginv: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """g*(a, b) for covectors a, b"""
    return np.einsum('...i,...ij,...j->...', a, ginv, b)


def randers_bound_array(model: ModelId, x: np.ndarray) -> np.ndarray:
    """|b|_g through the co-metric g*, vectorized"""
    x = check_domain(model, np.asarray(x))
    b = one_form(model, x)
    return np.sqrt(co_dot(co_riemannian(model, x), b, b))


def randers_bound_closed_form(model: ModelId, x: np.ndarray) -> np.ndarray:
    """|b|_g from each model's closed form (|w|/(4+|x|^2) for the half plane)"""
    x = check_domain(model, np.asarray(x))
    if model.reversible:
        return np.zeros(x.shape[:-1], dtype=x.dtype)
    return metric_plugin(model).bound(x)


def evaluate(model: ModelId, tv: TangentVector) -> MetricValue:
    """Evaluates F, alpha and beta at a tangent vector

    Args:
        model (ModelId): the model
        tv (TangentVector): base point and vector

    Returns:
        MetricValue

    """
    require_model(model, tv.base)
    a, b, f = randers_terms(model, tv.base.array, tv.array)
    return MetricValue(F=float(f), alpha=float(a), beta=float(b))


def drift_field(x: ModelPoint) -> Tuple[float, float]:
    """Drift w(x) of the half-plane 1-form"""
    if x.model.tag is not Model.HPLANE:
        raise ModelMismatchError(f'drift_field is defined on the half plane, got {x.model.name}')
    w = HalfPlaneMetric.drift(x.array)
    return float(w[0]), float(w[1])


def randers_bound(model: ModelId, x: ModelPoint) -> float:
    """|beta_x|_g computed with the explicit inverse of g_x"""
    require_model(model, x)
    return float(randers_bound_array(model, x.array))


def fundamental_tensor(model: ModelId, tv: TangentVector, step: float = HESSIAN_STEP) -> FundamentalTensor:
    """Central finite-difference Hessian of v -> F^2/2

    Args:
        model (ModelId): the model
        tv (TangentVector): base point and nonzero vector
        step (float): relative step, scaled by max(1, |v|)

    Returns:
        FundamentalTensor

    """
    require_model(model, tv.base)
    v = tv.array
    if not np.any(v):
        raise DegenerateDirectionError('fundamental tensor is undefined at v = 0')
    h = step * max(1.0, float(np.hypot(*v)))
    offsets = h * np.array([[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1],
                            [1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)
    x = np.broadcast_to(tv.base.array, offsets.shape)
    f = 0.5 * finsler_norm(model, x, v + offsets) ** 2
    m = np.empty((2, 2))
    m[0, 0] = (f[1] - 2 * f[0] + f[2]) / (h * h)
    m[1, 1] = (f[3] - 2 * f[0] + f[4]) / (h * h)
    m[0, 1] = m[1, 0] = (f[5] - f[6] - f[7] + f[8]) / (4 * h * h)
    m = (m + m.T) / 2
    lo = float(np.linalg.eigvalsh(m)[0])
    logging.debug(f'fundamental tensor at {tv}: {m.tolist()}, min eigenvalue {lo}')
    return FundamentalTensor(base=tv, matrix=m, min_eigenvalue=lo)


def fundamental_tensor_exact(model: ModelId, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Closed-form Randers fundamental tensor (F/alpha)(a - l l^T) + (l + b)(l + b)^T

    Args:
        model (ModelId): the model
        x (np.ndarray): base points (..., 2)
        v (np.ndarray): nonzero vectors (..., 2)

    Returns:
        np.ndarray: shape (..., 2, 2)

    """
    x, v = np.asarray(x), _finite(v)
    a, b = alpha_beta(model, x, v)
    g = riemannian_tensor(model, x)
    ell = np.einsum('...ij,...j->...i', g, v) / a[..., None]
    lb = ell + one_form(model, x)
    ratio = ((a + b) / a)[..., None, None]
    return ratio * (g - ell[..., :, None] * ell[..., None, :]) + lb[..., :, None] * lb[..., None, :]


def reversibility_defect(model: ModelId, tv: TangentVector) -> float:
    """F(x, v) - F(x, -v); equals 2 beta"""
    require_model(model, tv.base)
    x = np.stack((tv.base.array, tv.base.array))
    f = finsler_norm(model, x, np.stack((tv.array, -tv.array)))
    return float(f[0] - f[1])
