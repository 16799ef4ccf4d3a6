# pyranders/pyranders/duality.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy.interpolate import LinearNDInterpolator
from scipy.optimize import minimize_scalar

from pyranders.geometry import (
    ModelId, ModelPoint, CotangentVector, TangentVector, check_domain,
    require_model, sample_coords, stream
)
from pyranders.metric import co_dot, co_riemannian, finsler_norm, one_form
from pyranders.misc import central_gradient
from pyranders.settings import DEFAULT_CTX


SCAN_NODES = DEFAULT_CTX['duality_settings']['scan_nodes']
GOLDEN_TOL = DEFAULT_CTX['duality_settings']['golden_tol']
LEGENDRE_STEP = DEFAULT_CTX['duality_settings']['legendre_step']


@dataclass(frozen=True)
class ScalarField:
    """A scalar function u with its differential Du

    Callbacks are vectorized: value maps (..., 2) to (...), gradient maps
    (..., 2) to (..., 2). Without a gradient callback Du is taken by central
    differences.
    """
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ''
    fd_step: float = 1e-6

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.value(np.asarray(x, dtype=float)), dtype=float)

    def differential(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.gradient is not None:
            return np.broadcast_to(np.asarray(self.gradient(x), dtype=float), x.shape)
        return central_gradient(self.value, x, self.fd_step)

    def differential_error(self, x: np.ndarray, step: float = 1e-6) -> float:
        """Max deviation of Du from central differences of u at x"""
        return float(np.max(np.abs(self.differential(x) - central_gradient(self.value, x, step))))

    @classmethod
    def constant(cls, c: float) -> 'ScalarField':
        return cls(lambda x: np.full(x.shape[:-1], float(c)), lambda x: np.zeros(x.shape), name=f'constant {c}')

    @classmethod
    def coordinate(cls, i: int) -> 'ScalarField':
        """u(x) = x_i"""
        e = np.eye(2)[i]
        return cls(lambda x: x[..., i], lambda x: np.broadcast_to(e, x.shape).copy(), name=f'x{i + 1}')

    @classmethod
    def bump(cls, center, radius: float) -> 'ScalarField':
        """Smooth bump exp(1 - 1/(1 - |x - c|^2/r^2)), zero outside the ball"""
        c = np.asarray(center, dtype=float)
        r2 = float(radius) ** 2

        def parts(x):
            d = x - c
            rho = (d[..., 0] ** 2 + d[..., 1] ** 2) / r2
            inside = rho < 1
            t = np.where(inside, 1 - rho, 1.0)
            b = np.where(inside, np.exp(1 - 1 / t), 0.0)
            return d, t, b

        def value(x):
            return parts(x)[2]

        def gradient(x):
            d, t, b = parts(x)
            return (-b / (t * t) * 2 / r2)[..., None] * d

        return cls(value, gradient, name=f'bump {c.tolist()} r={radius}')

    @classmethod
    def from_discrete(cls, field: Any) -> 'ScalarField':
        """Linear interpolant of a DiscreteField, extended by zero; Du by central differences"""
        interp = LinearNDInterpolator(field.mesh.vertices, field.values, fill_value=0.0)
        return cls(lambda x: interp(x), name='discrete')


def _ratio(model: ModelId, x: np.ndarray, a: np.ndarray, theta: np.ndarray) -> np.ndarray:
    e = np.stack((np.cos(theta), np.sin(theta)), axis=-1)
    return (e @ a) / finsler_norm(model, np.broadcast_to(x, e.shape), e, check=False)


def _sup(model: ModelId, x: np.ndarray, a: np.ndarray, nodes: int, tol: float) -> float:
    """max over directions of a(e)/F(x, e): scan plus golden-section refinement"""
    if not np.any(a):
        return 0.0
    # angles in [2pi, 4pi) keep the relative tolerance meaningful near theta = 0
    dtheta = 2 * np.pi / nodes
    theta = 2 * np.pi + dtheta * np.arange(nodes)
    ratio = _ratio(model, x, a, theta)
    i = int(np.argmax(ratio))

    def neg(t):
        return -float(_ratio(model, x, a, np.array([t]))[0])

    lo, mid, hi = theta[i] - dtheta, theta[i], theta[i] + dtheta
    try:
        res = minimize_scalar(neg, bracket=(lo, mid, hi), method='golden', tol=tol)
    except ValueError:
        # flat neighbors, no strict bracket
        res = minimize_scalar(neg, bounds=(lo, hi), method='bounded', options={'xatol': tol})
    return max(-float(res.fun), float(ratio[i]))


def co_metric(model: ModelId, ca: CotangentVector, nodes: int = SCAN_NODES, tol: float = GOLDEN_TOL) -> float:
    """F*(x, a) as the supremum of a(v)/F(x, v) over directions

    Args:
        model (ModelId): the model
        ca (CotangentVector): base point and covector
        nodes (int): dense-scan node count
        tol (float): golden-section tolerance in theta

    Returns:
        float

    """
    require_model(model, ca.base)
    return _sup(model, ca.base.array, ca.array, nodes, tol)


def _dual_terms(model: ModelId, x: np.ndarray, a: np.ndarray):
    x = check_domain(model, np.asarray(x))
    a = np.asarray(a)
    shape = np.broadcast_shapes(x.shape, a.shape)
    ginv = np.broadcast_to(co_riemannian(model, x), shape + (2,))
    b = np.broadcast_to(one_form(model, x), shape)
    a = np.broadcast_to(a, shape)
    k = 1 - co_dot(ginv, b, b)
    ab = co_dot(ginv, a, b)
    root = np.sqrt(k * co_dot(ginv, a, a) + ab * ab)
    return ginv, a, b, k, ab, root


def co_metric_closed_form(model: ModelId, x: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Randers dual norm, vectorized

    F* = (sqrt((1 - |b|^2)|a|*^2 + <a,b>*^2) - <a,b>*) / (1 - |b|^2) with the
    co-metric g^-1.
    """
    _, _, _, k, ab, root = _dual_terms(model, x, a)
    return (root - ab) / k


def legendre_closed_form(model: ModelId, x: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Analytic gradient of F*^2/2 from the closed-form dual, vectorized; 0 at a = 0"""
    ginv, a, b, k, ab, root = _dual_terms(model, x, a)
    fstar = (root - ab) / k
    ga = np.einsum('...ij,...j->...i', ginv, a)
    gb = np.einsum('...ij,...j->...i', ginv, b)
    safe = np.where(root > 0, root, 1.0)
    grad = ((k[..., None] * ga + ab[..., None] * gb) / safe[..., None] - gb) / k[..., None]
    return np.where((root > 0)[..., None], fstar[..., None] * grad, 0.0)


def legendre(model: ModelId, ca: CotangentVector, step: float = LEGENDRE_STEP,
             nodes: int = SCAN_NODES, tol: float = GOLDEN_TOL) -> TangentVector:
    """J*(x, a): central differences of a -> F*^2(x, a)/2

    Args:
        model (ModelId): the model
        ca (CotangentVector): base point and covector
        step (float): relative step, scaled by max(1, |a|)
        nodes (int): co_metric scan nodes
        tol (float): co_metric refinement tolerance

    Returns:
        TangentVector: zero when a = 0

    """
    require_model(model, ca.base)
    x, a = ca.base.array, ca.array
    if not np.any(a):
        return TangentVector(ca.base, (0.0, 0.0))
    h = step * max(1.0, float(np.hypot(*a)))
    out = []
    for e in np.eye(2):
        fp = _sup(model, x, a + h * e, nodes, tol)
        fm = _sup(model, x, a - h * e, nodes, tol)
        out.append((0.5 * fp * fp - 0.5 * fm * fm) / (2 * h))
    return TangentVector(ca.base, tuple(out))


def finsler_gradient(model: ModelId, field: ScalarField, x: ModelPoint) -> TangentVector:
    """nabla_F u(x) = J*(x, Du(x))"""
    require_model(model, x)
    du = field.differential(x.array)
    return legendre(model, CotangentVector(x, tuple(du)))


def nonlinearity_witness(model: ModelId, samples: int = 200, seed: int = 0, truncation: float = 0.9,
                         threshold: float = 1e-3) -> Optional[Dict[str, Any]]:
    """Searches sampled (x, a, b) for |J*(a + b) - J*(a) - J*(b)| > threshold

    Candidates are screened with the closed-form transform and the winner is
    confirmed with the numeric one.

    Returns:
        Dict or None: x, a, b and the numeric defect of the first confirmed witness

    """
    xs = sample_coords(model, samples, seed, truncation)
    gen = stream(seed, 2)
    a = gen.standard_normal((samples, 2))
    b = gen.standard_normal((samples, 2))
    defect = np.linalg.norm(
        legendre_closed_form(model, xs, a + b) - legendre_closed_form(model, xs, a) - legendre_closed_form(model, xs, b),
        axis=-1)
    for i in np.argsort(-defect)[:5]:
        if defect[i] <= threshold:
            break
        p = ModelPoint(model, tuple(xs[i]))
        j = [np.array(legendre(model, CotangentVector(p, tuple(c))).v) for c in (a[i] + b[i], a[i], b[i])]
        numeric = float(np.linalg.norm(j[0] - j[1] - j[2]))
        logging.debug(f'nonlinearity candidate {i}: closed form {defect[i]}, numeric {numeric}')
        if numeric > threshold:
            return {'x': tuple(xs[i]), 'a': tuple(a[i]), 'b': tuple(b[i]), 'defect': numeric}
    return None
