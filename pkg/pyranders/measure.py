# pyranders/pyranders/measure.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from pyranders.duality import ScalarField, legendre, legendre_closed_form
from pyranders.exceptions import DomainError, InvalidInputError
from pyranders.geometry import CotangentVector, ModelId, ModelPoint, check_domain, domain_mask, require_model
from pyranders.isometry import isometry_map
from pyranders.metric import finsler_norm, one_form, co_dot, co_riemannian, riemannian_tensor
from pyranders.settings import DEFAULT_CTX


INDICATRIX_NODES = DEFAULT_CTX['measure_settings']['indicatrix_nodes']
LAPLACIAN_STEP = DEFAULT_CTX['measure_settings']['laplacian_step']

# Euclidean area of the unit disk
OMEGA_2 = np.pi


@dataclass(frozen=True)
class IndicatrixProfile:
    base: ModelPoint
    radii: np.ndarray
    nodes: int

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.nodes) / self.nodes

    @property
    def area(self) -> float:
        """Polar area formula with the periodic trapezoid rule"""
        return float(0.5 * np.sum(self.radii ** 2) * 2 * np.pi / self.nodes)

    def curve(self) -> np.ndarray:
        """Points r(theta) e(theta), shape (nodes, 2)"""
        t = self.angles
        return self.radii[:, None] * np.column_stack((np.cos(t), np.sin(t)))


def _directions(nodes: int) -> np.ndarray:
    t = 2 * np.pi * np.arange(nodes) / nodes
    return np.column_stack((np.cos(t), np.sin(t)))


def indicatrix(model: ModelId, x: ModelPoint, nodes: int = INDICATRIX_NODES) -> IndicatrixProfile:
    """Radii 1/F(x, e(theta_k)) of the unit ball B_x(1) at uniform angles"""
    require_model(model, x)
    if nodes < 16:
        raise InvalidInputError(f'nodes must be >= 16, got {nodes}')
    e = _directions(nodes)
    radii = 1 / finsler_norm(model, np.broadcast_to(x.array, e.shape), e)
    return IndicatrixProfile(base=x, radii=radii, nodes=nodes)


def density_array(model: ModelId, x: np.ndarray, nodes: int = INDICATRIX_NODES) -> np.ndarray:
    """Busemann-Hausdorff density by indicatrix quadrature, vectorized over points"""
    x = check_domain(model, np.asarray(x, dtype=float))
    e = _directions(nodes)
    f = finsler_norm(model, x[..., None, :], np.broadcast_to(e, x.shape[:-1] + e.shape), check=False)
    area = 0.5 * np.sum(f ** -2, axis=-1) * 2 * np.pi / nodes
    return OMEGA_2 / area


def density_sigma(model: ModelId, x: ModelPoint, nodes: int = INDICATRIX_NODES) -> float:
    """sigma_F(x) = pi / Vol(B_x(1))

    Args:
        model (ModelId): the model
        x (ModelPoint): the point
        nodes (int): indicatrix nodes, >= 16

    Returns:
        float

    """
    return OMEGA_2 / indicatrix(model, x, nodes).area


def density_closed_form(model: ModelId, x: np.ndarray) -> np.ndarray:
    """sqrt(det g) (1 - |b|^2)^(3/2), vectorized"""
    x = check_domain(model, np.asarray(x))
    g = riemannian_tensor(model, x)
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    b = one_form(model, x)
    k = 1 - co_dot(co_riemannian(model, x), b, b)
    return np.sqrt(det) * k ** 1.5


@dataclass(frozen=True)
class Disk:
    radius: float
    center: Tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class Annulus:
    inner: float
    outer: float
    center: Tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class Rectangle:
    x0: float
    x1: float
    y0: float
    y1: float


Region = Union[Disk, Annulus, Rectangle]


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite tensor quadrature over a region

    Disks and annuli are split into (radial, angular) cells, rectangles into
    (x, y) cells. The rule is 'midpoint' or 'gauss' with 1 <= order <= 4 points
    per direction. With mapped_by set to a map name, nodes are pushed through
    that map and weights multiplied by |det J|, giving a rule on the image
    region.
    """
    region: Region
    subdivisions: Tuple[int, int] = (16, 32)
    rule: str = 'gauss'
    order: int = 4
    mapped_by: Optional[str] = None

    def __post_init__(self):
        if self.rule not in ('midpoint', 'gauss'):
            raise InvalidInputError(f'Unknown rule {self.rule!r}')
        if not 1 <= self.order <= 4:
            raise InvalidInputError(f'order must lie in [1, 4], got {self.order}')
        if min(self.subdivisions) < 1:
            raise InvalidInputError(f'subdivisions must be positive, got {self.subdivisions}')


def _composite(a: float, b: float, cells: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    t, w = leggauss(order)
    edges = np.linspace(a, b, cells + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    return (mid[:, None] + half[:, None] * t).ravel(), (half[:, None] * w).ravel()


def _base_nodes(quad: QuadratureSpec) -> Tuple[np.ndarray, np.ndarray]:
    order = 1 if quad.rule == 'midpoint' else quad.order
    n1, n2 = quad.subdivisions
    region = quad.region
    if isinstance(region, Rectangle):
        x, wx = _composite(region.x0, region.x1, n1, order)
        y, wy = _composite(region.y0, region.y1, n2, order)
        xx, yy = np.meshgrid(x, y, indexing='ij')
        return np.column_stack((xx.ravel(), yy.ravel())), np.outer(wx, wy).ravel()
    inner = region.inner if isinstance(region, Annulus) else 0.0
    outer = region.outer if isinstance(region, Annulus) else region.radius
    r, wr = _composite(inner, outer, n1, order)
    t, wt = _composite(0.0, 2 * np.pi, n2, order)
    rr, tt = np.meshgrid(r, t, indexing='ij')
    pts = np.column_stack((rr.ravel() * np.cos(tt.ravel()), rr.ravel() * np.sin(tt.ravel())))
    return pts + np.asarray(region.center), (np.outer(wr, wt) * rr).ravel()


def boundary_points(region: Region, count: int = 256) -> np.ndarray:
    """Points on the region boundary"""
    if isinstance(region, Rectangle):
        s = np.linspace(0, 1, count // 4, endpoint=False)
        dx, dy = region.x1 - region.x0, region.y1 - region.y0
        return np.concatenate((
            np.column_stack((region.x0 + dx * s, np.full_like(s, region.y0))),
            np.column_stack((np.full_like(s, region.x1), region.y0 + dy * s)),
            np.column_stack((region.x1 - dx * s, np.full_like(s, region.y1))),
            np.column_stack((np.full_like(s, region.x0), region.y1 - dy * s)),
        ))
    t = 2 * np.pi * np.arange(count) / count
    e = np.column_stack((np.cos(t), np.sin(t)))
    c = np.asarray(region.center)
    if isinstance(region, Annulus):
        return np.concatenate((c + region.inner * e, c + region.outer * e))
    return c + region.radius * e


def quadrature_nodes(model: ModelId, quad: QuadratureSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of quad, checked against the model domain

    Args:
        model (ModelId): the model the rule integrates over
        quad (QuadratureSpec): the rule

    Returns:
        Tuple[np.ndarray, np.ndarray]: nodes (M, 2), weights (M,)

    """
    pts, w = _base_nodes(quad)
    edge = boundary_points(quad.region)
    if quad.mapped_by:
        imap = isometry_map(quad.mapped_by, model.reversible)
        if imap.target.tag is not model.tag:
            raise InvalidInputError(f'{quad.mapped_by} maps into {imap.target.name}, not {model.name}')
        plugin = imap.plugin
        if not np.all(domain_mask(imap.source, edge)):
            raise DomainError(f'region {quad.region} is not inside the {imap.source.name} domain')
        jac = plugin.jacobian(pts)
        det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
        pts, w, edge = plugin.map_point(pts), w * np.abs(det), plugin.map_point(edge)
    if not (np.all(domain_mask(model, edge)) and np.all(domain_mask(model, pts))):
        raise DomainError(f'region {quad.region} is not inside the {model.name} domain')
    return pts, w


def _sigma(model: ModelId, pts: np.ndarray, sigma: str, nodes: int) -> np.ndarray:
    if sigma == 'closed':
        return density_closed_form(model, pts)
    if sigma == 'indicatrix':
        return density_array(model, pts, nodes)
    raise InvalidInputError(f'Unknown density method {sigma!r}')


def integrate(model: ModelId,
              field: Union[ScalarField, float],
              quad: QuadratureSpec,
              *,
              sigma: str = 'indicatrix',
              sigma_nodes: int = 512) -> float:
    """Integral of field against the Busemann-Hausdorff volume over the region

    Args:
        model (ModelId): the model
        field (ScalarField or float): integrand; a number means a constant field
        quad (QuadratureSpec): the rule
        sigma (str): 'indicatrix' (polar quadrature of the unit ball) or 'closed'
        sigma_nodes (int): indicatrix nodes per point

    Returns:
        float

    """
    pts, w = quadrature_nodes(model, quad)
    if isinstance(field, ScalarField):
        values = field(pts)
    else:
        if float(field) == 0:
            return 0.0
        values = np.full(len(pts), float(field))
    return float(np.sum(values * _sigma(model, pts, sigma, sigma_nodes) * w))


def divergence(model: ModelId, vector_field, x: np.ndarray, step: float = LAPLACIAN_STEP,
               sigma: str = 'closed', sigma_nodes: int = INDICATRIX_NODES) -> np.ndarray:
    """div_F V = (1/sigma) sum_i d(sigma V^i)/dx^i by central differences, vectorized

    Args:
        model (ModelId): the model
        vector_field (Callable): maps points (..., 2) to vectors (..., 2)
        x (np.ndarray): points (..., 2); the step stencil must stay in the domain
        step (float): difference step
        sigma (str): 'closed' or 'indicatrix'
        sigma_nodes (int): indicatrix nodes

    Returns:
        np.ndarray

    """
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape[:-1])
    for i, e in enumerate(np.eye(2)):
        plus, minus = x + step * e, x - step * e
        check_domain(model, plus)
        check_domain(model, minus)
        fp = _sigma(model, plus, sigma, sigma_nodes) * vector_field(plus)[..., i]
        fm = _sigma(model, minus, sigma, sigma_nodes) * vector_field(minus)[..., i]
        total = total + (fp - fm) / (2 * step)
    return total / _sigma(model, x, sigma, sigma_nodes)


def finsler_laplacian_array(model: ModelId, field: ScalarField, x: np.ndarray, step: float = LAPLACIAN_STEP) -> np.ndarray:
    """Delta_F u with the closed-form density and Legendre transform, vectorized"""
    return divergence(model, lambda y: legendre_closed_form(model, y, field.differential(y)), x, step)


def finsler_laplacian(model: ModelId, field: ScalarField, x: ModelPoint, step: float = LAPLACIAN_STEP,
                      nodes: int = INDICATRIX_NODES) -> float:
    """Delta_F u(x) = div_F(nabla_F u) at one point

    The gradient comes from the numeric Legendre transform and the density
    from the indicatrix quadrature.

    Args:
        model (ModelId): the model
        field (ScalarField): twice differentiable near x
        x (ModelPoint): the point
        step (float): outer difference step
        nodes (int): indicatrix nodes

    Returns:
        float

    """
    require_model(model, x)

    def gradient(pts):
        out = np.empty(pts.shape)
        for idx in np.ndindex(pts.shape[:-1]):
            p = ModelPoint(model, tuple(pts[idx]))
            out[idx] = legendre(model, CotangentVector(p, tuple(field.differential(pts[idx])))).v
        return out

    value = divergence(model, gradient, x.array, step, sigma='indicatrix', sigma_nodes=nodes)
    return float(value)


def weak_form_residual(model: ModelId,
                       u: ScalarField,
                       v: ScalarField,
                       quad: QuadratureSpec,
                       step: float = LAPLACIAN_STEP,
                       support_tol: float = 1e-14) -> float:
    """|int v Delta_F u dv_F + int Dv(nabla_F u) dv_F| over the region

    Both integrals go through integrate with the closed-form density, so the
    residual is the quadrature error plus the O(step^2) error of the
    Laplacian. With the Gauss rule the second dominates.

    Args:
        model (ModelId): the model
        u (ScalarField): the field whose Laplacian is taken
        v (ScalarField): test field vanishing on the region boundary
        quad (QuadratureSpec): the rule
        step (float): Laplacian difference step
        support_tol (float): max |v| allowed on boundary samples

    Returns:
        float

    """
    edge = boundary_points(quad.region)
    if np.max(np.abs(v(edge))) >= support_tol:
        raise InvalidInputError('test field does not vanish on the region boundary')

    def source(pts):
        return v(pts) * finsler_laplacian_array(model, u, pts, step)

    def pairing(pts):
        grad_u = legendre_closed_form(model, pts, u.differential(pts))
        return np.einsum('...i,...i->...', v.differential(pts), grad_u)

    lhs = integrate(model, ScalarField(source, name='v laplacian u'), quad, sigma='closed')
    rhs = -integrate(model, ScalarField(pairing, name='Dv gradient u'), quad, sigma='closed')
    logging.debug(f'weak form {model.name}: lhs {lhs}, rhs {rhs}')
    return float(abs(lhs - rhs))
