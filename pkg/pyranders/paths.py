# pyranders/pyranders/paths.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import logging
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from pyranders.exceptions import InvalidInputError
from pyranders.geometry import ModelId, ModelPoint, domain_mask, require_model
from pyranders.isometry import IsometryMap
from pyranders.metric import finsler_norm
from pyranders.settings import DEFAULT_CTX


QUAD_PER_SEGMENT = DEFAULT_CTX['paths_settings']['quad_per_segment']
INITIAL_STEP_FRACTION = DEFAULT_CTX['paths_settings']['initial_step_fraction']
MAX_HALVINGS = DEFAULT_CTX['paths_settings']['max_halvings']


@dataclass(frozen=True)
class Polyline:
    """Oriented polyline; vertices as an (n, 2) array"""
    model: ModelId
    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 2:
            raise InvalidInputError(f'a polyline needs at least two vertices, got shape {v.shape}')
        if not np.all(np.isfinite(v)):
            raise InvalidInputError('polyline vertices must be finite')
        if np.any(np.all(v[1:] == v[:-1], axis=1)):
            raise InvalidInputError('consecutive polyline vertices must be distinct')
        # both domains are convex, so chords between admissible vertices stay admissible
        if not np.all(domain_mask(self.model, v)):
            raise InvalidInputError(f'polyline leaves the {self.model.name} domain')
        object.__setattr__(self, 'vertices', v)

    @classmethod
    def through(cls, model: ModelId, points: Sequence[ModelPoint]) -> 'Polyline':
        for p in points:
            require_model(model, p)
        return cls(model, np.array([p.coords for p in points]))

    def reversed(self) -> 'Polyline':
        return Polyline(self.model, self.vertices[::-1].copy())


def _segment_nodes(n: int):
    t, w = leggauss(n)
    return (t + 1) / 2, w / 2


def path_length(p: Polyline, quad_per_segment: int = QUAD_PER_SEGMENT) -> float:
    """Sum over segments of the Gauss-Legendre integral of F(gamma(t), gamma'(t))

    Args:
        p (Polyline): the path
        quad_per_segment (int): Gauss nodes per segment, >= 2

    Returns:
        float

    """
    if quad_per_segment < 2:
        raise InvalidInputError(f'quad_per_segment must be >= 2, got {quad_per_segment}')
    t, w = _segment_nodes(quad_per_segment)
    a, d = p.vertices[:-1], np.diff(p.vertices, axis=0)
    pts = a[:, None, :] + t[None, :, None] * d[:, None, :]
    vel = np.broadcast_to(d[:, None, :], pts.shape)
    return float(np.sum(finsler_norm(p.model, pts, vel, check=False) @ w))


def mapped_path_length(p: Polyline, imap: IsometryMap, quad_per_segment: int = QUAD_PER_SEGMENT) -> float:
    """Length of the image curve map(gamma) under the target metric

    The quadrature nodes of each segment are pushed through the map together
    with the segment velocity, so the image curve need not be a polyline.
    """
    if p.model.tag is not imap.source.tag:
        raise InvalidInputError(f'{imap.id.value} does not act on {p.model.name}')
    t, w = _segment_nodes(quad_per_segment)
    a, d = p.vertices[:-1], np.diff(p.vertices, axis=0)
    pts = a[:, None, :] + t[None, :, None] * d[:, None, :]
    plugin = imap.plugin
    vel = np.einsum('...ij,...j->...i', plugin.jacobian(pts), np.broadcast_to(d[:, None, :], pts.shape))
    target = ModelId(imap.target.tag, p.model.reversible)
    image = finsler_norm(target, plugin.map_point(pts), vel, gap=plugin.target_gap(pts))
    return float(np.sum(image @ w))


@dataclass
class DistanceReport:
    length: float
    vertices: np.ndarray
    history: List[float] = field(default_factory=list)
    iterations: int = 0
    halvings: int = 0


def optimize_path(model: ModelId,
                  x: ModelPoint,
                  y: ModelPoint,
                  control_points: int,
                  iterations: int,
                  *,
                  quad_per_segment: int = QUAD_PER_SEGMENT,
                  max_halvings: int = MAX_HALVINGS) -> DistanceReport:
    """Coordinate descent over free control points with a shrinking step

    The chord from x to y is the starting polyline. A sweep tries +step and
    -step on each coordinate of each free point and keeps improvements; a
    sweep without improvement halves the step.

    Args:
        model (ModelId): the model
        x (ModelPoint): start
        y (ModelPoint): end, distinct from x
        control_points (int): number of free interior vertices
        iterations (int): maximum number of sweeps
        quad_per_segment (int): Gauss nodes per segment
        max_halvings (int): stop after this many step halvings

    Returns:
        DistanceReport

    """
    require_model(model, x)
    require_model(model, y)
    a, b = x.array, y.array
    if np.array_equal(a, b):
        raise InvalidInputError('distance endpoints must differ')
    if control_points < 0 or iterations < 0:
        raise InvalidInputError('control_points and iterations must be non-negative')
    s = np.linspace(0, 1, control_points + 2)
    verts = a + s[:, None] * (b - a)

    def length(v):
        try:
            return path_length(Polyline(model, v), quad_per_segment)
        except InvalidInputError:
            return np.inf

    best = length(verts)
    report = DistanceReport(length=best, vertices=verts.copy(), history=[best])
    step = INITIAL_STEP_FRACTION * float(np.hypot(*(b - a)))
    if control_points == 0:
        return report

    for it in range(1, iterations + 1):
        improved = False
        for k in range(1, control_points + 1):
            for j in range(2):
                for sign in (1.0, -1.0):
                    trial = verts.copy()
                    trial[k, j] += sign * step
                    value = length(trial)
                    if value < best:
                        verts, best, improved = trial, value, True
                        break
        report.history.append(best)
        report.iterations = it
        if not improved:
            step /= 2
            report.halvings += 1
            if report.halvings >= max_halvings:
                break
        if it % 50 == 0:
            logging.info(f'distance sweep {it}: length {best}, step {step:.3e}')

    report.length, report.vertices = best, verts
    return report


def distance_estimate(model: ModelId, x: ModelPoint, y: ModelPoint, control_points: int, iterations: int,
                      **kwargs) -> float:
    """Best polyline length from x to y; an upper bound on the distance"""
    return optimize_path(model, x, y, control_points, iterations, **kwargs).length
