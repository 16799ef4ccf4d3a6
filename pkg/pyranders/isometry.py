# pyranders/pyranders/isometry.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Tuple

import numpy as np
import pandas as pd

from pyranders.base import IsometryBase
from pyranders.exceptions import InvalidInputError
from pyranders.geometry import (
    Model, ModelId, ModelPoint, TangentVector, check_domain, require_model,
    sample_coords, sample_vectors, sampling_truncation
)
from pyranders.metric import randers_terms
from pyranders.plugins import load_plugin
from pyranders.settings import workers


def _sq(x: np.ndarray) -> np.ndarray:
    return x[..., 0] * x[..., 0] + x[..., 1] * x[..., 1]


def _matrix(a, b, c, d) -> np.ndarray:
    return np.stack((np.stack((a, b), axis=-1), np.stack((c, d), axis=-1)), axis=-2)


class PoincareToFunk(IsometryBase):
    """f(x) = 2x / (1 + |x|^2)"""

    source, target, inverse = Model.PDISK, Model.FUNK, 'f_inv'

    def map_point(self, x: np.ndarray) -> np.ndarray:
        return 2 * x / (1 + _sq(x))[..., None]

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[..., 0], x[..., 1]
        s = _sq(x)
        k = 2 / ((1 + s) * (1 + s))
        off = -2 * x1 * x2 * k
        return _matrix(k * (1 + s - 2 * x1 * x1), off, off, k * (1 + s - 2 * x2 * x2))

    def target_gap(self, x: np.ndarray) -> np.ndarray:
        s = _sq(x)
        return ((1 - s) / (1 + s)) ** 2


class FunkToPoincare(IsometryBase):
    """f^-1(x) = x / (1 + sqrt(1 - |x|^2))"""

    source, target, inverse = Model.FUNK, Model.PDISK, 'f'

    def map_point(self, x: np.ndarray) -> np.ndarray:
        return x / (1 + np.sqrt(1 - _sq(x)))[..., None]

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[..., 0], x[..., 1]
        q = np.sqrt(1 - _sq(x))
        d = 1 + q
        k = 1 / (q * d * d)
        return _matrix(1 / d + k * x1 * x1, k * x1 * x2, k * x1 * x2, 1 / d + k * x2 * x2)

    def target_gap(self, x: np.ndarray) -> np.ndarray:
        q = np.sqrt(1 - _sq(x))
        return 2 * q / (1 + q)


class FunkToHalfPlane(IsometryBase):
    """g(x) = (2 x2, 2 sqrt(1 - |x|^2)) / (1 + x1)"""

    source, target, inverse = Model.FUNK, Model.HPLANE, 'g_inv'

    def map_point(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[..., 0], x[..., 1]
        return np.stack((2 * x2, 2 * np.sqrt(1 - _sq(x))), axis=-1) / (1 + x1)[..., None]

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[..., 0], x[..., 1]
        q = np.sqrt(1 - _sq(x))
        k = -2 / ((1 + x1) * (1 + x1))
        return _matrix(k * x2, -k * (1 + x1), k * (x1 - x2 * x2 + 1) / q, k * x2 * (1 + x1) / q)


class HalfPlaneToFunk(IsometryBase):
    """g^-1(x) = (4 - |x|^2, 4 x1) / (4 + |x|^2)"""

    source, target, inverse = Model.HPLANE, Model.FUNK, 'g'

    def map_point(self, x: np.ndarray) -> np.ndarray:
        s = _sq(x)
        return np.stack((4 - s, 4 * x[..., 0]), axis=-1) / (4 + s)[..., None]

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[..., 0], x[..., 1]
        p = 4 + _sq(x)
        pp = p * p
        return _matrix(-16 * x1 / pp, -16 * x2 / pp, 4 / p - 8 * x1 * x1 / pp, -8 * x1 * x2 / pp)

    def target_gap(self, x: np.ndarray) -> np.ndarray:
        x2, p = x[..., 1], 4 + _sq(x)
        return 16 * x2 * x2 / (p * p)


class HalfPlaneToPoincare(IsometryBase):
    """h(x) = (4 - |x|^2, 4 x1) / (|x|^2 + 4 x2 + 4)"""

    source, target, inverse = Model.HPLANE, Model.PDISK, 'h_inv'

    def map_point(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[..., 0], x[..., 1]
        q = x1 * x1 + (x2 + 2) * (x2 + 2)
        return np.stack((4 - _sq(x), 4 * x1), axis=-1) / q[..., None]

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[..., 0], x[..., 1]
        t = x2 + 2
        q = x1 * x1 + t * t
        k = -4 / (q * q)
        return _matrix(k * 2 * x1 * t, k * (t * t - x1 * x1), k * (x1 * x1 - t * t), k * 2 * x1 * t)

    def target_gap(self, x: np.ndarray) -> np.ndarray:
        x2 = x[..., 1]
        return 8 * x2 / (_sq(x) + 4 * x2 + 4)


class PoincareToHalfPlane(IsometryBase):
    """h^-1(x) = (4 x2, 2 - 2|x|^2) / (|x|^2 + 2 x1 + 1)"""

    source, target, inverse = Model.PDISK, Model.HPLANE, 'h'

    def map_point(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[..., 0], x[..., 1]
        r = (x1 + 1) * (x1 + 1) + x2 * x2
        return np.stack((4 * x2, 2 * (1 - _sq(x))), axis=-1) / r[..., None]

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[..., 0], x[..., 1]
        t = x1 + 1
        r = t * t + x2 * x2
        k = 4 / (r * r)
        return _matrix(-k * 2 * x2 * t, k * (t * t - x2 * x2), k * (x2 * x2 - t * t), -k * 2 * x2 * t)


class MapId(str, Enum):
    F = 'f'
    F_INV = 'f_inv'
    G = 'g'
    G_INV = 'g_inv'
    H = 'h'
    H_INV = 'h_inv'


@dataclass(frozen=True)
class IsometryMap:
    """One of the six maps with the models it connects"""
    id: MapId
    source: ModelId
    target: ModelId

    @property
    def plugin(self) -> IsometryBase:
        return load_plugin('isometry', self.id.value)

    def inverse(self) -> 'IsometryMap':
        return isometry_map(self.plugin.inverse, self.source.reversible)


@dataclass(frozen=True)
class JacobianMatrix:
    base: ModelPoint
    entries: np.ndarray


def isometry_map(name: str, reversible: bool = False) -> IsometryMap:
    """Builds the IsometryMap for name in {f, f_inv, g, g_inv, h, h_inv}

    Args:
        name (str): the map name
        reversible (bool): act between the reversible counterparts

    Returns:
        IsometryMap

    """
    try:
        map_id = MapId(name)
    except ValueError:
        raise InvalidInputError(f'Unknown map {name!r}, expected one of {[m.value for m in MapId]}')
    plugin = load_plugin('isometry', map_id.value)
    return IsometryMap(map_id, ModelId(plugin.source, reversible), ModelId(plugin.target, reversible))


ALL_MAPS = tuple(m.value for m in MapId)


def map_coords(imap: IsometryMap, x: np.ndarray) -> np.ndarray:
    """Vectorized map of source coordinates (..., 2)"""
    return imap.plugin.map_point(check_domain(imap.source, np.asarray(x)))


def jacobian_array(imap: IsometryMap, x: np.ndarray) -> np.ndarray:
    """Vectorized analytic Jacobian, shape (..., 2, 2)"""
    return imap.plugin.jacobian(check_domain(imap.source, np.asarray(x)))


def jacobian_by_inversion(imap: IsometryMap, x: np.ndarray) -> np.ndarray:
    """Inverse of the inverse map's Jacobian at the image point"""
    inv = imap.inverse()
    return np.linalg.inv(jacobian_array(inv, map_coords(imap, x)))


def pushforward_array(imap: IsometryMap, x: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized (map(x), J(x) v)"""
    x = check_domain(imap.source, np.asarray(x))
    plugin = imap.plugin
    return plugin.map_point(x), np.einsum('...ij,...j->...i', plugin.jacobian(x), v)


def map_point(imap: IsometryMap, x: ModelPoint) -> ModelPoint:
    """Maps a point from the source model to the target model"""
    require_model(imap.source, x)
    return ModelPoint(imap.target, tuple(map_coords(imap, x.array)))


def jacobian(imap: IsometryMap, x: ModelPoint) -> JacobianMatrix:
    require_model(imap.source, x)
    return JacobianMatrix(base=x, entries=jacobian_array(imap, x.array))


def pushforward(imap: IsometryMap, tv: TangentVector) -> TangentVector:
    """Carries a tangent vector through the map"""
    require_model(imap.source, tv.base)
    y, w = pushforward_array(imap, tv.base.array, tv.array)
    return TangentVector(ModelPoint(imap.target, tuple(y)), tuple(w))


def _partition(n: int, func: Callable[[slice], Dict[str, np.ndarray]]) -> Dict[str, np.ndarray]:
    """Runs func over contiguous chunks and concatenates results in order"""
    n_workers = min(workers(), max(n, 1))
    bounds = np.linspace(0, n, n_workers + 1).astype(int)
    chunks = [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
    if n_workers == 1:
        parts = [func(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(func, chunks))
    return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}


@dataclass
class IsometryReport:
    map: str
    samples: int
    max_rel_err: float
    mean_rel_err: float
    worst_x: Tuple[float, float]
    worst_v: Tuple[float, float]
    max_alpha_err: float = 0.0
    max_beta_err: float = 0.0
    min_abs_det: float = float('inf')

    def passed(self, tol: float) -> bool:
        return max(self.max_rel_err, self.max_alpha_err, self.max_beta_err) < tol and self.min_abs_det > 0

    def as_row(self) -> Dict:
        return {
            'map': self.map, 'samples': self.samples,
            'max_rel_err': self.max_rel_err, 'mean_rel_err': self.mean_rel_err,
            'worst_x1': self.worst_x[0], 'worst_x2': self.worst_x[1],
            'worst_v1': self.worst_v[0], 'worst_v2': self.worst_v[1],
        }


def check_isometry(imap: IsometryMap,
                   samples: int,
                   seed: int,
                   truncation: float,
                   *,
                   dtype=np.longdouble) -> IsometryReport:
    """Compares F at sampled (x, v) with F at the pushforward

    Points come from the source model (disk radius truncation, or the band
    [1 - truncation, 1/(1 - truncation)] on the half plane); both sides are
    evaluated in dtype. The relative error of F uses F_src as denominator;
    alpha errors are relative to alpha_src and beta errors are normalized by
    alpha_src since beta may vanish. Disk targets use the map's closed-form
    1 - |y|^2, which cancels when computed from image points near the circle.

    Args:
        imap (IsometryMap): the map
        samples (int): number of (x, v) samples, >= 1
        seed (int): generator seed
        truncation (float): disk radius in (0, 1)
        dtype: evaluation dtype

    Returns:
        IsometryReport

    """
    if samples < 1:
        raise InvalidInputError(f'samples must be >= 1, got {samples}')
    src, tgt = imap.source, imap.target
    xs = sample_coords(src, samples, seed, sampling_truncation(src, truncation))
    vs = sample_vectors(samples, seed)
    nonzero = np.any(vs != 0, axis=-1)
    xs, vs = xs[nonzero], vs[nonzero]
    plugin = imap.plugin
    logging.info(f'Checking {imap.id.value}: {src.name} -> {tgt.name} on {len(xs)} samples')

    def run(chunk: slice) -> Dict[str, np.ndarray]:
        x, v = xs[chunk].astype(dtype), vs[chunk].astype(dtype)
        a_s, b_s, f_s = randers_terms(src, x, v, check=False)
        jac = plugin.jacobian(x)
        y = plugin.map_point(x)
        w = np.einsum('...ij,...j->...i', jac, v)
        a_t, b_t, f_t = randers_terms(tgt, y, w, check=False, gap=plugin.target_gap(x))
        det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
        return {
            'rel': (np.abs(f_s - f_t) / np.maximum(f_s, 1e-300)).astype(float),
            'alpha': (np.abs(a_s - a_t) / a_s).astype(float),
            'beta': (np.abs(b_s - b_t) / a_s).astype(float),
            'det': np.abs(det).astype(float),
        }

    errs = _partition(len(xs), run)
    worst = int(np.argmax(errs['rel']))
    report = IsometryReport(
        map=imap.id.value,
        samples=len(xs),
        max_rel_err=float(errs['rel'][worst]),
        mean_rel_err=float(np.mean(errs['rel'])),
        worst_x=tuple(xs[worst].tolist()),
        worst_v=tuple(vs[worst].tolist()),
        max_alpha_err=float(np.max(errs['alpha'])),
        max_beta_err=float(np.max(errs['beta'])),
        min_abs_det=float(np.min(errs['det'])),
    )
    logging.debug(f'{report}')
    return report


# each identity: (name, source model, left path, right path); paths apply left to right
COMPOSITIONS = (
    ('h_inv = g.f', Model.PDISK, ('h_inv',), ('f', 'g')),
    ('h = f_inv.g_inv', Model.HPLANE, ('h',), ('g_inv', 'f_inv')),
    ('g = h_inv.f_inv', Model.FUNK, ('g',), ('f_inv', 'h_inv')),
    ('f = g_inv.h_inv', Model.PDISK, ('f',), ('h_inv', 'g_inv')),
    ('g_inv = f.h', Model.HPLANE, ('g_inv',), ('h', 'f')),
    ('f_inv = h.g', Model.FUNK, ('f_inv',), ('g', 'h')),
    ('f_inv.f = id', Model.PDISK, (), ('f', 'f_inv')),
    ('f.f_inv = id', Model.FUNK, (), ('f_inv', 'f')),
    ('g_inv.g = id', Model.FUNK, (), ('g', 'g_inv')),
    ('g.g_inv = id', Model.HPLANE, (), ('g_inv', 'g')),
    ('h_inv.h = id', Model.HPLANE, (), ('h', 'h_inv')),
    ('h.h_inv = id', Model.PDISK, (), ('h_inv', 'h')),
)


def _apply(path: Tuple[str, ...], x: np.ndarray) -> np.ndarray:
    for name in path:
        x = load_plugin('isometry', name).map_point(x)
    return x


@dataclass
class CommutativityReport:
    samples: int
    max_err: float
    per_identity: Dict[str, float] = field(default_factory=dict)
    worst_identity: str = ''
    worst_x: Tuple[float, float] = (float('nan'), float('nan'))

    def passed(self, tol: float) -> bool:
        return self.max_err < tol

    def as_row(self) -> Dict:
        return {
            'map': 'commutativity', 'samples': self.samples,
            'max_rel_err': self.max_err,
            'mean_rel_err': float(np.mean(list(self.per_identity.values()))),
            'worst_x1': self.worst_x[0], 'worst_x2': self.worst_x[1],
            'worst_v1': float('nan'), 'worst_v2': float('nan'),
        }


def check_commutativity(samples: int, seed: int, truncation: float, *, dtype=np.longdouble) -> CommutativityReport:
    """Checks h^-1 = g.f, the identities obtained by inverting the diagram, and the round trips

    The discrepancy at a point is |A - B| / max(1, |A|), so coordinates on
    the far half plane are compared at their own scale.

    Args:
        samples (int): points per identity, >= 1
        seed (int): generator seed
        truncation (float): disk radius in (0, 1), see check_isometry
        dtype: evaluation dtype

    Returns:
        CommutativityReport

    """
    if samples < 1:
        raise InvalidInputError(f'samples must be >= 1, got {samples}')
    report = CommutativityReport(samples=samples, max_err=0.0)
    for name, tag, left, right in COMPOSITIONS:
        model = ModelId(tag)
        xs = sample_coords(model, samples, seed, sampling_truncation(model, truncation))
        x = xs.astype(dtype)
        a, b = _apply(left, x), _apply(right, x)
        scale = np.maximum(1, np.hypot(a[..., 0], a[..., 1]))
        err = (np.hypot(a[..., 0] - b[..., 0], a[..., 1] - b[..., 1]) / scale).astype(float)
        i = int(np.argmax(err))
        report.per_identity[name] = float(err[i])
        if err[i] >= report.max_err:
            report.max_err, report.worst_identity, report.worst_x = float(err[i]), name, tuple(xs[i].tolist())
        logging.info(f'{name}: max discrepancy {err[i]:.3e}')
    return report


def check_proof_identities(samples: int, seed: int, truncation: float, *, dtype=np.longdouble) -> Dict[str, float]:
    """Max relative error of the intermediate identities behind each isometry

    Args:
        samples (int): number of samples
        seed (int): generator seed
        truncation (float): disk radius in (0, 1)
        dtype: evaluation dtype

    Returns:
        Dict[str, float]: identity name -> max relative error

    """
    out = {}
    vs = sample_vectors(samples, seed).astype(dtype)

    def rel(lhs, rhs, scale=None):
        scale = np.abs(rhs) if scale is None else scale
        return float(np.max(np.abs(lhs - rhs) / np.maximum(scale, 1e-300)))

    disk = ModelId(Model.PDISK)
    x = sample_coords(disk, samples, seed, truncation).astype(dtype)
    s, xv = _sq(x), np.einsum('...i,...i->...', x, vs)
    f = load_plugin('isometry', 'f')
    fx, dfv = f.map_point(x), np.einsum('...ij,...j->...i', f.jacobian(x), vs)
    out['1-|f(x)|^2'] = rel(1 - _sq(fx), (1 - s) ** 2 / (1 + s) ** 2)
    out['<f(x),Df v>'] = rel(np.einsum('...i,...i->...', fx, dfv), 4 * (1 - s) * xv / (1 + s) ** 3,
                                  np.sqrt(_sq(fx) * _sq(dfv)))

    funk = ModelId(Model.FUNK)
    x = sample_coords(funk, samples, seed, truncation).astype(dtype)
    s, xv, vv = _sq(x), np.einsum('...i,...i->...', x, vs), _sq(vs)
    g = load_plugin('isometry', 'g')
    gx, dgv = g.map_point(x), np.einsum('...ij,...j->...i', g.jacobian(x), vs)
    out['4+|g(x)|^2'] = rel(4 + _sq(gx), 8 / (1 + x[..., 0]))
    out['|Dg v|^2'] = rel(_sq(dgv), 4 * ((1 - s) * vv + xv * xv) / ((1 + x[..., 0]) ** 2 * (1 - s)))

    half = ModelId(Model.HPLANE)
    x = sample_coords(half, samples, seed, 1 - truncation).astype(dtype)
    q = _sq(x) + 4 * x[..., 1] + 4
    h = load_plugin('isometry', 'h')
    hx, dhv = h.map_point(x), np.einsum('...ij,...j->...i', h.jacobian(x), vs)
    out['1-|h(x)|^2'] = rel(1 - _sq(hx), 8 * x[..., 1] / q)
    out['|Dh v|'] = rel(np.sqrt(_sq(dhv)), 4 * np.sqrt(_sq(vs)) / q)
    return out


def verification_table(samples: int, seed: int, truncation: float, maps: List[str] = ALL_MAPS,
                       reversible: bool = False) -> Tuple[pd.DataFrame, List[IsometryReport], CommutativityReport]:
    """Runs check_isometry for each map plus check_commutativity

    With reversible set the maps act between the reversible counterparts.

    Returns:
        Tuple[pd.DataFrame, List[IsometryReport], CommutativityReport]: one row per map
        plus a 'commutativity' row, and the underlying reports

    """
    reports = [check_isometry(isometry_map(m, reversible), samples, seed, truncation) for m in maps]
    comm = check_commutativity(samples, seed, truncation)
    df = pd.DataFrame([r.as_row() for r in reports] + [comm.as_row()])
    return df, reports, comm
