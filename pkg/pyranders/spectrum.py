# pyranders/pyranders/spectrum.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import eigsh, splu

from pyranders.duality import ScalarField, co_metric_closed_form
from pyranders.exceptions import DegenerateFieldError, InvalidInputError
from pyranders.geometry import ModelId, rng
from pyranders.isometry import IsometryMap
from pyranders.measure import density_closed_form
from pyranders.mesh import MAX_VERTICES, Mesh, build_mesh
from pyranders.metric import co_riemannian
from pyranders.settings import DEFAULT_CTX, workers


SPECTRUM_SETTINGS = DEFAULT_CTX['spectrum_settings']
FD_STEP = SPECTRUM_SETTINGS['fd_step']
LOG_EVERY = SPECTRUM_SETTINGS['log_every']
REL_TOL = SPECTRUM_SETTINGS['rel_tol']
STALL_WINDOW = SPECTRUM_SETTINGS['stall_window']
ARMIJO = 1e-4
MAX_BACKTRACKS = 60
GAP_COLUMNS = ['model', 'reversible', 'truncation', 'h', 'final_quotient', 'iters_used']


@dataclass(frozen=True, eq=False)
class DiscreteField:
    """Piecewise-linear field: one value per mesh vertex, zero on the boundary"""
    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.mesh),):
            raise InvalidInputError(f'expected {len(self.mesh)} vertex values, got shape {values.shape}')
        if not np.all(np.isfinite(values)):
            raise InvalidInputError('field values must be finite')
        if np.any(values[self.mesh.boundary] != 0):
            raise InvalidInputError('field values must vanish at boundary vertices')
        object.__setattr__(self, 'values', values)

    @classmethod
    def sample(cls, mesh: Mesh, func: ScalarField) -> 'DiscreteField':
        """Vertex values of func with the boundary values set to zero"""
        values = np.where(mesh.boundary, 0.0, func(mesh.vertices))
        return cls(mesh, values)

    def scaled(self, c: float) -> 'DiscreteField':
        return DiscreteField(self.mesh, c * self.values)


@dataclass
class RayleighTrace:
    iterations: List[int]
    quotients: List[float]
    field: DiscreteField
    converged: bool = False

    @property
    def final(self) -> float:
        return self.quotients[-1]

    @property
    def iters_used(self) -> int:
        return self.iterations[-1]


@dataclass(frozen=True)
class _Assembly:
    centroids: np.ndarray
    weights: np.ndarray
    gradients: np.ndarray
    triangles: np.ndarray
    interior: np.ndarray


@lru_cache(maxsize=32)
def _assembly(model: ModelId, mesh: Mesh) -> _Assembly:
    """Centroid quadrature weights sigma(x_c) |T| and the hat-function gradients"""
    weights = density_closed_form(model, mesh.centroids) * mesh.areas
    return _Assembly(mesh.centroids, weights, mesh.basis_gradients, mesh.triangles, mesh.interior)


def _sparse(mesh: Mesh, local: np.ndarray):
    """Sums per-triangle (m, 3, 3) blocks into a CSC matrix"""
    rows = np.broadcast_to(mesh.triangles[:, :, None], local.shape)
    cols = np.broadcast_to(mesh.triangles[:, None, :], local.shape)
    n = len(mesh)
    return coo_matrix((local.ravel(), (rows.ravel(), cols.ravel())), shape=(n, n)).tocsc()


def stiffness_matrix(model: ModelId, mesh: Mesh):
    """Reversible stiffness: sum over triangles of sigma |T| grad(phi_i) . g* grad(phi_j)

    sigma is the density of model, so for a Randers model this is the
    quadratic form of its Riemannian part on the same weights.
    """
    asm = _assembly(model, mesh)
    g = co_riemannian(model, asm.centroids)
    local = np.einsum('tia,tab,tjb->tij', asm.gradients, g, asm.gradients) * asm.weights[:, None, None]
    return _sparse(mesh, local)


def mass_matrix(model: ModelId, mesh: Mesh):
    """Centroid-rule mass matrix: sum over triangles of sigma |T| / 9 on each vertex pair"""
    asm = _assembly(model, mesh)
    local = np.broadcast_to((asm.weights / 9)[:, None, None], (len(asm.weights), 3, 3))
    return _sparse(mesh, local)


@lru_cache(maxsize=32)
def _preconditioner(model: ModelId, mesh: Mesh) -> Callable[[np.ndarray], np.ndarray]:
    """Sparse LU of the interior stiffness block"""
    interior = np.flatnonzero(mesh.interior)
    k = stiffness_matrix(model, mesh)[interior][:, interior].tocsc()
    return splu(k).solve


def _parts(model: ModelId, asm: _Assembly, u: np.ndarray) -> Tuple[float, float, np.ndarray]:
    du = np.einsum('tij,ti->tj', asm.gradients, u[asm.triangles])
    uc = u[asm.triangles].mean(axis=1)
    fstar = co_metric_closed_form(model, asm.centroids, du)
    return float(np.sum(fstar * fstar * asm.weights)), float(np.sum(uc * uc * asm.weights)), du


def _quotient(model: ModelId, asm: _Assembly, u: np.ndarray) -> float:
    num, den, _ = _parts(model, asm, u)
    return num / den


def _gradient(model: ModelId, asm: _Assembly, u: np.ndarray, fd_step: float) -> Tuple[float, float, np.ndarray]:
    """Quotient, L2 norm squared and the gradient of the quotient in the vertex values"""
    num, den, du = _parts(model, asm, u)
    q = num / den
    # J* per triangle by central differences of F*^2/2 in the covector
    h = fd_step * np.maximum(1.0, np.hypot(du[:, 0], du[:, 1]))
    jstar = np.empty(du.shape)
    for j in range(2):
        e = np.zeros(2)
        e[j] = 1.0
        fp = co_metric_closed_form(model, asm.centroids, du + h[:, None] * e)
        fm = co_metric_closed_form(model, asm.centroids, du - h[:, None] * e)
        jstar[:, j] = (0.5 * fp * fp - 0.5 * fm * fm) / (2 * h)
    dnum = 2 * np.einsum('tj,tij->ti', jstar, asm.gradients) * asm.weights[:, None]
    uc = u[asm.triangles].mean(axis=1)
    dden = np.repeat((2 / 3) * uc * asm.weights, 3).reshape(-1, 3)
    n = len(u)
    grad = (np.bincount(asm.triangles.ravel(), weights=dnum.ravel(), minlength=n)
            - q * np.bincount(asm.triangles.ravel(), weights=dden.ravel(), minlength=n)) / den
    grad[~asm.interior] = 0.0
    return q, den, grad


def l2_norm(model: ModelId, u: DiscreteField) -> float:
    """(int u^2 dv_F)^(1/2) with centroid quadrature"""
    return float(np.sqrt(_parts(model, _assembly(model, u.mesh), u.values)[1]))


def rayleigh_quotient(model: ModelId, u: DiscreteField) -> float:
    """int F*^2(x, Du) dv_F / int u^2 dv_F, both by centroid quadrature

    Args:
        model (ModelId): the model
        u (DiscreteField): not identically zero

    Returns:
        float

    """
    if not np.any(u.values):
        raise DegenerateFieldError('Rayleigh quotient of the zero field')
    return _quotient(model, _assembly(model, u.mesh), u.values)


def h1_norm(model: ModelId, u: DiscreteField) -> float:
    """(int F*^2(x, Du) dv_F + int u^2 dv_F)^(1/2)"""
    num, den, _ = _parts(model, _assembly(model, u.mesh), u.values)
    return float(np.sqrt(num + den))


def _descend(model: ModelId, asm: _Assembly, u: np.ndarray, max_iters: int, fd_step: float,
             log_every: int, solve: Callable[[np.ndarray], np.ndarray], rel_tol: float,
             window: int) -> Tuple[List[int], List[float], np.ndarray, bool]:
    u = u / np.sqrt(_parts(model, asm, u)[1])
    q, _, grad = _gradient(model, asm, u, fd_step)
    iterations, quotients = [0], [q]
    converged = False
    t = 1.0
    for it in range(1, max_iters + 1):
        # Sobolev gradient: the Euclidean gradient preconditioned by the stiffness block
        d = np.zeros_like(u)
        d[asm.interior] = -solve(grad[asm.interior])
        slope = float(grad @ d)
        if not slope < 0:
            logging.debug(f'{model.name}: stationary at iteration {it}')
            converged = True
            break
        for _ in range(MAX_BACKTRACKS):
            trial = u + t * d
            den = _parts(model, asm, trial)[1]
            if den > 0:
                trial = trial / np.sqrt(den)
                qt = _quotient(model, asm, trial)
                if qt <= q + ARMIJO * t * slope:
                    break
            t /= 2
        else:
            logging.debug(f'{model.name}: line search exhausted at iteration {it}')
            converged = True
            break
        u = trial
        q, _, grad = _gradient(model, asm, u, fd_step)
        iterations.append(it)
        quotients.append(q)
        t *= 2
        if log_every and it % log_every == 0:
            logging.info(f'{model.name} iteration {it}: quotient {q:.6f}')
        if len(quotients) > window and quotients[-window - 1] - q <= rel_tol * q:
            converged = True
            break
    return iterations, quotients, u, converged


def minimize_quotient(model: ModelId,
                      mesh: Mesh,
                      seed: int,
                      max_iters: int,
                      *,
                      start: Optional[DiscreteField] = None,
                      fd_step: float = FD_STEP,
                      rel_tol: float = REL_TOL,
                      window: int = STALL_WINDOW,
                      log_every: int = LOG_EVERY) -> RayleighTrace:
    """Preconditioned gradient descent on the interior vertex values

    Starts from seeded values in [0.5, 1]. For nonreversible models the
    negated start is run as well and the lower final quotient is kept, since
    F*^2 is not even in Du when beta is nonzero. A nonzero start field is run
    beside the seeded starts and the lowest final quotient wins. Each
    accepted step passes an Armijo test, so every run is non-increasing.

    The search direction is the gradient preconditioned by the reversible
    stiffness matrix, which removes the mesh-size conditioning. For a
    reversible model this is preconditioned inverse iteration. The run stops
    once the quotient drops by less than rel_tol (relative) over window
    iterations, or after max_iters.

    Args:
        model (ModelId): the model
        mesh (Mesh): at least one interior vertex
        seed (int): start seed
        max_iters (int): iteration budget; 0 returns the start
        start (DiscreteField): optional warm start on mesh
        fd_step (float): relative step of the J* differences
        rel_tol (float): relative decrease treated as converged
        window (int): iterations the decrease is measured over
        log_every (int): progress logging period

    Returns:
        RayleighTrace

    """
    asm = _assembly(model, mesh)
    if not asm.interior.any():
        raise InvalidInputError('mesh has no interior vertex')
    if max_iters < 0:
        raise InvalidInputError(f'max_iters must be non-negative, got {max_iters}')
    if start is not None and start.mesh is not mesh:
        raise InvalidInputError('start field lives on a different mesh')
    u0 = np.zeros(len(mesh))
    u0[asm.interior] = rng(seed).uniform(0.5, 1.0, int(asm.interior.sum()))
    starts = [u0] if model.reversible else [u0, -u0]
    if start is not None and np.any(start.values):
        starts.append(start.values)
    solve = _preconditioner(model, mesh)
    best = None
    for u in starts:
        run = _descend(model, asm, u, max_iters, fd_step, log_every, solve, rel_tol, window)
        if best is None or run[1][-1] < best[1][-1]:
            best = run
    iterations, quotients, u, converged = best
    u[~asm.interior] = 0.0
    logging.debug(f'{model.name}: quotient {quotients[-1]:.6g} after {iterations[-1]} iterations, '
                  f'converged {converged}')
    return RayleighTrace(iterations, quotients, DiscreteField(mesh, u), converged)


def extend_field(u: DiscreteField, mesh: Mesh) -> DiscreteField:
    """Linear interpolant of u on a larger mesh, zero outside the old region"""
    return DiscreteField.sample(mesh, ScalarField.from_discrete(u))


def discrete_eigenvalue(model: ModelId, mesh: Mesh) -> float:
    """Smallest eigenvalue of K u = lambda M u on the interior vertices

    For a reversible model this is the minimum of rayleigh_quotient over the
    mesh, computed by sparse shift-invert.

    Args:
        model (ModelId): a reversible model
        mesh (Mesh): at least one interior vertex

    Returns:
        float

    """
    if not model.reversible:
        raise InvalidInputError(f'{model.name} has a nonquadratic quotient; use minimize_quotient')
    interior = np.flatnonzero(mesh.interior)
    if len(interior) < 2:
        raise InvalidInputError('need at least two interior vertices')
    k = stiffness_matrix(model, mesh)[interior][:, interior]
    m = mass_matrix(model, mesh)[interior][:, interior]
    vals = eigsh(k, k=1, M=m, sigma=0, which='LM', return_eigenvectors=False)
    return float(vals[0])


def mckean_bound(n: int, kappa: float) -> float:
    """(n - 1)^2 kappa^2 / 4, the spectral floor of a simply connected
    complete manifold with sectional curvature <= -kappa^2"""
    if n < 1:
        raise InvalidInputError(f'dimension must be positive, got {n}')
    return (n - 1) ** 2 * kappa ** 2 / 4


def push_field(u: DiscreteField, imap: IsometryMap) -> DiscreteField:
    """Carries a field to the image mesh; vertex values are kept"""
    return DiscreteField(u.mesh.mapped(imap), u.values)


@dataclass
class GapReport:
    table: pd.DataFrame
    flags: Dict[str, bool] = field(default_factory=dict)
    traces: List[RayleighTrace] = field(default_factory=list)
    mckean: float = 0.25

    @property
    def passed(self) -> bool:
        return all(self.flags.values())


def gap_experiment(models: Sequence[ModelId],
                   truncations: Sequence[float],
                   h_mesh: float,
                   seed: int,
                   *,
                   max_iters: int = SPECTRUM_SETTINGS['max_iters'],
                   include_reversible: bool = True,
                   finsler_threshold: float = SPECTRUM_SETTINGS['finsler_threshold'],
                   reversible_floor: float = SPECTRUM_SETTINGS['reversible_floor'],
                   max_vertices: int = MAX_VERTICES) -> GapReport:
    """Minimized quotients over a truncation schedule, Finsler models beside their reversible counterparts

    Each model runs along the schedule in order: every truncation starts
    from the seeded fields, and every later one also from the previous
    minimizer extended by zero. That field is admissible on the larger region, so the
    minimized quotient does not increase beyond the interpolation error.

    Flags: 'monotone' (each Finsler model is non-increasing along the
    schedule, only with two or more truncations), 'finsler_threshold' (each
    Finsler model ends below finsler_threshold) and 'reversible_floor' (every
    reversible row stays at or above reversible_floor).

    Args:
        models (Sequence[ModelId]): Finsler models to run
        truncations (Sequence[float]): strictly increasing disk radii
        h_mesh (float): target edge length
        seed (int): start seed shared by all models
        max_iters (int): iteration budget per cell
        include_reversible (bool): add the reversible counterpart rows
        finsler_threshold (float): upper bound for the final Finsler quotients
        reversible_floor (float): lower bound for reversible quotients
        max_vertices (int): mesh size limit

    Returns:
        GapReport

    """
    truncations = [float(t) for t in truncations]
    if not truncations or any(b <= a for a, b in zip(truncations, truncations[1:])):
        raise InvalidInputError(f'truncations must be strictly increasing, got {truncations}')
    chains = []
    for model in models:
        chains.extend([model, model.counterpart()] if include_reversible and not model.reversible else [model])

    # meshes are shared between a model and its counterpart
    meshes = {}
    for model in chains:
        for t in truncations:
            key = (model.tag, t)
            if key not in meshes:
                meshes[key] = build_mesh(model, t, h_mesh, max_vertices=max_vertices)

    def run(model: ModelId) -> List[RayleighTrace]:
        traces = []
        for t in truncations:
            mesh = meshes[(model.tag, t)]
            start = extend_field(traces[-1].field, mesh) if traces else None
            logging.info(f'gap cell {model.name} R0={t}')
            traces.append(minimize_quotient(model, mesh, seed, max_iters, start=start))
        return traces

    n_workers = min(workers(), len(chains))
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            runs = list(pool.map(run, chains))
    else:
        runs = [run(m) for m in chains]

    cells = [(m, t) for m in chains for t in truncations]
    traces = [tr for r in runs for tr in r]
    table = pd.DataFrame([
        {'model': m.tag.value, 'reversible': m.reversible, 'truncation': t, 'h': h_mesh,
         'final_quotient': tr.final, 'iters_used': tr.iters_used}
        for (m, t), tr in zip(cells, traces)
    ], columns=GAP_COLUMNS)
    for (m, t), tr in zip(cells, traces):
        if not tr.converged:
            logging.warning(f'{m.name} R0={t}: stopped at the iteration budget, quotient {tr.final:.6g}')

    flags = {}
    finsler = table[~table.reversible]
    reversible = table[table.reversible]
    if len(finsler):
        if len(truncations) > 1:
            flags['monotone'] = bool(all(
                np.all(np.diff(g.final_quotient.to_numpy()) <= 0) for _, g in finsler.groupby('model', sort=False)))
        last = finsler[finsler.truncation == truncations[-1]]
        flags['finsler_threshold'] = bool((last.final_quotient < finsler_threshold).all())
    if len(reversible):
        flags['reversible_floor'] = bool((reversible.final_quotient >= reversible_floor).all())
    mckean = mckean_bound(2, 1.0)
    logging.info(f'gap flags {flags}; Riemannian floor {mckean}')
    return GapReport(table=table, flags=flags, traces=traces, mckean=mckean)
