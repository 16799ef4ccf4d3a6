# pyranders/pyranders/mesh.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
import numpy_indexed as npi
from scipy.spatial import Delaunay

from pyranders.base import MesherBase
from pyranders.exceptions import InvalidInputError
from pyranders.geometry import ModelId, check_domain, check_truncation
from pyranders.isometry import IsometryMap, isometry_map
from pyranders.measure import Rectangle
from pyranders.plugins import load_plugin
from pyranders.settings import DEFAULT_CTX


MAX_VERTICES = DEFAULT_CTX['spectrum_settings']['max_vertices']
MIN_AREA = 1e-14
GOLDEN_ANGLE = np.pi * (3 - np.sqrt(5))


def _signed_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    p0, p1, p2 = (vertices[triangles[:, k]] for k in range(3))
    e1, e2 = p1 - p0, p2 - p0
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


@dataclass(frozen=True, eq=False)
class Mesh:
    """Triangulation with positively oriented triangles and a boundary-vertex mask

    Instances hash by identity so per-mesh assembly data can be cached.
    """
    vertices: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    h_mesh: float
    kind: str = 'disk'

    @classmethod
    def from_triangulation(cls, vertices: np.ndarray, triangles: np.ndarray, h_mesh: float,
                           kind: str = 'disk') -> 'Mesh':
        """Orients triangles, drops slivers and unused vertices, flags the boundary

        Args:
            vertices (np.ndarray): (n, 2) coordinates
            triangles (np.ndarray): (m, 3) vertex indices
            h_mesh (float): target edge length
            kind (str): label of the construction

        Returns:
            Mesh

        """
        vertices = np.asarray(vertices, dtype=float)
        triangles = np.array(triangles, dtype=np.int64)
        area = _signed_areas(vertices, triangles)
        flip = area < 0
        triangles[flip] = triangles[flip][:, [0, 2, 1]]
        triangles = triangles[np.abs(area) > MIN_AREA]
        if len(triangles) == 0:
            raise InvalidInputError('triangulation has no non-degenerate triangles')

        used = np.unique(triangles)
        index = np.full(len(vertices), -1, dtype=np.int64)
        index[used] = np.arange(len(used))
        vertices, triangles = vertices[used], index[triangles]

        # an edge seen by exactly one triangle lies on the boundary
        edges = np.sort(triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
        unique_edges, counts = npi.count(edges)
        boundary = np.zeros(len(vertices), dtype=bool)
        boundary[unique_edges[counts == 1].ravel()] = True
        return cls(vertices, triangles, boundary, float(h_mesh), kind)

    @property
    def interior(self) -> np.ndarray:
        return ~self.boundary

    @cached_property
    def areas(self) -> np.ndarray:
        return _signed_areas(self.vertices, self.triangles)

    @cached_property
    def centroids(self) -> np.ndarray:
        return self.vertices[self.triangles].mean(axis=1)

    @cached_property
    def basis_gradients(self) -> np.ndarray:
        """Gradients of the three hat functions on each triangle, shape (m, 3, 2)"""
        p = self.vertices[self.triangles]
        grads = np.empty(p.shape)
        for i in range(3):
            e = p[:, (i + 2) % 3] - p[:, (i + 1) % 3]
            grads[:, i, 0] = -e[:, 1]
            grads[:, i, 1] = e[:, 0]
        return grads / (2 * self.areas)[:, None, None]

    def mapped(self, imap: IsometryMap) -> 'Mesh':
        """Image mesh: vertices pushed through imap, connectivity kept"""
        return Mesh.from_triangulation(imap.plugin.map_point(self.vertices), self.triangles, self.h_mesh,
                                       kind=f'{self.kind}:{imap.id.value}')

    def __len__(self) -> int:
        return len(self.vertices)


def _check_h(h_mesh: float, extent: float) -> None:
    if not np.isfinite(h_mesh) or h_mesh <= 0:
        raise InvalidInputError(f'h_mesh must be positive, got {h_mesh}')
    if h_mesh > extent / 2:
        raise InvalidInputError(f'h_mesh {h_mesh} is too coarse for a region of extent {extent}')


class DiskMesher(MesherBase):
    """Concentric rings of near-uniform spacing, Delaunay-triangulated"""

    def mesh(self, *, radius: float, h_mesh: float, center: Tuple[float, float] = (0.0, 0.0),
             max_vertices: int = MAX_VERTICES, **kwargs) -> Mesh:
        """Triangulates the disk of the given radius

        Args:
            radius (float): disk radius
            h_mesh (float): target edge length
            center (Tuple[float, float]): disk center
            max_vertices (int): refuse meshes larger than this
            **kwargs: keyword arguments for plugins

        Returns:
            Mesh

        """
        _check_h(h_mesh, radius)
        rings = math.ceil(radius / h_mesh - 1e-9)
        radii = radius * np.arange(1, rings + 1) / rings
        counts = np.maximum(6, np.rint(2 * np.pi * radii / h_mesh).astype(int))
        if 1 + counts.sum() > max_vertices:
            raise InvalidInputError(f'h_mesh {h_mesh} needs {1 + counts.sum()} vertices, limit {max_vertices}')
        pts = [np.zeros((1, 2))]
        for k, (r, m) in enumerate(zip(radii, counts), start=1):
            theta = k * GOLDEN_ANGLE + 2 * np.pi * np.arange(m) / m
            pts.append(r * np.column_stack((np.cos(theta), np.sin(theta))))
        vertices = np.concatenate(pts) + np.asarray(center, dtype=float)
        return Mesh.from_triangulation(vertices, Delaunay(vertices).simplices, h_mesh, kind='disk')


class RectangleMesher(MesherBase):
    """Structured grid, two triangles per cell"""

    def mesh(self, *, region: Rectangle, h_mesh: float, max_vertices: int = MAX_VERTICES, **kwargs) -> Mesh:
        width, height = region.x1 - region.x0, region.y1 - region.y0
        _check_h(h_mesh, min(width, height))
        nx, ny = math.ceil(width / h_mesh - 1e-9), math.ceil(height / h_mesh - 1e-9)
        if (nx + 1) * (ny + 1) > max_vertices:
            raise InvalidInputError(f'h_mesh {h_mesh} needs {(nx + 1) * (ny + 1)} vertices, limit {max_vertices}')
        xx, yy = np.meshgrid(np.linspace(region.x0, region.x1, nx + 1),
                             np.linspace(region.y0, region.y1, ny + 1), indexing='ij')
        vertices = np.column_stack((xx.ravel(), yy.ravel()))
        i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing='ij')
        a = (i * (ny + 1) + j).ravel()
        b, c, d = a + ny + 1, a + ny + 2, a + 1
        triangles = np.concatenate((np.column_stack((a, b, c)), np.column_stack((a, c, d))))
        return Mesh.from_triangulation(vertices, triangles, h_mesh, kind='rectangle')


class HyperbolicDiskMesher(MesherBase):
    """Disk mesh of radius R in the Poincare disk carried to the half plane by h_inv

    The image is the hyperbolic disk of radius 2 artanh(R) about (0, 2), the same truncation the
    disk models use. Its heights run from 2(1 - R) / (1 + R) to 2(1 + R) / (1 - R), so as R -> 1 it
    exhausts the half plane like the bands [1 - R, 1 / (1 - R)] and stands in for the band truncation.
    """

    def mesh(self, *, radius: float, h_mesh: float, max_vertices: int = MAX_VERTICES, **kwargs) -> Mesh:
        disk = load_plugin('mesh', 'disk').mesh(radius=radius, h_mesh=h_mesh, max_vertices=max_vertices)
        return disk.mapped(isometry_map('h_inv'))


def build_mesh(model: ModelId,
               truncation: float,
               h_mesh: float,
               *,
               region: Optional[Rectangle] = None,
               max_vertices: int = MAX_VERTICES) -> Mesh:
    """Mesh of the truncated region of a model

    Disk models mesh the disk of radius truncation. The half plane meshes the
    h_inv image of that Poincare disk region, or an explicit rectangle.

    Args:
        model (ModelId): the model
        truncation (float): disk radius in (0, 1)
        h_mesh (float): target edge length
        region (Rectangle): explicit half-plane rectangle, overrides truncation
        max_vertices (int): refuse meshes larger than this

    Returns:
        Mesh

    """
    if region is not None:
        if model.is_disk:
            raise InvalidInputError('rectangular regions are only meshed for the half plane')
        mesh = load_plugin('mesh', 'rectangle').mesh(region=region, h_mesh=h_mesh, max_vertices=max_vertices)
    else:
        check_truncation(model, truncation)
        name = 'disk' if model.is_disk else 'hyperbolic_disk'
        mesh = load_plugin('mesh', name).mesh(radius=truncation, h_mesh=h_mesh, max_vertices=max_vertices)
    check_domain(model, mesh.vertices)
    logging.info(f'{model.name} mesh ({mesh.kind}): {len(mesh)} vertices, {len(mesh.triangles)} triangles')
    return mesh
