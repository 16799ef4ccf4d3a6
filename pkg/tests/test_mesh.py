# pyranders/tests/test_mesh.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import numpy as np
import pytest

from pyranders.exceptions import DomainError, InvalidInputError
from pyranders.geometry import FUNK, HPLANE, PDISK, domain_mask
from pyranders.isometry import isometry_map, map_coords
from pyranders.measure import Rectangle
from pyranders.mesh import *


def test_disk_mesh_small():
    mesh = build_mesh(PDISK, 0.9, 0.3)
    assert len(mesh) == 39
    assert len(mesh.triangles) >= 20
    assert np.all(mesh.areas > 0)
    assert mesh.kind == 'disk'


def test_disk_mesh_boundary(small_disk_mesh):
    r = np.hypot(*small_disk_mesh.vertices.T)
    assert np.allclose(r[small_disk_mesh.boundary], 0.9, atol=1e-12)
    assert np.all(r[small_disk_mesh.interior] < 0.9 - 0.05)
    assert small_disk_mesh.interior.sum() > 0
    # inscribed polygon
    assert small_disk_mesh.areas.sum() == pytest.approx(np.pi * 0.81, rel=0.01)


def test_disk_mesh_fine():
    mesh = build_mesh(FUNK, 0.99, 0.02)
    r = np.hypot(*mesh.vertices.T)
    assert np.all(r <= 0.99 + 1e-12)
    assert np.all(r[mesh.boundary] >= 0.99 - 1e-12)
    assert np.all(mesh.areas > 0)


def test_rectangle_mesh():
    region = Rectangle(-5, 5, 0.05, 10)
    mesh = build_mesh(HPLANE, 0.9, 0.2, region=region)
    assert len(mesh) == 51 * 51
    assert len(mesh.triangles) == 5000
    assert mesh.boundary.sum() == 200
    assert mesh.areas.sum() == pytest.approx(10 * 9.95, rel=1e-12)
    assert np.all(mesh.vertices[:, 1] >= 0.05)


def test_rectangle_only_for_half_plane():
    with pytest.raises(InvalidInputError):
        build_mesh(PDISK, 0.9, 0.2, region=Rectangle(-0.5, 0.5, -0.5, 0.5))
    with pytest.raises(DomainError):
        build_mesh(HPLANE, 0.9, 0.2, region=Rectangle(-1, 1, -1, 1))


@pytest.mark.parametrize('h', [0, -0.1, np.nan, 1.0])
def test_infeasible_h(h):
    with pytest.raises(InvalidInputError):
        build_mesh(PDISK, 0.9, h)


def test_vertex_limit():
    with pytest.raises(InvalidInputError):
        build_mesh(PDISK, 0.9, 0.01, max_vertices=1000)


def test_hyperbolic_disk_mesh(small_hplane_mesh, small_disk_mesh):
    assert np.all(domain_mask(HPLANE, small_hplane_mesh.vertices))
    assert np.all(small_hplane_mesh.areas > 0)
    assert small_hplane_mesh.kind == 'disk:h_inv'
    assert np.array_equal(small_hplane_mesh.boundary, small_disk_mesh.boundary)
    assert np.allclose(small_hplane_mesh.vertices, map_coords(isometry_map('h_inv'), small_disk_mesh.vertices))


def test_hyperbolic_disk_mesh_heights(small_hplane_mesh):
    x2 = small_hplane_mesh.vertices[:, 1]
    assert x2.min() >= 2 * 0.1 / 1.9 - 1e-12
    assert x2.max() <= 2 * 1.9 / 0.1 + 1e-9
    assert x2.max() > 1 / 0.1


def test_from_triangulation_orients_and_flags():
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [9.0, 9.0]])
    # the second triangle is clockwise
    triangles = np.array([[0, 1, 4], [1, 4, 2], [2, 3, 4], [3, 0, 4]])
    mesh = Mesh.from_triangulation(vertices, triangles, 0.5)
    # the unused vertex is dropped
    assert len(mesh) == 5
    assert np.all(mesh.areas > 0)
    assert mesh.areas.sum() == pytest.approx(1)
    assert mesh.boundary.tolist() == [True, True, True, True, False]


def test_from_triangulation_degenerate():
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    with pytest.raises(InvalidInputError):
        Mesh.from_triangulation(vertices, np.array([[0, 1, 2]]), 0.5)


def test_basis_gradients(small_disk_mesh):
    grads = small_disk_mesh.basis_gradients
    assert grads.shape == (len(small_disk_mesh.triangles), 3, 2)
    assert np.allclose(grads.sum(axis=1), 0, atol=1e-10)
    # hat functions reproduce linear fields
    p = small_disk_mesh.vertices[small_disk_mesh.triangles]
    assert np.allclose(np.einsum('tik,tij->tkj', p, grads), np.eye(2), atol=1e-10)


def test_mapped_mesh(small_disk_mesh):
    f = isometry_map('f')
    image = small_disk_mesh.mapped(f)
    assert np.allclose(image.vertices, map_coords(f, small_disk_mesh.vertices))
    assert np.array_equal(image.boundary, small_disk_mesh.boundary)
    assert image.h_mesh == small_disk_mesh.h_mesh


def test_mesher_plugins():
    assert isinstance(load_plugin('mesh', 'disk'), DiskMesher)
    assert isinstance(load_plugin('mesh', 'rectangle'), RectangleMesher)
    assert isinstance(load_plugin('mesh', 'hyperbolic_disk'), HyperbolicDiskMesher)
