# pyranders/tests/test_measure.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import numpy as np
import pytest

from pyranders.duality import ScalarField
from pyranders.exceptions import DomainError, InvalidInputError
from pyranders.geometry import FUNK, HPLANE, PDISK, point, sample_coords
from pyranders.measure import *


def test_indicatrix_profile():
    prof = indicatrix(FUNK, point(FUNK, (0, 0)), 64)
    assert np.allclose(prof.radii, 1, atol=1e-15)
    assert prof.area == pytest.approx(np.pi, rel=1e-14)
    assert prof.curve().shape == (64, 2)
    with pytest.raises(InvalidInputError):
        indicatrix(FUNK, point(FUNK, (0, 0)), 8)


def test_indicatrix_asymmetry():
    # the forward norm grows toward the boundary, so the rightward radius is the smaller one
    prof = indicatrix(FUNK, point(FUNK, (0.5, 0)), 64)
    assert prof.radii[0] == pytest.approx(0.5, rel=1e-14)
    assert prof.radii[32] == pytest.approx(1.5, rel=1e-14)


@pytest.mark.parametrize('model, x, expected', [
    (FUNK, (0, 0), 1),
    (PDISK, (0, 0), 4),
    (FUNK, (0.5, 0), 1),
    (HPLANE, (0, 2), 0.25),
])
def test_density_examples(model, x, expected):
    assert density_sigma(model, point(model, x)) == pytest.approx(expected, abs=1e-8)
    assert float(density_closed_form(model, np.array(x, dtype=float))) == pytest.approx(expected, rel=1e-14)


def test_funk_density_is_one():
    x = sample_coords(FUNK, 1000, 0, 0.9)
    assert np.allclose(density_array(FUNK, x, 4096), 1, rtol=0, atol=1e-8)
    assert np.allclose(density_closed_form(FUNK, x), 1, rtol=0, atol=1e-12)


def test_density_closed_form_matches_indicatrix(model):
    x = sample_coords(model, 300, 1, 0.9)
    assert np.allclose(density_array(model, x, 4096), density_closed_form(model, x), rtol=1e-10)


def test_density_converges():
    x = point(PDISK, (0.6, 0.3))
    assert density_sigma(PDISK, x, 2 ** 14) == pytest.approx(density_sigma(PDISK, x, 2 ** 15), rel=1e-10)


def test_density_closed_forms():
    x = sample_coords(PDISK, 100, 2, 0.9)
    s = np.sum(x * x, axis=1)
    assert np.allclose(density_closed_form(PDISK, x), 4 * (1 - s) / (1 + s) ** 3, rtol=1e-12)
    y = sample_coords(HPLANE, 100, 2, 0.2)
    t = np.sum(y * y, axis=1)
    assert np.allclose(density_closed_form(HPLANE, y), 64 * y[:, 1] / (4 + t) ** 3, rtol=1e-12)


def test_integrate_constants():
    quad = QuadratureSpec(Disk(0.5))
    assert integrate(FUNK, 1, quad) == pytest.approx(np.pi / 4, abs=1e-6)
    assert integrate(PDISK, 1, quad) == pytest.approx(16 * np.pi / 25, abs=1e-5)
    assert integrate(PDISK, 0, quad) == 0
    assert integrate(HPLANE, ScalarField.constant(0), QuadratureSpec(Rectangle(-1, 1, 0.5, 2))) == 0
    annulus = QuadratureSpec(Annulus(0.2, 0.5))
    assert integrate(FUNK, 1, annulus) == pytest.approx(np.pi * (0.25 - 0.04), abs=1e-6)


def test_integrate_density_methods_agree():
    quad = QuadratureSpec(Rectangle(-1, 1, 0.5, 2), subdivisions=(8, 8))
    field = ScalarField(lambda y: 1 + y[..., 0] ** 2)
    assert integrate(HPLANE, field, quad, sigma='closed') == pytest.approx(
        integrate(HPLANE, field, quad, sigma='indicatrix'), rel=1e-10)


def test_integrate_outside_domain():
    with pytest.raises(DomainError):
        integrate(HPLANE, 1, QuadratureSpec(Rectangle(-1, 1, -0.5, 1)))
    with pytest.raises(DomainError):
        integrate(FUNK, 1, QuadratureSpec(Disk(0.5, center=(0.7, 0))))


def test_quadrature_spec_validation():
    with pytest.raises(InvalidInputError):
        QuadratureSpec(Disk(0.5), rule='simpson')
    with pytest.raises(InvalidInputError):
        QuadratureSpec(Disk(0.5), order=5)
    with pytest.raises(InvalidInputError):
        QuadratureSpec(Disk(0.5), subdivisions=(0, 4))


def test_volume_pullback():
    source = integrate(PDISK, 1, QuadratureSpec(Disk(0.5)))
    image = integrate(FUNK, 1, QuadratureSpec(Disk(0.5), mapped_by='f'))
    assert image == pytest.approx(source, abs=1e-4)
    assert image == pytest.approx(0.64 * np.pi, abs=1e-6)
    with pytest.raises(InvalidInputError):
        integrate(PDISK, 1, QuadratureSpec(Disk(0.5), mapped_by='f'))


def test_laplacian_constant(model, interior_point):
    x = interior_point[model.name]
    assert finsler_laplacian(model, ScalarField.constant(2.0), x) == pytest.approx(0, abs=1e-8)


def test_laplacian_conformal_harmonic():
    model = PDISK.counterpart()
    value = finsler_laplacian(model, ScalarField.coordinate(0), point(model, (0.3, 0.1)), step=1e-3, nodes=1024)
    assert value == pytest.approx(0, abs=1e-5)


def test_laplacian_funk_coordinate():
    x = point(FUNK, (0, 0))
    assert finsler_laplacian(FUNK, ScalarField.coordinate(0), x, step=1e-3, nodes=1024) == pytest.approx(-3, abs=1e-3)
    assert float(finsler_laplacian_array(FUNK, ScalarField.coordinate(0), x.array)) == pytest.approx(-3, abs=1e-6)


def test_laplacian_leaves_domain():
    with pytest.raises(DomainError):
        finsler_laplacian_array(HPLANE, ScalarField.coordinate(0), np.array([0.0, 5e-5]))


def _weak_form_levels(model, region, u, v):
    # Gauss cells fine enough that the O(step^2) Laplacian error dominates
    levels = [(32, 0.02), (64, 0.01), (128, 0.005)]
    return [
        weak_form_residual(model, u, v, QuadratureSpec(region, (n, 2 * n)), step=step)
        for n, step in levels
    ]


@pytest.mark.parametrize('u', [
    ScalarField.coordinate(0),
    ScalarField(lambda y: y[..., 0] ** 2 + y[..., 1], lambda y: np.stack((2 * y[..., 0], np.ones(y.shape[:-1])), axis=-1)),
], ids=['x1', 'x1^2+x2'])
def test_weak_form_converges(model, u, tprint):
    if model.is_disk:
        region, v = Disk(0.6), ScalarField.bump((0, 0), 0.6)
    else:
        region, v = Disk(1.0, center=(0, 2)), ScalarField.bump((0, 2), 1.0)
    res = _weak_form_levels(model, region, u, v)
    tprint(f'{model.name} {u.name or "x1^2+x2"}: {res}')
    assert res[0] / res[1] >= 3
    assert res[1] / res[2] >= 3


def test_weak_form_step_error_is_second_order():
    quad = QuadratureSpec(Disk(0.6), (128, 256))
    u, v = ScalarField.coordinate(0), ScalarField.bump((0, 0), 0.6)
    coarse = weak_form_residual(FUNK, u, v, quad, step=0.02)
    fine = weak_form_residual(FUNK, u, v, quad, step=0.01)
    assert 3.5 <= coarse / fine <= 4.5


def test_weak_form_trivial_cases():
    quad = QuadratureSpec(Disk(0.6), (16, 64), rule='midpoint')
    bump = ScalarField.bump((0, 0), 0.6)
    assert weak_form_residual(FUNK, ScalarField.constant(1.0), bump, quad) < 1e-8
    assert weak_form_residual(PDISK, ScalarField.coordinate(1), ScalarField.constant(0.0), quad) == 0
    with pytest.raises(InvalidInputError):
        weak_form_residual(FUNK, ScalarField.coordinate(0), ScalarField.coordinate(1), quad)
