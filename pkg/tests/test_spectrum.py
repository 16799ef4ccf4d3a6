# pyranders/tests/test_spectrum.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import numpy as np
import pytest

from pyranders.duality import ScalarField
from pyranders.exceptions import DegenerateFieldError, InvalidInputError
from pyranders.geometry import FUNK, HPLANE, PDISK
from pyranders.isometry import isometry_map
from pyranders.mesh import Mesh, build_mesh
from pyranders.spectrum import *


@pytest.fixture(scope='module')
def tent_mesh():
    """Center vertex plus three boundary vertices at radius 0.9"""
    t = 2 * np.pi * np.arange(3) / 3
    vertices = np.vstack(([0.0, 0.0], 0.9 * np.column_stack((np.cos(t), np.sin(t)))))
    return Mesh.from_triangulation(vertices, np.array([[0, 1, 2], [0, 2, 3], [0, 3, 1]]), 0.9)


@pytest.fixture
def bump_field(small_disk_mesh):
    return DiscreteField.sample(small_disk_mesh, ScalarField.bump((0, 0), 0.9))


def test_discrete_field_validation(small_disk_mesh):
    n = len(small_disk_mesh)
    with pytest.raises(InvalidInputError):
        DiscreteField(small_disk_mesh, np.zeros(n - 1))
    with pytest.raises(InvalidInputError):
        DiscreteField(small_disk_mesh, np.ones(n))
    values = np.zeros(n)
    values[np.flatnonzero(small_disk_mesh.interior)[0]] = np.nan
    with pytest.raises(InvalidInputError):
        DiscreteField(small_disk_mesh, values)


def test_discrete_field_sample(small_disk_mesh):
    u = DiscreteField.sample(small_disk_mesh, ScalarField.constant(1.0))
    assert np.all(u.values[small_disk_mesh.boundary] == 0)
    assert np.all(u.values[small_disk_mesh.interior] == 1)
    assert np.array_equal(u.scaled(3).values, 3 * u.values)


def test_tent_quotient(tent_mesh):
    model = PDISK.counterpart()
    u = DiscreteField(tent_mesh, [1.0, 0.0, 0.0, 0.0])
    assert rayleigh_quotient(model, u) == pytest.approx(9 * 0.8281 / 0.81, rel=1e-12)
    den = np.sqrt(3) / 3 * 0.81 / 0.8281
    assert l2_norm(model, u) == pytest.approx(np.sqrt(den), rel=1e-12)
    assert h1_norm(model, u) ** 2 == pytest.approx(3 * np.sqrt(3) + den, rel=1e-12)


def test_h1_identity(model, small_disk_mesh, small_hplane_mesh):
    mesh = small_hplane_mesh if model is HPLANE else small_disk_mesh
    u = DiscreteField.sample(mesh, ScalarField.constant(1.0))
    q, l2 = rayleigh_quotient(model, u), l2_norm(model, u)
    assert h1_norm(model, u) ** 2 == pytest.approx(l2 ** 2 * (1 + q), rel=1e-12)


def test_zero_field(small_disk_mesh):
    u = DiscreteField(small_disk_mesh, np.zeros(len(small_disk_mesh)))
    with pytest.raises(DegenerateFieldError):
        rayleigh_quotient(PDISK, u)
    assert l2_norm(PDISK, u) == 0


def test_scale_invariance(bump_field):
    q = rayleigh_quotient(FUNK, bump_field)
    for c in (1e-3, 0.5, 7.0):
        assert rayleigh_quotient(FUNK, bump_field.scaled(c)) == pytest.approx(q, rel=1e-12)
    rev = FUNK.counterpart()
    assert rayleigh_quotient(rev, bump_field.scaled(-2)) == pytest.approx(rayleigh_quotient(rev, bump_field), rel=1e-12)


def test_quotient_sign_asymmetry(bump_field):
    plus, minus = rayleigh_quotient(PDISK, bump_field), rayleigh_quotient(PDISK, bump_field.scaled(-1))
    assert plus > 0 and minus > 0
    assert abs(plus - minus) > 1e-6 * plus


def test_minimize_monotone(small_disk_mesh):
    trace = minimize_quotient(PDISK, small_disk_mesh, 0, 25)
    q = np.array(trace.quotients)
    assert np.all(np.diff(q) <= 0)
    assert trace.iterations[0] == 0
    assert trace.iters_used <= 25
    assert trace.final == pytest.approx(rayleigh_quotient(PDISK, trace.field), rel=1e-12)
    assert l2_norm(PDISK, trace.field) == pytest.approx(1, rel=1e-12)
    assert np.all(trace.field.values[small_disk_mesh.boundary] == 0)


def test_minimize_zero_iterations(small_disk_mesh):
    trace = minimize_quotient(FUNK, small_disk_mesh, 3, 0)
    assert trace.iterations == [0]
    assert len(trace.quotients) == 1


def test_minimize_deterministic(small_hplane_mesh):
    one = minimize_quotient(HPLANE, small_hplane_mesh, 5, 10, log_every=0)
    two = minimize_quotient(HPLANE, small_hplane_mesh, 5, 10, log_every=0)
    assert one.quotients == two.quotients
    assert np.array_equal(one.field.values, two.field.values)


def test_reversible_floor(small_disk_mesh):
    trace = minimize_quotient(PDISK.counterpart(), small_disk_mesh, 0, 30)
    assert trace.final >= 0.23
    assert trace.final >= mckean_bound(2, 1)


def test_minimize_errors(small_disk_mesh):
    with pytest.raises(InvalidInputError):
        minimize_quotient(PDISK, small_disk_mesh, 0, -1)
    triangle = Mesh.from_triangulation(np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]]), np.array([[0, 1, 2]]), 0.5)
    with pytest.raises(InvalidInputError):
        minimize_quotient(PDISK, triangle, 0, 5)


def test_mckean_bound():
    assert mckean_bound(2, 1) == 0.25
    assert mckean_bound(3, 1) == 1.0
    assert mckean_bound(2, 2) == 1.0
    with pytest.raises(InvalidInputError):
        mckean_bound(0, 1)


def test_push_field_coherent(bump_field, small_disk_mesh):
    f = isometry_map('f')
    image = push_field(bump_field, f)
    assert np.array_equal(image.values, bump_field.values)
    source = rayleigh_quotient(PDISK, bump_field)
    target = rayleigh_quotient(FUNK, image)
    assert abs(source - target) / source < 5 * small_disk_mesh.h_mesh


def test_gap_experiment_small(tprint):
    report = gap_experiment([PDISK], [0.5, 0.7], 0.1, 0, max_iters=10)
    tprint(report.table.to_string())
    assert list(report.table.columns) == GAP_COLUMNS
    assert len(report.table) == 4
    assert report.table.reversible.tolist() == [False, False, True, True]
    assert set(report.flags) == {'monotone', 'finsler_threshold', 'reversible_floor'}
    assert report.flags['reversible_floor']
    assert report.passed == all(report.flags.values())
    assert len(report.traces) == 4
    assert report.mckean == 0.25


def test_gap_experiment_options():
    report = gap_experiment([FUNK], [0.6], 0.15, 1, max_iters=3, include_reversible=False)
    assert len(report.table) == 1
    assert set(report.flags) == {'finsler_threshold'}
    with pytest.raises(InvalidInputError):
        gap_experiment([FUNK], [0.9, 0.5], 0.1, 0)
    with pytest.raises(InvalidInputError):
        gap_experiment([FUNK], [], 0.1, 0)


def test_gap_workers_do_not_change_table(monkeypatch):
    one = gap_experiment([HPLANE], [0.5], 0.15, 2, max_iters=5)
    monkeypatch.setenv('PYRANDERS_WORKERS', '2')
    two = gap_experiment([HPLANE], [0.5], 0.15, 2, max_iters=5)
    assert one.table.equals(two.table)


def test_matrices_reproduce_reversible_quotient(small_disk_mesh):
    model = PDISK.counterpart()
    u = DiscreteField.sample(small_disk_mesh, ScalarField.bump((0.1, 0), 0.7))
    k, m = stiffness_matrix(model, small_disk_mesh), mass_matrix(model, small_disk_mesh)
    x = u.values
    assert (x @ (k @ x)) / (x @ (m @ x)) == pytest.approx(rayleigh_quotient(model, u), rel=1e-10)


def test_minimize_reaches_discrete_eigenvalue(small_disk_mesh):
    model = PDISK.counterpart()
    trace = minimize_quotient(model, small_disk_mesh, 0, 500)
    assert trace.converged
    assert trace.iters_used < 500
    lam = discrete_eigenvalue(model, small_disk_mesh)
    assert trace.final == pytest.approx(lam, rel=1e-5)
    assert lam >= 0.23


def test_discrete_eigenvalue_errors(small_disk_mesh):
    with pytest.raises(InvalidInputError):
        discrete_eigenvalue(PDISK, small_disk_mesh)


def test_warm_start(small_disk_mesh, bump_field):
    trace = minimize_quotient(FUNK, small_disk_mesh, 0, 5, start=bump_field)
    cold = minimize_quotient(FUNK, small_disk_mesh, 0, 5)
    assert trace.final <= rayleigh_quotient(FUNK, bump_field)
    assert trace.final <= cold.final
    other = build_mesh(PDISK, 0.8, 0.1)
    with pytest.raises(InvalidInputError):
        minimize_quotient(FUNK, other, 0, 5, start=bump_field)


def test_extend_field(small_disk_mesh):
    small = build_mesh(PDISK, 0.5, 0.1)
    u = DiscreteField.sample(small, ScalarField.bump((0, 0), 0.5))
    big = extend_field(u, small_disk_mesh)
    r = np.hypot(*small_disk_mesh.vertices.T)
    assert np.all(big.values[r > 0.5 + 1e-9] == 0)
    assert np.all(big.values[small_disk_mesh.boundary] == 0)
    assert big.values[np.argmin(r)] == pytest.approx(1, rel=1e-12)
    assert np.all(big.values >= 0)


def test_gap_monotone_when_converged():
    report = gap_experiment([PDISK], [0.5, 0.7, 0.9], 0.05, 0, max_iters=300)
    assert report.flags == {'monotone': True, 'finsler_threshold': True, 'reversible_floor': True}
    finsler = report.table[~report.table.reversible].final_quotient.to_numpy()
    assert np.all(np.diff(finsler) <= 0)
    assert finsler[-1] < 0.2
    for trace, reversible in zip(report.traces, report.table.reversible):
        if reversible:
            assert trace.converged
            assert trace.final >= 0.23


def test_reversible_refinement_stable():
    model = PDISK.counterpart()
    coarse = minimize_quotient(model, build_mesh(PDISK, 0.9, 0.04), 0, 500)
    fine = minimize_quotient(model, build_mesh(PDISK, 0.9, 0.02), 0, 500)
    assert coarse.converged and fine.converged
    assert abs(coarse.final - fine.final) < 0.02
