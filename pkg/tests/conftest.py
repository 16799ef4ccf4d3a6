# pyranders/tests/conftest.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import sys

import pytest

sys.path.append("../pyranders")

from pyranders.geometry import FUNK, HPLANE, PDISK, point
from pyranders.mesh import build_mesh


@pytest.fixture(params=[FUNK, PDISK, HPLANE], ids=['funk', 'pdisk', 'hplane'])
def model(request):
    return request.param


@pytest.fixture
def interior_point():
    """One admissible point per model"""
    return {
        'funk': point(FUNK, (0.3, -0.2)),
        'pdisk': point(PDISK, (-0.4, 0.25)),
        'hplane': point(HPLANE, (0.7, 1.6)),
    }


@pytest.fixture(scope="session")
def small_disk_mesh():
    return build_mesh(PDISK, 0.9, 0.1)


@pytest.fixture(scope="session")
def small_hplane_mesh():
    return build_mesh(HPLANE, 0.9, 0.1)


@pytest.fixture()
def tprint(request, capsys):
    """Fixture for printing info after test, not supressed by pytest stdout/stderr capture"""
    lines = []
    yield lines.append

    with capsys.disabled():
        for line in lines:
            sys.stdout.write("\n{}".format(line))
