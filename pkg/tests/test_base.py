# pyranders/tests/test_base.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import pytest
from stevedore.exception import NoMatches

from pyranders.base import *
from pyranders.isometry import PoincareToFunk
from pyranders.metric import FunkMetric
from pyranders.mesh import DiskMesher
from pyranders.plugins import load_plugin


class Metric(MetricBase):
    def t(self):
        return None


class Isometry(IsometryBase):
    def t(self):
        return None


class Mesher(MesherBase):
    def t(self):
        return None


def test_metric_base():
    with pytest.raises(TypeError):
        Metric()


def test_isometry_base():
    with pytest.raises(TypeError):
        Isometry()


def test_mesher_base():
    with pytest.raises(TypeError):
        Mesher()


def test_load_plugin():
    assert isinstance(load_plugin('metric', 'funk'), FunkMetric)
    assert isinstance(load_plugin('isometry', 'f'), PoincareToFunk)
    assert isinstance(load_plugin('mesh', 'disk'), DiskMesher)
    assert load_plugin('metric', 'pdisk') is load_plugin('metric', 'pdisk')


def test_load_plugin_unknown():
    with pytest.raises(ValueError):
        load_plugin('crossover', 'funk')
    with pytest.raises(NoMatches):
        load_plugin('metric', 'klein')
