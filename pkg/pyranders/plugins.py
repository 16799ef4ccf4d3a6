# pyranders/pyranders/plugins.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import importlib
import logging
from functools import lru_cache
from typing import Any

from stevedore.driver import DriverManager
from stevedore.exception import NoMatches


PLUGIN_NAMESPACES = ('metric', 'isometry', 'mesh')

# mirrors the entry points in setup.py
# used when the distribution metadata is not installed (source checkout)
DEFAULT_PLUGINS = {
    'metric': {
        'funk': 'pyranders.metric:FunkMetric',
        'pdisk': 'pyranders.metric:PoincareDiskMetric',
        'hplane': 'pyranders.metric:HalfPlaneMetric',
    },
    'isometry': {
        'f': 'pyranders.isometry:PoincareToFunk',
        'f_inv': 'pyranders.isometry:FunkToPoincare',
        'g': 'pyranders.isometry:FunkToHalfPlane',
        'g_inv': 'pyranders.isometry:HalfPlaneToFunk',
        'h': 'pyranders.isometry:HalfPlaneToPoincare',
        'h_inv': 'pyranders.isometry:PoincareToHalfPlane',
    },
    'mesh': {
        'disk': 'pyranders.mesh:DiskMesher',
        'rectangle': 'pyranders.mesh:RectangleMesher',
        'hyperbolic_disk': 'pyranders.mesh:HyperbolicDiskMesher',
    },
}


def _import_default(namespace: str, name: str) -> Any:
    try:
        target = DEFAULT_PLUGINS[namespace][name]
    except KeyError:
        raise NoMatches(f'No {namespace} plugin named {name}')
    module, attr = target.split(':')
    return getattr(importlib.import_module(module), attr)()


@lru_cache(maxsize=None)
def load_plugin(namespace: str, name: str) -> Any:
    """Loads (and caches) the driver registered as name in pyranders.<namespace>

    Args:
        namespace (str): one of PLUGIN_NAMESPACES
        name (str): the entry point name

    Returns:
        Any: the plugin instance

    """
    if namespace not in PLUGIN_NAMESPACES:
        raise ValueError(f'Unknown plugin namespace {namespace}')
    try:
        mgr = DriverManager(namespace=f'pyranders.{namespace}', name=name, invoke_on_load=True)
        return mgr.driver
    except NoMatches:
        logging.debug(f'No entry point for pyranders.{namespace}:{name}, using built-in')
        return _import_default(namespace, name)
