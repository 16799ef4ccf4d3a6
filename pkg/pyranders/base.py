# pyranders/pyranders/base.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import abc
import logging

import numpy as np


class MetricBase(metaclass=abc.ABCMeta):
    """Base class for metric plugins.

    A metric plugin describes a Randers metric F = alpha + beta through its
    Riemannian tensor g and its 1-form b. All methods are vectorized over
    coordinate arrays of shape (..., 2) and preserve the input dtype.

    Disk metrics accept an optional precomputed gap = 1 - |x|^2. Callers that
    know the gap in closed form (an isometry image near the unit circle)
    pass it so it is not recovered by cancellation.
    """

    domain = 'disk'

    def __init__(self):
        logging.getLogger(__name__).addHandler(logging.NullHandler())

    @abc.abstractmethod
    def riemannian(self, x: np.ndarray) -> np.ndarray:
        """Riemannian tensor g_x, shape (..., 2, 2)."""

    @abc.abstractmethod
    def one_form(self, x: np.ndarray) -> np.ndarray:
        """Coefficients b(x) of the 1-form, shape (..., 2)."""

    @abc.abstractmethod
    def alpha(self, x: np.ndarray, v: np.ndarray, gap: np.ndarray = None) -> np.ndarray:
        """Riemannian norm of v at x."""

    @abc.abstractmethod
    def bound(self, x: np.ndarray) -> np.ndarray:
        """Closed-form |b|_g."""

    def beta(self, x: np.ndarray, v: np.ndarray, gap: np.ndarray = None) -> np.ndarray:
        """1-form applied to v"""
        b = self.one_form(x)
        return b[..., 0] * v[..., 0] + b[..., 1] * v[..., 1]

    def defect(self, x: np.ndarray, v: np.ndarray, gap: np.ndarray = None) -> np.ndarray:
        """alpha^2 - beta^2; plugins override with a form free of cancellation"""
        a, b = self.alpha(x, v, gap), self.beta(x, v, gap)
        return (a - b) * (a + b)

    def terms(self, x: np.ndarray, v: np.ndarray, gap: np.ndarray = None):
        """alpha, beta and F; F = defect / (alpha - beta) wherever beta < 0"""
        a, b = self.alpha(x, v, gap), self.beta(x, v, gap)
        neg = b < 0
        den = np.where(neg, a - b, 1)
        return a, b, np.where(neg, self.defect(x, v, gap) / den, a + b)


class IsometryBase(metaclass=abc.ABCMeta):
    """Base class for isometry plugins."""

    source = None
    target = None
    inverse = None

    def __init__(self):
        logging.getLogger(__name__).addHandler(logging.NullHandler())

    @abc.abstractmethod
    def map_point(self, x: np.ndarray) -> np.ndarray:
        """Maps coordinates (..., 2) from source to target."""

    @abc.abstractmethod
    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """Analytic Jacobian at x, shape (..., 2, 2)."""

    def target_gap(self, x: np.ndarray):
        """Closed-form 1 - |map(x)|^2 for disk targets, None otherwise."""
        return None


class MesherBase(metaclass=abc.ABCMeta):
    """Base class for mesh plugins."""

    def __init__(self):
        logging.getLogger(__name__).addHandler(logging.NullHandler())

    @abc.abstractmethod
    def mesh(self, *args, **kwargs):
        """Builds a triangulation of a truncated region."""
