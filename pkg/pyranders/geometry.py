# pyranders/pyranders/geometry.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple, Union

import numpy as np

from pyranders.exceptions import DomainError, InvalidInputError, ModelMismatchError
from pyranders.settings import DEFAULT_CTX


EPS_DOM = DEFAULT_CTX['geometry_settings']['eps_dom']

Coords = Union[Tuple[float, float], np.ndarray]


class Model(str, Enum):
    """The three Randers models; values double as metric plugin names"""
    FUNK = 'funk'
    PDISK = 'pdisk'
    HPLANE = 'hplane'

    @property
    def is_disk(self) -> bool:
        return self is not Model.HPLANE


@dataclass(frozen=True)
class ModelId:
    """A model tag plus the reversible-counterpart flag (beta suppressed)"""
    tag: Model
    reversible: bool = False

    @property
    def name(self) -> str:
        return f'{self.tag.value}-reversible' if self.reversible else self.tag.value

    @property
    def is_disk(self) -> bool:
        return self.tag.is_disk

    def counterpart(self) -> 'ModelId':
        """The reversible counterpart of this model"""
        return ModelId(self.tag, True)

    @classmethod
    def parse(cls, name: str, reversible: bool = False) -> 'ModelId':
        """Parses 'funk', 'pdisk', 'hplane' (optionally suffixed with '-reversible')

        Args:
            name (str): the model name
            reversible (bool): force the reversible counterpart

        Returns:
            ModelId

        """
        if name.endswith('-reversible'):
            name, reversible = name[:-len('-reversible')], True
        try:
            return cls(Model(name), reversible)
        except ValueError:
            raise InvalidInputError(f'Unknown model {name!r}, expected one of {[m.value for m in Model]}')


FUNK = ModelId(Model.FUNK)
PDISK = ModelId(Model.PDISK)
HPLANE = ModelId(Model.HPLANE)


def as_coords(coords: Coords, dtype=np.float64) -> np.ndarray:
    """Converts coords to an array of shape (..., 2), raising on non-finite values"""
    arr = np.asarray(coords, dtype=dtype)
    if arr.shape[-1:] != (2,):
        raise InvalidInputError(f'Expected coordinates of shape (..., 2), got {arr.shape}')
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError('Coordinates must be finite')
    return arr


def domain_mask(model: ModelId, coords: np.ndarray, eps: float = EPS_DOM) -> np.ndarray:
    """Vectorized domain membership

    Args:
        model (ModelId): the model
        coords (np.ndarray): shape (..., 2)
        eps (float): boundary guard

    Returns:
        np.ndarray: boolean, shape (...)

    """
    x = np.asarray(coords)
    if x.shape[-1:] != (2,) or not np.all(np.isfinite(x)):
        raise InvalidInputError(f'Expected finite coordinates of shape (..., 2), got {x.shape}')
    if model.is_disk:
        return np.hypot(x[..., 0], x[..., 1]) <= 1 - eps
    return x[..., 1] >= eps


def check_domain(model: ModelId, coords: np.ndarray, eps: float = EPS_DOM) -> np.ndarray:
    """Raises DomainError unless every point lies in the model domain; returns coords"""
    mask = domain_mask(model, coords, eps)
    if not np.all(mask):
        bad = np.asarray(coords).reshape(-1, 2)[~np.asarray(mask).reshape(-1)][0]
        raise DomainError(f'{bad.tolist()} is outside the {model.name} domain')
    return coords


def in_domain(model: ModelId, coords: Coords) -> bool:
    """True iff coords lie in the open domain of the model, respecting the boundary guard

    Args:
        model (ModelId): the model
        coords (pair of float): the point

    Returns:
        bool

    """
    return bool(domain_mask(model, as_coords(coords)))


@dataclass(frozen=True)
class ModelPoint:
    model: ModelId
    coords: Tuple[float, float]

    def __post_init__(self):
        coords = tuple(float(c) for c in as_coords(self.coords).reshape(2))
        object.__setattr__(self, 'coords', coords)
        if not in_domain(self.model, coords):
            raise DomainError(f'{coords} is outside the {self.model.name} domain')

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)


@dataclass(frozen=True)
class TangentVector:
    base: ModelPoint
    v: Tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, 'v', tuple(float(c) for c in as_coords(self.v).reshape(2)))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.v)


@dataclass(frozen=True)
class CotangentVector:
    base: ModelPoint
    a: Tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, 'a', tuple(float(c) for c in as_coords(self.a).reshape(2)))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.a)


def point(model: ModelId, coords: Coords) -> ModelPoint:
    return ModelPoint(model, tuple(coords))


def require_model(model: ModelId, base: ModelPoint) -> None:
    """Raises ModelMismatchError if base does not live in model (flag aside)"""
    if base.model.tag is not model.tag:
        raise ModelMismatchError(f'{base.model.name} point passed to a {model.name} operation')


def rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) fully determined by seed"""
    return np.random.Generator(np.random.Philox(seed))


def check_truncation(model: ModelId, truncation: float) -> float:
    if not np.isfinite(truncation) or not 0 < truncation < 1:
        raise InvalidInputError(f'truncation must lie in (0, 1), got {truncation}')
    if model.is_disk and truncation > 1 - EPS_DOM:
        raise InvalidInputError(f'truncation {truncation} reaches the boundary guard')
    if not model.is_disk and truncation < EPS_DOM:
        raise InvalidInputError(f'truncation {truncation} reaches the boundary guard')
    return float(truncation)


def sample_coords(model: ModelId, count: int, seed: int, truncation: float) -> np.ndarray:
    """Seeded points uniform in coordinates over the truncated region

    Disk models sample |x| <= truncation. The half plane samples the band
    x2 in [truncation, 1/truncation], |x1| <= 1/truncation.

    Args:
        model (ModelId): the model
        count (int): number of points
        seed (int): generator seed
        truncation (float): in (0, 1)

    Returns:
        np.ndarray: shape (count, 2)

    """
    truncation = check_truncation(model, truncation)
    if count < 0:
        raise InvalidInputError(f'count must be non-negative, got {count}')
    u = rng(seed).random((count, 2))
    if model.is_disk:
        r = truncation * np.sqrt(u[:, 0])
        theta = 2 * np.pi * u[:, 1]
        return np.column_stack((r * np.cos(theta), r * np.sin(theta)))
    top = 1 / truncation
    x1 = top * (2 * u[:, 0] - 1)
    x2 = truncation + (top - truncation) * u[:, 1]
    return np.column_stack((x1, x2))


def sample_points(model: ModelId, count: int, seed: int, truncation: float) -> List[ModelPoint]:
    """Seeded list of ModelPoint; see sample_coords"""
    return [ModelPoint(model, tuple(c)) for c in sample_coords(model, count, seed, truncation)]


def sample_vectors(count: int, seed: int) -> np.ndarray:
    """Seeded standard normal vectors, shape (count, 2), drawn from a stream
    independent of the point stream of the same seed"""
    return stream(seed, 1).standard_normal((count, 2))


def stream(seed: int, index: int) -> np.random.Generator:
    """Independent Philox stream number index for the same seed"""
    bit_generator = np.random.Philox(seed)
    if index:
        bit_generator = bit_generator.jumped(index)
    return np.random.Generator(bit_generator)


def sampling_truncation(model: ModelId, radius: float) -> float:
    """Converts a disk radius into the sampling parameter of model

    Disk models use the radius itself; the half plane uses the band
    parameter 1 - radius, so 0.99 becomes the band [0.01, 100].
    """
    return radius if model.is_disk else 1 - radius
