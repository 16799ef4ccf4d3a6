# pyranders/pyranders/exceptions.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License


class RandersError(Exception):
    """Base class for pyranders errors."""


class InvalidInputError(RandersError, ValueError):
    """Malformed or non-finite input, or a violated precondition."""


class DomainError(RandersError, ValueError):
    """Point (or stencil/region) outside the model domain."""


class ModelMismatchError(RandersError, ValueError):
    """Value belongs to a different model than the operation expects."""


class DegenerateDirectionError(RandersError, ValueError):
    """Operation undefined at the zero vector."""


class DegenerateFieldError(RandersError, ValueError):
    """Discrete field is identically zero."""
