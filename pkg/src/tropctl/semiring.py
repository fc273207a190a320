"""Scalar arithmetic over Zmax and its completions.

Scalars are plain Python values: finite elements are ``int`` (arbitrary
precision), and the two infinities are the float constants ``NEG_INF`` and
``POS_INF``.  Sums of finite scalars therefore never leave ``int``.

Two laws are provided for each operation:

* ``max``/``max_completed``: the max-plus semiring, where ``-inf`` is the
  zero and absorbs ``+inf`` under multiplication.
* ``min``/``min_completed``: the min-plus semiring, where ``+inf`` is the
  zero and absorbs ``-inf``.
"""

from __future__ import annotations

import math
from typing import Union

Scalar = Union[int, float]

NEG_INF: float = -math.inf
POS_INF: float = math.inf

_ADD_MODES = ("max", "min")
_MUL_MODES = ("max_completed", "min_completed")


def is_scalar(value: object) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, int):
        return True
    return isinstance(value, float) and math.isinf(value)


def check_scalar(value: object) -> Scalar:
    """Coerce ``value`` to a canonical scalar or raise ``ValueError``.

    Integral floats are accepted and converted to ``int``; NaN and
    fractional values are rejected.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a scalar: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return value
        if math.isnan(value) or not value.is_integer():
            raise ValueError(f"not an extended integer: {value!r}")
        return int(value)
    raise ValueError(f"not a scalar: {value!r}")


def trop_add(a: Scalar, b: Scalar, mode: str = "max") -> Scalar:
    if mode == "max":
        return a if a >= b else b
    if mode == "min":
        return a if a <= b else b
    raise ValueError(f"unknown addition mode {mode!r}; expected one of {_ADD_MODES}")


def trop_mul(a: Scalar, b: Scalar, mode: str = "max_completed") -> Scalar:
    if mode not in _MUL_MODES:
        raise ValueError(f"unknown multiplication mode {mode!r}; expected one of {_MUL_MODES}")
    zero = NEG_INF if mode == "max_completed" else POS_INF
    if a == zero or b == zero:
        return zero
    return a + b


def neg(a: Scalar) -> Scalar:
    """Order-reversing isomorphism between Zmax and Zmin."""
    return -a


def parse_scalar(token: object) -> Scalar:
    """Read a serialized scalar: an integer or one of ``-inf``, ``+inf``."""
    if isinstance(token, str):
        text = token.strip().lower()
        if text in ("-inf", "-infinity"):
            return NEG_INF
        if text in ("+inf", "inf", "+infinity", "infinity"):
            return POS_INF
        try:
            return int(text)
        except ValueError:
            raise ValueError(f"bad scalar token {token!r}") from None
    return check_scalar(token)


def format_scalar(value: Scalar) -> Union[int, str]:
    """Inverse of :func:`parse_scalar`; finite values stay integers."""
    if value == NEG_INF:
        return "-inf"
    if value == POS_INF:
        return "+inf"
    return int(value)
