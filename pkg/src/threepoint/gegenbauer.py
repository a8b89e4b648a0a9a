"""Normalized Gegenbauer polynomials P_m^h on S^{h-1}.

P_m^h is the degree-m Gegenbauer polynomial with parameter (h - 2) / 2,
scaled so that P_m^h(1) = 1. With this normalization the standard
three-term recurrence becomes

    P_0 = 1,  P_1 = x,
    P_{k+1} = ((2k + h - 2) x P_k - k P_{k-1}) / (k + h - 2),   k >= 1,

which stays finite for h = 2 (Chebyshev polynomials of the first kind).
Everything accepts scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Union

import numpy as np

from src.threepoint.data import INNER_PRODUCT_SLACK
from src.threepoint.errors import DomainError

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class GegenbauerParams:
    """Degree m and sphere parameter h of P_m^h (polynomial on S^{h-1})."""

    degree: int
    sphere_param: int

    def __post_init__(self) -> None:
        validate_params(self.degree, self.sphere_param)


def validate_params(m: int, h: int) -> None:
    if m < 0:
        raise DomainError(f"Gegenbauer degree must be nonnegative, got {m}")
    if h < 2:
        raise DomainError(f"Gegenbauer sphere parameter must be at least 2, got {h}")


def _check_argument(x: ArrayLike) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(arr) > 1.0 + INNER_PRODUCT_SLACK) or not np.all(np.isfinite(arr)):
        raise DomainError("Gegenbauer argument outside [-1, 1]")
    return arr


def recurrence_step(k: int, h: int) -> tuple[float, float]:
    """Coefficients (a, b) with P_{k+1} = a x P_k - b P_{k-1}, for k >= 1."""
    denom = k + h - 2
    return (2 * k + h - 2) / denom, k / denom


def gegenbauer_all(mmax: int, h: int, x: ArrayLike) -> List[ArrayLike]:
    """[P_0^h(x), ..., P_mmax^h(x)] from a single recurrence pass.

    Raises:
        DomainError: h < 2, mmax < 0, or x outside [-1, 1]

    Example:
        >>> gegenbauer_all(2, 3, 0.0)
        [1.0, 0.0, -0.5]
    """
    validate_params(mmax, h)
    arr = _check_argument(x)
    values = [np.ones_like(arr)]
    if mmax >= 1:
        values.append(arr.copy())
    for k in range(1, mmax):
        a, b = recurrence_step(k, h)
        values.append(a * arr * values[k] - b * values[k - 1])
    if arr.ndim == 0:
        return [float(v) for v in values]
    return values


def gegenbauer_eval(m: int, h: int, x: ArrayLike) -> ArrayLike:
    """P_m^h(x), normalized so that P_m^h(1) = 1.

    Args:
        m: degree, m >= 0
        h: dimension parameter, h >= 2
        x: scalar or array in [-1, 1]

    Returns:
        same shape as `x`

    Example:
        >>> gegenbauer_eval(2, 4, 0.5)   # (4 * 0.25 - 1) / 3
        0.0
    """
    return gegenbauer_all(m, h, x)[m]
