"""Static uniform and logarithmic quantizers.

Both maps work elementwise on scalars or arrays.  The uniform quantizer is
the midpoint lattice ``delta * (floor(x / delta) + 1/2)``, which is offset
at zero; the logarithmic quantizer applies the same lattice to ``ln|x|``
and is odd.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Family",
    "QuantizerSpec",
    "quantize_uniform",
    "quantize_log",
    "quantize_uniform_scalar",
    "quantize_log_scalar",
    "quantize_vector",
    "LOG_DELTA_U_MAX",
]

# above this interval e^{d/2} - 1 exceeds 1 - e^{-d} and the relative bound fails
LOG_DELTA_U_MAX = 0.9


class Family(str, Enum):
    NONE = "none"
    UNIFORM = "uniform"
    LOGARITHMIC = "logarithmic"


def quantize_uniform(x, delta_u: float):
    """Midpoint uniform quantizer; ``|q - x| <= delta_u / 2``."""
    return delta_u * (np.floor(np.divide(x, delta_u)) + 0.5)


def quantize_log(x, delta_u: float):
    """Logarithmic quantizer ``sign(x) * exp(q_u(ln|x|))`` with ``q(0) = 0``.

    ``delta_u`` is the lattice spacing in the log domain.
    """
    with np.errstate(divide="ignore"):
        mag = np.exp(quantize_uniform(np.log(np.abs(x)), delta_u))
    # ln 0 = -inf propagates to exp(-inf) = 0, so zero maps to zero
    return np.sign(x) * mag


# both maps are elementwise, so the scalar forms are the same functions
quantize_uniform_scalar = quantize_uniform
quantize_log_scalar = quantize_log


@dataclass(frozen=True)
class QuantizerSpec:
    """Quantizer family and interval.

    ``delta_l`` is derived: ``1 - exp(-delta_u)`` for the logarithmic family
    and 0 otherwise.
    """

    family: Family = Family.NONE
    delta_u: float = 0.0

    def __post_init__(self):
        try:
            fam = Family(self.family)
        except ValueError:
            raise ValueError(f"family: unknown quantizer family {self.family!r}") from None
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "delta_u", float(self.delta_u))
        if fam is not Family.NONE and not (self.delta_u > 0 and math.isfinite(self.delta_u)):
            raise ValueError(f"delta_u: must be a positive finite number, got {self.delta_u}")
        if fam is Family.LOGARITHMIC and self.delta_u > LOG_DELTA_U_MAX:
            raise ValueError(
                f"delta_u: logarithmic family requires delta_u <= {LOG_DELTA_U_MAX}, got {self.delta_u}"
            )

    @classmethod
    def none(cls) -> "QuantizerSpec":
        return cls(Family.NONE, 0.0)

    @classmethod
    def uniform(cls, delta_u: float) -> "QuantizerSpec":
        return cls(Family.UNIFORM, delta_u)

    @classmethod
    def logarithmic(cls, delta_u: float) -> "QuantizerSpec":
        return cls(Family.LOGARITHMIC, delta_u)

    @classmethod
    def logarithmic_from_delta_l(cls, delta_l: float) -> "QuantizerSpec":
        return cls(Family.LOGARITHMIC, -math.log1p(-delta_l))

    @property
    def delta_l(self) -> float:
        if self.family is Family.LOGARITHMIC:
            return -math.expm1(-self.delta_u)
        return 0.0

    @property
    def code(self) -> int:
        """Integer tag used by the compiled simulation kernel."""
        return {Family.NONE: 0, Family.UNIFORM: 1, Family.LOGARITHMIC: 2}[self.family]

    def __call__(self, v):
        return quantize_vector(v, self)

    def error_bound(self, v) -> float:
        """Certified bound on ``|Q(v) - v|_2``.

        Uniform: ``sqrt(dim) * delta_u``; logarithmic: ``delta_l * |v|_2``.
        """
        v = np.asarray(v, dtype=float)
        if self.family is Family.UNIFORM:
            return math.sqrt(v.size) * self.delta_u
        if self.family is Family.LOGARITHMIC:
            return self.delta_l * float(np.linalg.norm(v))
        return 0.0


def quantize_vector(v, spec: QuantizerSpec) -> np.ndarray:
    """Apply the quantizer of ``spec`` componentwise."""
    v = np.asarray(v, dtype=float)
    if spec.family is Family.UNIFORM:
        return quantize_uniform(v, spec.delta_u)
    if spec.family is Family.LOGARITHMIC:
        return quantize_log(v, spec.delta_u)
    return v.copy()
