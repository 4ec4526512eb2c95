"""Log-domain evaluation of g(z) = sum_k (z / 2^k)^(2^k), the exponent of f = exp(g).

Moduli of the individual terms reach exp(2^(2^n)) on the level-n annulus,
so every quantity is carried as a logarithm and only normalized sums
(largest term scaled to one) are formed in the linear domain.
"""
import cmath
from dataclasses import dataclass
from functools import total_ordering
from math import inf, log, pi, remainder, exp

import numpy as np

from config import DEFAULT_TRUNCATION_TOLERANCE
from ..errors import DegenerateError, DivisionDegenerateError, PreconditionError


LN2 = log(2)

# normalized sums below this carry no reliable sign
DEGENERATE_CUTOFF = 1e-15
DIVISION_CUTOFF = 1e-12

# exp() of larger log-moduli (times the derivative weights) leaves the double range
OVERFLOW_LOG = 680.0


def normalize_angle(theta: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    reduced = remainder(theta, 2 * pi)
    if reduced <= -pi:
        return pi
    return reduced


@dataclass(frozen=True)
class LogComplex:
    """A complex number stored as (log of modulus, argument)."""

    log_magnitude: float
    argument: float = 0.0

    def __post_init__(self):
        if self.log_magnitude == -inf:
            if self.argument != 0:
                raise ValueError('Zero must be stored with argument 0')
        elif not -pi < self.argument <= pi:
            raise ValueError(f'Argument {self.argument} outside of (-pi, pi]')

    @classmethod
    def zero(cls):
        return cls(-inf, 0.0)

    @classmethod
    def from_complex(cls, z: complex):
        if z == 0:
            return cls.zero()
        return cls(log(abs(z)), normalize_angle(cmath.phase(z)))

    @property
    def is_zero(self):
        return self.log_magnitude == -inf

    def __mul__(self, other: 'LogComplex'):
        if self.is_zero or other.is_zero:
            return self.zero()
        return LogComplex(
            self.log_magnitude + other.log_magnitude,
            normalize_angle(self.argument + other.argument)
        )

    def __pow__(self, exponent: int):
        if self.is_zero:
            return self.zero()
        return LogComplex(exponent * self.log_magnitude, normalize_angle(exponent * self.argument))

    def to_complex(self) -> complex:
        """Linear-domain value; raises OverflowError beyond the double range."""
        if self.is_zero:
            return 0j
        return cmath.rect(exp(self.log_magnitude), self.argument)


@total_ordering
@dataclass(frozen=True, eq=False)
class SignedLogReal:
    """A real number stored as (sign, log of absolute value).

    Ordering is exact in sign and never forms the linear value,
    so thresholds like -2^(2^n) compare without overflow.
    """

    sign: int
    log_abs: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f'Sign has to be -1, 0 or 1, not {self.sign}')
        if (self.sign == 0) != (self.log_abs == -inf):
            raise ValueError('Zero is stored as (0, -inf) and only so')

    @classmethod
    def from_float(cls, x: float):
        if x == 0:
            return cls(0, -inf)
        return cls(1 if x > 0 else -1, log(abs(x)))

    @classmethod
    def power_tower(cls, n: int, sign: int = 1):
        """The threshold sign * 2^(2^n)."""
        return cls(sign, 2 ** n * LN2)

    def __float__(self):
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * exp(self.log_abs)
        except OverflowError:
            return self.sign * inf

    def __neg__(self):
        return SignedLogReal(-self.sign, self.log_abs)

    def __eq__(self, other):
        if not isinstance(other, SignedLogReal):
            return NotImplemented
        return self.sign == other.sign and (self.sign == 0 or self.log_abs == other.log_abs)

    def __lt__(self, other):
        if not isinstance(other, SignedLogReal):
            return NotImplemented
        if self.sign != other.sign:
            return self.sign < other.sign
        if self.sign == 0:
            return False
        if self.sign > 0:
            return self.log_abs < other.log_abs
        return self.log_abs > other.log_abs

    def __hash__(self):
        return hash((self.sign, self.log_abs if self.sign else None))

    def log_margin(self, threshold: 'SignedLogReal') -> float:
        """How far (in log_abs) this value lies beyond threshold, on the threshold's side.

        Negative infinity when the signs disagree.
        """
        if self.sign != threshold.sign or self.sign == 0:
            return -inf
        return self.log_abs - threshold.log_abs


def signed_log_less(signs, log_abs, threshold: SignedLogReal):
    """Vectorized `value < threshold` for values given as (signs, log_abs) arrays."""
    signs = np.asarray(signs)
    log_abs = np.asarray(log_abs)
    if threshold.sign > 0:
        return (signs <= 0) | (log_abs < threshold.log_abs)
    if threshold.sign == 0:
        return signs < 0
    return (signs < 0) & (log_abs > threshold.log_abs)


def _term_log_magnitude(k: int, modulus: float) -> float:
    if modulus == 0:
        return -inf
    return 2 ** k * (log(modulus) - k * LN2)


def term_log(k: int, z: complex) -> LogComplex:
    """log of the series term (z / 2^k)^(2^k)."""
    if z == 0:
        return LogComplex.zero()
    power = 2 ** k
    return LogComplex(_term_log_magnitude(k, abs(z)), normalize_angle(power * cmath.phase(z)))


def truncation_index(z: complex, tol_log: float = DEFAULT_TRUNCATION_TOLERANCE) -> int:
    """Number of leading series terms to sum at z.

    The first k past the dominant terms (2^k > 2|z|) whose log-modulus is
    already below tol_log; from there on the tail decays doubly exponentially.
    """
    if tol_log >= 0:
        raise PreconditionError(f'Truncation tolerance has to be negative (log-domain), got {tol_log}')
    modulus = abs(z)
    if modulus == 0:
        return 1
    k = 1
    while not (2 ** k > 2 * modulus and _term_log_magnitude(k, modulus) < tol_log):
        k += 1
    return k


def _term_arrays(z, count: int):
    """Powers 2^k, log-moduli and (unreduced) arguments of terms k = 1..count.

    The leading axis enumerates k, the remaining axes follow z.
    """
    z = np.asarray(z, dtype=complex)
    k = np.arange(1, count + 1).reshape((-1,) + (1,) * z.ndim)
    power = 2.0 ** k
    with np.errstate(divide='ignore'):
        log_modulus = np.log(np.abs(z))
    log_magnitude = power * (log_modulus - k * LN2)
    # multiplying by a power of two is exact, cos/exp reduce the angle themselves
    argument = power * np.angle(z)
    return power, log_magnitude, argument


def _grid_count(z, tol_log):
    z = np.asarray(z, dtype=complex)
    return truncation_index(float(np.abs(z).max()) if z.size else 0.0, tol_log)


def signed_log_re_g(z: complex, tol_log: float = DEFAULT_TRUNCATION_TOLERANCE) -> SignedLogReal:
    """Re g(z) in signed-log form."""
    if z == 0:
        return SignedLogReal(0, -inf)

    _, log_magnitude, argument = _term_arrays(z, truncation_index(z, tol_log))
    peak = log_magnitude.max()
    total = float((np.exp(log_magnitude - peak) * np.cos(argument)).sum())

    if abs(total) < DEGENERATE_CUTOFF:
        raise DegenerateError(f'Re g({z}) is numerically zero (normalized sum {total:.3g})')

    return SignedLogReal(1 if total > 0 else -1, peak + log(abs(total)))


def signed_log_re_g_grid(z, tol_log: float = DEFAULT_TRUNCATION_TOLERANCE):
    """Vectorized signed_log_re_g.

    Returns (signs, log_abs, degenerate); degenerate points get sign 0
    so that they never pass a strict comparison.
    """
    z = np.asarray(z, dtype=complex)
    _, log_magnitude, argument = _term_arrays(z, _grid_count(z, tol_log))

    with np.errstate(invalid='ignore', divide='ignore'):
        peak = log_magnitude.max(axis=0)
        nonzero = np.isfinite(peak)
        safe_peak = np.where(nonzero, peak, 0.0)
        total = (np.exp(log_magnitude - safe_peak) * np.cos(argument)).sum(axis=0)

        degenerate = nonzero & (np.abs(total) < DEGENERATE_CUTOFF)
        unsigned = degenerate | ~nonzero
        signs = np.where(unsigned, 0, np.sign(total)).astype(int)
        log_abs = np.where(unsigned, -inf, safe_peak + np.log(np.abs(total)))

    return signs, log_abs, degenerate


def zg_over_g(z: complex, tol_log: float = DEFAULT_TRUNCATION_TOLERANCE) -> complex:
    """The logarithmic derivative z g'(z) / g(z), a weighted mean of the exponents 2^k."""
    if z == 0:
        raise DivisionDegenerateError('g(0) = 0')

    power, log_magnitude, argument = _term_arrays(z, truncation_index(z, tol_log))
    weights = np.exp(log_magnitude - log_magnitude.max() + 1j * argument)
    denominator = weights.sum()

    if abs(denominator) < DIVISION_CUTOFF * np.abs(weights).sum():
        raise DivisionDegenerateError(f'g({z}) is numerically zero')

    return complex((power * weights).sum() / denominator)


def zg_over_g_grid(z, tol_log: float = DEFAULT_TRUNCATION_TOLERANCE):
    """Vectorized zg_over_g; returns (values, degenerate) with NaN at degenerate points."""
    z = np.asarray(z, dtype=complex)
    power, log_magnitude, argument = _term_arrays(z, _grid_count(z, tol_log))

    with np.errstate(invalid='ignore', divide='ignore'):
        peak = log_magnitude.max(axis=0)
        weights = np.exp(log_magnitude - peak + 1j * argument)
        denominator = weights.sum(axis=0)
        degenerate = ~np.isfinite(peak) | (np.abs(denominator) < DIVISION_CUTOFF * np.abs(weights).sum(axis=0))
        values = np.where(degenerate, np.nan, (power * weights).sum(axis=0) / denominator)

    return values, degenerate


def exponent_derivatives(z, tol_log: float = DEFAULT_TRUNCATION_TOLERANCE):
    """g, g' and g'' (vectorized); entries overflow to inf/nan beyond the double range."""
    z = np.asarray(z, dtype=complex)
    power, log_magnitude, argument = _term_arrays(z, _grid_count(z, tol_log))

    with np.errstate(all='ignore'):
        terms = np.exp(log_magnitude + 1j * argument)
        at_origin = z == 0
        safe_z = np.where(at_origin, 1, z)
        g = terms.sum(axis=0)
        # (z/2)^2 is the only term with a nonzero second derivative at the origin
        first = np.where(at_origin, 0, (power * terms).sum(axis=0) / safe_z)
        second = np.where(at_origin, 0.5, (power * (power - 1) * terms).sum(axis=0) / safe_z ** 2)
        overflow = log_magnitude.max(axis=0) > OVERFLOW_LOG

    return g, first, second, overflow
