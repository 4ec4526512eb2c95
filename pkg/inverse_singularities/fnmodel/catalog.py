from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np
from numpy.polynomial import polynomial

from config import DEFAULT_TRUNCATION_TOLERANCE
from .logdomain import exponent_derivatives
from ..errors import PreconditionError


# moduli beyond this are reported as overflow
OVERFLOW_MODULUS = 1e300

# |z| up to which all terms of the example are <= 16 in modulus
PAPER_EXAMPLE_PLAIN_RADIUS = 8


class FunctionValue(NamedTuple):
    value: complex
    derivative: complex
    overflow: bool


class EntireFunctionSpec(ABC):
    """An entire function with vectorized access to f, f' and f''."""

    omitted_values: Tuple[complex, ...] = ()

    @abstractmethod
    def values(self, z):
        """Return (f(z), f'(z)) for a scalar or an array."""

    @abstractmethod
    def second_derivative(self, z):
        pass

    @property
    def name(self):
        return type(self).__name__

    def omits(self, a: complex) -> bool:
        return any(a == value for value in self.omitted_values)

    def __call__(self, z):
        return self.values(z)[0]


@dataclass(frozen=True)
class Exp(EntireFunctionSpec):
    omitted_values = (0,)

    def values(self, z):
        with np.errstate(over='ignore', invalid='ignore'):
            value = np.exp(z)
        return value, value

    def second_derivative(self, z):
        with np.errstate(over='ignore', invalid='ignore'):
            return np.exp(z)


@dataclass(frozen=True)
class Sinc(EntireFunctionSpec):
    """sin(z) / z extended by 1 at the origin."""

    series_radius: float = 1e-2

    def _split(self, z):
        z = np.asarray(z, dtype=complex)
        near = np.abs(z) < self.series_radius
        return z, near, np.where(near, 1, z)

    def values(self, z):
        z, near, safe = self._split(z)
        z2 = z * z
        with np.errstate(over='ignore', invalid='ignore'):
            sin, cos = np.sin(safe), np.cos(safe)
            value = np.where(near, 1 - z2 / 6 + z2 * z2 / 120 - z2 ** 3 / 5040, sin / safe)
            derivative = np.where(
                near,
                z * (-1 / 3 + z2 / 30 - z2 * z2 / 840),
                (safe * cos - sin) / safe ** 2
            )
        return value, derivative

    def second_derivative(self, z):
        z, near, safe = self._split(z)
        z2 = z * z
        with np.errstate(over='ignore', invalid='ignore'):
            sin, cos = np.sin(safe), np.cos(safe)
            return np.where(
                near,
                -1 / 3 + z2 / 10 - z2 * z2 / 168,
                (2 * sin - 2 * safe * cos - safe ** 2 * sin) / safe ** 3
            )


@dataclass(frozen=True)
class Polynomial(EntireFunctionSpec):
    """Coefficients ordered from the constant term upwards."""

    coefficients: Tuple[complex, ...]

    def __post_init__(self):
        coefficients = tuple(complex(c) for c in self.coefficients)
        if len(coefficients) < 2:
            raise ValueError('A polynomial needs degree >= 1')
        if coefficients[-1] == 0:
            raise ValueError('Leading coefficient has to be nonzero')
        object.__setattr__(self, 'coefficients', coefficients)

    @property
    def degree(self):
        return len(self.coefficients) - 1

    @property
    def name(self):
        return 'Polynomial[' + ','.join(format_complex(c) for c in self.coefficients) + ']'

    def values(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(over='ignore', invalid='ignore'):
            return (
                polynomial.polyval(z, self.coefficients),
                polynomial.polyval(z, polynomial.polyder(self.coefficients))
            )

    def second_derivative(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(over='ignore', invalid='ignore'):
            return polynomial.polyval(z, polynomial.polyder(self.coefficients, 2))


@dataclass(frozen=True)
class PaperExample(EntireFunctionSpec):
    """f = exp(g) with g(z) = sum over k >= 1 of (z / 2^k)^(2^k)."""

    truncation_tolerance: float = DEFAULT_TRUNCATION_TOLERANCE
    omitted_values = (0,)

    def exponent(self, z):
        """g, g', g'' and the overflow mask, see `exponent_derivatives`."""
        return exponent_derivatives(z, self.truncation_tolerance)

    def values(self, z):
        g, first, _, _ = self.exponent(z)
        with np.errstate(over='ignore', invalid='ignore'):
            value = np.exp(g)
            return value, first * value

    def second_derivative(self, z):
        g, first, second, _ = self.exponent(z)
        with np.errstate(over='ignore', invalid='ignore'):
            return (second + first ** 2) * np.exp(g)


def format_complex(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return f'{c.real:g}'
    return f'{c.real:g}{c.imag:+g}j'


def function_from_text(text: str) -> EntireFunctionSpec:
    """Parse 'example', 'exp', 'sinc' or 'poly:c0,c1,...' (constant term first)."""
    name, _, arguments = text.strip().partition(':')
    name = name.lower()
    if name == 'example':
        if arguments:
            return PaperExample(truncation_tolerance=float(arguments))
        return PaperExample()
    if name == 'exp':
        return Exp()
    if name == 'sinc':
        return Sinc()
    if name in {'poly', 'polynomial'}:
        try:
            coefficients = [complex(c.replace(' ', '')) for c in arguments.split(',')]
        except ValueError as error:
            raise ValueError(f'Could not parse polynomial coefficients "{arguments}"') from error
        return Polynomial(tuple(coefficients))
    raise ValueError(f'Unknown function "{text}"; use example, exp, sinc or poly:c0,c1,...')


def eval_fn(spec: EntireFunctionSpec, z: complex) -> FunctionValue:
    """f(z) and f'(z) in the plain (linear) domain."""
    if isinstance(spec, PaperExample) and abs(z) > PAPER_EXAMPLE_PLAIN_RADIUS:
        raise PreconditionError(
            f'Plain evaluation of the example is limited to |z| <= {PAPER_EXAMPLE_PLAIN_RADIUS}, got |z| = {abs(z):.4g};'
            ' use signed_log_re_g or zg_over_g instead'
        )
    value, derivative = spec.values(complex(z))
    value, derivative = complex(value), complex(derivative)
    overflow = not all(
        np.isfinite(x) and abs(x) <= OVERFLOW_MODULUS
        for x in (value, derivative)
    )
    return FunctionValue(value, derivative, overflow)
