from config import DEFAULT_TRUNCATION_TOLERANCE
from .logdomain import (
    LogComplex, SignedLogReal, normalize_angle,
    term_log, truncation_index,
    signed_log_re_g, signed_log_re_g_grid, signed_log_less,
    zg_over_g, zg_over_g_grid, exponent_derivatives, LN2
)
from .catalog import (
    EntireFunctionSpec, PaperExample, Exp, Sinc, Polynomial,
    FunctionValue, eval_fn, function_from_text, format_complex
)


def g_derivatives(z: complex, tol_log: float = DEFAULT_TRUNCATION_TOLERANCE):
    """Scalar g, g', g'' of the example, plus the overflow flag."""
    g, first, second, overflow = exponent_derivatives(complex(z), tol_log)
    return complex(g), complex(first), complex(second), bool(overflow)
