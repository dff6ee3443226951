"""Special functions and adaptive quadrature shared by the analytic engines."""
import logging
from typing import Callable

import numpy as np
from scipy import integrate as _quadpack
from scipy import special

from sgcov.core.errors import ParameterError, QuadratureError, require
from sgcov.models.run_config import QuadratureSpec

logger = logging.getLogger(__name__)

DEFAULT_QUADRATURE = QuadratureSpec()


def _spec(spec: QuadratureSpec | None) -> QuadratureSpec:
    return DEFAULT_QUADRATURE if spec is None else spec


def _require_alpha(alpha: float) -> None:
    require(np.isfinite(alpha) and alpha > 2, "path-loss exponent must be > 2", "alpha")


# -- unit helpers ------------------------------------------------------------


def db_to_linear(value_db):
    value = np.power(10.0, np.asarray(value_db, dtype=float) / 10.0)
    return float(value) if value.ndim == 0 else value


def linear_to_db(value):
    value = np.asarray(value, dtype=float)
    require(bool(np.all(value >= 0)), "linear value must be non-negative", "value")
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(value)
    return float(out) if out.ndim == 0 else out


# -- quadrature --------------------------------------------------------------


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float = np.inf,
    spec: QuadratureSpec | None = None,
    level: str | None = None,
) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod integration of ``f`` over [a, b].

    A semi-infinite domain [a, inf) is mapped to [0, 1) with
    u = a + t / (1 - t). The integrand must vanish at infinity.

    Args:
        f: Scalar integrand.
        a: Lower limit, finite.
        b: Upper limit, finite or ``inf``.
        spec: Tolerances and subdivision limit.
        level: Label attached to a failure when integrals are nested.

    Returns:
        ``(value, error_estimate)``.

    Raises:
        QuadratureError: If the tolerance is not reached within the
            subdivision limit. The best estimate travels with the error.
    """
    spec = _spec(spec)
    require(np.isfinite(a), "lower limit must be finite", "a")
    require(not np.isnan(b) and b >= a, "upper limit must not be below the lower limit", "b")
    if b == a:
        return 0.0, 0.0

    if np.isinf(b):
        def g(t: float) -> float:
            if t >= 1.0:
                return 0.0
            s = 1.0 - t
            return f(a + t / s) / (s * s)

        lo, hi = 0.0, 1.0
    else:
        g, lo, hi = f, a, b

    result = _quadpack.quad(
        g,
        lo,
        hi,
        epsabs=spec.epsabs,
        epsrel=spec.epsrel,
        limit=spec.max_subdivisions,
        full_output=1,
    )
    value, error = float(result[0]), float(result[1])
    if len(result) > 3 or not np.isfinite(value):
        message = result[3] if len(result) > 3 else "non-finite integral"
        logger.debug(f"quadrature failed on [{a}, {b}]: {message}")
        raise QuadratureError(
            f"integration over [{a}, {b}] did not converge: {message}".strip(),
            estimate=value,
            error=error,
            level=level,
        )
    return value, error


# -- special functions -------------------------------------------------------


def q_function(x):
    """Standard Gaussian tail probability Q(x)."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ParameterError("Q-function argument must be finite", field="x")
    value = special.ndtr(-x)
    return float(value) if value.ndim == 0 else value


def zeta_alpha(alpha: float) -> float:
    """(2 pi^2 / alpha) csc(2 pi / alpha)."""
    _require_alpha(alpha)
    return float(2.0 * np.pi**2 / alpha / np.sin(2.0 * np.pi / alpha))


def tail_integral(z: float, alpha: float, spec: QuadratureSpec | None = None) -> float:
    """Integral of 1 / (1 + u^(alpha/2)) over [z, inf), by quadrature.

    Exact at alpha = 4: pi/2 - arctan(z).
    """
    _require_alpha(alpha)
    require(z >= 0, "lower limit must be non-negative", "z")
    if alpha == 4:
        return float(np.pi / 2 - np.arctan(z))
    half = alpha / 2.0
    value, _ = integrate(lambda u: 1.0 / (1.0 + u**half), float(z), spec=spec, level="tail")
    return value


def tail_integral_hyp(z, alpha: float):
    """Vectorised closed form of ``tail_integral`` via the Gauss hypergeometric function.

    For z > 1 the tail is summed as a series in z^(-alpha/2); below that the
    head over [0, z] is subtracted from the full integral.
    """
    _require_alpha(alpha)
    z = np.asarray(z, dtype=float)
    require(bool(np.all(z >= 0)), "lower limit must be non-negative", "z")
    if alpha == 4:
        out = np.pi / 2 - np.arctan(z)
        return float(out) if out.ndim == 0 else out

    m = alpha / 2.0
    whole = (np.pi / m) / np.sin(np.pi / m)
    far = z > 1.0
    z_far = np.where(far, z, 2.0)
    z_near = np.where(far, 0.0, z)
    with np.errstate(over="ignore"):
        tail = z_far ** (1.0 - m) / (m - 1.0) * special.hyp2f1(
            1.0, 1.0 - 1.0 / m, 2.0 - 1.0 / m, -(z_far ** (-m))
        )
    head = z_near * special.hyp2f1(1.0, 1.0 / m, 1.0 + 1.0 / m, -(z_near**m))
    out = np.where(far, tail, whole - head)
    return float(out) if out.ndim == 0 else out


def rho(tau: float, alpha: float, spec: QuadratureSpec | None = None) -> float:
    """tau^(2/alpha) times the tail integral from tau^(-2/alpha).

    Exact at alpha = 4: sqrt(tau) * arctan(sqrt(tau)).
    """
    _require_alpha(alpha)
    require(np.isfinite(tau) and tau >= 0, "threshold must be finite and non-negative", "tau")
    if tau == 0:
        return 0.0
    if alpha == 4:
        root = np.sqrt(tau)
        return float(root * np.arctan(root))
    scale = tau ** (2.0 / alpha)
    return scale * tail_integral(1.0 / scale, alpha, spec)


def gauss_exp_integral(a: float, b: float) -> float:
    """Integral of exp(-a x - b x^2) over [0, inf).

    Uses the scaled complementary error function so that the exp * Q product
    never overflows; tends to 1/a for large a.
    """
    require(b > 0, "quadratic coefficient must be positive", "b")
    require(a >= 0, "linear coefficient must be non-negative", "a")
    root = np.sqrt(b)
    return float(0.5 * np.sqrt(np.pi) / root * special.erfcx(a / (2.0 * root)))


def exp_power_integral(
    a: float, b: float, alpha: float, spec: QuadratureSpec | None = None
) -> float:
    """Integral of exp(-a w - b w^(alpha/2)) over [0, inf).

    The kernel shared by the downlink and HetNet coverage expressions once
    distances are normalised. ``b = 0`` gives 1/a; ``alpha = 4`` goes through
    ``gauss_exp_integral``.
    """
    _require_alpha(alpha)
    require(a >= 0 and b >= 0, "coefficients must be non-negative", "a")
    require(a > 0 or b > 0, "integral diverges when both coefficients vanish", "a")
    if b == 0:
        return 1.0 / a
    if alpha == 4:
        return gauss_exp_integral(a, b)
    half = alpha / 2.0
    # Put the decay scale at w ~ 1 so the mapped integrand is not a spike.
    scale = b ** (-1.0 / half)
    if a > 0:
        scale = min(scale, 1.0 / a)
    ca, cb = a * scale, b * scale**half
    value, _ = integrate(lambda w: np.exp(-ca * w - cb * w**half), 0.0, spec=spec, level="kernel")
    return scale * value
