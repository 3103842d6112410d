"""The analytic kernel family I_z(s) = 2^{-z/2} / Gamma(z/2) |s|^{z-1}.

Only the function regime Re(z) > 0 is evaluated directly.  At the
Re(z) = -n endpoint the kernel enters through its Fourier transform, which
is an ordinary power of ``|lambda|``; :func:`l2_endpoint_constancy` checks
that side.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .convolution import lp_norm, oscillatory_factor, partial_fourier_t, twisted_convolve
from .grid import GridFunction
from .group import DegenerateMatrixError, det_perturbed, is_nondegenerate, phi
from .measures import eta_profile

__all__ = [
    "gamma_fn",
    "riesz_kernel",
    "riesz_fourier",
    "CalibrationResult",
    "QuadratureError",
    "calibrate_c",
    "endpoint_sup_kernel",
    "endpoint_sup_bound",
    "EndpointConstancy",
    "l2_endpoint_constancy",
    "approximate_identity_error",
]

# g = 7, 9-term Lanczos coefficients
_LANCZOS_G = 7
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


class QuadratureError(RuntimeError):
    """Numerical Fourier calibration did not settle to a single constant."""


def gamma_fn(z: complex) -> complex:
    """Gamma function by the Lanczos approximation, reflected for Re(z) < 1/2."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise ValueError(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma_fn(1 - z))
    z -= 1
    x = _LANCZOS_COEF[0]
    for i in range(1, _LANCZOS_G + 2):
        x += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * x


def _normalizer(z: complex) -> complex:
    return 2 ** (-z / 2) / gamma_fn(z / 2)


def riesz_kernel(z: complex, s):
    """I_z(s) for Re(z) > 0 and s != 0 (scalar or array)."""
    z = complex(z)
    if z.real <= 0:
        raise ValueError("direct evaluation needs Re(z) > 0")
    s = np.asarray(s, dtype=float)
    if np.any(s == 0):
        raise ValueError("I_z is not evaluated at s = 0")
    out = _normalizer(z) * np.abs(s) ** (z - 1)
    return out if out.ndim else complex(out)


def riesz_fourier(z: complex, xi: float, radius: float) -> complex:
    """Fourier transform at ``xi`` of I_z(s) * psi(|s| / radius).

    ``psi`` is the smooth radial cutoff.  The integrand is even, so this is
    2 * int_0^{2R} I_z(s) psi(s/R) cos(xi s) ds.  The |s|^{Re z - 1} endpoint
    singularity on [0, 1] goes to QUADPACK's algebraic-weight rule and the
    oscillatory tail to its cosine-weight rule.
    """
    z = complex(z)
    a = z.real - 1.0
    b = z.imag

    def smooth(s, part):
        v = eta_profile(s / radius) * (cmath.exp(1j * b * math.log(s)) if b and s > 0 else 1.0)
        return v.real if part == 0 else v.imag

    total = 0j
    parts = (0, 1) if b else (0,)
    for part in parts:
        with warnings.catch_warnings():
            # tolerances sit at roundoff on purpose; QUADPACK says so loudly
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            near, _ = integrate.quad(lambda s: smooth(s, part) * math.cos(xi * s), 0.0, 1.0,
                                     weight="alg", wvar=(a, 0.0), epsabs=1e-14, epsrel=1e-12, limit=200)
            far, _ = integrate.quad(lambda s: s**a * smooth(s, part), 1.0, 2.0 * radius,
                                    weight="cos", wvar=xi, epsabs=1e-14, epsrel=1e-12, limit=400)
        total += (near + far) * (1j if part else 1.0)
    return 2.0 * _normalizer(z) * total


@dataclass
class CalibrationResult:
    c: complex
    spread: float
    imag_rel: float
    truncation: float
    ratios: np.ndarray

    @property
    def c_real(self) -> float:
        return self.c.real


def calibrate_c(z_samples, xis=(1.0, 2.0, 4.0, 8.0), radii=(20.0, 40.0),
                max_spread: float = 1e-2) -> CalibrationResult:
    """Fit the constant c in (I_z)^ = c I_{1-z} over a set of z and frequencies.

    The cutoff perturbs the transform by roughly exp(-sqrt(R xi)), so the
    frequencies should keep R * xi >= 20.  ``truncation`` is the largest
    relative change between the two cutoff radii; ``spread`` the largest
    relative deviation of any ratio from the fitted c.  Raises :class:`QuadratureError` when spread exceeds
    ``max_spread``.
    """
    ratios = []
    trunc = 0.0
    for z in z_samples:
        z = complex(z)
        if not 0 < z.real < 1:
            raise ValueError("calibration needs 0 < Re(z) < 1")
        for xi in xis:
            vals = [riesz_fourier(z, xi, R) for R in radii]
            trunc = max(trunc, max(abs(v - vals[-1]) / abs(vals[-1]) for v in vals))
            ratios.append(vals[-1] / riesz_kernel(1 - z, xi))
    ratios = np.array(ratios)
    c = complex(np.mean(ratios))
    spread = float(np.max(np.abs(ratios - c)) / abs(c))
    imag_rel = float(np.max(np.abs(ratios.imag) / np.abs(ratios)))
    if spread > max_spread:
        raise QuadratureError(f"ratio spread {spread:.3g} exceeds {max_spread:g}")
    return CalibrationResult(c, spread, imag_rel, trunc, ratios)


def endpoint_sup_kernel(A, b: float, x, t: float) -> complex:
    """(mu_A * U_{1+ib})(x, t) = I_{1+ib}(t - phi(x)), defined off the graph."""
    s = t - phi(A, x)
    if s == 0:
        raise ValueError("the endpoint kernel is not evaluated on the graph t = phi(x)")
    return riesz_kernel(1 + 1j * b, s)


def endpoint_sup_bound(b: float) -> float:
    """|2^{-(1+ib)/2} / Gamma((1+ib)/2)|, the L^1 -> L^inf bound on Re(z) = 1."""
    return abs(_normalizer(1 + 1j * b))


@dataclass
class EndpointConstancy:
    lambdas: np.ndarray
    ratios: np.ndarray
    predicted: float
    spread: float
    max_deviation: float


def l2_endpoint_constancy(f: GridFunction, A, lambdas) -> EndpointConstancy:
    """|lam|^n ||f^lam x_lam e_{lam A}||_2 / ||f^lam||_2 across ``lambdas``.

    The Fourier side of I_{-n+ib} grows like |lam|^n, so L^2 boundedness on
    Re(z) = -n is the statement that these ratios do not depend on lam.
    ``spread`` is the largest relative deviation from their mean and
    ``max_deviation`` the largest relative gap to (2 pi)^n |det(2A+J)|^-1/2.
    """
    if not is_nondegenerate(A):
        raise DegenerateMatrixError("det(2A + J) = 0: the L2 endpoint bound does not apply")
    n = f.grid.n
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(lambdas == 0):
        raise ValueError("lambda must be nonzero")
    out = []
    for lam in lambdas:
        fl = partial_fourier_t(f, lam)
        denom = lp_norm(fl, 2)
        if denom == 0:
            raise ValueError(f"f^lambda vanishes at lambda = {lam}")
        tw = twisted_convolve(fl, oscillatory_factor(A, lam, f.grid), lam)
        out.append(abs(lam) ** n * lp_norm(tw, 2) / denom)
    out = np.array(out)
    predicted = (2 * np.pi) ** n * abs(det_perturbed(A, +1)) ** -0.5
    mean = out.mean()
    return EndpointConstancy(lambdas, out, predicted, float(np.max(np.abs(out - mean)) / mean),
                             float(np.max(np.abs(out - predicted)) / predicted))


def approximate_identity_error(eps: float, test_fn=None) -> float:
    """|int I_eps(s) psi(s) ds - psi(0)| for a smooth compactly supported psi.

    Shrinks as eps -> 0 (I_0 is the Dirac mass).  Default psi is the radial
    cutoff profile on [-2, 2].
    """
    psi = eta_profile if test_fn is None else test_fn
    if eps <= 0:
        raise ValueError("eps must be positive")
    val, _ = integrate.quad(lambda s: psi(s), 0.0, 2.0, weight="alg", wvar=(eps - 1.0, 0.0),
                            epsabs=1e-14, epsrel=1e-12, limit=200)
    total = 2.0 * _normalizer(eps).real * val
    return abs(total - float(psi(0.0)))
