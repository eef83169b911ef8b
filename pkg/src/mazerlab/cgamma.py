"""Complex gamma function via the Lanczos approximation.

The scattering amplitudes of the smooth (sech-squared) coupling profile are
ratios of gamma functions of complex argument, so a dependable Gamma(w) on
the complex plane is required.  The Lanczos series with g = 7, n = 9 gives
13-14 significant digits on the right half plane; the reflection formula
extends it to Re(w) < 1/2.
"""

from __future__ import annotations

import numpy as np

__all__ = ["complex_gamma", "GammaPoleError"]

# Godfrey/Pugh coefficients for g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_P = (
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

_SQRT_2PI = 2.5066282746310002


class GammaPoleError(ValueError):
    """Raised when Gamma is evaluated at a non-positive integer."""


def _lanczos_right(w):
    """Lanczos sum for Re(w) >= 0.5 (vectorized, complex input)."""
    z = w - 1.0
    acc = np.full_like(z, _LANCZOS_P[0])
    for i, p in enumerate(_LANCZOS_P[1:], start=1):
        acc = acc + p / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _SQRT_2PI * t ** (z + 0.5) * np.exp(-t) * acc


def _sinpi(w):
    """sin(pi*w) with argument reduction, accurate near the real integers.

    Plain np.sin(pi*w) loses ~7 digits within 1e-9 of a zero because pi*w is
    rounded before the sine; reducing Re(w) modulo 1 first keeps the relative
    error at machine level, which the reflection formula needs near poles.
    """
    x = np.real(w)
    n = np.round(x)
    r = (x - n) + 1j * np.imag(w)
    sign = np.where(np.mod(n, 2.0) == 0.0, 1.0, -1.0)
    return sign * np.sin(np.pi * r)


def complex_gamma(w):
    """Gamma function for complex scalar or array argument.

    Uses the Lanczos approximation on Re(w) >= 1/2 and the reflection
    formula Gamma(w)Gamma(1-w) = pi/sin(pi*w) elsewhere.

    Raises
    ------
    GammaPoleError
        If any element of ``w`` is a non-positive integer (a pole).
    """
    w_arr = np.asarray(w, dtype=complex)
    poles = (w_arr.real <= 0) & (w_arr.imag == 0) & (w_arr.real == np.floor(w_arr.real))
    if np.any(poles):
        raise GammaPoleError(f"gamma pole at non-positive integer argument {w_arr[poles].flat[0]}")

    left = w_arr.real < 0.5
    # Evaluate the Lanczos sum at a pole-free argument everywhere, then patch
    # the reflected region.  np.where on the raw value would still evaluate
    # the series at the left-plane points, which is harmless but wasteful.
    safe = np.where(left, 1.0 - w_arr, w_arr)
    g_right = _lanczos_right(safe)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        reflected = np.pi / (_sinpi(w_arr) * g_right)
    out = np.where(left, reflected, g_right)
    if np.isscalar(w) or np.ndim(w) == 0:
        return complex(out)
    return out
