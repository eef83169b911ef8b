"""Closed-form dressed scattering amplitudes and coefficient-level observables.

At zero detuning the two dressed channels decouple and each scatters off a
real potential +-lambda(z) sqrt(n+1).  For the top-hat (meza) and the
sech^2 profile the stationary problem is solvable in closed form; both
solutions are expressed through the channel wavenumbers

    kappa   = sqrt(2 lambda0),
    kappa_n = kappa (n+1)^{1/4},
    k_n^+-  = sqrt(k^2 -+ kappa_n^2),

with the repulsive (+) channel continued to positive-imaginary k_n^+ below
the barrier.  Amplitudes follow the convention psi = e^{ikz} + rho e^{-ikz}
on the incoming side and tau e^{ikz} beyond the profile, so the free limit
is tau = 1, rho = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cgamma import complex_gamma

__all__ = [
    "ChannelWavenumbers",
    "DressedCoefficients",
    "BareCoefficients",
    "channel_wavenumbers",
    "meza_dressed",
    "sech_dressed",
    "bare_from_dressed",
    "transmission_probability",
    "reflection_probability",
    "entropy",
    "meza_resonance_lengths",
    "sech_resonance_lengths",
]

_POP_TOL = 1e-9  # tolerated unitarity defect before entropy refuses


@dataclass(frozen=True)
class ChannelWavenumbers:
    """Asymptotic and in-profile momenta of one excitation manifold."""

    k: float | np.ndarray
    k_plus: complex | np.ndarray
    k_minus: complex | np.ndarray
    kappa: float
    kappa_n: float


@dataclass(frozen=True)
class DressedCoefficients:
    """Reflection/transmission amplitudes of the two dressed channels."""

    rho_plus: complex | np.ndarray
    rho_minus: complex | np.ndarray
    tau_plus: complex | np.ndarray
    tau_minus: complex | np.ndarray


@dataclass(frozen=True)
class BareCoefficients:
    """Amplitudes in the bare basis (atom excited/ground, reflected/transmitted)."""

    r_e: complex | np.ndarray
    r_g: complex | np.ndarray
    t_e: complex | np.ndarray
    t_g: complex | np.ndarray


def channel_wavenumbers(k, n: int, lambda0: float) -> ChannelWavenumbers:
    """Channel momenta for incident momentum k in manifold n.

    k_minus = sqrt(k^2 + kappa_n^2) is always real; k_plus is real above the
    barrier and positive-imaginary below it (principal branch).
    """
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise ValueError("incident momentum must be > 0")
    kappa = math.sqrt(2.0 * lambda0)
    kappa_n = kappa * (n + 1) ** 0.25
    k_plus = np.sqrt(k.astype(complex) ** 2 - kappa_n**2)
    k_minus = np.sqrt(k.astype(complex) ** 2 + kappa_n**2)
    if k.ndim:
        return ChannelWavenumbers(k, k_plus, k_minus, kappa, kappa_n)
    return ChannelWavenumbers(float(k), complex(k_plus), complex(k_minus), kappa, kappa_n)


def _sinc_c(w):
    """sin(w)/w for complex w, series-continued through w = 0."""
    w = np.asarray(w, dtype=complex)
    small = np.abs(w) < 1e-4
    safe = np.where(small, 1.0, w)
    out = np.where(small, 1.0 - w**2 / 6.0 + w**4 / 120.0, np.sin(safe) / safe)
    return out


def _meza_channel(k, kn, length):
    """Square барrier/well amplitudes for one dressed channel.

    tau = e^{-ikL} [cos(kn L) - i Sigma sin(kn L)]^{-1},
    rho = i Delta sin(kn L) tau,
    with Sigma/Delta = (kn/k +- k/kn)/2.  The products Sigma*sin and
    Delta*sin are assembled from k*L*sinc(kn L) so the kn -> 0 limit
    (incidence exactly at the barrier top) stays finite.
    """
    k = np.asarray(k, dtype=complex)
    half_ratio = 0.5 * (kn / k) * np.sin(kn * length)
    half_inv = 0.5 * k * length * _sinc_c(kn * length)
    sigma_sin = half_ratio + half_inv
    delta_sin = half_ratio - half_inv
    tau = np.exp(-1j * k * length) / (np.cos(kn * length) - 1j * sigma_sin)
    rho = 1j * delta_sin * tau
    return rho, tau


def meza_dressed(k, n: int, lambda0: float, length: float) -> DressedCoefficients:
    """Dressed amplitudes for the top-hat profile of the given length.

    Vectorized over k.  Both channels are unitary, |rho|^2 + |tau|^2 = 1,
    for any real incident momentum.
    """
    if length <= 0:
        raise ValueError("meza length must be > 0")
    ch = channel_wavenumbers(k, n, lambda0)
    rho_p, tau_p = _meza_channel(ch.k, ch.k_plus, length)
    rho_m, tau_m = _meza_channel(ch.k, ch.k_minus, length)
    return DressedCoefficients(rho_p, rho_m, tau_p, tau_m)


def _sech_channel(kL, xi):
    """Poschl-Teller amplitudes for one dressed channel.

    tau = Gamma(1/2 - i(kL+xi)) Gamma(1/2 - i(kL-xi)) / [Gamma(-ikL) Gamma(1-ikL)]

    The reflected amplitude is tau times Gamma(ikL)Gamma(1-ikL) /
    [Gamma(1/2+i xi)Gamma(1/2-i xi)]; both gamma pairs are reflection pairs,
    so the ratio collapses exactly to -i cosh(pi xi)/sinh(pi kL).  Using the
    collapsed form keeps rho finite-and-tiny at the reflectionless points,
    where the gamma in the denominator sits on a pole.
    """
    kL = np.asarray(kL, dtype=complex)
    tau = (
        complex_gamma(0.5 - 1j * (kL + xi))
        * complex_gamma(0.5 - 1j * (kL - xi))
        / (complex_gamma(-1j * kL) * complex_gamma(1.0 - 1j * kL))
    )
    rho = -1j * np.cosh(np.pi * xi) / np.sinh(np.pi * kL) * tau
    return rho, tau


def sech_dressed(k, n: int, lambda0: float, waist: float) -> DressedCoefficients:
    """Dressed amplitudes for the sech^2 profile (zero detuning only).

    The channel parameter xi_n^+- = sqrt(+-2 lambda0 waist^2 sqrt(n+1) - 1/4)
    takes the positive-imaginary branch for negative radicand.  Vectorized
    over k.
    """
    if waist <= 0:
        raise ValueError("waist must be > 0")
    if lambda0 < 0:
        raise ValueError("coupling lambda0 must be >= 0")
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise ValueError("incident momentum must be > 0")
    depth = 2.0 * lambda0 * waist**2 * math.sqrt(n + 1)
    xi_p = np.sqrt(complex(depth - 0.25))
    xi_m = np.sqrt(complex(-depth - 0.25))
    kL = k * waist
    rho_p, tau_p = _sech_channel(kL, xi_p)
    rho_m, tau_m = _sech_channel(kL, xi_m)
    if k.ndim:
        return DressedCoefficients(rho_p, rho_m, tau_p, tau_m)
    return DressedCoefficients(complex(rho_p), complex(rho_m),
                               complex(tau_p), complex(tau_m))


def bare_from_dressed(d: DressedCoefficients) -> BareCoefficients:
    """Rotate dressed amplitudes to the bare basis (atom launched excited).

    R_e = (rho+ + rho-)/2, R_g = (rho+ - rho-)/2 and likewise for T.
    """
    return BareCoefficients(
        r_e=(d.rho_plus + d.rho_minus) / 2.0,
        r_g=(d.rho_plus - d.rho_minus) / 2.0,
        t_e=(d.tau_plus + d.tau_minus) / 2.0,
        t_g=(d.tau_plus - d.tau_minus) / 2.0,
    )


def transmission_probability(b: BareCoefficients):
    """P_trans = |T_e|^2 + |T_g|^2."""
    return np.abs(b.t_e) ** 2 + np.abs(b.t_g) ** 2


def reflection_probability(b: BareCoefficients):
    """P_refl = |R_e|^2 + |R_g|^2."""
    return np.abs(b.r_e) ** 2 + np.abs(b.r_g) ** 2


def _binary_entropy(p):
    p = np.asarray(p, dtype=float)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        s = -np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        s -= np.where(q > 0, q * np.log2(np.where(q > 0, q, 1.0)), 0.0)
    return s


def entropy(b: BareCoefficients):
    """Atom-field entanglement entropy (base 2) of the scattered state.

    Computed from the channel populations P_e = |R_e|^2 + |T_e|^2 and
    P_g = 1 - P_e.  A unitarity defect up to 1e-9 is renormalized away;
    anything larger points at a bug in the coefficients and raises.
    """
    p_e = np.abs(b.r_e) ** 2 + np.abs(b.t_e) ** 2
    p_g = np.abs(b.r_g) ** 2 + np.abs(b.t_g) ** 2
    total = p_e + p_g
    if np.any(np.abs(total - 1.0) > _POP_TOL):
        worst = float(np.max(np.abs(total - 1.0)))
        raise ValueError(f"populations violate unitarity by {worst:.3e}")
    s = _binary_entropy(p_e / total)
    return s if s.ndim else float(s)


def meza_resonance_lengths(n: int, lambda0: float, m_max: int) -> np.ndarray:
    """Tunneling resonance lengths of the top-hat profile, L = m pi / kappa_n."""
    if lambda0 <= 0:
        raise ValueError("resonances need lambda0 > 0")
    kappa_n = math.sqrt(2.0 * lambda0) * (n + 1) ** 0.25
    return np.arange(1, m_max + 1) * math.pi / kappa_n


def sech_resonance_lengths(n: int, lambda0: float, m_max: int) -> np.ndarray:
    """Reflectionless waists of the sech^2 profile, kappa_n L = sqrt(m(m+1))."""
    if lambda0 <= 0:
        raise ValueError("resonances need lambda0 > 0")
    kappa_n = math.sqrt(2.0 * lambda0) * (n + 1) ** 0.25
    m = np.arange(1, m_max + 1, dtype=float)
    return np.sqrt(m * (m + 1.0)) / kappa_n
