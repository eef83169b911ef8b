"""Shared physical model: mode profiles, dressed-state geometry, photon statistics.

Natural units hbar = m = 1 throughout.  A two-level atom crosses a cavity
mode with position-dependent coupling lambda(z); within the manifold of n
excitations the internal 2x2 block is

    M(z) = [[ delta/2,          lambda(z)*sqrt(n+1) ],
            [ lambda(z)*sqrt(n+1),         -delta/2 ]]

in the basis (|n,e>, |n+1,g>).  Its eigenvectors are the dressed states,
its eigenvalues the adiabatic potentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ModeProfile",
    "MezaProfile",
    "SechProfile",
    "GaussianProfile",
    "CustomProfile",
    "ManifoldParams",
    "PhotonDistribution",
    "eval_profile",
    "mixing_angle",
    "adiabatic_potentials",
    "photon_weights",
    "DegenerateDressingError",
]


class DegenerateDressingError(ValueError):
    """Dressed basis undefined: coupling and detuning both vanish."""


# ---------------------------------------------------------------------------
# Mode profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MezaProfile:
    """Top-hat coupling: lambda0 on 0 < z < length, zero elsewhere."""

    lambda0: float
    length: float

    def __post_init__(self):
        if self.lambda0 < 0:
            raise ValueError("coupling lambda0 must be >= 0")
        if self.length <= 0:
            raise ValueError("meza length must be > 0")

    def value(self, z):
        z = np.asarray(z, dtype=float)
        out = np.where((z > 0.0) & (z < self.length), self.lambda0, 0.0)
        return out if out.ndim else float(out)

    @property
    def peak(self) -> float:
        return self.lambda0

    @property
    def length_scale(self) -> float:
        return self.length


@dataclass(frozen=True)
class SechProfile:
    """Smooth coupling lambda0 * sech^2(z / waist)."""

    lambda0: float
    waist: float

    def __post_init__(self):
        if self.lambda0 < 0:
            raise ValueError("coupling lambda0 must be >= 0")
        if self.waist <= 0:
            raise ValueError("waist must be > 0")

    def value(self, z):
        z = np.asarray(z, dtype=float)
        out = self.lambda0 / np.cosh(z / self.waist) ** 2
        return out if out.ndim else float(out)

    @property
    def peak(self) -> float:
        return self.lambda0

    @property
    def length_scale(self) -> float:
        return self.waist


@dataclass(frozen=True)
class GaussianProfile:
    """Fabry-Perot style coupling lambda0 * exp(-z^2 / waist^2)."""

    lambda0: float
    waist: float

    def __post_init__(self):
        if self.lambda0 < 0:
            raise ValueError("coupling lambda0 must be >= 0")
        if self.waist <= 0:
            raise ValueError("waist must be > 0")

    def value(self, z):
        z = np.asarray(z, dtype=float)
        out = self.lambda0 * np.exp(-(z / self.waist) ** 2)
        return out if out.ndim else float(out)

    @property
    def peak(self) -> float:
        return self.lambda0

    @property
    def length_scale(self) -> float:
        return self.waist


@dataclass(frozen=True)
class CustomProfile:
    """Tabulated coupling, linearly interpolated, zero outside the samples."""

    z_samples: tuple[float, ...]
    coupling_samples: tuple[float, ...]

    def __post_init__(self):
        zs = np.asarray(self.z_samples, dtype=float)
        cs = np.asarray(self.coupling_samples, dtype=float)
        if zs.size != cs.size or zs.size < 2:
            raise ValueError("need matching coupling samples at >= 2 positions")
        if not (np.all(np.isfinite(zs)) and np.all(np.isfinite(cs))):
            raise ValueError("profile samples must be finite")
        if np.any(np.diff(zs) <= 0):
            raise ValueError("sample positions must be strictly ascending")
        if np.any(cs < 0):
            raise ValueError("couplings must be >= 0")
        object.__setattr__(self, "z_samples", tuple(zs))
        object.__setattr__(self, "coupling_samples", tuple(cs))

    def value(self, z):
        z = np.asarray(z, dtype=float)
        out = np.interp(z, self.z_samples, self.coupling_samples, left=0.0, right=0.0)
        return out if out.ndim else float(out)

    @property
    def peak(self) -> float:
        return max(self.coupling_samples)

    @property
    def length_scale(self) -> float:
        # finest tabulated feature; resolution rules key off this
        return 8.0 * float(np.min(np.diff(self.z_samples)))


ModeProfile = MezaProfile | SechProfile | GaussianProfile | CustomProfile


def eval_profile(profile: ModeProfile, z):
    """Coupling strength lambda(z); accepts scalars or arrays."""
    return profile.value(z)


# ---------------------------------------------------------------------------
# Dressed-state geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ManifoldParams:
    """One excitation manifold: photon number n, detuning, and the profile.

    The effective coupling within the manifold is lambda(z) * sqrt(n+1);
    n = 0 is the vacuum manifold.
    """

    profile: ModeProfile
    n: int = 0
    delta: float = 0.0

    def __post_init__(self):
        if self.n < 0 or self.n != int(self.n):
            raise ValueError("photon number n must be a non-negative integer")

    def coupling(self, z):
        return eval_profile(self.profile, z) * math.sqrt(self.n + 1)


def mixing_angle(lam, n: int, delta: float):
    """Dressed-state mixing angle theta with tan(2 theta) = 2 lam sqrt(n+1) / delta.

    Returns theta in [0, pi/2); theta = pi/4 on resonance (delta = 0) and
    theta -> 0 in the far blue-detuned limit.  Raises DegenerateDressingError
    for lam = delta = 0 where the dressed basis is undefined.
    """
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr < 0):
        raise ValueError("coupling must be >= 0")
    g = lam_arr * math.sqrt(n + 1)
    if np.any((g == 0) & (delta == 0)):
        raise DegenerateDressingError("mixing angle undefined for lambda = delta = 0")
    theta = 0.5 * np.arctan2(2.0 * g, delta)
    return theta if theta.ndim else float(theta)


def adiabatic_potentials(profile: ModeProfile, n: int, delta: float, z):
    """Adiabatic potential pair (V+, V-) at position z.

    V+- = +- sqrt((delta/2)^2 + lambda(z)^2 (n+1)); the two channels are
    mirror images, V+ = -V-.
    """
    lam = np.asarray(eval_profile(profile, z), dtype=float)
    v = np.sqrt((delta / 2.0) ** 2 + lam**2 * (n + 1))
    if v.ndim:
        return v, -v
    return float(v), -float(v)


# ---------------------------------------------------------------------------
# Photon statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhotonDistribution:
    """Truncated photon-number weights |c_n|^2, renormalized to sum to 1."""

    numbers: tuple[int, ...]
    weights: tuple[float, ...]
    kind: str = "custom"
    mean: float = field(default=0.0)
    truncation: float = 0.0

    def __post_init__(self):
        if len(self.numbers) != len(self.weights) or not self.numbers:
            raise ValueError("need matching photon numbers and weights")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0):
            raise ValueError("weights must be >= 0")
        object.__setattr__(self, "weights", tuple(w / w.sum()))

    def __iter__(self):
        return iter(zip(self.numbers, self.weights))


def photon_weights(kind: str, n0: float, eps: float = 1e-10) -> PhotonDistribution:
    """Photon-number distribution of the initial cavity field.

    kind = "vacuum" puts all weight on n = 0; "coherent" uses the Poisson
    weights n0^n e^{-n0} / n!; "thermal" the geometric weights
    n0^n / (n0+1)^{n+1}.  The series is cut at the smallest N whose
    cumulative mass reaches 1 - eps and renormalized.
    """
    if n0 < 0:
        raise ValueError("mean photon number must be >= 0")
    if not 0 < eps < 1:
        raise ValueError("truncation eps must lie in (0, 1)")

    if kind == "vacuum" or n0 == 0:
        if kind not in ("vacuum", "coherent", "thermal"):
            raise ValueError(f"unknown photon distribution kind {kind!r}")
        return PhotonDistribution((0,), (1.0,), kind=kind, mean=0.0, truncation=eps)

    weights = []
    if kind == "coherent":
        w = math.exp(-n0)
        ratio = lambda n: n0 / n
    elif kind == "thermal":
        w = 1.0 / (n0 + 1.0)
        ratio = lambda n: n0 / (n0 + 1.0)
    else:
        raise ValueError(f"unknown photon distribution kind {kind!r}")

    total = 0.0
    n = 0
    while total < 1.0 - eps:
        weights.append(w)
        total += w
        n += 1
        w *= ratio(n)
    return PhotonDistribution(tuple(range(len(weights))), tuple(weights),
                              kind=kind, mean=n0, truncation=eps)
