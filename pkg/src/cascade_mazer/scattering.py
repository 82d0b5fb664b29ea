"""Scattering of a slow cascade atom crossing a two-mode cavity.

A three-level atom in a ladder configuration (a -> b1 -> b2) moves through
a cavity sustaining two field modes with flat (mesa) profiles.  Inside the
cavity the coupled atom-field states split into two dressed components that
see a barrier and a well of equal depth, plus one dark component that
crosses freely.  Everything here is dimensionless: the incoming wavenumber
k and the cavity length L are measured against the coupling wavenumber
kappa (kappa = 1 internally), couplings enter only through gamma = g2/g1,
and g1 = 1 fixes the energy unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CavityBeam",
    "ScatterInput",
    "DressedCoefficients",
    "BranchAmplitudes",
    "ScatterChannels",
    "GainProbabilities",
    "dressed_coefficients",
    "branch_wavenumbers",
    "branch_amplitudes",
    "scatter_channels",
    "gain_probabilities",
    "ultracold_approx",
]

# cosh overflows just above this; the stable path never forms cosh at all.
_COSH_ARG_MAX = 700.0


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


def _require_count(name: str, value) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")


@dataclass(frozen=True)
class CavityBeam:
    """Beam momentum and cavity geometry, photon numbers left open.

    k_ratio is k/kappa, kappa_l is kappa*L, gamma is g2/g1.
    """

    k_ratio: float
    kappa_l: float
    gamma: float

    def __post_init__(self):
        for name in ("k_ratio", "kappa_l", "gamma"):
            _require_finite(name, getattr(self, name))
        if self.k_ratio <= 0:
            raise ValueError(f"k_ratio must be > 0, got {self.k_ratio!r}")
        if self.kappa_l < 0:
            raise ValueError(f"kappa_l must be >= 0, got {self.kappa_l!r}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma!r}")

    def with_photons(self, n1: int, n2: int) -> "ScatterInput":
        return ScatterInput(self.k_ratio, self.kappa_l, self.gamma, n1, n2)


@dataclass(frozen=True)
class ScatterInput(CavityBeam):
    """One scattering event: beam, geometry and initial photon numbers."""

    n1: int
    n2: int

    def __post_init__(self):
        super().__post_init__()
        _require_count("n1", self.n1)
        _require_count("n2", self.n2)


@dataclass(frozen=True)
class DressedCoefficients:
    """Overlap of |a, n1, n2> with the dressed doublet (u) and dark state (v)."""

    u: float
    v: float
    omega_scaled: float


@dataclass(frozen=True)
class BranchAmplitudes:
    """Reflection/transmission amplitudes of the barrier (+) and well (-) branches."""

    rho_plus: complex
    tau_plus: complex
    rho_minus: complex
    tau_minus: complex


@dataclass(frozen=True)
class ScatterChannels:
    """Amplitudes for the six exit channels of the atom-field state.

    r_*/t_* are reflected/transmitted amplitudes for the atom leaving in
    |a> (photons unchanged), |b1> (one photon added to mode 1) or |b2>
    (one photon added to each mode).
    """

    r_a: complex
    t_a: complex
    r_b1: complex
    t_b1: complex
    r_b2: complex
    t_b2: complex


@dataclass(frozen=True)
class GainProbabilities:
    p_one: float
    p_two: float


def _omega_scaled(gamma, n1, n2):
    """Dressed splitting Omega/g1 = sqrt((n1+1) + gamma^2 (n2+1)); array-safe."""
    return np.sqrt((np.asarray(n1) + 1.0) + gamma * gamma * (np.asarray(n2) + 1.0))


def dressed_coefficients(inp: ScatterInput) -> DressedCoefficients:
    """Expansion coefficients of the incoming bare state over dressed states.

    u weights the scattered doublet, v the dark state; u^2 + v^2 = 1.
    """
    omega = float(_omega_scaled(inp.gamma, inp.n1, inp.n2))
    u = math.sqrt(inp.n1 + 1.0) / omega
    v = inp.gamma * math.sqrt(inp.n2 + 1.0) / omega
    return DressedCoefficients(u=u, v=v, omega_scaled=omega)


def branch_wavenumbers(inp: ScatterInput) -> tuple[complex, complex]:
    """Interior wavenumbers (k+, k-) of the barrier and well branches.

    (k+-/kappa)^2 = (k/kappa)^2 -+ Omega/g1.  k- is always real positive;
    k+ turns purely imaginary below the barrier (principal square root,
    positive imaginary part).
    """
    omega = float(_omega_scaled(inp.gamma, inp.n1, inp.n2))
    k2 = inp.k_ratio * inp.k_ratio
    w_plus = k2 - omega
    w_minus = k2 + omega
    if w_plus >= 0.0:
        k_plus = complex(math.sqrt(w_plus), 0.0)
    else:
        k_plus = complex(0.0, math.sqrt(-w_plus))
    return k_plus, complex(math.sqrt(w_minus), 0.0)


def _branch_ramp(w2, k: float, length: float):
    """rho, tau for a flat ramp of squared interior wavenumber w2 (array-safe).

    Everything is expressed through w2, so the two signs of the interior
    square root give identical amplitudes by construction.  For w2 < 0 the
    trig functions are rewritten with tanh/sech so arbitrarily large
    opacities kappa*L never overflow; tau underflows smoothly to exact 0.
    """
    w2 = np.asarray(w2, dtype=float)
    osc = w2 >= 0.0

    kb = np.sqrt(np.where(osc, w2, 0.0))
    q = np.sqrt(np.where(osc, 0.0, -w2))

    cos_term = np.where(osc, np.cos(kb * length), 1.0)
    qlen = q * length
    with np.errstate(divide="ignore", invalid="ignore"):
        sinh_ratio = np.where(q > 0.0, np.tanh(qlen) / np.where(q > 0.0, q, 1.0), length)
        # sin(kb L)/kb; the kb -> 0 barrier-top limit is L.  Dividing the
        # directly evaluated sine keeps the phase exact for huge kb*L.
        osc_ratio = np.where(
            kb > 0.0, np.sin(kb * length) / np.where(kb > 0.0, kb, 1.0), length
        )
    sin_ratio = np.where(osc, osc_ratio, sinh_ratio)
    # 2 e^-x / (1 + e^-2x) = sech(x); underflows to exact 0, never overflows.
    damp = np.where(osc, 1.0, 2.0 * np.exp(-qlen) / (1.0 + np.exp(-2.0 * qlen)))

    denom = cos_term - 0.5j * (w2 + k * k) / k * sin_ratio
    rho = 0.5j * (w2 - k * k) / k * sin_ratio / denom
    tau = np.exp(-1j * k * length) * damp / denom
    return rho, tau


def _branch_ramp_direct(w2: float, k: float, length: float):
    """Literal complex-trig evaluation of the same amplitudes (diagnostic).

    Kept for cross-checks against the stable form; refuses opacities where
    cosh/sinh of q*L overflow instead of returning garbage.
    """
    kb = complex(math.sqrt(w2), 0.0) if w2 >= 0 else complex(0.0, math.sqrt(-w2))
    if abs(kb.imag) * length > _COSH_ARG_MAX:
        raise OverflowError(
            f"kappa_l * q = {abs(kb.imag) * length:.3g} overflows the direct "
            "trigonometric form; use the stable evaluation"
        )
    if kb == 0:
        # barrier-top limit: sin(kb L)/kb -> L
        delta_sin = -0.5 * k * length
        sigma_sin = 0.5 * k * length
        cos_term = 1.0
    else:
        delta = 0.5 * (kb / k - k / kb)
        sigma = 0.5 * (kb / k + k / kb)
        delta_sin = delta * np.sin(kb * length)
        sigma_sin = sigma * np.sin(kb * length)
        cos_term = np.cos(kb * length)
    tau = np.exp(-1j * k * length) / (cos_term - 1j * sigma_sin)
    rho = 1j * delta_sin * np.exp(1j * k * length) * tau
    return complex(rho), complex(tau)


def branch_amplitudes(inp: ScatterInput, stable: bool = True) -> BranchAmplitudes:
    """Scattering amplitudes of the two dressed branches.

    The barrier branch (+) sees a repulsive ramp, the well branch (-) an
    attractive one of equal magnitude.  With stable=False the textbook
    complex-trig expressions are evaluated literally as a diagnostic; that
    path raises OverflowError deep in the tunneling regime.
    """
    omega = float(_omega_scaled(inp.gamma, inp.n1, inp.n2))
    k = inp.k_ratio
    k2 = k * k
    evaluate = _branch_ramp if stable else _branch_ramp_direct
    rho_p, tau_p = evaluate(k2 - omega, k, inp.kappa_l)
    rho_m, tau_m = evaluate(k2 + omega, k, inp.kappa_l)
    return BranchAmplitudes(
        rho_plus=complex(rho_p),
        tau_plus=complex(tau_p),
        rho_minus=complex(rho_m),
        tau_minus=complex(tau_m),
    )


def _channel_arrays(k: float, length: float, gamma: float, n1, n2):
    """Six channel amplitudes, vectorized over photon numbers."""
    omega = _omega_scaled(gamma, n1, n2)
    u = np.sqrt(np.asarray(n1) + 1.0) / omega
    v = gamma * np.sqrt(np.asarray(n2) + 1.0) / omega
    if length == 0.0:
        # zero-length cavity is the identity scatterer, bit-exactly
        zero = np.zeros(np.broadcast(u, v).shape, dtype=complex)
        return zero, np.ones_like(zero), zero, zero, zero, zero
    k2 = k * k
    rho_p, tau_p = _branch_ramp(k2 - omega, k, length)
    rho_m, tau_m = _branch_ramp(k2 + omega, k, length)

    rho_sum = 0.5 * (rho_p + rho_m)
    tau_sum = 0.5 * (tau_p + tau_m)
    rho_diff = 0.5 * (rho_p - rho_m)
    tau_diff = 0.5 * (tau_p - tau_m)

    r_a = u * u * rho_sum
    t_a = u * u * tau_sum + v * v
    r_b1 = u * rho_diff
    t_b1 = u * tau_diff
    r_b2 = u * v * rho_sum
    t_b2 = u * v * (tau_sum - 1.0)
    return r_a, t_a, r_b1, t_b1, r_b2, t_b2


def scatter_channels(inp: ScatterInput) -> ScatterChannels:
    """Exit-channel amplitudes for one scattering event.

    The dark state crosses the cavity freely; its overlap v^2 feeds the
    transmitted |a> channel and -uv the transmitted |b2> channel, which is
    what makes the two-photon emission survive in the ultracold limit.
    """
    amps = _channel_arrays(inp.k_ratio, inp.kappa_l, inp.gamma, inp.n1, inp.n2)
    return ScatterChannels(*(complex(a) for a in amps))


def gain_probabilities(inp: ScatterInput) -> GainProbabilities:
    """Probabilities of leaving one photon (a->b1) or a photon pair (a->b2)."""
    ch = scatter_channels(inp)
    p_one = abs(ch.r_b1) ** 2 + abs(ch.t_b1) ** 2
    p_two = abs(ch.r_b2) ** 2 + abs(ch.t_b2) ** 2
    return GainProbabilities(p_one=p_one, p_two=p_two)


def _gain_arrays(k: float, length: float, gamma: float, n1, n2):
    r_a, t_a, r_b1, t_b1, r_b2, t_b2 = _channel_arrays(k, length, gamma, n1, n2)
    p_one = np.abs(r_b1) ** 2 + np.abs(t_b1) ** 2
    p_two = np.abs(r_b2) ** 2 + np.abs(t_b2) ** 2
    return p_one, p_two


def ultracold_approx(gamma: float, n1: int, n2: int) -> GainProbabilities:
    """Emission probabilities in the limit of vanishing incoming energy.

    Both dressed branches then reflect with unit modulus and opposite-free
    phase, leaving p_one ~ 0 while the dark-state interference keeps
    p_two = 2 gamma^2 (n1+1)(n2+1) / ((n1+1) + gamma^2 (n2+1))^2 finite.
    """
    _require_finite("gamma", gamma)
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma!r}")
    _require_count("n1", n1)
    _require_count("n2", n2)
    a = n1 + 1.0
    b = gamma * gamma * (n2 + 1.0)
    return GainProbabilities(p_one=0.0, p_two=2.0 * a * b / (a + b) ** 2)
