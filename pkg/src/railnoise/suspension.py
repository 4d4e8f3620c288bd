"""Driven response of the rail on its two spring/damper supports.

For support motions x_minus(omega), x_plus(omega) the neutral line is

    X(z, omega) = a sin(kz) + b cos(kz) + c sinh(kz) + d cosh(kz)

with torque-free ends fixing c and d in terms of a and b, and the end
force balance giving a 2x2 complex system for (a, b).  The Fourier
convention is x(t) = Re[x(omega) exp(-i omega t)], so a damper contributes
-i mu omega to the end impedance.

All functions broadcast over ``omega`` (scalars or numpy arrays).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beam import RailSpec
from .errors import DomainError, ResonanceSingularityError, UnsupportedConfigurationError

# |det| below this fraction of its term-magnitude bound counts as singular.
_SINGULAR_RTOL = 1e-12
_SERIES_SWITCH = 0.1
_HYPERBOLIC_SWITCH = 20.0


@dataclass(frozen=True)
class SuspensionEnd:
    stiffness: float  # N/m
    damping: float = 0.0  # kg/s

    def __post_init__(self):
        for name in ("stiffness", "damping"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise DomainError(f"{name} must be finite and >= 0, got {value!r}")

    @property
    def is_free(self):
        return self.stiffness == 0 and self.damping == 0


@dataclass(frozen=True)
class SuspensionSpec:
    """Supports at z = -L (``minus_end``) and z = +L (``plus_end``).

    ``mass_override`` replaces rho A L as the mass parameter of the
    suspension ratio R and of the pendular formulas.
    """

    minus_end: SuspensionEnd
    plus_end: SuspensionEnd
    mass_override: float | None = None

    def __post_init__(self):
        if self.mass_override is not None and not (
            math.isfinite(self.mass_override) and self.mass_override > 0
        ):
            raise DomainError(f"mass_override must be > 0, got {self.mass_override!r}")

    @classmethod
    def symmetric(cls, stiffness, damping=0.0, mass_override=None):
        end = SuspensionEnd(stiffness, damping)
        return cls(end, end, mass_override)

    @classmethod
    def from_pendular(cls, rail: RailSpec, nu_osc_hz, q_osc, mass_override=None):
        """Identical ends tuned to a pendular frequency and quality factor."""
        if not (nu_osc_hz > 0 and q_osc > 0):
            raise DomainError("nu_osc_hz and q_osc must be > 0")
        m = rail.half_mass if mass_override is None else mass_override
        w = 2.0 * math.pi * nu_osc_hz
        return cls.symmetric(m * w**2, m * w / q_osc, mass_override)

    @property
    def is_symmetric(self):
        return self.minus_end == self.plus_end

    def mass(self, rail: RailSpec):
        return rail.half_mass if self.mass_override is None else self.mass_override


@dataclass(frozen=True)
class BoundaryCoefficients:
    """Scaled (alpha, beta, gamma) per end, ordered (minus, plus).

    These are the coefficients of ``alpha a + eps beta b = eps gamma x_eps``
    divided by cosh(kL) sinh(kL), so they stay finite for any kL.
    """

    alpha: tuple
    beta: tuple
    gamma: tuple
    # Upper bounds on |alpha|, |beta| from their individual terms.
    alpha_scale: tuple
    beta_scale: tuple


@dataclass(frozen=True)
class ResponseAmplitudes:
    kappa: np.ndarray | float
    a: np.ndarray | complex
    b: np.ndarray | complex
    c: np.ndarray | complex
    d: np.ndarray | complex
    half_length: float

    @property
    def kappa_L(self):
        return self.kappa * self.half_length


@dataclass(frozen=True)
class PendularModes:
    omega_osc: float
    omega_rot: float
    q_osc: float
    q_rot: float

    @property
    def nu_osc(self):
        return self.omega_osc / (2.0 * math.pi)

    @property
    def nu_rot(self):
        return self.omega_rot / (2.0 * math.pi)


def _as_omega(omega):
    w = np.asarray(omega, dtype=float)
    if np.any(~(w > 0)):
        raise DomainError("omega must be > 0")
    return w


def _kappa(rail, w):
    return (rail.linear_density * w**2 / rail.flexural_rigidity) ** 0.25


def _inv_sinh(x):
    return 2.0 * np.exp(-x) / -np.expm1(-2.0 * x)


def _sech(x):
    return 2.0 * np.exp(-x) / (1.0 + np.exp(-2.0 * x))


def _coth(x):
    return 1.0 / np.tanh(x)


def _sin_coth_minus_cos(x):
    """sin(x) coth(x) - cos(x), accurate as x -> 0."""
    x = np.asarray(x, dtype=float)
    small = x < _SERIES_SWITCH
    xs = np.where(small, x, 0.0)
    x2 = xs * xs
    series = x2 * (2 / 3 + x2 * (-1 / 9 + x2 * (37 / 3780 + x2 * (-19 / 22680 + x2 * 797 / 9979200))))
    xl = np.where(small, 1.0, x)
    direct = np.sin(xl) / np.tanh(xl) - np.cos(xl)
    return np.where(small, series, direct)


def inverse_ratio_R(end: SuspensionEnd, mass, omega):
    """1/R = (K - i mu omega) / (mass omega^2); zero for a free end."""
    w = _as_omega(omega)
    return (end.stiffness - 1j * end.damping * w) / (mass * w**2)


def ratio_R(end: SuspensionEnd, mass, omega):
    """R = mass omega^2 / (K - i mu omega).

    A free end (K = mu = 0) gives complex infinity; callers work with
    :func:`inverse_ratio_R` which is zero there.
    """
    if not mass > 0:
        raise DomainError(f"mass must be > 0, got {mass!r}")
    w = _as_omega(omega)
    if end.is_free:
        return np.full(w.shape, complex(math.inf, 0.0))[()]
    return mass * w**2 / (end.stiffness - 1j * end.damping * w)


def boundary_coefficients(rail: RailSpec, suspension: SuspensionSpec, omega) -> BoundaryCoefficients:
    w = _as_omega(omega)
    x = _kappa(rail, w) * rail.half_length
    m = suspension.mass(rail)
    s, co, th = np.sin(x), np.cos(x), np.tanh(x)
    odd_free = _sin_coth_minus_cos(x)
    even_free = s + co * th
    alphas, betas, gammas, a_scales, b_scales = [], [], [], [], []
    for end in (suspension.minus_end, suspension.plus_end):
        inv_r = inverse_ratio_R(end, m, w)
        alphas.append(odd_free - 2.0 * x * s * inv_r)
        betas.append(even_free - 2.0 * x * co * inv_r)
        gammas.append(-x * inv_r)
        a_scales.append(np.abs(odd_free) + np.abs(2.0 * x * s * inv_r))
        b_scales.append(np.abs(s) + np.abs(co * th) + np.abs(2.0 * x * co * inv_r))
    return BoundaryCoefficients(
        alpha=tuple(alphas),
        beta=tuple(betas),
        gamma=tuple(gammas),
        alpha_scale=tuple(a_scales),
        beta_scale=tuple(b_scales),
    )


def solve_amplitudes(rail: RailSpec, suspension: SuspensionSpec, omega, x_minus, x_plus) -> ResponseAmplitudes:
    """Solve the boundary system for the amplitudes a, b, c, d.

    Raises
    ------
    ResonanceSingularityError
        If the system is singular to working precision, i.e. ``omega`` sits
        on an undamped resonance.  Supply damping to probe near poles.
    """
    w = _as_omega(omega)
    coeffs = boundary_coefficients(rail, suspension, w)
    (al_m, al_p), (be_m, be_p), (ga_m, ga_p) = coeffs.alpha, coeffs.beta, coeffs.gamma
    x_m = np.asarray(x_minus, dtype=complex)
    x_p = np.asarray(x_plus, dtype=complex)

    # alpha+ a + beta+ b = gamma+ x+ ;  alpha- a - beta- b = -gamma- x-
    det = -(al_p * be_m + al_m * be_p)
    det_scale = (
        coeffs.alpha_scale[1] * coeffs.beta_scale[0] + coeffs.alpha_scale[0] * coeffs.beta_scale[1]
    )
    singular = np.abs(det) <= _SINGULAR_RTOL * det_scale
    if np.any(singular):
        nu = float(np.broadcast_to(w, singular.shape)[singular].flat[0]) / (2.0 * math.pi)
        raise ResonanceSingularityError(
            f"boundary system singular at {nu:.9g} Hz (undamped resonance); add damping",
            frequency_hz=nu,
        )
    a = (-ga_p * be_m * x_p + be_p * ga_m * x_m) / det
    b = (-al_p * ga_m * x_m - ga_p * al_m * x_p) / det

    kappa = _kappa(rail, w)
    x = kappa * rail.half_length
    c = a * np.sin(x) * _inv_sinh(x)
    d = b * np.cos(x) * _sech(x)
    return ResponseAmplitudes(
        kappa=kappa[()], a=a[()], b=b[()], c=c[()], d=d[()], half_length=rail.half_length
    )


def _sinh_ratio(u, v):
    """sinh(u)/sinh(v) for |u| <= v, without overflow."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    big = v > _HYPERBOLIC_SWITCH
    vs = np.where(big, 1.0, v)
    direct = np.sinh(np.where(big, 0.0, u)) / np.sinh(vs)
    au = np.abs(u)
    scaled = np.sign(u) * np.exp(au - v) * np.expm1(-2.0 * au) / np.expm1(-2.0 * np.where(big, v, 1.0))
    return np.where(big, scaled, direct)


def _cosh_ratio(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    big = v > _HYPERBOLIC_SWITCH
    direct = np.cosh(np.where(big, 0.0, u)) / np.cosh(np.where(big, 0.0, v))
    au = np.abs(u)
    scaled = np.exp(au - v) * (1.0 + np.exp(-2.0 * au)) / (1.0 + np.exp(-2.0 * v))
    return np.where(big, scaled, direct)


def shape(amplitudes: ResponseAmplitudes, z, derivative=0):
    """Neutral-line displacement X(z, omega), or its z-derivative of order
    ``derivative`` (0 to 3).  ``z`` must lie on the rail, |z| <= L.
    """
    L = amplitudes.half_length
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) > L * (1 + 1e-12)):
        raise DomainError(f"z must satisfy |z| <= {L}")
    if derivative not in (0, 1, 2, 3):
        raise DomainError("derivative order must be 0, 1, 2 or 3")
    k = np.asarray(amplitudes.kappa, dtype=float)
    x = k * L
    u = k * z
    phase = derivative * math.pi / 2.0
    trig_odd = np.sin(u + phase)
    trig_even = np.cos(u + phase)
    if derivative % 2 == 0:
        hyp_odd = _sinh_ratio(u, x)
        hyp_even = _cosh_ratio(u, x)
    else:
        # d/dz sinh -> cosh, d/dz cosh -> sinh; ratios keep the original denominators
        hyp_odd = _cosh_ratio(u, x) * _coth(x)
        hyp_even = _sinh_ratio(u, x) / _coth(x)
    a, b = amplitudes.a, amplitudes.b
    value = a * (trig_odd + np.sin(x) * hyp_odd) + b * (trig_even + np.cos(x) * hyp_even)
    return (value * k**derivative)[()]


def amplitudes_lowfreq(rail: RailSpec, suspension: SuspensionSpec, omega, x_minus, x_plus):
    """Leading-order (a, b) for kL << 1 and identical ends.

    Closed-form diagnostic used to cross-check :func:`solve_amplitudes`:
    a = (x+ - x-) / (4 kL) * 3 / (3 - R),  b = (x+ + x-) / (4 (1 - R)).
    """
    if not suspension.is_symmetric:
        raise UnsupportedConfigurationError("low-frequency amplitudes need identical ends")
    w = _as_omega(omega)
    x = _kappa(rail, w) * rail.half_length
    if np.any(x >= 0.3):
        raise UnsupportedConfigurationError("low-frequency amplitudes need kL < 0.3")
    R = ratio_R(suspension.plus_end, suspension.mass(rail), w)
    x_m = np.asarray(x_minus, dtype=complex)
    x_p = np.asarray(x_plus, dtype=complex)
    a = (x_p - x_m) / (4.0 * x) * 3.0 / (3.0 - R)
    b = (x_p + x_m) / (4.0 * (1.0 - R))
    return a[()], b[()]


def pendular_modes(rail: RailSpec, suspension: SuspensionSpec) -> PendularModes:
    """In-phase and rotational rigid-body resonances of the suspended rail.

    Only defined for identical ends: with K- != K+ the two resonances mix.
    Q factors are infinite when the ends are undamped.
    """
    if not suspension.is_symmetric:
        raise UnsupportedConfigurationError(
            "pendular modes need identical ends; with different ends the "
            "translational and rotational resonances are mixed"
        )
    end = suspension.plus_end
    if end.stiffness <= 0:
        raise DomainError("pendular modes need a positive stiffness")
    m = suspension.mass(rail)
    w_osc = math.sqrt(end.stiffness / m)
    w_rot = w_osc * math.sqrt(3.0)
    if end.damping > 0:
        q_osc, q_rot = m * w_osc / end.damping, m * w_rot / (3.0 * end.damping)
    else:
        q_osc = q_rot = math.inf
    return PendularModes(w_osc, w_rot, q_osc, q_rot)


def end_force_residual(rail: RailSpec, suspension: SuspensionSpec, omega, amplitudes, x_minus, x_plus):
    """Relative mismatch between elastic end force and suspension force.

    Returns an array of shape (2, ...) for the (minus, plus) ends.  With a
    mass override the end impedance is rescaled by rho A L / mass, which is
    what using that mass in R amounts to.
    """
    w = _as_omega(omega)
    L = rail.half_length
    EI = rail.flexural_rigidity
    mass_scale = rail.half_mass / suspension.mass(rail)
    out = []
    for eps, end, x_e in ((-1.0, suspension.minus_end, x_minus), (1.0, suspension.plus_end, x_plus)):
        elastic = -eps * EI * shape(amplitudes, eps * L, derivative=3)
        rel = shape(amplitudes, eps * L) - np.asarray(x_e, dtype=complex)
        support = -(end.stiffness - 1j * end.damping * w) * mass_scale * rel
        scale = np.abs(elastic) + np.abs(support) + np.abs(EI * amplitudes.kappa**3 * (np.abs(amplitudes.a) + np.abs(amplitudes.b)))
        out.append(np.abs(elastic - support) / scale)
    return np.array(out)
