"""Euler-Bernoulli model of the free rail.

Dispersion relation, free-free bending resonances and their Q factors.
Everything here is in SI units with angular frequencies in rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from scipy.optimize import brentq

from .errors import DomainError, SolverError

#: Rounded prefactor of the closed-form first bending frequency,
#: omega0 = OMEGA0_COEFF * sqrt(E I / (rho A L^4)).  Equals (kappa0 L)^2.
OMEGA0_COEFF = 5.593

#: Rounded constant of (kappa L)^2 = KAPPA_OMEGA_T0 * omega * T0.
KAPPA_OMEGA_T0 = 0.890

_BRACKET_HALF_WIDTH = 0.4


def _check_positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")


def sech(t):
    """1/cosh(t) without overflow for large |t|."""
    t = abs(t)
    return 2.0 * math.exp(-t) / (1.0 + math.exp(-2.0 * t))


@dataclass(frozen=True)
class Material:
    young_modulus: float
    density: float

    def __post_init__(self):
        _check_positive("young_modulus", self.young_modulus)
        _check_positive("density", self.density)


@dataclass(frozen=True)
class CrossSection:
    """Rail cross-section.

    ``max_extent`` is the largest transverse distance from the neutral line;
    when given, ``second_moment_y`` is checked against ``area * max_extent**2``.
    """

    area: float
    second_moment_y: float
    max_extent: float | None = None

    def __post_init__(self):
        _check_positive("area", self.area)
        _check_positive("second_moment_y", self.second_moment_y)
        if self.max_extent is not None:
            _check_positive("max_extent", self.max_extent)
            if self.second_moment_y >= self.area * self.max_extent**2:
                raise DomainError(
                    "second_moment_y is not attainable for a section of this "
                    "area and transverse extent"
                )


@dataclass(frozen=True)
class RailSpec:
    """Uniform rail of total length ``2 * half_length``."""

    material: Material
    section: CrossSection
    half_length: float

    def __post_init__(self):
        _check_positive("half_length", self.half_length)

    @property
    def flexural_rigidity(self):
        """E * I_y in N m^2."""
        return self.material.young_modulus * self.section.second_moment_y

    @property
    def linear_density(self):
        """rho * A in kg/m."""
        return self.material.density * self.section.area

    @property
    def half_mass(self):
        """rho * A * L, the default mass parameter of the suspension formulas."""
        return self.linear_density * self.half_length

    def with_first_bending_frequency(self, nu0_hz):
        """Copy of the rail with E rescaled so the n=0 mode sits at ``nu0_hz``.

        Used to feed a measured first bending resonance into the model while
        keeping density, section and length untouched.
        """
        _check_positive("nu0_hz", nu0_hz)
        current = first_bending_omega(self)
        scale = (2.0 * math.pi * nu0_hz / current) ** 2
        material = replace(self.material, young_modulus=self.material.young_modulus * scale)
        return replace(self, material=material)


@dataclass(frozen=True)
class BendingMode:
    index: int
    kappa: float
    omega: float
    parity: str  # "even" (b, d amplitudes) or "odd" (a, c amplitudes)
    kappa_L: float
    q_factor: float | None = None

    @property
    def frequency_hz(self):
        return self.omega / (2.0 * math.pi)


@dataclass(frozen=True)
class ModalSolution:
    modes: tuple[BendingMode, ...]
    omega0: float
    omega0_closed_form: float
    period_T0: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "period_T0", 2.0 * math.pi / self.omega0)

    def __len__(self):
        return len(self.modes)

    def __getitem__(self, n):
        return self.modes[n]


def dispersion_kappa(rail: RailSpec, omega: float) -> float:
    """Spatial wavevector kappa (1/m) of a free bending wave at ``omega``.

    kappa = (rho A omega^2 / (E I_y))^(1/4).
    """
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega!r}")
    return (rail.linear_density * omega**2 / rail.flexural_rigidity) ** 0.25


def omega_from_kappa(rail: RailSpec, kappa: float) -> float:
    return math.sqrt(rail.flexural_rigidity / rail.linear_density) * kappa**2


def omega0_closed_form(rail: RailSpec) -> float:
    """First bending resonance from the rounded closed-form coefficient."""
    return OMEGA0_COEFF * math.sqrt(
        rail.flexural_rigidity / (rail.linear_density * rail.half_length**4)
    )


def resonance_residual(kappa_L: float) -> float:
    """cos(2 kL) - 1/cosh(2 kL); zero at a free-free bending resonance."""
    return math.cos(2.0 * kappa_L) - sech(2.0 * kappa_L)


def approx_kappa_L(n: int) -> float:
    """Asymptotic estimate of the n-th resonance root (n = 0, 1, ...)."""
    center = (2 * n + 3) * math.pi / 4.0
    return center + (-1) ** n * sech((2 * n + 3) * math.pi / 2.0)


def _root_kappa_L(n: int) -> float:
    center = (2 * n + 3) * math.pi / 4.0
    lo, hi = center - _BRACKET_HALF_WIDTH, center + _BRACKET_HALF_WIDTH
    f_lo, f_hi = resonance_residual(lo), resonance_residual(hi)
    if f_lo * f_hi > 0:
        raise SolverError(f"no sign change bracketing bending root n={n} in [{lo}, {hi}]")
    root = brentq(resonance_residual, lo, hi, xtol=1e-14, rtol=1e-14, maxiter=200)
    if abs(resonance_residual(root)) >= 1e-10:
        raise SolverError(f"bending root n={n} did not converge (kL={root})")
    if abs(root - approx_kappa_L(n)) >= 0.02:
        raise SolverError(f"bending root n={n} at kL={root} is far from its asymptotic estimate")
    return root


def first_bending_omega(rail: RailSpec) -> float:
    return omega_from_kappa(rail, _root_kappa_L(0) / rail.half_length)


def find_bending_modes(rail: RailSpec, n_max: int) -> ModalSolution:
    """First ``n_max + 1`` free-free bending modes of the rail.

    Roots of cos(2 kL) cosh(2 kL) = 1 are found in the overflow-safe form
    cos(2 kL) = sech(2 kL), each bracketed around (2n + 3) pi / 4.  Rigid
    body roots (kappa = 0) are never returned.

    Raises
    ------
    SolverError
        If a bracket fails or the closed-form first frequency disagrees with
        the solved one by more than 0.1 %.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    L = rail.half_length
    modes = []
    for n in range(n_max + 1):
        kL = _root_kappa_L(n)
        kappa = kL / L
        modes.append(
            BendingMode(
                index=n,
                kappa=kappa,
                omega=omega_from_kappa(rail, kappa),
                parity="even" if n % 2 == 0 else "odd",
                kappa_L=kL,
            )
        )
    omega0 = modes[0].omega
    closed = omega0_closed_form(rail)
    if abs(closed / omega0 - 1.0) > 1e-3:
        raise SolverError(f"closed-form omega0 {closed} disagrees with solved {omega0}")
    return ModalSolution(modes=tuple(modes), omega0=omega0, omega0_closed_form=closed)


def mode_shape_factor(kappa_L: float, parity: str) -> float:
    """The parity-dependent factor g(kappa_n L) entering the modal Q."""
    x = kappa_L
    if parity == "even":
        return (1.0 + math.sin(2 * x) / (2 * x)) * (1.0 / math.cos(x) ** 2 + sech(x) ** 2)
    if parity == "odd":
        inv_sinh2 = 0.0 if x > 350 else 1.0 / math.sinh(x) ** 2
        return (1.0 - math.sin(2 * x) / (2 * x)) * (1.0 / math.sin(x) ** 2 + inv_sinh2)
    raise DomainError(f"parity must be 'even' or 'odd', got {parity!r}")


def mode_q_factors(rail: RailSpec, mu: float, modes: ModalSolution, mass: float | None = None) -> ModalSolution:
    """Fill in Q_n = mass * omega_n * g(kappa_n L) / (8 mu) for every mode.

    ``mass`` defaults to rho A L (half the rail).  ``mu`` is the damping
    coefficient of one end, identical at both ends.
    """
    _check_positive("mu", mu)
    m = rail.half_mass if mass is None else mass
    _check_positive("mass", m)
    filled = tuple(
        replace(mode, q_factor=m * mode.omega * mode_shape_factor(mode.kappa_L, mode.parity) / (8.0 * mu))
        for mode in modes.modes
    )
    return replace(modes, modes=filled)


def mode_damping_from_q(mode: BendingMode, q_factor: float, mass: float) -> float:
    """Invert the modal Q relation: damping mu that yields ``q_factor``."""
    _check_positive("q_factor", q_factor)
    _check_positive("mass", mass)
    return mass * mode.omega * mode_shape_factor(mode.kappa_L, mode.parity) / (8.0 * q_factor)


def pendular_q_factors(rail: RailSpec, mu: float, omega_osc: float, omega_rot: float, mass: float | None = None):
    """(Q_osc, Q_rot) of the translational and rotational pendular modes."""
    m = rail.half_mass if mass is None else mass
    for name, value in (("mu", mu), ("omega_osc", omega_osc), ("omega_rot", omega_rot), ("mass", m)):
        _check_positive(name, value)
    return m * omega_osc / mu, m * omega_rot / (3.0 * mu)
