"""Interferometer phase driven by support vibrations.

The three gratings sit on the neutral line at z = -L12, 0, +L12 and are
crossed at t - T, t, t + T (T = L12 / u).  With the convention
x(t) = Re[x(omega) exp(-i omega t)] a delay by T multiplies by exp(i omega T),
so

    Phi(omega) = p kG [2 X(0) - X(-L12) exp(i omega T) - X(L12) exp(-i omega T)].

The phase splits into a bending part (the T = 0 value), a Sagnac part
(odd in T) and an acceleration part (the rest, even in T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beam import RailSpec, find_bending_modes, mode_q_factors
from .errors import DomainError, ResonanceSingularityError, UnsupportedConfigurationError
from .noise import NoiseSpectrum, sample_psd
from .suspension import SuspensionSpec, pendular_modes, ratio_R, shape, solve_amplitudes

#: Lowest frequency integrated unless explicitly overridden; below it the
#: two support motions are correlated and the uncorrelated-ends model fails.
LOW_FREQUENCY_GUARD_HZ = 2.0

#: Bending coefficient of the low-frequency phase, 5/12 * (kappa0 L)^4 / (2 pi)^2 rounded.
LOWFREQ_BENDING_COEFF = 0.330


@dataclass(frozen=True)
class InterferometerSpec:
    grating_wavevector: float  # rad/m
    inter_grating_distance: float  # m
    atom_velocity: float  # m/s
    order: int = 1
    optical_grating_wavevector: float | None = None

    def __post_init__(self):
        for name in ("grating_wavevector", "inter_grating_distance", "atom_velocity"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
        if int(self.order) != self.order or self.order < 1:
            raise DomainError(f"order must be an integer >= 1, got {self.order!r}")

    @property
    def time_of_flight(self):
        return self.inter_grating_distance / self.atom_velocity

    def check_fits(self, rail: RailSpec):
        if self.inter_grating_distance > rail.half_length:
            raise DomainError(
                f"inter_grating_distance {self.inter_grating_distance} m exceeds the rail "
                f"half-length {rail.half_length} m"
            )


@dataclass(frozen=True)
class PhaseComponents:
    total: np.ndarray | complex
    bending: np.ndarray | complex
    sagnac: np.ndarray | complex
    acceleration: np.ndarray | complex


@dataclass(frozen=True)
class PhaseTransfer:
    """Phase per metre of motion of each support (the other one at rest)."""

    nu: np.ndarray | float
    minus: PhaseComponents
    plus: PhaseComponents


def phase_transfer_exact(
    rail: RailSpec,
    suspension: SuspensionSpec,
    interferometer: InterferometerSpec,
    omega,
    x_minus,
    x_plus,
    time_of_flight=None,
) -> PhaseComponents:
    """Phase for given support motions, split into its three parts.

    ``time_of_flight`` overrides L12 / u (negative values are allowed, which
    is how the time-reversal structure is probed).
    """
    interferometer.check_fits(rail)
    T = interferometer.time_of_flight if time_of_flight is None else time_of_flight
    w = np.asarray(omega, dtype=float)
    amps = solve_amplitudes(rail, suspension, w, x_minus, x_plus)
    L12 = interferometer.inter_grating_distance
    x_centre = shape(amps, 0.0)
    x_first = shape(amps, -L12)
    x_third = shape(amps, L12)
    scale = interferometer.order * interferometer.grating_wavevector
    wT = w * T
    total = scale * (2.0 * x_centre - x_first * np.exp(1j * wT) - x_third * np.exp(-1j * wT))
    bending = scale * (2.0 * x_centre - x_first - x_third)
    sagnac = scale * 1j * np.sin(wT) * (x_third - x_first)
    acceleration = scale * 2.0 * np.sin(wT / 2.0) ** 2 * (x_first + x_third)
    return PhaseComponents(total[()], bending[()], sagnac[()], acceleration[()])


def phase_transfer(rail, suspension, interferometer, omega) -> PhaseTransfer:
    """Per-end unit-motion phase transfers at ``omega``."""
    w = np.asarray(omega, dtype=float)
    return PhaseTransfer(
        nu=(w / (2.0 * math.pi))[()],
        minus=phase_transfer_exact(rail, suspension, interferometer, w, 1.0, 0.0),
        plus=phase_transfer_exact(rail, suspension, interferometer, w, 0.0, 1.0),
    )


def phase_transfer_series(rail, suspension, interferometer, omega, x_minus, x_plus):
    """Phase with geometric factors expanded to 4th order in kL and 2nd in omega T.

    The amplitudes a, b are still the exact ones; only the grating-position
    factors are expanded.
    """
    interferometer.check_fits(rail)
    w = np.asarray(omega, dtype=float)
    amps = solve_amplitudes(rail, suspension, w, x_minus, x_plus)
    x = amps.kappa * rail.half_length
    y = amps.kappa * interferometer.inter_grating_distance
    wT = w * interferometer.time_of_flight
    a, b = amps.a, amps.b
    reduced = (
        b * (6.0 * x**2 * y**2 - y**4) / 6.0
        + 4j * a * y * (1.0 - x**2 / 6.0) * wT
        + 2.0 * b * wT**2
    )
    return (interferometer.order * interferometer.grating_wavevector * reduced)[()]


def phase_transfer_lowfreq(rail, suspension, interferometer, omega, x_minus, x_plus, max_kappa_L=0.5, max_omega_T=0.3):
    """Closed-form low-frequency phase with L12 taken equal to L.

    Phi / (p kG) = (x+ - x-) 3i wT / (3 - R)
                   + (x+ + x-) (0.330 (w T0)^2 + (w T)^2) / (2 (1 - R))

    where T0 is the period of the first free bending mode.  Only identical
    ends are supported.
    """
    if not suspension.is_symmetric:
        raise UnsupportedConfigurationError("low-frequency phase needs identical ends")
    w = np.asarray(omega, dtype=float)
    modes = find_bending_modes(rail, 0)
    kL = modes[0].kappa * rail.half_length * np.sqrt(w / modes.omega0)
    wT = w * interferometer.time_of_flight
    if np.any(kL >= max_kappa_L) or np.any(wT >= max_omega_T):
        raise UnsupportedConfigurationError(
            f"low-frequency phase needs kL < {max_kappa_L} and omega T < {max_omega_T}"
        )
    R = ratio_R(suspension.plus_end, suspension.mass(rail), w)
    x_m = np.asarray(x_minus, dtype=complex)
    x_p = np.asarray(x_plus, dtype=complex)
    wT0 = w * modes.period_T0
    value = (x_p - x_m) * 3j * wT / (3.0 - R) + (x_p + x_m) * (
        LOWFREQ_BENDING_COEFF * wT0**2 + wT**2
    ) / (2.0 * (1.0 - R))
    return (interferometer.order * interferometer.grating_wavevector * value)[()]


# ---------------------------------------------------------------------------
# Frequency grid


@dataclass(frozen=True)
class GridSpec:
    """Decade-anchored log grid, refined around known resonances.

    Nodes are 10**(j / points_per_decade) plus the band edges, so a band
    split at a node yields exactly the union of the two sub-band grids.
    Within ``halfwidths`` half-widths of each resonance the spacing is
    divided by ``densify``.
    """

    points_per_decade: int = 740
    densify: int = 10
    halfwidths: float = 5.0

    def __post_init__(self):
        if self.points_per_decade < 1 or self.densify < 1 or self.halfwidths < 0:
            raise DomainError(f"invalid grid spec {self}")


def _anchored_nodes(lo, hi, per_decade):
    j_lo = math.ceil(math.log10(lo) * per_decade)
    j_hi = math.floor(math.log10(hi) * per_decade)
    nodes = 10.0 ** (np.arange(j_lo, j_hi + 1) / per_decade)
    return nodes[(nodes >= lo) & (nodes <= hi)]


def frequency_grid(band, resonances=(), spec: GridSpec | None = None):
    """Evaluation frequencies (Hz) over ``band``.

    ``resonances`` is an iterable of (nu_hz, q_factor); infinite or
    non-positive Q entries are ignored.
    """
    spec = spec or GridSpec()
    lo, hi = band
    if not (0 < lo < hi):
        raise DomainError(f"band must satisfy 0 < nu_min < nu_max, got {band}")
    parts = [np.array([lo, hi]), _anchored_nodes(lo, hi, spec.points_per_decade)]
    for nu_r, q in resonances:
        if not (math.isfinite(q) and q > 0) or spec.densify == 1:
            continue
        half_width = nu_r / (2.0 * q)
        w_lo = max(lo, nu_r - spec.halfwidths * half_width)
        w_hi = min(hi, nu_r + spec.halfwidths * half_width)
        if w_lo < w_hi:
            parts.append(_anchored_nodes(w_lo, w_hi, spec.points_per_decade * spec.densify))
    return np.unique(np.concatenate(parts))


def known_resonances(rail: RailSpec, suspension: SuspensionSpec, n_bending=2):
    """(nu_hz, Q) of the pendular modes and the first bending modes.

    Asymmetric ends are approximated by their mean stiffness and damping,
    which is only used to place grid refinement.
    """
    K = 0.5 * (suspension.minus_end.stiffness + suspension.plus_end.stiffness)
    mu = 0.5 * (suspension.minus_end.damping + suspension.plus_end.damping)
    mean = SuspensionSpec.symmetric(K, mu, suspension.mass_override)
    out = []
    if K > 0:
        pend = pendular_modes(rail, mean)
        out += [(pend.nu_osc, pend.q_osc), (pend.nu_rot, pend.q_rot)]
    modes = find_bending_modes(rail, n_bending - 1)
    if mu > 0:
        modes = mode_q_factors(rail, mu, modes, mass=mean.mass(rail))
    out += [(m.frequency_hz, m.q_factor if m.q_factor is not None else math.inf) for m in modes]
    return out


def _check_damped(rail, suspension, band):
    if suspension.minus_end.damping > 0 or suspension.plus_end.damping > 0:
        return
    lo, hi = band
    for nu_r, _ in known_resonances(rail, suspension, n_bending=_modes_below(rail, hi)):
        if lo <= nu_r <= hi:
            raise ResonanceSingularityError(
                f"undamped resonance near {nu_r:.6g} Hz inside the band; set a damping > 0",
                frequency_hz=nu_r,
            )


def _modes_below(rail, nu_max):
    modes = find_bending_modes(rail, 0)
    n = 1
    while modes.omega0 * ((2 * n + 3) / 3.0) ** 2 / (2.0 * math.pi) <= nu_max * 1.5:
        n += 1
    return n


# ---------------------------------------------------------------------------
# Noise propagation


@dataclass(frozen=True, eq=False)
class PhaseNoiseResult:
    """Phase-noise spectra per p^2 (rad^2/Hz) and their band integrals (rad^2)."""

    nu: np.ndarray
    phi2_total: np.ndarray
    phi2_sagnac: np.ndarray
    phi2_bending: np.ndarray
    psd_minus: np.ndarray
    psd_plus: np.ndarray
    band: tuple
    mean_square_total: float
    mean_square_sagnac: float

    @property
    def sagnac_share(self):
        if self.mean_square_total == 0:
            return 0.0
        return self.mean_square_sagnac / self.mean_square_total


def _band_grid(rail, suspension, noise_minus, noise_plus, band, grid, allow_low_frequency):
    lo, hi = band
    if not (0 < lo < hi):
        raise DomainError(f"band must satisfy 0 < nu_min < nu_max, got {band}")
    if lo < LOW_FREQUENCY_GUARD_HZ and not allow_low_frequency:
        raise DomainError(
            f"band starts below {LOW_FREQUENCY_GUARD_HZ} Hz where support motions are "
            "correlated; pass allow_low_frequency=True to override"
        )
    for name, spec in (("minus", noise_minus), ("plus", noise_plus)):
        if lo < spec.nu_min or hi > spec.nu_max:
            raise DomainError(
                f"band {band} Hz not covered by the {name} spectrum "
                f"[{spec.nu_min}, {spec.nu_max}] Hz"
            )
    _check_damped(rail, suspension, band)
    if grid is None or isinstance(grid, GridSpec):
        return frequency_grid(band, known_resonances(rail, suspension), grid)
    nu = np.asarray(grid, dtype=float)
    return nu[(nu >= lo) & (nu <= hi)]


def phase_noise_spectrum(
    rail: RailSpec,
    suspension: SuspensionSpec,
    interferometer: InterferometerSpec,
    noise_minus: NoiseSpectrum,
    noise_plus: NoiseSpectrum,
    band=(LOW_FREQUENCY_GUARD_HZ, 1000.0),
    grid=None,
    allow_low_frequency=False,
    interpolation="loglog",
) -> PhaseNoiseResult:
    """Propagate the two support PSDs to the interferometer phase.

    The ends are taken as uncorrelated, so

        |Phi / p|^2 (nu) = |H-(nu)|^2 S-(nu) + |H+(nu)|^2 S+(nu)

    with H the per-end transfer divided by the order p.  ``grid`` is a
    :class:`GridSpec` (default) or an explicit array of frequencies in Hz,
    clipped to the band.  Integrals use the trapezoid rule on that grid.
    """
    nu = _band_grid(rail, suspension, noise_minus, noise_plus, band, grid, allow_low_frequency)
    transfer = phase_transfer(rail, suspension, interferometer, 2.0 * math.pi * nu)
    p = interferometer.order
    s_minus = sample_psd(noise_minus, nu, interpolation)
    s_plus = sample_psd(noise_plus, nu, interpolation)

    def weighted(part):
        h_m = getattr(transfer.minus, part) / p
        h_p = getattr(transfer.plus, part) / p
        return np.abs(h_m) ** 2 * s_minus + np.abs(h_p) ** 2 * s_plus

    phi2_total = weighted("total")
    phi2_sagnac = weighted("sagnac")
    return PhaseNoiseResult(
        nu=nu,
        phi2_total=phi2_total,
        phi2_sagnac=phi2_sagnac,
        phi2_bending=weighted("bending"),
        psd_minus=s_minus,
        psd_plus=s_plus,
        band=(float(band[0]), float(band[1])),
        mean_square_total=float(np.trapezoid(phi2_total, nu)),
        mean_square_sagnac=float(np.trapezoid(phi2_sagnac, nu)),
    )


def rms_bending(
    rail,
    suspension,
    interferometer,
    noise_minus,
    noise_plus,
    band=(LOW_FREQUENCY_GUARD_HZ, 1000.0),
    grid=None,
    allow_low_frequency=False,
    interpolation="loglog",
):
    """rms of the grating misalignment delta = 2 x2 - x1 - x3, in metres.

    Only the grating positions (``inter_grating_distance``) of
    ``interferometer`` matter here; the atom time of flight does not enter.
    """
    interferometer.check_fits(rail)
    nu = _band_grid(rail, suspension, noise_minus, noise_plus, band, grid, allow_low_frequency)
    w = 2.0 * math.pi * nu
    L12 = interferometer.inter_grating_distance
    msq = np.zeros_like(nu)
    for x_m, x_p, spec in ((1.0, 0.0, noise_minus), (0.0, 1.0, noise_plus)):
        amps = solve_amplitudes(rail, suspension, w, x_m, x_p)
        delta = 2.0 * shape(amps, 0.0) - shape(amps, -L12) - shape(amps, L12)
        msq += np.abs(delta) ** 2 * sample_psd(spec, nu, interpolation)
    return math.sqrt(float(np.trapezoid(msq, nu)))


def optical_phase(delta, order=1, k_g_opt=3.14e5):
    """Phase of a three-grating optical interferometer for bending ``delta``."""
    return order * k_g_opt * delta
