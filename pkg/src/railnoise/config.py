"""INI configuration: parsing, overrides and validation.

Sections and keys (all SI, frequencies in Hz)::

    [rail]           young_modulus, density, area, second_moment_y, half_length,
                     max_extent?, first_bending_hz?
    [suspension]     stiffness, damping            (both ends)
                     minus_stiffness, minus_damping, plus_stiffness, plus_damping
                     nu_osc, q_osc                 (alternative to stiffness/damping)
                     mass?
    [interferometer] grating_wavevector | laser_wavelength, inter_grating_distance,
                     atom_velocity, order?, optical_grating_wavevector?
    [noise]          file | minus_file + plus_file | segments | minus_segments + plus_segments,
                     points_per_decade?, extend_to_hz?, interpolation?
    [band]           nu_min, nu_max, correlated_low_freq_guard?
    [grid]           points_per_decade?, densify?, halfwidths?
    [modes]          n_max?
    [visibility]     v_max?, phi1_sq?, p_max?, data?

Relative file paths resolve against the directory of the config file.
"""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .beam import CrossSection, Material, RailSpec
from .errors import ConfigError, RailNoiseError, SpectrumFormatError
from .noise import NoiseSpectrum, load_spectrum, parse_segments, synth_spectrum
from .phase import GridSpec, InterferometerSpec
from .suspension import SuspensionEnd, SuspensionSpec

ENV_VAR = "RAILNOISE_CONFIG"
PROFILES = ("lithium", "lithium_noise")

_KNOWN = {
    "rail": {"young_modulus", "density", "area", "second_moment_y", "half_length", "max_extent", "first_bending_hz"},
    "suspension": {
        "stiffness", "damping", "minus_stiffness", "minus_damping", "plus_stiffness",
        "plus_damping", "nu_osc", "q_osc", "mass",
    },
    "interferometer": {
        "grating_wavevector", "laser_wavelength", "inter_grating_distance", "atom_velocity",
        "order", "optical_grating_wavevector",
    },
    "noise": {
        "file", "minus_file", "plus_file", "segments", "minus_segments", "plus_segments",
        "points_per_decade", "extend_to_hz", "interpolation",
    },
    "band": {"nu_min", "nu_max", "correlated_low_freq_guard"},
    "grid": {"points_per_decade", "densify", "halfwidths"},
    "modes": {"n_max"},
    "visibility": {"v_max", "phi1_sq", "p_max", "data"},
}


@dataclass(frozen=True)
class NoiseSource:
    file: Path | None = None
    segments: str | None = None

    def load(self, points_per_decade, extend_to_hz) -> NoiseSpectrum:
        if self.file is not None:
            spectrum = load_spectrum(self.file)
        else:
            spectrum = synth_spectrum(parse_segments(self.segments), points_per_decade)
        if extend_to_hz is not None and extend_to_hz > spectrum.nu_max:
            spectrum = spectrum.extended(extend_to_hz)
        return spectrum


@dataclass(frozen=True)
class Config:
    rail: RailSpec
    suspension: SuspensionSpec
    interferometer: InterferometerSpec
    band: tuple = (2.0, 1000.0)
    low_freq_guard: bool = True
    grid: GridSpec = field(default_factory=GridSpec)
    n_max: int = 3
    noise_minus: NoiseSource | None = None
    noise_plus: NoiseSource | None = None
    synth_points_per_decade: int = 50
    extend_to_hz: float | None = None
    interpolation: str = "loglog"
    v_max: float | None = None
    phi1_sq: float | None = None
    p_max: int = 3
    visibility_data: Path | None = None
    source: str = "<memory>"

    def noise_spectra(self):
        """(minus, plus) spectra, loaded from disk or synthesized."""
        if self.noise_minus is None or self.noise_plus is None:
            raise ConfigError("no noise input configured", path="noise")
        return tuple(
            src.load(self.synth_points_per_decade, self.extend_to_hz)
            for src in (self.noise_minus, self.noise_plus)
        )


class _Section:
    def __init__(self, parser, name):
        self.name = name
        self.items = dict(parser.items(name)) if parser.has_section(name) else {}

    def has(self, key):
        return key in self.items

    def path(self, key):
        return f"{self.name}.{key}"

    def float(self, key, default=None, positive=True, required=None):
        if key not in self.items:
            if required or (required is None and default is None):
                raise ConfigError("missing required value", path=self.path(key))
            return default
        try:
            value = float(self.items[key])
        except ValueError:
            raise ConfigError(f"not a number: {self.items[key]!r}", path=self.path(key)) from None
        if not math.isfinite(value) or (positive and value <= 0) or (not positive and value < 0):
            bound = "> 0" if positive else ">= 0"
            raise ConfigError(f"must be finite and {bound}, got {value}", path=self.path(key))
        return value

    def int(self, key, default):
        if key not in self.items:
            return default
        try:
            return int(self.items[key])
        except ValueError:
            raise ConfigError(f"not an integer: {self.items[key]!r}", path=self.path(key)) from None

    def bool(self, key, default):
        if key not in self.items:
            return default
        value = self.items[key].strip().lower()
        if value in ("1", "true", "yes", "on"):
            return True
        if value in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"not a boolean: {self.items[key]!r}", path=self.path(key))


def profile_path(name) -> Path:
    if name not in PROFILES:
        raise ConfigError(f"unknown profile {name!r}; choose from {', '.join(PROFILES)}", path="profile")
    return Path(str(resources.files("railnoise") / "data" / f"{name}.ini"))


def read_parser(path=None, text=None):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    if text is not None:
        parser.read_string(text)
    else:
        with open(path) as fh:
            parser.read_file(fh)
    return parser


def apply_overrides(parser, overrides):
    """Apply ``section.key=value`` strings."""
    for item in overrides:
        target, sep, value = item.partition("=")
        section, dot, key = target.strip().partition(".")
        if not sep or not dot or not section or not key:
            raise ConfigError(f"override must look like section.key=value, got {item!r}", path="--set")
        if not parser.has_section(section):
            parser.add_section(section)
        if value.strip() == "":
            parser.remove_option(section, key)
        else:
            parser.set(section, key, value.strip())


def _check_keys(parser):
    for section in parser.sections():
        known = _KNOWN.get(section)
        if known is None:
            raise ConfigError("unknown section", path=section)
        for key in parser.options(section):
            if key not in known:
                raise ConfigError("unknown key", path=f"{section}.{key}")


def _rail(parser):
    s = _Section(parser, "rail")
    try:
        rail = RailSpec(
            Material(s.float("young_modulus"), s.float("density")),
            CrossSection(s.float("area"), s.float("second_moment_y"), s.float("max_extent", default=None, required=False)),
            s.float("half_length"),
        )
        if s.has("first_bending_hz"):
            rail = rail.with_first_bending_frequency(s.float("first_bending_hz"))
    except ConfigError:
        raise
    except RailNoiseError as exc:
        raise ConfigError(str(exc), path="rail") from None
    return rail


def _suspension(parser, rail):
    s = _Section(parser, "suspension")
    mass = s.float("mass", default=None, required=False)
    if s.has("nu_osc") or s.has("q_osc"):
        clash = [k for k in ("stiffness", "damping", "minus_stiffness", "plus_stiffness") if s.has(k)]
        if clash:
            raise ConfigError("nu_osc/q_osc cannot be combined with explicit stiffness", path=s.path(clash[0]))
        return SuspensionSpec.from_pendular(rail, s.float("nu_osc"), s.float("q_osc"), mass)
    ends = []
    for side in ("minus", "plus"):
        k_key = f"{side}_stiffness" if s.has(f"{side}_stiffness") else "stiffness"
        d_key = f"{side}_damping" if s.has(f"{side}_damping") else "damping"
        ends.append(
            SuspensionEnd(
                s.float(k_key, positive=False, required=True),
                s.float(d_key, default=0.0, positive=False, required=False),
            )
        )
    return SuspensionSpec(ends[0], ends[1], mass)


def _interferometer(parser, rail):
    s = _Section(parser, "interferometer")
    if s.has("grating_wavevector") and s.has("laser_wavelength"):
        raise ConfigError("give grating_wavevector or laser_wavelength, not both", path=s.path("laser_wavelength"))
    if s.has("laser_wavelength"):
        k_g = 4.0 * math.pi / s.float("laser_wavelength")
    else:
        k_g = s.float("grating_wavevector")
    try:
        itf = InterferometerSpec(
            grating_wavevector=k_g,
            inter_grating_distance=s.float("inter_grating_distance"),
            atom_velocity=s.float("atom_velocity"),
            order=s.int("order", 1),
            optical_grating_wavevector=s.float("optical_grating_wavevector", default=None, required=False),
        )
        itf.check_fits(rail)
    except RailNoiseError as exc:
        raise ConfigError(str(exc), path="interferometer") from None
    return itf


def _noise_sources(parser, base_dir):
    s = _Section(parser, "noise")

    def resolve(key):
        p = Path(s.items[key])
        return p if p.is_absolute() else base_dir / p

    def source(side):
        for key in (f"{side}_file", f"{side}_segments", "file", "segments"):
            if s.has(key):
                if key.endswith("file"):
                    return NoiseSource(file=resolve(key))
                try:
                    parse_segments(s.items[key])
                except SpectrumFormatError as exc:
                    raise ConfigError(str(exc), path=s.path(key)) from None
                return NoiseSource(segments=s.items[key])
        return None

    minus, plus = source("minus"), source("plus")
    if (minus is None) != (plus is None):
        raise ConfigError("noise given for one end only", path="noise")
    interpolation = s.items.get("interpolation", "loglog")
    if interpolation not in ("loglog", "linear"):
        raise ConfigError("must be 'loglog' or 'linear'", path=s.path("interpolation"))
    return (
        minus,
        plus,
        s.int("points_per_decade", 50),
        s.float("extend_to_hz", default=None, required=False),
        interpolation,
    )


def build_config(parser, base_dir=Path("."), source="<memory>") -> Config:
    _check_keys(parser)
    rail = _rail(parser)
    suspension = _suspension(parser, rail)
    interferometer = _interferometer(parser, rail)
    minus, plus, synth_ppd, extend_to, interpolation = _noise_sources(parser, base_dir)

    band = _Section(parser, "band")
    nu_min, nu_max = band.float("nu_min", 2.0), band.float("nu_max", 1000.0)
    if nu_min >= nu_max:
        raise ConfigError("nu_min must be below nu_max", path="band.nu_min")

    g = _Section(parser, "grid")
    try:
        grid = GridSpec(g.int("points_per_decade", 740), g.int("densify", 10), g.float("halfwidths", 5.0))
    except RailNoiseError as exc:
        raise ConfigError(str(exc), path="grid") from None

    modes = _Section(parser, "modes")
    n_max = modes.int("n_max", 3)
    if n_max < 0:
        raise ConfigError("must be >= 0", path="modes.n_max")

    vis = _Section(parser, "visibility")
    data = vis.items.get("data")
    return Config(
        rail=rail,
        suspension=suspension,
        interferometer=interferometer,
        band=(nu_min, nu_max),
        low_freq_guard=band.bool("correlated_low_freq_guard", True),
        grid=grid,
        n_max=n_max,
        noise_minus=minus,
        noise_plus=plus,
        synth_points_per_decade=synth_ppd,
        extend_to_hz=extend_to,
        interpolation=interpolation,
        v_max=vis.float("v_max", default=None, required=False),
        phi1_sq=vis.float("phi1_sq", default=None, positive=False, required=False),
        p_max=vis.int("p_max", 3),
        visibility_data=None if data is None else (Path(data) if Path(data).is_absolute() else base_dir / data),
        source=source,
    )


def load_config(path=None, profile=None, overrides=()) -> Config:
    """Load a config file, a shipped profile, or the file named by
    ``$RAILNOISE_CONFIG``, then apply ``section.key=value`` overrides."""
    if path is not None and profile is not None:
        raise ConfigError("give either a config path or a profile", path="config")
    if path is None and profile is None:
        path = os.environ.get(ENV_VAR)
        if not path:
            raise ConfigError(f"no config given (use --config, --profile or ${ENV_VAR})", path="config")
    if profile is not None:
        path = profile_path(profile)
    path = Path(path)
    try:
        parser = read_parser(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse: {exc}", path=str(path)) from None
    apply_overrides(parser, overrides)
    return build_config(parser, base_dir=path.parent, source=str(path))
