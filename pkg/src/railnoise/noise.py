"""One-sided support-motion PSDs: CSV I/O, interpolation, synthesis.

PSDs are one-sided, in m^2/Hz, over positive frequencies only.  Mixing in
a two-sided spectrum silently halves every integrated result.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SpectrumFormatError


@dataclass(frozen=True)
class Extension:
    """Hold the PSD constant at its value at ``nu_from`` up to ``nu_to``."""

    nu_from: float
    nu_to: float

    def __post_init__(self):
        if not (0 < self.nu_from < self.nu_to):
            raise SpectrumFormatError(f"extension needs 0 < nu_from < nu_to, got {self}")


@dataclass(frozen=True, eq=False)
class NoiseSpectrum:
    nu: np.ndarray
    psd: np.ndarray
    extension: Extension | None = None

    def __post_init__(self):
        nu = np.array(self.nu, dtype=float)
        psd = np.array(self.psd, dtype=float)
        if nu.ndim != 1 or nu.shape != psd.shape:
            raise SpectrumFormatError("nu and psd must be 1-D arrays of equal length")
        if nu.size < 2:
            raise SpectrumFormatError("a spectrum needs at least 2 samples")
        if not np.all(np.isfinite(nu)) or np.any(nu <= 0):
            raise SpectrumFormatError("frequencies must be finite and > 0")
        if np.any(np.diff(nu) <= 0):
            raise SpectrumFormatError("frequencies must be strictly increasing")
        if not np.all(np.isfinite(psd)) or np.any(psd < 0):
            raise SpectrumFormatError("psd values must be finite and >= 0")
        ext = self.extension
        if ext is not None and not (nu[0] <= ext.nu_from <= nu[-1]):
            raise SpectrumFormatError("extension must start inside the sampled range")
        nu.setflags(write=False)
        psd.setflags(write=False)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "psd", psd)

    @property
    def nu_min(self):
        return float(self.nu[0])

    @property
    def nu_max(self):
        top = float(self.nu[-1])
        return top if self.extension is None else max(top, self.extension.nu_to)

    def extended(self, nu_to, nu_from=None):
        """Copy with a constant-value extension from ``nu_from`` (default:
        last sample) to ``nu_to``."""
        start = float(self.nu[-1]) if nu_from is None else nu_from
        return NoiseSpectrum(self.nu, self.psd, Extension(start, nu_to))

    def scaled(self, factor):
        return NoiseSpectrum(self.nu, self.psd * factor, self.extension)

    def __eq__(self, other):
        if not isinstance(other, NoiseSpectrum):
            return NotImplemented
        return (
            np.array_equal(self.nu, other.nu)
            and np.array_equal(self.psd, other.psd)
            and self.extension == other.extension
        )


def _interp(nu_s, psd_s, nu, interpolation):
    idx = np.clip(np.searchsorted(nu_s, nu, side="right") - 1, 0, nu_s.size - 2)
    n0, n1 = nu_s[idx], nu_s[idx + 1]
    p0, p1 = psd_s[idx], psd_s[idx + 1]
    linear = p0 + (p1 - p0) * (nu - n0) / (n1 - n0)
    if interpolation == "linear":
        out = linear
    elif interpolation == "loglog":
        positive = (p0 > 0) & (p1 > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.log(nu / n0) / np.log(n1 / n0)
            lp0 = np.log(np.where(positive, p0, 1.0))
            lp1 = np.log(np.where(positive, p1, 1.0))
            loglog = np.exp(lp0 + t * (lp1 - lp0))
        out = np.where(positive, loglog, linear)
    else:
        raise DomainError(f"unknown interpolation {interpolation!r}")
    out = np.where(nu == n0, p0, out)
    return np.where(nu == n1, p1, out)


def sample_psd(spectrum: NoiseSpectrum, nu, interpolation="loglog"):
    """PSD at frequency ``nu`` (Hz, scalar or array).

    Log-log interpolation between samples; segments touching a zero PSD
    fall back to linear.  Inside the declared extension the value is held
    constant.

    Raises
    ------
    DomainError
        For frequencies outside the sampled-plus-extended range.
    """
    nu = np.asarray(nu, dtype=float)
    if np.any(nu < spectrum.nu_min) or np.any(nu > spectrum.nu_max):
        raise DomainError(
            f"frequency outside spectrum support [{spectrum.nu_min}, {spectrum.nu_max}] Hz"
        )
    ext = spectrum.extension
    query = nu if ext is None else np.minimum(nu, ext.nu_from)
    return _interp(spectrum.nu, spectrum.psd, query, interpolation)[()]


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, newline=""), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8")), True
    if isinstance(source, io.TextIOBase):
        return source, False
    # binary file-like
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def _try_float(text):
    try:
        return float(text)
    except ValueError:
        return None


def load_spectrum(source) -> NoiseSpectrum:
    """Read a two-column CSV ``freq_hz, psd_m2_per_hz``.

    ``source`` is a path, bytes, or a text/binary stream.  Lines starting
    with ``#`` and blank lines are ignored; a header row is allowed before
    the first data row.  Errors name the 0-indexed data row.
    """
    handle, owned = _open_text(source)
    try:
        rows = list(csv.reader(handle))
    finally:
        if owned:
            handle.close()

    freqs, values = [], []
    data_row = 0
    seen_data = False
    for raw in rows:
        fields = [f.strip() for f in raw]
        if not fields or all(not f for f in fields) or fields[0].startswith("#"):
            continue
        if not seen_data and len(fields) == 2 and _try_float(fields[0]) is None and _try_float(fields[1]) is None:
            seen_data = True  # header
            continue
        seen_data = True
        if len(fields) != 2:
            raise SpectrumFormatError(f"expected 2 columns, got {len(fields)}", line=data_row)
        f, p = _try_float(fields[0]), _try_float(fields[1])
        if f is None or p is None:
            raise SpectrumFormatError(f"non-numeric value in {raw!r}", line=data_row)
        if not (math.isfinite(f) and math.isfinite(p)):
            raise SpectrumFormatError("non-finite value", line=data_row)
        if p < 0:
            raise SpectrumFormatError(f"negative psd {p}", line=data_row)
        if freqs and f == freqs[-1]:
            raise SpectrumFormatError(f"duplicate frequency {f}", line=data_row)
        if freqs and f < freqs[-1]:
            raise SpectrumFormatError(f"frequencies not increasing ({f} after {freqs[-1]})", line=data_row)
        freqs.append(f)
        values.append(p)
        data_row += 1
    return NoiseSpectrum(np.array(freqs), np.array(values))


def save_spectrum(spectrum: NoiseSpectrum, dest):
    """Write the samples as CSV with 17 significant digits (exact round trip)."""
    lines = ["freq_hz,psd_m2_per_hz"]
    lines += [f"{f:.17g},{p:.17g}" for f, p in zip(spectrum.nu, spectrum.psd)]
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    else:
        dest.write(text)


@dataclass(frozen=True)
class PowerLawSegment:
    """psd(nu) = psd_start * (nu / nu_start) ** slope on [nu_start, nu_end]."""

    nu_start: float
    nu_end: float
    psd_start: float
    slope: float = 0.0

    def __post_init__(self):
        if not (0 < self.nu_start < self.nu_end):
            raise SpectrumFormatError(f"segment needs 0 < nu_start < nu_end: {self}")
        if not (self.psd_start >= 0 and math.isfinite(self.psd_start)):
            raise SpectrumFormatError(f"segment psd_start must be >= 0: {self}")

    def __call__(self, nu):
        return self.psd_start * (np.asarray(nu, dtype=float) / self.nu_start) ** self.slope


def parse_segments(text):
    """Parse ``nu_start:nu_end:psd_start:slope`` items separated by ``;`` or newlines."""
    segments = []
    for item in text.replace("\n", ";").split(";"):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) not in (3, 4):
            raise SpectrumFormatError(f"bad segment {item!r}; expected nu_start:nu_end:psd_start[:slope]")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise SpectrumFormatError(f"non-numeric segment {item!r}") from None
        segments.append(PowerLawSegment(*values))
    return segments


def synth_spectrum(segments, points_per_decade=50) -> NoiseSpectrum:
    """Sample a contiguous piecewise power law on a log grid."""
    segments = list(segments)
    if not segments:
        raise SpectrumFormatError("no segments given")
    for prev, nxt in zip(segments, segments[1:]):
        if not math.isclose(prev.nu_end, nxt.nu_start, rel_tol=1e-12):
            kind = "overlapping" if nxt.nu_start < prev.nu_end else "gapped"
            raise SpectrumFormatError(f"{kind} segments at {prev.nu_end} / {nxt.nu_start} Hz")
    nus, psds = [], []
    for i, seg in enumerate(segments):
        decades = math.log10(seg.nu_end / seg.nu_start)
        n = max(1, math.ceil(decades * points_per_decade))
        grid = np.logspace(math.log10(seg.nu_start), math.log10(seg.nu_end), n + 1)
        grid[0], grid[-1] = seg.nu_start, seg.nu_end
        if i < len(segments) - 1:
            grid = grid[:-1]
        nus.append(grid)
        psds.append(seg(grid))
    return NoiseSpectrum(np.concatenate(nus), np.concatenate(psds))
