import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from railnoise import DomainError, NoiseSpectrum, SpectrumFormatError, load_spectrum, sample_psd, save_spectrum, synth_spectrum
from railnoise.noise import Extension, PowerLawSegment, parse_segments


def test_reads_header_comments_and_blank_lines():
    text = "# seismometer run 3\nfreq_hz,psd_m2_per_hz\n\n1,1e-12\n# mid comment\n10, 1e-14\n100,1e-18\n"
    spec = load_spectrum(text.encode())
    np.testing.assert_array_equal(spec.nu, [1, 10, 100])
    np.testing.assert_array_equal(spec.psd, [1e-12, 1e-14, 1e-18])


def test_reads_paths_and_streams(tmp_path):
    path = tmp_path / "psd.csv"
    path.write_text("1,2e-12\n2,1e-12\n")
    assert load_spectrum(path) == load_spectrum(str(path))
    assert load_spectrum(io.StringIO("1,2e-12\n2,1e-12\n")) == load_spectrum(io.BytesIO(b"1,2e-12\n2,1e-12\n"))


@pytest.mark.parametrize(
    "text, row",
    [
        ("1,1e-12\n1,1e-13\n", 1),
        ("1,1e-12\n3,1e-13\n2,1e-13\n", 2),
        ("1,1e-12\n2,-1e-13\n", 1),
        ("1,1e-12\n2,abc\n", 1),
        ("1,1e-12,5\n", 0),
        ("1,1e-12\n2,nan\n", 1),
    ],
)
def test_bad_rows_name_their_index(text, row):
    with pytest.raises(SpectrumFormatError) as info:
        load_spectrum(text.encode())
    assert info.value.line == row
    assert f"line {row}" in str(info.value)


def test_single_row_is_not_a_spectrum():
    with pytest.raises(SpectrumFormatError):
        load_spectrum(b"1,1e-12\n")


@given(
    st.lists(st.floats(1e-3, 1e5), min_size=2, max_size=30, unique=True),
    st.lists(st.floats(0.0, 1e-6), min_size=30, max_size=30),
)
def test_round_trip_is_exact(freqs, values):
    nu = np.sort(np.array(freqs))
    spec = NoiseSpectrum(nu, np.array(values[: nu.size]))
    buf = io.StringIO()
    save_spectrum(spec, buf)
    assert load_spectrum(io.StringIO(buf.getvalue())) == spec


def test_interpolation_is_exact_at_samples_and_loglog_between():
    spec = NoiseSpectrum([1.0, 10.0, 100.0], [1e-10, 1e-12, 1e-12])
    np.testing.assert_array_equal(sample_psd(spec, spec.nu), spec.psd)
    assert sample_psd(spec, math.sqrt(10.0)) == pytest.approx(1e-11, rel=1e-12)
    assert sample_psd(spec, 5.5, "linear") == pytest.approx(1e-10 + (1e-12 - 1e-10) * 0.5, rel=1e-12)
    with pytest.raises(DomainError):
        sample_psd(spec, 0.5)
    with pytest.raises(DomainError):
        sample_psd(spec, 5.0, "cubic")


@given(st.floats(1.0, 100.0))
def test_interpolated_values_stay_between_neighbours(nu):
    spec = NoiseSpectrum([1.0, 3.0, 10.0, 100.0], [1e-10, 0.0, 1e-13, 1e-12])
    value = sample_psd(spec, nu)
    i = min(np.searchsorted(spec.nu, nu, side="right") - 1, 2)
    lo, hi = sorted(spec.psd[i : i + 2])
    assert lo * (1 - 1e-12) <= value <= hi * (1 + 1e-12)


def test_extension_holds_the_last_value():
    spec = NoiseSpectrum([1.0, 100.0], [1e-12, 1e-16]).extended(1000.0)
    assert spec.nu_max == 1000.0
    assert sample_psd(spec, 500.0) == 1e-16
    early = NoiseSpectrum([1.0, 100.0], [1e-12, 1e-16], Extension(10.0, 1000.0))
    assert sample_psd(early, 50.0) == pytest.approx(1e-14, rel=1e-12)
    with pytest.raises(SpectrumFormatError):
        Extension(10.0, 5.0)


def test_spectrum_validation():
    with pytest.raises(SpectrumFormatError):
        NoiseSpectrum([1.0, 1.0], [1.0, 1.0])
    with pytest.raises(SpectrumFormatError):
        NoiseSpectrum([0.0, 1.0], [1.0, 1.0])
    spec = NoiseSpectrum([1.0, 2.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        spec.psd[0] = 5.0
    assert spec.scaled(3.0).psd[1] == 3.0


def test_synthesis_follows_the_segments():
    segments = parse_segments("1:10:1e-12:0; 10:100:1e-12:-4\n100:1000:1e-16:0")
    spec = synth_spectrum(segments, points_per_decade=20)
    assert spec.nu[0] == 1.0 and spec.nu[-1] == 1000.0
    assert np.all(np.diff(spec.nu) > 0)
    nu = np.geomspace(1, 1000, 97)
    want = np.select([nu < 10, nu < 100], [segments[0](nu), segments[1](nu)], segments[2](nu))
    np.testing.assert_allclose(sample_psd(spec, nu), want, rtol=1e-10)


def test_synthesis_rejects_gaps_and_overlaps():
    with pytest.raises(SpectrumFormatError, match="gapped"):
        synth_spectrum([PowerLawSegment(1, 10, 1e-12), PowerLawSegment(20, 100, 1e-12)])
    with pytest.raises(SpectrumFormatError, match="overlapping"):
        synth_spectrum([PowerLawSegment(1, 10, 1e-12), PowerLawSegment(5, 100, 1e-12)])
    with pytest.raises(SpectrumFormatError):
        parse_segments("1:10")
    with pytest.raises(SpectrumFormatError):
        synth_spectrum([])
