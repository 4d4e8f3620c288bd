import csv
import io
import json
import subprocess
import sys

import pytest

from railnoise.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_modes_csv_and_json_agree(capsys):
    code, out_csv, _ = run(capsys, "modes", "--profile", "lithium")
    assert code == 0
    assert "# nu0_closed_form_hz=435.5" in out_csv
    code, out_json, _ = run(capsys, "modes", "--profile", "lithium", "--format", "json")
    doc = json.loads(out_json)
    rows = csv_rows(out_csv)
    assert len(rows) == len(doc["rows"]) == 4
    for r_csv, r_json in zip(rows, doc["rows"]):
        assert float(r_csv["nu_hz"]) == pytest.approx(r_json["nu_hz"], rel=1e-8)
        assert r_csv["parity"] == r_json["parity"]
    assert 433 <= doc["nu0_closed_form_hz"] <= 439


def test_modes_single_row(capsys):
    code, out, _ = run(capsys, "modes", "--profile", "lithium", "--n-max", "0")
    assert code == 0 and len(csv_rows(out)) == 1


def test_pendular_both_mass_conventions(capsys):
    _, out, _ = run(capsys, "pendular", "--profile", "lithium", "--format", "json")
    row = json.loads(out)["rows"][0]
    assert row["nu_osc_hz"] == pytest.approx(20.9, abs=0.1)
    _, out, _ = run(capsys, "pendular", "--profile", "lithium", "--set", "suspension.mass=", "--format", "json")
    assert json.loads(out)["rows"][0]["nu_osc_hz"] == pytest.approx(29.5, abs=0.1)


def test_response_table(capsys, tmp_path):
    target = tmp_path / "resp.csv"
    code, _, _ = run(capsys, "response", "--profile", "lithium_noise", "--end", "minus", "-o", str(target))
    assert code == 0
    rows = csv_rows(target.read_text())
    assert float(rows[0]["nu_hz"]) == 2.0 and float(rows[-1]["nu_hz"]) == 1000.0


def test_phase_noise_writes_files_and_is_deterministic(capsys, tmp_path):
    args = ["phase-noise", "--profile", "lithium_noise"]
    code, out, _ = run(capsys, *args, "--out-dir", str(tmp_path / "a"))
    assert code == 0
    summary = json.loads(out)
    assert 0.10 <= summary["mean_square_total_per_p2"] <= 0.25
    run(capsys, *args, "--out-dir", str(tmp_path / "b"))
    for name in ("phase_noise.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_split_band_adds_up(capsys, tmp_path):
    split = str(10.0 ** (1257 / 740))
    totals = []
    for lo, hi, name in (("2", "1000", "full"), ("2", split, "low"), (split, "1000", "high")):
        run(capsys, "phase-noise", "--profile", "lithium_noise", "--nu-min", lo, "--nu-max", hi, "--out-dir", str(tmp_path / name))
        totals.append(json.loads((tmp_path / name / "summary.json").read_text())["mean_square_total_per_p2"])
    assert totals[1] + totals[2] == pytest.approx(totals[0], rel=1e-12)


def test_zero_noise_gives_zero(capsys, tmp_path):
    code, out, _ = run(
        capsys, "phase-noise", "--profile", "lithium_noise", "--set", "noise.file=", "--set", "noise.segments=1:2000:0:0",
        "--out-dir", str(tmp_path),
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["mean_square_total_per_p2"] == 0 and summary["rms_bending_m"] == 0


def test_rms_bending(capsys):
    code, out, _ = run(capsys, "rms-bending", "--profile", "lithium_noise", "--format", "json")
    row = json.loads(out)["rows"][0]
    assert code == 0 and row["rms_bending_m"] < 3e-9
    assert row["optical_phase_rms_rad"] == pytest.approx(3.14e5 * row["rms_bending_m"], rel=1e-12)


def test_visibility_modes(capsys, tmp_path):
    code, out, _ = run(capsys, "visibility", "--v-max", "0.98", "--phi1-sq", "0.286")
    values = [float(r["visibility"]) for r in csv_rows(out)]
    assert code == 0 and values[1:] == pytest.approx([0.849, 0.553, 0.271], abs=5e-4)
    data = tmp_path / "vis.csv"
    data.write_text("p,v\n1,0.849\n2,0.553\n3,0.271\n")
    code, out, _ = run(capsys, "visibility", "fit", "--data", str(data), "--format", "json")
    fit = json.loads(out)["rows"][0]
    assert abs(fit["phi1_sq"] - 0.286) <= 0.008
    code, out, _ = run(capsys, "visibility", "compare", "--model-phi2", "0.16", "--data", str(data), "--format", "json")
    assert json.loads(out)["rows"][0]["ratio"] == pytest.approx(0.16 / fit["phi1_sq"], rel=1e-12)


def test_synth_noise_round_trip(capsys, tmp_path):
    target = tmp_path / "psd.csv"
    code, _, _ = run(capsys, "synth-noise", "--segments", "1:10:1e-12:0;10:100:1e-12:-2", "-o", str(target))
    assert code == 0
    from railnoise import load_spectrum

    spec = load_spectrum(target)
    assert spec.nu[0] == 1.0 and spec.psd[-1] == pytest.approx(1e-14, rel=1e-12)


@pytest.mark.parametrize(
    "argv, code",
    [
        (["modes", "--profile", "lithium", "--set", "rail.density=-5"], 2),
        (["modes", "--profile", "lithium", "--set", "rail.bogus=1"], 2),
        (["phase-noise", "--profile", "lithium", "--set", "suspension.damping=0", "--out-dir", "{tmp}"], 3),
        (["modes", "--config", "{tmp}/missing.ini"], 4),
        (["visibility", "fit"], 2),
        (["phase-noise", "--profile", "lithium_noise", "--nu-min", "1", "--out-dir", "{tmp}"], 2),
    ],
)
def test_exit_codes(capsys, tmp_path, argv, code):
    argv = [a.replace("{tmp}", str(tmp_path)) for a in argv]
    got, _, err = run(capsys, *argv)
    assert got == code
    assert err.startswith("railnoise:")


def test_environment_config(capsys, tmp_path, monkeypatch):
    from railnoise.config import profile_path

    monkeypatch.setenv("RAILNOISE_CONFIG", str(profile_path("lithium")))
    code, out, _ = run(capsys, "pendular")
    assert code == 0 and "20.89" in out


def test_closed_pipe_is_not_an_error():
    proc = subprocess.Popen(
        [sys.executable, "-c", "import sys; from railnoise.cli import main; sys.exit(main())",
         "response", "--profile", "lithium_noise", "--nu-max", "1000"],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    assert proc.stdout.readline().startswith(b"# driven_end=plus")
    proc.stdout.close()
    _, err = proc.communicate(timeout=60)
    assert proc.returncode == 0
    assert b"Error" not in err
