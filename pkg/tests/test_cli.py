import json

import pytest

from linedemix.cli import EXIT_BAD_CONFIG, EXIT_OK, main
from linedemix.model import Instance, generate_instance


@pytest.fixture
def instance_file(tmp_path):
    inst = generate_instance(31, 2, 3, 2.52 / 30, seed=0)
    path = tmp_path / "inst.json"
    path.write_text(inst.to_json())
    return str(path)


def test_synth_writes_instance(tmp_path):
    out = tmp_path / "inst.json"
    rc = main(["synth", "--n", "41", "--k", "2", "--s", "3",
               "--delta-min", "0.05", "--seed", "11", "--out", str(out)])
    assert rc == EXIT_OK
    inst = Instance.from_json(out.read_text())
    assert inst.n == 41
    assert len(inst.spectrum) == 2
    assert len(inst.spikes) == 3


def test_synth_infeasible_separation_is_bad_config(capsys):
    rc = main(["synth", "--n", "41", "--k", "10", "--s", "0",
               "--delta-min", "0.2"])
    assert rc == EXIT_BAD_CONFIG
    assert "error" in capsys.readouterr().err


def test_demix_recovers_instance(instance_file, tmp_path):
    out = tmp_path / "demix.json"
    rc = main(["demix", "--in", instance_file, "--lambda", "auto",
               "--out", str(out)])
    assert rc == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["score"]["exact_demix"]
    assert len(doc["estimates"]["spectrum"]) == 2
    assert doc["solver"]["dual_feasible"]


def test_denoise_auto_gamma_needs_noise(instance_file):
    # the fixture instance is noiseless, so gamma cannot be inferred
    rc = main(["denoise", "--in", instance_file, "--gamma", "auto"])
    assert rc == EXIT_BAD_CONFIG


def test_denoise_explicit_gamma(tmp_path):
    inst = generate_instance(31, 1, 0, 0.1, noise_level=0.5, seed=3)
    path = tmp_path / "noisy.json"
    path.write_text(inst.to_json())
    out = tmp_path / "denoise.json"
    rc = main(["denoise", "--in", str(path), "--gamma", "2.0", "--out", str(out)])
    assert rc == EXIT_OK
    doc = json.loads(out.read_text())
    assert len(doc["g_hat"]) == 31
    assert doc["gamma"] == 2.0


def test_greedy_subcommand(instance_file, tmp_path):
    out = tmp_path / "greedy.json"
    rc = main(["greedy", "--in", instance_file, "--out", str(out)])
    assert rc == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["converged"]
    assert doc["score"]["exact_demix"]


def test_certificate_subcommand(tmp_path):
    inst = generate_instance(101, 3, 5, 3.0 / 100, seed=0)
    path = tmp_path / "inst.json"
    path.write_text(inst.to_json())
    out = tmp_path / "cert.json"
    rc = main(["certificate", "--in", str(path), "--grid-size", "20000",
               "--out", str(out)])
    assert rc == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["valid"]
    assert doc["interpolation_err"] < 1e-8


def test_baseline_periodogram_csv(instance_file, tmp_path):
    out = tmp_path / "spec.csv"
    rc = main(["baseline", "--in", instance_file, "--method", "periodogram",
               "--format", "csv", "--out", str(out)])
    assert rc == EXIT_OK
    text = out.read_bytes().decode()  # keep CRLF line endings intact
    lines = text.split("\r\n")
    assert lines[0] == "f,magnitude"
    assert len(lines) == 8 * 31 + 2  # header + grid rows + trailing newline


def test_baseline_music_requires_order(instance_file):
    rc = main(["baseline", "--in", instance_file, "--method", "music"])
    assert rc == EXIT_BAD_CONFIG


def test_baseline_music_json(instance_file, capsys):
    rc = main(["baseline", "--in", instance_file, "--method", "music", "--k", "2"])
    assert rc == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["frequencies"]) == 2


def test_grid_subcommand_csv(tmp_path):
    config = tmp_path / "grid.json"
    config.write_text(json.dumps({
        "n_values": [31], "k_values": [1], "s_values": [1],
        "delta_values": [2.5], "lambda_values": [0.1],
        "trials": 2, "base_seed": 7, "method": "greedy",
    }))
    out = tmp_path / "grid.csv"
    rc = main(["grid", "--config", str(config), "--format", "csv",
               "--out", str(out)])
    assert rc == EXIT_OK
    text = out.read_text()
    assert text.startswith("# n=31,s=1,lambda=")
    assert "delta,1" in text


def test_grid_missing_config_is_bad_config(tmp_path):
    rc = main(["grid", "--config", str(tmp_path / "nope.json")])
    assert rc == EXIT_BAD_CONFIG


def test_grid_malformed_config_is_bad_config(tmp_path):
    config = tmp_path / "bad.json"
    config.write_text("{not json")
    rc = main(["grid", "--config", str(config)])
    assert rc == EXIT_BAD_CONFIG


def test_picket_subcommand(capsys):
    rc = main(["picket", "--n", "16"])
    assert rc == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["y_max_abs"] == 0.0
    assert doc["estimates"]["spectrum"] == []
    assert doc["estimates"]["spikes"] == []
    assert doc["exact_demix"] is False


def test_picket_non_square_is_bad_config():
    assert main(["picket", "--n", "15"]) == EXIT_BAD_CONFIG


def test_corrupt_instance_file_is_bad_config(tmp_path):
    path = tmp_path / "corrupt.json"
    path.write_text("{\"n\": 31}")
    rc = main(["demix", "--in", str(path)])
    assert rc == EXIT_BAD_CONFIG
