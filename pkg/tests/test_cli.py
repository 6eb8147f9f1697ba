import json
import math

import pandas as pd
import pytest

from tqe_intervals.cli import EXIT_GATE, EXIT_INPUT, EXIT_OK, main
from tqe_intervals.services.report import parse_json


@pytest.fixture(autouse=True)
def _isolated_settings(tmp_path, monkeypatch):
    monkeypatch.delenv("TQE_CONFIG", raising=False)
    monkeypatch.setenv("TQE_HISTORY_PATH", str(tmp_path / "history.jsonl"))


def _run_json(capsys, *argv):
    code = main([*argv, "--json"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def _write(path, text: str):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_arf_single_observation(capsys):
    code, payload = _run_json(capsys, "arf", "--y", "85.2", "--prior", "96.3", "--alpha", "0.25", "--row", "normal")
    assert code == EXIT_OK
    assert payload["interval"]["lower"] == pytest.approx(70.77)
    assert payload["interval"]["upper"] == 100.0
    assert payload["interval"]["clamped_upper"] is True
    assert payload["estimate"] == pytest.approx(90.75)


def test_arf_zero_width(capsys):
    code, payload = _run_json(capsys, "arf", "--y", "90", "--prior", "90", "--alpha", "0.25", "--row", "normal")
    assert code == EXIT_OK
    assert payload["interval"]["lower"] == payload["interval"]["upper"] == 90.0


def test_arf_unsupported_alpha(capsys):
    code = main(["arf", "--y", "85.2", "--prior", "96.3", "--alpha", "0.3", "--row", "normal"])
    err = capsys.readouterr().err
    assert code == EXIT_INPUT
    assert "--alpha" in err
    assert len(err.strip().splitlines()) == 1


def test_arf_score_outside_scale(capsys):
    code = main(["arf", "--y", "120", "--prior", "96.3", "--alpha", "0.25"])
    assert code == EXIT_INPUT
    assert "--y" in capsys.readouterr().err


def test_arf_narrow_scale_clamps_both_ends(capsys):
    code, payload = _run_json(
        capsys, "arf", "--y", "85.2", "--prior", "90", "--alpha", "0.25", "--row", "normal",
        "--scale-min", "80", "--scale-max", "95",
    )
    assert code == EXIT_OK
    assert payload["interval"]["center"] == pytest.approx(87.6)
    assert payload["interval"]["half_width"] == pytest.approx(8.64)
    assert payload["interval"]["lower"] == 80.0
    assert payload["interval"]["upper"] == 95.0
    assert payload["interval"]["clamped_lower"] and payload["interval"]["clamped_upper"]
    assert (payload["inputs"]["scale_min"], payload["inputs"]["scale_max"]) == (80.0, 95.0)


def test_tci_scale_override(capsys):
    code, payload = _run_json(
        capsys, "tci", "--scores", "76.85,81.99", "--confidence", "0.80", "--scale-min", "75", "--scale-max", "85"
    )
    assert code == EXIT_OK
    assert (payload["interval"]["lower"], payload["interval"]["upper"]) == (75.0, 85.0)


def test_score_outside_overridden_scale(capsys):
    code = main(["arf", "--y", "85.2", "--prior", "96.3", "--alpha", "0.25", "--scale-max", "90"])
    assert code == EXIT_INPUT
    assert "--prior" in capsys.readouterr().err


def test_inverted_scale_is_rejected(capsys):
    code = main(["tci", "--scores", "76.85,81.99", "--scale-min", "90", "--scale-max", "10"])
    err = capsys.readouterr().err
    assert code == EXIT_INPUT
    assert "--scale-min" in err
    assert len(err.strip().splitlines()) == 1


def test_tci_borderline_fail_gates(capsys):
    code, payload = _run_json(capsys, "tci", "--scores", "76.85,81.99", "--confidence", "0.80", "--threshold", "80")
    assert code == EXIT_GATE
    assert payload["interval"]["lower"] == pytest.approx(71.51, abs=0.01)
    assert payload["interval"]["upper"] == pytest.approx(87.33, abs=0.01)
    assert payload["verdict"]["kind"] == "BORDERLINE_FAIL"


def test_tci_identical_scores_pass(capsys):
    code, payload = _run_json(capsys, "tci", "--scores", "90,90", "--confidence", "0.95", "--threshold", "80")
    assert code == EXIT_OK
    assert payload["interval"]["half_width"] == 0.0
    assert payload["verdict"]["kind"] == "PASS"


def test_tci_three_scores(capsys):
    code, payload = _run_json(capsys, "tci", "--scores", "70,80,90", "--confidence", "0.80")
    p = 0.90
    t_df2 = math.sqrt(2.0 / (4.0 * p * (1.0 - p)) - 2.0)
    assert code == EXIT_OK
    assert payload["margin"] == pytest.approx(t_df2 * 10.0 / math.sqrt(3.0), rel=1e-10)
    assert payload["verdict"] is None


def test_tci_single_score_points_to_arf(capsys):
    code = main(["tci", "--scores", "80", "--confidence", "0.80"])
    err = capsys.readouterr().err
    assert code == EXIT_INPUT
    assert "arf" in err


def test_exit_code_ignores_formatting_flags(capsys):
    argv = ["tci", "--scores", "76.85,81.99", "--confidence", "0.80", "--threshold", "80"]
    assert main(argv) == EXIT_GATE
    assert main([*argv, "--explain"]) == EXIT_GATE
    out = capsys.readouterr().out
    assert "E = 3.078 × 3.6345 / √2 = 7.91" in out


def test_json_output_round_trips(capsys):
    main(["tci", "--scores", "76.85,81.99", "--confidence", "0.80", "--json"])
    text = capsys.readouterr().out
    report = parse_json(text)
    assert report.interval.half_width == json.loads(text)["interval"]["half_width"]


def test_comma_decimal_is_rejected(capsys):
    code = main(["tci", "--scores", "76,85;81,99", "--confidence", "0.80"])
    assert code == EXIT_INPUT
    assert "--scores" in capsys.readouterr().err


def test_tci_reads_score_file_with_provenance(tmp_path, capsys):
    path = _write(tmp_path / "scores.csv", "project_id,rater_id,score\nacme,a,76.85\nacme,b,81.99\n")
    code, payload = _run_json(capsys, "tci", "--input", path, "--confidence", "0.80")
    assert code == EXIT_OK
    assert payload["inputs"]["scores"] == [76.85, 81.99]
    assert payload["provenance"]["sources"][0].startswith(path + "#sha256:")


def test_tci_reports_bad_row_with_line(tmp_path, capsys):
    path = _write(tmp_path / "scores.csv", "project_id,rater_id,score\nacme,a,76.85\nacme,b,81,99\n")
    code = main(["tci", "--input", path])
    err = capsys.readouterr().err
    assert code == EXIT_INPUT
    assert "scores.csv" in err


def test_tci_rejects_non_numeric_score(tmp_path, capsys):
    path = _write(tmp_path / "scores.csv", "project_id,rater_id,score\nacme,a,76.85\nacme,b,high\n")
    code = main(["tci", "--input", path])
    err = capsys.readouterr().err
    assert code == EXIT_INPUT
    assert "scores.csv:3:" in err


def test_tcrit(capsys):
    assert main(["tcrit", "--df", "1", "--one-tail", "0.10"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "3.078"
    code, payload = _run_json(capsys, "tcrit", "--df", "1", "--confidence", "0.80")
    assert payload["t"] == pytest.approx(3.0777, abs=1e-4)
    assert payload["tail_probability"] == pytest.approx(0.10)


def test_tcrit_rejects_bad_df(capsys):
    assert main(["tcrit", "--df", "0", "--one-tail", "0.10"]) == EXIT_INPUT
    assert "--df" in capsys.readouterr().err


def test_tcrit_table(capsys):
    code, payload = _run_json(capsys, "tcrit", "--table", "--max-df", "3")
    assert code == EXIT_OK
    assert set(payload) == {"1", "2", "3"}
    assert payload["1"]["0.1"] == pytest.approx(3.078, abs=1e-3)


def test_kappa(capsys):
    assert main(["kappa", "--po", "1", "--pe", "0.4"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "1.00"
    code, payload = _run_json(capsys, "kappa", "--fo", "80", "--fe", "50", "--N", "100")
    assert payload["kappa"] == pytest.approx(0.6)


def test_kappa_degenerate(capsys):
    assert main(["kappa", "--po", "1", "--pe", "1"]) == EXIT_INPUT


def test_kappa_from_files(tmp_path, capsys):
    matrix = _write(tmp_path / "m.csv", "45,15\n25,15\n")
    code, by_matrix = _run_json(capsys, "kappa", "--matrix", matrix)
    assert code == EXIT_OK
    lines = ["rater_a,rater_b"] + ["x,x"] * 45 + ["x,y"] * 15 + ["y,x"] * 25 + ["y,y"] * 15
    labels = _write(tmp_path / "labels.csv", "\n".join(lines) + "\n")
    code, by_labels = _run_json(capsys, "kappa", "--labels", labels)
    assert code == EXIT_OK
    assert by_labels["kappa"] == pytest.approx(by_matrix["kappa"])
    assert by_labels["categories"] == ["x", "y"]


def test_agree(capsys):
    code, payload = _run_json(capsys, "agree", "--qs1", "76.85", "--qs2", "81.99")
    assert code == EXIT_OK
    assert payload["qs2_of_qs1"] == pytest.approx(0.933, abs=1e-3)
    assert payload["qs1_of_qs2"] == pytest.approx(0.937, abs=1e-3)


def test_history_and_decide(tmp_path, capsys):
    assert main(["history", "add", "--project", "acme", "--rater", "r1", "--score", "96.3"]) == EXIT_OK
    capsys.readouterr()
    code, payload = _run_json(
        capsys, "decide", "--project", "acme", "--scores", "85.2", "--confidence", "0.75",
        "--threshold", "80", "--record",
    )
    assert code == EXIT_OK
    assert payload["method"] == "ARF"
    assert payload["interval"]["lower"] == pytest.approx(70.77)
    assert payload["verdict"]["kind"] == "BORDERLINE_PASS"

    code, listed = _run_json(capsys, "history", "list", "--project", "acme")
    assert [m["score"] for m in listed] == [96.3, 85.2]

    assert main(["history", "list", "--project", "acme"]) == EXIT_OK
    assert "average: 90.75" in capsys.readouterr().out


def test_decide_without_history(capsys):
    code = main(["decide", "--project", "empty", "--scores", "85.2"])
    assert code == EXIT_INPUT
    assert "--project" in capsys.readouterr().err


def test_decide_gates_on_fail(capsys):
    code, payload = _run_json(capsys, "decide", "--project", "acme", "--scores", "60,62", "--threshold", "80")
    assert code == EXIT_GATE
    assert payload["verdict"]["kind"] == "FAIL"


def test_history_import_and_flags(tmp_path, capsys):
    rows = ["project_id,rater_id,score,sample_size"]
    rows += [f"acme,r{i},{s},500" for i, s in enumerate([95, 96, 94, 97])]
    rows += ["acme,r9,60,3"]
    path = _write(tmp_path / "history.csv", "\n".join(rows) + "\n")
    assert main(["history", "import", "--input", path]) == EXIT_OK
    capsys.readouterr()
    code, flags = _run_json(capsys, "history", "flags")
    assert code == EXIT_OK
    assert {f["flag"] for f in flags} == {"OUTLIER", "SMALL_TEXT_SAMPLE"}
    assert all(f["measurement"]["score"] == 60.0 for f in flags)


def test_coverage_rejects_zero_trials(tmp_path, capsys):
    scenario = _write(
        tmp_path / "scenario.toml",
        "[scenario]\ntrue_mean = 80.0\ntrue_stddev = 5.0\nn_observations = 2\n"
        "confidence = 0.80\ntrials = 0\n",
    )
    assert main(["coverage", "--config", scenario]) == EXIT_INPUT
    assert "trials" in capsys.readouterr().err


def test_coverage_rejects_unknown_key(tmp_path, capsys):
    scenario = _write(
        tmp_path / "scenario.json",
        json.dumps({"true_mean": 80, "true_stddev": 5, "n_observations": 2, "confidence": 0.8,
                    "trials": 100, "colour": "blue"}),
    )
    assert main(["coverage", "--config", scenario]) == EXIT_INPUT


def test_coverage_rejects_seed_beyond_generator_key(tmp_path, capsys):
    scenario = _write(
        tmp_path / "scenario.json",
        json.dumps({"true_mean": 80, "true_stddev": 5, "n_observations": 2, "confidence": 0.8,
                    "trials": 100, "seed": 2**130}),
    )
    assert main(["coverage", "--config", scenario]) == EXIT_INPUT
    err = capsys.readouterr().err
    assert "seed" in err
    assert len(err.strip().splitlines()) == 1


def test_coverage_writes_one_row_csv(tmp_path, capsys):
    scenario = _write(
        tmp_path / "scenario.toml",
        "[scenario]\ntrue_mean = 80.0\ntrue_stddev = 5.0\nn_observations = 3\n"
        "confidence = 0.90\ntrials = 5000\nseed = 3\n",
    )
    out_csv = tmp_path / "coverage.csv"
    assert main(["coverage", "--config", scenario, "--csv", str(out_csv)]) == EXIT_OK
    table = pd.read_csv(out_csv)
    assert list(table.columns) == ["n", "coverage", "mean_halfwidth", "relative_margin"]
    assert list(table["n"]) == [3]
    assert table.loc[0, "relative_margin"] == pytest.approx(table.loc[0, "mean_halfwidth"] / 80.0)


def test_coverage_and_sweep(tmp_path, capsys):
    scenario = _write(
        tmp_path / "scenario.toml",
        "[scenario]\ntrue_mean = 80.0\ntrue_stddev = 5.0\nn_observations = 2\n"
        "confidence = 0.80\ntrials = 20000\nseed = 7\n",
    )
    code, payload = _run_json(capsys, "coverage", "--config", scenario, "--workers", "2")
    assert code == EXIT_OK
    assert payload["empirical_coverage"] == pytest.approx(0.80, abs=0.02)
    assert payload["scenario"]["workers"] == 2

    out_csv = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", scenario, "--n", "2,3,5", "--output", str(out_csv)]) == EXIT_OK
    table = pd.read_csv(out_csv)
    assert list(table.columns) == ["n", "coverage", "mean_halfwidth", "relative_margin"]
    assert list(table["n"]) == [2, 3, 5]


def test_settings_file(tmp_path, capsys):
    settings = _write(tmp_path / "tqe.toml", "[tqe]\nconfidence = 0.90\npass_threshold = 70.0\n")
    code, payload = _run_json(capsys, "tci", "--scores", "76.85,81.99", "--threshold", "70", "--settings", settings)
    assert code == EXIT_OK
    assert payload["interval"]["confidence"] == 0.90


def test_invalid_settings_file(tmp_path, capsys):
    settings = _write(tmp_path / "tqe.toml", "[tqe]\nscale_min = 10.0\nscale_max = 5.0\n")
    assert main(["kappa", "--po", "1", "--pe", "0.4", "--settings", settings]) == EXIT_INPUT
    assert "tqe.toml" in capsys.readouterr().err


def test_missing_subcommand_exits_with_usage_error(capsys):
    assert main([]) == EXIT_INPUT
