import csv
import json

import pytest

from giantkerr.cli import EXIT_INVALID, EXIT_OK, EXIT_UNCONVERGED, main


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _write(tmp_path, data, name="cfg.json"):
    f = tmp_path / name
    f.write_text(json.dumps(data))
    return str(f)


SMALL_MAP = {"sweep": {"E_p": [0.05, 0.2], "Omega_c": [300, 731.3]}, "solver": {"verify_truncation": False}}


def test_levels(tmp_path, capsys):
    assert main(["levels", "--preset", "prototype", "--out", str(tmp_path)]) == EXIT_OK
    report = json.loads((tmp_path / "levels.json").read_text())
    assert report["coresonance"]["omega23_equals_2J"]
    assert report["warnings"]
    assert len(_rows(tmp_path / "levels.csv")) == 12
    assert (tmp_path / "manifest.json").exists()


def test_table1(tmp_path):
    assert main(["table1", "--preset", "table1", "--out", str(tmp_path)]) == EXIT_OK
    rows = _rows(tmp_path / "table1.csv")
    assert len(rows) == 6
    assert "not recomputable" in rows[4]["note"]


def test_steady(tmp_path):
    assert main(["steady", "--preset", "fig3", "--out", str(tmp_path)]) == EXIT_OK
    s = json.loads((tmp_path / "steady.json").read_text())
    assert s["converged"] and s["g2_zero"] < 1e-6


def test_map_and_manifest_rerun(tmp_path):
    cfg = _write(tmp_path, SMALL_MAP)
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["g2map", "--preset", "fig3", "--config", cfg, "--out", str(first)]) == EXIT_OK
    assert (first / "g2map.png").stat().st_size > 0
    assert len(_rows(first / "g2map.csv")) == 4
    assert main(["g2map", "--config", str(first / "manifest.json"), "--out", str(second),
                 "--no-plot"]) == EXIT_OK
    for name in ("g2map.csv", "g2map_locus.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    assert not (second / "g2map.png").exists()


def test_eta_fit_from_locus(tmp_path):
    cfg = _write(tmp_path, SMALL_MAP)
    main(["g2map", "--preset", "fig3", "--config", cfg, "--out", str(tmp_path), "--no-plot"])
    fit = _write(tmp_path, {"fit": {"locus_csv": str(tmp_path / "g2map_locus.csv")}}, "fit.json")
    assert main(["eta-fit", "--preset", "fig3", "--config", fit, "--out", str(tmp_path)]) == EXIT_OK
    rows = _rows(tmp_path / "eta_fit.csv")
    assert rows[0]["status"] == "ok"
    assert 1e3 <= float(rows[0]["eta_over_kappa"]) <= 1e4


def test_si_output_columns(tmp_path):
    cfg = _write(tmp_path, {**SMALL_MAP, "kappa_si": 1000.0})
    assert main(["g2map", "--preset", "fig3", "--config", cfg, "--out", str(tmp_path), "--si",
                 "--no-plot"]) == EXIT_OK
    rows = _rows(tmp_path / "g2map.csv")
    assert float(rows[0]["E_p_rad_s"]) == pytest.approx(50.0)


def test_squeeze_and_g2tau(tmp_path):
    cfg = _write(tmp_path, {"sweep": {"omega": [-50, 0, 50], "tau": {"start": 0, "stop": 20, "num": 201}}})
    assert main(["squeeze", "--preset", "fig4b", "--config", cfg, "--out", str(tmp_path)]) == EXIT_OK
    s = json.loads((tmp_path / "squeeze.json").read_text())
    assert s["min_S"] < 1
    assert main(["g2tau", "--preset", "fig3", "--config", cfg, "--out", str(tmp_path),
                 "--no-plot"]) == EXIT_OK
    assert len(_rows(tmp_path / "g2tau.csv")) == 201


def test_invalid_inputs_exit_2(tmp_path):
    assert main(["steady", "--out", str(tmp_path)]) == EXIT_INVALID
    assert main(["g2map", "--preset", "fig3", "--si", "--out", str(tmp_path)]) == EXIT_INVALID
    bad = _write(tmp_path, {"model": {"gamma": {"12": 1.0}}})
    assert main(["steady", "--preset", "fig3", "--config", bad, "--out", str(tmp_path)]) == EXIT_INVALID
    assert main(["levels", "--preset", "fig3", "--out", str(tmp_path)]) == EXIT_INVALID


def test_unconverged_exit_3(tmp_path):
    cfg = _write(tmp_path, {"model": {"g1": 0, "g2": 0, "E_p": 3.0}, "solver": {"N_max": 4, "N_max_limit": 6}})
    assert main(["steady", "--preset", "fig3", "--config", cfg, "--out", str(tmp_path)]) == EXIT_UNCONVERGED
