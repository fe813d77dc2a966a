"""Runner, serialization, config and CLI tests."""

import json

import pytest

from twistlab.cli import main
from twistlab.errors import TwistlabError, UnknownMapError, WitnessDivergence
from twistlab.report import (
    CSV_HEADER,
    ExperimentConfig,
    Tolerances,
    config_from_ini,
    load_bundle_dict,
    run_suite,
    serialize,
)


def _small(map_name="kothe", dims=(16,), samples=25, seed=7):
    return ExperimentConfig(map_name=map_name, dims=dims, samples=samples,
                            seed=seed)


def test_config_validation():
    with pytest.raises(UnknownMapError):
        ExperimentConfig(map_name="bogus")
    with pytest.raises(TwistlabError):
        ExperimentConfig(map_name="kp", dims=())
    with pytest.raises(TwistlabError):
        ExperimentConfig(map_name="kp", dims=(64, 16))
    with pytest.raises(TwistlabError):
        ExperimentConfig(map_name="kp", samples=0)
    with pytest.raises(TwistlabError):
        ExperimentConfig(map_name="kp", sampler="quantum")


def test_config_from_ini(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(
        "[experiment]\n"
        "map = translation\n"
        "dims = 16, 32\n"
        "samples = 11\n"
        "seed = 99\n"
        "sampler = structured\n"
        "\n"
        "[tolerances]\n"
        "tol_lux = 1e-9\n"
        "noise_floor = 1e-11\n"
    )
    cfg = config_from_ini(str(path))
    assert cfg.map_name == "translation"
    assert cfg.dims == (16, 32)
    assert cfg.samples == 11
    assert cfg.seed == 99
    assert cfg.sampler == "structured"
    assert cfg.tolerances == Tolerances(tol_lux=1e-9, noise_floor=1e-11)


def test_config_from_ini_missing_file(tmp_path):
    with pytest.raises(TwistlabError):
        config_from_ini(str(tmp_path / "missing.ini"))


def test_run_suite_kothe_exact_checks():
    bundle = run_suite(_small("kothe", dims=(16,), samples=40))
    assert bundle.ok
    names = {c.name for c in bundle.checks}
    assert "diagonal-inversion" in names
    assert "diagonal-duality" in names
    for check in bundle.checks:
        if check.name in ("diagonal-inversion", "diagonal-duality",
                          "selector-identities"):
            assert check.max_deviation <= 1e-12


def test_run_suite_kp_growth_law_values():
    bundle = run_suite(_small("kp", dims=(16, 64), samples=30))
    growth = [c for c in bundle.checks if c.name == "kp-growth-law"]
    assert len(growth) == 2
    assert all(c.passed for c in growth)


def test_run_suite_deterministic_payload():
    cfg = _small("kp", dims=(16,), samples=40)
    b1 = run_suite(cfg)
    b2 = run_suite(cfg)
    assert b1.numeric_payload() == b2.numeric_payload()
    b3 = run_suite(_small("kp", dims=(16,), samples=40, seed=8))
    assert b3.numeric_payload() != b1.numeric_payload()


def test_run_suite_isolates_witness_divergence(monkeypatch):
    import twistlab.witnesses as witnesses

    def exploding(omega):
        raise WitnessDivergence("synthetic failure", {"why": "test"})

    monkeypatch.setattr(witnesses, "kp_witness", exploding)
    bundle = run_suite(_small("kp", dims=(16,), samples=25))
    assert any("witness diverged" in f or "synthetic" in f for f in bundle.failures)
    # the non-witness parts of the suite still ran
    assert any(c.name == "kp-growth-law" for c in bundle.checks)
    assert not bundle.ok


def test_serialize_json_round_trip(tmp_path):
    bundle = run_suite(_small("translation", dims=(16,), samples=20))
    path = str(tmp_path / "bundle.json")
    serialize(bundle, "json", path)
    loaded = load_bundle_dict(path)
    original = bundle.to_dict()
    assert loaded == json.loads(json.dumps(original))  # exact round trip
    assert loaded["config"]["map"] == "translation"


def test_serialize_csv_layout(tmp_path):
    bundle = run_suite(_small("kothe", dims=(16,), samples=20))
    path = str(tmp_path / "bundle.csv")
    serialize(bundle, "csv", path)
    lines = open(path).read().strip().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + len(bundle.reports)
    first = lines[1].split(",")
    assert first[1] == "16"


def test_serialize_empty_bundle(tmp_path):
    from twistlab.report import ReportBundle

    bundle = ReportBundle(config=_small())
    path = str(tmp_path / "empty.json")
    serialize(bundle, "json", path)
    loaded = load_bundle_dict(path)
    assert loaded["reports"] == [] and loaded["checks"] == []
    assert loaded["config"]["map"] == "kothe"


def test_serialize_rejects_unknown_format(tmp_path):
    bundle = run_suite(_small(samples=5))
    with pytest.raises(TwistlabError):
        serialize(bundle, "xml", str(tmp_path / "x.xml"))


# -- CLI ----------------------------------------------------------------------


def test_cli_estimate_exit_zero(tmp_path, capsys):
    out = str(tmp_path / "bundle.json")
    code = main(["estimate", "kothe", "--dims", "16", "--samples", "10",
                 "--seed", "3", "--out", out])
    assert code == 0
    captured = capsys.readouterr().out
    assert "diagonal-inversion" in captured
    assert load_bundle_dict(out)["config"]["dims"] == [16]


def test_cli_sweep_multiple_dims(tmp_path, capsys):
    code = main(["sweep", "translation", "--dims", "16,32", "--samples", "10"])
    assert code == 0
    assert "@32" in capsys.readouterr().out


def test_cli_report_round_trip(tmp_path, capsys):
    out = str(tmp_path / "bundle.json")
    assert main(["estimate", "translation", "--dims", "16", "--samples", "8",
                 "--out", out]) == 0
    capsys.readouterr()
    assert main(["report", out]) == 0
    assert "translation" in capsys.readouterr().out


def test_cli_config_file(tmp_path, capsys):
    ini = tmp_path / "exp.ini"
    ini.write_text("[experiment]\ndims = 16\nsamples = 9\nseed = 4\n")
    code = main(["estimate", "kothe", "--config", str(ini)])
    assert code == 0
    assert "seed=4" in capsys.readouterr().out


def test_cli_csv_output(tmp_path):
    out = str(tmp_path / "bundle.csv")
    assert main(["estimate", "kothe", "--dims", "16", "--samples", "8",
                 "--format", "csv", "--out", out]) == 0
    assert open(out).readline().strip() == ",".join(CSV_HEADER)
