import json
from pathlib import Path

import pytest

from app.cli import EXIT_USAGE, SCHEMA_FILE, build_config, build_parser, main
from app.models.schemas import DomainSpec, ExperimentConfig, ExperimentParameters, OutputPaths
from app.services.experiments import EXPERIMENTS

ROOT = Path(__file__).resolve().parents[1]

LEMMA1_ARGS = ["lemma1", "--degrees", "4,8", "--g-family", "scaled_identity"]


def test_parser_knows_every_experiment():
    parser = build_parser()
    for name in EXPERIMENTS:
        assert parser.parse_args([name]).experiment == name
    with pytest.raises(SystemExit) as exc:
        parser.parse_args(["theorem9"])
    assert exc.value.code == EXIT_USAGE


def test_flags_override_config_file():
    path = ROOT / "configs" / "theorem4-square.json"
    args = build_parser().parse_args(["theorem4", "--config", str(path), "--rho", "0.1", "--jobs", "2"])
    config = build_config(args)
    assert config.parameters.rho == 0.1
    assert config.parameters.p == 3.0
    assert config.parameters.domain.kind == "rectangle"
    assert config.parameters.domain.half_width == 1.0
    assert config.jobs == 2


def test_domain_flags():
    args = build_parser().parse_args(["dolzhenko", "--domain", "rectangle", "--half-width", "2",
                                      "--half-height", "1", "--p", "1.5"])
    domain = build_config(args).parameters.domain
    assert (domain.kind, domain.half_width, domain.half_height) == ("rectangle", 2.0, 1.0)


@pytest.mark.parametrize("path", sorted((ROOT / "configs").glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    data = json.loads(path.read_text(encoding="utf-8"))
    config = ExperimentConfig.model_validate(data)
    assert config.experiment in EXPERIMENTS


def test_schema_matches_models():
    schema = json.loads((ROOT / SCHEMA_FILE).read_text(encoding="utf-8"))
    properties = schema["properties"]
    assert set(properties) == set(ExperimentConfig.model_fields)
    assert set(properties["experiment"]["enum"]) == set(EXPERIMENTS)
    parameters = properties["parameters"]["properties"]
    assert set(parameters) == set(ExperimentParameters.model_fields)
    assert set(parameters["domain"]["properties"]) == set(DomainSpec.model_fields)
    assert set(properties["output"]["properties"]) == set(OutputPaths.model_fields)


def test_main_runs_quietly(capsys):
    assert main(LEMMA1_ARGS + ["--quiet"]) == 0
    assert capsys.readouterr().out == ""


def test_main_prints_table(capsys):
    assert main(LEMMA1_ARGS) == 0
    out = capsys.readouterr().out
    assert "lemma1.p" in out
    assert "0 violations" in out


def test_main_rejects_bad_configuration(tmp_path, capsys):
    assert main(["verify-theorem1", "--degrees", "2", "--quiet"]) == EXIT_USAGE
    mismatched = tmp_path / "config.json"
    mismatched.write_text(json.dumps({"experiment": "theorem4", "parameters": {}}), encoding="utf-8")
    assert main(["lemma1", "--config", str(mismatched), "--quiet"]) == EXIT_USAGE
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"experiment": "lemma1", "verbose": True}), encoding="utf-8")
    assert main(["lemma1", "--config", str(unknown), "--quiet"]) == EXIT_USAGE
    assert "configuration error" in capsys.readouterr().err


def test_main_reports_driver_errors():
    # p <= 2 is outside the range theorem4 covers
    assert main(["theorem4", "--rho", "0.1", "--p", "2", "--degrees", "2", "--quiet"]) == EXIT_USAGE
