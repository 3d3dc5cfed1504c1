"""CLI contract: reports, exit codes, determinism, schema validity."""

import json
from importlib import resources

import jsonschema

from conexa.cli import main
from conexa.serialize import canonical_json, device_to_dict, state_to_dict
from conexa.devices import builtin_device
from conexa.quantum import builtin_state


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def load_report(out: str) -> dict:
    return json.loads(out)


def validate_schema(report: dict) -> None:
    schema = json.loads(
        resources.files("conexa").joinpath("schemas/report.schema.json").read_text()
    )
    jsonschema.validate(report, schema)


def test_analyze_state_ghz(capsys):
    code, out, _ = run_cli(capsys, "analyze-state", "--builtin", "GHZ", "--seed", "7")
    assert code == 0
    report = load_report(out)
    validate_schema(report)
    result = report["result"]
    assert result["orders"]["omega_c"] == 1
    gi = result["structures"]["GI"]["connected"]
    assert gi == [[], ["1"], ["2"], ["3"], ["1", "2", "3"]]
    assert result["classes"]["123"]["class"] == "GLOBALLY_ENTANGLED"
    assert report["seed"] == 7


def test_analyze_state_structure_filter(capsys):
    code, out, _ = run_cli(
        capsys, "analyze-state", "--builtin", "EPR", "--seed", "1", "--structures", "GI,MT"
    )
    assert code == 0
    report = load_report(out)
    assert sorted(report["result"]["structures"]) == ["GI", "MT"]


def test_analyze_state_requires_seed(capsys):
    code, _, err = run_cli(capsys, "analyze-state", "--builtin", "GHZ")
    assert code == 2
    assert "seed" in err


def test_analyze_density_ghz(capsys):
    code, out, _ = run_cli(capsys, "analyze-density", "--builtin", "GHZ")
    assert code == 0
    report = load_report(out)
    validate_schema(report)
    result = report["result"]
    assert result["structures"]["S"]["connected"] == [
        [],
        ["1"],
        ["2"],
        ["3"],
        ["1", "2", "3"],
    ]
    assert result["orders"]["omega_f"] == 1
    assert result["subsets"]["123"]["quality"] == "EXACT"


def test_analyze_density_from_file(tmp_path, capsys):
    from conexa.quantum import partial_trace
    from conexa.serialize import density_to_dict

    rho = partial_trace(builtin_state("GHZ").density(), [0, 1])
    path = tmp_path / "rho.json"
    path.write_text(json.dumps(density_to_dict(rho)))
    code, out, _ = run_cli(capsys, "analyze-density", "--file", str(path))
    assert code == 0
    report = load_report(out)
    validate_schema(report)
    subsets = report["result"]["subsets"]
    assert subsets["12"]["completely_correlated"] is True
    assert subsets["12"]["completely_entangled"] is False


def test_analyze_device_builtin_k(capsys):
    code, out, _ = run_cli(capsys, "analyze-device", "--builtin", "K")
    assert code == 0
    report = load_report(out)
    validate_schema(report)
    result = report["result"]
    assert result["realizations"] == 1048576
    assert result["structures"]["NL"]["connected"] == [
        [],
        ["1"],
        ["2"],
        ["3"],
        ["1", "2", "3"],
    ]
    assert result["structures"]["do"]["connected"] == [[], ["1"], ["2"], ["3"]]
    assert result["orders"]["ludic"].startswith("excluded")


def test_analyze_device_cap_exit_code(capsys):
    # cap below the locality search space: generic resource failure
    code, _, err = run_cli(capsys, "analyze-device", "--builtin", "K", "--cap", "10")
    assert code == 3
    assert "cap" in err
    # cap between the locality search space and the realization count: the
    # error names the offending product size
    code, _, err = run_cli(capsys, "analyze-device", "--builtin", "K", "--cap", "10000")
    assert code == 3
    assert "1048576" in err


def test_analyze_rvs_from_file(tmp_path, capsys):
    path = tmp_path / "xor.json"
    path.write_text(
        json.dumps(
            {
                "outcomes": [["0", "1"], ["0", "1"], ["0", "1"]],
                "prob": {"000": "1/4", "011": "1/4", "101": "1/4", "110": "1/4"},
            }
        )
    )
    code, out, _ = run_cli(capsys, "analyze-rvs", "--file", str(path))
    assert code == 0
    report = load_report(out)
    validate_schema(report)
    result = report["result"]
    assert result["structure"]["connected"] == [
        [],
        ["1"],
        ["2"],
        ["3"],
        ["1", "2", "3"],
    ]
    assert result["order"] == 1
    assert result["raw_generators"] == [["1", "2", "3"]]


def test_derive_device_matches_builtin_k(capsys):
    code, out, _ = run_cli(
        capsys,
        "derive-device",
        "--builtin-state",
        "K",
        "--menus",
        "Xp,Zp",
        "--recode",
        "paper",
    )
    assert code == 0
    report = load_report(out)
    validate_schema(report)
    assert report["result"]["device"] == device_to_dict(builtin_device("K"))


def test_derive_device_matches_builtin_ghz(capsys):
    code, out, _ = run_cli(
        capsys, "derive-device", "--builtin-state", "GHZ", "--menus", "ZX",
        "--recode", "paper",
    )
    assert code == 0
    report = load_report(out)
    assert report["result"]["device"] == device_to_dict(builtin_device("GHZ"))


def test_order_command(capsys):
    code, out, _ = run_cli(capsys, "order", "--builtin", "O2", "--seed", "7")
    assert code == 0
    report = load_report(out)
    validate_schema(report)
    assert report["result"] == {"omega": 2, "omega_c": 1, "omega_f": 2}


def test_builtin_listing_and_emission(capsys):
    code, out, _ = run_cli(capsys, "builtin", "--list")
    assert code == 0
    report = load_report(out)
    assert report["result"]["states"] == ["EPR", "GHZ", "K", "O2"]
    assert report["result"]["devices"] == ["EPR", "EPR2", "GHZ", "K"]

    code, out, _ = run_cli(capsys, "builtin", "--state", "GHZ")
    assert code == 0
    assert load_report(out)["result"]["state"] == state_to_dict(builtin_state("GHZ"))


def test_malformed_json_exit_code_and_position(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"dims": [2, 2], "amplitudes": [[1, 0],')
    code, _, err = run_cli(capsys, "analyze-state", "--file", str(path), "--seed", "1")
    assert code == 2
    assert "line" in err and "column" in err


def test_unknown_builtin_exit_code(capsys):
    code, _, err = run_cli(capsys, "analyze-state", "--builtin", "W", "--seed", "1")
    assert code == 2
    assert "unknown builtin" in err


def test_byte_identical_reports(capsys):
    args = ("analyze-state", "--builtin", "GHZ", "--seed", "7")
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert first == second
    assert first == canonical_json(json.loads(first))


def test_text_format(capsys):
    code, out, _ = run_cli(
        capsys, "analyze-state", "--builtin", "EPR", "--seed", "1", "--format", "text"
    )
    assert code == 0
    assert "structures:" in out
    assert "omega" in out or "orders" in out


def test_thread_env_var_does_not_change_results(capsys, monkeypatch):
    args = ("analyze-state", "--builtin", "GHZ", "--seed", "7")
    _, serial, _ = run_cli(capsys, *args)
    monkeypatch.setenv("CONEXA_THREADS", "4")
    _, threaded, _ = run_cli(capsys, *args)
    assert serial == threaded
