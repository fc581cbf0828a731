"""Config loading, scenario validation, report assembly, exit codes."""

import json

import pytest

from fockmod.cli import (
    BUNDLED,
    SCHEMA,
    ConfigError,
    assemble_report,
    build_scenario,
    builtin_car_config,
    load_config,
    main,
    report_json,
    report_text,
    run_config,
)
from fockmod.weyl import GridSpec
from fockmod.models import SIGMA_KINDS


def tiny_config() -> dict:
    # 3-point delta model: generator 0 acts at point 0, generator 1 at
    # point 1, so wA (point 2) is untouched by every twist and wC
    # (point 0) is moved by generator 0
    return {
        "schema": SCHEMA,
        "name": "tiny",
        "grid": {"dimension": 1, "points": 3, "spacing": 1.0, "components": 1},
        "sigma": {"kind": "delta"},
        "state": "tracial",
        "truncation": 3,
        "seed": 5,
        "generators": [
            {"s0": {"shape": "point", "center": 0}},
            {
                "s0": {"shape": "point", "center": 1},
                "s1": {"shape": "values", "values": [0.0, 0.0, 0.5]},
            },
        ],
        "vectors": {
            "wA": {"profile": {"shape": "point", "center": 2}},
            "wB": {"profile": {"shape": "point", "center": 1}},
            "wC": {"profile": {"shape": "point", "center": 0}},
        },
        "checks": [
            {
                "check": "car",
                "free": [
                    [[["wA", [0, 0]]], [["wB", [0, 0]]]],
                    [[["wA", [0, 1]]], [["wA", [0, 0]]]],
                ],
                "nonfree": [[[["wC", [1, 0]]], [["wC", [0, 0]]]]],
            },
            {"check": "nonfock"},
        ],
    }


# ---------------------------------------------------------------------------
# config loading


def test_load_bundled_names():
    for name in BUNDLED:
        cfg = load_config(name)
        assert cfg["schema"] == SCHEMA
        assert cfg["name"] == name
    assert load_config("delta_locality.json")["name"] == "delta_locality"


def test_load_unknown_name():
    with pytest.raises(ConfigError, match="neither a file nor a bundled"):
        load_config("no_such_scenario")


def test_load_file_and_malformed(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(tiny_config()))
    assert load_config(str(p))["name"] == "tiny"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(str(bad))


# ---------------------------------------------------------------------------
# scenario validation


def broken(**patch):
    cfg = tiny_config()
    cfg.update(patch)
    return cfg


def test_build_scenario_vectors():
    ctx = build_scenario(tiny_config())
    assert set(ctx.vectors) == {"wA", "wB", "wC"}
    assert set(ctx.vectors["wA"].entries) == {2}
    assert ctx.truncation == 3
    assert ctx.kind == "delta"


def test_scenario_rejects_bad_schema():
    with pytest.raises(ConfigError, match="schema"):
        build_scenario(broken(schema="fockmod/0"))
    with pytest.raises(ConfigError, match="schema"):
        build_scenario(broken(schema=None))


def test_scenario_rejects_bad_truncation():
    with pytest.raises(ConfigError, match="truncation"):
        build_scenario(broken(truncation=0))
    with pytest.raises(ConfigError, match="truncation"):
        build_scenario(broken(truncation=5))


def test_scenario_rejects_bad_sigma():
    with pytest.raises(ConfigError, match="sigma.kind"):
        build_scenario(broken(sigma={"kind": "gauss"}))
    with pytest.raises(ConfigError, match="radius"):
        build_scenario(broken(sigma={"kind": "bump"}))
    with pytest.raises(ConfigError, match="sigma"):
        build_scenario(broken(sigma=None))


def test_scenario_rejects_bad_generators():
    with pytest.raises(ConfigError, match="generators"):
        build_scenario(broken(generators=[]))
    with pytest.raises(ConfigError, match=r"generators\[0\]"):
        build_scenario(broken(generators=[{"s1": {"shape": "zero"}}]))


def test_scenario_rejects_bad_vectors():
    cfg = tiny_config()
    cfg["vectors"]["wA"]["sector"] = "x"
    with pytest.raises(ConfigError, match="sector"):
        build_scenario(cfg)
    cfg = tiny_config()
    cfg["vectors"]["wA"]["component"] = 3
    with pytest.raises(ConfigError, match="component"):
        build_scenario(cfg)


def test_run_config_rejects_bad_checks():
    with pytest.raises(ConfigError, match="checks"):
        run_config(broken(checks=[]))
    with pytest.raises(ConfigError, match="unknown check"):
        run_config(broken(checks=[{"check": "entropy"}]))
    with pytest.raises(ConfigError, match="no pairs"):
        run_config(broken(checks=[{"check": "car"}]))
    with pytest.raises(ConfigError, match="unknown vector"):
        run_config(
            broken(checks=[{"check": "car", "free": [[[["zz", [0, 0]]], [["wA", [0, 0]]]]]}])
        )
    with pytest.raises(ConfigError, match="exponents"):
        run_config(
            broken(checks=[{"check": "car", "free": [[[["wA", [0]]], [["wB", [0, 0]]]]]}])
        )


# ---------------------------------------------------------------------------
# records and determinism


def test_run_config_record():
    rec = run_config(tiny_config())
    assert rec["name"] == "tiny"
    assert rec["summary"] == {"failed": 0, "passed": 2, "status": "pass", "total": 2}
    digest = rec["config"]["digest"]
    assert len(digest) == 64 and int(digest, 16) >= 0
    assert rec["config"]["seed"] == 5
    car = rec["checks"][0]
    assert car["name"] == "car"
    assert car["status"] == "pass"
    # residuals round-trip through repr to the exact double
    assert float(car["residuals"]["free_max"]) == 0.0
    assert float(car["residuals"]["nonfree_min"]) > 0.1
    assert float(rec["checks"][1]["residuals"]["gap"]) == 1.0


def test_run_config_overrides_enter_digest():
    base = run_config(tiny_config())
    seeded = run_config(tiny_config(), seed=9)
    assert seeded["config"]["seed"] == 9
    assert seeded["config"]["digest"] != base["config"]["digest"]
    trunc = run_config(tiny_config(), truncation=2)
    assert trunc["config"]["truncation"] == 2
    assert trunc["config"]["digest"] != base["config"]["digest"]


def test_report_json_deterministic():
    grid = GridSpec(dimension=1, points_per_axis=3)
    a = report_json(assemble_report([run_config(tiny_config())], grid))
    b = report_json(assemble_report([run_config(tiny_config())], grid))
    assert a == b
    parsed = json.loads(a)
    assert parsed["schema"] == SCHEMA
    assert parsed["summary"]["status"] == "pass"
    assert "conventions" in parsed


def test_report_text_shape():
    grid = GridSpec(dimension=1, points_per_axis=3)
    report = assemble_report([run_config(tiny_config())], grid)
    text = report_text(report, 0.25)
    assert "[PASS] car" in text
    assert "summary: 2 checks, 2 passed, 0 failed  [PASS]" in text
    assert "elapsed: 0.25 s" in text


# ---------------------------------------------------------------------------
# built-in batteries


def test_builtin_car_configs():
    free = nonfree = 0
    for kind in SIGMA_KINDS:
        cfg = builtin_car_config(kind)
        assert cfg["schema"] == SCHEMA
        assert cfg["sigma"]["kind"] == kind
        car = cfg["checks"][0]
        assert car["check"] == "car"
        free += len(car["free"])
        nonfree += len(car["nonfree"])
        assert builtin_car_config(kind) == cfg
        assert builtin_car_config(kind, seed=8) != cfg
    assert free == 50
    assert nonfree == 10
    with pytest.raises(ConfigError, match="no built-in"):
        builtin_car_config("gauss")


# ---------------------------------------------------------------------------
# entry point


def test_main_model_run(tmp_path):
    cfg = tmp_path / "tiny.json"
    cfg.write_text(json.dumps(tiny_config()))
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    code = main(["model", "--config", str(cfg), "--format", "json", "--out", str(out1)])
    assert code == 0
    assert main(["model", "--config", str(cfg), "--format", "json", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    report = json.loads(out1.read_text())
    assert report["summary"]["status"] == "pass"
    assert report["runs"][0]["name"] == "tiny"


def test_main_reports_failure(tmp_path):
    # the designed violation listed as free must fail the run, exit 1
    cfg = tiny_config()
    car = cfg["checks"][0]
    car["free"].append(car.pop("nonfree")[0])
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(cfg))
    out = tmp_path / "r.json"
    assert main(["model", "--config", str(p), "--format", "json", "--out", str(out)]) == 1
    report = json.loads(out.read_text())
    assert report["summary"]["status"] == "fail"
    assert report["runs"][0]["checks"][0]["witness"] is not None


def test_main_config_errors(tmp_path, capsys):
    assert main(["model", "--config", "missing_file.json"]) == 2
    err = capsys.readouterr().err
    assert "fockmod:" in err
    bad = tmp_path / "bad_schema.json"
    bad.write_text(json.dumps({"schema": "wrong"}))
    assert main(["model", "--config", str(bad)]) == 2


def test_main_usage_errors():
    with pytest.raises(SystemExit):
        main([])
    with pytest.raises(SystemExit):
        main(["model"])
    with pytest.raises(SystemExit):
        main(["model", "--config", "x", "--format", "yaml"])


def test_main_text_output(tmp_path, capsys):
    cfg = tmp_path / "tiny.json"
    cfg.write_text(json.dumps(tiny_config()))
    assert main(["model", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out
    assert "schema fockmod/1" in out


def test_main_bundled_scenario(tmp_path):
    out = tmp_path / "leb.json"
    code = main(
        ["model", "--config", "lebesgue_gauge", "--format", "json", "--out", str(out)]
    )
    assert code == 0
    report = json.loads(out.read_text())
    assert report["summary"]["status"] == "pass"
    names = [c["name"] for c in report["runs"][0]["checks"]]
    assert "covariance_phase" in names and "neutral_commutant" in names
