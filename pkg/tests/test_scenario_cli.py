import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest

from plurienv import cli
from plurienv.errors import OptimizerExhaustedError, OracleIllPosedError
from plurienv.scenario import ScenarioError, disc_from_json, load_scenario, scenario_from_json

SCEN = Path(__file__).resolve().parents[1] / "scenarios"
MOEBIUS_HALF = json.dumps({"kind": "moebius", "coeffs": [[0.0], [1.0]], "warp": 0.5})


def run(*argv):
    buf = io.StringIO()
    code = cli.main([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def write_variant(tmp_path, base, name="s.json", **changes):
    obj = json.loads((SCEN / base).read_text())
    for path, value in changes.items():
        node = obj
        keys = path.split("__")
        for k in keys[:-1]:
            node = node[k]
        node[keys[-1]] = value
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


@pytest.mark.parametrize("name", ["scenario_a.json", "scenario_b.json", "scenario_b_absorbed.json",
                                  "psh_weight.json"])
def test_round_trip(name):
    sc = load_scenario(SCEN / name)
    canon = sc.to_json()
    assert scenario_from_json(canon).to_json() == canon
    assert scenario_from_json(json.loads(json.dumps(canon))).to_json() == canon


def test_validation_pointer(tmp_path):
    bad = write_variant(tmp_path, "scenario_b.json", points=[[0.2], [1.5]])
    with pytest.raises(ScenarioError) as info:
        load_scenario(bad)
    assert "points" in str(info.value)
    assert run("envelope", "--scenario", bad)[0] == 2
    bad2 = write_variant(tmp_path, "scenario_b.json", "t.json", omega={"psi1": {"op": "nope"}})
    assert run("envelope", "--scenario", bad2)[0] == 2


def test_functional_moebius_prints_expected_value():
    code, out = run("functional", "--scenario", SCEN / "scenario_b.json", "--disc", MOEBIUS_HALF)
    assert code == 0
    table = dict(rows(out)[1:])
    assert float(table["omega_functional"]) == pytest.approx(-0.75, abs=1e-10)
    assert float(table["riesz_area"]) == pytest.approx(float(table["riesz_boundary"]), abs=1e-3)


def test_functional_constant_disc():
    code, out = run("functional", "--scenario", SCEN / "scenario_a.json",
                    "--disc", '{"coeffs": [[0.5]]}')
    assert code == 0
    assert float(dict(rows(out)[1:])["omega_functional"]) == pytest.approx(0.75, abs=1e-14)


def test_functional_malformed_disc(capsys):
    code, _ = run("functional", "--scenario", SCEN / "scenario_b.json",
                  "--disc", '{"coeffs": [[0.0], ["x"]]}')
    assert code == 2
    assert "disc.coeffs[1][0]" in capsys.readouterr().err
    assert run("functional", "--scenario", SCEN / "scenario_b.json", "--disc", "{nope")[0] == 2
    with pytest.raises(ScenarioError):
        disc_from_json({"kind": "weird", "coeffs": [[0]]})


def test_functional_singular_center(tmp_path):
    sc = write_variant(tmp_path, "scenario_b.json",
                       omega={"psi1": {"op": "logabs", "affine": {"A": [1], "b": -0.5}}})
    assert run("functional", "--scenario", sc, "--disc", MOEBIUS_HALF)[0] == 3


def test_envelope_psh_and_determinism(tmp_path):
    a = tmp_path / "a"
    code, out = run("envelope", "--scenario", SCEN / "psh_weight.json", "--out", a, "--quiet")
    assert code == 0 and out == ""
    r = rows((a / "envelope.csv").read_text())
    assert r[0][:4] == ["re_z1", "im_z1", "status", "value"]
    assert float(r[1][3]) == pytest.approx(0.16, abs=1e-6)
    b = tmp_path / "b"
    run("envelope", "--scenario", SCEN / "psh_weight.json", "--out", b, "--quiet")
    assert (a / "envelope.csv").read_bytes() == (b / "envelope.csv").read_bytes()


def test_envelope_seventeen_point_circle(tmp_path):
    sc = write_variant(tmp_path, "scenario_b.json", optimizer={"families": [["moebius", 1]], "restarts": 2})
    pts = [[[0.5 * np.cos(t), 0.5 * np.sin(t)]] for t in np.linspace(0, 2 * np.pi, 17, endpoint=False)]
    code, out = run("envelope", "--scenario", sc, "--points", json.dumps(pts))
    assert code == 0
    r = rows(out)[1:]
    assert len(r) == 17
    vals = np.array([float(x[3]) for x in r])
    assert np.ptp(vals) <= 1e-3
    assert np.max(np.abs(vals + 0.75)) <= 0.03


def test_envelope_error_rows(tmp_path):
    sc = write_variant(tmp_path, "scenario_b.json", optimizer={"families": [["moebius", 1]], "restarts": 1},
                       omega={"psi1": {"op": "logabs", "affine": {"A": [1], "b": -0.5}}, "psi2": {"op": "normsq"}})
    code, out = run("envelope", "--scenario", sc, "--points", "[[0.5], [0.1]]")
    assert code == 3
    r = rows(out)
    assert r[1][2] == "singular_center" and r[2][2] == "ok"


def test_oracle_metadata_and_resume(tmp_path):
    psh = write_variant(tmp_path, "psh_weight.json", oracle={"res": 32, "max_iter": 1})
    code, _ = run("oracle", "--scenario", psh, "--out", tmp_path / "p", "--quiet")
    assert code == 0
    meta = json.loads((tmp_path / "p" / "oracle.json").read_text())
    assert meta["iteration_count"] == 1 and meta["residual"] < 1e-6

    bowl = write_variant(tmp_path, "scenario_a.json", "a.json", oracle={"res": 32})
    out = tmp_path / "o"
    assert run("oracle", "--scenario", bowl, "--out", out, "--quiet")[0] == 0
    assert json.loads((out / "oracle.json").read_text())["resolution"] == 32
    code, text = run("oracle", "--scenario", bowl, "--out", out, "--resume")
    assert code == 0
    meta = json.loads((out / "oracle.json").read_text())
    assert meta["resolution"] == 64
    ref = meta["refinement"]
    assert ref["max_increase"] <= 1e-3
    assert "refinement" in json.loads(text)


def test_oracle_bowl_interior():
    code, out = run("oracle", "--scenario", SCEN / "scenario_a.json")
    assert code == 0
    assert json.loads(out)["resolution"] == 128


def test_compare_pass_and_negative_control(tmp_path):
    code, out = run("compare", "--scenario", SCEN / "scenario_b.json")
    assert code == 0
    gaps = [float(r[4]) for r in rows(out)[1:]]
    assert len(gaps) == 3 and max(gaps) <= 0.05
    cheap = write_variant(tmp_path, "scenario_b.json",
                          optimizer={"families": [["polynomial", 1]], "restarts": 1, "max_fev": 3})
    code, out = run("compare", "--scenario", cheap)
    assert code == 1
    assert "0" in [r[-1] for r in rows(out)[1:]]


def test_mollify_cli(tmp_path):
    sc = write_variant(tmp_path, "psh_weight.json", mollify={"deltas": [0.2, 0.1, 0.05], "point": [0.3]})
    code, out = run("mollify", "--scenario", sc)
    assert code == 0
    r = rows(out)
    assert r[0][:2] == ["delta", "eh_delta"] and len(r) == 4
    assert all(x[4] == "1" and x[5] == "1" for x in r[1:])

    empty = write_variant(tmp_path, "psh_weight.json", "e.json", mollify={"deltas": []})
    code, out = run("mollify", "--scenario", empty, "--out", tmp_path / "e")
    assert code == 0
    assert (tmp_path / "e" / "mollify.csv").read_text().count("\n") == 1

    big = write_variant(tmp_path, "psh_weight.json", "b.json", mollify={"deltas": [1.0]})
    assert run("mollify", "--scenario", big)[0] == 2


def test_exit_codes_for_oracle_and_optimizer(monkeypatch):
    def ill(*a, **k):
        raise OracleIllPosedError("too many -inf nodes")
    monkeypatch.setattr(cli, "omega_envelope_oracle", ill)
    assert run("oracle", "--scenario", SCEN / "psh_weight.json")[0] == 4

    def exhausted(*a, **k):
        raise OptimizerExhaustedError("nothing feasible")
    monkeypatch.setattr(cli, "envelope_field", exhausted)
    assert run("envelope", "--scenario", SCEN / "psh_weight.json")[0] == 5
