import io
import json
from importlib import resources

import jsonschema
import pytest

from knowsat import THEORIES
from knowsat.cli import run

from conftest import CORPUS

SCHEMA = json.loads(resources.files("knowsat").joinpath("schema/output.schema.json").read_text())


def th(name):
    return str(THEORIES / f"{name}.th")


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_check_example_file():
    code, out, _ = call("check", th("e_enc_ex34"))
    assert code == 0
    assert "equivalent phi0 phi1: NO, witness dec(w1,w2) ~ c0" in out.splitlines()
    assert "equivalent psi0 psi1: YES" in out.splitlines()
    assert "deducible phi0 : <k,k>: YES, recipe <w2,w2>" in out.splitlines()
    assert "deducible secret : s: NO" in out.splitlines()


def test_saturate_prints_golden_state():
    code, out, _ = call("saturate", th("e_enc_ex34"), "--frame", "phi0")
    assert code == 0
    assert out.splitlines() == [
        "saturate phi0: SATURATED (2 facts, 2 equations)",
        "  fact w1 |> enc(c0,k)",
        "  fact w2 |> k",
        "  equation dec(w1,w2) ~ c0",
        "  equation enc(c0,w2) ~ w1",
    ]


def test_unknown_frame():
    code, _, err = call("saturate", th("e_enc_ex34"), "--frame", "nope")
    assert code == 1 and "unknown frame nope" in err


def test_failure_exit_code():
    code, out, _ = call("check", th("e_mal"))
    assert code == 2
    assert "FAILED: no rule applies except A.3 on rule mal(enc(x,y),z) -> enc(z,y)" in out


def test_budget_exit_code():
    code, out, _ = call("check", th("e_ex71"), "--max-steps", "100")
    assert code == 3 and "INDETERMINATE: step budget of 100 exhausted" in out


def test_missing_file_and_bad_input(tmp_path):
    assert call("check", str(tmp_path / "none.th"))[0] == 1
    bad = tmp_path / "bad.th"
    bad.write_text("rule f(x) -> x;")
    code, _, err = call("check", str(bad))
    assert code == 1 and "bad.th:1:6: error" in err


def test_bad_arguments():
    assert call()[0] == 1
    assert call("check", th("e_enc"), "--max-steps", "-1")[0] == 1
    assert call("oracle", th("e_enc"), "--cap", "0")[0] == 1


def test_classify_text():
    code, out, _ = call("classify", th("e_enc"))
    assert code == 0 and out.splitlines()[0] == "classify: weakly subterm, layered"
    code, out, _ = call("classify", th("e_mal"))
    assert out.splitlines()[0] == "classify: not-layered"


def test_trace_goes_to_stderr():
    code, out, err = call("saturate", th("e_enc_ex34"), "--frame", "phi0", "--trace")
    events = [json.loads(line) for line in err.splitlines()]
    assert events and all(e["frame"] == "phi0" for e in events)
    assert "fact w1 |> enc(c0,k)" in out


def test_convergence_report():
    code, out, _ = call("check", th("e_enc"), "--check-convergence")
    assert out.splitlines()[0] == "convergence: pass"


def test_oracle_agrees_on_examples():
    code, out, _ = call("oracle", th("e_enc_ex34"), "--depth", "3")
    assert code == 0 and "MISMATCH" not in out
    assert "equivalent phi0 phi1: engine INEQUIVALENT, oracle test c0 ~ dec(w1,w2)" in out


def test_bench():
    code, out, _ = call("bench", "--n", "2", "--n", "3")
    assert code == 0
    assert out.splitlines() == ["bench n=2: NO, witness size 14", "bench n=3: NO, witness size 30"]


def test_output_is_byte_identical():
    assert call("check", th("e_hom_ex35")) == call("check", th("e_hom_ex35"))


def test_soundness_flag_on_corpus():
    for name in CORPUS:
        code, _, err = call("check", th(name), "--debug-assert-soundness", "--max-steps", "2000")
        assert code in (0, 2, 3) and "soundness" not in err, name


@pytest.mark.parametrize("argv", [
    ["check", th(n)] for n in CORPUS] + [
    ["saturate", th("e_enc_ex34"), "--frame", "phi0", "--check-convergence"],
    ["classify", th("e_hom")],
    ["oracle", th("e_enc_ex34"), "--depth", "2"],
    ["bench", "--n", "3", "--timing"],
])
def test_json_validates(argv):
    code, out, _ = call(*argv, "--json", "--max-steps", "2000")
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["exit_code"] == code


def test_schema_rejects_malformed_output():
    code, out, _ = call("check", th("e_enc_ex34"), "--json")
    doc = json.loads(out)
    doc["results"][0]["status"] = "maybe"
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc, SCHEMA)
