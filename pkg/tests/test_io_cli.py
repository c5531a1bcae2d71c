"""Instance files, report files, the command-line surface, exit codes."""

import json

import pytest

import gradedbv as g
from gradedbv.checks import Window
from gradedbv.cli import main
from gradedbv.reportio import (InstanceFileError, load_instance,
                               save_instance)


def _statuses(instance, suite=g.BVUI_FULL):
    return [(r.relation, r.status)
            for r in g.check_structure(instance, suite, Window())]


# ---------------------------------------------------------------------------
# instance files
# ---------------------------------------------------------------------------

def test_roundtrip_three_dim(tmp_path):
    original = g.builtin_model("three-dim")
    path = tmp_path / "three.json"
    save_instance(original, path)
    loaded = load_instance(path)
    assert _statuses(loaded) == _statuses(original)
    assert all(s == "pass" for _, s in _statuses(loaded))
    # byte determinism of the serialization
    path2 = tmp_path / "again.json"
    save_instance(loaded, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_roundtrip_frobenius_model(tmp_path):
    original = g.sphere_frobenius_model(3)
    path = tmp_path / "frob.json"
    save_instance(original, path)
    loaded = load_instance(path)
    assert loaded.has_counit
    reports = g.check_structure(loaded, g.FROBENIUS_FULL, Window())
    assert all(r.status == "pass" for r in reports)


def _minimal_doc(**overrides):
    doc = {
        "name": "t",
        "field": "Q",
        "lambda_degree": -1,
        "basis": [{"name": "1", "degree": 0}],
        "mu": [{"inputs": ["1", "1"], "output": [{"name": "1", "coeff": 1}]}],
        "lambda": [],
        "Delta": [],
        "eta": [{"name": "1", "coeff": 1}],
    }
    doc.update(overrides)
    return doc


def _write(tmp_path, doc, name="inst.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_even_lambda_degree_rejected(tmp_path):
    path = _write(tmp_path, _minimal_doc(lambda_degree=-2))
    with pytest.raises(InstanceFileError) as err:
        load_instance(path)
    assert any("odd" in p for p in err.value.problems)


def test_all_violations_reported_not_only_first(tmp_path):
    doc = _minimal_doc(
        lambda_degree=0,
        mu=[{"inputs": ["1", "ghost"], "output": [{"name": "1", "coeff": 1}]}],
        Delta=[{"inputs": ["1"], "output": [{"name": "1", "coeff": 1}]}])
    path = _write(tmp_path, doc)
    with pytest.raises(InstanceFileError) as err:
        load_instance(path)
    text = "\n".join(err.value.problems)
    assert "odd" in text            # even coproduct degree
    assert "ghost" in text          # undeclared name
    assert "degree" in text         # operator breaks degree additivity
    assert len(err.value.problems) >= 3


def test_parse_error_reports_location(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"name": "x", ')
    with pytest.raises(InstanceFileError) as err:
        load_instance(path)
    assert "line" in err.value.problems[0]


def test_empty_mu_loads_and_unit_fails(tmp_path):
    path = _write(tmp_path, _minimal_doc(mu=[]))
    inst = load_instance(path)
    reports = g.check_structure(inst, ("Unit",), Window())
    assert reports[0].status == "fail"
    key, group, residual = reports[0].first_witness()
    assert key == ("1",)
    assert str(residual) == "-1"


def test_counit_degree_validation(tmp_path):
    doc = _minimal_doc(
        basis=[{"name": "1", "degree": 0}, {"name": "x", "degree": -3}],
        epsilon=[{"name": "x", "coeff": 1}])
    path = _write(tmp_path, doc)
    with pytest.raises(InstanceFileError) as err:
        load_instance(path)
    assert any("counit" in p for p in err.value.problems)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_exit_code_matrix_models_by_suites():
    # with a zero coproduct the Frobenius identities hold vacuously and
    # the counit checks are skipped; a nonzero non-Frobenius coproduct
    # fails the copairing reconstruction
    expected_frobenius = {"trivial": 0, "exterior": 0, "three-dim": 3,
                          "sphere:3": 3, "sphere-frob:3": 0}
    for model in ("trivial", "exterior", "three-dim", "sphere:3",
                  "sphere-frob:3"):
        for suite in ("bvui", "consequences", "all"):
            assert main(["check", model, "--suite", suite, "--window", "2",
                         "--window3", "2"]) == 0, (model, suite)
        got = main(["check", model, "--suite", "frobenius", "--window", "2",
                    "--window3", "2"])
        assert got == expected_frobenius[model], model


def test_check_sphere_full_suite_window_four():
    assert main(["check", "sphere:3", "--suite", "all", "--window", "4"]) == 0


def test_check_suites_on_sphere():
    for suite in ("bvui", "consequences"):
        assert main(["check", "sphere:3", "--suite", suite, "--window", "2",
                     "--window3", "2"]) == 0
    # epsilon relations are skipped on an instance without a counit
    assert main(["check", "sphere:3", "--suite", "frobenius", "--window", "2",
                 "--window3", "2"]) == 3  # Frobenius relation fails: not Frobenius


def test_eval_output_format(capsys):
    assert main(["eval", "sphere:3", "--expr", "lambda . Delta . mu",
                 "--input", "AU^1 (x) U^1"]) == 0
    out = capsys.readouterr().out.strip()
    assert out == "-2*1(x)A + 2*A(x)1"


def test_eval_scalar_input(capsys):
    assert main(["eval", "sphere:3", "--expr", "eta", "--input", "1"]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_double_command_and_check_roundtrip(tmp_path):
    saved = tmp_path / "double.json"
    assert main(["double", "trivial", "--save", str(saved)]) == 0
    assert main(["check", str(saved), "--suite", "frobenius"]) == 0


def test_double_command_rejects_bad_input(capsys):
    assert main(["double", "sphere-frob:3"]) == 2
    assert "rejected" in capsys.readouterr().err


def test_gysin_command():
    assert main(["gysin", "sphere:3", "--window", "3"]) == 0
    assert main(["gysin", "trivial"]) == 0


def test_mutate_exit_codes():
    assert main(["mutate", "sphere:3", "--mutation", "lambda-u-flip",
                 "--window", "2", "--window3", "2"]) == 0
    assert main(["mutate", "sphere:3", "--mutation", "delta-au-doubled",
                 "--window", "2", "--window3", "2"]) == 0
    assert main(["mutate", "sphere:3", "--mutation", "identity",
                 "--window", "2", "--window3", "2"]) == 0
    # over F2 the sign flip is invisible: the expected failure is missing
    assert main(["mutate", "sphere:3", "--mutation", "lambda-u-flip",
                 "--field", "Fp:2", "--window", "2", "--window3", "2"]) == 4


def test_validation_exit_code(tmp_path):
    path = _write(tmp_path, _minimal_doc(lambda_degree=0))
    assert main(["check", str(path)]) == 2


def test_usage_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["check"])
    assert err.value.code == 64
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 64


def test_missing_file_exit_code():
    assert main(["check", "no-such-file.json"]) == 2


def test_bad_expression_exit_code():
    assert main(["eval", "sphere:3", "--expr", "mu . (", "--input", "1"]) == 64


def test_reports_byte_identical_across_runs_and_threads(tmp_path):
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    argv = ["check", "sphere:3", "--suite", "bvui", "--window", "2",
            "--window3", "2"]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--threads", "4", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    doc = json.loads(out1.read_text())
    assert doc["engine"].startswith("gradedbv")
    assert doc["summary"]["fail"] == 0
    assert all(r["description"] for r in doc["reports"])


def test_relation_failure_exit_code(tmp_path):
    path = _write(tmp_path, _minimal_doc(mu=[]))
    assert main(["check", str(path), "--suite", "bvui"]) == 3


def test_field_flag_runs_suite_over_fp():
    assert main(["check", "sphere:3", "--suite", "bvui", "--field", "Fp:101",
                 "--window", "2", "--window3", "2"]) == 0


def _gysin_doc():
    # basis {1, z, w} with Delta z = w; classes {c} with E(z) = c, M(c) = w
    return {
        "name": "gy",
        "field": "Q",
        "lambda_degree": -1,
        "basis": [{"name": "1", "degree": 0}, {"name": "z", "degree": -2},
                  {"name": "w", "degree": -1}],
        "mu": [{"inputs": ["1", "1"], "output": [{"name": "1", "coeff": 1}]},
               {"inputs": ["1", "z"], "output": [{"name": "z", "coeff": 1}]},
               {"inputs": ["z", "1"], "output": [{"name": "z", "coeff": 1}]},
               {"inputs": ["1", "w"], "output": [{"name": "w", "coeff": 1}]},
               {"inputs": ["w", "1"], "output": [{"name": "w", "coeff": 1}]}],
        "lambda": [],
        "Delta": [{"inputs": ["z"], "output": [{"name": "w", "coeff": 1}]}],
        "eta": [{"name": "1", "coeff": 1}],
        "gysin": {
            "basis": [{"name": "c", "degree": -2}],
            "E": [{"inputs": ["z"], "output": [{"name": "c", "coeff": 1}]}],
            "M": [{"inputs": ["c"], "output": [{"name": "w", "coeff": 1}]}],
        },
    }


def test_user_supplied_gysin_data_from_file(tmp_path):
    from gradedbv.reportio import load_gysin
    path = _write(tmp_path, _gysin_doc(), "gy.json")
    inst = load_instance(path)
    data = load_gysin(path, inst)
    assert data is not None
    assert data.validate(inst, Window())
    assert main(["gysin", str(path)]) == 0


def test_user_supplied_gysin_data_rejected_when_inconsistent(tmp_path):
    doc = _gysin_doc()
    doc["gysin"]["M"] = [{"inputs": ["c"],
                          "output": [{"name": "w", "coeff": 2}]}]
    path = _write(tmp_path, doc, "gy-bad.json")
    assert main(["gysin", str(path)]) == 2


def test_bad_model_parameter_is_a_usage_error(capsys):
    assert main(["check", "sphere:4"]) == 64
    assert "odd n" in capsys.readouterr().err


def test_eval_over_a_prime_field(capsys):
    assert main(["eval", "sphere:3", "--expr", "lambda . Delta . mu",
                 "--input", "AU^1 (x) U^1", "--field", "Fp:101"]) == 0
    assert capsys.readouterr().out.strip() == "99*1(x)A + 2*A(x)1"


def test_rule_generated_instances_cannot_be_serialized(tmp_path):
    import gradedbv as g
    with pytest.raises(g.EngineError):
        save_instance(g.sphere_model(3), tmp_path / "nope.json")
