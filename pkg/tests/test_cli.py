import json

import numpy as np
import pytest

from fuzzyclf import kvformat
from fuzzyclf.cli import run
from fuzzyclf.dataio import read_csv_table, read_fuzzy_csv

TOY_CSV = "x:crisp,label\n-2,0\n-1,0\n1,1\n2,1\n"


@pytest.fixture
def syn(tmp_path):
    path = tmp_path / "syn.csv"
    assert run(["gen", "--n", "100", "--p", "4", "--seed", "3", "--out", str(path), "--quiet"]) == 0
    return path


def test_gen_defaults(tmp_path):
    out = tmp_path / "syn.csv"
    assert run(["gen", "--n", "2000", "--seed", "42", "--out", str(out), "--quiet"]) == 0
    ds = read_fuzzy_csv(out)
    assert (ds.m, ds.p, ds.K) == (2000, 20, 5)
    manifest = json.loads((tmp_path / "syn.csv.manifest.json").read_text())
    assert manifest["seed"] == 42 and manifest["flags"]["n"] == 2000 and manifest["command"] == "gen"


def test_manifest_reproduces_output(tmp_path):
    out = tmp_path / "a.csv"
    assert run(["gen", "--n", "60", "--p", "3", "--seed", "8", "--out", str(out), "--quiet"]) == 0
    first = out.read_bytes()
    argv = json.loads((tmp_path / "a.csv.manifest.json").read_text())["argv"]
    out.unlink()
    assert run(argv) == 0
    assert out.read_bytes() == first


def test_train_and_eval_toy(tmp_path, capsys):
    data = tmp_path / "toy.csv"
    data.write_text(TOY_CSV)
    model = tmp_path / "model.kv"
    report = tmp_path / "report.kv"
    assert run(["train", "--model", "svm", "--defuzz", "val", "--kernel", "linear", "--c", "10",
                "--in", str(data), "--out", str(model), "--quiet"]) == 0
    assert kvformat.read_kv(model)["model"] == "svm"
    assert run(["eval", "--model", str(model), "--in", str(data), "--out", str(report)]) == 0
    kv = kvformat.read_kv(report)
    assert float(kv["accuracy"]) == 1.0 and float(kv["balanced_accuracy"]) == 1.0
    assert "accuracy" in capsys.readouterr().out


def test_train_mlp_with_loss_trace(syn, tmp_path):
    model, trace = tmp_path / "mlp.kv", tmp_path / "loss.csv"
    assert run(["train", "--model", "mlp", "--in", str(syn), "--hidden", "8,8", "--epochs", "3",
                "--loss-trace", str(trace), "--out", str(model), "--quiet"]) == 0
    header, rows = read_csv_table(trace)
    assert header == ["epoch", "loss"] and len(rows) == 3
    assert run(["eval", "--model", str(model), "--in", str(syn), "--metrics", "accuracy", "--quiet"]) == 0


def test_split_convert_oversample(tmp_path):
    iv = tmp_path / "iv.csv"
    assert run(["gen", "--n", "50", "--p", "2", "--intervals", "--out", str(iv), "--quiet"]) == 0
    conv = tmp_path / "tri.csv"
    assert run(["convert", "--in", str(iv), "--beta", "0.5", "--out", str(conv), "--quiet"]) == 0
    assert set(read_fuzzy_csv(conv).schema) == {"triangular"}
    assert run(["split", "--in", str(conv), "--out", str(tmp_path / "part"), "--quiet"]) == 0
    sizes = [read_fuzzy_csv(tmp_path / f"part_{n}.csv").m for n in ("train", "val", "test")]
    assert sizes == [30, 10, 10]
    over = tmp_path / "over.csv"
    assert run(["oversample", "--in", str(conv), "--target", "25", "--out", str(over), "--quiet"]) == 0
    assert read_fuzzy_csv(over).class_counts().tolist() == [25] * 5


def test_sweep_and_compare(tmp_path, syn):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    common = ["--param", "defuzz", "--repeats", "3", "--in", str(syn), "--quiet"]
    assert run(["sweep", "--values", "val", "--c-grid", "0.1,1", *common, "--out", str(a)]) == 0
    assert run(["sweep", "--values", "mom", *common, "--out", str(b)]) == 0
    header, rows = read_csv_table(a)
    assert header == ["param", "repeat", "accuracy", "balanced_accuracy", "auc"] and len(rows) == 3
    _, summary = read_csv_table(tmp_path / "a_summary.csv")
    assert len(summary) == 1 and "±" in summary[0]["accuracy"]
    out = tmp_path / "cmp.kv"
    assert run(["compare", str(a), str(b), "--out", str(out), "--quiet"]) == 0
    assert 0 < float(kvformat.read_kv(out)["p_two_sided"]) <= 1


def test_sweep_over_m_is_reproducible(tmp_path):
    args = ["sweep", "--param", "m", "--values", "50", "80", "--repeats", "2", "--p", "3", "--quiet"]
    assert run([*args, "--out", str(tmp_path / "a.csv")]) == 0
    assert run([*args, "--jobs", "2", "--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    _, rows = read_csv_table(tmp_path / "a_summary.csv")
    assert [r["param"] for r in rows] == ["50", "80"]


def test_rademacher(syn, tmp_path):
    out = tmp_path / "rad.kv"
    assert run(["rademacher", "--in", str(syn), "--lambda", "2", "--draws", "50", "--out", str(out), "--quiet"]) == 0
    kv = kvformat.read_kv(out)
    assert 0 < float(kv["estimate"]) <= float(kv["lemma1_bound"]) + 3 * float(kv["stderr"])


@pytest.mark.parametrize(
    "argv",
    [
        ["train", "--in", "x.csv", "--out", "m.kv", "--c", "-1"],
        ["train", "--in", "x.csv", "--out", "m.kv", "--hidden", "5"],
        ["convert", "--in", "x.csv", "--beta", "2", "--out", "y.csv"],
        ["gen", "--n", "10", "--bogus", "--out", "y.csv"],
        ["gen", "--n", "2", "--out", "y.csv"],
        ["eval", "--model", "m.kv", "--in", "x.csv", "--metrics", "f1"],
        ["sweep", "--param", "beta", "--values", "0.5", "--out", "s.csv"],
        ["sweep", "--param", "m", "--values", "ten", "--out", "s.csv"],
        ["split", "--in", "x.csv", "--fractions", "0.5,0.5,0.5", "--out", "p"],
        ["nonsense"],
        [],
    ],
)
def test_validation_errors_exit_1(argv, tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(argv) == 1
    assert "error" in capsys.readouterr().err
    assert not any(tmp_path.iterdir())


def test_runtime_errors_exit_2(tmp_path, capsys):
    assert run(["eval", "--model", str(tmp_path / "missing.kv"), "--in", str(tmp_path / "x.csv")]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("f1:tri,label\n2,1,0,0\n")
    assert run(["train", "--in", str(bad), "--out", str(tmp_path / "m.kv")]) == 2
    assert "row 2" in capsys.readouterr().err


def test_schema_mismatch_exit_2(tmp_path, syn):
    data = tmp_path / "toy.csv"
    data.write_text(TOY_CSV)
    model = tmp_path / "m.kv"
    assert run(["train", "--in", str(data), "--kernel", "linear", "--out", str(model), "--quiet"]) == 0
    assert run(["eval", "--model", str(model), "--in", str(syn)]) == 2


def test_version():
    assert run(["--version"]) == 0
