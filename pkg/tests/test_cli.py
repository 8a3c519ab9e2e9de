import csv
import json

import numpy as np
import pytest

from fusionstyle import cli
from fusionstyle.corpus import read_records
from fusionstyle.labeling import OracleConfig, corpus_stats, label_pair
from fusionstyle.model.synthetic import make_synthetic_corpus
from fusionstyle.model.train import TrainingError
from fusionstyle.seqformat import parse_summary

SMALL_MODEL = ["--d-model", "16", "--n-heads", "2", "--ffn-dim", "16", "--n-layers", "1"]


def write_jsonl(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def corpus(tmp_path):
    return write_jsonl(tmp_path / "c.jsonl", [ex.to_record() for ex in make_synthetic_corpus(seed=0, size=10)])


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["analyze"])
    assert e.value.code == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as e:
        cli.main(["nonsense"])
    assert e.value.code == cli.EXIT_USAGE


def test_analyze_verbatim_copies(tmp_path):
    rows = [
        {"id": "a", "document": ["The cat sat down.", "It was late."], "summary": "The cat sat down."},
        {"id": "b", "document": "Rain fell all day. Roads flooded fast.", "summary": ["roads flooded fast ."]},
    ]
    c = write_jsonl(tmp_path / "c.jsonl", rows)
    assert cli.main(["analyze", str(c), "--out", str(tmp_path / "m.csv"), "--summary", str(tmp_path / "s.csv")]) == 0
    m = read_csv(tmp_path / "m.csv")
    assert [r["id"] for r in m] == ["a", "b"]
    assert all(float(r["fusion_index"]) == 0.0 and float(r["coverage"]) == 1.0 for r in m)
    assert b"\r" not in (tmp_path / "m.csv").read_bytes()


def test_analyze_aggregate_matches_lines(tmp_path, corpus):
    m, s = tmp_path / "m.csv", tmp_path / "s.csv"
    assert cli.main(["analyze", str(corpus), "--out", str(m), "--summary", str(s)]) == 0
    lines = read_csv(m)
    agg = {r["statistic"]: float(r["value"]) for r in read_csv(s)}
    assert agg["n_sentences"] == len(lines)
    for col in ("fusion_index", "recall", "scatter", "coverage", "density", "novel_2gram"):
        assert agg[f"mean_{col}"] == pytest.approx(np.mean([float(r[col]) for r in lines]), abs=1e-12)
    hist = [agg[k] for k in agg if k.startswith("fi_bin_")]
    assert len(hist) == 10 and sum(hist) == len(lines)
    man = json.loads((tmp_path / "m.csv.manifest.json").read_text())
    assert man["command"] == "analyze" and man["config"]["k"] == 5
    assert {"version", "wall_clock_seconds", "inputs", "outputs"} <= set(man)


def test_analyze_worker_pool_keeps_order(tmp_path, corpus, monkeypatch):
    a = tmp_path / "a.csv"
    assert cli.main(["analyze", str(corpus), "--out", str(a), "--summary", str(tmp_path / "s.csv")]) == 0
    monkeypatch.setenv(cli.WORKERS_ENV, "2")
    monkeypatch.setattr(cli, "WINDOW", 3)
    b = tmp_path / "b.csv"
    assert cli.main(["analyze", str(corpus), "--out", str(b), "--summary", str(tmp_path / "s2.csv")]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_empty_file_and_bad_lines(tmp_path, corpus, capsys):
    empty = tmp_path / "e.jsonl"
    empty.write_text("")
    out = ["--out", str(tmp_path / "m.csv"), "--summary", str(tmp_path / "s.csv")]
    assert cli.main(["analyze", str(empty)] + out) == cli.EXIT_DATA
    assert "no records" in capsys.readouterr().err
    bad = tmp_path / "bad.jsonl"
    bad.write_text(corpus.read_text() + "{not json}\n")
    assert cli.main(["analyze", str(bad)] + out) == cli.EXIT_DATA
    assert "line 11" in capsys.readouterr().err
    assert cli.main(["analyze", str(bad), "--skip-errors"] + out) == 0
    man = json.loads((tmp_path / "m.csv.manifest.json").read_text())
    assert len(man["skipped_records"]) == 1


def test_label_gamma_extremes_and_stats(tmp_path, corpus, capsys):
    out = tmp_path / "l.jsonl"
    assert cli.main(["label", str(corpus), "--gamma", "1.0", "--out", str(out)]) == 0
    recs = [json.loads(x) for x in out.read_text().splitlines()]
    assert all(lab["style"] == "ext" and lab["source"] >= 1 for r in recs for lab in r["labels"])

    assert cli.main(["label", str(corpus), "--gamma", "0.0", "--out", str(out)]) == 0
    for r in (json.loads(x) for x in out.read_text().splitlines()):
        for lab in r["labels"]:
            assert (lab["style"] == "abs") == (lab["fusion_index"] > 0)
            assert (lab["source"] is None) == (lab["style"] == "abs")

    capsys.readouterr()
    assert cli.main(["label", str(corpus), "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    ref = corpus_stats(label_pair(r.document, r.summary, OracleConfig()) for r in read_records(corpus))
    assert f"ext fraction: {ref.ext_fraction:.4f}" in printed


def _annotations(tmp_path, corpus, degree):
    rows = []
    for rec in read_records(corpus):
        pair = label_pair(rec.document, rec.summary, OracleConfig())
        for s, lab, fs in pair.summary:
            rows.append({"id": rec.id, "sentence": s.index, "human_fusion_degree": degree(fs.fusion_index),
                         "style": lab.kind.value})
    return write_jsonl(tmp_path / "ann.jsonl", rows)


def test_tune_tables(tmp_path, corpus):
    ann = _annotations(tmp_path, corpus, lambda fi: fi)
    out = tmp_path / "t.csv"
    assert cli.main(["tune", "--annotations", str(ann), "--corpus", str(corpus), "--k-candidates", "2,5",
                     "--out", str(out)]) == 0
    rows = read_csv(out)
    best = [r for r in rows if r["best"] == "*"]
    assert len(best) == 1 and best[0]["k"] == "5" and float(best[0]["pearson"]) == pytest.approx(1.0)
    assert cli.main(["tune", "--annotations", str(ann), "--corpus", str(corpus), "--gamma-candidates",
                     "0.7,0.2", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert [r["gamma"] for r in rows] == ["0.2", "0.7"]
    assert float(next(r for r in rows if r["gamma"] == "0.7")["agreement"]) == 1.0


def test_tune_unmatched_reference(tmp_path, corpus, capsys):
    ann = write_jsonl(tmp_path / "a.jsonl", [{"id": "missing", "sentence": 1, "human_fusion_degree": 0.5},
                                             {"id": "syn-0-0", "sentence": 9, "human_fusion_degree": 0.1}])
    code = cli.main(["tune", "--annotations", str(ann), "--corpus", str(corpus), "--k-candidates", "5",
                     "--out", str(tmp_path / "t.csv")])
    assert code == cli.EXIT_DATA
    err = capsys.readouterr().err
    assert "missing#1" in err and "syn-0-0#9" in err
    assert cli.main(["tune", "--annotations", str(ann), "--corpus", str(corpus),
                     "--out", str(tmp_path / "t.csv")]) == cli.EXIT_USAGE


def test_correlate(tmp_path, corpus):
    m = tmp_path / "m.csv"
    cli.main(["analyze", str(corpus), "--out", str(m), "--summary", str(tmp_path / "s.csv")])
    out = tmp_path / "r.csv"
    ann = _annotations(tmp_path, corpus, lambda fi: fi)
    assert cli.main(["correlate", "--metrics", str(m), "--annotations", str(ann), "--out", str(out)]) == 0
    rows = {r["metric"]: r["pearson"] for r in read_csv(out)}
    assert list(rows) == cli.CORRELATE_ROWS
    assert float(rows["fusion_index"]) == pytest.approx(1.0)
    ann = _annotations(tmp_path, corpus, lambda fi: -fi)
    cli.main(["correlate", "--metrics", str(m), "--annotations", str(ann), "--out", str(out)])
    assert float({r["metric"]: r["pearson"] for r in read_csv(out)}["fusion_index"]) == pytest.approx(-1.0)


def test_correlate_zero_variance_is_undefined(tmp_path):
    c = write_jsonl(tmp_path / "c.jsonl", [
        {"id": "a", "document": ["x y z", "p q"], "summary": ["x y z", "p q"]},
    ])
    m = tmp_path / "m.csv"
    cli.main(["analyze", str(c), "--out", str(m), "--summary", str(tmp_path / "s.csv")])
    ann = write_jsonl(tmp_path / "ann.jsonl", [
        {"id": "a", "sentence": 1, "human_fusion_degree": 0.1},
        {"id": "a", "sentence": 2, "human_fusion_degree": 0.4},
    ])
    out = tmp_path / "r.csv"
    assert cli.main(["correlate", "--metrics", str(m), "--annotations", str(ann), "--out", str(out)]) == 0
    rows = {r["metric"]: r["pearson"] for r in read_csv(out)}
    assert rows["fusion_index"] == "undefined"
    assert rows["coverage"] == "undefined"


def _train(tmp_path, name, extra=()):
    d = tmp_path / name
    code = cli.main(["toy-train", "--synthetic", "size=12,mix=0.5,seed=3", "--out-dir", str(d),
                     "--epochs-pretrain", "1", "--epochs-prefinetune", "0", "--epochs-joint", "2",
                     *SMALL_MODEL, *extra])
    return code, d


def test_toy_train_and_infer_deterministic(tmp_path, corpus):
    code, a = _train(tmp_path, "a")
    assert code == 0
    _, b = _train(tmp_path, "b")
    assert (a / "model.ckpt").read_bytes() == (b / "model.ckpt").read_bytes()
    log_rows = read_csv(a / "train_log.csv")
    assert [(r["stage"], r["epoch"]) for r in log_rows] == [
        ("pretrain-base", "1"), ("joint-finetune", "1"), ("joint-finetune", "2")]
    man = json.loads((a / "manifest.json").read_text())
    assert man["skipped_stages"] == ["pre-finetune"]
    assert man["config"]["train"]["kappa"] == 1.1
    assert man["config"]["model"]["d_model"] == 16

    outs = []
    for run in ("r1", "r2"):
        g = tmp_path / f"{run}.jsonl"
        rep = tmp_path / run
        assert cli.main(["toy-infer", "--checkpoint", str(a / "model.ckpt"), "--corpus", str(corpus),
                         "--out", str(g), "--report", str(rep), "--max-len", "24"]) == 0
        outs.append([g.read_bytes()] + [(rep / f).read_bytes() for f in
                                        ("style_distribution.csv", "style_transitions.csv", "summary_stats.csv")])
    assert outs[0] == outs[1]
    n_doc = {r.id: len(r.document.sentences) for r in read_records(corpus)}
    for line in outs[0][0].decode().splitlines():
        rec = json.loads(line)
        parse_summary(rec["tokens"].split(), n_doc_sentences=n_doc[rec["id"]])
    dist = read_csv(tmp_path / "r1" / "style_distribution.csv")
    assert dist[0]["position"] == "all" and dist[-1]["position"] == "21+"


def test_toy_train_divergence_exit_code(tmp_path, monkeypatch):
    real = cli.train

    def boom(model, corpus, cfg, on_epoch=None):
        real(model, corpus, type(cfg)(epochs={"pretrain-base": 1}), on_epoch=on_epoch)
        raise TrainingError("non-finite loss in stage joint-finetune, epoch 1, batch 0")

    monkeypatch.setattr(cli, "train", boom)
    code, d = _train(tmp_path, "x")
    assert code == cli.EXIT_NUMERIC
    assert len(read_csv(d / "train_log.csv")) == 1
    man = json.loads((d / "manifest.json").read_text())
    assert man["status"] == "failed" and "epoch 1" in man["error"]
    assert not (d / "model.ckpt").exists()


def test_toy_train_needs_one_source(tmp_path):
    assert cli.main(["toy-train", "--out-dir", str(tmp_path / "o")]) == cli.EXIT_USAGE
    assert cli.main(["toy-train", "--synthetic", "size=0", "--out-dir", str(tmp_path / "o")]) == cli.EXIT_USAGE


def test_toy_train_from_corpus(tmp_path, corpus):
    d = tmp_path / "c"
    assert cli.main(["toy-train", "--corpus", str(corpus), "--out-dir", str(d), "--epochs-pretrain", "1",
                     "--epochs-prefinetune", "1", "--epochs-joint", "1", *SMALL_MODEL]) == 0
    assert len(read_csv(d / "train_log.csv")) == 3


def test_toy_infer_bad_checkpoint(tmp_path, corpus):
    bad = tmp_path / "bad.ckpt"
    bad.write_text("{}\n")
    assert cli.main(["toy-infer", "--checkpoint", str(bad), "--corpus", str(corpus),
                     "--out", str(tmp_path / "g.jsonl")]) == cli.EXIT_DATA
