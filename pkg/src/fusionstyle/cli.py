"""``fusionstyle`` command line: analyze, label, tune, toy-train, toy-infer, correlate.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical or
training failure.  Every command writes a JSON run manifest next to its
main output (or ``--manifest``).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from itertools import islice
from pathlib import Path
from typing import Callable, Iterable, Iterator, Optional

import numpy as np

from . import __version__
from .corpus import DataError, read_annotations, read_records
from .labeling import (
    DEFAULT_GAMMA,
    AnnotatedSentence,
    OracleConfig,
    StatsAccumulator,
    corpus_stats,
    gamma_agreement,
    label_pair,
    tune_gamma,
    tune_k,
)
from .metrics import DEFAULT_K, extractive_fragments, fusion_index, novel_ngram_fraction, pearson
from .model.checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .model.infer import infer, random_styles
from .model.network import ModelConfig, ToyModel
from .model.synthetic import make_synthetic_corpus
from .model.train import DEFAULT_KAPPA, Stage, TrainConfig, TrainingError, train
from .seqformat import CapacityError, Vocab

log = logging.getLogger("fusionstyle")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
WORKERS_ENV = "FUSIONSTYLE_WORKERS"
WINDOW = 256
FI_BINS = 10

METRIC_COLUMNS = [
    "id", "sentence", "fusion_index", "recall", "scatter", "best_match",
    "novel_1gram", "novel_2gram", "novel_3gram", "coverage", "density",
]
CORRELATE_ROWS = ["novel_1gram", "novel_2gram", "novel_3gram", "coverage", "density", "fusion_index"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- small helpers ---------------------------------------------------------


def fmt(x) -> str:
    """Dot-decimal, shortest round-trip text for CSV cells."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "undefined"
        return repr(x)
    return str(x)


def write_csv(path, header: list[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(c) for c in r])


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{WORKERS_ENV} must be >= 1")
    return n


def ordered_map(fn: Callable, items: Iterable, n_workers: int) -> Iterator:
    """``map`` over ``items`` in fixed windows; results keep input order."""
    it = iter(items)
    pool = ProcessPoolExecutor(n_workers) if n_workers > 1 else None
    try:
        while True:
            window = list(islice(it, WINDOW))
            if not window:
                return
            yield from (pool.map(fn, window) if pool else map(fn, window))
    finally:
        if pool:
            pool.shutdown()


def _parse_list(text: str, cast) -> list:
    try:
        vals = [cast(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse list {text!r}") from None
    if not vals:
        raise UsageError("empty candidate list")
    return vals


# -- per-record work (module level so worker processes can pickle it) -------


def _analyze_record(job):
    rec, k = job
    rows = []
    for s in rec.summary:
        fs = fusion_index(s, rec.document, k)
        ef = extractive_fragments(s, rec.document)
        nv = novel_ngram_fraction(s, rec.document).novel_fraction
        rows.append([
            rec.id, s.index, fs.fusion_index, fs.recall, fs.scatter, fs.best_match_index,
            nv[1], nv[2], nv[3], ef.coverage, ef.density,
        ])
    return rows


def _label_record(job):
    rec, cfg = job
    pair = label_pair(rec.document, rec.summary, cfg)
    out = dict(rec.raw)
    out["labels"] = [
        {
            "style": lab.kind.value,
            "source": lab.source_index,
            "fusion_index": fs.fusion_index,
            "recall": fs.recall,
            "scatter": fs.scatter,
        }
        for _, lab, fs in pair.summary
    ]
    return out, [lab.kind.value for lab in pair.labels]


# -- commands ----------------------------------------------------------------


def _records(args, errors):
    return read_records(args.corpus, skip_errors=args.skip_errors, errors=errors)


def cmd_analyze(args, man: dict) -> int:
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    errors: list = []
    n_workers = workers()
    sums = np.zeros(len(METRIC_COLUMNS) - 2)
    hist = np.zeros(FI_BINS, dtype=np.int64)
    n = 0
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_COLUMNS)
        jobs = ((rec, args.k) for rec in _records(args, errors))
        for rows in ordered_map(_analyze_record, jobs, n_workers):
            for r in rows:
                w.writerow([fmt(c) for c in r])
                sums += np.array(r[2:], dtype=float)
                hist[min(int(r[2] * FI_BINS), FI_BINS - 1)] += 1
                n += 1
    means = sums / max(n, 1)
    agg = [("n_sentences", n)]
    agg += [(f"mean_{c}", m) for c, m in zip(METRIC_COLUMNS[2:], means) if c != "best_match"]
    for b in range(FI_BINS):
        lo, hi = b / FI_BINS, (b + 1) / FI_BINS
        agg.append((f"fi_bin_{lo:.1f}_{hi:.1f}", int(hist[b])))
    write_csv(args.summary, ["statistic", "value"], agg)
    man["outputs"] = {"metrics": str(args.out), "summary": str(args.summary)}
    man["skipped_records"] = [str(e) for e in errors]
    print(f"analyzed {n} summary sentences; mean fusion index {fmt(means[0])}")
    return EXIT_OK


def cmd_label(args, man: dict) -> int:
    cfg = OracleConfig(k=args.k, gamma=args.gamma)
    errors: list = []
    acc = StatsAccumulator()
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        jobs = ((rec, cfg) for rec in _records(args, errors))
        for out, labs in ordered_map(_label_record, jobs, workers()):
            fh.write(_dump(out) + "\n")
            acc.add(labs)
    stats = acc.result()
    man["outputs"] = {"labels": str(args.out)}
    man["skipped_records"] = [str(e) for e in errors]
    man["style_stats"] = {
        "ext_fraction": stats.ext_fraction,
        "abs_fraction": stats.abs_fraction,
        "transitions": stats.transitions.tolist(),
    }
    t = stats.transitions
    print(f"sentences: {stats.n_sentences}")
    print(f"ext fraction: {stats.ext_fraction:.4f}")
    print(f"abs fraction: {stats.abs_fraction:.4f}")
    print("transitions (row = from, col = to; ext, abs):")
    print(f"  ext  {t[0, 0]:.4f}  {t[0, 1]:.4f}")
    print(f"  abs  {t[1, 0]:.4f}  {t[1, 1]:.4f}")
    return EXIT_OK


def _join_annotations(anns, records: dict):
    missing = []
    for a in anns:
        rec = records.get(a.id)
        if rec is None or a.sentence > len(rec.summary):
            missing.append(f"{a.id}#{a.sentence}")
    if missing:
        raise DataError("unmatched annotation references: " + ", ".join(missing))


def cmd_tune(args, man: dict) -> int:
    if (args.k_candidates is None) == (args.gamma_candidates is None):
        raise UsageError("give exactly one of --k-candidates or --gamma-candidates")
    anns = read_annotations(args.annotations)
    records = {r.id: r for r in read_records(args.corpus)}
    _join_annotations(anns, records)
    if args.k_candidates is not None:
        ks = _parse_list(args.k_candidates, int)
        if min(ks) < 1:
            raise UsageError("K candidates must be >= 1")
        if any(a.human_fusion_degree is None for a in anns):
            raise DataError("K tuning needs human_fusion_degree on every annotation")
        annotated = [
            AnnotatedSentence(records[a.id].summary[a.sentence - 1], a.id, a.human_fusion_degree) for a in anns
        ]
        docs = {i: r.document for i, r in records.items()}
        best, table = tune_k(annotated, docs, ks)
        header = ["k", "pearson", "best"]
    else:
        gs = _parse_list(args.gamma_candidates, float)
        if any(not 0.0 <= g <= 1.0 for g in gs):
            raise UsageError("gamma candidates must lie in [0, 1]")
        if any(a.style is None for a in anns):
            raise DataError("gamma tuning needs a style on every annotation")
        dev = []
        for a in anns:
            rec = records[a.id]
            pair = label_pair(rec.document, [rec.summary[a.sentence - 1]], OracleConfig(k=args.k))
            dev.append((pair, [a.style]))
        table = gamma_agreement(dev, gs)
        best = tune_gamma(dev, gs)
        header = ["gamma", "agreement", "best"]
    rows = [(c, v, "*" if c == best else "") for c, v in table.items()]
    write_csv(args.out, header, rows)
    man["outputs"] = {"table": str(args.out)}
    man["best"] = best
    for c, v, mark in rows:
        print(f"{fmt(c):>6}  {fmt(v):<22} {mark}")
    return EXIT_OK


def _synthetic_options(text: str) -> dict:
    opts = {"size": 2000, "mix": 0.5, "seed": 0}
    for part in filter(None, text.split(",")):
        key, _, val = part.partition("=")
        key = key.strip()
        if key not in opts:
            raise UsageError(f"unknown synthetic key {key!r} (size, mix, seed)")
        try:
            opts[key] = float(val) if key == "mix" else int(val)
        except ValueError:
            raise UsageError(f"bad value for {key}: {val!r}") from None
    if opts["size"] < 1:
        raise UsageError("synthetic size must be >= 1")
    return opts


def _training_pairs(args, man) -> list:
    if args.synthetic is not None:
        opts = _synthetic_options(args.synthetic)
        man["config"]["synthetic"] = opts
        corpus = make_synthetic_corpus(opts["seed"], opts["size"], opts["mix"])
        return [(ex.doc, ex.items) for ex in corpus]
    cfg = OracleConfig(k=args.k, gamma=args.gamma)
    pairs = []
    for rec in read_records(args.corpus):
        lp = label_pair(rec.document, rec.summary, cfg)
        pairs.append((rec.document, [(lab, s.tokens) for s, lab, _ in lp.summary]))
    return pairs


def cmd_toy_train(args, man: dict) -> int:
    if (args.corpus is None) == (args.synthetic is None):
        raise UsageError("give exactly one of --corpus or --synthetic")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    epochs = {
        Stage.PRETRAIN_BASE: args.epochs_pretrain,
        Stage.PRE_FINETUNE: args.epochs_prefinetune,
        Stage.JOINT_FINETUNE: args.epochs_joint,
    }
    tcfg = TrainConfig(
        epochs=epochs, lr=args.lr, batch_size=args.batch_size, kappa=args.kappa, seed=args.seed,
        optimizer=args.optimizer, position_jitter=args.position_jitter,
    )
    man["config"]["train"] = tcfg.to_dict()
    man["skipped_stages"] = [s.value for s, n in tcfg.epochs.items() if n == 0]

    pairs = _training_pairs(args, man)
    words = sorted({t for doc, items in pairs for t in doc.stream()} | {t for _, items in pairs for _, w in items for t in w})
    vocab = Vocab(words, max_sentences=args.max_sentences)
    mcfg = ModelConfig(
        vocab_size=len(vocab), d_model=args.d_model, n_heads=args.n_heads, n_layers=args.n_layers,
        ffn_dim=args.ffn_dim, max_positions=args.max_positions, max_sentences=args.max_sentences,
        seed=args.seed,
    )
    man["config"]["model"] = mcfg.to_dict()
    model = ToyModel(mcfg, vocab)

    usable, too_long = [], 0
    for doc, items in pairs:
        ex = model.make_example(doc, items)
        if max(len(ex.src_ids), len(ex.dec_ids), len(doc.stream()) + 1) > mcfg.max_positions:
            too_long += 1
            continue
        usable.append((doc, items))
    man["skipped_too_long"] = too_long
    if not usable:
        raise DataError("no records fit within --max-positions")

    log_path = out / "train_log.csv"
    fh = open(log_path, "w", encoding="utf-8", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["stage", "epoch", "token_loss", "style_loss", "kappa", "total", "identifier_norm", "group_tag_norm"])

    def on_epoch(r):
        w.writerow([fmt(c) for c in (r.stage, r.epoch, r.token_loss, r.style_loss, r.kappa, r.total,
                                     r.identifier_norm, r.group_tag_norm)])
        fh.flush()

    try:
        train(model, usable, tcfg, on_epoch=on_epoch)
    finally:
        fh.close()
    ckpt = out / "model.ckpt"
    save_checkpoint(model, ckpt)
    man["outputs"] = {"checkpoint": str(ckpt), "log": str(log_path)}
    man["n_train"] = len(usable)
    print(f"trained on {len(usable)} examples; checkpoint {ckpt}")
    return EXIT_OK


def cmd_toy_infer(args, man: dict) -> int:
    try:
        model = load_checkpoint(args.checkpoint)
    except (OSError, CheckpointError) as e:
        raise DataError(f"cannot load checkpoint: {e}") from None
    chooser = random_styles(args.random_styles) if args.random_styles is not None else None
    known = set(model.vocab.stoi)
    oov = 0
    summaries: list[tuple[str, list]] = []
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for rec in read_records(args.corpus):
            oov += sum(t not in known for t in rec.document.stream())
            g = infer(model, rec.document, max_len=args.max_len, max_sentences=args.max_summary_sentences,
                      choose_style=chooser)
            sents = [
                {"style": lab.kind.value, "source": lab.source_index, "text": " ".join(toks)}
                for lab, toks in g.summary.sentences
            ]
            fh.write(_dump({"id": rec.id, "summary": sents, "tokens": " ".join(g.tokens)}) + "\n")
            summaries.append((rec.id, g.labels))
    outputs = {"generations": str(args.out)}
    if args.report:
        rep = Path(args.report)
        rep.mkdir(parents=True, exist_ok=True)
        outputs.update(write_reports(rep, summaries))
    man["outputs"] = outputs
    man["oov_tokens"] = oov
    man["config"]["model"] = model.cfg.to_dict()
    print(f"generated {len(summaries)} summaries")
    return EXIT_OK


def write_reports(rep: Path, summaries: list) -> dict:
    """Style distribution by position, style transitions and per-summary counts."""
    stats = corpus_stats([labs for _, labs in summaries])
    dist = rep / "style_distribution.csv"
    rows = [("all", stats.n_sentences, stats.ext_fraction, stats.abs_fraction)]
    last = len(stats.by_position) - 1
    for i, ((e, a), n) in enumerate(zip(stats.by_position, stats.position_counts)):
        label = f"{i + 1}+" if i == last else str(i + 1)
        rows.append((label, n, e, a))
    write_csv(dist, ["position", "count", "ext_fraction", "abs_fraction"], rows)
    trans = rep / "style_transitions.csv"
    names = ("ext", "abs")
    write_csv(
        trans, ["from", "to", "fraction", "count"],
        [(names[i], names[j], stats.transitions[i, j], int(round(stats.transitions[i, j] * stats.n_transitions)))
         for i in range(2) for j in range(2)],
    )
    per = rep / "summary_stats.csv"
    write_csv(
        per, ["id", "n_sentences", "n_ext", "n_abs"],
        [(i, len(labs), sum(l.is_ext for l in labs), sum(not l.is_ext for l in labs)) for i, labs in summaries],
    )
    return {"style_distribution": str(dist), "style_transitions": str(trans), "summary_stats": str(per)}


def cmd_correlate(args, man: dict) -> int:
    metrics = {}
    with open(args.metrics, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(CORRELATE_ROWS + ["id", "sentence"]) - set(reader.fieldnames or [])
        if missing:
            raise DataError(f"metrics file lacks columns: {', '.join(sorted(missing))}")
        for lineno, row in enumerate(reader, 2):
            try:
                metrics[(row["id"], int(row["sentence"]))] = {c: float(row[c]) for c in CORRELATE_ROWS}
            except ValueError as e:
                raise DataError(f"bad metrics row ({e})", lineno) from None
    anns = read_annotations(args.annotations)
    unmatched = [f"{a.id}#{a.sentence}" for a in anns if (a.id, a.sentence) not in metrics]
    if unmatched:
        raise DataError("unmatched annotation references: " + ", ".join(unmatched))
    if any(a.human_fusion_degree is None for a in anns):
        raise DataError("correlation needs human_fusion_degree on every annotation")
    human = [a.human_fusion_degree for a in anns]
    rows = []
    for c in CORRELATE_ROWS:
        col = [metrics[(a.id, a.sentence)][c] for a in anns]
        try:
            r = pearson(col, human)
        except ValueError:
            r = float("nan")
        rows.append((c, r))
    write_csv(args.out, ["metric", "pearson"], rows)
    man["outputs"] = {"table": str(args.out)}
    for c, r in rows:
        print(f"{c:<13} {fmt(r)}")
    return EXIT_OK


# -- parser and driver -----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fusionstyle", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--manifest", help="run manifest path (default: next to the main output)")

    a = sub.add_parser("analyze", help="per-sentence fusion and extractiveness metrics")
    a.add_argument("corpus")
    a.add_argument("--k", type=int, default=DEFAULT_K)
    a.add_argument("--out", required=True, help="per-sentence metrics CSV")
    a.add_argument("--summary", required=True, help="aggregate CSV (means and FI histogram)")
    a.add_argument("--skip-errors", action="store_true")
    common(a)

    lab = sub.add_parser("label", help="oracle ext/abs labels as JSON lines")
    lab.add_argument("corpus")
    lab.add_argument("--k", type=int, default=DEFAULT_K)
    lab.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    lab.add_argument("--out", required=True)
    lab.add_argument("--skip-errors", action="store_true")
    common(lab)

    t = sub.add_parser("tune", help="choose K or gamma against human annotations")
    t.add_argument("--annotations", required=True)
    t.add_argument("--corpus", required=True)
    t.add_argument("--k-candidates", help="comma-separated K values")
    t.add_argument("--gamma-candidates", help="comma-separated thresholds")
    t.add_argument("--k", type=int, default=DEFAULT_K, help="K used while tuning gamma")
    t.add_argument("--out", required=True)
    common(t)

    tr = sub.add_parser("toy-train", help="train the toy style-adaptive model")
    tr.add_argument("--corpus")
    tr.add_argument("--synthetic", help="e.g. size=2000,mix=0.5,seed=0")
    tr.add_argument("--out-dir", required=True)
    tr.add_argument("--epochs-pretrain", type=int, default=TrainConfig().epochs[Stage.PRETRAIN_BASE])
    tr.add_argument("--epochs-prefinetune", type=int, default=TrainConfig().epochs[Stage.PRE_FINETUNE])
    tr.add_argument("--epochs-joint", type=int, default=TrainConfig().epochs[Stage.JOINT_FINETUNE])
    tr.add_argument("--lr", type=float, default=TrainConfig().lr)
    tr.add_argument("--batch-size", type=int, default=TrainConfig().batch_size)
    tr.add_argument("--optimizer", choices=["adam", "sgd"], default="adam")
    tr.add_argument("--position-jitter", type=int, default=TrainConfig().position_jitter,
                    help="max random shift of position rows per training example (0 disables)")
    tr.add_argument("--kappa", type=float, default=DEFAULT_KAPPA)
    tr.add_argument("--k", type=int, default=DEFAULT_K)
    tr.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--d-model", type=int, default=64)
    tr.add_argument("--n-heads", type=int, default=4)
    tr.add_argument("--n-layers", type=int, default=2)
    tr.add_argument("--ffn-dim", type=int, default=128)
    tr.add_argument("--max-positions", type=int, default=96)
    tr.add_argument("--max-sentences", type=int, default=8)
    common(tr)

    inf = sub.add_parser("toy-infer", help="generate styled summaries with a checkpoint")
    inf.add_argument("--checkpoint", required=True)
    inf.add_argument("--corpus", required=True)
    inf.add_argument("--out", required=True)
    inf.add_argument("--report", help="directory for style distribution/transition CSVs")
    inf.add_argument("--random-styles", type=int, metavar="SEED", help="ablation: pick styles at random")
    inf.add_argument("--max-len", type=int, default=64)
    inf.add_argument("--max-summary-sentences", type=int, default=8)
    common(inf)

    c = sub.add_parser("correlate", help="Pearson table of metrics against human fusion degrees")
    c.add_argument("--metrics", required=True, help="CSV written by analyze")
    c.add_argument("--annotations", required=True)
    c.add_argument("--out", required=True)
    common(c)
    return p


COMMANDS = {
    "analyze": cmd_analyze,
    "label": cmd_label,
    "tune": cmd_tune,
    "toy-train": cmd_toy_train,
    "toy-infer": cmd_toy_infer,
    "correlate": cmd_correlate,
}

_PATH_KEYS = ("corpus", "annotations", "metrics", "checkpoint")


def _manifest_path(args) -> Path:
    if args.manifest:
        return Path(args.manifest)
    if args.command == "toy-train":
        return Path(args.out_dir) / "manifest.json"
    return Path(str(args.out) + ".manifest.json")


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    skip = {"command", "manifest", "verbose", *_PATH_KEYS, "out", "summary", "out_dir", "report"}
    man = {
        "command": args.command,
        "argv": argv,
        "version": __version__,
        "config": {k: v for k, v in vars(args).items() if k not in skip},
        "inputs": {k: getattr(args, k) for k in _PATH_KEYS if getattr(args, k, None) is not None},
        "started_at": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    t0 = time.perf_counter()
    code, err = EXIT_OK, None
    try:
        code = COMMANDS[args.command](args, man)
    except UsageError as e:
        code, err = EXIT_USAGE, str(e)
    except (DataError, CapacityError, FileNotFoundError, IsADirectoryError) as e:
        code, err = EXIT_DATA, str(e)
    except (TrainingError, FloatingPointError) as e:
        code, err = EXIT_NUMERIC, str(e)
    except ValueError as e:
        code, err = EXIT_DATA, str(e)
    man["wall_clock_seconds"] = round(time.perf_counter() - t0, 3)
    man["status"] = "ok" if code == EXIT_OK else "failed"
    man["exit_code"] = code
    if err:
        man["error"] = err
        print(f"fusionstyle {args.command}: error: {err}", file=sys.stderr)
    try:
        path = _manifest_path(args)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(man, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    except OSError as e:
        print(f"fusionstyle: could not write manifest: {e}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
