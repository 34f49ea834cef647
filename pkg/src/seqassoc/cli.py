"""Command-line entry point.

Subcommands::

    seqassoc index   --input corpus.txt --out corpus.idx
    seqassoc score   --index corpus.idx --out scores.csv
    seqassoc rank    --index corpus.idx --direction lr --out top.csv
    seqassoc compare --scores scores.csv --out matrix.csv
    seqassoc dist    --scores scores.csv --class lexical --out dist.csv
    seqassoc sweep   --input corpus.txt --vary individual --values 500,1000 --out sweep.csv
    seqassoc show    --index corpus.idx --sequence "the european union"

Every flag can also come from ``--config FILE`` (``flag-name = value`` per
line); flags on the command line win. Exit codes: 0 success, 1 computation
error, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys

from . import __version__, index as idxmod, ingest, measures, pipeline, stats
from .errors import IndexLoadError, InputFormatError, SeqAssocError

logger = logging.getLogger("seqassoc")

THREADS_ENV = "SEQASSOC_THREADS"
# effective-config keys left out of output headers (must not change results)
_HEADER_SKIP = {"func", "config", "threads", "verbose", "command"}
_BOOL_DESTS = {"weighted"}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "NA"
    if isinstance(x, (bool, int)) and not isinstance(x, float):
        return str(int(x))
    if x == 0:
        return "0"
    return f"{x:.6g}"


def _default_threads():
    env = os.environ.get(THREADS_ENV)
    if env:
        return int(env)
    return os.cpu_count() or 1


def _header_line(args) -> str:
    items = sorted((k, v) for k, v in vars(args).items() if k not in _HEADER_SKIP)
    return f"# seqassoc {__version__} command={args.command} " + " ".join(f"{k}={v}" for k, v in items)


class _Output:
    """CSV writer to a path or stdout ("-"), prefixed by the config header."""

    def __init__(self, path, args):
        self.path = path
        self.args = args

    def __enter__(self):
        if self.path in (None, "-"):
            self.fh = sys.stdout
        else:
            try:
                self.fh = open(self.path, "w", encoding="utf-8", newline="")
            except OSError as exc:
                raise UsageError(f"cannot write {self.path}: {exc.strerror}") from None
        self.fh.write(_header_line(self.args) + "\n")
        return csv.writer(self.fh, lineterminator="\n")

    def __exit__(self, *exc):
        if self.fh is not sys.stdout:
            self.fh.close()


def _require_file(path):
    if not os.path.isfile(path):
        raise UsageError(f"no such file: {path}")


def _score_config(args) -> measures.ScoreConfig:
    return measures.ScoreConfig(args.base, args.weighted, args.weight_level)


def _thresholds(args) -> idxmod.Thresholds:
    return idxmod.Thresholds(args.min_unit, args.min_chunk, args.chunk_size)


def _documents(args):
    _require_file(args.input)
    return lambda: ingest.iter_file(args.input, args.format)


def _load_index(path):
    _require_file(path)
    return idxmod.load(path)


SCORE_COLUMNS = ["sequence", "length", "mask", "freq", *measures.MEASURES, "flags"]


def _flags(item) -> str:
    out = []
    if item.length < 3:
        out.append("short")
    if item.vector.pruned:
        out.append("pruned")
    return ";".join(out)


def _vector_cells(v):
    return [fmt(x) for x in v.values()]


def read_scores(path) -> list[measures.ScoredSequence]:
    """Read a scores CSV written by ``score``; keys become ``(text, mask)``."""
    _require_file(path)
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        missing = [c for c in SCORE_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise InputFormatError(f"{path}: missing columns {missing}")
        for row in reader:
            vals = {m: float(row[m]) for m in measures.MEASURES}
            vals["cc"] = int(vals["cc"])
            vec = measures.AssociationVector(**vals, pruned="pruned" in row["flags"])
            out.append(measures.ScoredSequence((row["sequence"], row["mask"]), row["sequence"],
                                               row["mask"], int(row["freq"]), vec))
    return out


def _scored(args):
    if getattr(args, "scores", None):
        return read_scores(args.scores)
    if not getattr(args, "index", None):
        raise UsageError("one of --index or --scores is required")
    return measures.score_index(_load_index(args.index), _score_config(args))


# -- commands ---------------------------------------------------------------

def cmd_index(args):
    docs = _documents(args)
    idx = idxmod.build_index(docs, _thresholds(args), args.max_length, args.threads)
    try:
        idxmod.save(idx, args.out)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
    logger.info("wrote %s: %r", args.out, idx)


def cmd_score(args):
    items = measures.score_index(_load_index(args.index), _score_config(args))
    with _Output(args.out, args) as w:
        w.writerow(SCORE_COLUMNS)
        for it in items:
            w.writerow([it.text, it.length, it.mask, it.freq, *_vector_cells(it.vector), _flags(it)])


RANK_COLUMNS = ["rank", "sequence", "length", "mask", "freq", "argmax_measure", "score",
                *measures.MEASURES, "flags"]


def cmd_rank(args):
    items = _scored(args)
    top = None if args.top <= 0 else args.top
    if args.by == "cs":
        upper, lower = pipeline.rank_by_cs(items, args.min_link, top)
        with _Output(args.out, args) as w:
            w.writerow(["side", "rank", "sequence", "length", "mask", "freq", *measures.MEASURES, "flags"])
            for side, rows in (("top", upper), ("bottom", lower)):
                for r, it in enumerate(rows, 1):
                    w.writerow([side, r, it.text, it.length, it.mask, it.freq,
                                *_vector_cells(it.vector), _flags(it)])
        return
    measures_list = [m.strip() for m in args.measures.split(",") if m.strip()]
    cfg = pipeline.FilterConfig(args.min_link, args.max_cc, args.direction)
    ranked = pipeline.select(items, cfg, measures_list, top, args.rank_norm)
    with _Output(args.out, args) as w:
        w.writerow(RANK_COLUMNS)
        for r, rs in enumerate(ranked, 1):
            it = rs.seq
            w.writerow([r, it.text, it.length, it.mask, it.freq, rs.argmax_measure.rsplit("_", 1)[0],
                        fmt(rs.score), *_vector_cells(it.vector), _flags(it)])


def cmd_compare(args):
    cm = stats.correlation_matrix(read_scores(args.scores))
    with _Output(args.out, args) as w:
        w.writerow(["measure", *cm.measures])
        for i, m in enumerate(cm.measures):
            w.writerow([m, *("--" if i == j else fmt(cm.values[i, j]) for j in range(len(cm.measures)))])


def cmd_dist(args):
    reports = stats.distribution_report(read_scores(args.scores), args.rep_class)
    with _Output(args.out, args) as w:
        w.writerow(["measure", "class", "n", "mean", "skewness", "kurtosis",
                    "mean_z", "skewness_z", "kurtosis_z"])
        for r in reports:
            w.writerow([r.measure, r.rep_class, r.n, fmt(r.mean), fmt(r.skewness), fmt(r.kurtosis),
                        fmt(r.mean_z), fmt(r.skewness_z), fmt(r.kurtosis_z)])


def cmd_sweep(args):
    try:
        values = [int(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--values must be comma-separated integers, got {args.values!r}") from None
    rows = stats.threshold_sweep(_documents(args), values, args.vary, _thresholds(args),
                                 args.posthoc, args.max_length, args.threads)
    with _Output(args.out, args) as w:
        w.writerow(["threshold", "sequences_before", "sequences_after"])
        for r in rows:
            w.writerow([r.threshold, r.sequences_before, r.sequences_after])


def cmd_show(args):
    idx = _load_index(args.index)
    try:
        key = idx.key(args.sequence, args.mask)
    except KeyError as exc:
        raise UsageError(f"unit {exc.args[0]!r} is not in the index") from None
    scorer = measures.Scorer(idx, _score_config(args))
    vec = scorer.score(key)
    out = sys.stdout
    out.write(f"{idx.render(key)}  [{idx.mask(key)}]  freq={idx.freq(key)}\n\n")
    rows = scorer.explain(key)
    width = max(len(r[0]) for r in rows)
    out.write(f"{'phrase':<{width}}  {'LR':>9}  {'RL':>9}  {'P_D':>9}\n")
    for label, lr, rl, pd in rows:
        out.write(f"{label:<{width}}  {lr:9.3f}  {rl:9.3f}  {'--' if pd is None else format(pd, '.3f'):>9}\n")
    out.write("\n")
    for m in measures.DIRECTIONAL:
        out.write(f"{m:>5}  LR {fmt(vec.get(m, 'lr')):>10}  RL {fmt(vec.get(m, 'rl')):>10}\n")
    out.write(f"{'cs':>5}     {fmt(vec.cs):>10}\n{'cc':>5}     {vec.cc:>10}\n")


# -- parser -----------------------------------------------------------------

def _add_corpus_args(p):
    p.add_argument("--input", required=True, help="corpus file")
    p.add_argument("--format", choices=ingest.FORMATS, default="plain")
    p.add_argument("--min-unit", type=int, default=50, help="individual unit frequency threshold")
    p.add_argument("--min-chunk", type=int, default=10, help="per-chunk sequence frequency threshold")
    p.add_argument("--chunk-size", type=int, default=500, help="documents per chunk")
    p.add_argument("--max-length", type=int, default=idxmod.DEFAULT_MAX_LENGTH)


def _add_score_args(p):
    p.add_argument("--base", choices=("deltap", "conditional"), default="deltap")
    p.add_argument("--weighted", action="store_true", help="frequency-weighted measures")
    p.add_argument("--weight-level", choices=measures.WEIGHT_LEVELS, default="sequence")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file of default flags")
    common.add_argument("--threads", type=int, default=_default_threads(),
                        help=f"worker processes (default: ${THREADS_ENV} or CPU count)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="seqassoc", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"seqassoc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("index", parents=[common], help="build a frequency index")
    _add_corpus_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index)
    subs["index"] = p

    p = sub.add_parser("score", parents=[common], help="score every stored sequence")
    p.add_argument("--index", required=True)
    _add_score_args(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_score)
    subs["score"] = p

    p = sub.add_parser("rank", parents=[common], help="filter and rank sequences")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--index")
    src.add_argument("--scores")
    _add_score_args(p)
    p.add_argument("--by", choices=("max", "cs"), default="max")
    p.add_argument("--direction", choices=measures.DIRECTIONS, default="lr")
    p.add_argument("--min-link", type=float, default=0.01)
    p.add_argument("--max-cc", type=int, default=1)
    p.add_argument("--top", type=int, default=100, help="0 for the full ranking")
    p.add_argument("--measures", default=",".join(pipeline.DEFAULT_RANKING))
    p.add_argument("--rank-norm", choices=pipeline.NORMS, default="minmax")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_rank)
    subs["rank"] = p

    p = sub.add_parser("compare", parents=[common], help="Spearman matrix between measures")
    p.add_argument("--scores", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_compare)
    subs["compare"] = p

    p = sub.add_parser("dist", parents=[common], help="distribution descriptors per measure")
    p.add_argument("--scores", required=True)
    p.add_argument("--class", dest="rep_class", choices=stats.CLASSES, default="all")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_dist)
    subs["dist"] = p

    p = sub.add_parser("sweep", parents=[common], help="sequence counts across thresholds")
    _add_corpus_args(p)
    p.add_argument("--vary", choices=("individual", "chunk"), default="individual")
    p.add_argument("--values", required=True, help="comma-separated threshold values")
    p.add_argument("--posthoc", type=int, default=1000)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)
    subs["sweep"] = p

    p = sub.add_parser("show", parents=[common], help="explain one sequence's vector")
    p.add_argument("--index", required=True)
    p.add_argument("--sequence", required=True, help="space-separated units")
    p.add_argument("--mask", help="L/P per slot, e.g. LLP (default all lexical)")
    _add_score_args(p)
    p.set_defaults(func=cmd_show)
    subs["show"] = p
    return parser, subs


def read_config(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.lstrip("-").replace("-", "_")] = v
    return out


def _apply_config(parser, subs, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config or known.command not in subs:
        return
    if not os.path.isfile(known.config):
        raise UsageError(f"no such file: {known.config}")
    sp = subs[known.command]
    dests = {a.dest: a for a in sp._actions}
    values = read_config(known.config)
    for k, v in values.items():
        if k not in dests or k in ("help", "config"):
            raise UsageError(f"{known.config}: unknown key {k!r} for '{known.command}'")
        if k in _BOOL_DESTS:
            values[k] = v.lower() in ("1", "true", "yes", "on")
        # required flags satisfied by the file
        dests[k].required = False
    sp.set_defaults(**values)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser, subs = build_parser()
    try:
        _apply_config(parser, subs, argv)
    except UsageError as exc:
        print(f"seqassoc: error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (UsageError, InputFormatError, IndexLoadError, OSError) as exc:
        print(f"seqassoc: error: {exc}", file=sys.stderr)
        return 2
    except (SeqAssocError, ValueError) as exc:
        print(f"seqassoc: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
