"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .embed import build_ppmi_space, load_vectors, propose_additions
from .errors import DataError, InvalidParameter
from .ingest import (
    CleanDocument,
    Metadata,
    ingest_corpus,
    iter_raw_books,
    read_catalog,
)
from .lexicon import EmotionLexicon, apply_patch, cooccurrence, read_lexicon, read_patch
from .score import MEAN, compare_strategies, profiles_from_json, score_corpus, scores_csv, scores_json, trace_tsv
from .structure import AnnotatedDocument, Strategy, chapterize, fallback_tokenize, parse_conllu
from . import svg

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger("moodlex")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

STRATEGY_CHOICES = ("first-paragraphs", "chapter-openings", "both")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    output_dir: Path
    corpus_dir: Path | None = None
    conllu_dir: Path | None = None
    lexicon_path: Path | None = None
    patch_paths: list[Path] = field(default_factory=list)
    strategy: str = "both"
    n_paragraphs: int = 3
    k_tokens: int = 200
    min_sim: float = 0.7
    exclude_translations: bool = False
    catalog: Path | None = None
    jobs: int = 1

    def snapshot(self) -> dict:
        out = {}
        for key, value in asdict(self).items():
            if isinstance(value, Path):
                value = str(value)
            elif isinstance(value, list):
                value = [str(v) for v in value]
            out[key] = value
        return out

    @property
    def strategies(self) -> list[Strategy]:
        if self.strategy == "both":
            return [Strategy.FIRST_PARAGRAPHS, Strategy.CHAPTER_OPENINGS]
        return [Strategy(self.strategy)]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _min_sim(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not -1.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"--min-sim must lie in [-1, 1], got {v}")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand's unset copy from clobbering the global value
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="TOML file mirroring the long flags")
    common.add_argument("--jobs", type=_positive, default=argparse.SUPPRESS, help="worker processes for scoring")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="reserved; no command is stochastic")
    common.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--output-dir", "-o", type=Path, default=argparse.SUPPRESS)

    p = _Parser(prog="moodlex", description="Lexicon-based emotion scoring of literary texts.", parents=[common])
    p.add_argument("--version", action="version", version=f"moodlex {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    docs = argparse.ArgumentParser(add_help=False)
    docs.add_argument("--corpus-dir", type=Path, default=None, help="directory of .txt books")
    docs.add_argument("--conllu-dir", type=Path, default=None, help="directory of <source_id>.conllu files")
    docs.add_argument("--catalog", type=Path, default=None, help="TSV: source_id, declared_encoding")
    docs.add_argument("--exclude-translations", action="store_true", default=None)

    lex = argparse.ArgumentParser(add_help=False)
    lex.add_argument("--lexicon", dest="lexicon_path", type=Path, default=None)
    lex.add_argument("--patch", dest="patch_paths", type=Path, action="append", default=None)

    s = sub.add_parser("ingest", parents=[common], help="clean raw books and write manifest.json")
    s.add_argument("--corpus-dir", type=Path, default=None)
    s.add_argument("--catalog", type=Path, default=None)

    s = sub.add_parser("score", parents=[common, docs, lex], help="score documents")
    s.add_argument("--strategy", choices=STRATEGY_CHOICES, default=None)
    s.add_argument("--n", dest="n_paragraphs", type=_positive, default=None, help="paragraphs for first-paragraphs")
    s.add_argument("--k", dest="k_tokens", type=_positive, default=None, help="tokens per chapter opening")
    s.add_argument("--trace", action="store_true", help="write trace.tsv of every match")
    s.add_argument("--dump-tokens", action="store_true", help="write tokens/<doc>.json")
    s.add_argument("--plot-docs", default=None, help="comma-separated doc ids to plot (default: all)")

    s = sub.add_parser("refine", parents=[common, docs, lex], help="propose lexicon additions")
    s.add_argument("--candidates", type=Path, required=True, help="one candidate lemma per line")
    s.add_argument("--vectors", type=Path, default=None, help="word2vec text format")
    s.add_argument("--build-ppmi", action="store_true", help="build PPMI vectors from the corpus")
    s.add_argument("--window", type=_positive, default=5)
    s.add_argument("--min-count", type=_positive, default=5)
    s.add_argument("--top-k", type=_positive, default=5)
    s.add_argument("--min-sim", dest="min_sim", type=_min_sim, default=None)

    s = sub.add_parser("cooccur", parents=[common, lex], help="emotion co-occurrence matrix")

    s = sub.add_parser("report", parents=[common], help="print the score table of a previous run")
    s.add_argument("--strategy", choices=STRATEGY_CHOICES[:2], default="first-paragraphs")
    return p


_CONFIG_KEYS = {f for f in RunConfig.__dataclass_fields__}


def make_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    config_path = getattr(args, "config", None)
    if config_path is not None:
        try:
            with open(config_path, "rb") as fh:
                file_values = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise UsageError(f"cannot read config {config_path}: {exc}") from exc
        for key, value in file_values.items():
            key = key.replace("-", "_")
            if key not in _CONFIG_KEYS:
                raise UsageError(f"unknown config key {key!r}")
            values[key] = value
    for key in _CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if "output_dir" not in values:
        raise UsageError("--output-dir is required")
    for key in ("output_dir", "corpus_dir", "conllu_dir", "lexicon_path", "catalog"):
        if values.get(key) is not None:
            values[key] = Path(values[key])
    values["patch_paths"] = [Path(p) for p in values.get("patch_paths", [])]
    cfg = RunConfig(**values)
    if cfg.strategy not in STRATEGY_CHOICES:
        raise UsageError(f"strategy must be one of {', '.join(STRATEGY_CHOICES)}")
    if not -1.0 <= float(cfg.min_sim) <= 1.0:
        raise UsageError(f"min_sim must lie in [-1, 1], got {cfg.min_sim}")
    for name in ("n_paragraphs", "k_tokens", "jobs"):
        if int(getattr(cfg, name)) < 1:
            raise UsageError(f"{name} must be >= 1")
    return cfg


def _require_dir(path: Path | None, flag: str) -> Path:
    if path is None:
        raise UsageError(f"{flag} is required")
    if not path.is_dir():
        raise UsageError(f"{flag}: not a directory: {path}")
    return path


def _require_file(path: Path | None, flag: str) -> Path:
    if path is None:
        raise UsageError(f"{flag} is required")
    if not path.is_file():
        raise UsageError(f"{flag}: no such file: {path}")
    return path


class Run:
    """Collects manifest data while a command runs."""

    def __init__(self, command: str, config: RunConfig):
        self.command = command
        self.config = config
        self.started = dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")
        self.documents: list[dict] = []
        self.lexicon_version: str | None = None
        self.patch_summary = {"n_removed": 0, "n_added": 0}
        self.extra: dict = {}

    def write(self, out_dir: Path) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            "tool": "moodlex",
            "version": __version__,
            "command": self.command,
            "config": self.config.snapshot(),
            "documents": self.documents,
            "lexicon_version": self.lexicon_version,
            "patches": self.patch_summary,
            "started": self.started,
            "finished": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
            **self.extra,
        }
        _write(out_dir / "run.json", json.dumps(payload, ensure_ascii=False, indent=2) + "\n")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def load_lexicon_with_patches(cfg: RunConfig, run: Run) -> EmotionLexicon:
    lex = read_lexicon(_require_file(cfg.lexicon_path, "--lexicon"))
    for p in cfg.patch_paths:
        patch = read_patch(_require_file(p, "--patch"))
        before = set(lex.entries)
        lex = apply_patch(lex, patch)
        for w in lex.warnings:
            logger.warning("%s: %s", p, w)
        run.patch_summary["n_removed"] += len(before - set(lex.entries))
        run.patch_summary["n_added"] += len(patch.additions)
    run.lexicon_version = lex.version_tag
    for w in lex.warnings:
        logger.debug(w)
    return lex


def _manifest_metadata(corpus_dir: Path) -> dict[str, Metadata]:
    path = corpus_dir / "manifest.json"
    if not path.is_file():
        return {}
    try:
        rows = json.loads(path.read_text(encoding="utf-8"))
        return {
            r["source_id"]: Metadata(
                title=r.get("title") or r["source_id"],
                source_id=r["source_id"],
                author=r.get("author"),
                year=r.get("year"),
                is_translation=bool(r.get("is_translation")),
            )
            for r in rows
            if not r.get("skipped")
        }
    except (ValueError, KeyError, TypeError) as exc:
        logger.warning("ignoring unreadable %s: %s", path, exc)
        return {}


def load_documents(cfg: RunConfig, run: Run) -> list[AnnotatedDocument]:
    """Build chapterized documents from text and/or CoNLL-U input."""
    if cfg.corpus_dir is None and cfg.conllu_dir is None:
        raise UsageError("--corpus-dir or --conllu-dir is required")
    clean: dict[str, CleanDocument] = {}
    if cfg.corpus_dir is not None:
        corpus = _require_dir(cfg.corpus_dir, "--corpus-dir")
        catalog = read_catalog(cfg.catalog) if cfg.catalog else None
        cleaned, records = ingest_corpus(iter_raw_books(corpus, catalog))
        known = _manifest_metadata(corpus)
        for doc in cleaned:
            if doc.metadata.source_id in known:
                doc.metadata = known[doc.metadata.source_id]
            clean[doc.metadata.source_id] = doc
        skipped = {r.source_id: r for r in records if r.skipped}
    else:
        skipped = {}

    docs: list[AnnotatedDocument] = []
    if cfg.conllu_dir is not None:
        conllu = _require_dir(cfg.conllu_dir, "--conllu-dir")
        for path in sorted(conllu.glob("*.conllu")):
            sid = path.stem
            meta = clean[sid].metadata if sid in clean else Metadata.placeholder(sid)
            with open(path, encoding="utf-8") as fh:
                doc = parse_conllu(fh, meta, source=str(path))
            docs.append(chapterize(doc))
    else:
        for sid in sorted(clean):
            c = clean[sid]
            docs.append(chapterize(fallback_tokenize(c.body, c.metadata), c.body))

    for sid, rec in sorted(skipped.items()):
        run.documents.append({"source_id": sid, "status": "skipped", "error": rec.error})
    kept = []
    for doc in docs:
        if cfg.exclude_translations and doc.metadata.is_translation:
            run.documents.append({"source_id": doc.doc_id, "status": "excluded", "error": "translation"})
            continue
        if not doc.tokens:
            run.documents.append({"source_id": doc.doc_id, "status": "skipped", "error": "no tokens"})
            continue
        kept.append(doc)
    return kept


# -- commands --------------------------------------------------------------


def cmd_ingest(cfg: RunConfig, args) -> int:
    run = Run("ingest", cfg)
    corpus = _require_dir(cfg.corpus_dir, "--corpus-dir")
    catalog = read_catalog(cfg.catalog) if cfg.catalog else None
    docs, records = ingest_corpus(iter_raw_books(corpus, catalog))
    out = cfg.output_dir
    for doc in docs:
        _write(out / f"{doc.metadata.source_id}.txt", doc.body + "\n")
    _write(out / "manifest.json", json.dumps([r.to_json() for r in records], ensure_ascii=False, indent=2) + "\n")
    run.documents = [
        {"source_id": r.source_id, "status": "skipped" if r.skipped else "ok", "error": r.error} for r in records
    ]
    run.write(out)
    n_skip = sum(r.skipped for r in records)
    print(f"ingested {len(docs)} documents, skipped {n_skip}")
    if not docs:
        print(f"error: no document in {corpus} could be ingested", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def _safe_name(doc_id: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in doc_id)


def cmd_score(cfg: RunConfig, args) -> int:
    run = Run("score", cfg)
    lex = load_lexicon_with_patches(cfg, run)
    docs = load_documents(cfg, run)
    if not docs:
        run.write(cfg.output_dir)
        print("error: no documents to score", file=sys.stderr)
        return EXIT_DATA
    emotions = lex.emotions
    titles = {d.doc_id: d.metadata.title for d in docs}
    all_profiles = []
    by_strategy = {}
    trace = []
    failures: dict[str, list[str]] = {}
    for strategy in cfg.strategies:
        res = score_corpus(
            docs, lex, strategy, cfg.n_paragraphs, cfg.k_tokens, jobs=cfg.jobs, with_trace=args.trace
        )
        by_strategy[strategy] = res.profiles
        all_profiles.extend(res.profiles)
        trace.extend(res.trace)
        for doc_id, err in res.failures.items():
            failures.setdefault(doc_id, []).append(f"{strategy}: {err}")
    all_profiles.sort(key=lambda p: (p.sort_key[0], str(p.strategy), p.sort_key[1:]))

    out = cfg.output_dir
    _write(out / "scores.csv", scores_csv(all_profiles, emotions))
    payload = json.loads(scores_json(all_profiles, emotions))
    payload["titles"] = titles
    _write(out / "scores.json", json.dumps(payload, ensure_ascii=False, indent=2) + "\n")
    if args.trace:
        _write(out / "trace.tsv", trace_tsv(trace))
    if args.dump_tokens:
        for d in docs:
            _write(out / "tokens" / f"{_safe_name(d.doc_id)}.json", json.dumps(d.to_json(), ensure_ascii=False) + "\n")

    if len(by_strategy) == 2:
        a, b = by_strategy[Strategy.FIRST_PARAGRAPHS], by_strategy[Strategy.CHAPTER_OPENINGS]
        ids = {p.doc_id for p in a} & {p.doc_id for p in b}
        report = compare_strategies([p for p in a if p.doc_id in ids], [p for p in b if p.doc_id in ids], lex)
        _write(out / "comparison.json", json.dumps(report.to_json(), indent=2) + "\n")

    _write_score_plots(out / "plots", by_strategy, emotions, titles, args.plot_docs)

    for d in docs:
        status = "failed" if d.doc_id in failures else "ok"
        run.documents.append(
            {"source_id": d.doc_id, "status": status, "error": "; ".join(failures.get(d.doc_id, [])) or None}
        )
    run.documents.sort(key=lambda r: r["source_id"])
    run.write(out)
    print(f"scored {len(docs) - len(failures)} documents -> {out / 'scores.csv'}")
    return EXIT_OK


def _doc_rows(profiles) -> dict[str, dict[str, float]]:
    return {p.doc_id: p.scores for p in profiles if p.chapter_idx is None or p.chapter_idx == MEAN}


def _write_score_plots(plot_dir: Path, by_strategy, emotions, titles, plot_docs: str | None) -> None:
    rows = {s: _doc_rows(ps) for s, ps in by_strategy.items()}
    doc_ids = sorted({d for r in rows.values() for d in r})
    selected = doc_ids if not plot_docs else [d for d in plot_docs.split(",") if d in doc_ids]
    series = [str(s) for s in rows]
    for doc_id in selected:
        values = [[rows[s].get(doc_id, {}).get(e, 0.0) for s in rows] for e in emotions]
        chart = svg.grouped_bars(f"{titles.get(doc_id, doc_id)}: emotion scores", emotions, series, values)
        _write(plot_dir / f"{_safe_name(doc_id)}.svg", chart)
    primary = next(iter(rows))
    values = [[rows[primary][d].get(e, 0.0) for e in emotions] for d in doc_ids if d in rows[primary]]
    groups = [titles.get(d, d) for d in doc_ids if d in rows[primary]]
    chart = svg.grouped_bars(f"Emotion word distribution ({primary}) per 1000 tokens", groups, list(emotions), values)
    _write(plot_dir / "corpus.svg", chart)


def _read_candidates(path: Path) -> list[str]:
    words = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line.split("\t")[0].lower())
    return words


def cmd_refine(cfg: RunConfig, args) -> int:
    run = Run("refine", cfg)
    lex = load_lexicon_with_patches(cfg, run)
    candidates = _read_candidates(_require_file(args.candidates, "--candidates"))
    if args.vectors is not None:
        with open(_require_file(args.vectors, "--vectors"), encoding="utf-8") as fh:
            space = load_vectors(fh)
        run.extra["embedding"] = {"source": str(args.vectors)}
    elif args.build_ppmi:
        docs = load_documents(cfg, run)
        space = build_ppmi_space(docs, args.window, args.min_count)
        run.extra["embedding"] = {"source": "ppmi", "window": args.window, "min_count": args.min_count}
    else:
        print(
            "error: no embedding space; pass --vectors FILE or --build-ppmi with --corpus-dir/--conllu-dir",
            file=sys.stderr,
        )
        return EXIT_USAGE
    proposals, skipped = propose_additions(space, lex, candidates, args.top_k, cfg.min_sim)
    out = cfg.output_dir
    _write(out / "proposals.json", json.dumps([p.to_json() for p in proposals], ensure_ascii=False, indent=2) + "\n")
    _write(
        out / "skipped.json",
        json.dumps([{"candidate": c, "reason": r} for c, r in skipped], ensure_ascii=False, indent=2) + "\n",
    )
    run.extra["proposals"] = len(proposals)
    run.extra["skipped"] = len(skipped)
    run.write(out)
    print(f"{len(proposals)} proposals, {len(skipped)} skipped -> {out / 'proposals.json'} (review before patching)")
    return EXIT_OK


def cmd_cooccur(cfg: RunConfig, args) -> int:
    run = Run("cooccur", cfg)
    lex = load_lexicon_with_patches(cfg, run)
    if len(lex) == 0:
        logger.warning("lexicon is empty; matrix is all zeros")
        print("warning: lexicon is empty; matrix is all zeros", file=sys.stderr)
    m = cooccurrence(lex)
    out = cfg.output_dir
    _write(out / "cooccurrence.csv", m.to_csv())
    _write(out / "plots" / "cooccurrence.svg", svg.heatmap("Co-occurrence of emotions", m.emotions, m.values))
    run.write(out)
    print(f"wrote {out / 'cooccurrence.csv'}")
    return EXIT_OK


def format_table(profiles, emotions: Sequence[str], titles: dict[str, str]) -> str:
    rows = _doc_rows(profiles)
    header = ["title"] + list(emotions)
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for doc_id in sorted(rows):
        cells = [titles.get(doc_id, doc_id)] + [f"{rows[doc_id].get(e, 0.0):.2f}" for e in emotions]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def cmd_report(cfg: RunConfig, args) -> int:
    path = _require_file(cfg.output_dir / "scores.json", "scores.json in --output-dir")
    data = json.loads(path.read_text(encoding="utf-8"))
    profiles = [p for p in profiles_from_json(data) if str(p.strategy) == args.strategy]
    if not profiles:
        print(f"error: no {args.strategy} profiles in {path}", file=sys.stderr)
        return EXIT_DATA
    table = format_table(profiles, data["emotions"], data.get("titles", {}))
    text = f"Normalized emotion scores ({args.strategy}, per 1000 word tokens)\n\n{table}"
    comp = cfg.output_dir / "comparison.json"
    if comp.is_file():
        c = json.loads(comp.read_text(encoding="utf-8"))
        fmt = lambda v: "n/a" if v is None else f"{v:.3f}"  # noqa: E731
        text += (
            f"\nMean L1 distance to lexicon emotion proportions: "
            f"{c['strategy_a']} {fmt(c['mean_a'])}, {c['strategy_b']} {fmt(c['mean_b'])}\n"
        )
    _write(cfg.output_dir / f"report-{args.strategy}.md", text)
    print(text, end="")
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "score": cmd_score,
    "refine": cmd_refine,
    "cooccur": cmd_cooccur,
    "report": cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = make_config(args)
        return COMMANDS[args.command](cfg, args)
    except (UsageError, InvalidParameter) as exc:
        print(f"moodlex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"moodlex: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
