"""Command-line front end: ``phonalign align | eval | features``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .aligner import LinearAcousticScorer, align_posteriorgram, align_utterance, transcription_to_targets
from .decoder import read_posteriorgram
from .errors import PhonalignError
from .evaluation import DEFAULT_TOLERANCES, boundary_abs_errors, boundary_error_report
from .features import FeatureConfig, compute_features, read_wav, write_features
from .inventory import PhoneSet, buckeye_folding, load_dictionary, load_folding_table, timit_folding
from .loss import LinearScorer
from .textgrid import format_textgrid, read_textgrid

log = logging.getLogger("phonalign")

_BUILTIN_FOLDINGS = {"buckeye": buckeye_folding, "timit": timit_folding}
TEXTGRID_PRECISION = 6


def _atomic_write(path, data: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _folding(name):
    if name is None:
        return None
    if name in _BUILTIN_FOLDINGS:
        return _BUILTIN_FOLDINGS[name]()
    return load_folding_table(name)


def _tolerances(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance list {text!r}") from None
    if not vals or any(v <= 0 for v in vals) or vals != sorted(vals):
        raise argparse.ArgumentTypeError("tolerances must be positive and sorted")
    return vals


@dataclass
class _Job:
    uid: str
    source: Path
    transcript: str
    out: Path


def _read_manifest(path):
    base = Path(path).parent
    jobs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise PhonalignError(f"{path}:{lineno}: expected 3 tab-separated fields")
        src, text, out = fields
        jobs.append(_Job(f"{Path(path).name}:{lineno}", base / src, text, base / out))
    return jobs


class _Aligner:
    def __init__(self, args):
        folding = _folding(args.folding)
        self.dictionary = load_dictionary(args.dict, folding)
        self.folding = folding
        self.interp = args.interp
        self.scorer = None
        if args.weights is not None:
            phones = PhoneSet(tuple(Path(args.phones).read_text(encoding="utf-8").split()))
            self.scorer = LinearAcousticScorer(LinearScorer.load(args.weights), phones)

    def __call__(self, job: _Job) -> str:
        targets = transcription_to_targets(job.transcript.split(), self.dictionary, self.folding)
        if job.source.suffix.lower() == ".wav":
            if self.scorer is None:
                raise PhonalignError("audio input needs --weights and --phones")
            samples, rate = read_wav(job.source)
            tier = align_utterance(
                samples, targets, self.scorer, interpolation=self.interp,
                config=FeatureConfig(sample_rate=rate),
            )
        else:
            tier = align_posteriorgram(read_posteriorgram(job.source), targets, interpolation=self.interp)
        _atomic_write(job.out, format_textgrid([tier], tier.xmax, TEXTGRID_PRECISION))
        return str(job.out)


def cmd_align(args) -> int:
    if args.manifest:
        jobs = _read_manifest(args.manifest)
    else:
        src = args.audio or args.pgram
        if src is None or args.transcript is None or args.out is None:
            log.error("single-utterance mode needs --audio/--pgram, --transcript and --out")
            return 2
        jobs = [_Job(str(src), Path(src), args.transcript, Path(args.out))]
    aligner = _Aligner(args)

    def run(job):
        try:
            return job, aligner(job), None
        except (PhonalignError, OSError, ValueError, KeyError) as exc:
            return job, None, exc

    workers = args.workers or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, jobs))
    failures = 0
    for job, out, exc in results:
        if exc is None:
            log.info("%s: wrote %s", job.uid, out)
        else:
            failures += 1
            print(f"FAILED {job.uid}: {exc}", file=sys.stderr)
    return 1 if failures else 0


def _pick_tier(tiers, name):
    if name is None:
        return tiers[0]
    for t in tiers:
        if t.name == name:
            return t
    raise PhonalignError(f"no tier named {name!r}")


def cmd_eval(args) -> int:
    ref = {p.stem: p for p in sorted(Path(args.ref_dir).glob("*.TextGrid"))}
    hyp = {p.stem: p for p in sorted(Path(args.hyp_dir).glob("*.TextGrid"))}
    common = sorted(ref.keys() & hyp.keys())
    problems = [f"missing hypothesis for {k}" for k in sorted(ref.keys() - hyp.keys())]
    problems += [f"missing reference for {k}" for k in sorted(hyp.keys() - ref.keys())]
    if not common:
        for p in problems:
            print(p, file=sys.stderr)
        print("error: no TextGrid basenames shared by the two directories", file=sys.stderr)
        return 2
    folding = _folding(args.folding)
    errors = []
    for key in common:
        try:
            r = _pick_tier(read_textgrid(ref[key]), args.tier)
            h = _pick_tier(read_textgrid(hyp[key]), args.tier)
            errors += boundary_abs_errors(r, h, folding)
        except (PhonalignError, ValueError, IndexError) as exc:
            problems.append(f"{key}: {exc}")
    for p in problems:
        print(p, file=sys.stderr)
    if not errors:
        print("error: no boundaries to evaluate", file=sys.stderr)
        return 2
    report = boundary_error_report(errors, args.tolerances)
    if args.tsv_out:
        _atomic_write(args.tsv_out, report.tolerance_tsv())
    else:
        sys.stdout.write(report.tolerance_tsv())
    if args.cdf_out:
        _atomic_write(args.cdf_out, report.cdf_csv())
    if args.json_out:
        _atomic_write(args.json_out, report.summary_json())
    log.info("mean %.6f ms, median %.6f ms over %d boundaries", report.mean_ms, report.median_ms, report.count)
    return 1 if problems else 0


def cmd_features(args) -> int:
    try:
        samples, rate = read_wav(args.wav)
        feats = compute_features(samples, FeatureConfig(sample_rate=rate))
    except (OSError, ValueError, EOFError) as exc:
        print(f"error: {args.wav}: {exc}", file=sys.stderr)
        return 1
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(args.out).with_name(f".{Path(args.out).name}.tmp")
    write_features(feats, tmp)
    os.replace(tmp, args.out)
    log.info("%s: %d frames x %d", args.out, *feats.frames.shape)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phonalign", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", help="align transcripts to posteriorgrams or audio")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--audio", help="mono 16-bit WAV")
    src.add_argument("--pgram", help="posteriorgram file (PGRAM1)")
    src.add_argument("--manifest", help="TSV: source<TAB>transcript<TAB>output")
    p.add_argument("--transcript", help="space-separated words")
    p.add_argument("--dict", required=True, help="CMUdict-style pronunciation dictionary")
    p.add_argument("--folding", help="folding TSV, or 'buckeye' / 'timit'")
    p.add_argument("--out", help="output TextGrid (single-utterance mode)")
    p.add_argument("--interp", dest="interp", action="store_true", default=False)
    p.add_argument("--no-interp", dest="interp", action="store_false")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--weights", help="linear scorer weights (MAPSLIN1), for audio input")
    p.add_argument("--phones", help="phone list naming the scorer's classes")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("eval", help="boundary errors between two TextGrid directories")
    p.add_argument("--ref-dir", required=True)
    p.add_argument("--hyp-dir", required=True)
    p.add_argument("--tolerances", type=_tolerances, default=list(DEFAULT_TOLERANCES))
    p.add_argument("--tier", help="tier name to compare (default: first tier)")
    p.add_argument("--folding", help="fold labels before comparing")
    p.add_argument("--tsv-out", help="tolerance table (default: stdout)")
    p.add_argument("--cdf-out")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("features", help="dump MFCC+delta+delta-delta features")
    p.add_argument("--wav", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_features)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("MAPS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PhonalignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
