"""Command-line entry point: ``maf identify | simulate | split | evaluate``.

Exit codes: 0 success, 2 input or parse error, 3 configuration or
precondition error. ``MAF_LOG`` sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from maf.dataset import jsonio
from maf.dataset.evaluate import evaluate
from maf.dataset.manifest import MANIFEST_FILE, read_manifest
from maf.dataset.query_io import load_query
from maf.dataset.splits import SPLIT_NAMES, make_split
from maf.dataset.synthetic import BenchmarkSpec, build_benchmark
from maf.errors import MafError, ParseError, PreconditionError
from maf.motion_match import NormalizationMode, WindowSpec
from maf.pipeline import PipelineConfig, identify
from maf.simulator import QueryKnobs

log = logging.getLogger("maf")

EXIT_OK, EXIT_INPUT, EXIT_CONFIG = 0, 2, 3

PRESETS = {
    "easy": {},
    "ambiguous": {"clones": 1, "detect_clones": True},
    "noisy": {"embedding_noise": 0.3, "prediction_noise": 0.1},
}


@dataclass(frozen=True)
class RunConfig:
    window_length: int = 8
    window_stride: int = 4
    norm: str = NormalizationMode.EGO_SCALE.value
    lambda_trust: float = 1.0
    seed: int = 0
    jobs: int = 1

    def validate(self) -> None:
        self.pipeline()
        if self.jobs < 1:
            raise PreconditionError(f"--jobs must be >= 1, got {self.jobs}")

    def pipeline(self) -> PipelineConfig:
        try:
            norm = NormalizationMode(self.norm)
        except ValueError:
            valid = ", ".join(m.value for m in NormalizationMode)
            raise PreconditionError(f"unknown normalization {self.norm!r}; valid: {valid}") from None
        return PipelineConfig(WindowSpec(self.window_length, self.window_stride), norm, self.lambda_trust)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the ``--config`` JSON file, then explicit flags."""
    cfg = RunConfig()
    if getattr(args, "config", None):
        doc = jsonio.load(args.config)
        if not isinstance(doc, dict):
            raise ParseError("config file must hold a JSON object", args.config)
        known = {f.name for f in fields(RunConfig)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise PreconditionError(f"unknown config keys {unknown}; valid: {sorted(known)}")
        for key, value in doc.items():
            expected = type(getattr(cfg, key))
            ok = isinstance(value, (int, float)) if expected is float else isinstance(value, expected)
            if not ok or isinstance(value, bool):
                raise PreconditionError(f"config key {key!r} should be {expected.__name__}, got {value!r}")
        cfg = replace(cfg, **doc)
    overrides = {
        f.name: getattr(args, f.name)
        for f in fields(RunConfig)
        if getattr(args, f.name, None) is not None
    }
    cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


def _emit(args: argparse.Namespace, text: str, payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def cmd_identify(args: argparse.Namespace, cfg: RunConfig) -> int:
    query = load_query(args.query)
    result = identify(query, cfg.pipeline())
    payload = {
        "sequence_id": query.sequence_id,
        "predicted": result.candidate_id,
        "index": result.predicted,
    }
    trace = result.trace_json()
    if args.explain and args.explain != "-":
        jsonio.dump(args.explain, trace)
    if args.explain == "-":
        payload["trace"] = trace
    _emit(args, result.candidate_id, payload)
    if args.explain == "-" and not args.json:
        print(jsonio.dumps(trace), end="")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, cfg: RunConfig) -> int:
    knob_values = dict(PRESETS[args.preset])
    for name in ("clones", "detection_rate", "embedding_noise", "prediction_noise", "occlusion_rate"):
        value = getattr(args, name)
        if value is not None:
            knob_values[name] = value
    spec = BenchmarkSpec(
        n_queries=args.queries,
        seed=cfg.seed,
        n_distractors=args.distractors,
        sequence_length=args.length,
        per_video=args.per_video,
        mixed_tags=args.mixed_tags,
        knobs=QueryKnobs(**knob_values),
        window=cfg.pipeline().window,
    )
    out = Path(args.out)
    try:
        manifest = build_benchmark(out, spec, jobs=cfg.jobs)
    except OSError as exc:
        raise ParseError(f"cannot write output: {exc.strerror or exc}", exc.filename or out) from None
    _emit(
        args,
        str(out / MANIFEST_FILE),
        {"manifest": str(out / MANIFEST_FILE), "n_queries": len(manifest.sequences)},
    )
    return EXIT_OK


def _check_split_name(name: str) -> None:
    if name not in SPLIT_NAMES:
        raise PreconditionError(f"unknown split {name!r}; valid names: {', '.join(SPLIT_NAMES)}")


def cmd_split(args: argparse.Namespace, cfg: RunConfig) -> int:
    _check_split_name(args.split)
    split = make_split(read_manifest(args.manifest), args.split, cfg.seed)
    if args.out:
        jsonio.dump(args.out, split.to_json())
    _emit(
        args,
        f"{split.name}: {len(split.train)} train / {len(split.test)} test",
        {"split": split.name, "train": len(split.train), "test": len(split.test)},
    )
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace, cfg: RunConfig) -> int:
    _check_split_name(args.split)
    manifest_path = Path(args.manifest)
    if manifest_path.is_dir():
        manifest_path = manifest_path / MANIFEST_FILE
    manifest = read_manifest(manifest_path)
    split = make_split(manifest, args.split, cfg.seed)
    report = evaluate(manifest, split, cfg.pipeline(), root=manifest_path.parent, jobs=cfg.jobs)
    if args.out:
        jsonio.dump(args.out, report)
    _emit(
        args,
        f"accuracy {report['accuracy']!r} ({report['n_correct']}/{report['n_queries']})",
        {"accuracy": report["accuracy"], "n_correct": report["n_correct"], "n_queries": report["n_queries"]},
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with run configuration")
    common.add_argument("--window-length", dest="window_length", type=int)
    common.add_argument("--window-stride", dest="window_stride", type=int)
    common.add_argument("--norm", help="raw or ego-scale (default)")
    common.add_argument("--lambda-trust", dest="lambda_trust", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int, help="worker processes; output does not depend on it")
    common.add_argument("--json", action="store_true", help="one JSON object per output line")
    common.add_argument("--print-config", dest="print_config", action="store_true",
                        help="print the resolved configuration and exit")

    parser = argparse.ArgumentParser(prog="maf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identify", parents=[common], help="predict the camera wearer of one query")
    p.add_argument("query", help="query directory")
    p.add_argument("--explain", metavar="PATH", help="write the fusion trace JSON ('-' for stdout)")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("simulate", parents=[common], help="write a synthetic benchmark")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--queries", type=int, default=1)
    p.add_argument("--distractors", type=int, default=3)
    p.add_argument("--length", type=int, default=17, help="frames per sequence")
    p.add_argument("--per-video", dest="per_video", type=int, default=10)
    p.add_argument("--mixed-tags", dest="mixed_tags", action="store_true",
                   help="cycle videos through tf2023/iushareview/ego4d_tf tags")
    p.add_argument("--preset", choices=sorted(PRESETS), default="easy")
    p.add_argument("--clones", type=int)
    p.add_argument("--detection-rate", dest="detection_rate", type=float)
    p.add_argument("--embedding-noise", dest="embedding_noise", type=float)
    p.add_argument("--prediction-noise", dest="prediction_noise", type=float)
    p.add_argument("--occlusion-rate", dest="occlusion_rate", type=float)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("split", parents=[common], help="compute a train/test split")
    p.add_argument("manifest")
    p.add_argument("--split", required=True)
    p.add_argument("--out", help="write the assignment JSON here")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("evaluate", parents=[common], help="top-1 accuracy over a split's test side")
    p.add_argument("manifest", help="manifest file or the directory holding manifest.json")
    p.add_argument("--split", required=True)
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("MAF_LOG", "WARNING").upper()
    logging.basicConfig(
        level=level if isinstance(logging.getLevelName(level), int) else "WARNING",
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.print_config:
            print(json.dumps(asdict(cfg), sort_keys=True))
            return EXIT_OK
        return args.func(args, cfg)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MafError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
