"""Command-line entry points: draw, eval, rank, render.

A thin shell over the library — parsing, wiring, and serialization only.
Exit codes: 0 success, 2 usage/config error, 3 backend/model load error,
4 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .classifiers import (
    ModelLoadError,
    ToyClassifier,
    load_backend,
    load_manifest,
    resolve_label,
)
from .evaluate import (
    amplification_rank,
    load_image,
    save_image,
    transfer_chart,
    transfer_matrix,
    write_amplification,
    write_report,
)
from .genome import load_genome, save_genome
from .objective import EnsembleMember, ObjectiveConfig, make_objective, score
from .raster import rasterize
from .search import ObjectiveError, SearchConfig, hill_climb, trace_to_csv
from .svg import save_svg

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_LOAD = 3
EXIT_RUNTIME = 4


class ConfigError(ValueError):
    pass


def default_workers() -> int:
    env = os.environ.get("PE_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _load_run_config(path: str, seed: int | None, out: str | None) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if "search" not in config or "objective" not in config:
        raise ConfigError("run config needs 'search' and 'objective' sections")
    # Flag overrides win over file values.
    if seed is not None:
        config["search"]["seed"] = seed
    if out is not None:
        config["output_dir"] = out
    config.setdefault("output_dir", "runs/out")
    config.setdefault("emit", {})
    emit = config["emit"]
    for key in ("png", "svg", "report", "trace"):
        emit.setdefault(key, True)
    # Manifest paths are relative to the config file, like any include.
    base = Path(path).resolve().parent
    for member in config["objective"].get("members", []):
        manifest = member.get("manifest")
        if manifest and not os.path.isabs(manifest):
            member["manifest"] = str(base / manifest)
    return config


def build_objective_config(obj_cfg: dict) -> ObjectiveConfig:
    members = []
    for entry in obj_cfg.get("members", []):
        if entry.get("backend") == "toy":
            backend = ToyClassifier()
        elif "manifest" in entry:
            backend = load_backend(entry["manifest"])
        else:
            raise ConfigError(f"member {entry!r} needs 'backend': 'toy' or a 'manifest' path")
        target = resolve_label(backend.labels, entry["target_label"])
        members.append(EnsembleMember(backend, target, float(entry.get("weight", 1.0))))
    if not members:
        raise ConfigError("objective.members must not be empty")
    return ObjectiveConfig(
        members=members,
        aggregation=obj_cfg.get("aggregation", "mean"),
        render_size=int(obj_cfg.get("render_size", 512)),
        supersample=int(obj_cfg.get("supersample", 4)),
    )


def _write_json(path: Path, data: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_draw(config: dict, workers: int) -> int:
    out_dir = Path(config["output_dir"])
    record_path = out_dir / "run_record.json"
    try:
        search_config = SearchConfig.from_dict(config["search"])
    except (TypeError, ValueError) as exc:
        print(f"error: invalid search config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        objective_config = build_objective_config(config["objective"])
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelLoadError, KeyError) as exc:
        _write_json(record_path, {"status": "error", "error": str(exc), "config": config})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD

    try:
        result = hill_climb(make_objective(objective_config), search_config, workers=workers)
    except ObjectiveError as exc:
        failing = out_dir / "failing_genome.json"
        failing.parent.mkdir(parents=True, exist_ok=True)
        failing.write_text(exc.genome_json + "\n", encoding="utf-8")
        _write_json(record_path, {"status": "error", "error": str(exc), "config": config})
        print(f"error: {exc} (genome saved to {failing})", file=sys.stderr)
        return EXIT_RUNTIME

    final = score(result.best_genome, objective_config)
    emit = config["emit"]
    out_dir.mkdir(parents=True, exist_ok=True)
    if emit.get("report", True):
        save_genome(result.best_genome, out_dir / "genome.json")
    if emit.get("png", True):
        image = rasterize(
            result.best_genome,
            objective_config.render_size,
            max(1, round(objective_config.render_size / result.best_genome.aspect)),
            supersample=objective_config.supersample,
        )
        save_image(image, out_dir / "drawing.png")
    if emit.get("svg", True):
        save_svg(result.best_genome, out_dir / "drawing.svg")
    if emit.get("trace", True):
        (out_dir / "trace.csv").write_text(trace_to_csv(result.trace), encoding="utf-8")

    _write_json(
        record_path,
        {
            "status": "ok",
            "config": config,
            "seed": search_config.seed,
            "workers_hint": workers,
            "evaluations": result.evaluations,
            "best_score": result.best_score,
            "per_member": [{"name": n, "target_p": p} for n, p in final.per_member],
            "version": __version__,
        },
    )
    print(f"best_score={result.best_score:.6f} evaluations={result.evaluations} -> {out_dir}")
    return EXIT_OK


def _parse_model_list(tokens: str):
    """Each comma-separated token is 'toy' or a manifest path."""
    backends = []
    for token in tokens.split(","):
        token = token.strip()
        if not token:
            continue
        if token == "toy":
            backends.append((token, ToyClassifier()))
        else:
            backends.append((token, load_backend(load_manifest(token))))
    if not backends:
        raise ConfigError("no models given")
    return backends


def _ensemble_tokens(arg: str | None) -> set[str]:
    return {t.strip() for t in arg.split(",") if t.strip()} if arg else set()


def run_eval(args) -> int:
    try:
        image = load_image(args.image)
    except Exception as exc:
        print(f"error: cannot read image {args.image}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        backends = _parse_model_list(args.models)
    except (ModelLoadError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    ensemble = _ensemble_tokens(args.ensemble)

    entries = []
    for token, backend in backends:
        try:
            target = resolve_label(backend.labels, args.target_label)
        except KeyError as exc:
            print(f"error: {exc.args[0]}", file=sys.stderr)
            return EXIT_USAGE
        is_member = token in ensemble or backend.name in ensemble or Path(token).stem in ensemble
        entries.append((backend, target, is_member))

    report = transfer_matrix(image, entries, k=args.k, image_path=args.image)
    if not report.models:
        print("error: every model failed", file=sys.stderr)
        return EXIT_RUNTIME
    if args.out:
        write_report(report, args.out)
    else:
        json.dump(report.to_dict(), sys.stdout, indent=2)
        print()
    if args.chart:
        transfer_chart(report, args.chart, target_label=args.target_label)
    return EXIT_OK


def run_rank(args) -> int:
    try:
        image = load_image(args.image)
    except Exception as exc:
        print(f"error: cannot read image {args.image}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    validation_dir = Path(args.validation)
    files = sorted(p for p in validation_dir.glob("*") if p.is_file()) if validation_dir.is_dir() else []
    if not files:
        print(f"error: no validation images in {args.validation}", file=sys.stderr)
        return EXIT_USAGE
    try:
        backend = ToyClassifier() if args.model == "toy" else load_backend(args.model)
    except ModelLoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    try:
        target = resolve_label(backend.labels, args.target_label)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE

    try:
        result = amplification_rank(image, [str(p) for p in files], backend, target)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        write_amplification(result, args.out)
    else:
        json.dump(result.to_dict(), sys.stdout, indent=2)
        print()
    return EXIT_OK


def run_render(args) -> int:
    try:
        drawing = load_genome(args.genome)
    except Exception as exc:
        print(f"error: cannot read genome {args.genome}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not args.png and not args.svg:
        print("error: nothing to do; pass --png and/or --svg", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.png:
            width = args.size
            height = max(1, round(args.size / drawing.aspect))
            save_image(rasterize(drawing, width, height, supersample=args.supersample), args.png)
        if args.svg:
            save_svg(drawing, args.svg, width_units=float(args.size))
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pe",
        description="Evolve stroke drawings against a classifier ensemble; evaluate transfer.",
    )
    parser.add_argument("--version", action="version", version=f"pe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_draw = sub.add_parser("draw", help="run the search and write artifacts")
    p_draw.add_argument("--config", required=True, help="run-config JSON file")
    p_draw.add_argument("--seed", type=int, default=None, help="override config seed")
    p_draw.add_argument("--out", default=None, help="override output directory")
    p_draw.add_argument("--workers", type=int, default=None, help="evaluation workers (default: $PE_WORKERS or machine parallelism)")

    p_eval = sub.add_parser("eval", help="top-k transfer report for an image")
    p_eval.add_argument("--image", required=True)
    p_eval.add_argument("--models", required=True, help="comma-separated manifest paths (or 'toy')")
    p_eval.add_argument("--ensemble", default=None, help="comma-separated names of ensemble members")
    p_eval.add_argument("--target-label", required=True)
    p_eval.add_argument("--k", type=int, default=5)
    p_eval.add_argument("--out", default=None, help="write report JSON here instead of stdout")
    p_eval.add_argument("--chart", default=None, help="also emit a bar-chart grid PNG")

    p_rank = sub.add_parser("rank", help="rank an image against validation images")
    p_rank.add_argument("--image", required=True)
    p_rank.add_argument("--validation", required=True, help="directory of validation images")
    p_rank.add_argument("--model", required=True, help="manifest path (or 'toy')")
    p_rank.add_argument("--target-label", required=True)
    p_rank.add_argument("--out", default=None)

    p_render = sub.add_parser("render", help="render a genome to PNG/SVG without searching")
    p_render.add_argument("--genome", required=True)
    p_render.add_argument("--png", default=None)
    p_render.add_argument("--svg", default=None)
    p_render.add_argument("--size", type=int, default=1024)
    p_render.add_argument("--supersample", type=int, default=4)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "draw":
        try:
            config = _load_run_config(args.config, args.seed, args.out)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        workers = args.workers if args.workers else default_workers()
        return run_draw(config, workers)
    if args.command == "eval":
        return run_eval(args)
    if args.command == "rank":
        return run_rank(args)
    if args.command == "render":
        return run_render(args)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
