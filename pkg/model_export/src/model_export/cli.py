"""export_models: batch-convert public classifiers to portable model dirs.

Usage: export_models --spec exports.json --out models/

The spec file lists exports:
    {"exports": [{"source": "torchvision:squeezenet1_1"},
                 {"source": "torchvision:shufflenet_v2_x0_5", "name": "shuffle"}]}
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .export import ExportError, ExportSpec, export_model


def parse_spec_file(path: str) -> list[ExportSpec]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    specs = []
    for entry in data.get("exports", []):
        specs.append(
            ExportSpec(
                source=entry["source"],
                name=entry.get("name"),
                preprocess_overrides=entry.get("preprocess_overrides", {}),
                output_is_softmaxed=entry.get("output_is_softmaxed"),
            )
        )
    if not specs:
        raise ValueError(f"{path} lists no exports")
    return specs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="export_models", description=__doc__)
    parser.add_argument("--spec", required=True, help="exports JSON file")
    parser.add_argument("--out", required=True, help="output root directory")
    parser.add_argument("--only", default=None, help="comma-separated names to export")
    args = parser.parse_args(argv)

    try:
        specs = parse_spec_file(args.spec)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.only:
        keep = {n.strip() for n in args.only.split(",")}
        specs = [s for s in specs if s.resolved_name() in keep]

    failures = 0
    for spec in specs:
        try:
            result = export_model(spec, Path(args.out))
        except ExportError as exc:
            failures += 1
            print(f"FAIL {spec.resolved_name()}: {exc}", file=sys.stderr)
            continue
        print(
            f"ok   {result.name}: top1={result.reference_top1_label!r} "
            f"max_abs_diff={result.max_abs_diff:.2e} -> {result.manifest_path}"
        )
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
