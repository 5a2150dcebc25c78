"""coolsim-plot: render figure analogues from a scenario run directory.

Usage: coolsim-plot <manifest.json> --out <dir> [--format png|svg]

The manifest (written by `coolsim run`) names the scenario and the CSV
outputs; the CSVs are validated against the scenario schema and one
image is rendered per panel.  Exit status 1 on schema or argument
problems.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .render import FigureJob, render
from .schemas import SchemaMismatchError


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="coolsim-plot", description=__doc__)
    parser.add_argument("manifest", help="manifest.json of a scenario run")
    parser.add_argument("--out", required=True, help="output directory for images")
    parser.add_argument("--format", choices=("png", "svg"), default="png")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    manifest_path = Path(args.manifest)
    if not manifest_path.is_file():
        print(f"error: manifest not found: {manifest_path}", file=sys.stderr)
        return 1
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        config = manifest.get("config", {}) or {}
        bounds = config.get("surrogate_bounds") or {}
        job = FigureJob(
            scenario=manifest["scenario"],
            csv_dir=manifest_path.parent,
            out_dir=Path(args.out),
            image_format=args.format,
            surrogate_bounds={str(k): float(v) for k, v in dict(bounds).items()},
        )
        images = render(job)
    except (SchemaMismatchError, KeyError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for image in images:
        print(image)
    return 0


if __name__ == "__main__":
    sys.exit(main())
