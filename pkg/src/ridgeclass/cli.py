"""Command-line interface.

Subcommands:

* ``synth``     generate a synthetic ridge-texture dataset (PGM + manifest)
* ``extract``   dump the feature vector of one image
* ``train``     build a feature database from a manifest
* ``classify``  classify one image against a database
* ``evaluate``  run the split/train/classify experiment and report tables

Exit codes: 0 success, 1 usage error, 2 data/format error. Every flag can
also be supplied through ``--config FILE`` (UTF-8 ``key = value`` lines,
keys named like the long flags); explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from . import __version__
from .classifier import KnnConfig, knn_classify
from .errors import RidgeclassError
from .evaluate import (
    ExperimentConfig,
    ReportFormat,
    render_report,
    resolve_workers,
    run_experiment,
)
from .features import (
    FeatureLayout,
    FeatureMode,
    build_database,
    extract_features,
    load_database,
    save_database,
)
from .figures import save_report_figure
from .image_io import CropRegion, Gender, crop, load_image, load_manifest
from .synth import SynthClass, SynthSpec, generate, write_dataset

_GENDER_NAMES = {Gender.MALE: "male", Gender.FEMALE: "female"}


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; data problems exit 2 (spec'd CLI contract)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def load_config_file(path) -> dict[str, str]:
    """Parse a ``key = value`` config file; '#' starts a comment line."""
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise RidgeclassError(f"config line without '=': {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("_", "-")] = value.strip()
    return values


class _Options:
    """Merged view of CLI flags, config-file values and defaults."""

    def __init__(self, args: argparse.Namespace, parser: _Parser):
        self.args = args
        self.parser = parser
        self.file_cfg = load_config_file(args.config) if args.config else {}

    def get(self, key: str, default=None, cast=None):
        value = getattr(self.args, key.replace("-", "_"))
        if value is None and key in self.file_cfg:
            value = self.file_cfg[key]
        if value is None:
            return default
        if cast is not None and isinstance(value, str):
            try:
                value = cast(value)
            except ValueError as exc:
                self.parser.error(f"value for {key!r}: {exc}")
        return value

    def require(self, key: str, cast=None):
        value = self.get(key, cast=cast)
        if value is None:
            self.parser.error(f"--{key} is required")
        return value


def _parse_crop(text: str) -> CropRegion:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"crop must be 'top,left,height,width', got {text!r}")
    top, left, height, width = (int(p) for p in parts)
    return CropRegion(top, left, height, width)


def _int_list(text: str) -> list[int]:
    return [int(p) for p in str(text).split(",")]


def _mode_list(text: str) -> list[FeatureMode]:
    return [FeatureMode(p.strip()) for p in str(text).split(",")]


def _add_extraction_flags(parser: argparse.ArgumentParser, with_mode: bool = True):
    parser.add_argument("--level", type=int, help="decomposition level (default 6)")
    parser.add_argument("--wavelet", help="wavelet filter name (default haar)")
    parser.add_argument("--boundary", help="boundary extension mode (default symmetric)")
    parser.add_argument("--crop", help="crop region as top,left,height,width")
    if with_mode:
        parser.add_argument(
            "--mode", help="feature mode: dwt, svd or fused (default fused)"
        )


def build_parser() -> _Parser:
    parser = _Parser(prog="ridgeclass", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"ridgeclass {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file mirroring the flags")

    p = sub.add_parser("synth", parents=[common],
                       help="generate a synthetic ridge-texture dataset")
    p.add_argument("--out", help="output directory for PGM files and manifest.csv")
    p.add_argument("--seed", type=int, help="generator seed (default 42)")
    p.add_argument("--rows", type=int, help="image height in pixels (default 300)")
    p.add_argument("--cols", type=int, help="image width in pixels (default 260)")
    p.add_argument("--count", type=int, help="images per class (default 60)")
    p.add_argument("--male-period", type=float, help="male ridge period in px (default 10)")
    p.add_argument("--female-period", type=float, help="female ridge period in px (default 6)")
    p.add_argument("--jitter", type=float, help="orientation jitter in degrees (default 15)")
    p.add_argument("--noise-sigma", type=float, help="additive noise sigma (default 10)")

    p = sub.add_parser("extract", parents=[common],
                       help="dump the feature vector of one image")
    p.add_argument("--image", help="input PGM image")
    p.add_argument("--out", help="output file (default: stdout)")
    _add_extraction_flags(p)

    p = sub.add_parser("train", parents=[common],
                       help="build a feature database from a manifest")
    p.add_argument("--manifest", help="dataset manifest CSV")
    p.add_argument("--out", help="output database file")
    _add_extraction_flags(p)

    p = sub.add_parser("classify", parents=[common],
                       help="classify one image against a database")
    p.add_argument("--db", help="feature database file")
    p.add_argument("--image", help="input PGM image")
    p.add_argument("--k", type=int, help="neighbor count (default 1)")
    p.add_argument("--boundary", help="boundary extension mode (default symmetric)")
    p.add_argument("--crop", help="crop region as top,left,height,width")

    p = sub.add_parser("evaluate", parents=[common],
                       help="run the full experiment and print report tables")
    p.add_argument("--manifest", help="dataset manifest CSV")
    p.add_argument("--mode", help="feature mode(s), comma separated (default fused)")
    p.add_argument("--level", help="decomposition level(s), comma separated (default 6)")
    p.add_argument("--k", help="neighbor count(s), comma separated (default 1)")
    p.add_argument("--seed", type=int, help="split seed (default 0)")
    p.add_argument("--wavelet", help="wavelet filter name (default haar)")
    p.add_argument("--boundary", help="boundary extension mode (default symmetric)")
    p.add_argument("--crop", help="crop region as top,left,height,width")
    p.add_argument("--normalize", choices=["zscore"],
                   help="feature normalization: zscore (default off)")
    p.add_argument("--per-finger-db", action="store_const", const=True,
                   help="classify each finger against a per-finger database")
    p.add_argument("--format", choices=ReportFormat.ALL,
                   help="report format (default text)")
    p.add_argument("--out", help="report output file (default: stdout)")
    p.add_argument("--figures", help="directory for per-report accuracy figures")
    return parser


def _cmd_synth(opts: _Options) -> int:
    out_dir = Path(opts.require("out"))
    spec = SynthSpec(
        classes=(
            SynthClass(
                label=Gender.MALE,
                ridge_period_px=opts.get("male-period", 10.0, float),
                orientation_jitter_deg=opts.get("jitter", 15.0, float),
                count=opts.get("count", 60, int),
            ),
            SynthClass(
                label=Gender.FEMALE,
                ridge_period_px=opts.get("female-period", 6.0, float),
                orientation_jitter_deg=opts.get("jitter", 15.0, float),
                count=opts.get("count", 60, int),
            ),
        ),
        image_shape=(opts.get("rows", 300, int), opts.get("cols", 260, int)),
        noise_sigma=opts.get("noise-sigma", 10.0, float),
        seed=opts.get("seed", 42, int),
    )
    dataset = generate(spec)
    manifest = write_dataset(dataset, out_dir)
    print(f"wrote {len(dataset)} images and {manifest}")
    return 0


def _load_query_image(opts: _Options):
    image = load_image(opts.require("image"))
    region = opts.get("crop", cast=_parse_crop)
    if region is not None:
        image = crop(image, region)
    return image


def _cmd_extract(opts: _Options) -> int:
    image = _load_query_image(opts)
    feature = extract_features(
        image,
        k=opts.get("level", 6, int),
        wavelet=opts.get("wavelet", "haar"),
        boundary=opts.get("boundary", "symmetric"),
        mode=FeatureMode(opts.get("mode", "fused")),
    )
    text = "\n".join(f"{v:.17g}" for v in feature.values) + "\n"
    out = opts.get("out")
    if out:
        Path(out).write_text(text, encoding="utf-8")
        print(f"wrote {len(feature.values)} values to {out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_train(opts: _Options) -> int:
    samples = load_manifest(opts.require("manifest"))
    region = opts.get("crop", cast=_parse_crop)
    loaded = []
    for meta in samples:
        image = load_image(meta.image_path)
        if region is not None:
            image = crop(image, region)
        loaded.append((image, meta))
    db = build_database(
        loaded,
        k=opts.get("level", 6, int),
        wavelet=opts.get("wavelet", "haar"),
        boundary=opts.get("boundary", "symmetric"),
        mode=FeatureMode(opts.get("mode", "fused")),
        workers=resolve_workers(),
    )
    out = opts.require("out")
    save_database(db, out)
    print(f"wrote {len(db.entries)} entries to {out}")
    return 0


def _mode_from_layout(layout: FeatureLayout) -> FeatureMode:
    if layout.spectrum_len == 0:
        return FeatureMode.DWT_ONLY
    if layout.energy_len == 0:
        return FeatureMode.SVD_ONLY
    return FeatureMode.FUSED


def _cmd_classify(opts: _Options) -> int:
    db = load_database(opts.require("db"))
    image = _load_query_image(opts)
    feature = extract_features(
        image,
        k=db.config.k_level,
        wavelet=db.config.wavelet,
        boundary=opts.get("boundary", "symmetric"),
        mode=_mode_from_layout(db.config.layout),
    )
    result = knn_classify(feature, db, KnnConfig(k_neighbors=opts.get("k", 1, int)))
    print(f"label: {_GENDER_NAMES[result.label]}")
    votes = " ".join(
        f"{_GENDER_NAMES[g]}={result.votes.get(g, 0)}" for g in Gender
    )
    print(f"votes: {votes}")
    print("neighbors:")
    for sid, dist in zip(result.neighbor_ids, result.neighbor_distances):
        print(f"  {dist:.6g}  {sid}")
    return 0


def _cmd_evaluate(opts: _Options) -> int:
    manifest = opts.require("manifest")
    modes = opts.get("mode", [FeatureMode.FUSED], _mode_list)
    levels = opts.get("level", [6], _int_list)
    ks = opts.get("k", [1], _int_list)
    for level in levels:
        if level < 1:
            opts.parser.error(f"--level must be >= 1, got {level}")
    for k in ks:
        if k < 1:
            opts.parser.error(f"--k must be >= 1, got {k}")

    fmt = opts.get("format", ReportFormat.TEXT)
    if fmt not in ReportFormat.ALL:
        opts.parser.error(f"--format must be one of {ReportFormat.ALL}, got {fmt!r}")
    out = opts.get("out")
    figures_dir = opts.get("figures")
    normalize = opts.get("normalize")
    if normalize not in (None, "zscore"):
        opts.parser.error(f"--normalize must be 'zscore', got {normalize!r}")
    workers = resolve_workers()

    rendered: list[tuple[ExperimentConfig, str]] = []
    reports = []
    for mode, level, k in itertools.product(modes, levels, ks):
        cfg = ExperimentConfig(
            feature_mode=mode,
            k_level=level,
            knn=KnnConfig(k_neighbors=k),
            split_seed=opts.get("seed", 0, int),
            wavelet=opts.get("wavelet", "haar"),
            boundary=opts.get("boundary", "symmetric"),
            crop_region=opts.get("crop", cast=_parse_crop),
            normalize=normalize,
            per_finger_db=bool(opts.get("per-finger-db", False, _parse_bool)),
        )
        report = run_experiment(manifest, cfg, workers=workers)
        reports.append(report)
        rendered.append((cfg, render_report(report, fmt)))
        if figures_dir:
            save_report_figure(report, Path(figures_dir) / f"report_{cfg.tag()}.png")

    if out:
        out = Path(out)
        if len(rendered) == 1:
            out.write_text(rendered[0][1], encoding="utf-8")
        else:
            for cfg, text in rendered:
                target = out.with_name(f"{out.stem}_{cfg.tag()}{out.suffix}")
                target.write_text(text, encoding="utf-8")
        print(f"wrote {len(rendered)} report(s)")
    elif fmt == ReportFormat.JSON and len(rendered) > 1:
        merged = [json.loads(text) for _, text in rendered]
        print(json.dumps(merged, indent=2, sort_keys=True))
    else:
        sys.stdout.write("\n".join(text for _, text in rendered))
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "extract": _cmd_extract,
    "train": _cmd_train,
    "classify": _cmd_classify,
    "evaluate": _cmd_evaluate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: a command is required", file=sys.stderr)
        return 1
    opts = _Options(args, parser)
    try:
        return _COMMANDS[args.command](opts)
    except (RidgeclassError, OSError, ValueError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
