"""Command line: skeleton | score | batch | gate | assemble.

Exit codes: 0 ok, 2 bad user input, 3 I/O failure, 4 unsupported image.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .assembly import DEFAULT_K, assemble_to_height, plan_grids
from .chart import ChartSpec, ChartType, normalize, parse_spec
from .exceptions import DimensionMismatch, NoAlphaChannel, SchemaError, TargetTooSmall, TooSmall
from .fields import RegionWeights, build_distance_field, default_region_weights
from .gate import DEFAULT_BETA, AttentionBlock, GateConfig, spatially_gated_attention
from .metric import (
    DEFAULT_BLUR_SIGMA,
    DEFAULT_EPSILON,
    DEFAULT_POINTS_PER_BAND,
    SamplingConfig,
    exhaustive_f1,
    preprocess_chart,
    weighted_f1,
)
from .skeleton import DEFAULT_STROKE_PX, RasterConfig, build_skeleton_geometry, rasterize_skeleton, skeleton_token_indices

log = logging.getLogger("chartskel")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_IMAGE = 0, 2, 3, 4
CSV_FIELDS = [
    "path", "chart_type", "f1", "precision", "recall", "seed", "status",
    "method", "points_per_band", "band_edges", "weights", "epsilon", "blur_sigma",
]


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _dims(text: str) -> tuple[int, int]:
    try:
        rows, cols = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS, got {text!r}") from None
    return rows, cols


def load_spec(path) -> ChartSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read spec {path}: {exc}", EXIT_IO) from exc
    try:
        return parse_spec(text)
    except ValueError as exc:
        raise CliError(f"invalid spec {path}: {exc}", EXIT_USAGE) from exc


def load_image(path):
    try:
        return io.read_image(path)
    except FileNotFoundError as exc:
        raise CliError(f"cannot read image {path}: {exc}", EXIT_IO) from exc
    except OSError as exc:
        raise CliError(f"cannot read image {path}: {exc}", EXIT_IO) from exc


def region_weights_from_args(args, spec: ChartSpec) -> RegionWeights:
    defaults = default_region_weights(spec.chart_type, spec.canvas)
    try:
        return RegionWeights(
            args.band_edges if args.band_edges is not None else defaults.band_edges,
            args.weights if args.weights is not None else defaults.weights,
        )
    except ValueError as exc:
        raise CliError(f"invalid band configuration: {exc}", EXIT_USAGE) from exc


def score_image(image, spec: ChartSpec, args, seed: int):
    """Score one image; returns a FidelityReport with the full config echoed."""
    nspec = normalize(spec)
    rw = region_weights_from_args(args, spec)
    mask = preprocess_chart(image, spec.chart_type, nspec, args.blur_sigma).mask
    field = build_distance_field(nspec)
    if args.exhaustive:
        report = exhaustive_f1(mask, field, rw, args.epsilon)
    else:
        report = weighted_f1(mask, field, rw, SamplingConfig(args.points_per_band, seed, args.epsilon))
    report.config.update(
        blur_sigma=args.blur_sigma,
        chart_type=spec.chart_type.value,
        points_per_band=args.points_per_band,
        seed=seed,
    )
    return report


def cmd_skeleton(args) -> int:
    spec = load_spec(args.spec)
    nspec = normalize(spec)
    raster = rasterize_skeleton(build_skeleton_geometry(nspec), RasterConfig(args.stroke_px, args.bg))
    try:
        io.write_png(args.out, raster.pixels)
        if args.field_png:
            io.write_field_png(args.field_png, build_distance_field(nspec))
    except OSError as exc:
        raise CliError(f"cannot write output: {exc}", EXIT_IO) from exc
    if args.tokens:
        index_set = skeleton_token_indices(raster, args.tokens)
        print(json.dumps({"grid_dims": list(index_set.grid_dims), "indices": index_set.indices.tolist()}))
    return EXIT_OK


def cmd_score(args) -> int:
    spec = load_spec(args.spec)
    image = load_image(args.image)
    try:
        report = score_image(image, spec, args, args.seed)
    except NoAlphaChannel as exc:
        raise CliError(f"{args.image}: {exc}", EXIT_IMAGE) from exc
    except DimensionMismatch as exc:
        raise CliError(f"{args.image}: {exc}", EXIT_USAGE) from exc
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


def read_manifest(path) -> list[dict]:
    """Rows of image_path, spec_path and optional chart_type; paths relative to the manifest."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read manifest {path}: {exc}", EXIT_IO) from exc
    reader = csv.DictReader(_io.StringIO(text))
    if reader.fieldnames is None:
        return []
    if not {"image_path", "spec_path"} <= set(reader.fieldnames):
        raise CliError("manifest needs image_path and spec_path columns", EXIT_USAGE)
    rows = []
    for row in reader:
        rows.append(
            {
                "image_path": row["image_path"],
                "image": path.parent / row["image_path"],
                "spec": path.parent / row["spec_path"],
                "chart_type": (row.get("chart_type") or "").strip() or None,
            }
        )
    return rows


def _batch_row(index: int, row: dict, args) -> dict:
    seed = args.seed ^ index
    out = {"path": row["image_path"], "chart_type": row["chart_type"] or "", "seed": seed,
           "f1": "", "precision": "", "recall": ""}
    try:
        spec = load_spec(row["spec"])
        if row["chart_type"]:
            spec = replace(spec, chart_type=ChartType(row["chart_type"].lower()))
        out["chart_type"] = spec.chart_type.value
        if not Path(row["image"]).is_file():
            return {**out, "status": "missing"}
        image = load_image(row["image"])
        report = score_image(image, spec, args, seed)
    except CliError as exc:
        return {**out, "status": "spec_error" if exc.code == EXIT_USAGE else "io_error"}
    except NoAlphaChannel:
        return {**out, "status": "no_alpha"}
    except ValueError:
        return {**out, "status": "invalid"}
    cfg = report.config
    return {
        **out,
        "f1": repr(report.f1),
        "precision": repr(report.weighted_precision),
        "recall": repr(report.weighted_recall),
        "status": "ok",
        "method": report.method.value,
        "band_edges": ",".join(repr(e) for e in cfg["band_edges"]),
        "weights": ",".join(repr(w) for w in cfg["weights"]),
        "epsilon": repr(cfg["epsilon"]),
        "blur_sigma": repr(cfg["blur_sigma"]),
        "points_per_band": cfg["points_per_band"],
    }


def cmd_batch(args) -> int:
    rows = read_manifest(args.manifest)
    with ThreadPoolExecutor(max_workers=args.parallel) as pool:
        results = list(pool.map(lambda item: _batch_row(item[0], item[1], args), enumerate(rows)))
    for r in results:
        log.debug("%s: %s f1=%s", r["path"], r["status"], r["f1"])

    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, restval="", lineterminator="\n")
    writer.writeheader()
    writer.writerows(results)
    try:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}", EXIT_IO) from exc

    by_type: dict[str, list[float]] = {}
    for r in results:
        if r["status"] == "ok":
            by_type.setdefault(r["chart_type"], []).append(float(r["f1"]))
    summary = " ".join(f"{t}={np.mean(v):.3f}(n={len(v)})" for t, v in sorted(by_type.items()))
    print(f"rows={len(results)} ok={sum(len(v) for v in by_type.values())} mean_f1: {summary or '-'}")
    if rows and not by_type:
        return EXIT_USAGE
    return EXIT_OK


def _read_tensor(path):
    try:
        return io.read_tensor(path)
    except OSError as exc:
        raise CliError(f"cannot read tensor {path}: {exc}", EXIT_IO) from exc
    except ValueError as exc:
        raise CliError(f"bad tensor file {path}: {exc}", EXIT_USAGE) from exc


def _read_indices(text: str) -> list[int]:
    path = Path(text)
    if path.is_file():
        if path.suffix == ".json":
            return [int(v) for v in json.loads(path.read_text())]
        return [int(v) for v in _read_tensor(path).ravel()]
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise CliError(f"--indices must be a file or comma-separated ints, got {text!r}", EXIT_USAGE) from None


def cmd_gate(args) -> int:
    if args.block:
        try:
            doc = json.loads(Path(args.block).read_text())
        except OSError as exc:
            raise CliError(f"cannot read {args.block}: {exc}", EXIT_IO) from exc
        except json.JSONDecodeError as exc:
            raise CliError(f"malformed block JSON: {exc}", EXIT_USAGE) from exc
        try:
            mats = [np.asarray(doc[k], dtype=np.float64) for k in ("Q_S", "K_X", "Q_X", "K_R")]
        except KeyError as exc:
            raise CliError(f"block JSON missing {exc}", EXIT_USAGE) from None
        indices = doc.get("index_set", [])
        beta = doc.get("beta", args.beta)
    else:
        missing = [f for f in ("qs", "kx", "qx", "kr") if getattr(args, f) is None]
        if missing:
            raise CliError(f"need --block or all of --qs --kx --qx --kr (missing {missing})", EXIT_USAGE)
        mats = [_read_tensor(getattr(args, f)).astype(np.float64) for f in ("qs", "kx", "qx", "kr")]
        indices = _read_indices(args.indices) if args.indices else []
        beta = args.beta
    try:
        cfg = GateConfig(beta, indices, args.mask_norm)
        result = spatially_gated_attention(AttentionBlock(*mats), cfg, args.mode)
    except ValueError as exc:
        raise CliError(f"invalid gate input: {exc}", EXIT_USAGE) from exc
    try:
        io.write_tensor(args.out_mask, result.mask)
        io.write_tensor(args.out_weights, result.weights)
    except OSError as exc:
        raise CliError(f"cannot write output: {exc}", EXIT_IO) from exc
    return EXIT_OK


def cmd_assemble(args) -> int:
    image = load_image(args.input)
    try:
        plan = plan_grids(image, args.k)
        result = assemble_to_height(image, plan, args.target_height)
    except (TooSmall, TargetTooSmall) as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    try:
        if image.shape[2] == 4:
            io.write_png(args.out, result.image)
        else:
            from PIL import Image

            Image.fromarray(result.image).save(args.out)
        if args.log:
            doc = {
                "plan": plan.to_dict(),
                "ops_log": [op.to_dict() for op in result.ops_log],
                "source_height_px": int(image.shape[0]),
                "achieved_height_px": result.achieved_height_px,
            }
            Path(args.log).write_text(json.dumps(doc, indent=2) + "\n")
    except OSError as exc:
        raise CliError(f"cannot write output: {exc}", EXIT_IO) from exc
    return EXIT_OK


def _add_scoring_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--points-per-band", type=int, default=DEFAULT_POINTS_PER_BAND)
    p.add_argument("--band-edges", type=_float_list, default=None, help="comma-separated px thresholds")
    p.add_argument("--weights", type=_float_list, default=None, help="one weight per band")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--blur-sigma", type=float, default=DEFAULT_BLUR_SIGMA)
    p.add_argument("--exhaustive", action="store_true", help="enumerate every pixel instead of sampling")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chartskel", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("skeleton", help="render the skeleton control image of a chart spec")
    p.add_argument("spec")
    p.add_argument("--out", required=True)
    p.add_argument("--stroke-px", type=_positive_int, default=DEFAULT_STROKE_PX)
    p.add_argument("--bg", choices=("transparent", "white"), default="transparent")
    p.add_argument("--field-png", help="also dump the distance field as 16-bit PNG")
    p.add_argument("--tokens", type=_dims, help="print the skeleton token index set for a ROWSxCOLS latent grid")
    p.set_defaults(func=cmd_skeleton)

    p = sub.add_parser("score", help="score a matted RGBA chart image against its spec")
    p.add_argument("image")
    p.add_argument("spec")
    p.add_argument("--out", help="also write the report JSON here")
    _add_scoring_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("batch", help="score every row of a manifest CSV")
    p.add_argument("manifest")
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--parallel", type=_positive_int, default=1)
    _add_scoring_flags(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("gate", help="spatially-gated attention on tensor files")
    p.add_argument("--block", help="JSON with Q_S, K_X, Q_X, K_R, index_set and optional beta")
    p.add_argument("--qs")
    p.add_argument("--kx")
    p.add_argument("--qx")
    p.add_argument("--kr")
    p.add_argument("--indices", help="skeleton token indices: file or comma-separated ints")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--mask-norm", choices=("max", "clamp"), default="max")
    p.add_argument("--mode", choices=("probs", "logit_bias"), default="probs")
    p.add_argument("--out-mask", required=True)
    p.add_argument("--out-weights", required=True)
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("assemble", help="re-height a reference object by grid replication/removal")
    p.add_argument("--input", required=True)
    p.add_argument("--target-height", type=_positive_int, required=True)
    p.add_argument("--k", type=_positive_int, default=DEFAULT_K)
    p.add_argument("--out", required=True)
    p.add_argument("--log")
    p.set_defaults(func=cmd_assemble)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"chartskel {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
