import argparse
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

from stemfill.baselines import DEFAULT_K, nn_reconstruct, weighted_nn_reconstruct
from stemfill.core import (
    SamplingMask,
    SpectrumImage,
    apply_mask,
    load_cube,
    load_mask,
    store_cube,
    store_mask,
    store_metadata,
)
from stemfill.errors import BaseError, DimensionMismatchError, ValidationError
from stemfill.metrics import (
    BASIS_SCAN_COLUMNS,
    MetricsReport,
    append_report_row,
    append_rows,
    evaluate,
)
from stemfill.pca import (
    auto_threshold,
    component_scores,
    pca_fit,
    pca_project,
    select_threshold,
)
from stemfill.solver import AUTO, SolverConfig, cls_reconstruct, noise_target
from stemfill.synth import Lattice, SynthParams, generate_dataset, make_mask
from stemfill.transforms import BasisKind, sparsity_curve
from stemfill.utilities.logger import setup_logger
from stemfill.utilities.timing import Stopwatch

logger = logging.getLogger("stemfill.cli")

DEFAULT_RATIOS = "0.01,0.02,0.05,0.1,0.2,0.5,1"


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}")
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {number}")
    return number


def _ratio(value: str) -> float:
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {value!r}")
    if not (0.0 < number <= 1.0):
        raise argparse.ArgumentTypeError(f"must lie in (0, 1], got {number}")
    return number


def _ratio_list(value: str) -> List[float]:
    return [_ratio(item) for item in value.split(",") if item.strip()]


def _lambda(value: str):
    if value == AUTO:
        return AUTO
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or a number, got {value!r}")
    if not (math.isfinite(number) and number >= 0):
        raise argparse.ArgumentTypeError(f"must be finite and >= 0, got {number}")
    return number


def _pca(value: str):
    if value in (AUTO, "off"):
        return value
    return _positive_int(value)


def _bases(value: str) -> List[BasisKind]:
    try:
        return [BasisKind.parse(item) for item in value.split(",") if item.strip()]
    except ValidationError as e:
        raise argparse.ArgumentTypeError(e.message)


def build_parser() -> argparse.ArgumentParser:
    formatter = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="stemfill",
        description="Reconstruct partially sampled spectrum-images.",
        formatter_class=formatter,
    )
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    parser.add_argument("--log-file", default=None, help="Also write logs to this file")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser(
        "synth", help="Generate a synthetic cube", formatter_class=formatter
    )
    synth.add_argument("--height", type=_positive_int, default=70, help="Image rows")
    synth.add_argument("--width", type=_positive_int, default=120, help="Image columns")
    synth.add_argument("--bands", type=_positive_int, default=128, help="Spectral bands")
    synth.add_argument(
        "--components", type=_positive_int, default=4, help="Mixed components"
    )
    synth.add_argument("--snr-db", type=float, default=25.0, help="'inf' for no noise")
    synth.add_argument(
        "--period-x",
        type=float,
        default=Lattice.period_x,
        help="Lattice period along columns, pixels",
    )
    synth.add_argument(
        "--period-y",
        type=float,
        default=Lattice.period_y,
        help="Lattice period along rows, pixels",
    )
    synth.add_argument(
        "--blob-sigma", type=float, default=Lattice.blob_sigma, help="Blob width, pixels"
    )
    synth.add_argument("--seed", type=int, default=0, help="Random seed")
    synth.add_argument("--out-cube", default="noisy.ssi", help="Noisy cube file")
    synth.add_argument("--out-clean", default="clean.ssi", help="Noise-free cube file")
    synth.add_argument("--out-meta", default="synth.json", help="Metadata JSON file")

    mask = commands.add_parser(
        "mask", help="Draw a uniform random sampling mask", formatter_class=formatter
    )
    mask.add_argument("--height", type=_positive_int, default=70, help="Image rows")
    mask.add_argument("--width", type=_positive_int, default=120, help="Image columns")
    mask.add_argument(
        "--ratio", type=_ratio, default=0.2, help="Sampled fraction of pixels, in (0, 1]"
    )
    mask.add_argument("--seed", type=int, default=0, help="Random seed")
    mask.add_argument("--out", default="mask.ssm", help="Mask file")
    mask.add_argument(
        "--verify", metavar="PATH", default=None, help="Reload a mask and print N"
    )

    reconstruct = commands.add_parser(
        "reconstruct", help="Inpaint a cube from its sampled pixels", formatter_class=formatter
    )
    reconstruct.add_argument(
        "--method", choices=["cls", "nn", "wnn"], default="cls", help="Reconstruction method"
    )
    reconstruct.add_argument("--in-cube", required=True, help="Noisy input cube")
    reconstruct.add_argument("--mask", required=True, help="Sampling mask")
    reconstruct.add_argument("--out", required=True, help="Reconstructed cube file")
    reconstruct.add_argument(
        "--lambda",
        dest="lambda_",
        type=_lambda,
        default=AUTO,
        help="Regularization weight, or auto to search it",
    )
    reconstruct.add_argument(
        "--noise-sigma",
        type=float,
        default=None,
        help="Noise standard deviation, required by --lambda auto",
    )
    reconstruct.add_argument("--pca", type=_pca, default=AUTO, help="auto, off or T")
    reconstruct.add_argument(
        "--max-iters",
        type=_positive_int,
        default=None,
        help="Solver iterations (falls back to STEMFILL_MAX_ITERS)",
    )
    reconstruct.add_argument(
        "--rel-tol",
        type=float,
        default=None,
        help="Relative iterate change to stop at (falls back to STEMFILL_REL_TOL)",
    )
    reconstruct.add_argument(
        "--algorithm", choices=["fista", "ista"], default="fista", help="Solver variant"
    )
    reconstruct.add_argument(
        "--lambda-lo", type=float, default=None, help="Lower end of the lambda search"
    )
    reconstruct.add_argument(
        "--lambda-hi", type=float, default=None, help="Upper end of the lambda search"
    )
    reconstruct.add_argument(
        "--wnn-k", type=_positive_int, default=DEFAULT_K, help="Neighbours for wnn"
    )
    reconstruct.add_argument(
        "--ref", default=None, help="Reference cube for the report metrics"
    )
    reconstruct.add_argument("--report", default=None, help="CSV file to append a row to")

    metrics = commands.add_parser(
        "metrics", help="Compare a reconstruction to a reference", formatter_class=formatter
    )
    metrics.add_argument("--ref", required=True, help="Reference cube")
    metrics.add_argument("--rec", required=True, help="Reconstructed cube")
    metrics.add_argument("--out-csv", default=None, help="CSV file to append a row to")
    metrics.add_argument("--method", default=None, help="Defaults to the --rec file stem")

    scan = commands.add_parser(
        "basis-scan", help="NMSE of best-r-term approximations", formatter_class=formatter
    )
    scan.add_argument("--in-cube", required=True, help="Cube to scan")
    scan.add_argument(
        "--bases", type=_bases, default="dct,fourier", help="Comma-separated bases"
    )
    scan.add_argument(
        "--ratios",
        type=_ratio_list,
        default=DEFAULT_RATIOS,
        help="Comma-separated kept-coefficient ratios",
    )
    scan.add_argument("--pca", type=_pca, default="off", help="auto, off or T")
    scan.add_argument("--out-csv", default=None, help="CSV file to append rows to")

    threshold = commands.add_parser(
        "pca-threshold",
        help="Whiteness of every principal component",
        formatter_class=formatter,
    )
    threshold.add_argument("--in-cube", required=True, help="Cube to analyse")
    threshold.add_argument("--mask", default=None, help="Defaults to every pixel")

    return parser


def _observe(cube: SpectrumImage, mask: Optional[SamplingMask]):
    if mask is None:
        mask = SamplingMask.full(cube.height, cube.width)
    if (mask.height, mask.width) != (cube.height, cube.width):
        raise DimensionMismatchError(
            "mask shape", (cube.height, cube.width), (mask.height, mask.width)
        )
    return apply_mask(cube, mask)


def run_synth(args) -> int:
    params = SynthParams(
        height=args.height,
        width=args.width,
        bands=args.bands,
        components=args.components,
        snr_db=args.snr_db,
        lattice=Lattice(args.period_x, args.period_y, args.blob_sigma),
    )
    dataset = generate_dataset(params, args.seed)
    store_cube(dataset.noisy, args.out_cube)
    store_cube(dataset.clean, args.out_clean)
    store_metadata(dataset.metadata(), args.out_meta)
    logger.info(f"Wrote {args.out_cube}, {args.out_clean} and {args.out_meta}")
    return 0


def run_mask(args) -> int:
    if args.verify:
        mask = load_mask(args.verify)
    else:
        mask = make_mask(args.height, args.width, args.ratio, args.seed)
        store_mask(mask, args.out)
    print(mask.sampled_count)
    return 0


def _solver_config(args, y) -> SolverConfig:
    options = {"lambda_": args.lambda_, "algorithm": args.algorithm}
    if args.max_iters is not None:
        options["max_iters"] = args.max_iters
    if args.rel_tol is not None:
        options["rel_tol"] = args.rel_tol
    if args.lambda_lo is not None or args.lambda_hi is not None:
        if args.lambda_lo is None or args.lambda_hi is None:
            raise ValidationError("--lambda-lo and --lambda-hi must be given together")
        options["lambda_bracket"] = (args.lambda_lo, args.lambda_hi)
    if args.lambda_ == AUTO:
        if args.noise_sigma is None:
            raise ValidationError("--lambda auto requires --noise-sigma")
        options["target_residual"] = noise_target(
            args.noise_sigma, y.bands, y.mask.sampled_count
        )
    return SolverConfig(**options)


def run_reconstruct(args) -> int:
    cube = load_cube(args.in_cube)
    mask = load_mask(args.mask)
    reference = load_cube(args.ref) if args.ref else None
    y = _observe(cube, mask)

    extra = {"iterations": None, "lambda": None, "objective": None, "pca_t": None}
    if args.method == "cls":
        config = _solver_config(args, y)
        use_pca = args.pca != "off"
        t = args.pca if use_pca else AUTO
        with Stopwatch() as watch:
            image, report = cls_reconstruct(y, use_pca=use_pca, t=t, config=config)
        extra = {
            "iterations": report.iterations_run,
            "lambda": report.chosen_lambda,
            "objective": report.final_objective,
            "pca_t": report.pca_t,
        }
    else:
        with Stopwatch() as watch:
            if args.method == "nn":
                image = nn_reconstruct(y)
            else:
                image = weighted_nn_reconstruct(y, args.wnn_k)

    store_cube(image, args.out)
    logger.info(f"{args.method} reconstruction written to {args.out} ({watch.elapsed:.3f}s)")

    if args.report:
        if reference is not None:
            row = evaluate(image, reference, args.method, watch.elapsed)
        else:
            nan = math.nan
            row = MetricsReport(args.method, nan, nan, nan, nan, watch.elapsed)
        append_report_row(args.report, row, extra)
    return 0


def run_metrics(args) -> int:
    reference = load_cube(args.ref)
    reconstruction = load_cube(args.rec)
    method = args.method or Path(args.rec).stem
    report = evaluate(reconstruction, reference, method)
    print(
        f"{method}: nmse={report.nmse:.6g} snr={report.snr_db:.4f} dB "
        f"asad={report.asad_rad:.6g} rad ssim={report.ssim:.6f}"
    )
    if args.out_csv:
        append_report_row(args.out_csv, report)
    return 0


def _scan_cube(cube: SpectrumImage, pca) -> SpectrumImage:
    """The cube as the solver would see it: raw, or its first T PCA score planes."""
    if pca == "off":
        return cube
    y = _observe(cube, None)
    model = pca_fit(y)
    t = auto_threshold(y, model) if pca == AUTO else pca
    model.check_t(t)
    reduced = pca_project(y, model, t)
    return SpectrumImage(cube.height, cube.width, reduced.values)


def run_basis_scan(args) -> int:
    cube = _scan_cube(load_cube(args.in_cube), args.pca)
    rows = []
    for kind in args.bases:
        for r, error in sparsity_curve(cube, kind, args.ratios):
            rows.append({"basis": kind.value, "r": r, "nmse": error})
            print(f"{kind.value},{r!r},{error!r}")
    if args.out_csv:
        append_rows(args.out_csv, BASIS_SCAN_COLUMNS, rows)
    return 0


def run_pca_threshold(args) -> int:
    cube = load_cube(args.in_cube)
    mask = load_mask(args.mask) if args.mask else None
    y = _observe(cube, mask)
    model = pca_fit(y)
    scores = component_scores(y, model)
    for index, score in enumerate(scores, start=1):
        print(f"{index},{score!r}")
    print(f"T={select_threshold(scores)}")
    return 0


HANDLERS = {
    "synth": run_synth,
    "mask": run_mask,
    "reconstruct": run_reconstruct,
    "metrics": run_metrics,
    "basis-scan": run_basis_scan,
    "pca-threshold": run_pca_threshold,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logger(
        "stemfill",
        log_file=args.log_file,
        level=logging.DEBUG if args.verbose else logging.INFO,
    )
    try:
        return HANDLERS[args.command](args)
    except BaseError as e:
        logger.error(e.message)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
