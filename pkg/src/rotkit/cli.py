"""``rotkit`` command line.

Angles on the command line and in printed output are degrees. Exit status
is 0 on success, 1 on a domain error (bad data or a singular input), and
2 on a usage error.
"""

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import continuity, datagen, evaluation, losses, predictions
from . import representations as rp
from .errors import RepMismatch, RotkitError
from .so3 import haar_random

log = logging.getLogger("rotkit")

# Components of each representation that are angles (converted at the boundary).
ANGLE_COMPONENTS = {"euler": slice(0, 3), "aa3": slice(0, 3), "aa4": slice(3, 4)}


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {v}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _reals(text):
    try:
        return np.array([float(t) for t in text.replace(" ", "").split(",") if t], dtype=np.float64)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _default_seed():
    raw = os.environ.get("ROTKIT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ROTKIT_SEED must be an integer, got {raw!r}") from None


def _fmt(values):
    return " ".join(datagen.format_real(v) for v in np.ravel(values))


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _to_library_units(tag, values):
    values = values.copy()
    if tag in ANGLE_COMPONENTS:
        values[ANGLE_COMPONENTS[tag]] = np.radians(values[ANGLE_COMPONENTS[tag]])
    return values


def _to_cli_units(tag, values):
    values = np.array(values, dtype=np.float64)
    if tag in ANGLE_COMPONENTS:
        values[ANGLE_COMPONENTS[tag]] = np.degrees(values[ANGLE_COMPONENTS[tag]])
    return values


def cmd_convert(args):
    src = rp.get_representation(args.from_)
    dst = rp.get_representation(args.to)
    values = args.deg
    if values.size != src.dim:
        raise RepMismatch(f"{src.tag} needs {src.dim} values, got {values.size}")
    m = src.to_matrix(_to_library_units(src.tag, values))
    _emit(_fmt(_to_cli_units(dst.tag, dst.from_matrix(m))) + "\n", args.out)


def cmd_gen(args):
    spec = datagen.DistributionSpec.named(args.dist, args.seed)
    counts = datagen.SplitCounts(args.train, args.val, args.test)
    ds = datagen.generate_dataset(spec, counts, max_attempts=args.max_attempts)
    _emit(datagen.dumps_dataset(ds), args.out)


def cmd_zeta(args):
    ds = datagen.load_dataset(args.dataset)
    _emit(datagen.format_real(datagen.zeta(ds)) + "\n", args.out)


def cmd_eval(args):
    ds = datagen.load_dataset(args.gt)
    preds = predictions.load_predictions(args.pred, ds, args.split)
    errors = predictions.per_sample_errors(ds, preds)
    rep = evaluation.report(errors, invalid=len(preds.invalid))
    out = rep.to_dict()
    out.setdefault("invalid", rep.invalid)
    if args.fit:
        if args.split != "test" or preds.invalid:
            raise RotkitError("--fit needs a valid prediction for every test sample")
        fit = evaluation.nearest_train_fit(ds, errors)
        out["nearest_train_fit"] = {"slope": fit.slope, "intercept": fit.intercept}
    text = json.dumps(out, indent=2) + "\n"
    if args.report:
        _emit(text, args.report)
    else:
        sys.stdout.write(text)
    if args.curve:
        _emit(rep.curve.to_csv(args.resolution, args.max_deg), args.curve)


def cmd_probe(args):
    pr = continuity.probe_discontinuity(args.rep, math.radians(args.delta_deg), args.n, args.seed)
    d = pr.to_dict()
    d["delta_deg"] = args.delta_deg
    del d["delta"]
    _emit(json.dumps(d, indent=2) + "\n", args.out)


def cmd_probe2d(args):
    true, rep = continuity.probe_2d(math.radians(args.eps_deg))
    d = {"epsilon_deg": args.eps_deg, "true_distance_deg": math.degrees(true),
         "rep_distance_deg": math.degrees(rep)}
    _emit(json.dumps(d, indent=2) + "\n", args.out)


def cmd_fit(args):
    spec = losses.loss_catalog(args.id)
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, 2]))
    if args.target_deg is not None:
        if args.target_deg.size != 3:
            raise RepMismatch("--target-deg takes three Euler angles")
        target = rp.euler_to_matrix(np.radians(args.target_deg))
    else:
        target = haar_random(rng.integers(2**63), 1)[0]
    init = rng.standard_normal(spec.dim)
    trace = continuity.fit_rotation(target, spec, init, args.step, args.max_iter, args.threshold_deg)
    log.info("id %d: %s after %d iterations, final e_RE %.6g deg", spec.config_id,
             "converged" if trace.converged else "not converged", trace.iterations,
             trace.errors_deg[-1])
    _emit(trace.to_csv(), args.out)


def cmd_gradcheck(args):
    spec = losses.loss_catalog(args.id)
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, 3]))
    rows = []
    for k in range(args.points):
        gt = haar_random(rng.integers(2**63), 1)[0]
        x = losses.regular_points(spec, gt, 1, rng)[0]
        r = losses.gradcheck(spec, x, gt, args.h)
        rows.append({"point": k, "max_rel_error": r.max_rel_error, "singular": r.singular,
                     "passed": r.passed(args.tol)})
    out = {"id": spec.config_id, "label": spec.label, "h": args.h, "tol": args.tol,
           "all_passed": all(r["passed"] for r in rows), "points": rows}
    _emit(json.dumps(out, indent=2) + "\n", args.out)


def build_parser():
    p = argparse.ArgumentParser(prog="rotkit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    tags = sorted(rp.REPRESENTATIONS)

    # -v is accepted before or after the subcommand; SUPPRESS keeps the
    # subparser from resetting a top-level -v
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
                        help="log progress to stderr")

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=func)
        return sp

    sp = add("convert", cmd_convert, "convert one rotation between representations")
    sp.add_argument("--from", dest="from_", required=True, choices=tags)
    sp.add_argument("--to", required=True, choices=tags)
    sp.add_argument("--deg", "--values", dest="deg", type=_reals, required=True,
                    help="comma-separated components; angle components in degrees")
    sp.add_argument("--out")

    sp = add("gen", cmd_gen, "generate a synthetic rotation dataset (JSON Lines)")
    sp.add_argument("--dist", required=True, choices=datagen.KINDS)
    sp.add_argument("--seed", type=_nonneg_int, default=None)
    sp.add_argument("--train", type=_nonneg_int, default=8000)
    sp.add_argument("--val", type=_nonneg_int, default=2000)
    sp.add_argument("--test", type=_nonneg_int, default=1000)
    sp.add_argument("--max-attempts", type=_positive_int, default=datagen.MAX_ATTEMPTS)
    sp.add_argument("--out")

    sp = add("zeta", cmd_zeta, "median test-to-train distance of a dataset, degrees")
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--out")

    sp = add("eval", cmd_eval, "score a prediction file against a dataset")
    sp.add_argument("--gt", required=True, help="dataset file")
    sp.add_argument("--pred", required=True, help="prediction file")
    sp.add_argument("--split", choices=datagen.SPLITS, default="test")
    sp.add_argument("--report", help="write the JSON report here instead of stdout")
    sp.add_argument("--curve", help="write the accuracy curve CSV here")
    sp.add_argument("--resolution", type=_positive_float, default=0.1, help="curve step, degrees")
    sp.add_argument("--max-deg", type=_positive_float, default=180.0)
    sp.add_argument("--fit", action="store_true", help="add the error vs nearest-train linear fit")

    sp = add("probe", cmd_probe, "measure representation jumps under small perturbations")
    sp.add_argument("--rep", required=True, choices=continuity.PROBE_REPRESENTATIONS)
    sp.add_argument("--delta-deg", type=_positive_float, default=math.degrees(1e-3))
    sp.add_argument("--n", type=_positive_int, default=10_000)
    sp.add_argument("--seed", type=_nonneg_int, default=None)
    sp.add_argument("--out")

    sp = add("probe2d", cmd_probe2d, "planar rotation encoded as an angle in [0, 360)")
    sp.add_argument("--eps-deg", type=_positive_float, required=True)
    sp.add_argument("--out")

    fit_cal = continuity.calibration()["fit"]
    sp = add("fit", cmd_fit, "gradient-descent fit of one rotation; writes iteration,e_re_deg")
    sp.add_argument("--id", type=_positive_int, default=fit_cal["config_id"])
    sp.add_argument("--seed", type=_nonneg_int, default=None)
    sp.add_argument("--target-deg", type=_reals, help="Euler angles of the target (default: random)")
    sp.add_argument("--step", type=_positive_float, default=fit_cal["step_size"])
    sp.add_argument("--max-iter", type=_nonneg_int, default=fit_cal["max_iter"])
    sp.add_argument("--threshold-deg", type=_positive_float, default=fit_cal["threshold_deg"])
    sp.add_argument("--out")

    sp = add("gradcheck", cmd_gradcheck, "compare analytic and finite-difference gradients")
    sp.add_argument("--id", type=_positive_int, required=True)
    sp.add_argument("--seed", type=_nonneg_int, default=None)
    sp.add_argument("--points", type=_positive_int, default=10)
    sp.add_argument("--h", type=_positive_float, default=1e-6)
    sp.add_argument("--tol", type=_positive_float, default=1e-4)
    sp.add_argument("--out")
    return p


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="rotkit: %(message)s", stream=sys.stderr)
    if getattr(args, "seed", 0) is None:
        try:
            args.seed = _default_seed()
        except argparse.ArgumentTypeError as exc:
            parser.error(str(exc))
    if args.command in ("fit", "gradcheck") and args.id > 20:
        parser.error(f"--id must be between 1 and 20, got {args.id}")
    try:
        args.func(args)
    except (RotkitError, OSError) as exc:
        print(f"rotkit: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None):
    sys.exit(run(argv))
