"""Command-line entry point: ``sparsescreen {fit,cv,screen,analyze,synth}``.

Exit codes: 0 success, 1 numeric warning (non-convergence), 2 input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from . import reports
from .analysis import regress_counts_on_factor
from .dataset import DataError, align, load_metadata, load_table, standardize, transform_responses
from .model_selection import CvConfig, cross_validate
from .screening import response_seed, screen_all
from .solver import ConvergenceConfig, PenaltySpec, check_kkt, fit
from .synthlab import SynthSpec, generate_responses

EXIT_OK, EXIT_NUMERIC, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    predictors: Optional[str] = None
    responses: Optional[str] = None
    metadata: Optional[str] = None
    out: Optional[str] = None
    k: int = 10
    seed: int = 0
    rule: str = "min"
    alpha: float = 1.0
    n_lambda: int = 100
    eps_ratio: float = 0.01
    tol: float = 1e-7
    max_sweeps: int = 100_000
    transform: str = "identity"
    impute: bool = False
    parallelism: int = field(default_factory=lambda: os.cpu_count() or 1)

    # output dir and worker count do not affect results, so they are left out
    # of the echo; otherwise runs differing only in those would not be
    # byte-identical
    _NOT_ECHOED = ("out", "parallelism")

    def echo(self, **extra) -> dict:
        d = {k: v for k, v in asdict(self).items() if k not in self._NOT_ECHOED}
        d.update(extra)
        return d

    def cv_config(self, seed: Optional[int] = None) -> CvConfig:
        return CvConfig(
            k=self.k,
            seed=self.seed if seed is None else seed,
            rule=self.rule,
            n_lambda=self.n_lambda,
            eps_ratio=self.eps_ratio,
            alpha=self.alpha,
            convergence=self.convergence(),
        )

    def convergence(self) -> ConvergenceConfig:
        return ConvergenceConfig(tol=self.tol, max_sweeps=self.max_sweeps)


def _run_config(args) -> RunConfig:
    known = RunConfig.__dataclass_fields__
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in known and v is not None})
    return cfg


def _load(cfg: RunConfig, need_metadata: bool):
    if not cfg.predictors or not cfg.responses:
        raise DataError("--predictors and --responses are required")
    pred = load_table(cfg.predictors, "predictor", impute=cfg.impute)
    resp = load_table(cfg.responses, "response", impute=cfg.impute)
    meta = None
    if cfg.metadata:
        meta = load_metadata(cfg.metadata)
    elif need_metadata:
        raise DataError("--metadata is required")
    data = align(pred, resp, meta)
    if cfg.transform != "identity":
        data = type(data)(
            unit_ids=data.unit_ids,
            X=data.X,
            Y=transform_responses(data.Y, cfg.transform),
            predictor_names=data.predictor_names,
            response_names=data.response_names,
            metadata=data.metadata,
        )
    return data


def _out_dir(cfg: RunConfig, required: bool = True) -> Optional[str]:
    if cfg.out is None:
        if required:
            raise DataError("--out is required")
        return None
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


def cmd_fit(args) -> int:
    cfg = _run_config(args)
    data = _load(cfg, need_metadata=False)
    y = data.response(args.response)
    design = standardize(data.X, data.predictor_names)
    penalty = PenaltySpec(args.lam, cfg.alpha)
    coef = fit(design, y, penalty, config=cfg.convergence())
    kkt = check_kkt(design, y, coef, penalty)

    lines = [
        f"response\t{args.response}",
        f"lambda\t{reports._fmt(args.lam)}",
        f"intercept\t{reports._fmt(coef.intercept)}",
        f"n_nonzero\t{int(np.count_nonzero(coef.beta_std))}",
        f"converged\t{str(coef.converged).lower()}",
        f"sweeps\t{coef.sweeps_used}",
        f"kkt_max_violation\t{reports._fmt(kkt.max_violation)}",
        "predictor\tcoefficient_raw",
    ]
    for j in np.flatnonzero(coef.beta_raw):
        lines.append(f"{design.names[j]}\t{reports._fmt(coef.beta_raw[j])}")
    text = "\n".join(lines) + "\n"
    print(text, end="")
    out = _out_dir(cfg, required=False)
    if out is not None:
        echo = cfg.echo(command="fit", response=args.response, lam=args.lam)
        reports.write_text(os.path.join(out, "fit.tsv"), reports.header_lines(echo) + text, args.overwrite)
    if not coef.converged:
        print("warning: coordinate descent did not converge", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_cv(args) -> int:
    cfg = _run_config(args)
    data = _load(cfg, need_metadata=False)
    y = data.response(args.response)
    out = _out_dir(cfg)
    seed = response_seed(cfg.seed, args.response)
    curve = cross_validate(data.X, y, cfg.cv_config(seed))
    echo = cfg.echo(command="cv", response=args.response, fold_seed=seed)
    reports.write_text(
        os.path.join(out, "cv_curve.tsv"), reports.render_cv_curve(curve, echo), args.overwrite
    )
    print(f"lambda_min\t{reports._fmt(curve.lambda_min)}")
    print(f"lambda_1se\t{reports._fmt(curve.lambda_1se)}")
    return EXIT_OK


def cmd_screen(args) -> int:
    cfg = _run_config(args)
    data = _load(cfg, need_metadata=True)
    out = _out_dir(cfg)
    paths = {name: os.path.join(out, name) for name in ("report.csv", "predictor_counts.csv", "report.json")}
    if not args.overwrite:
        for path in paths.values():
            if os.path.exists(path):
                raise FileExistsError(f"{path} exists; pass --overwrite to replace it")
    report = screen_all(data, cfg.cv_config(), parallelism=cfg.parallelism)
    echo = cfg.echo(command="screen")
    reports.write_text(paths["report.csv"], reports.render_report_csv(report, echo), True)
    reports.write_text(paths["predictor_counts.csv"], reports.render_predictor_counts(report, echo), True)
    reports.write_text(paths["report.json"], reports.render_report_json(report, echo), True)

    n_bad = sum(not r.converged for r in report.per_response)
    print(
        f"{len(report.per_response)} responses, {report.total_selected} selections, "
        f"{len(report.excluded_predictors)} constant predictors excluded"
    )
    if n_bad:
        print(f"warning: {n_bad} responses did not converge", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = _run_config(args)
    out = _out_dir(cfg)
    pairs = reports.read_pairs(args.input)
    summary = regress_counts_on_factor(pairs)
    echo = {"command": "analyze", "input": args.input}
    reports.write_text(
        os.path.join(out, "regression_summary.json"), reports.render_summary_json(summary, echo), args.overwrite
    )
    reports.write_text(os.path.join(out, "figure1.tsv"), reports.render_figure1(pairs, echo), args.overwrite)
    print(
        f"n={summary.n} slope={summary.slope:.6g} intercept={summary.intercept:.6g} "
        f"r2={summary.r_squared:.4f} t={summary.t_stat:.4g} p={summary.p_value:.4g}"
    )
    return EXIT_OK


def cmd_synth(args) -> int:
    out = args.out
    spec = SynthSpec(
        n=args.n, p=args.p, s=args.s, beta_magnitude=args.beta_magnitude,
        noise_sd=args.noise_sd, seed=args.seed,
    )
    X, Y, betas = generate_responses(spec, args.m, args.n_null)
    if args.constant_columns:
        X = np.hstack([X, np.ones((spec.n, args.constant_columns))])
    # production quantities are non-negative; a shift per response is absorbed
    # by the intercept
    Y = Y - Y.min(axis=0)
    units = [f"U{i + 1:03d}" for i in range(spec.n)]
    pnames = [f"x{j + 1}" for j in range(X.shape[1])]
    rnames = [f"y{j + 1}" for j in range(Y.shape[1])]
    factors = [1 + j % 5 for j in range(Y.shape[1])]
    echo = {"command": "synth", **asdict(spec), "m": args.m, "n_null": args.n_null,
            "constant_columns": args.constant_columns}

    os.makedirs(out, exist_ok=True)
    ow = args.overwrite
    reports.write_text(os.path.join(out, "predictors.csv"), reports.render_table(echo, units, pnames, X), ow)
    reports.write_text(os.path.join(out, "responses.csv"), reports.render_table(echo, units, rnames, Y), ow)
    meta_rows = [["response", "local_factor"]] + [[r, str(f)] for r, f in zip(rnames, factors)]
    reports.write_text(os.path.join(out, "metadata.csv"), reports.header_lines(echo) + reports._csv(meta_rows), ow)
    truth_rows = [["response", "true_support"]]
    for r, b in zip(rnames, betas):
        truth_rows.append([r, ";".join(pnames[j] for j in np.flatnonzero(b))])
    reports.write_text(os.path.join(out, "truth.csv"), reports.header_lines(echo) + reports._csv(truth_rows), ow)
    print(f"wrote {spec.n}x{X.shape[1]} predictors and {Y.shape[1]} responses to {out}")
    return EXIT_OK


def _add_data_args(p: argparse.ArgumentParser, metadata_required: bool = False) -> None:
    p.add_argument("--predictors", required=True, help="predictors.csv")
    p.add_argument("--responses", required=True, help="responses.csv")
    p.add_argument("--metadata", required=metadata_required, help="metadata.csv (response,local_factor)")
    p.add_argument("--transform", choices=["identity", "log1p"], default="identity")
    p.add_argument("--impute", action="store_true", help="mean-impute missing cells (exploratory)")
    p.add_argument("--alpha", type=float, default=1.0, help="mixing parameter; 1 is the LASSO")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-sweeps", dest="max_sweeps", type=int, default=100_000)


def _add_cv_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-k", "--folds", dest="k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rule", choices=["min", "one_se"], default="min")
    p.add_argument("--n-lambda", dest="n_lambda", type=int, default=100)
    p.add_argument("--eps-ratio", dest="eps_ratio", type=float, default=0.01)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparsescreen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="single fit at a fixed penalty")
    _add_data_args(p)
    p.add_argument("--response", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--out")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("cv", help="cross-validation curve for one response")
    _add_data_args(p)
    _add_cv_args(p)
    p.add_argument("--response", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("screen", help="screen every response")
    _add_data_args(p, metadata_required=True)
    _add_cv_args(p)
    p.add_argument("--parallelism", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", required=True)
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("analyze", help="regress selection counts on local factor")
    p.add_argument("input", help="report.csv from screen, or a pairs CSV such as fixtures/table1.csv")
    p.add_argument("--out", required=True)
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="write a synthetic dataset in the input CSV formats")
    p.add_argument("--n", type=int, default=47)
    p.add_argument("--p", type=int, default=448)
    p.add_argument("--s", type=int, default=5)
    p.add_argument("--m", type=int, default=10, help="responses with planted signal")
    p.add_argument("--n-null", dest="n_null", type=int, default=0, help="extra pure-noise responses")
    p.add_argument("--constant-columns", dest="constant_columns", type=int, default=0)
    p.add_argument("--beta-magnitude", dest="beta_magnitude", type=float, default=3.0)
    p.add_argument("--noise-sd", dest="noise_sd", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (DataError, FileNotFoundError, FileExistsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
