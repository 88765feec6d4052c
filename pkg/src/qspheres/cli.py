"""Command-line entry point: ``qspheres <command> [options]``.

Exit status: 0 on success, 1 when a computed check fails (for instance a
pairing that differs from mu), 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import List, Optional, Tuple

from . import bundles, chern, rep, rewrite
from .errors import ConfigurationError, QSpheresError
from .expr import parse, to_text
from .ncpoly import Params, as_fraction
from .serialize import dumps, idempotent_to_json, poly_to_json, rows_to_csv

OUTPUT_DIR_ENV = "QSPHERES_OUTPUT_DIR"
NUMERIC_TOL = 1e-8
RESIDUAL_TOL = 1e-12
WITNESS_TOL = 1e-10


@dataclass
class RunConfig:
    p: str = "1/2"
    q: str = "1/3"
    theta: str = "0"
    N: int = 64
    mu: int = 0
    mu_range: str = "-4..4"
    n: int = 1
    presentation: str = "mirror"
    format: str = "json"
    mode: str = "both"
    seed: int = 20070901
    expr: str = ""
    jobs: int = 1

    def params(self) -> Params:
        return Params(as_fraction(self.p), as_fraction(self.q), as_fraction(self.theta))

    def mus(self) -> List[int]:
        try:
            lo, hi = (int(s) for s in self.mu_range.split(".."))
        except ValueError:
            raise ConfigurationError(f"mu range must look like a..b, got {self.mu_range!r}") from None
        if lo > hi:
            raise ConfigurationError(f"empty mu range {self.mu_range!r}")
        return list(range(lo, hi + 1))

    def validate(self) -> "RunConfig":
        self.params()
        if self.N < 4:
            raise ConfigurationError(f"truncation N must be >= 4, got {self.N}")
        if self.format not in ("json", "csv"):
            raise ConfigurationError(f"format must be json or csv, got {self.format!r}")
        if self.mode not in ("exact", "numeric", "both"):
            raise ConfigurationError(f"mode must be exact, numeric or both, got {self.mode!r}")
        if self.presentation not in rewrite.PRESETS:
            raise ConfigurationError(f"unknown presentation {self.presentation!r}")
        if self.jobs < 1:
            raise ConfigurationError("jobs must be >= 1")
        self.mus()
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def load_config_file(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment; dashes in keys map to underscores."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def _coerce(key, value):
    if _FIELD_TYPES[key] in ("int", int):
        try:
            return int(value)
        except ValueError:
            raise ConfigurationError(f"{key} must be an integer, got {value!r}") from None
    return value


# commands
def cmd_nf(cfg: RunConfig):
    P = rewrite.preset(cfg.presentation, cfg.params())
    x = parse(cfg.expr, P.alphabet, P.params)
    nf = P.normal_form(x)
    return 0, {"input": cfg.expr, "normal_form": to_text(nf), "terms": poly_to_json(nf)}, {}, None


def cmd_check_presentations(cfg: RunConfig):
    params = cfg.params()
    N = cfg.N
    result, residuals = {}, {}
    ok = True
    for name in rewrite.PRESETS:
        P = rewrite.preset(name, params)
        overlaps = [str(o) for o in rewrite.check_local_confluence(P, 4)]
        result[name] = {"unresolved_overlaps": overlaps}
        ok &= not overlaps
    M, Pd = rewrite.mirror_sphere(params), rewrite.podles_sphere(params)
    reps = [
        (M, rep.build_rho_plus(params, N)),
        (M, rep.build_rho_minus(params, N)),
        (M, rep.build_interlaced(params, N)),
        (M, rep.build_symbol_bilateral(N, params)),
        *((Pd, R) for R in rep.build_podles_pair(params, N)),
    ]
    for P, R in reps:
        r = rep.relation_residual(P, R)
        residuals[R.tag] = r
        ok &= r < RESIDUAL_TOL
    return (0 if ok else 1), result, residuals, None


def cmd_idempotent(cfg: RunConfig):
    E = bundles.build_idempotent(cfg.mu, cfg.params())
    verified = bundles.verify_idempotent(E)
    return (0 if verified else 1), {"idempotent": idempotent_to_json(E), "verified": verified}, {}, None


def _pair_one(args: Tuple[int, int, "RunConfig"]):
    n, mu, cfg = args
    params = cfg.params()
    E = bundles.lens_idempotent(n, mu, params) if n != 1 else bundles.build_idempotent(mu, params)
    return chern.pairing(E, mode=cfg.mode, N=cfg.N)


def _report_status(report: chern.PairingReport, expected: int) -> Tuple[bool, dict]:
    ok = report.exact == expected
    residuals = {}
    if report.numeric is not None:
        residuals["numeric"] = abs(report.numeric - expected)
        ok &= residuals["numeric"] < NUMERIC_TOL
    return ok, residuals


def _csv_rows(reports):
    return rows_to_csv(["mu", "N", "partial_trace", "abs_error"], [r for rep_ in reports for r in rep_.to_csv_rows()])


def cmd_pair(cfg: RunConfig):
    report = _pair_one((1, cfg.mu, cfg))
    ok, residuals = _report_status(report, cfg.mu)
    return (0 if ok else 1), report.to_json(), residuals, _csv_rows([report])


def cmd_lens(cfg: RunConfig):
    if cfg.n < 1:
        raise ConfigurationError(f"lens order must be positive, got {cfg.n}")
    report = _pair_one((cfg.n, cfg.mu, cfg))
    ok, residuals = _report_status(report, cfg.n * cfg.mu)
    return (0 if ok else 1), report.to_json(), residuals, _csv_rows([report])


def cmd_pair_sweep(cfg: RunConfig):
    jobs = [(1, mu, cfg) for mu in cfg.mus()]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            reports = list(pool.map(_pair_one, jobs))
    else:
        reports = [_pair_one(j) for j in jobs]
    ok, residuals = True, {}
    for r in reports:
        good, res = _report_status(r, r.mu)
        ok &= good
        for k, v in res.items():
            residuals[f"{k}[{r.mu}]"] = v
    return (0 if ok else 1), {"reports": [r.to_json() for r in reports]}, residuals, _csv_rows(reports)


def cmd_witness_signs(cfg: RunConfig):
    w = chern.sign_witness(cfg.params(), cfg.N)
    ok = w.mirror == (1, 1) and w.podles == (1, -1) and w.max_residual < WITNESS_TOL
    result = {"mirror": list(w.mirror), "podles": list(w.podles), "raw": w.raw}
    return (0 if ok else 1), result, w.residuals, None


def cmd_torus_free(cfg: RunConfig):
    params = cfg.params()
    T = rewrite.quantum_torus(params)
    witness = bundles.torus_freeness_witness(cfg.mu, params, T)
    rng = random.Random(cfg.seed)
    # random degree-mu element: (polynomial in V, V') * U^mu
    coeff = T.zero()
    for _ in range(3):
        k = rng.randint(-2, 2)
        v = T.word(("V",) * k if k >= 0 else ("V'",) * (-k))
        coeff = coeff + v * rng.randint(-5, 5)
    x = T.normal_form(coeff * witness.generator)
    c, back = bundles.torus_module_coordinates(x, cfg.mu, params, T)
    ok = witness.unitary and witness.degree == cfg.mu and T.normal_form(c).degree("torus") == 0 and back == x
    result = {
        "generator": to_text(witness.generator),
        "unitary": witness.unitary,
        "degree": witness.degree,
        "sample": to_text(x),
        "coordinate": to_text(c),
        "reconstructs": back == x,
    }
    return (0 if ok else 1), result, {}, None


def cmd_summability(cfg: RunConfig):
    params = cfg.params()
    P = rewrite.preset(cfg.presentation, params)
    if P.name not in ("mirror", "podles"):
        raise ConfigurationError("summability needs the mirror or podles presentation")
    x = parse(cfg.expr, P.alphabet, params)
    s = chern.summability_report(x, cfg.N, params, P.name)
    result = {
        "expr": cfg.expr,
        "ratio": s.ratio,
        "bound": s.bound,
        "tails": [[n, d, t] for n, d, t in zip(s.ns, s.diagonal_tails, s.trace_norm_tails)],
    }
    csv_text = rows_to_csv(
        ["n", "diagonal_tail", "trace_norm_tail"],
        [[n, d, t] for n, d, t in zip(s.ns, s.diagonal_tails, s.trace_norm_tails)],
    )
    return (0 if s.ok else 1), result, {"ratio_excess": max(0.0, s.ratio - s.bound)}, csv_text


COMMANDS = {
    "nf": cmd_nf,
    "check-presentations": cmd_check_presentations,
    "idempotent": cmd_idempotent,
    "pair": cmd_pair,
    "pair-sweep": cmd_pair_sweep,
    "lens": cmd_lens,
    "witness-signs": cmd_witness_signs,
    "torus-free": cmd_torus_free,
    "summability": cmd_summability,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override it")
    common.add_argument("--p")
    common.add_argument("--q")
    common.add_argument("--theta", help="rational M/N")
    common.add_argument("--N", type=int, help="truncation size")
    common.add_argument("--mode", choices=["exact", "numeric", "both"])
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--presentation", choices=sorted(rewrite.PRESETS))
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int)
    common.add_argument("--out-dir", help=f"write files here (default: ${OUTPUT_DIR_ENV})")

    parser = argparse.ArgumentParser(prog="qspheres", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    nf = sub.add_parser("nf", parents=[common], help="print a normal form")
    nf.add_argument("expr")
    sub.add_parser("check-presentations", parents=[common], help="confluence and relation residuals")
    for name in ("idempotent", "pair"):
        sp_ = sub.add_parser(name, parents=[common])
        sp_.add_argument("--mu", type=int)
    sweep = sub.add_parser("pair-sweep", parents=[common])
    sweep.add_argument("--mu-range")
    lens = sub.add_parser("lens", parents=[common])
    lens.add_argument("--n", type=int)
    lens.add_argument("--mu", type=int)
    sub.add_parser("witness-signs", parents=[common])
    torus = sub.add_parser("torus-free", parents=[common])
    torus.add_argument("--mu", type=int)
    summ = sub.add_parser("summability", parents=[common])
    summ.add_argument("--expr", required=True)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = load_config_file(args.config) if args.config else {}
    for key in _FIELD_TYPES:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return RunConfig(**values).validate()


def main(argv: Optional[List[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        code, result, residuals, csv_text = COMMANDS[args.command](cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except QSpheresError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    payload = dumps({"command": args.command, "config": asdict(cfg), "result": result, "residuals": residuals})
    if cfg.format == "csv" and csv_text is not None:
        stdout.write(csv_text)
    else:
        stdout.write(payload + "\n")
    out_dir = args.out_dir or os.environ.get(OUTPUT_DIR_ENV)
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / f"{args.command}.json").write_text(payload + "\n")
        if csv_text is not None:
            (path / f"{args.command}.csv").write_text(csv_text)
    return code


if __name__ == "__main__":
    sys.exit(main())
