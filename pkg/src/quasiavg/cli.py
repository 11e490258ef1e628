"""Command-line front end.

    quasiavg construct --p 0.5 --variant thm13
    quasiavg blowup    --p 0.5 --variant thm15 --q-max 40 --out blowup.csv
    quasiavg scan      --variant thm13 --s-range 0.99,1 --t-range 0.99,1 --grid 5 --snap
    quasiavg riemann   --variant thm14 --mesh-min 8 --mesh-exp 16
    quasiavg verify    --variant thm14 --trials 10000 --seed 0
    quasiavg diagnose  --variant thm15 --q-max 20

A JSON file given with ``--config`` overrides the corresponding flags.
Exit status: 0 success, 2 bad configuration, 3 failed verification, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import average, diagnostics
from .block_index import block_range
from .construction import (
    ConfigError,
    ConstructionSpec,
    Variant,
    beta_tail,
    coefficient_beta,
    limit_verdicts,
    modulus_product,
    partial_sum,
    resolvable_depth,
)
from .lp_space import quasi_norm

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3
EXIT_IO = 4

SPEC_KEYS = ("p", "variant", "b", "q_cap", "tol", "A", "beta")


class VerificationFailed(Exception):
    def __init__(self, text: str):
        super().__init__("verification failed")
        self.text = text


def _range(text: str):
    try:
        lo, hi = (float(x) for x in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}") from None
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("construction")
    g.add_argument("--p", type=float, default=0.5, help="exponent of l_p, 0 < p <= 1")
    g.add_argument("--variant", choices=[v.value for v in Variant], default="thm14")
    g.add_argument("--b", type=float, default=None, help="thm13 exponent, must exceed 2(1-p)/p")
    g.add_argument("--a-rule", dest="A", default=None,
                   help="custom A_q rule: inverse_modulus | inverse_sqrt_modulus | power:<a>")
    g.add_argument("--beta-rule", dest="beta", default=None,
                   help="custom beta_q rule: geometric | telescoping:<b>")
    g.add_argument("--q-cap", dest="q_cap", type=int, default=60)
    g.add_argument("--tol", type=float, default=1e-9)
    g.add_argument("--config", type=Path, default=None, help="JSON file overriding flags")
    g.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="quasiavg", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("construct", parents=[common], help="resolve and print a construction")

    p = sub.add_parser("blowup", parents=[common], help="half-block averages per block")
    p.add_argument("--q-max", dest="q_max", type=int, default=None)

    p = sub.add_parser("scan", parents=[common], help="grid of Ave[f] norms as CSV")
    p.add_argument("--s-range", dest="s_range", type=_range, default=(0.0, 1.0))
    p.add_argument("--t-range", dest="t_range", type=_range, default=(0.0, 1.0))
    p.add_argument("--grid", type=int, default=11)
    p.add_argument("--snap", action="store_true", help="add block-aligned nodes to the axes")

    p = sub.add_parser("riemann", parents=[common], help="uniform Riemann sums, mesh 2^-m")
    p.add_argument("--mesh-exp", dest="mesh_exp", type=int, default=12)
    p.add_argument("--mesh-min", dest="mesh_min", type=int, default=None)
    p.add_argument("--tag", choices=["left", "midpoint", "right"], default="midpoint")

    p = sub.add_parser("verify", parents=[common], help="check the span estimates and the class")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--q-max", dest="q_max", type=int, default=20)

    p = sub.add_parser("diagnose", parents=[common], help="criteria table and verdicts")
    p.add_argument("--q-max", dest="q_max", type=int, default=None)
    p.add_argument("--json", action="store_true")
    return parser


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if args.config is None:
        return args
    try:
        cfg = json.loads(args.config.read_text())
    except OSError as exc:
        raise OSError(f"{args.config}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config}: invalid JSON ({exc})") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{args.config}: expected a JSON object")
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if attr in ("s_range", "t_range") and value is not None:
            value = tuple(map(float, value))
        elif attr == "out" and value is not None:
            value = Path(value)
        if attr not in SPEC_KEYS and not hasattr(args, attr):
            raise ConfigError(f"{args.config}: unknown key {key!r} for {args.command}")
        setattr(args, attr, value)
    return args


def spec_from_args(args: argparse.Namespace) -> ConstructionSpec:
    cfg = {k: getattr(args, k) for k in SPEC_KEYS if getattr(args, k, None) is not None}
    return ConstructionSpec.from_config(cfg)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_construct(spec: ConstructionSpec, args) -> str:
    betas = [coefficient_beta(spec, q) for q in range(1, spec.q_cap + 1)]
    beta_sum = math.fsum(betas + [beta_tail(spec, spec.q_cap + 1)])
    doc = {
        "config": spec.to_config(),
        "beta_sum": beta_sum,
        "beta_sum_error": abs(beta_sum - 0.5),
        "lambda_sum": 2.0 * beta_sum,
        "limits": {k: v.value for k, v in limit_verdicts(spec).items()},
        "resolvable_depth": resolvable_depth(spec),
    }
    return _dump(doc)


def cmd_blowup_table(spec: ConstructionSpec, args) -> str:
    Q = args.q_max if args.q_max is not None else min(30, spec.q_cap)
    if not 1 <= Q <= spec.q_cap:
        raise ConfigError(f"--q-max must lie in [1, q_cap={spec.q_cap}], got {Q}")
    depth = resolvable_depth(spec, Q)
    if depth < Q:
        raise ConfigError(f"half blocks beyond q={depth} collapse in double precision; "
                          f"lower --q-max to at most {depth}")
    rows, bad = [], []
    for q in range(1, Q + 1):
        sample = average.half_block_sample(spec, q)
        predicted = modulus_product(spec, q)
        rows.append((q, sample.s, sample.t, sample.norm, predicted))
        if abs(sample.norm - predicted) > spec.tol * predicted:
            bad.append(q)
    text = average.format_csv(rows, ("q", "s", "t", "norm", "predicted"))
    if bad:
        raise VerificationFailed(text)
    return text


def cmd_scan(spec: ConstructionSpec, args) -> str:
    samples = average.grid_scan(spec, tuple(args.s_range), tuple(args.t_range),
                                args.grid, snap=bool(args.snap))
    return average.format_csv(((r.s, r.t, r.norm) for r in samples), ("s", "t", "norm"))


def cmd_riemann(spec: ConstructionSpec, args) -> str:
    hi = args.mesh_exp
    lo = hi if args.mesh_min is None else args.mesh_min
    if not 0 <= lo <= hi <= 24:
        raise ConfigError(f"need 0 <= mesh-min <= mesh-exp <= 24, got {lo}, {hi}")
    rows = []
    for m in range(lo, hi + 1):
        part = average.TaggedPartition.uniform(2 ** m, args.tag)
        rows.append((m, 2.0 ** -m, quasi_norm(average.riemann_sum(spec, part), spec.p)))
    return average.format_csv(rows, ("m", "mesh", "norm"))


def cmd_verify(spec: ConstructionSpec, args) -> str:
    ineq = diagnostics.verify_proof_inequalities(spec, args.trials, args.seed, args.q_max)
    label = diagnostics.classify(spec)
    expected = diagnostics.EXPECTED_LABELS.get(spec.variant)
    cancel = max(quasi_norm(partial_sum(spec, *block_range(q)), spec.p)
                 for q in range(1, min(30, spec.q_cap) + 1))
    passed = ineq.passed and cancel <= 1e-12 and (expected is None or label is expected)
    doc = {
        "config": spec.to_config(),
        "inequalities": ineq.to_dict(),
        "block_cancellation_max_norm": cancel,
        "classification": label.value,
        "expected_classification": expected.value if expected else None,
        "passed": passed,
    }
    text = _dump(doc)
    if not passed:
        raise VerificationFailed(text)
    return text


def cmd_diagnose(spec: ConstructionSpec, args) -> str:
    Q = args.q_max if args.q_max is not None else min(30, spec.q_cap)
    report = diagnostics.build_report(spec, Q)
    return report.to_json() + "\n" if args.json else report.to_text()


COMMANDS = {
    "construct": cmd_construct,
    "blowup": cmd_blowup_table,
    "scan": cmd_scan,
    "riemann": cmd_riemann,
    "verify": cmd_verify,
    "diagnose": cmd_diagnose,
}


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"{out}: {exc.strerror or exc}") from None


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(args)
        spec = spec_from_args(args)
        text = COMMANDS[args.command](spec, args)
    except (ConfigError, ValueError) as exc:
        print(f"quasiavg: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VerificationFailed as exc:
        try:
            _emit(exc.text, args.out)
        except OSError as io:
            print(f"quasiavg: {io}", file=sys.stderr)
            return EXIT_IO
        print("quasiavg: verification failed", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"quasiavg: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        _emit(text, args.out)
    except OSError as exc:
        print(f"quasiavg: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
