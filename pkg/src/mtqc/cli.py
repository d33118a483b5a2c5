"""Command-line entry point: ``mtqc <subcommand> [flags]``.

Exit codes: 0 success, 1 usage or configuration error, 2 an analysis that
produced no result (for example a threshold scan without a crossing) or a
failed optics verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

from . import montecarlo as mc
from . import resources as rs
from .lattice import LatticeConfig
from .noise import (Mtqc2Removal, Variant, balanced_budget, nbsm_failure_rate, threshold_to_loss)
from .optics import verify_optics

log = logging.getLogger("mtqc")

EXIT_OK, EXIT_CONFIG, EXIT_NO_RESULT = 0, 1, 2


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# -- value parsers ---------------------------------------------------------------------------


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {text!r}")
        a, b, step = (float(p) for p in parts)
        if step <= 0 or b < a:
            raise argparse.ArgumentTypeError(f"grid needs step > 0 and stop >= start, got {text!r}")
        k = int(math.floor((b - a) / step + 1e-9))
        vals = [round(a + i * step, 12) for i in range(k + 1)]
    else:
        vals = [float(v) for v in text.split(",") if v.strip()]
    if not vals:
        raise argparse.ArgumentTypeError("empty p_Z grid")
    for v in vals:
        if not 0.0 <= v <= 0.5:
            raise argparse.ArgumentTypeError(f"p_Z values must lie in [0, 1/2], got {v}")
    return vals


def parse_ds(text: str) -> list[int]:
    try:
        ds = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"distances must be integers, got {text!r}") from None
    if not ds:
        raise argparse.ArgumentTypeError("empty distance list")
    for d in ds:
        try:
            LatticeConfig(d)
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e)) from None
    return ds


def parse_seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def read_config(path: str) -> list[str]:
    """Turn ``key = value`` lines into flag tokens; ``key = true`` gives a bare flag."""
    tokens: list[str] = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{no}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if val.lower() in ("true", "yes", "on"):
            tokens.append(flag)
        elif val.lower() in ("false", "no", "off"):
            continue
        else:
            tokens += [flag, val]
    return tokens


# -- output ----------------------------------------------------------------------------------


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ";".join(":".join(_cell(x) for x in item) if isinstance(item, (list, tuple)) else _cell(item)
                        for item in v)
    return str(v)


def encode(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(records, indent=1) + "\n"
    buf = io.StringIO()
    keys = list(records[0]) if records else []
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for r in records:
        w.writerow([_cell(r.get(k)) for k in keys])
    return buf.getvalue()


def emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------------------------


def _p_f(args) -> float:
    if args.pf is not None:
        return args.pf
    if args.eta is not None:
        return nbsm_failure_rate(args.eta, args.n)
    return 0.0


def _jobs(args) -> list[mc.SimJob]:
    p_f = _p_f(args)
    return [mc.SimJob(d=d, p_z=p, p_f=p_f, variant=args.variant, trials=args.trials, seed=args.seed,
                      eta=args.eta, n=args.n, m=args.m, n_rep=args.n_rep,
                      mtqc2_model=args.mtqc2_model, backend=args.backend)
            for d in args.d for p in args.pz]


def cmd_simulate(args) -> int:
    results = mc.run_jobs(_jobs(args), args.workers)
    emit(encode([r.record() for r in results], args.format), args.output)
    return EXIT_OK


def cmd_threshold(args) -> int:
    results = mc.run_jobs(_jobs(args), args.workers)
    if args.records:
        Path(args.records).write_text(encode([r.record() for r in results], args.format))
    try:
        est = mc.find_threshold(results)
    except mc.NoCrossing as e:
        print(f"mtqc: no threshold: {e}", file=sys.stderr)
        return EXIT_NO_RESULT
    rep = mc.threshold_report(est, args.m, args.n_rep)
    rec = {"variant": Variant.parse(args.variant).value, "n": args.n, "m": args.m, "eta": args.eta,
           "p_f": _p_f(args), "trials": args.trials, "seed": args.seed,
           "p_Z_th": rep["p_Z_th"], "uncertainty": rep["uncertainty"],
           "eta_th": rep["eta_th"], "eta_th_enc": rep["eta_th_enc"], "N_rep": rep["N_rep"]}
    for (a, b), c in est.pair_crossings.items():
        rec[f"crossing_{a}_{b}"] = c
    emit(encode([rec], args.format), args.output)
    return EXIT_OK


def cmd_resources(args) -> int:
    d = args.d
    est = rs.estimate(args.n, args.m, args.eta, args.variant, args.encoded, d, args.paper_constants)
    if args.format == "table":
        rows = rs.ghz_table(args.eta, paper_constants=args.paper_constants)
        text = rs.format_ghz_table(rows) + "\n"
        text += f"\nN_star = {est.N_star:.6g}"
        if est.N_gate is not None:
            text += f"\nN_gate(d={d}) = {est.N_gate:.6g}"
        emit(text + "\n", args.output)
    else:
        emit(encode([est.to_dict()], args.format), args.output)
    return EXIT_OK


def cmd_plan_ghz(args) -> int:
    plan = rs.plan_ghz(args.m)
    if args.format == "table":
        emit(plan.describe() + "\n", args.output)
        return EXIT_OK
    recs = [{"m": plan.m, "step": k, "fusion": f"{a}+{b}", "result": a + b - 2}
            for k, pairs in enumerate(plan.rounds, 1) for a, b in pairs]
    if args.format == "json":
        out = [{"m": plan.m, "depth": plan.depth, "n_leaves": plan.n_leaves, "n_fusions": plan.n_fusions,
                "N_lossless": rs.ghz_cost_closed_form(plan.m), "steps": recs}]
        emit(json.dumps(out, indent=1) + "\n", args.output)
    else:
        emit(encode(recs, "csv"), args.output)
    return EXIT_OK


def cmd_loss_budget(args) -> int:
    if args.eta is None and args.pz_th is None:
        raise ConfigError("loss-budget needs --eta or --pz-th")
    eta_total = args.eta if args.eta is not None else threshold_to_loss(args.pz_th, args.m, 1)
    recs = []
    for kappa in args.kappa:
        b = balanced_budget(eta_total, kappa)
        recs.append({"eta_total": eta_total, "kappa": kappa, "eta_dly": b.eta_dly, "eta_soc": b.eta_soc,
                     "eta_swc": b.eta_swc, "eta_det": b.eta_det, "eta_s": b.eta_s})
    emit(encode(recs, args.format), args.output)
    return EXIT_OK


def cmd_verify_optics(args) -> int:
    checks = verify_optics(trials=args.trials, seed=args.seed)
    if args.format == "table":
        width = max(len(c.name) for c in checks)
        text = "".join(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.detail}\n" for c in checks)
        emit(text, args.output)
    else:
        emit(encode([{"check": c.name, "passed": c.passed, "detail": c.detail} for c in checks], args.format),
             args.output)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NO_RESULT


def cmd_ppo(args) -> int:
    recs = [{"state": k, "ppo": v} for k, v in rs.ppo_report(args.n, args.m).items()]
    emit(encode(recs, args.format), args.output)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mtqc", description="Multiphoton lattice simulation and resource accounting.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, formats=("json", "csv")):
        sp.add_argument("--config", help="key = value file pre-populating flags; flags win")
        sp.add_argument("--format", choices=formats, default=formats[0])
        sp.add_argument("--output", help="write here instead of stdout")

    def physics(sp, n_default=8):
        sp.add_argument("--variant", type=Variant.parse, default=Variant.MTQC2)
        sp.add_argument("--n", type=_positive_int, default=n_default, help="photons per surrounding qubit")
        sp.add_argument("--m", type=_positive_int, default=2, help="photons per lattice qubit")
        sp.add_argument("--eta", type=float, default=None, help="per-photon loss rate")
        sp.add_argument("--n-rep", type=_positive_int, default=1, help="repetition-code size")

    def sim(sp, n_rep_default):
        physics(sp)
        sp.set_defaults(n_rep=n_rep_default)
        sp.add_argument("--pf", type=float, default=None, help="override the n-BSM failure rate")
        sp.add_argument("--pz", type=parse_grid, required=True, help="start:stop:step or a,b,c")
        sp.add_argument("--d", type=parse_ds, default=[3, 5, 7], help="comma list of odd distances")
        sp.add_argument("--trials", type=_positive_int, default=10_000)
        sp.add_argument("--seed", type=parse_seed, default=0)
        sp.add_argument("--workers", type=_positive_int, default=mc.default_workers())
        sp.add_argument("--mtqc2-model", type=Mtqc2Removal, default=Mtqc2Removal.STATED,
                        choices=list(Mtqc2Removal))
        sp.add_argument("--backend", choices=("pymatching", "blossom"), default="pymatching")

    s = sub.add_parser("simulate", help="Monte Carlo p_L over a (d, p_Z) grid")
    common(s)
    sim(s, 1)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("threshold", help="grid scan plus curve-crossing threshold")
    common(s)
    sim(s, 3)
    s.add_argument("--records", help="also write the per-point records here")
    s.set_defaults(func=cmd_threshold)

    s = sub.add_parser("resources", help="star-cluster and gate overheads")
    common(s, ("json", "csv", "table"))
    physics(s)
    s.set_defaults(eta=0.01)
    s.add_argument("--encoded", action="store_true", help="repetition-encoded central qubit")
    s.add_argument("--d", type=_positive_int, default=None, help="code distance for the gate overhead")
    s.add_argument("--paper-constants", action="store_true",
                   help="per-fusion success (1-2 eta)/2 with two-decimal GHZ costs")
    s.set_defaults(func=cmd_resources)

    s = sub.add_parser("plan-ghz", help="GHZ generation recipe")
    common(s, ("json", "csv", "table"))
    s.add_argument("--m", type=int, required=True)
    s.set_defaults(func=cmd_plan_ghz)

    s = sub.add_parser("loss-budget", help="balanced per-component loss tolerances")
    common(s)
    s.add_argument("--eta", type=float, default=None, help="total tolerable loss")
    s.add_argument("--pz-th", type=float, default=None, help="derive the total loss from a p_Z threshold")
    s.add_argument("--m", type=_positive_int, default=2)
    s.add_argument("--kappa", type=lambda t: [int(v) for v in t.split(",")], default=[3, 4])
    s.set_defaults(func=cmd_loss_budget)

    s = sub.add_parser("verify-optics", help="label-level optics property checks")
    common(s, ("table", "json", "csv"))
    s.add_argument("--trials", type=_positive_int, default=1_000_000)
    s.add_argument("--seed", type=parse_seed, default=0)
    s.set_defaults(func=cmd_verify_optics)

    s = sub.add_parser("ppo", help="photon-pair operation totals")
    common(s)
    s.add_argument("--n", type=_positive_int, default=8)
    s.add_argument("--m", type=_positive_int, default=2)
    s.set_defaults(func=cmd_ppo)
    return p


def _expand_config(argv: list[str]) -> list[str]:
    """Splice config-file tokens in right after the subcommand so later flags override them."""
    if "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return argv
    out = list(argv)
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            path, drop = argv[i + 1], (i, i + 2)
            break
        if a.startswith("--config="):
            path, drop = a.split("=", 1)[1], (i, i + 1)
            break
    else:
        raise ConfigError("--config needs a path")
    del out[drop[0]:drop[1]]
    cmd_at = next((j for j, a in enumerate(out) if not a.startswith("-")), None)
    if cmd_at is None:
        raise ConfigError("--config must follow a subcommand")
    return out[:cmd_at + 1] + read_config(path) + out[cmd_at + 1:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_expand_config(argv))
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        return args.func(args)
    except ConfigError as e:
        print(f"mtqc: error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as e:
        print(f"mtqc: error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
