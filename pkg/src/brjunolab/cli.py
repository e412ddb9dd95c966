"""Command line entry point: ``brjunolab <subcommand> [options]``.

Every output starts with a block of ``# key=value`` lines holding the full
resolved configuration; stripped of the leading ``# `` that block is a valid
config file that reproduces the output. Exit status is 0 on success, 1 on a
certified violation or an undecidable comparison, 2 on malformed input.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .capacity import SELF_ENERGY_RULES, SetSpecError, capacity, refinement_csv
from .cf import (CFDepthError, NumberSpecError, approximation_gap, check_growth_bound, number_convergents,
                 parse_number)
from .diophantine import (ConditionParams, a_series_partial, br_alpha_partial, brjuno_partial,
                          liouville_constructor)
from .hausdorff import LOG_POWER, POWER, GaugeFunction, hausdorff_trend, parse_line_set, trend_csv
from .intervals import DEFAULT_BITS, Undecidable
from .potential import branch_sigmas, divergence_scan, scan_csv
from .svg import save, scan_plot

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

COMMON = ("bits", "out", "svg")
KEYS = {
    "expand": ("number", "depth"),
    "classify": ("number", "beta", "gamma", "eps", "delta", "depth", "br_alpha", "qmax"),
    "potential": ("number", "beta", "gamma", "eps", "delta", "kernel", "schedule"),
    "capacity": ("set", "sigma", "grid", "rule", "tol"),
    "hausdorff": ("set", "gauge", "schedule", "scan"),
    "verify": ("bits_cap",),
}
DEFAULTS = {
    "bits": str(DEFAULT_BITS),
    "out": "",
    "svg": "",
    "beta": "1",
    "gamma": "1",
    "eps": "0.1",
    "delta": "",
    "depth": "60",
    "br_alpha": "",
    "qmax": "1000",
    "kernel": "auto",
    "sigma": "1",
    "grid": "250,500,1000",
    "rule": "cell",
    "tol": "1e-4",
    "gauge": "log:2",
    "scan": "false",
    "bits_cap": "4096",
}
SCHEDULE_DEFAULTS = {"potential": "10,100,1000", "hausdorff": "1e-2,1e-4,1e-6,1e-8"}


class UsageError(ValueError):
    pass


def read_config(path: str) -> dict:
    """Flat ``key=value`` file; ``#`` starts a comment, dashes in keys mean underscores."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{num}: expected key=value")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file; flags override it")
    common.add_argument("--bits", help="interval precision in mantissa bits")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--svg", help="also write an SVG plot (potential)")
    for flag in ("beta", "gamma", "eps", "delta", "br-alpha", "sigma", "depth", "qmax", "schedule", "grid"):
        common.add_argument(f"--{flag}")
    common.add_argument("--kernel", help="K1, K2 or auto (potential)")
    common.add_argument("--rule", help="self-energy rule: " + ", ".join(SELF_ENERGY_RULES))
    common.add_argument("--tol", help="Frank-Wolfe duality-gap tolerance")
    common.add_argument("--gauge", help="log:DELTA or power:DELTA (hausdorff)")
    common.add_argument("--scan", help="true/false: minimise over radii <= eps (hausdorff)")
    common.add_argument("--bits-cap", help="precision cap for escalation (verify)")

    p = argparse.ArgumentParser(prog="brjunolab", description="Continued fractions, small-divisor "
                                "conditions, log-kernel potentials, capacities and gauge premeasures.")
    p.add_argument("--version", action="version", version=f"brjunolab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext, target in (
        ("expand", "convergent table of a number", "number"),
        ("classify", "A(beta,gamma), Brjuno and alpha-BR series reports", "number"),
        ("potential", "divergence scan of the truncated Farey potential", "number"),
        ("capacity", "refinement table for C_sigma = 1/W_sigma", "set"),
        ("hausdorff", "gauge premeasure bounds along an eps schedule", "set"),
        ("verify", "run the invariant suite", None),
    ):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        if target:
            sp.add_argument(target, nargs="?", help=f"{target} spec (may also come from the config)")
    return p


def resolve(args: argparse.Namespace) -> dict:
    cmd = args.command
    cfg = dict(DEFAULTS)
    cfg["schedule"] = SCHEDULE_DEFAULTS.get(cmd, "")
    allowed = set(KEYS[cmd]) | set(COMMON)
    if args.config:
        for k, v in read_config(args.config).items():
            if k == "command":
                if v != cmd:
                    raise UsageError(f"config is for '{v}', not '{cmd}'")
                continue
            if k not in allowed:
                raise UsageError(f"unknown key '{k}' for {cmd}")
            cfg[k] = v
    for k in allowed:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = str(v)
    for k in KEYS[cmd]:
        if k in ("number", "set") and not cfg.get(k):
            raise UsageError(f"{cmd} needs a {k} spec")
    return {"command": cmd, **{k: cfg[k] for k in sorted(allowed)}}


def header(cfg: dict) -> str:
    lines = [f"# command={cfg['command']}"]
    lines += [f"# {k}={v}" for k, v in cfg.items() if k not in ("command", "out", "svg")]
    return "\n".join(lines) + "\n"


def _int(cfg, key) -> int:
    try:
        return int(cfg[key])
    except ValueError as exc:
        raise UsageError(f"{key} must be an integer") from exc


def _float(cfg, key) -> float:
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise UsageError(f"{key} must be a number") from exc


def _params(cfg) -> ConditionParams:
    delta = Fraction(cfg["delta"]) if cfg.get("delta") else None
    if cfg.get("br_alpha"):
        return ConditionParams.br_alpha(_float(cfg, "br_alpha"), _float(cfg, "eps"), delta)
    return ConditionParams(_float(cfg, "beta"), _float(cfg, "gamma"), _float(cfg, "eps"), delta)


def _liouville_certificate(text: str):
    if not text.startswith("liouville:"):
        return None
    beta, gamma = (float(t) for t in text.split(":", 1)[1].split(","))
    return liouville_constructor(ConditionParams(beta, gamma), "DIVERGE", 8)[1]


# ---------------------------------------------------------------------------
# subcommands


def cmd_expand(cfg) -> tuple[str, int]:
    nu = parse_number(cfg["number"])
    depth = _int(cfg, "depth")
    bits = _int(cfg, "bits")
    convs = number_convergents(nu, depth)
    try:
        nxt = number_convergents(nu, depth + 1)[-1].Q
    except CFDepthError:
        nxt = None
    x = nu.enclosure(bits)
    growth = [True] + check_growth_bound(convs)
    rows = ["n,v_n,P,Q,growth_bound,gap_bounds"]
    status = EXIT_OK
    pq = nu.partial_quotients(depth)
    for c in convs:
        q_next = convs[c.n + 1].Q if c.n + 1 < len(convs) else nxt
        if q_next is None:
            gap = "n/a"
        else:
            try:
                gap = "TRUE" if approximation_gap(x, c, q_next).verdict else "FALSE"
            except Undecidable:
                gap = "UNDECIDABLE"
        g = "n/a" if c.n == 0 else ("TRUE" if growth[c.n] else "FALSE")
        if gap in ("FALSE", "UNDECIDABLE") or g == "FALSE":
            status = EXIT_VIOLATION
        rows.append(f"{c.n},{pq[c.n]},{c.P},{c.Q},{g},{gap}")
    return "\n".join(rows) + "\n", status


def cmd_classify(cfg) -> tuple[str, int]:
    nu = parse_number(cfg["number"])
    params = _params(cfg)
    depth = _int(cfg, "depth")
    bits = _int(cfg, "bits")
    cert = _liouville_certificate(cfg["number"])
    out = []
    try:
        convs = number_convergents(nu, depth + 1)
        N = depth
    except CFDepthError as exc:
        N = exc.index - 2
        if N < 1:
            raise
        convs = number_convergents(nu, N + 1)
        out.append(f"# partial quotients available through depth {N + 1}; series truncated at N={N}")
    reports = [a_series_partial(convs, params, N, bits, cert), brjuno_partial(convs, N, bits, cert)]
    if cfg.get("br_alpha"):
        alpha = _float(cfg, "br_alpha")
        reports.append(br_alpha_partial(nu, alpha, _int(cfg, "qmax"), bits))
        out.append(f"# zero-capacity kernel exponent sigma=2*alpha/(alpha+1)={2 * alpha / (alpha + 1)!r}")
    for rep in reports:
        out.append(f"[{rep.name}]")
        out.append(f"classification={rep.tag}")
        out.append(f"growth_ratio={rep.growth_ratio!r}")
        if rep.certificate:
            out.append(f"certificate={rep.certificate}")
        out.append(rep.to_csv().rstrip("\n"))
    return "\n".join(out) + "\n", EXIT_OK


def cmd_potential(cfg) -> tuple[str, int]:
    nu = parse_number(cfg["number"])
    params = _params(cfg)
    kernel = None if cfg["kernel"] == "auto" else cfg["kernel"]
    branch, s_used, s_stated = branch_sigmas(params, kernel)
    schedule = [int(t) for t in cfg["schedule"].split(",") if t.strip()]
    rows = divergence_scan(nu, params, branch, schedule, _int(cfg, "bits"))
    text = scan_csv(rows)
    if cfg.get("svg"):
        save(cfg["svg"], scan_plot(rows, f"{cfg['number']} {branch} sigma={s_used:.4g}/{s_stated:.4g}"))
    status = EXIT_OK
    if any(b.u_lo < a.u_lo for a, b in zip(rows, rows[1:])) or any(r.lower_bound > r.u_hi for r in rows):
        status = EXIT_VIOLATION
    return text, status


def cmd_capacity(cfg) -> tuple[str, int]:
    grid = [int(t) for t in cfg["grid"].split(",") if t.strip()]
    rows = capacity(cfg["set"], _float(cfg, "sigma"), grid, cfg["rule"], _float(cfg, "tol"))
    status = EXIT_OK if all(r.flag == "CONVERGED" for r in rows) else EXIT_VIOLATION
    return refinement_csv(rows), status


def _gauge(text: str) -> GaugeFunction:
    kind, _, val = text.partition(":")
    kinds = {"log": LOG_POWER, "power": POWER}
    if kind not in kinds or not val:
        raise UsageError("gauge must be log:DELTA or power:DELTA")
    return GaugeFunction(kinds[kind], float(val))


def cmd_hausdorff(cfg) -> tuple[str, int]:
    E = parse_line_set(cfg["set"])
    h = _gauge(cfg["gauge"])
    sched = [Fraction(t.strip()) for t in cfg["schedule"].split(",") if t.strip()]
    scan = cfg["scan"].lower() in ("1", "true", "yes")
    return trend_csv(hausdorff_trend(E, h, sched, scan=scan)), EXIT_OK


def cmd_verify(cfg) -> tuple[str, int]:
    from .verify import run_suite, summary_table

    results = run_suite(_int(cfg, "bits"), _int(cfg, "bits_cap"))
    return summary_table(results), EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION


COMMANDS = {
    "expand": cmd_expand,
    "classify": cmd_classify,
    "potential": cmd_potential,
    "capacity": cmd_capacity,
    "hausdorff": cmd_hausdorff,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        body, status = COMMANDS[args.command](cfg)
    except (UsageError, NumberSpecError, SetSpecError) as exc:
        print(f"brjunolab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Undecidable as exc:
        print(f"brjunolab: undecidable at this precision: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (ValueError, CFDepthError) as exc:
        print(f"brjunolab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = header(cfg) + body
    if cfg.get("out"):
        with open(cfg["out"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if status != EXIT_OK:
        print("brjunolab: check failed, see the table above", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
