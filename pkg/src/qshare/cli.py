"""Command-line front end.

Subcommands: maxent (rank/dimension table of the I-concurrence maximum),
threshold (critical concurrence over a c grid), state (channel outputs and
entanglement verdicts for one input), simulate (protocol Monte Carlo).

Machine-readable output goes to stdout (or --out); logs go to stderr.
Numbers are emitted with 12 significant digits.  Exit codes: 0 ok,
2 domain error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import entanglement, noise, protocol, qmath, witness

logger = logging.getLogger(__name__)

ENV_SEED = "QSHARE_SEED"
DEFAULT_SEED = 42

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_IO = 3


@dataclass
class RunConfig:
    command: str
    c: float | str | None = None
    lambda1: float | None = None
    r_spec: str | None = None
    k_spec: str | None = None
    rounds: int = 0
    seed: int = DEFAULT_SEED
    fmt: str | None = None
    out: str | None = None


def fmt12(x: float) -> str:
    return f"{float(x):.12g}"


def round12(x: float) -> float:
    """Round through the 12-significant-digit representation."""
    return float(fmt12(x))


def parse_range(expr: str, *, integer: bool):
    """Parse '2', '2:6', '0.6:1.0:0.05' or '0.6,0.7,0.9' into a list."""
    expr = expr.strip()
    if "," in expr:
        vals = [float(tok) for tok in expr.split(",") if tok.strip()]
    elif ":" in expr:
        parts = [float(tok) for tok in expr.split(":")]
        if len(parts) == 2:
            lo, hi = parts
            step = 1.0
        elif len(parts) == 3:
            lo, hi, step = parts
        else:
            raise ValueError(f"bad range {expr!r}: use start:stop[:step]")
        if step <= 0:
            raise ValueError(f"bad range {expr!r}: step must be positive")
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1
        if count < 1:
            raise ValueError(f"bad range {expr!r}: empty")
        # round off accumulated float error so grid endpoints land exactly
        vals = [float(round(lo + i * step, 12)) for i in range(count)]
    else:
        vals = [float(expr)]
    if integer:
        out = []
        for v in vals:
            if abs(v - round(v)) > 1e-9:
                raise ValueError(f"expected integers in {expr!r}")
            out.append(int(round(v)))
        return out
    return vals


def _emit(text: str, out_path: str | None):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def cmd_maxent(cfg: RunConfig) -> int:
    rs = parse_range(cfg.r_spec or "2:6", integer=True)
    ks = parse_range(cfg.k_spec or "2:6", integer=True)
    rows = []
    for k in ks:
        chain = []
        for r in rs:
            if r > k:
                continue
            val = entanglement.max_i_concurrence(r, k)
            chain.append(val)
            rows.append((r, k, fmt12(val)))
        if any(b <= a for a, b in zip(chain, chain[1:])):
            logger.error("monotonicity violated in r at k=%d", k)
            return EXIT_DOMAIN
        if len(chain) > 1:
            logger.info("k=%d: strictly increasing in r", k)
    if not rows:
        raise ValueError("no (r, k) pairs with r <= k in the requested ranges")
    if cfg.fmt == "json":
        payload = [
            {"r": r, "k": k, "ci_max": round12(float(v))} for r, k, v in rows
        ]
        _emit(json.dumps(payload, indent=2) + "\n", cfg.out)
    else:
        _emit(_csv_text(("r", "k", "ci_max"), rows), cfg.out)
    return EXIT_OK


def cmd_threshold(cfg: RunConfig) -> int:
    cs = parse_range(cfg.c if isinstance(cfg.c, str) else "0.6:1.0:0.05", integer=False)
    rows = []
    for c in cs:
        try:
            ccr = witness.critical_concurrence(c)
        except ValueError as exc:
            logger.error("skipping c=%s: %s", fmt12(c), exc)
            continue
        coef = noise.channel_coefficients(noise.params_from_c(c, k=2))
        rows.append((fmt12(c), fmt12(ccr), fmt12(coef.Q), fmt12(coef.R)))
    if not rows:
        raise ValueError("no in-domain c values in the requested grid")
    if cfg.fmt == "json":
        payload = [
            {
                "c": round12(float(c)),
                "c_critical": round12(float(ccr)),
                "Q": round12(float(q)),
                "R": round12(float(r)),
            }
            for c, ccr, q, r in rows
        ]
        _emit(json.dumps(payload, indent=2) + "\n", cfg.out)
    else:
        _emit(_csv_text(("c", "c_critical", "Q", "R"), rows), cfg.out)
    return EXIT_OK


def _matrix_rows(m: np.ndarray):
    return [[[round12(z.real), round12(z.imag)] for z in row] for row in m]


def _matrix_text(m: np.ndarray) -> str:
    lines = []
    for row in m:
        cells = []
        for z in row:
            if abs(z.imag) > 1e-12:
                cells.append(f"{fmt12(z.real)}{z.imag:+.12g}j")
            else:
                cells.append(fmt12(z.real))
        lines.append("  [" + ", ".join(cells) + "]")
    return "\n".join(lines)


def _state_report(lambda1: float, c: float) -> dict:
    if not 0.0 <= lambda1 <= 1.0:
        raise ValueError(f"lambda1 must lie in [0, 1], got {lambda1}")
    params = noise.params_from_c(c, k=2)
    state = entanglement.PureBipartiteState(k=2, lambdas=[lambda1, 1.0 - lambda1])
    w1 = witness.witness_w1()
    report = {"lambda1": lambda1, "c": c}
    for label, rho in (
        ("local", noise.local_output(state, params)),
        ("nonlocal", noise.nonlocal_output(state, params)),
    ):
        expect = witness.witness_expectation(w1, rho)
        woot = entanglement.wootters_concurrence(rho)
        ppt = entanglement.ppt_entangled(rho, 2, 2)
        det = witness.detects(w1, rho)
        report[label] = {
            "matrix": rho.matrix,
            "witness_expectation": expect,
            "witness_detects": det,
            "wootters_concurrence": woot,
            "ppt_entangled": ppt,
            "verdict": "entangled" if (det or ppt or woot > 0) else "separable",
        }
    return report


def cmd_state(cfg: RunConfig) -> int:
    rep = _state_report(cfg.lambda1, cfg.c)
    if cfg.fmt == "json":
        payload = {"lambda1": round12(rep["lambda1"]), "c": round12(rep["c"])}
        for label in ("local", "nonlocal"):
            sec = rep[label]
            payload[label] = {
                "matrix": _matrix_rows(sec["matrix"]),
                "witness_expectation": round12(sec["witness_expectation"]),
                "witness_detects": sec["witness_detects"],
                "wootters_concurrence": round12(sec["wootters_concurrence"]),
                "ppt_entangled": sec["ppt_entangled"],
                "verdict": sec["verdict"],
            }
        _emit(json.dumps(payload, indent=2) + "\n", cfg.out)
    elif cfg.fmt == "csv":
        header = (
            "lambda1",
            "c",
            "local_witness_expectation",
            "local_wootters",
            "local_verdict",
            "nonlocal_witness_expectation",
            "nonlocal_wootters",
            "nonlocal_verdict",
        )
        row = (
            fmt12(rep["lambda1"]),
            fmt12(rep["c"]),
            fmt12(rep["local"]["witness_expectation"]),
            fmt12(rep["local"]["wootters_concurrence"]),
            rep["local"]["verdict"],
            fmt12(rep["nonlocal"]["witness_expectation"]),
            fmt12(rep["nonlocal"]["wootters_concurrence"]),
            rep["nonlocal"]["verdict"],
        )
        _emit(_csv_text(header, [row]), cfg.out)
    else:
        lines = [f"input: lambda1 = {fmt12(rep['lambda1'])}, c = {fmt12(rep['c'])}"]
        for label in ("local", "nonlocal"):
            sec = rep[label]
            lines.append("")
            lines.append(f"{label} output:")
            lines.append(_matrix_text(sec["matrix"]))
            lines.append(f"  Tr(W1 rho) = {fmt12(sec['witness_expectation'])}")
            lines.append(f"  witness detects: {sec['witness_detects']}")
            lines.append(f"  Wootters concurrence = {fmt12(sec['wootters_concurrence'])}")
            lines.append(f"  PPT entangled: {sec['ppt_entangled']}")
            lines.append(f"  verdict: {sec['verdict']}")
        _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    params = noise.params_from_c(cfg.c, k=2)
    transcript = protocol.run_rounds(cfg.rounds, params, cfg.seed)
    if cfg.out:
        protocol.write_transcript_jsonl(transcript, cfg.out)
        logger.info("transcript written to %s", cfg.out)
    summary = protocol.transcript_summary(transcript)
    rounded = {
        "n": summary["n"],
        "c": round12(summary["c"]),
        "Q": round12(summary["Q"]),
        "success_rate": round12(summary["success_rate"]),
        "helstrom_bound": round12(summary["helstrom_bound"]),
        "security_max_deviation": round12(summary["security_max_deviation"]),
    }
    if cfg.fmt == "csv":
        header = ("n", "c", "Q", "success_rate", "helstrom_bound", "security_max_deviation")
        row = tuple(
            str(rounded["n"]) if name == "n" else fmt12(rounded[name]) for name in header
        )
        sys.stdout.write(_csv_text(header, [row]))
    else:
        sys.stdout.write(json.dumps(rounded, indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qshare",
        description="Entanglement analysis of a noisy cloning channel and the "
        "secret sharing protocol built on its nonlocal output.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_max = sub.add_parser("maxent", help="max I-concurrence over (r, k) ranges")
    p_max.add_argument("--r", default="2:6", help="rank range, e.g. 2, 2:6 (default 2:6)")
    p_max.add_argument("--k", default="2:6", help="dimension range (default 2:6)")
    p_max.add_argument("--format", choices=("csv", "json"), default="csv")
    p_max.add_argument("--out", help="write the table to a file instead of stdout")

    p_thr = sub.add_parser("threshold", help="critical concurrence over a c grid")
    p_thr.add_argument(
        "--c",
        default="0.6:1.0:0.05",
        help="c grid: value, comma list, or start:stop:step (default 0.6:1.0:0.05)",
    )
    p_thr.add_argument("--format", choices=("csv", "json"), default="csv")
    p_thr.add_argument("--out", help="write the table to a file instead of stdout")

    p_state = sub.add_parser("state", help="channel outputs and verdicts for one input")
    p_state.add_argument("--lambda1", type=float, required=True)
    p_state.add_argument("--c", type=float, required=True)
    p_state.add_argument("--format", choices=("csv", "json"), default=None)
    p_state.add_argument("--out", help="write the report to a file instead of stdout")

    p_sim = sub.add_parser("simulate", help="Monte Carlo protocol rounds")
    p_sim.add_argument("--rounds", type=int, required=True)
    p_sim.add_argument("--c", type=float, required=True)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--format", choices=("csv", "json"), default="json")
    p_sim.add_argument("--out", help="write a JSON-lines transcript to this path")

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    args = build_parser().parse_args(argv)

    seed = getattr(args, "seed", None)
    if seed is None:
        env = os.environ.get(ENV_SEED)
        try:
            seed = int(env) if env else DEFAULT_SEED
        except ValueError:
            logger.error("bad %s value %r", ENV_SEED, env)
            return EXIT_DOMAIN

    cfg = RunConfig(
        command=args.command,
        c=getattr(args, "c", None),
        lambda1=getattr(args, "lambda1", None),
        r_spec=getattr(args, "r", None),
        k_spec=getattr(args, "k", None),
        rounds=getattr(args, "rounds", 0),
        seed=seed,
        fmt=getattr(args, "format", None),
        out=getattr(args, "out", None),
    )

    handler = {
        "maxent": cmd_maxent,
        "threshold": cmd_threshold,
        "state": cmd_state,
        "simulate": cmd_simulate,
    }[cfg.command]
    try:
        return handler(cfg)
    except (ValueError, qmath.DimensionMismatchError) as exc:
        logger.error("%s", exc)
        return EXIT_DOMAIN
    except OSError as exc:
        logger.error("I/O failure: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
