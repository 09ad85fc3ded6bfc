"""Command-line front end.

Subcommands: ``analyze``, ``minimize``, ``decompose``, ``destabilize``,
``verify-geometry`` and ``corpus {list,export}``. Reports are JSON on stdout
(or ``--out``). Exit codes: 0 success or minimum, 2 divergent flow with a
certified ideal, 3 inconclusive, 1 error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import __version__
from .algebra import center, derivations, is_simple, killing_form, validate
from .cartan import check_inclusions, classify, der_transpose_residual, split
from .corpus import CORPUS_NAMES, COMPLEX_NAMES, complex_corpus, corpus
from .errors import (
    CartanFlowError,
    InconclusiveDestabilization,
    StalledFlow,
)
from .formats import atomic_write, dumps_algebra, load_algebra
from .hspace import random_point
from .kempfness import FlowOptions, destabilize, minimize
from .realify import check_compact_form, realify
from .verify import OdeProblem, trace_bound_check, property_star_suite, q_factor, random_symmetric

EXIT_OK, EXIT_ERROR, EXIT_DIVERGENT, EXIT_INCONCLUSIVE = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    corpus: Optional[str] = None
    complex: bool = False
    tol: float = 1e-9
    grad_tol: float = 1e-10
    gap_tol: float = 1e-6
    max_steps: int = 20000
    divergence_radius: float = 25.0
    window: int = 10
    seed: int = 0
    start: str = "identity"
    out: Optional[str] = None
    trace: Optional[str] = None
    timing: bool = False

    def __post_init__(self):
        for name in ("tol", "grad_tol", "gap_tol", "divergence_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if self.max_steps < 1:
            raise ValueError("--max-steps must be >= 1")
        if self.window < 2:
            raise ValueError("--window must be >= 2")

    def flow_options(self) -> FlowOptions:
        return FlowOptions(max_steps=self.max_steps, grad_tol=self.grad_tol,
                           divergence_radius=self.divergence_radius, window=self.window)


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; exit code 2 is reserved for divergent flows
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _load(cfg: RunConfig):
    if (cfg.input is None) == (cfg.corpus is None):
        raise ValueError("give exactly one of --input or --corpus")
    if cfg.input is not None:
        return load_algebra(cfg.input, complex_field=True if cfg.complex else None, tol=cfg.tol)
    if cfg.complex and cfg.corpus in COMPLEX_NAMES:
        alg, _ = realify(complex_corpus(cfg.corpus), cfg.tol)
        return alg
    return corpus(cfg.corpus)


def _summary(alg, cfg):
    K = killing_form(alg)
    return {
        "name": alg.name,
        "dim": alg.dim,
        "field": alg.field_tag,
        "simplicity": is_simple(alg, cfg.tol, seed=cfg.seed).as_dict(),
        "killing_signature": list(K.signature()),
    }


def _start(alg, cfg):
    if cfg.start == "random":
        return random_point(alg.dim, np.random.default_rng(cfg.seed), 1.0)
    return None


def _run_flow(alg, cfg):
    sink = open(cfg.trace, "w", encoding="utf-8") if cfg.trace else None

    def emit(step):
        sink.write(json.dumps(step.as_dict()) + "\n")
        sink.flush()

    try:
        return minimize(alg, _start(alg, cfg), cfg.flow_options(), callback=emit if sink else None)
    finally:
        if sink:
            sink.close()


def _destab_payload(alg, trace, cfg):
    try:
        d = destabilize(alg, trace, gap_tol=cfg.gap_tol, tol=cfg.tol)
    except InconclusiveDestabilization as e:
        return {"error": str(e)}, EXIT_INCONCLUSIVE
    return d.as_dict(), EXIT_DIVERGENT


def cmd_analyze(alg, cfg):
    rep = validate(alg, cfg.tol)
    payload = {
        "validation": rep.as_dict(),
        "center_dim": center(alg, cfg.tol).dim,
        "derivation_dim": int(derivations(alg, cfg.tol).shape[0]),
    }
    return payload, EXIT_OK if rep.passed else EXIT_ERROR


def cmd_minimize(alg, cfg):
    trace = _run_flow(alg, cfg)
    payload = {"flow": trace.verdict_dict()}
    if trace.verdict == "minimum":
        return payload, EXIT_OK
    if trace.verdict == "divergent":
        payload["destabilization"], code = _destab_payload(alg, trace, cfg)
        return payload, code
    return payload, EXIT_INCONCLUSIVE


def cmd_decompose(alg, cfg):
    trace = _run_flow(alg, cfg)
    payload = {"flow": trace.verdict_dict()}
    if trace.verdict == "divergent":
        payload["destabilization"], code = _destab_payload(alg, trace, cfg)
        return payload, code
    if trace.verdict != "minimum":
        return payload, EXIT_INCONCLUSIVE
    # the split tolerance must sit above the flow's stopping gradient
    split_tol = max(1e-6, 10 * cfg.tol)
    sp = split(alg, trace.H_star, split_tol)
    payload["split"] = sp.as_dict()
    payload["inclusions"] = check_inclusions(alg, sp, split_tol).as_dict()
    payload["classification"] = classify(alg, sp).as_dict()
    payload["der_transpose_residual"] = der_transpose_residual(alg, trace.H_star, cfg.tol)
    if alg.field_tag == "complex-realified":
        payload["compact_form"] = check_compact_form(alg, alg.J, sp, split_tol).as_dict()
    return payload, EXIT_OK


def cmd_destabilize(alg, cfg):
    trace = _run_flow(alg, cfg)
    payload = {"flow": trace.verdict_dict()}
    if trace.verdict != "divergent":
        payload["error"] = f"flow verdict is {trace.verdict}; nothing to destabilize"
        return payload, EXIT_ERROR if trace.verdict == "minimum" else EXIT_INCONCLUSIVE
    payload["destabilization"], code = _destab_payload(alg, trace, cfg)
    return payload, code


def cmd_verify_geometry(cfg, n, samples):
    rng = np.random.default_rng(cfg.seed)
    margins, mismatch = [], 0.0
    for _ in range(100):
        m = int(rng.integers(1, 6))
        p = OdeProblem(random_symmetric(m, rng), random_symmetric(m, rng), float(rng.uniform(0.01, 3.0)), 8)
        margins.append(trace_bound_check(p).min_margin)
    grid = np.concatenate([[0.0], np.logspace(-8, np.log10(30.0), 200)])
    q = q_factor(grid)
    star = [property_star_suite(k, samples, cfg.seed).as_dict() for k in n]
    payload = {
        "suites": [
            {"suite": "trace-bound", "samples": 100, "seed": cfg.seed, "min_margin": float(min(margins)),
             "passed": bool(min(margins) >= -1e-10)},
            {"suite": "q-factor", "samples": len(grid), "min_value": float(q.min()),
             "monotone": bool(np.all(np.diff(q) >= 0)), "passed": bool(q.min() >= 1.0)},
        ] + star,
    }
    ok = all(s["passed"] for s in payload["suites"])
    return payload, EXIT_OK if ok else EXIT_ERROR


def build_parser():
    parser = _Parser(prog="cartanflow", description="Optimal metrics and Cartan decompositions of Lie algebras.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, flow=False):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", metavar="PATH", help="algebra JSON file")
        src.add_argument("--corpus", metavar="NAME", choices=CORPUS_NAMES + ("sl3C",), help="built-in algebra")
        p.add_argument("--complex", action="store_true", help="read complex coefficients and realify")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
        p.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
        if flow:
            p.add_argument("--grad-tol", type=float, default=1e-10, help="relative gradient stopping tolerance")
            p.add_argument("--gap-tol", type=float, default=1e-6)
            p.add_argument("--max-steps", type=int, default=20000)
            p.add_argument("--divergence-radius", type=float, default=25.0)
            p.add_argument("--window", type=int, default=10)
            p.add_argument("--start", choices=("identity", "random"), default="identity",
                           help="start metric; 'random' is drawn from --seed")
            p.add_argument("--trace", metavar="PATH", help="stream the flow as JSON lines")

    common(sub.add_parser("analyze", help="validation, center, derivations, Killing form, simplicity"))
    for name, hlp in (("minimize", "run the descent flow"),
                      ("decompose", "flow, then Cartan split and classification"),
                      ("destabilize", "flow, then flag and ideals of a divergent run")):
        common(sub.add_parser(name, help=hlp), flow=True)
    vg = sub.add_parser("verify-geometry", help="checks of the exponential map of the space of metrics")
    vg.add_argument("--n", type=int, nargs="+", default=[3, 5])
    vg.add_argument("--samples", type=int, default=500)
    vg.add_argument("--seed", type=int, default=42)
    vg.add_argument("--out", metavar="PATH")
    vg.add_argument("--timing", action="store_true")
    cp = sub.add_parser("corpus", help="built-in algebras")
    cp_sub = cp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    cp_sub.add_parser("list")
    ex = cp_sub.add_parser("export")
    ex.add_argument("name", choices=CORPUS_NAMES + ("sl3C",))
    ex.add_argument("--complex", action="store_true", help="export the complex form (sl2C, sl3C)")
    ex.add_argument("--out", metavar="PATH")
    return parser


def _write(text, out):
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _config(args) -> RunConfig:
    keys = RunConfig.__dataclass_fields__.keys()
    return RunConfig(**{k: v for k, v in vars(args).items() if k in keys and v is not None})


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        if args.command == "corpus":
            if args.action == "list":
                _write("\n".join(CORPUS_NAMES + ("sl3C",)) + "\n", None)
                return EXIT_OK
            if args.complex or args.name == "sl3C":
                alg = complex_corpus(args.name)
            else:
                alg = corpus(args.name)
            _write(dumps_algebra(alg, indent=2) + "\n", args.out)
            return EXIT_OK
        cfg = _config(args)
        if args.command == "verify-geometry":
            payload, code = cmd_verify_geometry(cfg, args.n, args.samples)
            report = {"command": cfg.command, "config": {"n": args.n, "samples": args.samples, "seed": cfg.seed}}
        else:
            alg = _load(cfg)
            handler = {"analyze": cmd_analyze, "minimize": cmd_minimize,
                       "decompose": cmd_decompose, "destabilize": cmd_destabilize}[cfg.command]
            report = {"command": cfg.command, "config": asdict(cfg), "algebra": _summary(alg, cfg)}
            payload, code = handler(alg, cfg)
        report.update(payload)
        report["exit_code"] = code
        if cfg.timing:
            report["timing_seconds"] = time.perf_counter() - t0
        _write(json.dumps(report, indent=2) + "\n", cfg.out)
        return code
    except StalledFlow as e:
        err = {"command": args.command, "error": str(e), "kind": "stalled"}
        if e.trace is not None:
            err["flow"] = e.trace.verdict_dict()
        sys.stdout.write(json.dumps(err, indent=2) + "\n")
        return EXIT_INCONCLUSIVE
    except (CartanFlowError, ValueError, OSError) as e:
        sys.stderr.write(f"cartanflow: {type(e).__name__}: {e}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
