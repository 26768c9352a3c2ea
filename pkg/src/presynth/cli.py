"""Command-line entry point."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .bench.generators import generate
from .circuit import Circuit, t_count
from .errors import CeilingExceeded, ConfigError, ParseError, PresynthError, SynthFailure
from .pipeline import (
    BACKENDS, STRATEGIES, StrategyConfig, make_pipeline, run_pipeline, run_suite, verify_circuit,
)
from .qasm import emit_qasm, parse_qasm

EXIT_OK, EXIT_CONFIG, EXIT_BACKEND, EXIT_VERIFY = 0, 2, 3, 4


class VerificationFailed(Exception):
    pass


def load_circuit(src: str) -> Circuit:
    """A .qasm or .json file, or a generator spec such as random:n=4,depth=4,seed=0."""
    if os.path.exists(src):
        with open(src) as fh:
            text = fh.read()
        if src.endswith(".json"):
            try:
                return Circuit.loads(text)
            except (ValueError, KeyError, TypeError) as e:
                raise ParseError(f"{src}: {e}") from None
        return parse_qasm(text)
    if ":" in src:
        return generate(src)
    raise ConfigError(f"no such file or task spec: {src}")


def write_circuit(c: Circuit, path: str | None) -> None:
    if path and path.endswith(".json"):
        text = c.dumps()
    else:
        text = emit_qasm(c)
    if path and path != "-":
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dump(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_gen(a):
    write_circuit(generate(a.task), a.out)


def cmd_synth(a):
    c = load_circuit(a.input)
    pipe = make_pipeline(a.backend, a.epsilon)
    r = pipe.run(c, ())
    write_circuit(r.circuit, a.out)
    print(f"t_count {r.t_count}  K {r.k_blocks}", file=sys.stderr)


def cmd_presyn(a):
    c = load_circuit(a.input)
    cfg = StrategyConfig(learner=a.learner, budget=a.budget, horizon=a.horizon, max_len=a.max_len)
    rep = run_pipeline(c, a.backend, a.strategy, a.epsilon, a.seed, cfg, layerwise=a.layerwise)
    rep.task = a.input
    if a.emit:
        write_circuit(Circuit.from_json(rep.circuits[a.strategy]), a.emit)
    out = rep.to_json()
    if not a.full:
        out.pop("circuits")
    _dump(out, a.out)
    if rep.errors and not rep.errors["bound_ok"]:
        raise VerificationFailed(f"distance {rep.errors['distance_presyn']:.3g} above bound {rep.errors['bound']:.3g}")


def cmd_verify(a):
    res = verify_circuit(load_circuit(a.original), load_circuit(a.synthesized), a.epsilon, a.k)
    _dump(res, None)
    if not res["bound_ok"]:
        raise VerificationFailed("distance above K * epsilon")


def cmd_bench(a):
    reports = run_suite(a.config, a.out, a.workers)
    bad = [r for r in reports if r.partial]
    print(f"{len(reports)} cells, {len(bad)} failed, written to {a.out}")
    if bad:
        return EXIT_BACKEND
    return EXIT_OK


def cmd_tcount(a):
    c = load_circuit(a.input)
    print(t_count(c, a.matchgate))


def cmd_plot(a):
    from .plot import plot_summary

    plot_summary(a.summary, a.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="presynth", description="Circuit pre-synthesis for lower T-count.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a benchmark circuit")
    g.add_argument("task", help="e.g. random:n=6,depth=6,seed=1")
    g.add_argument("-o", "--out", help=".qasm or .json (default: QASM to stdout)")
    g.set_defaults(fn=cmd_gen)

    def backend_args(sp):
        sp.add_argument("--backend", choices=BACKENDS, default="kak+enum")
        sp.add_argument("--epsilon", type=float, default=0.01)

    s = sub.add_parser("synth", help="synthesize without pre-synthesis")
    s.add_argument("input")
    backend_args(s)
    s.add_argument("-o", "--out")
    s.set_defaults(fn=cmd_synth)

    ps = sub.add_parser("presyn", help="search a merge plan, then synthesize")
    ps.add_argument("input")
    backend_args(ps)
    ps.add_argument("--strategy", choices=STRATEGIES, default="greedy")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--horizon", type=int)
    ps.add_argument("--budget", type=int, default=200, help="episodes for --strategy search/refine")
    ps.add_argument("--learner", choices=("random", "cem", "pg"), default="random")
    ps.add_argument("--max-len", type=int, default=3, help="plan length for --strategy brute")
    ps.add_argument("--layerwise", action="store_true")
    ps.add_argument("--emit", help="write the synthesized circuit here")
    ps.add_argument("--full", action="store_true", help="embed circuits in the report")
    ps.add_argument("-o", "--out", help="report path (default stdout)")
    ps.set_defaults(fn=cmd_presyn)

    v = sub.add_parser("verify", help="check distance <= K * epsilon")
    v.add_argument("original")
    v.add_argument("synthesized")
    v.add_argument("--epsilon", type=float, default=0.01)
    v.add_argument("-k", "--k", type=int, default=1, help="number of synthesized blocks")
    v.set_defaults(fn=cmd_verify)

    b = sub.add_parser("bench", help="run a suite")
    b.add_argument("--config", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--workers", type=int)
    b.set_defaults(fn=cmd_bench)

    t = sub.add_parser("tcount", help="count T gates")
    t.add_argument("input")
    t.add_argument("--matchgate", action="store_true")
    t.set_defaults(fn=cmd_tcount)

    pl = sub.add_parser("plot", help="chart a suite summary")
    pl.add_argument("summary", help="summary.csv from bench")
    pl.add_argument("-o", "--out", default="summary.png")
    pl.set_defaults(fn=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return a.fn(a) or EXIT_OK
    except (ParseError, ConfigError, CeilingExceeded, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except VerificationFailed as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except (SynthFailure, PresynthError, ValueError) as e:
        print(f"backend failure: {e}", file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
