"""Command-line front end.

Subcommands: sample, spectrum, tangle-scan, magnify-check, verify-lemmas,
experiment.  Exit codes: 0 on success, 2 when a verification or internal
invariant fails, 3 on configuration errors (bad JSON, illegal model/degree
combinations, malformed graphs).
"""

import argparse
import json
import math
import sys
from fractions import Fraction
from itertools import permutations as iter_permutations

import numpy as np

from .bounds import (
    binom_estimate_witness,
    h2,
    h2_second_derivative,
    involution_containment_bound,
    matchings,
    odd_binom_exact,
    perm_containment_prob,
    verify_binom_estimate,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    conditioned_nonalon,
    run_experiment,
    write_rows_csv,
)
from .graphs import GraphFormatError, graph_to_json, load_graph, save_graph
from .lifts import ModelError, ModelSpec, sample_lift
from .magnify import is_pseudo_magnifier
from .spectral import SpectralError, ihara_check, is_ramanujan, mu1, \
    spectral_report
from .tangles import TangleQuery, scan_tangles
from .walks import TraceMismatchError


class VerificationFailure(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(3, f"{self.prog}: error: {message}\n")


def _model_from_args(args) -> ModelSpec:
    return ModelSpec(kind=args.model, half_loop=args.half_loop)


def cmd_sample(args) -> int:
    base = load_graph(args.base)
    lift = sample_lift(base, args.n, _model_from_args(args), args.seed)
    summary = {
        "base_vertices": base.n,
        "cover_vertices": lift.cover.n,
        "cover_edges": lift.cover.num_edges,
        "connected": lift.cover.is_connected(),
    }
    if args.out:
        save_graph(lift.cover, args.out)
        summary["out"] = args.out
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_spectrum(args) -> int:
    if args.base:
        base = load_graph(args.base)
        lift = sample_lift(base, args.n, _model_from_args(args), args.seed)
        report = spectral_report(lift, eps=args.epsilon, tol=args.tol,
                                 with_hashimoto=args.hashimoto)
        payload = report.to_json()
    else:
        g = load_graph(args.graph)
        d = g.regular_degree()
        payload = {
            "vertices": g.n,
            "edges": g.num_edges,
            "regular_degree": d,
            "mu1": mu1(g) if g.n else None,
            "adjacency_spectrum": [float(v) for v in
                                   np.linalg.eigvalsh(_adj(g))] if g.n else [],
        }
        if d is not None:
            payload["ramanujan"] = is_ramanujan(g)
        res = ihara_check(g, args.tol)
        payload["ihara"] = {"status": res.status, "passed": res.passed,
                            "max_err": res.max_err}
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _adj(g):
    from .spectral import adjacency_matrix
    return adjacency_matrix(g)


def cmd_tangle_scan(args) -> int:
    g = load_graph(args.graph)
    query = TangleQuery(nu=args.nu, r=args.r, strict=args.strict)
    report = scan_tangles(g, query, max_vertices=args.max_vertices,
                          max_subgraphs=args.max_subgraphs)
    text = json.dumps(report.to_json(), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_magnify_check(args) -> int:
    g = load_graph(args.graph)
    result = is_pseudo_magnifier(g, args.R, args.gamma, mode=args.mode,
                                 trials=args.trials, seed=args.seed)
    payload = {
        "holds": result.holds,
        "mode": result.mode,
        "trials": result.trials,
        "best_gamma_seen": result.best_gamma,
        "witness": sorted(result.witness) if result.witness else None,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _lemma_rows(max_n: int):
    rows = []

    def add(name, ok, detail=""):
        rows.append((name, ok, detail))

    # uniform permutation containment vs exhaustive enumeration
    ok = True
    for n in range(1, min(7, max_n) + 1):
        perms = list(iter_permutations(range(n)))
        for w in range(n + 1):
            for wp in range(w, n + 1):
                target = set(range(wp))
                count = sum(1 for p in perms
                            if all(p[i] in target for i in range(w)))
                if perm_containment_prob(n, w, wp) != Fraction(count, len(perms)):
                    ok = False
    add("permutation containment = exhaustive frequency", ok,
        f"n <= {min(7, max_n)}")

    # involution containment bound dominates exhaustive frequency
    ok = True
    for n in range(2, min(12, max_n) + 1):
        sigmas = list(matchings(n))
        for w in range(1, n + 1):
            for wp in range(w, n + 1):
                target = set(range(wp))
                count = sum(1 for s in sigmas
                            if all(s[i] in target for i in range(w)))
                if Fraction(count, len(sigmas)) > involution_containment_bound(n, w, wp):
                    ok = False
    add("involution containment bound dominates", ok, f"n <= {min(12, max_n)}")

    # odd binomial sandwich
    ok = True
    for n in range(2, max_n + 1):
        for t in range(2, n + 1, 2):
            sq = odd_binom_exact(n, t) ** 2
            if not (Fraction(n - t, n) * math.comb(n, t) <= sq
                    <= t * math.comb(n, t)):
                ok = False
    add("odd binomial sandwich", ok, f"even t <= n <= {max_n}")

    # constructive binomial estimate witness
    try:
        theta, s0, n0 = binom_estimate_witness(2.0, 1)
        ok, worst = verify_binom_estimate(2.0, 1, theta, s0, n0)
        add("binomial estimate witness (C=2, j=1)", ok,
            f"theta={theta} S0={s0} n0={n0} margin={worst:.2f}")
    except RuntimeError as exc:
        add("binomial estimate witness (C=2, j=1)", False, str(exc))

    # entropy second derivative vs finite differences
    ok = True
    for x in np.linspace(0.05, 0.95, 46):
        x = float(x)
        h = 7.7e-4 * min(x, 1 - x)
        approx = (h2(x + h) - 2 * h2(x) + h2(x - h)) / (h * h)
        if abs(approx - h2_second_derivative(x)) > 1e-6 * abs(
                h2_second_derivative(x)):
            ok = False
    add("entropy second derivative matches finite differences", ok,
        "x in [0.05, 0.95]")
    return rows


def cmd_verify_lemmas(args) -> int:
    rows = _lemma_rows(args.max_n)
    width = max(len(name) for name, _, _ in rows)
    failed = False
    for name, ok, detail in rows:
        mark = "PASS" if ok else "FAIL"
        print(f"[{mark}] {name:<{width}}  {detail}")
        failed = failed or not ok
    if failed:
        raise VerificationFailure("some lemma checks failed")
    return 0


def cmd_experiment(args) -> int:
    with open(args.config) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}:{exc.lineno}: {exc.msg}")
    cfg = ExperimentConfig.from_json(data)
    report = run_experiment(cfg)
    payload = report.to_json()
    if args.conditioned:
        if cfg.tangle is None:
            raise ConfigError("--conditioned requires a tangle query in the config")
        payload["conditioned_rows"] = conditioned_nonalon(cfg)
    out = args.out or data.get("output")
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out + ".json", "w") as fh:
            fh.write(text + "\n")
        write_rows_csv(report.rows, out + ".csv")
        print(f"wrote {out}.json and {out}.csv")
    else:
        print(text)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="nblifts",
                     description="Random covers, non-backtracking spectra, "
                                 "tangles and magnification")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_args(p):
        p.add_argument("--model", choices=("permutation", "cyclic"),
                       default="permutation")
        p.add_argument("--half-loop", choices=("matching", "near_matching"),
                       default=None)

    p = sub.add_parser("sample", help="sample a random cover")
    p.add_argument("--base", required=True)
    add_model_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("spectrum", help="spectra of a graph or a sampled lift")
    p.add_argument("--graph", help="single-graph mode")
    p.add_argument("--base", help="lift mode: base graph path")
    add_model_args(p)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--hashimoto", action="store_true",
                   help="include the dense Hashimoto spectrum")
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("tangle-scan", help="bounded tangle search")
    p.add_argument("--graph", required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--max-vertices", type=int, default=8)
    p.add_argument("--max-subgraphs", type=int, default=50000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tangle_scan)

    p = sub.add_parser("magnify-check", help="vertex-expansion check")
    p.add_argument("--graph", required=True)
    p.add_argument("--R", type=int, default=1)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--mode", choices=("auto", "exhaustive", "sampled"),
                   default="auto")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_magnify_check)

    p = sub.add_parser("verify-lemmas", help="pass/fail table of counting bounds")
    p.add_argument("--max-n", type=int, default=60)
    p.set_defaults(func=cmd_verify_lemmas)

    p = sub.add_parser("experiment", help="batch sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output path prefix")
    p.add_argument("--conditioned", action="store_true",
                   help="add rows conditioned on tangle-freeness")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "spectrum" and not (args.graph or args.base):
        parser.error("spectrum needs --graph or --base")
    try:
        return args.func(args)
    except (ConfigError, ModelError, GraphFormatError, FileNotFoundError,
            json.JSONDecodeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except (VerificationFailure, SpectralError, TraceMismatchError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
