"""Command-line harness: instance generation, algorithm runs, verification
scenarios, and benchmark sweeps.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import exact, graphs, linkage, peel, random_trees, report, rounding, sdp, trees

OBJECTIVE_NAMES = {"sim": "similarity", "dissim": "dissimilarity", "dasgupta": "dasgupta"}
ALGORITHMS = (
    "avg-linkage",
    "random",
    "sdp-solve",
    "sdp-random",
    "peel-maxcut",
    "recursive-maxcut",
)


def _fail(msg: str) -> int:
    print(f"FAIL: {msg}")
    return 1


def _ok(msg: str) -> None:
    print(f"ok: {msg}")


# ---------------------------------------------------------------- gen


def cmd_gen(args) -> int:
    if args.family == "tight-sim":
        g = graphs.make_tight_similarity_instance(args.k, args.eps)
    elif args.family == "tight-dissim":
        g = graphs.make_tight_dissimilarity_instance(args.m)
    elif args.family == "embedded-clique":
        g = graphs.make_embedded_clique_instance(args.n, args.eps)
    else:
        g = graphs.make_random_instance(
            args.n, args.density, args.weight_dist, args.seed
        )
    if args.out:
        graphs.write_graph(g, args.out)
        print(f"wrote {args.out} (n={g.n}, edges={len(g.weights)}, W={graphs.total_weight(g):.12g})")
    else:
        print(graphs.graph_to_json(g))
    return 0


# ---------------------------------------------------------------- run


def _evaluate(g, tree, objective: str) -> float:
    if objective == "similarity":
        return trees.similarity_reward(g, tree)
    if objective == "dissimilarity":
        return trees.dissimilarity_reward(g, tree)
    return trees.dasgupta_cost(g, tree)


def _reference(g, objective: str) -> float:
    w = graphs.total_weight(g)
    # brute force is exponential; n = 8 (10395 trees) is the cheap regime
    if g.n <= 8:
        return exact.brute_force_opt(g, objective)[1]
    if objective == "similarity":
        return (g.n - 2) * w
    if objective == "dissimilarity":
        return g.n * w
    return 2.0 * w  # every pair pays |T_ij| >= 2


def _run_once(g, alg: str, objective: str, seed: int, args):
    if alg == "avg-linkage":
        mode = "dissimilarity" if objective == "dissimilarity" else "similarity"
        tree, trace = linkage.average_linkage(g, mode=mode)
        return tree, {"trace": trace}
    if alg == "random":
        rng = random_trees.stream_rng(seed, "cli-random")
        return random_trees.random_always(g.n, rng), {}
    if alg == "sdp-random":
        return rounding.sdp_first_random_next(g, seed), {}
    if alg == "peel-maxcut":
        cfg = peel.PeelConfig(gamma=args.gamma, gw_rounds=args.gw_rounds)
        tree, peeled = peel.peel_off_first_maxcut_next(g, cfg, seed)
        return tree, {"peeled": peeled, "gamma": args.gamma}
    if alg == "recursive-maxcut":
        return peel.recursive_maxcut_baseline(g, seed, args.gw_rounds), {}
    raise ValueError(f"unknown algorithm {alg!r}")


def cmd_run(args) -> int:
    g = graphs.read_graph(args.graph)
    objective = OBJECTIVE_NAMES[args.objective]
    instance = os.path.basename(args.graph)

    if args.alg == "sdp-solve":
        t0 = time.perf_counter()
        sol = sdp.solve_low_rank(
            sdp.build_hc_sdp(g), rank=args.rank, tol=args.tol, seed=args.seed
        )
        dt = time.perf_counter() - t0
        obj = sdp.hc_sdp_objective(g, sol)
        ok, residuals = sdp.check_feasibility(sol, tol=args.tol)
        if args.json:
            print(
                json.dumps(
                    {
                        "objective": obj,
                        "residuals": residuals,
                        "converged": sol.converged,
                        "iterations": sol.iterations,
                        "vectors": {t: v.tolist() for t, v in sol.vectors.items()},
                    }
                )
            )
        else:
            print(f"sdp objective {obj:.12g} in {dt:.2f}s; residuals {residuals}")
        return 0 if ok else 1

    reports = []
    best_tree, best_val = None, -math.inf
    ref = _reference(g, objective)
    extras = {}
    for trial in range(args.trials):
        t0 = time.perf_counter()
        tree, extras = _run_once(g, args.alg, objective, args.seed * 1000003 + trial, args)
        dt = time.perf_counter() - t0
        val = _evaluate(g, tree, objective)
        reports.append(
            report.RunReport(instance, args.alg, objective, args.seed, trial, val, ref, dt)
        )
        better = val < best_val if objective == "dasgupta" else val > best_val
        if best_tree is None or better:
            best_tree, best_val = tree, val

    if args.out:
        report.write_reports(reports, args.out)
    if args.figures:
        os.makedirs(args.figures, exist_ok=True)
        report.plot_value_bars(
            [f"trial {r.trial}" for r in reports],
            [r.value for r in reports],
            f"{args.alg} on {instance} ({objective})",
            os.path.join(args.figures, f"run-{args.alg}.png"),
        )
    if args.json:
        out = {
            "algorithm": args.alg,
            "objective": objective,
            "value": best_val,
            "reference": ref,
            "tree": json.loads(best_tree.to_json()),
        }
        if "peeled" in extras:
            out["peeled"] = extras["peeled"]
        print(json.dumps(out))
    else:
        for r in reports:
            print(
                f"{r.algorithm} trial {r.trial}: {objective} = {r.value:.12g} "
                f"(reference {ref:.12g}, ratio {r.ratio:.6g})"
            )
        if "trace" in extras and args.trace:
            print(report.merge_trace_csv(extras["trace"]), end="")
    return 0


# ---------------------------------------------------------------- eval


def cmd_eval(args) -> int:
    g = graphs.read_graph(args.graph)
    with open(args.tree) as f:
        tree = trees.Dendrogram.from_json(f.read())
    objective = OBJECTIVE_NAMES[args.objective]
    val = _evaluate(g, tree, objective)
    if args.json:
        print(json.dumps({"objective": objective, "value": val}))
    else:
        print(f"{objective} = {val:.12g}")
    return 0


# ---------------------------------------------------------------- verify


def verify_tight_similarity(k_list, eps=0.1, figures=None):
    rows = []
    for k in k_list:
        alg, ref, ratio = linkage.similarity_tight_report(k, eps)
        rows.append((k**3, alg, ref, ratio))
        print(f"k={k} n={k**3}: linkage {alg:.12g} / reference {ref:.12g} = {ratio:.6f}")
    ratios = [r[3] for r in rows]
    failures = []
    if not all(a > b for a, b in zip(ratios, ratios[1:])):
        failures.append(f"ratios not strictly decreasing: {ratios}")
    if not all(r > 1 / 3 for r in ratios):
        failures.append(f"some ratio at or below 1/3: {ratios}")
    if figures:
        report.plot_ratio_curve(
            [r[0] for r in rows], ratios, 1 / 3, "average linkage, planted-clique similarity family",
            os.path.join(figures, "tight-similarity.png"),
        )
    return rows, failures


def verify_tight_dissimilarity(m_list, figures=None):
    rows = []
    failures = []
    for m in m_list:
        alg, ref, ratio = linkage.dissimilarity_tight_report(m)
        closed = linkage.average_linkage_closed_form_dissimilarity(m)
        rows.append((2 * m, alg, closed, ref, ratio))
        if alg != closed:
            failures.append(f"m={m}: simulated {alg!r} != closed form {closed!r}")
    ratios = [r[4] for r in rows]
    if not all(a > b for a, b in zip(ratios, ratios[1:])):
        failures.append(f"ratios not strictly decreasing: {ratios}")
    print(f"m={m_list[0]}..{m_list[-1]}: ratio {ratios[0]:.6f} -> {ratios[-1]:.6f}")
    if figures:
        report.plot_ratio_curve(
            [r[0] for r in rows], ratios, 2 / 3,
            "average linkage, bipartite-minus-matching family",
            os.path.join(figures, "tight-dissimilarity.png"),
        )
    return rows, failures


def _random_nonneg_triple(rng, dim=4):
    v = np.abs(rng.standard_normal((3, dim)))  # nonneg components => nonneg dots
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def verify_triplet(trials: int, seed: int, triples: int = 10):
    rng = random_trees.stream_rng(seed, "verify-triplet")
    failures = []
    for t in range(triples):
        v = _random_nonneg_triple(rng)
        a = rounding.TripletAngles.from_vectors(v[0], v[1], v[2])
        exact_p = rounding.triplet_separation_probability(a)
        emp = rounding.mc_verify_triplet(v[0], v[1], v[2], trials, seed + t)
        if abs(sum(exact_p) - 1.0) > 1e-12:
            failures.append(f"triple {t}: closed forms sum to {sum(exact_p)!r}")
        for name, p, f in zip(("ij|k", "ik|j", "jk|i", "together"), exact_p, emp):
            stderr = math.sqrt(max(p * (1 - p), 1e-12) / trials)
            if abs(f - p) > 4 * stderr:
                failures.append(
                    f"triple {t} event {name}: empirical {f:.5f} vs exact {p:.5f} "
                    f"(4 stderr = {4 * stderr:.5f})"
                )
    return failures


def verify_factor(n=None, theta_bar=None):
    failures = []
    if n is not None:
        pairs = [(n, theta_bar if theta_bar is not None else 0.0)]
    else:
        pairs = [(nn, tb) for nn in range(3, 31) for tb in np.arange(0.0, 1.51, 0.1)]
    worst = math.inf
    for nn, tb in pairs:
        num = rounding.factor_revealing_numeric(nn, float(tb))
        bound = rounding.factor_revealing_lower_bound(nn, float(tb))
        worst = min(worst, num - bound)
        if num < bound - 1e-6:
            failures.append(f"n={nn} theta_bar={tb:.2f}: numeric {num:.8f} < bound {bound:.8f}")
    print(f"factor-revealing margin over grid: min(numeric - bound) = {worst:.3e}")
    return failures


def verify_constants(which="both"):
    failures = []
    if which in ("sim", "both"):
        eps2, alpha = rounding.optimize_alpha_similarity()
        print(f"similarity constant: alpha = {alpha:.6f} at eps2 = {eps2:.4f}")
        if abs(alpha - 0.336379) > 5e-5:
            failures.append(f"alpha_sim = {alpha:.7f}, expected 0.336379 +- 5e-5")
        if not 0.13 <= eps2 <= 0.15:
            failures.append(f"eps2* = {eps2:.4f} outside [0.13, 0.15]")
    if which in ("dissim", "both"):
        gamma, eps, alpha = peel.optimize_alpha_dissimilarity()
        print(f"dissimilarity constant: alpha = {alpha:.6f} at gamma = {gamma:.3f}, eps = {eps:.6f}")
        if abs(alpha - 0.667078) > 5e-5:
            failures.append(f"alpha_dissim = {alpha:.7f}, expected 0.667078 +- 5e-5")
        if not 10.0 <= gamma <= 12.0:
            failures.append(f"gamma* = {gamma:.3f} outside [10, 12]")
        if not 4e-4 <= eps <= 8e-4:
            failures.append(f"eps* = {eps:.6f} outside [4e-4, 8e-4]")
    return failures


def verify_relaxation(seed: int, instances: int = 3):
    failures = []
    rng = random_trees.stream_rng(seed, "verify-relaxation")
    for i in range(instances):
        n = int(rng.integers(4, 9))
        g = graphs.make_random_instance(n, 0.7, "uniform01", int(rng.integers(0, 2**31)))
        opt_tree, opt = exact.brute_force_opt(g, "similarity")
        sol = sdp.solve_low_rank(sdp.build_hc_sdp(g), seed=seed + i, warm_start=opt_tree)
        obj = sdp.hc_sdp_objective(g, sol)
        ok, residuals = sdp.check_feasibility(sol, tol=1e-5)
        slack = 1e-3 * g.n * graphs.total_weight(g)
        print(f"instance {i} (n={n}): sdp {obj:.6f} vs brute-force {opt:.6f}")
        if obj < opt - slack:
            failures.append(f"instance {i}: relaxation value {obj:.6f} below optimum {opt:.6f}")
        if not ok:
            failures.append(f"instance {i}: residuals {residuals} exceed 1e-5")
    return failures


def verify_random_expectation(trials: int, seed: int, instances: int = 5):
    failures = []
    rng = random_trees.stream_rng(seed, "verify-random-expectation")
    for i in range(instances):
        n = int(rng.integers(4, 9))
        g = graphs.make_random_instance(n, 0.8, "uniform01", int(rng.integers(0, 2**31)))
        mean, stderr = random_trees.monte_carlo_mean(g, "similarity", trials, seed + i)
        expect = random_trees.expected_similarity_reward_random(g)
        if abs(mean - expect) > 4 * stderr:
            failures.append(
                f"instance {i} (n={n}): mean {mean:.5f} vs (n-2)W/3 = {expect:.5f} "
                f"(4 stderr = {4 * stderr:.5f})"
            )
    freq = random_trees.triplet_nonleaf_frequencies(6, trials, seed)
    dev = float(np.nanmax(np.abs(freq - 1 / 3)))
    print(f"triplet non-leaf frequency: max |freq - 1/3| = {dev:.5f}")
    if dev > 0.01:
        failures.append(f"triplet frequency deviates from 1/3 by {dev:.5f} > 0.01")
    return failures


def verify_gw_ratio(seed: int, instances: int = 20, rounds: int = 100):
    failures = []
    rng = random_trees.stream_rng(seed, "verify-gw")
    hits = 0
    for i in range(instances):
        n = int(rng.integers(4, 13))
        g = graphs.make_random_instance(n, 0.6, "uniform01", int(rng.integers(0, 2**31)))
        if not g.weights:
            hits += 1
            continue
        _, brute = exact.brute_force_maxcut(g)
        sol = sdp.solve_low_rank(sdp.build_maxcut_sdp(g), seed=seed + i)
        w = graphs.total_weight(g)
        if brute > sol.objective + 1e-5 * w:
            failures.append(
                f"instance {i}: brute-force cut {brute:.6f} exceeds sdp value {sol.objective:.6f}"
            )
        _, cut = peel.gw_maxcut(g, rounds, seed + i)
        if cut >= 0.878 * brute - 1e-12:
            hits += 1
    print(f"rounded cut >= 0.878 * optimum on {hits}/{instances} instances")
    if hits < math.ceil(0.95 * instances):
        failures.append(f"only {hits}/{instances} instances met the 0.878 ratio")
    return failures


def cmd_verify(args) -> int:
    failures: list[str] = []
    if args.figures:
        os.makedirs(args.figures, exist_ok=True)
    if args.target == "sim-tight":
        _, failures = verify_tight_similarity(list(range(2, args.k_max + 1)), figures=args.figures)
    elif args.target == "dissim-tight":
        _, failures = verify_tight_dissimilarity(list(range(2, args.m_max + 1)), figures=args.figures)
    elif args.target == "triplet":
        failures = verify_triplet(args.trials, args.seed)
    elif args.target == "factor":
        failures = verify_factor(args.n, args.theta_bar)
    elif args.target == "constants":
        failures = verify_constants(args.which)
    elif args.target == "relaxation":
        failures = verify_relaxation(args.seed)
    elif args.target == "random-expectation":
        failures = verify_random_expectation(args.trials, args.seed)
    elif args.target == "gw-ratio":
        failures = verify_gw_ratio(args.seed)
    if failures:
        for f in failures:
            print(f"FAIL: {f}")
        return 1
    _ok(f"verify {args.target}")
    return 0


# ---------------------------------------------------------------- bench


def cmd_bench(args) -> int:
    reports: list[report.RunReport] = []
    cfg = peel.PeelConfig(gamma=args.gamma, gw_rounds=args.gw_rounds)
    suite = [
        ("tight-dissim-m10", graphs.make_tight_dissimilarity_instance(10), "dissimilarity"),
        ("tight-sim-k3", graphs.make_tight_similarity_instance(3), "similarity"),
        ("embedded-clique-n60", graphs.make_embedded_clique_instance(60, 0.2), "dissimilarity"),
        ("random-n30", graphs.make_random_instance(30, 0.3, "uniform01", args.seed), "dissimilarity"),
    ]
    peel_ok = True
    for name, g, objective in suite:
        ref = _reference(g, objective)
        algs = ["avg-linkage", "random", "peel-maxcut", "recursive-maxcut"]
        for alg in algs:
            for trial in range(args.trials):
                seed = args.seed * 1000003 + trial
                t0 = time.perf_counter()
                if alg == "avg-linkage":
                    mode = "dissimilarity" if objective == "dissimilarity" else "similarity"
                    tree, _ = linkage.average_linkage(g, mode=mode)
                elif alg == "random":
                    tree = random_trees.random_always(
                        g.n, random_trees.stream_rng(seed, f"bench-{name}")
                    )
                elif alg == "peel-maxcut":
                    tree, peeled = peel.peel_off_first_maxcut_next(g, cfg, seed)
                    if len(peeled) > g.n / cfg.gamma:
                        peel_ok = False
                        print(
                            f"FAIL: peel bound violated on {name}: "
                            f"{len(peeled)} > n/gamma = {g.n / cfg.gamma:.3f}"
                        )
                else:
                    tree = peel.recursive_maxcut_baseline(g, seed, args.gw_rounds)
                dt = time.perf_counter() - t0
                val = _evaluate(g, tree, objective)
                reports.append(
                    report.RunReport(name, alg, objective, args.seed, trial, val, ref, dt)
                )
    csv_text = report.reports_to_csv(reports)
    if args.out:
        with open(args.out, "w") as f:
            f.write(csv_text)
        print(f"wrote {args.out} ({len(reports)} rows)")
    else:
        print(csv_text, end="")
    if args.figures:
        os.makedirs(args.figures, exist_ok=True)
        for name, _, _ in suite:
            rows = [r for r in reports if r.instance == name and r.trial == 0]
            report.plot_value_bars(
                [r.algorithm for r in rows],
                [r.value for r in rows],
                f"benchmark: {name}",
                os.path.join(args.figures, f"bench-{name}.png"),
            )
    if not peel_ok:
        return 1
    _ok(f"bench (peel count <= n/gamma held on all instances at gamma={args.gamma})")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hclab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance as graph JSON")
    g.add_argument("--family", required=True,
                   choices=["tight-sim", "tight-dissim", "embedded-clique", "random"])
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--m", type=int, default=10)
    g.add_argument("--n", type=int, default=20)
    g.add_argument("--eps", type=float, default=0.1)
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--weight-dist", choices=["uniform01", "unit"], default="uniform01")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run an algorithm on a graph file")
    r.add_argument("--graph", required=True)
    r.add_argument("--alg", required=True, choices=ALGORITHMS)
    r.add_argument("--objective", choices=["sim", "dissim", "dasgupta"], default="sim")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--trials", type=int, default=1)
    r.add_argument("--gamma", type=float, default=11.1)
    r.add_argument("--gw-rounds", type=int, default=100)
    r.add_argument("--tol", type=float, default=1e-5)
    r.add_argument("--rank", type=int, default=None)
    r.add_argument("--out", default=None, help="CSV report path")
    r.add_argument("--json", action="store_true")
    r.add_argument("--trace", action="store_true", help="print linkage merge trace CSV")
    r.add_argument("--figures", default=None, help="directory for rendered figures")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("eval", help="evaluate a dendrogram JSON file against a graph")
    e.add_argument("--graph", required=True)
    e.add_argument("--tree", required=True)
    e.add_argument("--objective", choices=["sim", "dissim", "dasgupta"], default="sim")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("verify", help="run a verification scenario")
    v.add_argument("target", choices=[
        "sim-tight", "dissim-tight", "triplet", "factor", "constants",
        "relaxation", "random-expectation", "gw-ratio",
    ])
    v.add_argument("--trials", type=int, default=100000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--n", type=int, default=None)
    v.add_argument("--theta-bar", type=float, default=None)
    v.add_argument("--which", choices=["sim", "dissim", "both"], default="both")
    v.add_argument("--k-max", type=int, default=5)
    v.add_argument("--m-max", type=int, default=50)
    v.add_argument("--figures", default=None, help="directory for rendered figures")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="benchmark sweep over the instance families")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--trials", type=int, default=1)
    b.add_argument("--gamma", type=float, default=11.1)
    b.add_argument("--gw-rounds", type=int, default=100)
    b.add_argument("--out", default=None)
    b.add_argument("--figures", default=None, help="directory for rendered figures")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, graphs.GraphFormatError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
