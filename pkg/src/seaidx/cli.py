"""Command-line driver chaining the whole workflow.

Subcommands: gen, summarize, sample, index, query, eval, stats.  Every
subcommand writes its declared files and prints line-oriented key=value
logs; usage errors exit 2, data errors exit 1.  Flags may be pre-seeded
from a key=value config file (--config); explicit flags win.  --threads
(fallback: the SEAIDX_THREADS environment variable) bounds internal
parallelism.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import (
    GenSpec,
    approx_query,
    avg_distance_diff,
    build,
    chi_stats_analytic,
    chi_stats_montecarlo,
    dea_scale,
    dft_summarize_rows,
    exact_query_bruteforce,
    exact_query_pruned,
    gen_queries,
    generate_dataset,
    ideal_tightness_curve,
    leaf_coverage_experiment,
    load_dataset,
    load_summaries,
    MetricReport,
    nn_coverage,
    paa_rows,
    random_partners,
    reconstruction_rms,
    reports_to_csv,
    SampleSet,
    save_dataset,
    save_sample,
    save_sax,
    save_summaries,
    sax_from_paa,
    seasam,
    uniform_sample,
    unit_scale,
)
from .core import SizeMismatch


class UsageError(Exception):
    """Flag combination errors; exit code 2 like argparse's own."""


def _resolve(path: str, ext: str) -> Path:
    p = Path(path)
    if p.suffix == ext and p.exists():
        return p
    cand = p.with_suffix(ext) if p.suffix else Path(str(p) + ext)
    return cand if cand.exists() else p if p.exists() else cand


def _out_path(path: str, ext: str) -> Path:
    p = Path(path)
    return p if p.suffix == ext else (p.with_suffix(ext) if p.suffix else Path(str(p) + ext))


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _load_summary_file(path):
    values, info = load_summaries(_resolve(path, ".bin"))
    return values, info


def _quantization_values(values, info):
    return unit_scale(values, info["scaled"], info["source_m"])


def _summary_distance_scale(info) -> float:
    if info["scaled"]:
        return 1.0
    return float(np.sqrt(info["source_m"] / info["l"]))


# --- subcommand implementations -------------------------------------------

def _cmd_gen(args) -> int:
    spec = GenSpec(args.kind, args.n, args.m, args.seed, amp=args.amp)
    dataset = generate_dataset(spec)
    out = _out_path(args.out, ".bin")
    save_dataset(dataset, out)
    print(f"gen kind={args.kind} n={args.n} m={args.m} seed={args.seed} "
          f"amp={args.amp} out={out}")
    if args.queries:
        qset = gen_queries(spec, args.queries)
        qout = _out_path(args.queries_out or (str(out.with_suffix("")) + "_queries"), ".bin")
        save_dataset(qset, qout)
        print(f"gen kind={args.kind} n={args.queries} m={args.m} seed={args.seed} "
              f"domain=query out={qout}")
    return 0


def _cmd_summarize(args) -> int:
    dataset = load_dataset(_resolve(args.dataset, ".bin"))
    if args.kind == "paa":
        values = paa_rows(dataset.data, args.l)
        scaled, kind = False, "paa"
    elif args.kind == "dft-dea":
        values = dea_scale(dft_summarize_rows(dataset.data, args.l), dataset.m)
        scaled, kind = True, "dft-dea"
    else:  # trained embedding file
        if not args.embedding:
            raise UsageError("--embedding is required for --kind dea")
        emb, info = _load_summary_file(args.embedding)
        if info["n"] != dataset.n:
            raise SizeMismatch(f"embedding n={info['n']} but dataset n={dataset.n}")
        values = emb if info["scaled"] else dea_scale(emb, dataset.m)
        scaled, kind = True, "dea"
    out = _out_path(args.out, ".bin")
    save_summaries(values, out, source_length=dataset.m, scaled=scaled, kind=kind)
    print(f"summarize kind={kind} n={dataset.n} l={args.l} scaled={int(scaled)} out={out}")
    if args.sax_out:
        words = sax_from_paa(unit_scale(values, scaled, dataset.m), args.b)
        sax_path = _out_path(args.sax_out, ".sax")
        save_sax(words, args.b, sax_path)
        print(f"sax n={dataset.n} l={words.shape[1]} bits={args.b} out={sax_path}")
    return 0


def _cmd_sample(args) -> int:
    dataset = load_dataset(_resolve(args.dataset, ".bin"))
    if args.strategy == "seasam":
        indices = seasam(dataset, args.n_prime, l=args.l, bits=args.b)
        sample = SampleSet(indices, "seasam")
    else:
        indices = uniform_sample(dataset, args.n_prime, args.seed)
        sample = SampleSet(indices, "uniform", seed=args.seed)
    out = _out_path(args.out, ".idx")
    save_sample(sample, out)
    print(f"sample strategy={args.strategy} n_prime={args.n_prime} "
          f"seed={sample.seed} out={out}")
    return 0


def _build_tree(dataset, summary_path, bits, leaf_size):
    values, info = _load_summary_file(summary_path)
    if info["n"] != dataset.n:
        raise SizeMismatch(f"summary n={info['n']} but dataset n={dataset.n}")
    words = sax_from_paa(_quantization_values(values, info), bits)
    kind = "paa" if info.get("kind") == "paa" else "dea"
    tree = build(words, bits, leaf_size, dataset.m, summarization_kind=kind)
    return tree, values, info


def _cmd_index(args) -> int:
    dataset = load_dataset(_resolve(args.dataset, ".bin"))
    tree, _, info = _build_tree(dataset, args.summary, args.b, args.h)
    print(tree.stats_line())
    return 0


def _cmd_query(args) -> int:
    dataset = load_dataset(_resolve(args.dataset, ".bin"))
    queries = load_dataset(_resolve(args.queries, ".bin"))
    tree, _, info = _build_tree(dataset, args.summary, args.b, args.h)
    if tree.summarization_kind == "paa":
        qsums = paa_rows(queries.data, info["l"])
    else:
        if not args.query_summary:
            raise UsageError("--query-summary is required for dea trees")
        qvals, qinfo = _load_summary_file(args.query_summary)
        if qinfo["n"] != queries.n:
            raise SizeMismatch(f"query summary n={qinfo['n']} but queries n={queries.n}")
        qsums = _quantization_values(qvals, qinfo)
    budgets = args.budget

    def run_one(qid):
        lines = []
        q = queries.data[qid].astype(np.float64)
        if args.exact == "pruned":
            _, exact, _ = exact_query_pruned(tree, dataset.data, q)
        elif args.exact == "brute":
            _, exact, _ = exact_query_bruteforce(dataset.data, q)
        else:
            exact = None
        for budget in budgets:
            report = approx_query(tree, dataset.data, q, budget,
                                  query_summary=qsums[qid], qid=qid)
            report.exact_distance = exact
            lines.append(report.line())
        return lines

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(run_one, range(queries.n)))
    else:
        results = [run_one(qid) for qid in range(queries.n)]
    for lines in results:
        for line in lines:
            print(line)
    return 0


def _cmd_eval(args) -> int:
    reports: list[MetricReport] = []
    if args.measure == "chi":
        for scale_name, scale in (("1", 1.0), ("sqrt256m", np.sqrt(256 / args.m)),
                                  ("sqrt1m", np.sqrt(1 / args.m))):
            a = chi_stats_analytic(args.m, scale)
            reports.append(MetricReport("chi_mean_analytic", a.mean, 1,
                                        {"m": args.m, "scale": scale_name}))
            reports.append(MetricReport("chi_var_analytic", a.variance, 1,
                                        {"m": args.m, "scale": scale_name}))
            mc = chi_stats_montecarlo(args.m, scale, args.n_pairs, args.seed)
            reports.append(MetricReport("chi_mean_mc", mc.mean, args.n_pairs,
                                        {"m": args.m, "scale": scale_name}))
            reports.append(MetricReport("chi_var_mc", mc.variance, args.n_pairs,
                                        {"m": args.m, "scale": scale_name}))
    elif args.measure == "distdiff":
        dataset = load_dataset(_resolve(args.dataset, ".bin"))
        values, info = _load_summary_file(args.summary)
        sample = seasam(dataset, min(args.n_pairs, dataset.n), l=info["l"], bits=args.b)
        left, right = random_partners(sample, args.seed)
        diff = avg_distance_diff(dataset.data[left], dataset.data[right],
                                 values[left], values[right],
                                 summary_scale=_summary_distance_scale(info))
        reports.append(MetricReport("avg_distance_diff", diff, left.size,
                                    {"l": info["l"], "m": dataset.m,
                                     "kind": info.get("kind") or "dea"}))
    elif args.measure == "rms":
        dataset = load_dataset(_resolve(args.dataset, ".bin"))
        recon = load_dataset(_resolve(args.reconstruction, ".bin"))
        rms = reconstruction_rms(dataset.data, recon.data)
        reports.append(MetricReport("reconstruction_rms", rms, dataset.n,
                                    {"m": dataset.m}))
    elif args.measure == "nncoverage":
        dataset = load_dataset(_resolve(args.dataset, ".bin"))
        queries = load_dataset(_resolve(args.queries, ".bin"))
        values, info = _load_summary_file(args.summary)
        qvals, qinfo = _load_summary_file(args.query_summary)
        for k in args.k:
            cov = nn_coverage(dataset.data, queries.data, k, values, qvals)
            reports.append(MetricReport("nn_coverage", cov, queries.n,
                                        {"k": k, "l": info["l"], "m": dataset.m}))
    elif args.measure == "ideal":
        dataset = load_dataset(_resolve(args.dataset, ".bin"))
        queries = load_dataset(_resolve(args.queries, ".bin"))
        values, info = _load_summary_file(args.summary)
        qvals, qinfo = _load_summary_file(args.query_summary)
        curve = ideal_tightness_curve(dataset.data, queries.data, values, qvals,
                                      args.budget)
        for budget, tight in zip(args.budget, curve):
            reports.append(MetricReport("ideal_tightness", float(tight), queries.n,
                                        {"budget": budget, "l": info["l"]}))
    elif args.measure == "coverage":
        dataset = load_dataset(_resolve(args.dataset, ".bin"))
        words = sax_from_paa(paa_rows(dataset.data, args.l), args.b)
        tree = build(words, args.b, args.h, dataset.m)
        reports.extend(leaf_coverage_experiment(tree, dataset, args.sizes,
                                                args.seeds, l=args.l, bits=args.b))
    for report in reports:
        print(report.line())
    if args.csv:
        reports_to_csv(reports, args.csv)
        print(f"csv out={args.csv} rows={len(reports)}")
    return 0


def _cmd_stats(args) -> int:
    dataset = load_dataset(_resolve(args.dataset, ".bin"))
    print(f"n={dataset.n} m={dataset.m} znormalized={int(dataset.znormalized)} "
          f"seed={dataset.seed}")
    return 0


# --- parser -----------------------------------------------------------------

def _add_common(sp):
    sp.add_argument("--config", help="key=value file providing flag defaults")
    sp.add_argument("--threads", type=int,
                    default=int(os.environ.get("SEAIDX_THREADS", "1")),
                    help="bound on internal parallelism")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seaidx", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("--kind", required=True, choices=["randwalk", "f5", "f10"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--amp", type=float, default=10.0)
    p.add_argument("--queries", type=int, default=0,
                   help="also emit this many query series from a disjoint stream")
    p.add_argument("--queries-out")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("summarize", help="summaries (and optionally SAX words)")
    p.add_argument("--dataset", required=True)
    p.add_argument("--kind", required=True, choices=["paa", "dft-dea", "dea"])
    p.add_argument("--l", type=int, default=16)
    p.add_argument("--b", type=int, default=8)
    p.add_argument("--embedding", help="raw embedding file for --kind dea")
    p.add_argument("--sax-out", help="also write the quantized SAX words here")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_summarize)

    p = sub.add_parser("sample", help="draw a sample of series identifiers")
    p.add_argument("--dataset", required=True)
    p.add_argument("--strategy", required=True, choices=["seasam", "uniform"])
    p.add_argument("--n-prime", type=int, required=True)
    p.add_argument("--l", type=int, default=16)
    p.add_argument("--b", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("index", help="build a tree and print its stats line")
    p.add_argument("--dataset", required=True)
    p.add_argument("--summary", required=True)
    p.add_argument("--b", type=int, default=8)
    p.add_argument("--h", type=int, default=100)
    _add_common(p)
    p.set_defaults(func=_cmd_index)

    p = sub.add_parser("query", help="budgeted approximate queries over a tree")
    p.add_argument("--dataset", required=True)
    p.add_argument("--summary", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--query-summary", help="precomputed query summaries (dea trees)")
    p.add_argument("--b", type=int, default=8)
    p.add_argument("--h", type=int, default=100)
    p.add_argument("--budget", type=_int_list, required=True)
    p.add_argument("--exact", choices=["brute", "pruned", "none"], default="brute")
    _add_common(p)
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("eval", help="quality measures and distance statistics")
    p.add_argument("--measure", required=True,
                   choices=["chi", "distdiff", "rms", "nncoverage", "ideal", "coverage"])
    p.add_argument("--dataset")
    p.add_argument("--summary")
    p.add_argument("--queries")
    p.add_argument("--query-summary")
    p.add_argument("--reconstruction")
    p.add_argument("--m", type=int, default=256)
    p.add_argument("--l", type=int, default=16)
    p.add_argument("--b", type=int, default=8)
    p.add_argument("--h", type=int, default=100)
    p.add_argument("--k", type=_int_list, default=[1, 5, 10])
    p.add_argument("--budget", type=_int_list, default=[1, 10, 100])
    p.add_argument("--sizes", type=_int_list, default=[100, 1000])
    p.add_argument("--seeds", type=_int_list, default=[0])
    p.add_argument("--n-pairs", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv")
    _add_common(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("stats", help="describe a dataset file")
    p.add_argument("--dataset", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_stats)

    return parser


def _splice_config(argv: list[str]) -> list[str]:
    """Inject key=value config entries as flags ahead of explicit ones."""
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None or not argv:
        return argv
    injected = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        injected += [f"--{key.strip().replace('_', '-')}", value.strip()]
    return [argv[0]] + injected + argv[1:]


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_splice_config(argv))
    except OSError as exc:
        print(f"error=config {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error=usage {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error={type(exc).__name__} {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
