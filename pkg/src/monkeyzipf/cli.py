"""Command-line recipes that regenerate the model's figures as CSV data.

Exit codes: 0 success, 2 validation error, 3 memory budget exceeded,
4 I/O error.

Seeding: a single ``--seed`` feeds every module; each module draws from
its own substream (see :mod:`monkeyzipf.rng`), so changing how many
messages are sampled never changes the keyboard, and vice versa.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from . import __version__
from . import ensemble as ens
from . import keyboard as kbd
from . import reporting as rep
from . import spacings as sp
from . import stats as st
from . import twitter as tw
from .budget import BudgetExceeded
from .corpus import CorpusDecodeError, TokenizerConfig, corpus_from_file
from .rng import prng_id

EXIT_OK, EXIT_VALIDATION, EXIT_BUDGET, EXIT_IO = 0, 2, 3, 4

DEFAULT_SEED = 2
FIGURE_K = 26
FIGURE_S = 0.18
FIGURE_TOP = sum(26**i for i in range(5))  # 475255 words of <= 4 letters
FIGURE2_DISTS = ("equal", "uniform", "beta32", "triangular")


# -- helpers ------------------------------------------------------------------

def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_spec(out: Path, args, **resolved) -> None:
    spec = {k: v for k, v in vars(args).items() if k != "func"}
    spec.update(resolved)
    spec["prng"] = prng_id()
    spec["versions"] = rep.versions()
    spec["argv"] = sys.argv[1:]
    (out / "spec.json").write_text(json.dumps(spec, indent=2, sort_keys=True, default=str) + "\n")


def _keyboard_from_args(args, K=None, s=None, dist=None) -> kbd.Keyboard:
    if getattr(args, "keyboard_file", None):
        with open(args.keyboard_file, encoding="utf-8") as fh:
            return kbd.load_keyboard(fh)
    K = K if K is not None else args.K
    s = s if s is not None else args.s
    if getattr(args, "spacings_file", None):
        d = sp.load_spacings(args.spacings_file)
        K = len(d.values)
    else:
        d = sp.SpacingDistribution.parse(dist or args.dist)
    return kbd.make_keyboard(sp.make_spacings(d, K, args.seed), s)


def _meta(args, kb: kbd.Keyboard | None = None, **extra) -> list[str]:
    return rep.meta_lines(keyboard=kb.fingerprint() if kb is not None else None,
                          seed=args.seed, **extra)


def _rank_csv(path, table: st.RankFrequencyTable, meta) -> None:
    rep.write_csv(path, st.RANK_TABLE_HEADER, table.rows(), meta)


def _say(args, text: str) -> None:
    if not args.quiet:
        print(text)


# -- subcommands --------------------------------------------------------------

def cmd_keyboard(args) -> int:
    kb = _keyboard_from_args(args)
    out = _outdir(args)
    res = kbd.solve_beta(kb)
    mu1, var1 = kbd.log_moments(kb)
    path = out / "keyboard.txt"
    with open(path, "w", encoding="utf-8") as fh:
        kbd.dump_keyboard(kb, fh)
    _write_spec(out, args, K=kb.K, fingerprint=kb.fingerprint())
    _say(args, rep.format_block({
        "K": kb.K, "s": kb.space, "beta": f"{res.beta:.10f}", "neg_beta": f"{-res.beta:.10f}",
        "residual": f"{res.residual:.3e}", "mean_log_letter": f"{kbd.mean_log_letter(kb):.10f}",
        "mu1": f"{mu1:.10f}", "sigma1_sq": f"{var1:.10f}", "keyboard_file": path,
    }))
    return EXIT_OK


def cmd_topk(args) -> int:
    kb = _keyboard_from_args(args)
    out = _outdir(args)
    top = ens.top_k(kb, args.k)
    ens.write_ranked_csv(out / "topk.csv", top, _meta(args, kb, k=args.k))
    summary = {"k": args.k, "beta": kbd.solve_beta(kb).beta}
    if args.k > args.fit_lo + 10:
        fit = st.fit_tail_slope(st.RankFrequencyTable.from_ranked(top), args.fit_lo,
                                min(args.fit_hi, args.k))
        summary.update(slope=fit.slope, r_squared=fit.r_squared, fit_range=fit.fit_range)
    _write_spec(out, args, fingerprint=kb.fingerprint())
    _say(args, rep.format_block(summary))
    return EXIT_OK


def _cutoff_outputs(args, kb, cut, out: Path, prefix: str) -> dict:
    meta = _meta(args, kb, n=cut.n)
    _rank_csv(out / f"{prefix}_ranks.csv", st.RankFrequencyTable.from_cutoff(cut), meta)
    census = st.length_law_check(cut)
    rep.write_csv(out / f"{prefix}_lengths.csv", st.LENGTH_TABLE_HEADER,
                  ((r.length, r.count, repr(r.mass), repr(r.mean_prob)) for r in census), meta)
    summary = {"N": cut.N, "length_law_ok": all(r.ok for r in census)}
    if args.m:
        summary["tail_mass"] = st.tail_mass(cut, min(args.m, cut.N))
    _, var1 = kbd.log_moments(kb)
    report = None
    if var1 > 0:
        report = st.normality_report(cut, kb, tuple(args.band))
        rep.write_csv(out / f"{prefix}_quantiles.csv", st.QUANTILE_TABLE_HEADER,
                      report.rows(), meta)
        summary["central_deviation"] = report.deviation
    if args.plot:
        from . import plotting
        plotting.rank_panels({f"length <= {cut.n}": st.RankFrequencyTable.from_cutoff(cut)},
                             out / f"{prefix}_ranks.png")
        if report is not None:
            plotting.quantile_plot(report, out / f"{prefix}_quantiles.png")
    return summary


def cmd_cutoff(args) -> int:
    kb = _keyboard_from_args(args)
    out = _outdir(args)
    cut = ens.enumerate_cutoff(kb, args.n)
    summary = _cutoff_outputs(args, kb, cut, out, "cutoff")
    _write_spec(out, args, fingerprint=kb.fingerprint())
    _say(args, rep.format_block(summary))
    return EXIT_OK


def cmd_figure2(args) -> int:
    out = _outdir(args)
    tables, fits, rows = {}, {}, []
    for name in FIGURE2_DISTS:
        t0 = time.perf_counter()
        kb = _keyboard_from_args(args, K=args.K, s=args.s, dist=name)
        beta = kbd.solve_beta(kb).beta
        table = st.RankFrequencyTable.from_ranked(ens.top_k(kb, args.k))
        _rank_csv(out / f"figure2_{name}.csv", table, _meta(args, kb, dist=name, k=args.k))
        hi = min(args.fit_hi, args.k)
        fit = st.fit_tail_slope(table, args.fit_lo, hi)
        ordinal = st.fit_tail_slope(table, args.fit_lo, hi, ties="ordinal")
        tables[name], fits[name] = table, fit.slope
        rows.append((name, kb.fingerprint(), repr(beta), repr(fit.slope), repr(fit.r_squared),
                     repr(ordinal.slope), args.fit_lo, hi))
        _say(args, f"{name:>10}: beta={beta:.4f} slope={fit.slope:.4f} "
                   f"(ordinal {ordinal.slope:.4f}) [{time.perf_counter() - t0:.1f}s]")
    rep.write_csv(out / "figure2_fits.csv",
                  ("dist", "keyboard", "beta", "slope", "r_squared", "slope_ordinal",
                   "rank_lo", "rank_hi"), rows, _meta(args))
    if args.plot:
        from . import plotting
        plotting.rank_panels(tables, out / "figure2.png", fits)
    _write_spec(out, args)
    return EXIT_OK


def cmd_figure3(args) -> int:
    out = _outdir(args)
    kb = _keyboard_from_args(args, dist="uniform")
    cut = ens.enumerate_cutoff(kb, args.n)
    summary = _cutoff_outputs(args, kb, cut, out, "figure3")
    _write_spec(out, args, fingerprint=kb.fingerprint())
    _say(args, rep.format_block(summary))
    return EXIT_OK


def convergence_rows(dists, Ks, s: float, seed: int) -> list[dict]:
    rows = []
    for name in dists:
        d = sp.SpacingDistribution.parse(name)
        for K in Ks:
            spc = sp.make_spacings(d, K, seed)
            kb = kbd.make_keyboard(spc, s)
            beta = kbd.solve_beta(kb).beta
            rows.append({"dist": name, "K": K, "mean_log_letter": kbd.mean_log_letter(kb),
                         "neg_beta": -beta, "beta": beta,
                         "shao_hahn": kbd.shao_hahn_statistic(spc)})
    return rows


def cmd_convergence(args) -> int:
    out = _outdir(args)
    rows = convergence_rows(args.dists, args.Ks, args.s, args.seed)
    cols = ("dist", "K", "mean_log_letter", "neg_beta", "beta", "shao_hahn")
    rep.write_csv(out / "convergence.csv", cols,
                  ([r[c] if isinstance(r[c], (str, int)) else repr(r[c]) for c in cols]
                   for r in rows), _meta(args, s=args.s))
    if args.plot:
        from . import plotting
        plotting.convergence_plot(rows, out / "convergence.png")
    _write_spec(out, args)
    for r in rows:
        _say(args, f"{r['dist']:>10} K={r['K']:>5}  mean_log_letter={r['mean_log_letter']:+.5f}"
                   f"  -beta={r['neg_beta']:+.5f}  shao_hahn={r['shao_hahn']:+.5f}")
    return EXIT_OK


def cmd_twitter(args) -> int:
    kb = _keyboard_from_args(args)
    out = _outdir(args)
    cfg = tw.TwitterConfig(kb, args.length, args.messages, args.seed, args.shards)
    res = tw.run_experiment(cfg, workers=args.workers)
    meta = _meta(args, kb, message_length=args.length, messages=args.messages, shards=args.shards)
    items = tw.ranked_words(res)
    rep.write_csv(out / "twitter_ranks.csv", ("rank", "word", "count", "log10_rank", "log10_value"),
                  ((r, ens.render_word(w), c, repr(math.log10(r)), repr(math.log10(c)))
                   for r, (w, c) in enumerate(items, start=1)), meta)
    summary = {"total_words": res.total_words, "discarded_nonwords": res.discarded_nonwords,
               "distinct_words": res.distinct_words, "parse_violations": res.parse_violations}
    rate, trials = tw.space_start_rate(res)
    summary["space_start_rate"] = rate
    if args.length - 1 <= args.max_population_n:
        lnre = tw.lnre_summary(res, ens.enumerate_cutoff(kb, args.length - 1))
        summary.update(zero_class=lnre.zero_class, mass_covered=lnre.mass_covered)
    block = rep.format_block(summary)
    (out / "twitter_summary.txt").write_text("\n".join(meta) + "\n" + block + "\n")
    if args.plot and items:
        from . import plotting
        plotting.rank_panels({"sample": tw.sample_rank_table(res)}, out / "twitter_ranks.png")
    _write_spec(out, args, fingerprint=kb.fingerprint())
    _say(args, block)
    return EXIT_OK


def cmd_corpus(args) -> int:
    out = _outdir(args)
    rules = TokenizerConfig(fold_case=not args.no_fold)
    tables = {}
    for path in args.files:
        ct = corpus_from_file(path, rules, skip_lines=args.skip_lines,
                              start_marker=args.start_marker, end_marker=args.end_marker)
        stem = Path(path).stem
        meta = rep.meta_lines(source=ct.source_name, tokens=ct.token_count, types=ct.type_count)
        rep.write_csv(out / f"corpus_{stem}.csv",
                      ("rank", "token", "count", "log10_rank", "log10_value"),
                      ((r, t, c, repr(math.log10(r)), repr(math.log10(c / ct.token_count)))
                       for r, t, c in ct.rows()), meta)
        line = f"{ct.source_name}: tokens={ct.token_count} types={ct.type_count}"
        if ct.type_count >= args.fit_hi:
            fit = st.fit_tail_slope(ct.table, args.fit_lo, args.fit_hi)
            line += f" slope[{args.fit_lo},{args.fit_hi}]={fit.slope:.4f}"
        tables[ct.source_name] = ct.table
        _say(args, line)
    if args.plot and tables:
        from . import plotting
        plotting.rank_panels(tables, out / "corpus.png")
    _write_spec(out, args)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in (0, 1)")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return v


def _add_keyboard_args(p, default_dist="uniform"):
    g = p.add_argument_group("keyboard")
    g.add_argument("--dist", default=default_dist,
                   choices=["equal", "uniform", "beta32", "triangular"])
    g.add_argument("--K", type=int, default=FIGURE_K, help="alphabet size (default 26)")
    g.add_argument("--s", type=_probability, default=FIGURE_S, help="space probability")
    g.add_argument("--spacings-file", help="one-column file of explicit spacings")
    g.add_argument("--keyboard-file", help="keyboard file written by the keyboard command")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--plot", action="store_true", help="also render PNG figures")
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="monkeyzipf", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keyboard", parents=[common], help="build a keyboard and report beta")
    _add_keyboard_args(p)
    p.set_defaults(func=cmd_keyboard)

    p = sub.add_parser("topk", parents=[common], help="top-k words of the infinite ensemble")
    _add_keyboard_args(p)
    p.add_argument("--k", type=_positive_int, default=FIGURE_TOP)
    p.add_argument("--fit-lo", type=int, default=100)
    p.add_argument("--fit-hi", type=int, default=100_000)
    p.set_defaults(func=cmd_topk)

    p = sub.add_parser("cutoff", parents=[common], help="all words of at most n letters")
    _add_keyboard_args(p)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=int, default=100_000, help="tail-mass rank cut")
    p.add_argument("--band", type=float, nargs=2, default=(0.25, 0.75))
    p.set_defaults(func=cmd_cutoff)

    p = sub.add_parser("figure2", parents=[common], help="rank tables for four keyboards")
    p.add_argument("--K", type=int, default=FIGURE_K)
    p.add_argument("--s", type=_probability, default=FIGURE_S)
    p.add_argument("--k", type=_positive_int, default=FIGURE_TOP)
    p.add_argument("--fit-lo", type=int, default=100)
    p.add_argument("--fit-hi", type=int, default=100_000)
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("figure3", parents=[common], help="cutoff ensemble, ranks and quantiles")
    p.add_argument("--K", type=int, default=FIGURE_K)
    p.add_argument("--s", type=_probability, default=FIGURE_S)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=int, default=100_000)
    p.add_argument("--band", type=float, nargs=2, default=(0.25, 0.75))
    p.set_defaults(func=cmd_figure3)

    p = sub.add_parser("convergence", parents=[common], help="beta and mean log letter over K")
    p.add_argument("--s", type=_probability, default=FIGURE_S)
    p.add_argument("--Ks", type=int, nargs="+", default=[8, 32, 128, 512, 2048])
    p.add_argument("--dists", nargs="+", default=["uniform", "beta32", "triangular", "equal"],
                   choices=["equal", "uniform", "beta32", "triangular"])
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("twitter", parents=[common], help="Monkey Twitter sampling run")
    _add_keyboard_args(p)
    p.add_argument("--length", type=_positive_int, default=5, help="characters per message")
    p.add_argument("--messages", type=_positive_int, default=100_000)
    p.add_argument("--shards", type=_positive_int, default=1)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--max-population-n", type=int, default=5,
                   help="skip the population comparison above this word length")
    p.set_defaults(func=cmd_twitter)

    p = sub.add_parser("corpus", parents=[common], help="rank-frequency tables of text files")
    p.add_argument("files", nargs="+")
    p.add_argument("--skip-lines", type=int, default=0)
    p.add_argument("--start-marker")
    p.add_argument("--end-marker")
    p.add_argument("--no-fold", action="store_true", help="keep letter case")
    p.add_argument("--fit-lo", type=int, default=10)
    p.add_argument("--fit-hi", type=int, default=1000)
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except CorpusDecodeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, kbd.SolverError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
