#!/usr/bin/env python3
"""WER and inconsistency-rate curves for weighted min-sum at several weights.

Produces one summary CSV per weight with Wilson intervals, suitable for
plotting WER (solid) against P(inconsistent) (dashed) per channel parameter.
"""

import argparse
import os

from wmslab import sim, tanner


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--dv", type=int, default=3)
    ap.add_argument("--dc", type=int, default=6)
    ap.add_argument("--girth", type=int, default=6)
    ap.add_argument("--betas", type=float, nargs="+", default=[0.5, 0.49])
    ap.add_argument("--grid", type=float, nargs="+",
                    default=[0.04, 0.05, 0.06, 0.07, 0.08])
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--iters", type=int, default=500)
    ap.add_argument("--seed", type=int, default=2026)
    ap.add_argument("--out", default="results/wer_consistency")
    args = ap.parse_args()

    graph = tanner.build_regular_graph(args.n, args.dv, args.dc,
                                       girth_min=args.girth, seed=1)
    os.makedirs(args.out, exist_ok=True)
    for beta in args.betas:
        camp = sim.Campaign(
            graph=graph, channel_kind="bsc", grid=args.grid,
            decoders=[sim.DecoderSpec("wms", beta, args.iters)],
            trials=args.trials, master_seed=args.seed,
            out_dir=os.path.join(args.out, f"beta{beta:g}"))
        _, summary = sim.run_wer_campaign(camp)
        path = os.path.join(args.out, f"summary_beta{beta:g}.csv")
        sim.summary_to_csv(summary, path)
        for r in summary:
            print(f"beta={beta:g} p={r['param']:g} wer={r['wer']:.4f} "
                  f"p_inconsistent={r['p_inconsistent']:.4f}")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
