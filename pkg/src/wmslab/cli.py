"""Command-line front end: decode single instances, search thresholds, run
campaigns, generate codes, and certify decoding runs.

Exit codes: 0 success, 2 input/validation error, 3 algorithmic failure
(bracket or construction), 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import certify, channel as chan, de, msgpass, opt, sim, tanner

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ALGO = 3
EXIT_IO = 4


class CliError(Exception):
    def __init__(self, msg, code=EXIT_INPUT):
        super().__init__(msg)
        self.code = code


def _load_graph(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read code file: {exc}", EXIT_INPUT)
    try:
        return tanner.parse_alist(text)
    except tanner.AlistError as exc:
        raise CliError(f"bad alist {path}: {exc}", EXIT_INPUT)


def _load_llr(path, n):
    try:
        vals = np.loadtxt(path, ndmin=1)
    except OSError as exc:
        raise CliError(f"cannot read LLR file: {exc}", EXIT_INPUT)
    except ValueError as exc:
        raise CliError(f"bad LLR file {path}: {exc}", EXIT_INPUT)
    if len(vals) != n:
        raise CliError(f"LLR length {len(vals)} != code length {n}", EXIT_INPUT)
    return vals.astype(np.float64)


def _channel_spec(kind, param):
    try:
        if kind == "bsc":
            return chan.Bsc(p=param)
        if kind == "biawgn":
            return chan.Biawgn(sigma=param)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT)
    raise CliError(f"unknown channel {kind!r}", EXIT_INPUT)


def _gamma_from_args(args, graph):
    if args.llr:
        return _load_llr(args.llr, graph.n)
    if args.channel:
        if args.param is None:
            raise CliError("--param required with --channel")
        spec = _channel_spec(args.channel, args.param)
        zeros = np.zeros(graph.n, dtype=np.uint8)
        return chan.llr(spec, chan.sample(spec, zeros, args.seed))
    raise CliError("provide --llr FILE or --channel KIND --param P")


def _check_beta(beta):
    if not 0.0 <= beta <= 1.0:
        raise CliError(f"beta must lie in [0, 1], got {beta}")


def _result_json(graph, gamma, result, cert=None):
    out = {
        "status": result.status.value,
        "hard": [int(b) for b in result.hard],
        "is_codeword": bool(graph.is_codeword(result.hard)),
        "iters_run": result.iters_run,
        "tie": result.tie,
        "saturated": result.saturated,
        "consistency": result.consistency.to_dict(),
        "L0": result.L0,
        "L1": result.L1,
    }
    if cert is not None:
        out["certificate"] = json.loads(cert.to_json(graph))
    return out


def cmd_decode(args):
    graph = _load_graph(args.code)
    gamma = _gamma_from_args(args, graph)
    if args.algorithm == "trmp":
        rho = args.rho if args.rho is not None else msgpass.trmp_uniform_rho(graph)
        if not 0.0 < rho <= 1.0:
            raise CliError(f"rho must lie in (0, 1], got {rho}")
        hard, tie, state, iters = msgpass.run_trmp(graph, gamma, rho, args.iters)
        print(json.dumps({"status": "trmp", "hard": [int(b) for b in hard],
                          "is_codeword": bool(graph.is_codeword(hard)),
                          "iters_run": iters, "tie": tie, "rho": rho}, indent=2))
        return EXIT_OK
    _check_beta(args.beta)
    cfg = msgpass.DecoderConfig(beta=args.beta, max_iters=args.iters)
    result = msgpass.run(graph, gamma, cfg)
    cert = None
    if args.certify and result.status is msgpass.Status.CONVERGED:
        cert = certify.certify_ml(graph, gamma, result, args.beta)
    print(json.dumps(_result_json(graph, gamma, result, cert), indent=2))
    return EXIT_OK


def cmd_threshold(args):
    if args.beta is None:
        raise CliError("--beta required")
    _check_beta(args.beta)
    bracket = tuple(args.bracket) if args.bracket else None
    q = de.ThresholdQuery(dv=args.dv, dc=args.dc, beta=args.beta,
                          channel=args.channel, population=args.population,
                          bisect_tol=args.tol, bracket=bracket, seed=args.seed,
                          max_iters=args.de_iters)
    try:
        res = de.threshold(q)
    except de.BracketError as exc:
        print(f"bracket error: {exc}", file=sys.stderr)
        return EXIT_ALGO
    value = res.value if res.value is not None else res.flag
    print(f"dv={args.dv} dc={args.dc} beta={args.beta} "
          f"channel={args.channel} threshold={value}")
    if args.csv:
        rows = [{"dv": args.dv, "dc": args.dc, "beta": args.beta,
                 "channel": args.channel,
                 "param": "p" if args.channel == "bsc" else "sigma",
                 "threshold_or_flag": value, "N": args.population,
                 "iters": q.max_iters, "seed": args.seed}]
        try:
            with open(args.csv, "a") as fh:
                fh.write(de.curve_to_csv(rows))
        except OSError as exc:
            raise CliError(f"cannot write CSV: {exc}", EXIT_IO)
    return EXIT_OK


def _campaign_config(args):
    try:
        with open(args.config, "rb") as fh:
            conf = tomllib.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config: {exc}", EXIT_INPUT)
    except tomllib.TOMLDecodeError as exc:
        raise CliError(f"bad config: {exc}", EXIT_INPUT)
    # flags win on conflict
    if args.seed is not None:
        conf["seed"] = args.seed
    if args.out is not None:
        conf["out"] = args.out
    return conf


def cmd_campaign(args):
    conf = _campaign_config(args)
    kind = conf.get("kind")
    if kind not in ("wer", "census", "trmp", "conjecture"):
        raise CliError(f"config 'kind' must be wer/census/trmp/conjecture, got {kind!r}")
    if "code" in conf:
        graph = _load_graph(conf["code"])
    else:
        try:
            graph = tanner.build_regular_graph(
                conf["n"], conf["dv"], conf["dc"],
                girth_min=conf.get("girth", 4), seed=conf.get("graph_seed", 0))
        except KeyError as exc:
            raise CliError(f"config missing key {exc}")
        except tanner.GraphError as exc:
            raise CliError(str(exc))
        except tanner.ConstructionError as exc:
            raise CliError(str(exc), EXIT_ALGO)
    seed = conf.get("seed", 0)
    out = conf.get("out")
    try:
        if kind == "wer":
            decoders = [sim.DecoderSpec(d.get("algo", "wms"), d.get("param"),
                                        d.get("iters", 200))
                        for d in conf["decoders"]]
            campaign = sim.Campaign(
                graph=graph, channel_kind=conf.get("channel", "bsc"),
                grid=conf["grid"], decoders=decoders, trials=conf["trials"],
                master_seed=seed, out_dir=out,
                certify_runs=conf.get("certify", False))
            _, summary = sim.run_wer_campaign(campaign)
        elif kind == "census":
            res = sim.run_counterexample_census(
                graph, conf["p"], conf["beta"], conf.get("iters", 200),
                conf["blocks"], seed,
                random_codewords=conf.get("random_codewords", True))
            summary = [{"blocks": res.blocks,
                        "returned_codewords": res.returned_codewords,
                        "ml_agreements": res.ml_agreements,
                        "inconsistent": res.inconsistent,
                        "returned_fraction": res.returned_fraction}]
        elif kind == "trmp":
            _, summary = sim.run_trmp_comparison(
                graph, conf.get("channel", "bsc"), conf["grid"],
                conf["trials"], seed, out_dir=out)
        else:
            summary = sim.run_conjecture_probe(
                graph, conf["grid"], conf["trials"], seed,
                iters=conf.get("iters", 200))
    except KeyError as exc:
        raise CliError(f"config missing key {exc}")
    except OSError as exc:
        raise CliError(f"I/O failure: {exc}", EXIT_IO)
    if out:
        try:
            sim.summary_to_csv(summary, f"{out}/summary.csv")
        except OSError as exc:
            raise CliError(f"cannot write summary: {exc}", EXIT_IO)
    print(json.dumps(summary, indent=2, default=float))
    return EXIT_OK


def cmd_gencode(args):
    try:
        graph = tanner.build_regular_graph(args.n, args.dv, args.dc,
                                           girth_min=args.girth, seed=args.seed)
    except tanner.GraphError as exc:
        raise CliError(str(exc), EXIT_INPUT)
    except tanner.ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_ALGO
    try:
        with open(args.out, "w") as fh:
            fh.write(tanner.write_alist(graph))
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}", EXIT_IO)
    print(f"wrote {args.out} (n={graph.n}, m={graph.m}, girth>={args.girth})")
    return EXIT_OK


def cmd_certify(args):
    graph = _load_graph(args.code)
    gamma = _gamma_from_args(args, graph)
    _check_beta(args.beta)
    cfg = msgpass.DecoderConfig(beta=args.beta, max_iters=args.iters)
    result = msgpass.run(graph, gamma, cfg)
    cert = None
    delta = None
    if result.status is msgpass.Status.CONVERGED:
        cert = certify.certify_ml(graph, gamma, result, args.beta)
    elif (result.status is msgpass.Status.DIVERGENT_CONSISTENT
          and graph.regular and abs(args.beta - 1.0 / (graph.dv - 1)) < 1e-12):
        cert, delta, _ = certify.delta_reduction_certify(graph, gamma, cfg,
                                                         result=result)
    else:
        cert = certify.Certificate(
            kind="NotCertified",
            reason=f"status {result.status.value} not certifiable")
    out = _result_json(graph, gamma, result, cert)
    out["delta"] = delta
    print(json.dumps(out, indent=2))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="wmslab",
        description="Weighted min-sum LDPC decoding with optimality certificates")
    sub = p.add_subparsers(dest="cmd", required=True)

    def add_instance_flags(sp):
        sp.add_argument("--code", required=True, help="alist code file")
        sp.add_argument("--llr", help="newline-separated LLR values")
        sp.add_argument("--channel", choices=["bsc", "biawgn"],
                        help="sample an all-zeros transmission instead of --llr")
        sp.add_argument("--param", type=float,
                        help="channel parameter (p or sigma)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--iters", type=int, default=200)

    d = sub.add_parser("decode", help="decode one instance")
    add_instance_flags(d)
    d.add_argument("--algorithm", choices=["wms", "trmp"], default="wms")
    d.add_argument("--beta", type=float, default=0.5,
                   help="weight for the wms algorithm")
    d.add_argument("--rho", type=float,
                   help="TRMP edge-appearance probability (default uniform)")
    d.add_argument("--certify", action="store_true",
                   help="attach an ML certificate to converged runs")
    d.set_defaults(func=cmd_decode)

    t = sub.add_parser("threshold", help="density-evolution threshold search")
    t.add_argument("--dv", type=int, required=True)
    t.add_argument("--dc", type=int, required=True)
    t.add_argument("--beta", type=float, required=True)
    t.add_argument("--channel", choices=["bsc", "biawgn"], default="bsc")
    t.add_argument("--population", "-N", type=int, default=1_000_000)
    t.add_argument("--tol", type=float, default=5e-4,
                   help="bisection tolerance on the channel parameter")
    t.add_argument("--bracket", type=float, nargs=2,
                   help="low-noise and high-noise bracket ends")
    t.add_argument("--de-iters", type=int, default=500)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--csv", help="append the result row to this CSV file")
    t.set_defaults(func=cmd_threshold)

    c = sub.add_parser("campaign", help="run a simulation campaign from a TOML config")
    c.add_argument("--config", required=True)
    c.add_argument("--seed", type=int, help="override the config master seed")
    c.add_argument("--out", help="override the config output directory")
    c.add_argument("--jobs", type=int, default=1,
                   help="worker processes (trials are independent)")
    c.set_defaults(func=cmd_campaign)

    g = sub.add_parser("gencode", help="generate a random regular code")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--dv", type=int, required=True)
    g.add_argument("--dc", type=int, required=True)
    g.add_argument("--girth", type=int, default=4)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gencode)

    ce = sub.add_parser("certify", help="decode and certify one instance")
    add_instance_flags(ce)
    ce.add_argument("--beta", type=float, required=True)
    ce.set_defaults(func=cmd_certify)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches the input-error code
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except de.BracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ALGO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
