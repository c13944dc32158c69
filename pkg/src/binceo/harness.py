"""CLI entry point: configuration, seeded experiment orchestration, trial
repetition, and CSV emission.

Subcommands: bounds, optimize, simulate, sweep.  Exit codes: 0 success,
2 configuration/validation error, 3 infeasible optimization, 4 capacity
or runtime error.
"""

from __future__ import annotations

import argparse
import sys
import zlib
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import bounds as bounds_mod
from .binmath import ChainParams
from .bounds import InfeasibleRateError, TestChannelPair, bsc_bounds, mi_region_oracle
from .codec import encode_joint, encode_successive
from .decoders import (
    combined_prior,
    combined_syndrome,
    combined_syndrome_code,
    joint_sum_product_decode,
    reconstruct_soft,
    reconstruct_soft_successive,
    side_info_prior,
    sum_product_decode,
)
from .evaluate import (
    RunReport,
    csv_header,
    empirical_rates_joint,
    empirical_rates_successive,
    report_run,
    summary_row,
)
from .graphs import (
    DegreeDistribution,
    GraphConstructionError,
    build_anchor_compound,
    build_compound,
    default_ldgm_dist,
    default_ldpc_dist,
    design_rates,
)
from .oracles import CapacityError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_CAPACITY = 4

REFERENCE_TEST_CHANNEL_CASES = ((0.01, 0.01), (0.1, 0.1), (0.1, 0.3))


@dataclass
class ExperimentConfig:
    p1: float = 0.15
    p2: float = 0.15
    d1: float = 0.1
    d2: float = 0.1
    n: int = 10_000
    scheme: str = "both"
    trials: int = 1
    base_seed: int = 0
    biasprop_sweeps: int = 25
    sp_iters: int = 100
    jsp_local: int = 40
    jsp_global: int = 15
    # Quantizer rate margin (multiplicative, on 1 - h_b(d_i)).
    ldgm_margin: float = 0.05
    # Syndrome rate margin (multiplicative, on the per-link rate target
    # h_b(p*d) - h_b(d_i)) for the links that lean on side information:
    # successive link 1 and joint link 2.
    syndrome_margin: float = 0.22
    # Joint link 1 is an anchor: k - round(anchor_gamma * n) triangular
    # checks; the remaining information bits ride on the correlation.
    anchor_gamma: float = 0.025
    ldgm_fac_dist: dict[int, float] | None = None
    ldpc_fac_dist: dict[int, float] | None = None
    output: str = "-"

    def validate(self) -> None:
        for name in ("p1", "p2", "d1", "d2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 0.5:
                raise ValueError(f"{name} must be in [0, 0.5], got {v}")
        if self.n < 100:
            raise ValueError(f"n must be >= 100, got {self.n}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.scheme not in ("joint", "successive", "both"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.base_seed < 0:
            raise ValueError("base_seed must be non-negative")
        if self.ldgm_margin <= -1.0:
            raise ValueError("ldgm_margin must exceed -1")
        if self.syndrome_margin <= -1.0:
            raise ValueError("syndrome_margin must exceed -1")
        if not 0.0 <= self.anchor_gamma < 0.5:
            raise ValueError("anchor_gamma must be in [0, 0.5)")

    def ldgm_dist(self) -> DegreeDistribution:
        if self.ldgm_fac_dist is None:
            return default_ldgm_dist()
        return DegreeDistribution(var=None, fac=dict(self.ldgm_fac_dist))

    def ldpc_dist(self) -> DegreeDistribution:
        if self.ldpc_fac_dist is None:
            return default_ldpc_dist()
        return DegreeDistribution(var=None, fac=dict(self.ldpc_fac_dist))

    def chain(self) -> ChainParams:
        return ChainParams(d1=self.d1, p1=self.p1, p2=self.p2, d2=self.d2)


def component_seed(base_seed: int, tag: str, trial: int) -> int:
    """Deterministic per-component seed; distinct streams per (tag, trial)."""
    ss = np.random.SeedSequence([base_seed, trial, zlib.crc32(tag.encode())])
    return int(ss.generate_state(1)[0])


def parse_degree_dist(text: str) -> dict[int, float]:
    """Parse '1:0.1,5:0.4,8:0.5' into {1: 0.1, 5: 0.4, 8: 0.5}."""
    out: dict[int, float] = {}
    for item in text.split(","):
        deg, frac = item.split(":")
        out[int(deg)] = float(frac)
    return out


def load_config_file(path: str) -> dict[str, str]:
    """Flat 'key = value' lines; '#' starts a comment."""
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def config_from_sources(file_values: dict[str, str], args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    casts = {f.name: f.type for f in fields(ExperimentConfig)}
    for key, value in file_values.items():
        if key not in casts:
            raise ValueError(f"unknown config key {key!r}")
        if key in ("ldgm_fac_dist", "ldpc_fac_dist"):
            cfg = replace(cfg, **{key: parse_degree_dist(value)})
        elif key in ("scheme", "output"):
            cfg = replace(cfg, **{key: value})
        elif key in ("n", "trials", "base_seed", "biasprop_sweeps", "sp_iters",
                     "jsp_local", "jsp_global"):
            cfg = replace(cfg, **{key: int(value)})
        else:
            cfg = replace(cfg, **{key: float(value)})
    for f in fields(ExperimentConfig):
        cli_val = getattr(args, f.name, None)
        if cli_val is not None:
            cfg = replace(cfg, **{f.name: cli_val})
    cfg.validate()
    return cfg


# ----------------------------------------------------------------------
# Simulation pipeline


def _generate_source(cfg: ExperimentConfig, trial: int):
    rng_x = np.random.default_rng(component_seed(cfg.base_seed, "source", trial))
    rng_n1 = np.random.default_rng(component_seed(cfg.base_seed, "noise1", trial))
    rng_n2 = np.random.default_rng(component_seed(cfg.base_seed, "noise2", trial))
    x = rng_x.integers(0, 2, size=cfg.n, dtype=np.uint8)
    y1 = x ^ (rng_n1.random(cfg.n) < cfg.p1).astype(np.uint8)
    y2 = x ^ (rng_n2.random(cfg.n) < cfg.p2).astype(np.uint8)
    return x, y1, y2


def run_joint_trial(cfg: ExperimentConfig, trial: int) -> RunReport:
    x, y1, y2 = _generate_source(cfg, trial)
    chain = cfg.chain()
    tc = TestChannelPair(cfg.d1, cfg.d2)
    g1, g2, _, r2t = design_rates(cfg.p1, cfg.p2, cfg.d1, cfg.d2,
                                  cfg.ldgm_margin, 0.0)
    s2_rate = r2t * (1.0 + cfg.syndrome_margin)
    cc1 = build_anchor_compound(
        cfg.n, g1, cfg.anchor_gamma, cfg.ldgm_dist(),
        seed=component_seed(cfg.base_seed, "anchor-code1", trial))
    # Same seed tag as the successive scheme's link 2 so matched trials
    # quantize with identical codes where the schemes overlap.
    cc2 = build_compound(cfg.n, g2, s2_rate, cfg.ldgm_dist(), cfg.ldpc_dist(),
                         seed=component_seed(cfg.base_seed, "code2", trial))
    enc1, enc2, q1, q2 = encode_joint(
        cc1, cc2, y1, y2, tc,
        seed=component_seed(cfg.base_seed, "quant", trial),
        biasprop_sweeps=cfg.biasprop_sweeps,
    )
    comb1 = combined_syndrome_code(cc1)
    comb2 = combined_syndrome_code(cc2)
    res1, res2 = joint_sum_product_decode(
        comb1, comb2,
        combined_syndrome(cc1, enc1.syndrome),
        combined_syndrome(cc2, enc2.syndrome),
        q=chain.u1_to_u2,
        local_iters=cfg.jsp_local,
        global_iters=cfg.jsp_global,
        n_coupled=cfg.n,
    )
    u1_hat = res1.u_hat[: cfg.n]
    u2_hat = res2.u_hat[: cfg.n]
    recons = reconstruct_soft(u1_hat, u2_hat, chain)
    rates = empirical_rates_joint(cc1.ldpc.m, cc2.ldpc.m, cfg.n)
    return report_run(
        "joint", trial, x, recons, rates, tc, cfg.p1, cfg.p2,
        u1_hat, q1.quantized, u2_hat, q2.quantized,
        seeds=f"base={cfg.base_seed};trial={trial}",
    )


def run_successive_trial(cfg: ExperimentConfig, trial: int) -> RunReport:
    x, y1, y2 = _generate_source(cfg, trial)
    chain = cfg.chain()
    tc = TestChannelPair(cfg.d1, cfg.d2)
    g1, g2, r1t, r2t = design_rates(cfg.p1, cfg.p2, cfg.d1, cfg.d2,
                                    cfg.ldgm_margin, 0.0)
    s1_rate = r1t * (1.0 + cfg.syndrome_margin)
    cc1 = build_compound(cfg.n, g1, s1_rate, cfg.ldgm_dist(), cfg.ldpc_dist(),
                         seed=component_seed(cfg.base_seed, "succ-code1", trial))
    # Link 2 conveys its information bits directly; reuse the joint
    # scheme's link-2 quantizer so matched trials share u2 exactly.
    s2_rate = r2t * (1.0 + cfg.syndrome_margin)
    ldgm2 = build_compound(
        cfg.n, g2, s2_rate, cfg.ldgm_dist(), cfg.ldpc_dist(),
        seed=component_seed(cfg.base_seed, "code2", trial),
    ).ldgm
    enc, q1, q2 = encode_successive(
        cc1, ldgm2, y1, y2, tc,
        seed=component_seed(cfg.base_seed, "quant", trial),
        biasprop_sweeps=cfg.biasprop_sweeps,
    )
    u2 = ldgm2.encode(enc.info_bits2)  # bit-exact reconstruction of u2
    comb1 = combined_syndrome_code(cc1)
    prior = combined_prior(cc1, side_info_prior(u2, chain.u1_to_u2))
    res = sum_product_decode(
        comb1, combined_syndrome(cc1, enc.syndrome1), prior, max_iters=cfg.sp_iters
    )
    u1_hat = res.u_hat[: cfg.n]
    recons = reconstruct_soft_successive(u1_hat, u2, chain)
    rates = empirical_rates_successive(cc1.ldpc.m, ldgm2.k, cfg.n)
    return report_run(
        "successive", trial, x, recons, rates, tc, cfg.p1, cfg.p2,
        u1_hat, q1.quantized, u2, q2.quantized,
        seeds=f"base={cfg.base_seed};trial={trial}",
    )


def simulate(cfg: ExperimentConfig) -> str:
    """Run the configured trials and return the full CSV text."""
    lines = [csv_header()]
    schemes = ("joint", "successive") if cfg.scheme == "both" else (cfg.scheme,)
    for scheme in schemes:
        runner = run_joint_trial if scheme == "joint" else run_successive_trial
        reports = [runner(cfg, t) for t in range(cfg.trials)]
        lines.extend(r.csv_row() for r in reports)
        lines.append(summary_row(scheme, reports))
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# Subcommands


def _emit(text: str, output: str) -> None:
    if output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w") as fh:
            fh.write(text)


def cmd_bounds(args: argparse.Namespace) -> int:
    tc = TestChannelPair(args.d1, args.d2)
    closed = bsc_bounds(args.p1, args.p2, tc)
    oracle = mi_region_oracle(args.p1, args.p2, tc)
    print(f"{'quantity':<12}{'closed-form':>14}{'oracle':>14}")
    for name in ("r1", "r2", "sum_rate", "distortion"):
        print(f"{name:<12}{getattr(closed, name):>14.9f}{getattr(oracle, name):>14.9f}")
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    res = bounds_mod.optimize_test_channels(args.p1, args.p2, args.target_rate)
    print(f"d1* = {res.pair.d1:.6f}")
    print(f"d2* = {res.pair.d2:.6f}")
    print(f"distortion = {res.distortion:.9f}")
    print(f"sum_rate = {res.achieved_sum_rate:.9f}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    file_values = load_config_file(args.config) if args.config else {}
    cfg = config_from_sources(file_values, args)
    text = simulate(cfg)
    _emit(text, cfg.output)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    grid = [float(r) for r in args.rates.split(",")] if args.rates else []
    lines = ["# schema=binceo-sweep-v1", "series,sum_rate,distortion,d1,d2"]
    curve = bounds_mod.sweep_bound_curve(args.p1, args.p2, grid)
    for rate, dist in curve:
        res = bounds_mod.optimize_test_channels(args.p1, args.p2, rate)
        lines.append(f"bound,{rate!r},{dist!r},{res.pair.d1!r},{res.pair.d2!r}")
    if args.reference_cases:
        for d1, d2 in REFERENCE_TEST_CHANNEL_CASES:
            pt = bsc_bounds(args.p1, args.p2, TestChannelPair(d1, d2))
            lines.append(f"case,{pt.sum_rate!r},{pt.distortion!r},{d1!r},{d2!r}")
    if args.empirical:
        file_values = load_config_file(args.config) if args.config else {}
        cfg = config_from_sources(file_values, args)
        for scheme in ("joint", "successive") if cfg.scheme == "both" else (cfg.scheme,):
            runner = run_joint_trial if scheme == "joint" else run_successive_trial
            reports = [runner(cfg, t) for t in range(cfg.trials)]
            mean_rate = float(np.mean([r.empirical_sum_rate for r in reports]))
            mean_loss = float(np.mean([r.empirical_log_loss for r in reports]))
            lines.append(
                f"empirical-{scheme},{mean_rate!r},{mean_loss!r},{cfg.d1!r},{cfg.d2!r}"
            )
    _emit("\n".join(lines) + "\n", args.output or "-")
    return EXIT_OK


def _add_channel_args(p: argparse.ArgumentParser, default: float | None = 0.15) -> None:
    p.add_argument("--p1", type=float, default=default)
    p.add_argument("--p2", type=float, default=default)


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--d1", type=float, default=None)
    p.add_argument("--d2", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--scheme", choices=("joint", "successive", "both"), default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", dest="base_seed", type=int, default=None)
    p.add_argument("--biasprop-sweeps", dest="biasprop_sweeps", type=int, default=None)
    p.add_argument("--sp-iters", dest="sp_iters", type=int, default=None)
    p.add_argument("--jsp-local", dest="jsp_local", type=int, default=None)
    p.add_argument("--jsp-global", dest="jsp_global", type=int, default=None)
    p.add_argument("--ldgm-margin", dest="ldgm_margin", type=float, default=None)
    p.add_argument("--syndrome-margin", dest="syndrome_margin", type=float, default=None)
    p.add_argument("--anchor-gamma", dest="anchor_gamma", type=float, default=None)
    p.add_argument("--ldgm-fac-dist", dest="ldgm_fac_dist", type=parse_degree_dist,
                   default=None, help="e.g. 4:1.0")
    p.add_argument("--ldpc-fac-dist", dest="ldpc_fac_dist", type=parse_degree_dist,
                   default=None)
    p.add_argument("--output", default=None, help="output path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="binceo",
        description="Two-link binary CEO problem simulator (log-loss distortion).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="closed-form and oracle region point")
    _add_channel_args(p)
    p.add_argument("--d1", type=float, required=True)
    p.add_argument("--d2", type=float, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("optimize", help="min distortion at a fixed sum-rate")
    _add_channel_args(p)
    p.add_argument("--target-rate", type=float, required=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="run coding-scheme trials, emit CSV")
    _add_channel_args(p, default=None)
    _add_config_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="bound curve CSV, optional empirical points")
    _add_channel_args(p)
    p.add_argument("--rates", help="comma-separated sum-rate grid")
    p.add_argument("--reference-cases", action="store_true",
                   help="annotate the reference test-channel cases")
    p.add_argument("--empirical", action="store_true",
                   help="append simulated points for the configured setting")
    _add_config_args(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleRateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ValueError, GraphConstructionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
