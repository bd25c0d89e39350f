import math
from dataclasses import asdict, replace
from typing import NamedTuple

import numpy as np

from twrc import LOGGER
from twrc.config import Settings
from twrc.helper.exceptions import DomainError, PreconditionError
from twrc.helper.gap_certifier import PowerSampler, certify_tuple, sweep_gap
from twrc.helper.protocol_sim import (
    SER_HEADER, SplitLayout, message_widths, noise_variance, random_message_set, run_protocol, ser_curve,
)
from twrc.helper.regions import (
    RATE_NAMES, ChannelConfig, RateTuple, boundary_slice, region_member, scheme2_point,
)
from twrc.helper.utils import csv_dumps, json_dumps, parse_float, versioned


class CommandResult(NamedTuple):
    code: int
    output: str


def channel_from_args(args) -> ChannelConfig:
    values = (args.p1, args.p2, args.pr1, args.pr2)
    return ChannelConfig.from_db(*values) if args.db else ChannelConfig(*values)


def seed_from_args(args) -> int:
    return Settings.seed() if args.seed is None else args.seed


def member_document(cfg: ChannelConfig, r: RateTuple, report) -> dict:
    return versioned({"command": "region member", "cfg": cfg.to_dict(), "tuple": r.to_dict(), **report.to_dict()})


def cmd_region_member(args) -> CommandResult:
    cfg = channel_from_args(args)
    r = RateTuple(*args.rates)
    report = region_member(args.region, cfg, r, args.tolerance, args.grid_k)
    if args.format == "json":
        output = json_dumps(member_document(cfg, r, report))
    else:
        output = csv_dumps(("region", "member", "label", "slack"),
                           [(args.region, report.member, s.label, s.value) for s in report.slacks])
    return CommandResult(0 if report.member else 1, output)


def parse_fixed(text, axes) -> dict:
    remaining = [name for name in RATE_NAMES if name not in axes]
    if not text:
        return {name: 0.0 for name in remaining}
    fixed = {}
    for part in text.split(","):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or name not in RATE_NAMES:
            raise DomainError(f"--fixed expects name=value pairs over {', '.join(RATE_NAMES)}, got {part!r}")
        fixed[name] = parse_float(value, name)
    return fixed


def slice_document(cfg: ChannelConfig, result) -> dict:
    return versioned({
        "command": "region slice",
        "cfg": cfg.to_dict(),
        "axes": list(result.axes),
        "fixed": dict(result.fixed),
        "diagnostic": result.diagnostic,
        "rows": [asdict(row) for row in result.rows],
    })


SLICE_HEADER = ("region", "ray", "angle", "axis1", "axis2", "extent", "on_boundary")


def cmd_region_slice(args) -> CommandResult:
    cfg = channel_from_args(args)
    axes = tuple(a.strip() for a in args.axes.split(","))
    regions = tuple(r.strip() for r in args.regions.split(",") if r.strip())
    result = boundary_slice(cfg, parse_fixed(args.fixed, axes), axes, args.resolution,
                            regions, args.tolerance, grid_k=args.grid_k)
    if args.format == "json":
        return CommandResult(0, json_dumps(slice_document(cfg, result)))
    rows = [(row.region, row.ray, row.angle, row.axis1, row.axis2, row.extent, row.on_boundary)
            for row in result.rows]
    return CommandResult(0, csv_dumps(SLICE_HEADER, rows))


def cmd_gap_sweep(args) -> CommandResult:
    base = PowerSampler(*args.power_range) if args.power_range else PowerSampler.from_settings()
    fixed_cfg = ChannelConfig(*args.fixed_cfg) if args.fixed_cfg else None
    sampler = replace(base, fixed_cfg=fixed_cfg, fixed_ray=args.ray)
    low, high = sampler.low, sampler.high
    summary = sweep_gap(sampler, args.trials, seed_from_args(args), args.shift,
                        args.tolerance, args.workers)
    document = versioned({"command": "gap sweep", **summary.to_dict()})
    if args.format == "json":
        output = json_dumps(document)
    else:
        output = csv_dumps(("trials", "failures", "max_needed_shift", "max_exchange_shift", "seed", "low", "high"),
                           [(summary.trials, summary.failures, summary.max_needed_shift,
                             summary.max_exchange_shift, summary.seed, low, high)])
    return CommandResult(0 if summary.failures == 0 else 1, output)


def cmd_gap_witness(args) -> CommandResult:
    cfg = channel_from_args(args)
    r = RateTuple(*args.rates)
    witness = certify_tuple(cfg, r, args.shift, args.tolerance)
    document = versioned({"command": "gap witness", "cfg": cfg.to_dict(), "tuple": r.to_dict(), **witness.to_dict()})
    if args.format == "json":
        return CommandResult(0, json_dumps(document))
    rows = [("alpha", witness.alpha), ("outer_alpha", witness.outer_alpha), ("delta", witness.delta),
            ("oriented", document["oriented"]), ("shift", witness.shift)]
    rows += [(f"shifted_{name}", value) for name, value in witness.shifted.to_dict().items()]
    return CommandResult(0, csv_dumps(("field", "value"), rows))


def cmd_sim_run(args) -> CommandResult:
    cfg = channel_from_args(args)
    if args.trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {args.trials}")
    if args.rates:
        rates = RateTuple(*args.rates)
    else:
        rates = scheme2_point(cfg)
        if args.mode == "awgn":
            # uncoded q-PAM carries at most log2(q) private bits per symbol
            cap = math.log2(max(args.q, 1))
            rates = rates.with_rates(r1r=min(rates.r1r, cap), r2r=min(rates.r2r, cap))
    layout = SplitLayout.from_widths(message_widths(rates, args.n))
    noise_var = noise_variance(args.snr)
    seed = seed_from_args(args)

    counts = {"relay_errors": 0, "source1_errors": 0, "source2_errors": 0, "errors": 0}
    for index in range(args.trials):
        rng = np.random.default_rng([seed, index])
        msgs = random_message_set(layout, rng)
        outcome = run_protocol(msgs, cfg, layout, args.q, args.n, args.mode, noise_var, rng, args.tolerance)
        counts["relay_errors"] += not (outcome.relay_w1r_ok and outcome.relay_w2r_ok)
        counts["source1_errors"] += not outcome.source1_ok
        counts["source2_errors"] += not outcome.source2_ok
        counts["errors"] += not outcome.success
    LOGGER.info(f"Simulated {args.trials} protocol runs, {counts['errors']} with errors")

    document = versioned({
        "command": "sim run", "mode": args.mode, "q": args.q, "n": args.n, "trials": args.trials,
        "seed": seed, "rates": rates.to_dict(), "widths": list(layout.widths),
        "delta_bits": layout.delta_bits, "snr": args.snr if args.mode == "awgn" else None, **counts,
    })
    if args.format == "json":
        output = json_dumps(document)
    else:
        output = csv_dumps(("mode", "q", "n", "trials", "errors", "relay_errors", "source1_errors",
                            "source2_errors", "seed"),
                           [(args.mode, args.q, args.n, args.trials, counts["errors"], counts["relay_errors"],
                             counts["source1_errors"], counts["source2_errors"], seed)])
    return CommandResult(0 if counts["errors"] == 0 else 1, output)


def cmd_sim_ser(args) -> CommandResult:
    cfg = channel_from_args(args)
    points = ser_curve(cfg, args.q, args.n, args.snrs, args.trials, seed_from_args(args))
    if args.format == "json":
        return CommandResult(0, json_dumps(versioned({
            "command": "sim ser", "cfg": cfg.to_dict(), "q": args.q, "n": args.n,
            "points": [p.to_dict() for p in points],
        })))
    return CommandResult(0, csv_dumps(SER_HEADER, [p.row() for p in points]))


def cmd_serve(args) -> CommandResult:
    from twrc.server import run_server
    run_server(args.host or Settings.HOST, args.port or Settings.PORT)
    return CommandResult(0, "")

