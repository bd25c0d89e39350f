import sys
from argparse import ArgumentParser
from typing import List, Optional

from twrc import __version__
from twrc.cli import commands
from twrc.helper.exceptions import CertificationError, TwrcError
from twrc.helper.regions import REGIONS
from twrc.helper.utils import parse_float, parse_float_list, parse_power_range, parse_seed, parse_tuple


class CliParser(ArgumentParser):
    """Usage errors are a single stderr line and exit code 2."""

    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message}\n")


def _positive_int(text) -> int:
    value = int(text)
    if value < 1:
        raise ValueError(text)
    return value


def _add_channel(parser: ArgumentParser, required: bool = True, p1=None, p2=None, pr=None, pr_required=None):
    pr_required = required if pr_required is None else pr_required
    group = parser.add_argument_group("channel")
    group.add_argument("--p1", type=parse_float, required=required and p1 is None, default=p1)
    group.add_argument("--p2", type=parse_float, required=required and p2 is None, default=p2)
    group.add_argument("--pr1", type=parse_float, required=pr_required and pr is None, default=pr)
    group.add_argument("--pr2", type=parse_float, required=pr_required and pr is None, default=pr)
    group.add_argument("--db", action="store_true", help="powers are given in dB")


def _add_common(parser: ArgumentParser, fmt: str = "json"):
    parser.add_argument("--format", choices=("csv", "json"), default=fmt)
    parser.add_argument("--tolerance", type=parse_float, default=None)


def build_parser() -> CliParser:
    parser = CliParser(prog="twrc", description="Gaussian two-way relay channel rate regions and protocol simulation")
    parser.add_argument("--version", action="version", version=f"twrc {__version__}")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=CliParser)

    region = groups.add_parser("region").add_subparsers(dest="command", required=True, parser_class=CliParser)
    member = region.add_parser("member", help="membership and slacks of one rate tuple")
    member.add_argument("--region", choices=REGIONS, required=True)
    member.add_argument("--tuple", dest="rates", type=parse_tuple, required=True)
    member.add_argument("--grid-k", type=_positive_int, default=None)
    _add_channel(member)
    _add_common(member)
    member.set_defaults(handler=commands.cmd_region_member)

    slice_ = region.add_parser("slice", help="region boundaries along rays of a 2-D slice")
    slice_.add_argument("--axes", default="r12,r21")
    slice_.add_argument("--fixed", default=None, help="e.g. r1r=0,r2r=0.1 (defaults to zeros)")
    slice_.add_argument("--resolution", type=int, default=16)
    slice_.add_argument("--regions", default=",".join(REGIONS))
    slice_.add_argument("--grid-k", type=_positive_int, default=None)
    _add_channel(slice_)
    _add_common(slice_, "csv")
    slice_.set_defaults(handler=commands.cmd_region_slice)

    gap = groups.add_parser("gap").add_subparsers(dest="command", required=True, parser_class=CliParser)
    sweep = gap.add_parser("sweep", help="certify random outer-bound boundary tuples")
    sweep.add_argument("--trials", type=int, required=True)
    sweep.add_argument("--seed", type=parse_seed, default=None)
    sweep.add_argument("--power-range", type=parse_power_range, default=None)
    sweep.add_argument("--shift", type=parse_float, default=0.5)
    sweep.add_argument("--workers", type=int, default=None)
    sweep.add_argument("--fixed-cfg", type=parse_tuple, default=None, help="p1,p2,pr1,pr2 for every trial")
    sweep.add_argument("--ray", type=parse_tuple, default=None, help="direction for every trial")
    _add_common(sweep)
    sweep.set_defaults(handler=commands.cmd_gap_sweep)

    witness = gap.add_parser("witness", help="half-bit certificate of one tuple")
    witness.add_argument("--tuple", dest="rates", type=parse_tuple, required=True)
    witness.add_argument("--shift", type=parse_float, default=0.5)
    _add_channel(witness, pr=0.0, pr_required=False)
    _add_common(witness)
    witness.set_defaults(handler=commands.cmd_gap_witness)

    sim = groups.add_parser("sim").add_subparsers(dest="command", required=True, parser_class=CliParser)
    run = sim.add_parser("run", help="end-to-end message recovery over random message sets")
    run.add_argument("--mode", choices=("genie", "awgn"), default="genie")
    run.add_argument("--q", type=int, required=True)
    run.add_argument("--n", type=int, required=True)
    run.add_argument("--trials", type=int, default=1)
    run.add_argument("--seed", type=parse_seed, default=None)
    run.add_argument("--rates", type=parse_tuple, default=None, help="operating point (defaults to the scheme-2 corner)")
    run.add_argument("--snr", type=parse_float, default=float("inf"), help="awgn mode SNR in dB")
    _add_channel(run, p1=3.5, p2=200.0, pr=200.0)
    _add_common(run)
    run.set_defaults(handler=commands.cmd_sim_run)

    ser = sim.add_parser("ser", help="relay symbol-error rates over an SNR sweep")
    ser.add_argument("--q", type=int, required=True)
    ser.add_argument("--n", type=int, required=True)
    ser.add_argument("--snrs", type=parse_float_list, required=True)
    ser.add_argument("--trials", type=int, default=1000)
    ser.add_argument("--seed", type=parse_seed, default=None)
    _add_channel(ser, p1=1.0, p2=100.0, pr=100.0)
    _add_common(ser, "csv")
    ser.set_defaults(handler=commands.cmd_sim_ser)

    serve = groups.add_parser("serve", help="HTTP JSON API")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.set_defaults(handler=commands.cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        result = args.handler(args)
    except CertificationError as e:
        print(f"twrc: certification failed: {e.detail}", file=sys.stderr)
        return 1
    except TwrcError as e:
        print(f"twrc: error: {e.detail}", file=sys.stderr)
        return 2
    if result.output:
        sys.stdout.write(result.output if result.output.endswith("\n") else result.output + "\n")
    return result.code

