"""Command-line front end.

Exit codes: 0 success, 1 verification or I/O failure, 2 usage or domain
error, 3 transport failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

import numpy as np

from . import io as qio
from .equilibrium import gamma_for, nash_point, surface
from .errors import DomainError, TransportError
from .payoff import GameConfig, Strategy, monte_carlo
from .protocol import parse_alice, parse_bob, run_session, run_session_over_transport
from .protocol.session import alice_endpoint, bob_endpoint
from .protocol.transport import connect, listen_once
from .verify import GAIN_MODELS, run_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TRANSPORT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _number(text: str) -> float:
    try:
        return qio.parse_number(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _emit(text: str, out: str | None) -> None:
    """Write ``text`` to ``out`` (stdout when None or '-') in one step."""
    if out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qgamble-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_nash(args) -> int:
    if args.delta is not None:
        gamma = gamma_for(args.delta, args.r)
    else:
        gamma = args.gamma
    config = GameConfig(gamma, args.r)
    nash = nash_point(config)
    row = {
        "gamma": config.gamma,
        "r": config.r_gain,
        "alpha_star": nash.alpha_star,
        "beta_star": nash.beta_star,
        "delta": nash.delta,
    }
    if args.format == "csv":
        text = ",".join(row) + "\n" + ",".join(qio.fmt_float(v) for v in row.values()) + "\n"
    else:
        text = qio.dumps(row) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_surface(args) -> int:
    if args.grid < 2:
        raise UsageError(f"--grid must be at least 2, got {args.grid}")
    config = GameConfig(args.gamma, args.r)
    xs = np.linspace(0.0, 1.0, args.grid)
    text = qio.surface_csv(surface(config, xs, xs))
    _emit(text, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.n < 1:
        raise UsageError(f"--n must be at least 1, got {args.n}")
    config = GameConfig(args.gamma, args.r)
    s = monte_carlo(Strategy(args.alpha, args.beta), config, args.n, args.seed)
    f1, f2, f3 = s.frequencies
    row = {
        "p1_hat": f1,
        "p2_hat": f2,
        "p3_hat": f3,
        "mean_gain": s.mean,
        "stderr": s.stderr,
        "n": s.n,
        "seed": args.seed,
    }
    if args.format == "csv":
        text = ",".join(row) + "\n" + ",".join(str(v) if isinstance(v, int) else qio.fmt_float(v) for v in row.values()) + "\n"
    else:
        text = qio.dumps(row) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_protocol(args) -> int:
    if args.rounds < 1:
        raise UsageError(f"--rounds must be at least 1, got {args.rounds}")
    config = GameConfig(args.gamma, args.r)
    alice, bob = parse_alice(args.alice), parse_bob(args.bob)

    if args.connect:
        try:
            channel = connect(args.connect, args.timeout)
        except TransportError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_TRANSPORT
        try:
            settled = bob_endpoint(channel, config, alice, bob, args.rounds, args.seed)
        finally:
            channel.close()
        sys.stdout.write(qio.dumps({"role": "bob", "rounds_settled": settled}) + "\n")
        return EXIT_OK if settled == args.rounds else EXIT_TRANSPORT

    if args.listen:
        try:
            channel = listen_once(args.listen, args.timeout)
        except (TransportError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_TRANSPORT
        try:
            ledger = alice_endpoint(channel, config, alice, bob, args.rounds, args.seed)
        finally:
            channel.close()
    elif args.loopback:
        ledger = run_session_over_transport(config, alice, bob, args.rounds, args.seed, timeout=args.timeout)
    else:
        ledger = run_session(config, alice, bob, args.rounds, args.seed)

    if args.out:
        _emit(ledger.to_csv(), args.out)
    sys.stdout.write(qio.dumps(ledger.summary()) + "\n")
    return EXIT_TRANSPORT if ledger.transport_failed else EXIT_OK


def cmd_verify(args) -> int:
    if args.configs < 1:
        raise UsageError(f"--configs must be at least 1, got {args.configs}")
    if args.grid < 11:
        raise UsageError(f"--grid must be at least 11, got {args.grid}")
    results = run_all(args.configs, args.grid, args.seed, args.gain_model)
    lines = [r.line() for r in results]
    ok = all(r.passed for r in results)
    lines.append("verify: " + ("all suites passed" if ok else "FAILED"))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--seed", type=_seed, default=0)

    parser = _Parser(prog="qgamble", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("nash", parents=[common], help="Nash point for (gamma, R) or (delta, R)")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--gamma", type=_number)
    which.add_argument("--delta", type=_number)
    p.add_argument("--r", type=_number, required=True)
    p.set_defaults(func=cmd_nash)

    p = sub.add_parser("surface", parents=[common], help="G_b over a uniform (alpha, beta) grid, as CSV")
    p.add_argument("--gamma", type=_number, required=True)
    p.add_argument("--r", type=_number, required=True)
    p.add_argument("--grid", type=int, default=101)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimate of Bob's gain")
    p.add_argument("--gamma", type=_number, required=True)
    p.add_argument("--r", type=_number, required=True)
    p.add_argument("--alpha", type=_number, required=True)
    p.add_argument("--beta", type=_number, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("protocol", parents=[common], help="multi-round session between two agents")
    p.add_argument("--gamma", type=_number, required=True)
    p.add_argument("--r", type=_number, required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--alice", default="nash", help="nash | fixed:A | spotcheck:q=Q,alpha=A,penalty=P[,abort=1]")
    p.add_argument("--bob", default="nash", help="nash | fixed:B | liar:B")
    p.add_argument("--timeout", type=float, default=10.0)
    where = p.add_mutually_exclusive_group()
    where.add_argument("--listen", metavar="ADDR", help="host Alice's endpoint on HOST:PORT")
    where.add_argument("--connect", metavar="ADDR", help="run Bob's endpoint against HOST:PORT")
    where.add_argument("--loopback", action="store_true", help="run both endpoints over a local socket pair")
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suites over random configs")
    p.add_argument("--configs", type=int, default=20)
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--gain-model", choices=sorted(GAIN_MODELS), default="probability", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, UsageError) as exc:
        print(f"qgamble {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qgamble {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
