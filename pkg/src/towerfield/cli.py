"""Command-line surface binding builders, the curves toolkit, and the
reduction procedures to files.

Every run is deterministic given its inputs: outputs are byte-identical
across repeated invocations, reports go to standard output, and problems go
to standard error with the exit-code contract `1` malformed input, `2`
verification failure, `3` inconclusive bounded reduction.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .constructions import BuildRecipe, ground_truth_to_text, run
from .curves import PAPER, TOY, genus, orbit_count, prime_sequence, rational_solutions
from .errors import TowerFieldError
from .presentation import dump, load, verify
from .reductions import (
    BOUNDED_SEARCH,
    INCONCLUSIVE,
    TranscendenceOracle,
    basis_from_c,
    basis_from_d,
    c_from_t,
    d_from_t,
    membership_via_basis,
    witness_to_text,
)
from .schedules import parse_chips, parse_phi, parse_schedule

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """Parser whose usage failures follow the exit-code contract (1)."""

    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _switch_policy(args) -> str:
    return TOY if args.toy else PAPER


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _require(args, names: tuple, mode: str) -> None:
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise ValueError(f"{mode} requires --{name}")


def _reject(args, names: tuple, mode: str) -> None:
    for name in names:
        if getattr(args, name.replace("-", "_")) is not None:
            raise ValueError(f"{mode} does not take --{name}")


def _cmd_primes(args) -> int:
    if args.count < 1:
        raise ValueError(f"--count must be >= 1, got {args.count}")
    policy = _switch_policy(args)
    values = [
        prime_sequence(i, policy, allow_slow=args.allow_slow) for i in range(args.count)
    ]
    print(" ".join(str(v) for v in values))
    return 0


def _cmd_curve(args) -> int:
    policy = _switch_policy(args)
    q = prime_sequence(args.index, policy, allow_slow=args.allow_slow)
    solutions = sorted(rational_solutions(args.index, policy))
    print(f"q {q}")
    print(f"genus {genus(q)}")
    print("rational solutions " + " ".join(f"({a},{b})" for a, b in solutions))
    print(f"orbit count {orbit_count(q)}")
    return 0


def _cmd_build(args) -> int:
    if args.kind == "edegree":
        _require(args, ("chip",), "build edegree")
        _reject(args, ("set",), "build edegree")
        recipe = BuildRecipe(
            kind="edegree",
            stages=args.stages,
            policy=args.policy,
            chip=parse_chips(_read(args.chip)),
        )
    else:
        _require(args, ("set",), f"build {args.kind}")
        _reject(args, ("chip",), f"build {args.kind}")
        recipe = BuildRecipe(
            kind=args.kind,
            stages=args.stages,
            policy=args.policy,
            members=parse_schedule(_read(args.set)),
        )
    presentation, truth = run(recipe)
    _write(args.out, dump(presentation))
    _write(args.truth, ground_truth_to_text(truth))
    return 0


def _cmd_build_copy(args) -> int:
    if args.kind == "upcone":
        _require(args, ("set", "target"), "build-copy upcone")
        _reject(args, ("phi",), "build-copy upcone")
        recipe = BuildRecipe(
            kind="upcone_copy",
            stages=args.stages,
            policy=args.policy,
            members=parse_schedule(_read(args.set)),
            replacements=parse_schedule(_read(args.target)),
        )
    else:
        _require(args, ("target", "phi"), "build-copy edegree")
        _reject(args, ("set",), "build-copy edegree")
        recipe = BuildRecipe(
            kind="edegree_copy",
            stages=args.stages,
            policy=args.policy,
            replacements=parse_schedule(_read(args.target)),
            phi=parse_phi(_read(args.phi)),
        )
    presentation, truth = run(recipe)
    _write(args.out, dump(presentation))
    _write(args.truth, ground_truth_to_text(truth))
    return 0


def _cmd_fork(args) -> int:
    recipe = BuildRecipe(
        kind="fork",
        stages=args.stages,
        policy=args.policy,
        curve_index=args.curve,
        prefix_stages=args.prefix_stages,
    )
    keep, collapse = run(recipe)
    _write(args.out_f, dump(keep))
    _write(args.out_e, dump(collapse))
    return 0


def _cmd_verify(args) -> int:
    target = _read(args.dump)
    earlier = _read(args.against) if args.against else None
    violations = verify(target, earlier=earlier)
    for violation in violations:
        print(violation, file=sys.stderr)
    return 0 if not violations else 2


def _oracle_for(args, mode: str) -> TranscendenceOracle:
    if args.oracle == "structural":
        _reject(args, ("degree", "height"), f"{mode} with the structural oracle")
        return TranscendenceOracle()
    _require(args, ("degree", "height"), f"{mode} with the bounded oracle")
    return TranscendenceOracle(
        source=BOUNDED_SEARCH, degree_bound=args.degree, height_bound=args.height
    )


def _cmd_reduce(args) -> int:
    presentation = load(_read(args.presentation))
    mode = args.mode

    if mode == "c-from-t":
        _require(args, ("curve",), mode)
        _reject(args, ("slot", "set", "target", "phi", "index"), mode)
        if args.oracle != "structural":
            raise ValueError("c-from-t needs the structural oracle")
        _reject(args, ("degree", "height"), mode)
        member = c_from_t(presentation, TranscendenceOracle(), args.curve)
        print("member" if member else "non-member")
        return 0

    if mode == "d-from-t":
        _require(args, ("slot",), mode)
        _reject(args, ("curve", "set", "target", "phi", "index"), mode)
        verdict = d_from_t(presentation, _oracle_for(args, mode), args.slot)
        if verdict is INCONCLUSIVE:
            print("inconclusive", file=sys.stderr)
            return 3
        print("member" if verdict else "non-member")
        return 0

    if mode == "basis-from-c":
        _require(args, ("set",), mode)
        _reject(args, ("curve", "slot", "target", "phi", "index", "degree", "height"), mode)
        basis = basis_from_c(presentation, parse_schedule(_read(args.set)))
        for idx, (_, slot, a, b) in zip(basis.emitted, basis.provenance):
            print(f"{idx} curve {slot} pair ({a},{b})")
        return 0

    if mode == "basis-from-d":
        _require(args, ("target", "phi"), mode)
        _reject(args, ("curve", "slot", "set", "index", "degree", "height"), mode)
        basis = basis_from_d(
            presentation, parse_schedule(_read(args.target)), parse_phi(_read(args.phi))
        )
        for idx, record in zip(basis.emitted, basis.provenance):
            print(f"{idx} " + " ".join(str(part) for part in record))
        return 0

    _require(args, ("set", "index", "degree", "height"), mode)
    _reject(args, ("curve", "slot", "target", "phi"), mode)
    basis = basis_from_c(presentation, parse_schedule(_read(args.set)))
    decision = membership_via_basis(
        presentation, basis, args.index, (args.degree, args.height)
    )
    if decision is INCONCLUSIVE:
        print("inconclusive", file=sys.stderr)
        return 3
    names = ("X",) + tuple(f"Y{i}" for i in range(decision.prefix_length))
    verdict = "member" if decision.member else "non-member"
    print(
        f"{verdict} prefix {decision.prefix_length} "
        f"witness {witness_to_text(decision.witness, names)}"
    )
    return 0


def _add_policy_switches(parser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--paper", action="store_true", help="paper prime policy (default)")
    group.add_argument("--toy", action="store_true", help="small-prime toy policy")
    parser.add_argument(
        "--allow-slow", action="store_true", help="permit the slow third-prime search"
    )


def _add_build_outputs(parser) -> None:
    parser.add_argument("--stages", type=int, required=True, help="stages to run")
    parser.add_argument(
        "--policy", choices=(PAPER, TOY), default=TOY, help="prime policy (default toy)"
    )
    parser.add_argument("--out", required=True, help="dump output path")
    parser.add_argument("--truth", required=True, help="classification sidecar path")


def _build_parser() -> _Parser:
    parser = _Parser(prog="towerfield", description=__doc__.splitlines()[0])
    subparsers = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    primes = subparsers.add_parser("primes", help="print the curve exponent sequence")
    primes.add_argument("--count", type=int, required=True, help="how many exponents")
    _add_policy_switches(primes)
    primes.set_defaults(handler=_cmd_primes)

    curve = subparsers.add_parser("curve", help="describe one curve of the family")
    curve.add_argument("--index", type=int, required=True, help="curve index")
    _add_policy_switches(curve)
    curve.set_defaults(handler=_cmd_curve)

    build = subparsers.add_parser("build", help="run a staged construction")
    build.add_argument("kind", choices=("singleton", "upcone", "edegree"))
    build.add_argument("--set", help="enumeration schedule file")
    build.add_argument("--chip", help="chip table file")
    _add_build_outputs(build)
    build.set_defaults(handler=_cmd_build)

    copy = subparsers.add_parser("build-copy", help="run a replacement construction")
    copy.add_argument("kind", choices=("upcone", "edegree"))
    copy.add_argument("--set", help="even-slot schedule file")
    copy.add_argument("--target", help="odd-slot replacement schedule file")
    copy.add_argument("--phi", help="convergence table file")
    _add_build_outputs(copy)
    copy.set_defaults(handler=_cmd_build_copy)

    fork = subparsers.add_parser("fork", help="build two branches over a shared prefix")
    fork.add_argument("--curve", type=int, required=True, help="curve of the shared pair")
    fork.add_argument("--prefix-stages", type=int, required=True, help="shared stages")
    fork.add_argument("--stages", type=int, required=True, help="total stages")
    fork.add_argument(
        "--policy", choices=(PAPER, TOY), default=TOY, help="prime policy (default toy)"
    )
    fork.add_argument("--out-f", required=True, help="kept-pair branch dump path")
    fork.add_argument("--out-e", required=True, help="collapsed-pair branch dump path")
    fork.set_defaults(handler=_cmd_fork)

    check = subparsers.add_parser("verify", help="check a dump's invariants")
    check.add_argument("dump", help="dump file to verify")
    check.add_argument("--against", help="earlier dump the facts must extend")
    check.set_defaults(handler=_cmd_verify)

    reduce_ = subparsers.add_parser("reduce", help="run a reduction over a dump")
    reduce_.add_argument(
        "mode",
        choices=("c-from-t", "d-from-t", "basis-from-c", "basis-from-d", "membership"),
    )
    reduce_.add_argument("--presentation", required=True, help="dump file to reduce")
    reduce_.add_argument("--curve", type=int, help="curve index (c-from-t)")
    reduce_.add_argument("--slot", type=int, help="odd-slot index (d-from-t)")
    reduce_.add_argument("--set", help="schedule file (basis-from-c, membership)")
    reduce_.add_argument("--target", help="replacement schedule file (basis-from-d)")
    reduce_.add_argument("--phi", help="convergence table file (basis-from-d)")
    reduce_.add_argument("--index", type=int, help="domain index (membership)")
    reduce_.add_argument("--degree", type=int, help="annihilator degree bound")
    reduce_.add_argument("--height", type=int, help="annihilator height bound")
    reduce_.add_argument(
        "--oracle",
        choices=("structural", "bounded"),
        default="structural",
        help="transcendence oracle flavor (d-from-t)",
    )
    reduce_.set_defaults(handler=_cmd_reduce)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (TowerFieldError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
