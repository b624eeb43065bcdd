"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 budget exceeded, 4 internal
cross-check failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .cycle_polytope import (
    DEFAULT_CYCLE_BUDGET,
    DEFAULT_FACE_EDGE_BUDGET,
    contains,
    face_poset,
    parse_vector,
    polytope_dimension,
    polytope_of,
    vertices_to_csv,
)
from .errors import BudgetExceededError, CrossCheckError, InvalidInputError
from .multigraph import DirectedMultigraph, k_max, overlap_graph
from .perm_core import (
    Permutation,
    all_permutations,
    cocc_counts,
    decreasing,
    identity,
    inflate,
    occ_counts,
)
from .realization import mixing_inflation, superpermutation, target_sequence_of_size

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_CROSSCHECK = 4


@dataclass
class RunConfig:
    k: int | None = None
    budget_edges: int = DEFAULT_FACE_EDGE_BUDGET
    cycle_budget: int = DEFAULT_CYCLE_BUDGET
    seed: int = 0  # reserved; every algorithm here is deterministic
    output_format: str = "text"

    def validate(self) -> None:
        if self.k is not None and not 2 <= self.k <= k_max():
            raise InvalidInputError(f"k must satisfy 2 <= k <= {k_max()}, got {self.k}")
        if self.budget_edges < 1 or self.cycle_budget < 1:
            raise InvalidInputError("budgets must be positive")


def _approx(x: Fraction) -> str:
    return f"{float(x):.6g}"


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc


def _host(args) -> DirectedMultigraph:
    if args.graph:
        return DirectedMultigraph.from_json(_read(args.graph))
    if args.k is None:
        raise InvalidInputError("give either -k or --graph")
    return overlap_graph(args.k)


# ---------------------------------------------------------------------------
# commands


def cmd_graph(args, out) -> int:
    g = overlap_graph(args.k)
    if args.format == "json":
        out.write(g.to_json() + "\n")
    elif args.format == "dot":
        out.write(g.to_dot(f"Ov{args.k}"))
    elif args.format == "text":
        for e in g.edges:
            out.write(f"{e.src} -> {e.dst} [{e.display}]\n")
    else:
        raise InvalidInputError(f"format {args.format!r} not supported for graphs")
    return EXIT_OK


def cmd_polytope(args, out) -> int:
    cfg = RunConfig(args.k, args.budget_edges, args.cycle_budget, output_format=args.format)
    cfg.validate()
    g = _host(args)
    if args.action == "dim":
        dim = polytope_dimension(g)
        if args.verify:
            dim = polytope_of(g, cfg.cycle_budget).dim
        out.write(f"{dim}\n")
    elif args.action == "vertices":
        p = polytope_of(g, cfg.cycle_budget)
        if args.format == "csv":
            out.write(vertices_to_csv(p))
        elif args.format == "json":
            rows = [v.to_json_obj() for v in p.vertices]
            out.write(json.dumps({"dim": p.dim, "vertices": rows}, indent=2) + "\n")
        else:
            for c, v in zip(p.cycles, p.vertices):
                cyc = " ".join(g.edge(e).display for e in c.edges)
                coords = " ".join(str(x) for x in v.coords)
                line = f"({cyc}): {coords}"
                if args.approx:
                    line += "  # approx: " + " ".join(_approx(x) for x in v.coords)
                out.write(line + "\n")
    elif args.action == "faces":
        poset = face_poset(g, cfg.budget_edges)
        if args.format == "json":
            out.write(json.dumps(poset.to_json_obj(), indent=2) + "\n")
        else:
            for d, n in poset.rank_counts().items():
                out.write(f"dim {d}: {n}\n")
    elif args.action == "contains":
        if not args.vector:
            raise InvalidInputError("contains needs --vector FILE")
        v = parse_vector(g, _read(args.vector))
        m = contains(g, v)
        if args.format == "json":
            out.write(json.dumps(m.to_json_obj(g), indent=2) + "\n")
        elif m.inside:
            out.write("inside\n")
            for w, c in m.certificate:
                out.write(f"{w} * ({' '.join(g.edge(e).display for e in c.edges)})\n")
        else:
            out.write(f"outside: {m.violation}\n")
    return EXIT_OK


def cmd_superperm(args, out) -> int:
    RunConfig(args.k).validate()
    out.write(f"{superpermutation(args.k)}\n")
    return EXIT_OK


def _classical_sequence(spec: dict, size: int) -> Permutation:
    """``spec`` = {"permutation": tau, "block": "increasing"|"decreasing"}: tau with
    every entry blown up into a monotone block, total size at least ``size``."""
    if not isinstance(spec, dict) or "permutation" not in spec:
        raise InvalidInputError('classical file needs a "permutation" field')
    tau = Permutation.parse(str(spec["permutation"]))
    kind = spec.get("block", "increasing")
    if kind not in ("increasing", "decreasing"):
        raise InvalidInputError(f"block must be increasing or decreasing, got {kind!r}")
    b = max(1, -(-size // len(tau)))
    block = identity(b) if kind == "increasing" else decreasing(b)
    return inflate(tau, [block] * len(tau))


def _load_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: not valid JSON ({exc})") from exc


def cmd_converge(args, out) -> int:
    RunConfig(args.k).validate()
    g = overlap_graph(args.k)
    k = args.k
    if args.mix:
        classical_path, consecutive_path = args.mix
        classical = _load_json(classical_path)
        point = parse_vector(g, _read(consecutive_path))
    else:
        if not args.target:
            raise InvalidInputError("converge needs a target file or --mix")
        point = parse_vector(g, _read(args.target))
    if any(n < 1 for n in args.sizes):
        raise InvalidInputError("sizes must be positive")

    if not args.mix:
        header = ["size", "deviation", "bound"]
        out.write("\t".join(header + (["approx_deviation"] if args.approx else [])) + "\n")
        for n in args.sizes:
            r = target_sequence_of_size(point, n)
            row = [str(r.size), str(r.deviation), str(r.bound)]
            if args.approx:
                row.append(_approx(r.deviation))
            out.write("\t".join(row) + "\n")
        return EXIT_OK

    header = ["size", "occ_deviation", "occ_bound", "cocc_deviation", "cocc_bound"]
    out.write("\t".join(header + (["approx_occ", "approx_cocc"] if args.approx else [])) + "\n")
    for n in args.sizes:
        side = max(k, math.isqrt(n - 1) + 1)
        r1 = target_sequence_of_size(point, side)
        sigma1 = r1.permutation
        sigma2 = _classical_sequence(classical, side)
        sigma3 = mixing_inflation(sigma1, sigma2)
        N = len(sigma3)
        occ3 = occ_counts(sigma3, k)
        occ2 = occ_counts(sigma2, k)
        c_occ = math.comb(N, k)
        c_occ2 = math.comb(len(sigma2), k)
        occ_dev = max(abs(Fraction(occ3[p], c_occ) - Fraction(occ2[p], c_occ2)) for p in all_permutations(k))
        occ_bound = Fraction(k * (k - 1), 2 * len(sigma2))
        cc3 = cocc_counts(sigma3, k)
        cocc_dev = max(
            abs(Fraction(cc3.get(e.label, 0), N) - x) for e, x in zip(g.edges, point.coords)
        )
        cocc_bound = Fraction((len(sigma2) - 1) * k, N) + r1.bound
        row = [str(N), str(occ_dev), str(occ_bound), str(cocc_dev), str(cocc_bound)]
        if args.approx:
            row += [_approx(occ_dev), _approx(cocc_dev)]
        out.write("\t".join(row) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cyclepoly",
        description="Overlap graphs, cycle polytopes and consecutive-pattern realisations.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("graph", help="export the overlap graph of order k")
    g.add_argument("-k", type=int, required=True)
    g.add_argument("--format", choices=["json", "dot", "text"], default="json")
    g.set_defaults(func=cmd_graph)

    pp = sub.add_parser("polytope", help="vertices, dimension, faces or membership")
    src = pp.add_mutually_exclusive_group(required=True)
    src.add_argument("-k", type=int)
    src.add_argument("--graph", help="multigraph JSON file")
    pp.add_argument("action", choices=["vertices", "dim", "faces", "contains"])
    pp.add_argument("--format", choices=["json", "csv", "dot", "text"], default="text")
    pp.add_argument("--vector", help="point as JSON {edge: 'p/q'} or two-row CSV")
    pp.add_argument("--budget-edges", type=int, default=DEFAULT_FACE_EDGE_BUDGET)
    pp.add_argument("--cycle-budget", type=int, default=DEFAULT_CYCLE_BUDGET)
    pp.add_argument("--verify", action="store_true",
                    help="cross-check the dimension formula against the vertex rank")
    pp.add_argument("--approx", action="store_true",
                    help="append non-authoritative decimal approximations")
    pp.set_defaults(func=cmd_polytope)

    s = sub.add_parser("superperm", help="permutation with every k-pattern once as a window")
    s.add_argument("-k", type=int, required=True)
    s.set_defaults(func=cmd_superperm)

    c = sub.add_parser("converge", help="exact deviation tables for constructed sequences")
    c.add_argument("target", nargs="?", help="target point file (JSON or CSV)")
    c.add_argument("-k", type=int, required=True)
    c.add_argument("--sizes", type=int, nargs="+", required=True)
    c.add_argument("--mix", nargs=2, metavar=("CLASSICAL", "CONSECUTIVE"),
                   help="inflation mode: classical sequence spec and consecutive target")
    c.add_argument("--approx", action="store_true")
    c.set_defaults(func=cmd_converge)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except BudgetExceededError as exc:
        print(f"cyclepoly: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CrossCheckError as exc:
        print(f"cyclepoly: internal cross-check failed: {exc}", file=sys.stderr)
        return EXIT_CROSSCHECK
    except InvalidInputError as exc:
        parser.print_usage(sys.stderr)
        print(f"cyclepoly: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
