"""Command-line front end.

Subcommands: lk, writhe, acn, bracket, jones, distribution, trajectory.
Chain files are plain text (one ``x y z`` vertex per line, ``#`` comments, a
``closed``/``open`` header line per chain, blank lines between chains) or
JSON ({"closed": bool, "vertices": [[x, y, z], ...]} or a list of such).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import chain3d, finiteform, montecarlo
from .chain3d import PolyChain
from .laurent import LaurentPoly
from .montecarlo import BracketEstimate
from .sphere import DegenerateGeometryError

DEFAULT_SAMPLES = 100_000


class ChainFileError(ValueError):
    pass


def parse_chain_text(text: str, source: str = "<string>") -> list[PolyChain]:
    chains: list[PolyChain] = []
    vertices: list[list[float]] = []
    closed = False
    start_line = 1

    def flush(lineno):
        nonlocal vertices, closed
        if vertices:
            try:
                chains.append(PolyChain(np.array(vertices), closed))
            except ValueError as exc:
                raise ChainFileError(
                    f"{source}: chain starting near line {start_line}: {exc}"
                ) from exc
        vertices = []
        closed = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if vertices:
                flush(lineno)
            continue
        if line.lower() in ("closed", "open"):
            if vertices:
                raise ChainFileError(
                    f"{source}:{lineno}: '{line}' header must precede the chain vertices"
                )
            closed = line.lower() == "closed"
            start_line = lineno
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ChainFileError(
                f"{source}:{lineno}: expected three coordinates, got {len(fields)}"
            )
        try:
            vertices.append([float(f) for f in fields])
        except ValueError as exc:
            raise ChainFileError(f"{source}:{lineno}: {exc}") from exc
    flush(None)
    if not chains:
        raise ChainFileError(f"{source}: no chains found")
    return chains


def _chain_from_json(obj, source: str) -> PolyChain:
    try:
        return PolyChain(np.array(obj["vertices"], dtype=float), bool(obj.get("closed", False)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ChainFileError(f"{source}: bad chain object: {exc}") from exc


def parse_chain_file(path: str) -> list[PolyChain]:
    """Chains from a text or JSON file (format detected from the content)."""
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise ChainFileError(f"cannot read {path}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        obj = json.loads(text)
        if isinstance(obj, dict):
            return [_chain_from_json(obj, path)]
        return [_chain_from_json(o, path) for o in obj]
    return parse_chain_text(text, source=path)


def _exp_label(quarter: int) -> str:
    return str(Fraction(quarter, 4))


def _format_poly(poly: LaurentPoly, var: str, fmt: str, stderr: dict | None = None) -> str:
    if fmt == "json":
        payload = {"variable": var, "terms": poly.to_pairs()}
        if stderr is not None:
            payload["stderr"] = [[k, stderr[k]] for k in sorted(stderr, reverse=True)]
        return json.dumps(payload)
    lines = [poly.format(var)]
    if stderr is not None:
        err = ", ".join(
            f"{var}^({_exp_label(k)}): {stderr[k]:.2e}" for k in sorted(stderr, reverse=True)
        )
        lines.append(f"stderr  {err}")
    return "\n".join(lines)


def _estimate_json(est: BracketEstimate) -> str:
    return json.dumps(est.to_json_dict())


def _exact_supported(chain: PolyChain) -> bool:
    if chain.closed:
        return chain.n_edges <= 4
    return chain.n_edges <= 4


def _exact_bracket(chain: PolyChain) -> LaurentPoly:
    if chain.closed:
        if chain.n_edges == 3:
            return LaurentPoly.one()
        return finiteform.bracket_p4_closed(chain)
    if chain.n_edges <= 2:
        return LaurentPoly.one()
    if chain.n_edges == 3:
        return finiteform.bracket_e3(chain)
    return finiteform.bracket_e4(chain)[0]


def _exact_jones(chain: PolyChain) -> LaurentPoly:
    if chain.closed:
        return _exact_bracket(chain).substitute_t() if chain.n_edges == 3 else _closed_jones(chain)
    if chain.n_edges <= 3:
        return LaurentPoly.one()
    return finiteform.jones_e4(chain)


def _closed_jones(chain: PolyChain, seed: int = 0) -> LaurentPoly:
    """Jones of a closed chain from a single generic projection."""
    from .diagram import Degenerate, normalized_bracket, project

    for retry in range(64):
        xi = montecarlo.sample_direction(seed, 0, retry)
        diag = project(chain, xi)
        if not isinstance(diag, Degenerate):
            return normalized_bracket(diag).substitute_t()
    raise DegenerateGeometryError("no generic projection found for the closed chain")


def _resolve_exact(args, chain: PolyChain) -> bool:
    if args.exact and not _exact_supported(chain):
        print(
            f"warning: --exact supports at most 4 edges; chain has {chain.n_edges}, "
            "falling back to Monte-Carlo",
            file=sys.stderr,
        )
        return False
    if args.exact:
        return True
    return _exact_supported(chain) and not args.samples_given

def _verify_against_mc(chain, poly, args, jones: bool):
    est = (
        montecarlo.mc_jones(chain, args.samples, args.seed, variable="t")
        if jones
        else montecarlo.mc_bracket(chain, args.samples, args.seed)
    )
    bad = []
    for k in set(poly.support()) | set(est.mean.support()):
        diff = abs(poly.coeff(k) - est.mean.coeff(k))
        if diff > 3.0 * est.stderr.get(k, 0.0) + 1e-9:
            bad.append((k, diff))
    if bad:
        print(f"verify: FAILED at exponents {sorted(k for k, _ in bad)}", file=sys.stderr)
        return False
    print(f"verify: exact and Monte-Carlo agree within 3 sigma ({est.samples} samples)",
          file=sys.stderr)
    return True


def _cmd_lk(args) -> int:
    chains = parse_chain_file(args.input)
    if len(chains) != 2:
        raise ChainFileError(f"lk needs exactly 2 chains, file has {len(chains)}")
    value = chain3d.gauss_linking(chains[0], chains[1])
    print(json.dumps({"lk": value}) if args.format == "json" else f"lk = {value:.12g}")
    return 0


def _cmd_scalar(args, func, label) -> int:
    chains = parse_chain_file(args.input)
    rows = [{label: func(ch), "edges": ch.n_edges, "closed": ch.closed} for ch in chains]
    if args.format == "json":
        print(json.dumps(rows if len(rows) > 1 else rows[0]))
    else:
        for i, row in enumerate(rows):
            prefix = f"chain {i}: " if len(rows) > 1 else ""
            print(f"{prefix}{label} = {row[label]:.12g}")
    return 0


def _cmd_poly(args, jones: bool) -> int:
    chains = parse_chain_file(args.input)
    status = 0
    for i, chain in enumerate(chains):
        prefix = f"chain {i}: " if len(chains) > 1 else ""
        var = "t" if jones else "A"
        if args.variable:
            var = args.variable
        if _resolve_exact(args, chain):
            poly = _exact_jones(chain) if jones else _exact_bracket(chain)
            if jones and var == "A":
                print("warning: jones output uses t; ignoring --variable A", file=sys.stderr)
                var = "t"
            if not jones and var == "t":
                poly = poly.substitute_t()
            print(prefix + _format_poly(poly, var, args.format))
            if args.verify:
                if not _verify_against_mc(chain, poly, args, jones):
                    status = 1
            if args.eval_points:
                for x in args.eval_points:
                    print(f"{prefix}eval({var}={x:g}) = {poly.evaluate(x):.12g}")
        else:
            est = (
                montecarlo.mc_jones(chain, args.samples, args.seed, variable="t")
                if jones
                else montecarlo.mc_bracket(chain, args.samples, args.seed)
            )
            poly = est.mean
            if not jones and var == "t":
                poly = poly.substitute_t()
                est = BracketEstimate(
                    poly,
                    {-k // 4: v for k, v in est.stderr.items()},
                    est.samples,
                    est.rejected,
                    est.seed,
                    "t",
                )
            if args.format == "json":
                print(prefix + _estimate_json(est))
            else:
                print(prefix + _format_poly(poly, var, args.format, est.stderr))
            if args.eval_points:
                for x in args.eval_points:
                    print(f"{prefix}eval({var}={x:g}) = {poly.evaluate(x):.12g}")
    return status


def _cmd_distribution(args) -> int:
    chains = parse_chain_file(args.input)
    for i, chain in enumerate(chains):
        dist = montecarlo.mc_distribution(chain, args.samples, args.seed)
        rows = [
            {"class": cls, "writhe": wr, "p": p, "stderr": se}
            for (cls, wr), (p, se) in sorted(dist.entries.items())
        ]
        if args.format == "json":
            print(json.dumps({"chain": i, "samples": dist.samples,
                              "rejected": dist.rejected, "entries": rows}))
        else:
            prefix = f"chain {i}: " if len(chains) > 1 else ""
            for row in rows:
                print(f"{prefix}P({row['class']}, wr={row['writhe']:+d}) = "
                      f"{row['p']:.6f} +- {row['stderr']:.6f}")
    return 0


def _trajectory_row(args, idx, chain):
    exact = _resolve_exact(args, chain)
    rejected_rate = 0.0
    if exact:
        poly = _exact_jones(chain) if args.traj_variable == "t" else _exact_bracket(chain)
    else:
        est = (
            montecarlo.mc_jones(chain, args.samples, args.seed, variable="t")
            if args.traj_variable == "t"
            else montecarlo.mc_bracket(chain, args.samples, args.seed)
        )
        poly = est.mean
        rejected_rate = est.rejected / max(1, est.samples)
    p21 = ""
    if not chain.closed and chain.n_edges == 4:
        try:
            p21 = f"{finiteform.p_k21(chain)[0]:.9g}"
        except (DegenerateGeometryError, finiteform.FiniteFormError):
            p21 = "nan"
    return {
        "frame": idx,
        "poly": poly,
        "writhe": chain3d.writhe(chain),
        "acn": chain3d.acn(chain),
        "p_k21": p21,
        "rejected_rate": rejected_rate,
    }


def _cmd_trajectory(args) -> int:
    frames = parse_chain_file(args.input)
    n_vertices = {ch.n_vertices for ch in frames}
    flags = {ch.closed for ch in frames}
    if len(n_vertices) != 1 or len(flags) != 1:
        raise ChainFileError("trajectory frames must share vertex count and open/closed flag")
    rows = [_trajectory_row(args, i, ch) for i, ch in enumerate(frames)]
    support = sorted({k for row in rows for k in row["poly"].support()}, reverse=True)
    var = args.traj_variable
    if args.format == "json":
        for row in rows:
            print(json.dumps({
                "frame": row["frame"],
                "variable": var,
                "terms": row["poly"].to_pairs(),
                "writhe": row["writhe"],
                "acn": row["acn"],
                "p_k21": row["p_k21"],
                "rejected_rate": row["rejected_rate"],
            }))
        return 0
    header = ["frame"] + [f"term:{_exp_label(k)}" for k in support]
    header += [f"eval:{x:g}" for x in args.eval_points or []]
    header += ["writhe", "acn", "p_k21", "rejected_rate"]
    print(",".join(header))
    for row in rows:
        cells = [str(row["frame"])]
        cells += [f"{row['poly'].coeff(k):.9g}" for k in support]
        cells += [f"{row['poly'].evaluate(x):.9g}" for x in (args.eval_points or [])]
        cells += [f"{row['writhe']:.9g}", f"{row['acn']:.9g}", row["p_k21"],
                  f"{row['rejected_rate']:.3g}"]
        print(",".join(cells))
    return 0


def _add_common(p: argparse.ArgumentParser, mc: bool = True):
    p.add_argument("input", help="chain file (text or JSON)")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    if mc:
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                       help=f"Monte-Carlo sample count (default {DEFAULT_SAMPLES})")
        p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
        p.add_argument("--exact", action="store_true",
                       help="force the finite forms (chains of at most 4 edges)")
        p.add_argument("--verify", action="store_true",
                       help="cross-check the exact result against Monte-Carlo")
        p.add_argument("--variable", choices=("A", "t"), default=None)
        p.add_argument("--eval", dest="eval_points", type=_parse_floats, default=None,
                       metavar="X1,X2,...", help="also evaluate at these variable values")


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="openknot",
        description="Entanglement measures of open and closed polygonal curves",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lk", help="Gauss linking number of two chains")
    p.add_argument("input")
    p.add_argument("--format", choices=("text", "json"), default="text")

    for name, help_text in (("writhe", "writhe of each chain"),
                            ("acn", "average crossing number of each chain")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("bracket", help="projection-averaged bracket polynomial")
    _add_common(p)
    p = sub.add_parser("jones", help="projection-averaged Jones polynomial (variable t)")
    _add_common(p)

    p = sub.add_parser("distribution", help="empirical (knotoid class, writhe) law")
    p.add_argument("input")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("trajectory", help="per-frame polynomial time series (CSV)")
    _add_common(p)
    p.add_argument("--traj-variable", choices=("A", "t"), default="t",
                   help="polynomial reported per frame (default t)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if hasattr(args, "samples"):
        if args.samples < 100:
            print("error: --samples must be at least 100", file=sys.stderr)
            return 2
        args.samples_given = "--samples" in (argv if argv is not None else sys.argv[1:])
    try:
        if args.command == "lk":
            return _cmd_lk(args)
        if args.command == "writhe":
            return _cmd_scalar(args, chain3d.writhe, "writhe")
        if args.command == "acn":
            return _cmd_scalar(args, chain3d.acn, "acn")
        if args.command == "bracket":
            return _cmd_poly(args, jones=False)
        if args.command == "jones":
            return _cmd_poly(args, jones=True)
        if args.command == "distribution":
            return _cmd_distribution(args)
        if args.command == "trajectory":
            return _cmd_trajectory(args)
    except ChainFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegenerateGeometryError as exc:
        print(f"error: degenerate geometry: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
