"""Command line interface: ``specseq <command> ...``.

Exit status 0 on success, 1 on mathematical errors, 2 on malformed input.
"""
from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

from .derived import codegree_of_purity, double_ext_ss, jordan_bicomplex, purity_filtration, \
    tor_ext_ss
from .functors import grade
from .genmor import LiftingError
from .groebner import GroebnerLimitExceeded
from .matrix import Mat, parse_matrix
from .modules import FPModule, fitting_ideal, rank
from .rings import ParseError, parse_ring
from .serialization import (dumps, filtration_to_json, load_bicomplex, load_filtration, load_module,
                            matrix_to_json, module_to_json)
from .spectral import render_sheets, render_spectral_sequence, spectral_sequence_bicomplex
from .triangulation import InvalidFiltration, isomorphism_of_filtration, verify_isomorphism

__all__ = ["main", "parse_matrix", "render_spectral_sequence", "format_tuple", "monic"]


# --------------------------------------------------------------------------
# formatting helpers

def format_tuple(t) -> str:
    """``[ 1, 1 ]`` style; infinity as ``infinity``."""
    if t == math.inf:
        return "infinity"
    return "[ " + ", ".join(str(a) for a in t) + " ]"


def _format_ideal(I) -> str:
    B = I.basis()
    fmt = I.ring.format
    return "< " + ", ".join(fmt(B[i, 0]) for i in range(B.nrows)) + " >"


def monic(a):
    """Scale a polynomial so that its leading coefficient is one."""
    if not a.terms:
        return a
    return a.scale(1 / a.lc())


def _matrix_block(A: Mat) -> str:
    return A.pretty()


def _count(n, word):
    return f"{n} {word}" + ("" if n == 1 else "s")


def _part_line(P: FPModule) -> str:
    if P.is_zero():
        return "zero module"
    bits = [f"{_count(P.ngens, 'generator')}, {_count(P.nrels, 'relation')}", f"rank {rank(P)}",
            f"grade {grade(P)}"]
    if P.ngens == 1:
        bits.append(f"{P.ring}/{_format_ideal(fitting_ideal(P, 0))}")
    return ", ".join(bits)


# --------------------------------------------------------------------------
# commands

def _cmd_purity(args):
    M = load_module(args.module)
    rep = purity_filtration(M)
    tp = isomorphism_of_filtration(rep.filtration, M) if rep.filtration.degrees else None
    if args.json:
        out = rep.summary()
        out["rank"] = rank(M)
        out["codegree"] = rep.codegree()
        for c, P in rep.parts.items():
            if not P.is_zero():
                out["parts"][-c]["fitting0"] = [str(e) for e in fitting_ideal(P, 0).basis().entries()]
                out["parts"][-c]["rank"] = rank(P)
        if tp is not None:
            out["triangular"] = {
                "matrix": matrix_to_json(tp.matrix), "iso": matrix_to_json(tp.iso.matrix),
                "blocks": [{"degree": p, "rows": list(r), "cols": list(c)} for p, _, r, c in tp.blocks],
                "verified": verify_isomorphism(tp.matrix, tp.iso.matrix, M),
            }
        print(dumps(out))
        return 0
    kind = "pure" if rep.is_pure else "non-pure"
    print(f"purity filtration with degrees [ {rep.degrees[0]} .. {rep.degrees[-1]} ] of a {kind} "
          f"rank {rank(M)} module")
    for c in sorted(rep.parts):
        P = rep.parts[c]
        tag = ""
        if not P.is_zero():
            tag = f", codegree {format_tuple(rep.codegrees[c])}"
        print(f"  {-c:>2}: {_part_line(P)}{tag}")
    print(f"codegree of purity: {format_tuple(rep.codegree())}")
    if tp is not None:
        print("\ntriangular presentation:")
        print(_matrix_block(tp.matrix))
        print("\nisomorphism onto the module:")
        print(_matrix_block(tp.iso.matrix))
    return 0


def _filtration_lines(fs):
    lines = [f"{fs.direction} filtration with degrees [ {fs.degrees[0]} .. {fs.degrees[-1]} ]"]
    for p in fs.ordered()[::-1] if fs.direction == "ascending" else fs.ordered():
        P = fs.graded_part(p)
        desc = "zero module" if P.is_zero() else f"{_count(P.ngens, 'generator')}, {_count(P.nrels, 'relation')}"
        lines.append(f"  {p:>2}: {desc}")
    return lines


def _grothendieck_output(res, args):
    if args.json:
        out = {"grids": res.render(), "filtration": filtration_to_json(res.filtration)}
        print(dumps(out))
        return 0
    print(res.render(), end="")
    print()
    print("\n".join(_filtration_lines(res.filtration)))
    return 0


def _cmd_ext_ext(args):
    M = load_module(args.M)
    L = load_module(args.L)
    return _grothendieck_output(double_ext_ss(M, L, args.degree), args)


def _cmd_tor_ext(args):
    M = load_module(args.M)
    N = load_module(args.N)
    return _grothendieck_output(tor_ext_ss(M, N, args.degree, route=args.route), args)


def _cmd_codegree(args):
    M = load_module(args.module)
    c = codegree_of_purity(M)
    if args.json:
        print(dumps({"codegree": c}))
    else:
        print(format_tuple(c))
    return 0


def _cmd_jordan(args):
    ring = parse_ring("QQ[x]")
    try:
        lam = Fraction(args.lam)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {args.lam!r}") from None
    B = jordan_bicomplex(ring, lam, args.size)
    first = spectral_sequence_bicomplex(B, "first")
    second = spectral_sequence_bicomplex(B, "second")
    arrows = []
    for s in second.sheets:
        for k in s.nonzero_arrows():
            A = s.arrows[k].matrix
            arrows.append((s.level, k, A))
    if args.json:
        out = {"grids": render_spectral_sequence(second, True, first),
               "arrows": [{"level": r, "source": list(k),
                           "matrix": [ring.format(monic(a)) for a in A.entries()]}
                          for r, k, A in arrows if r >= 1]}
        print(dumps(out))
        return 0
    print(render_spectral_sequence(second, True, first), end="")
    for r, k, A in arrows:
        if r >= 1:
            ents = ", ".join(ring.format(monic(a)) for a in A.entries())
            print(f"level {r} arrow at {k}: [ {ents} ] (monic)")
    return 0


def _cmd_ss(args):
    B = load_bicomplex(args.bicomplex)
    E = spectral_sequence_bicomplex(B, args.which)
    text = render_sheets(E)
    if args.json:
        print(dumps({"grids": text, "stable_level": E.stable_level}))
    else:
        print(text, end="")
    return 0


def _cmd_triangulate(args):
    M = load_module(args.module)
    fs = load_filtration(args.filtration)
    tp = isomorphism_of_filtration(fs, M)
    ver = verify_isomorphism(tp.matrix, tp.iso.matrix, M)
    if args.json:
        print(dumps({"matrix": matrix_to_json(tp.matrix), "iso": matrix_to_json(tp.iso.matrix),
                     "blocks": [{"degree": p, "rows": list(r), "cols": list(c)}
                                for p, _, r, c in tp.blocks],
                     "verified": ver, "module": module_to_json(M)}))
        return 0
    print(_matrix_block(tp.matrix))
    print()
    print(_matrix_block(tp.iso.matrix))
    for p, _, r, c in tp.blocks:
        print(f"degree {p}: rows {r[0]}..{r[1]}, cols {c[0]}..{c[1]}")
    print("verified: " + ", ".join(f"{k}={v}" for k, v in ver.items()))
    return 0


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="specseq", description="Spectral sequences and filtrations "
                                 "of finitely presented modules.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--json", action="store_true", help="machine readable output")
        p.set_defaults(fn=fn)
        return p

    p = add("purity", _cmd_purity, "purity filtration and triangular presentation")
    p.add_argument("module")
    p = add("ext-ext", _cmd_ext_ext, "double-Ext spectral sequence")
    p.add_argument("M")
    p.add_argument("L")
    p.add_argument("--degree", type=int, default=0)
    p = add("tor-ext", _cmd_tor_ext, "Tor-Ext spectral sequence")
    p.add_argument("M")
    p.add_argument("N")
    p.add_argument("--degree", type=int, default=0)
    p.add_argument("--route", choices=("grothendieck", "bifunctor"), default="grothendieck")
    p = add("codegree", _cmd_codegree, "codegree of purity")
    p.add_argument("module")
    p = add("jordan", _cmd_jordan, "spectral sequences of the Jordan-block bicomplex")
    p.add_argument("--lambda", dest="lam", default="0")
    p.add_argument("--size", type=int, default=3)
    p = add("ss", _cmd_ss, "spectral sequence of a bicomplex file")
    p.add_argument("bicomplex")
    p.add_argument("--which", choices=("first", "second"), default="first")
    p = add("triangulate", _cmd_triangulate, "triangular presentation from a filtration file")
    p.add_argument("module")
    p.add_argument("filtration")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ArithmeticError, LiftingError, InvalidFiltration, GroebnerLimitExceeded, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
