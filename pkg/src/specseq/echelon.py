"""Row Hermite normal form over Euclidean rings (QQ, ZZ, QQ[x]).

Over QQ this is the reduced row echelon form, over ZZ the pivots are
positive and entries above a pivot lie in [0, pivot), over QQ[x] pivots are
monic and entries above a pivot have smaller degree.
"""
from __future__ import annotations

__all__ = ["hnf", "hnf_reduce"]


def _axpy(row, q, piv_row, start):
    """row - q * piv_row, touching columns >= start only."""
    out = row[:]
    for k in range(start, len(row)):
        b = piv_row[k]
        if b:
            out[k] = out[k] - q * b
    return out


def hnf(rows, ncols, ring):
    """Return ``(basis_rows, pivot_columns)`` of the row module of ``rows``."""
    rows = [list(r) for r in rows if any(r)]
    piv = 0
    pivots = []
    for c in range(ncols):
        if piv >= len(rows):
            break
        while True:
            cand = [i for i in range(piv, len(rows)) if rows[i][c]]
            if not cand:
                break
            best = min(cand, key=lambda i: ring.euclid_size(rows[i][c]))
            rows[piv], rows[best] = rows[best], rows[piv]
            p = rows[piv]
            pc = p[c]
            clean = True
            for i in range(piv + 1, len(rows)):
                a = rows[i][c]
                if a:
                    q, r = ring.quo_rem(a, pc)
                    rows[i] = _axpy(rows[i], q, p, c)
                    if r:
                        clean = False
            if clean:
                break
        if not rows[piv][c]:
            continue
        u = ring.normal_unit(rows[piv][c])
        if u != 1:
            rows[piv] = [u * a if a else a for a in rows[piv]]
        p = rows[piv]
        pc = p[c]
        for k in range(piv):
            a = rows[k][c]
            if a:
                q, r = ring.quo_rem(a, pc)
                if q:
                    rows[k] = _axpy(rows[k], q, p, c)
        pivots.append(c)
        piv += 1
        rows = rows[:piv] + [r for r in rows[piv:] if any(r)]
    return rows[:piv], pivots


def hnf_reduce(v, basis, pivots, ring):
    """Canonical remainder of the row ``v`` modulo an HNF basis."""
    v = list(v)
    for row, c in zip(basis, pivots):
        a = v[c]
        if a:
            q, r = ring.quo_rem(a, row[c])
            if q:
                v = _axpy(v, q, row, c)
    return v
