"""The computable-ring primitives: one-sided solving, syzygies, normal forms.

All functions take and return :class:`~specseq.matrix.Mat`.  Rows of a
matrix are elements of a free module of row vectors; ``solve_left(A, B)``
finds ``X`` with ``X * A == B``.

Results of the underlying echelon / Groebner computations are memoized per
input matrix; the cache is guarded by a lock and never changes results.
"""
from __future__ import annotations

import threading
from collections import OrderedDict

from .echelon import hnf, hnf_reduce
from .groebner import GroebnerBasis, lead_of
from .matrix import Mat
from .rings import Poly, PolynomialRing

__all__ = [
    "solve_left", "syzygies_rows", "decide_zero_rows", "basis_rows",
    "row_rank", "contains_rows", "same_row_module", "clear_caches",
]

_CACHE_SIZE = 4096


class _Memo:
    def __init__(self, size=_CACHE_SIZE):
        self.size = size
        self.data = OrderedDict()
        self.lock = threading.Lock()

    def get(self, key, make):
        with self.lock:
            if key in self.data:
                self.data.move_to_end(key)
                return self.data[key]
        value = make()
        with self.lock:
            self.data[key] = value
            if len(self.data) > self.size:
                self.data.popitem(last=False)
        return value

    def clear(self):
        with self.lock:
            self.data.clear()


_plain = _Memo()
_lifted = _Memo()


def clear_caches():
    _plain.clear()
    _lifted.clear()


def _uses_groebner(ring):
    return isinstance(ring, PolynomialRing) and ring.nvars > 1


# --------------------------------------------------------------------------
# conversions for the Groebner backend

def _row_to_vec(row, offset=0):
    return {offset + j: dict(a.terms) for j, a in enumerate(row) if a.terms}


def _vec_to_row(ring, v, start, stop):
    return [Poly(ring, dict(v[j])) if j in v else ring.zero for j in range(start, stop)]


# --------------------------------------------------------------------------
# standard bases, cached

class _EuclidStd:
    def __init__(self, A):
        self.ring = A.ring
        self.basis, self.pivots = hnf(A.rows, A.ncols, A.ring)

    def reduce(self, row):
        return hnf_reduce(row, self.basis, self.pivots, self.ring)

    def rank(self):
        return len(self.pivots)


class _GroebnerStd:
    def __init__(self, A):
        self.ring = A.ring
        self.ncols = A.ncols
        self.gb = GroebnerBasis([_row_to_vec(r) for r in A.rows], A.ring.nvars)
        self.basis = [_vec_to_row(A.ring, g, 0, A.ncols) for g in self.gb.elements]

    def reduce(self, row):
        v = self.gb.reduce(_row_to_vec(row))
        return _vec_to_row(self.ring, v, 0, self.ncols)

    def rank(self):
        return len({lead_of(g)[0] for g in self.gb.elements})


class _EuclidLift:
    """HNF of the augmented matrix [A | I]."""

    def __init__(self, A):
        ring = A.ring
        self.ring = ring
        p, q = A.nrows, A.ncols
        self.p, self.q = p, q
        z, o = ring.zero, ring.one
        aug = [list(r) + [o if k == i else z for k in range(p)] for i, r in enumerate(A.rows)]
        self.basis, self.pivots = hnf(aug, p + q, ring)
        self.syz = [r[q:] for r, c in zip(self.basis, self.pivots) if c >= q]

    def solve_row(self, b):
        z = self.ring.zero
        v = hnf_reduce(list(b) + [z] * self.p, self.basis, self.pivots, self.ring)
        if any(v[:self.q]):
            return None
        return [-a for a in v[self.q:]]


class _GroebnerLift:
    def __init__(self, A):
        ring = A.ring
        self.ring = ring
        p, q = A.nrows, A.ncols
        self.p, self.q = p, q
        one = {ring.one_mon: ring.one.terms[ring.one_mon]}
        vecs = []
        for i, r in enumerate(A.rows):
            v = _row_to_vec(r)
            v[q + i] = dict(one)
            vecs.append(v)
        self.gb = GroebnerBasis(vecs, ring.nvars)
        self.syz = [_vec_to_row(ring, g, q, q + p) for g in self.gb.elements if lead_of(g)[0] >= q]

    def solve_row(self, b):
        v = self.gb.reduce(_row_to_vec(b))
        if any(j < self.q for j in v):
            return None
        return [-a for a in _vec_to_row(self.ring, v, self.q, self.q + self.p)]


def _std(A):
    cls = _GroebnerStd if _uses_groebner(A.ring) else _EuclidStd
    return _plain.get(A, lambda: cls(A))


def _lift(A):
    cls = _GroebnerLift if _uses_groebner(A.ring) else _EuclidLift
    return _lifted.get(A, lambda: cls(A))


# --------------------------------------------------------------------------
# public primitives

def _check_cols(A, B):
    if A.ncols != B.ncols:
        raise ValueError(f"column mismatch: {A.shape} vs {B.shape}")
    if A.ring != B.ring:
        raise ValueError("ring mismatch")


def basis_rows(A: Mat) -> Mat:
    """Canonical generating matrix of the row module of ``A``."""
    if A.nrows == 0:
        return A
    s = _std(A)
    return Mat(A.ring, len(s.basis), A.ncols, s.basis)


def decide_zero_rows(B: Mat, A: Mat) -> Mat:
    """Normal form of every row of ``B`` modulo the row module of ``A``."""
    _check_cols(A, B)
    if B.nrows == 0:
        return B
    if A.nrows == 0:
        return B
    s = _std(A)
    return Mat(B.ring, B.nrows, B.ncols, [s.reduce(r) for r in B.rows])


def solve_left(A: Mat, B: Mat):
    """``X`` with ``X * A == B``, or ``None`` if no solution exists."""
    _check_cols(A, B)
    ring = A.ring
    if A.nrows == 0 or A.ncols == 0:
        if B.is_zero():
            return Mat.zero(ring, B.nrows, A.nrows)
        return None
    if B.nrows == 0:
        return Mat.zero(ring, 0, A.nrows)
    L = _lift(A)
    out = []
    for b in B.rows:
        if not any(b):
            out.append([ring.zero] * A.nrows)
            continue
        x = L.solve_row(b)
        if x is None:
            return None
        out.append(x)
    return Mat(ring, B.nrows, A.nrows, out)


def syzygies_rows(A: Mat) -> Mat:
    """Matrix whose rows generate all row vectors ``x`` with ``x * A == 0``."""
    ring = A.ring
    if A.nrows == 0:
        return Mat.zero(ring, 0, 0)
    if A.is_zero():
        return Mat.identity(ring, A.nrows)
    L = _lift(A)
    return Mat(ring, len(L.syz), A.nrows, L.syz)


def row_rank(A: Mat) -> int:
    """Rank of ``A`` over the fraction field of its ring."""
    if A.nrows == 0 or A.ncols == 0:
        return 0
    return _std(A).rank()


def contains_rows(A: Mat, B: Mat) -> bool:
    """True if every row of ``B`` lies in the row module of ``A``."""
    return decide_zero_rows(B, A).is_zero()


def same_row_module(A: Mat, B: Mat) -> bool:
    return basis_rows(A) == basis_rows(B) if A.nrows and B.nrows else (
        contains_rows(A, B) and contains_rows(B, A))
