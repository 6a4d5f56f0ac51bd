"""Buchberger's algorithm for submodules of free modules over QQ[x1..xn].

Vectors are sparse: ``{position: {monomial: coefficient}}`` where monomials
are the degrevlex keys of :mod:`specseq.rings`.  The module order is
position over term with position 0 the most significant, so the leading term
of a vector sits in its smallest nonzero position.
"""
from __future__ import annotations

import heapq
import os
from operator import add, sub

from gmpy2 import mpq

from .rings import mon_divides, mon_lcm

__all__ = ["GroebnerBasis", "GroebnerLimitExceeded", "reduce_vector", "lead_of"]

PAIR_LIMIT_ENV = "SPECSEQ_MAX_GB_PAIRS"


class GroebnerLimitExceeded(RuntimeError):
    pass


def _pair_limit():
    v = os.environ.get(PAIR_LIMIT_ENV)
    if not v:
        return None
    return int(v)


def lead_of(v):
    pos = min(v)
    p = v[pos]
    m = max(p)
    return pos, m, p[m]


def _vec_degree(v):
    return max(m[0] for p in v.values() for m in p)


def _sub_multiple(f, k, q, g):
    """f -= k * x^q * g  (in place)."""
    for pos, gp in g.items():
        fp = f.get(pos)
        if fp is None:
            fp = f[pos] = {}
        for gm, gc in gp.items():
            key = tuple(map(add, gm, q))
            v = fp.get(key)
            if v is None:
                fp[key] = -k * gc
            else:
                v = v - k * gc
                if v:
                    fp[key] = v
                else:
                    del fp[key]
        if not fp:
            del f[pos]


def _find_reducer(by_pos, pos, m):
    for gm, gc, g in by_pos.get(pos, ()):
        if mon_divides(gm, m):
            return gm, gc, g
    return None


def reduce_vector(f, by_pos, full=True):
    """Normal form of ``f`` modulo the indexed basis ``by_pos``.

    ``by_pos`` maps a position to a list of ``(lead mon, lead coeff, vec)``.
    The input is not modified.  With ``full=False`` only the leading term is
    reduced (until it becomes irreducible).
    """
    f = {p: dict(t) for p, t in f.items() if t}
    out = {}
    while f:
        pos = min(f)
        poly = f[pos]
        m = max(poly)
        c = poly[m]
        r = _find_reducer(by_pos, pos, m)
        if r is not None:
            gm, gc, g = r
            _sub_multiple(f, c / gc, tuple(map(sub, m, gm)), g)
            continue
        if not full:
            for p, t in f.items():
                out.setdefault(p, {}).update(t)
            return out
        out.setdefault(pos, {})[m] = c
        del poly[m]
        if not poly:
            del f[pos]
    return out


def _monic(v):
    pos, m, c = lead_of(v)
    if c == 1:
        return v
    inv = 1 / c
    return {p: {k: x * inv for k, x in t.items()} for p, t in v.items()}


class GroebnerBasis:
    """Reduced Groebner basis of the submodule generated by ``vectors``."""

    def __init__(self, vectors, nvars):
        self.nvars = nvars
        self.elements = _buchberger([v for v in vectors if v], nvars)
        self.by_pos = {}
        for g in self.elements:
            pos, m, c = lead_of(g)
            self.by_pos.setdefault(pos, []).append((m, c, g))

    def reduce(self, v):
        return reduce_vector(v, self.by_pos)

    def leads(self):
        return [lead_of(g)[:2] for g in self.elements]


def _buchberger(vectors, nvars):
    limit = _pair_limit()
    G = []        # list of vectors (monic)
    leads = []    # (pos, mon)
    sugar = []
    alive = []
    by_pos = {}
    heap = []
    done = set()
    counter = 0

    def index_add(i):
        pos, m = leads[i]
        by_pos.setdefault(pos, []).append((m, mpq(1), G[i]))

    def add_element(v, s):
        nonlocal counter
        i = len(G)
        G.append(v)
        pos, m, _ = lead_of(v)
        leads.append((pos, m))
        sugar.append(s)
        alive.append(True)
        for j in range(i):
            if not alive[j] or leads[j][0] != pos:
                continue
            mj = leads[j][1]
            lcm = mon_lcm(m, mj)
            s_ij = max(s + lcm[0] - m[0], sugar[j] + lcm[0] - mj[0])
            counter += 1
            heapq.heappush(heap, (s_ij, lcm, pos, counter, j, i))
        # elements whose lead is divisible by the new lead become redundant
        # for reduction but stay as pair partners via ``done`` bookkeeping
        index_add(i)

    # seed: interreduce the input first so that leads are distinct
    seeds = []
    for v in sorted(vectors, key=_sort_key):
        seeds.append((v, _vec_degree(v)))
    for v, s in seeds:
        r = reduce_vector(v, by_pos)
        if r:
            add_element(_monic(r), max(s, _vec_degree(r)))

    npairs = 0
    while heap:
        s_ij, lcm, pos, _, j, i = heapq.heappop(heap)
        done.add((j, i))
        if _chain_criterion(i, j, pos, lcm, leads, done, len(G)):
            continue
        npairs += 1
        if limit is not None and npairs > limit:
            raise GroebnerLimitExceeded(f"more than {limit} S-pairs")
        gi, gj = G[i], G[j]
        mi, mj = leads[i][1], leads[j][1]
        sp = {}
        qi = tuple(map(sub, lcm, mi))
        qj = tuple(map(sub, lcm, mj))
        # both are monic
        _sub_multiple(sp, mpq(-1), qi, gi)
        _sub_multiple(sp, mpq(1), qj, gj)
        if not sp:
            continue
        r = reduce_vector(sp, by_pos)
        if r:
            add_element(_monic(r), max(s_ij, _vec_degree(r)))

    return _interreduce(G, leads)


def _chain_criterion(i, j, pos, lcm, leads, done, n):
    for k in range(n):
        if k == i or k == j or leads[k][0] != pos:
            continue
        if not mon_divides(leads[k][1], lcm):
            continue
        a, b = (k, i) if k < i else (i, k)
        c, d = (k, j) if k < j else (j, k)
        if (a, b) in done and (c, d) in done:
            return True
    return False


def _sort_key(v):
    pos, m, _ = lead_of(v)
    return (-pos, m)


def _interreduce(G, leads):
    # drop elements whose lead is divisible by another lead
    n = len(G)
    keep = []
    for i in range(n):
        pi, mi = leads[i]
        redundant = False
        for j in range(n):
            if j == i or leads[j][0] != pi:
                continue
            mj = leads[j][1]
            if mon_divides(mj, mi) and (mj != mi or j < i):
                redundant = True
                break
        if not redundant:
            keep.append(G[i])
    # full tail reduction against the others
    out = []
    for idx, g in enumerate(keep):
        others = {}
        for jdx, h in enumerate(keep):
            if jdx != idx:
                pos, m, c = lead_of(h)
                others.setdefault(pos, []).append((m, c, h))
        pos, m, c = lead_of(g)
        tail = {p: dict(t) for p, t in g.items()}
        del tail[pos][m]
        if not tail[pos]:
            del tail[pos]
        r = reduce_vector(tail, others)
        r.setdefault(pos, {})[m] = c
        out.append(_monic(r))
    out.sort(key=_sort_key, reverse=True)
    return out
