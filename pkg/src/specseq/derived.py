"""Grothendieck spectral sequences, double-Ext / Tor-Ext, and the purity filtration.

The Grothendieck bicomplex of a pair of functors (F, G) and a module M is
``F(CE(G(P)))`` where P is a free resolution of M and CE is the
Cartan-Eilenberg resolution of the cochain complex ``G(P)``.  With
``G = Hom(-, D)`` and ``F = Hom(-, L)`` it is homological; with
``F = - (x) N`` it is cohomological.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .functors import (DualizeToRing, FunctorSpec, HomInto, TensorWith, cartan_eilenberg, grade,
                       global_dimension, qbar, resolution_of_module)
from .genmor import FiltrationSystem, GeneralizedMorphism, compose
from .linalg import solve_left
from .matrix import Mat
from .modules import FPModule, ModuleMorphism, fitting_ideal, rank
from .spectral import (Bicomplex, SpectralSequence, _lift_into, filtration_by_spectral_sequence,
                       render_spectral_sequence, spectral_sequence_bicomplex)

__all__ = [
    "GrothendieckResult", "PurityReport", "grothendieck_bicomplex",
    "grothendieck_spectral_sequence", "double_ext_ss", "tor_ext_ss", "hom_tensor_bicomplex",
    "purity_filtration", "codegree_of_purity", "purity_predicates", "higher_evaluation",
    "jordan_bicomplex", "page_drops", "UnsupportedFunctors",
]


class UnsupportedFunctors(ValueError):
    pass


# --------------------------------------------------------------------------
# bicomplexes

def _dual_complex(M: FPModule, P=None):
    """The cochain complex Hom(P_., D) as (objects, maps) for cartan_eilenberg."""
    ring = M.ring
    if P is None:
        P = resolution_of_module(M)
    objects = {p: FPModule.free(ring, P.rank(p)) for p in range(0, P.length + 1)}
    maps = {}
    for p in range(0, P.length):
        maps[p] = ModuleMorphism(objects[p], objects[p + 1], P.d(p + 1).transpose())
    return objects, maps, P


def grothendieck_bicomplex(F: FunctorSpec, G: FunctorSpec, M: FPModule, resolution=None) -> Bicomplex:
    """``F(CE(G(P)))`` with the sign trick applied.

    ``F = HomInto(L)`` gives a homological bicomplex ``B_{p,-k}``, ``F = TensorWith(N)``
    a cohomological one ``B^{p,-k}``; p is the degree in ``G(P)`` and k the
    resolution degree of the CE columns.
    """
    if not isinstance(G, DualizeToRing):
        raise UnsupportedFunctors("G must be the dualizing functor Hom(-, D)")
    if not isinstance(F, (HomInto, TensorWith)):
        raise UnsupportedFunctors(f"unsupported functor {F!r}")
    ring = M.ring
    if F.N.ring != ring:
        raise ValueError("ring mismatch")
    objects_q, maps_q, P = _dual_complex(M, resolution)
    CE = cartan_eilenberg(objects_q, maps_q)
    objects, vertical, horizontal = {}, {}, {}
    contravariant = isinstance(F, HomInto)
    for p, col in CE.columns.items():
        for k in range(0, col.length + 1):
            if col.rank(k) == 0:
                continue
            objects[(p, -k)] = F.on_free_object(col.rank(k))
            if contravariant:
                if col.rank(k + 1):
                    vertical[(p, -k)] = F.on_free_matrix(col.d(k + 1))
                if p - 1 in CE.horizontal:
                    horizontal[(p, -k)] = F.on_free_matrix(CE.horizontal[p - 1][k])
            else:
                if k >= 1:
                    vertical[(p, -k)] = F.on_free_matrix(col.d(k))
                if p in CE.horizontal:
                    horizontal[(p, -k)] = F.on_free_matrix(CE.horizontal[p][k])
    B = Bicomplex.from_commuting(objects, vertical, horizontal, cohomological=not contravariant,
                                 ring=ring)
    B.extra = {"cartan_eilenberg": CE, "resolution": P, "functor": F}
    return B


def hom_tensor_bicomplex(M: FPModule, N: FPModule) -> Bicomplex:
    """``B^{p,q} = Hom(P^M_p, D) (x) P^N_{-q}``, the bicomplex Hom(P^M, P^N)."""
    ring = M.ring
    PM = resolution_of_module(M)
    PN = resolution_of_module(N)
    objects, vertical, horizontal = {}, {}, {}
    for p in range(0, PM.length + 1):
        for k in range(0, PN.length + 1):
            r, s = PM.rank(p), PN.rank(k)
            if r * s == 0:
                continue
            objects[(p, -k)] = FPModule.free(ring, r * s)
            if k >= 1 and PN.rank(k - 1):
                vertical[(p, -k)] = Mat.identity(ring, r).kron(PN.d(k))
            if PM.rank(p + 1):
                horizontal[(p, -k)] = PM.d(p + 1).transpose().kron(Mat.identity(ring, s))
    B = Bicomplex.from_commuting(objects, vertical, horizontal, cohomological=True, ring=ring)
    B.extra = {"resolutions": (PM, PN)}
    return B


def jordan_bicomplex(ring, lam, size=3) -> Bicomplex:
    """Second-quadrant bicomplex whose total differential is ``x Id - J(lam)`` up to signs."""
    x = ring.var(0)
    a = Mat.from_rows(ring, [[x - ring.coerce(lam)]])
    minus_one = Mat.from_rows(ring, [[-ring.one]])
    D = FPModule.free(ring, 1)
    objects, vertical, horizontal = {}, {}, {}
    for i in range(size):
        objects[(-i, i)] = D
        objects[(-i, i + 1)] = D
        vertical[(-i, i + 1)] = a if i % 2 == 0 else -a
        if i + 1 < size:
            horizontal[(-i, i + 1)] = minus_one
    return Bicomplex(objects, vertical, horizontal, ring=ring)


# --------------------------------------------------------------------------
# spectral sequences

@dataclass
class GrothendieckResult:
    bicomplex: Bicomplex
    first: SpectralSequence
    second: SpectralSequence
    filtration: FiltrationSystem | None
    total_degree: int = 0
    extra: dict = field(default_factory=dict)

    def render(self) -> str:
        """Both sequences, the transposed one first."""
        return render_spectral_sequence(self.second, include_transposed=True, transposed=self.first)


def _result(B: Bicomplex, total_degree, with_filtration=True) -> GrothendieckResult:
    first = spectral_sequence_bicomplex(B, "first")
    second = spectral_sequence_bicomplex(B, "second")
    fs = filtration_by_spectral_sequence(second, total_degree) if with_filtration else None
    return GrothendieckResult(B, first, second, fs, total_degree)


def grothendieck_spectral_sequence(F, G, M, total_degree=0, with_filtration=True) -> GrothendieckResult:
    B = grothendieck_bicomplex(F, G, M)
    return _result(B, total_degree, with_filtration)


def double_ext_ss(M: FPModule, L: FPModule, total_degree=0, with_filtration=True) -> GrothendieckResult:
    """``E^2_pq = Ext^{-p}(Ext^q(M, D), L)`` converging to ``Tor_{p+q}(L, M)``."""
    if M.ring != L.ring:
        raise ValueError("ring mismatch")
    return grothendieck_spectral_sequence(HomInto(L), DualizeToRing(M.ring), M, total_degree,
                                          with_filtration)


def tor_ext_ss(M: FPModule, N: FPModule, total_degree=0, route="grothendieck",
               with_filtration=True) -> GrothendieckResult:
    """``E_2^{pq} = Tor_{-p}(Ext^q(M, D), N)`` converging to ``Ext^{p+q}(M, N)``."""
    if M.ring != N.ring:
        raise ValueError("ring mismatch")
    if route == "grothendieck":
        B = grothendieck_bicomplex(TensorWith(N), DualizeToRing(M.ring), M)
    elif route == "bifunctor":
        B = hom_tensor_bicomplex(M, N)
    else:
        raise ValueError(f"unknown route {route!r}")
    res = _result(B, total_degree, with_filtration)
    res.extra["route"] = route
    return res


# --------------------------------------------------------------------------
# purity

def page_drops(E: SpectralSequence, p, q, start=2):
    """Pages ``a > start`` with ``E^a_pq`` not isomorphic to ``E^{a-1}_pq``.

    Consecutive pages are compared by rank and the fitting ideals 0..2 of
    their presentations (display coordinates).
    """
    drops = []
    last = len(E.sheets) - 1
    prev = E.object(start, p, q)
    for a in range(start + 1, last + 1):
        cur = E.object(a, p, q)
        if cur is not prev and not _same_invariants(prev, cur):
            drops.append(a)
        prev = cur
    return drops


def _same_invariants(A: FPModule, B: FPModule) -> bool:
    if A.is_zero() or B.is_zero():
        return A.is_zero() == B.is_zero()
    if rank(A) != rank(B):
        return False
    for i in range(3):
        if fitting_ideal(A, i) != fitting_ideal(B, i):
            return False
    return True


def _codegree_from_drops(drops, start=2):
    if not drops:
        return (0,)
    widths = []
    prev = start
    for a in drops:
        widths.append(a - prev)
        prev = a
    return tuple(widths)


@dataclass
class PurityReport:
    module: FPModule
    filtration: FiltrationSystem
    parts: dict                # c -> FPModule (graded part M_c at degree -c)
    grades: dict               # c -> grade of M_c (inf for zero parts)
    evaluations: dict          # c -> GeneralizedMorphism M_c -> E^2_{-c,c}
    codegrees: dict            # c -> tuple (page widths at the spot (-c, c))
    is_pure: bool
    is_reflexively_pure: bool
    sequence: GrothendieckResult | None = None
    edge: ModuleMorphism | None = None

    @property
    def degrees(self):
        return list(self.filtration.degrees)

    def nonzero_codimensions(self):
        return sorted(c for c, P in self.parts.items() if not P.is_zero())

    def codegree(self):
        """Codegree of purity of the module (``math.inf`` if not pure)."""
        if not self.is_pure:
            return math.inf
        nz = self.nonzero_codimensions()
        if not nz:
            return (0,)
        return self.codegrees[nz[0]]

    def summary(self) -> dict:
        out = {"degrees": self.degrees, "pure": self.is_pure,
               "reflexively_pure": self.is_reflexively_pure, "parts": {}}
        for c in sorted(self.parts):
            P = self.parts[c]
            out["parts"][-c] = {
                "zero": P.is_zero(), "generators": P.ngens, "relations": P.nrels,
                "grade": self.grades[c], "codegree": list(self.codegrees[c]),
            }
        return out


def _edge_morphism(res: GrothendieckResult, M: FPModule, L: FPModule) -> ModuleMorphism:
    """``L (x) M -> H_0(Tot)`` induced by the augmentation of the CE column 0."""
    B = res.bicomplex
    ring = M.ring
    CE = B.extra["cartan_eilenberg"]
    eps = CE.columns[0].eps
    g = L.ngens
    rows = eps.transpose().kron(Mat.identity(ring, g))
    T = res.second.total
    iota = res.filtration.extra["homology_embedding"]
    n = T.obj(0).ngens
    blk = T.block_of(0, 0)
    if blk is None:
        raise ArithmeticError("degree zero block missing")
    off, k = blk
    full = Mat.zero(ring, rows.nrows, off).augment(rows).augment(Mat.zero(ring, rows.nrows, n - off - k))
    X = _lift_into(iota, full)
    # the resolution may drop redundant generators of M: express M's
    # generators through those of P_0 first
    P = B.extra["resolution"]
    if P.eps.nrows != M.ngens or P.eps != Mat.identity(ring, M.ngens):
        sec = solve_left(P.eps.stack(M.relations) if M.nrels else P.eps,
                         Mat.identity(ring, M.ngens))
        if sec is None:
            raise ArithmeticError("augmentation of the resolution is not onto")
        X = sec.block(0, M.ngens, 0, P.eps.nrows).kron(Mat.identity(ring, g)) * X
    source = M if g == 1 and L.nrels == 0 else None
    if source is None:
        from .functors import tensor_presentation
        source = tensor_presentation(M, L)
    return ModuleMorphism(source, iota.source, X)


def purity_filtration(M: FPModule, res: GrothendieckResult | None = None) -> PurityReport:
    """Purity filtration of M from the bidualizing spectral sequence."""
    ring = M.ring
    D = FPModule.free(ring, 1)
    if M.is_zero():
        fs = FiltrationSystem([], {}, M, "ascending")
        return PurityReport(M, fs, {}, {}, {}, {}, True, True)
    if res is None:
        res = double_ext_ss(M, D, 0)
    edge = _edge_morphism(res, M, D)
    if not edge.is_iso():
        raise ArithmeticError("edge morphism onto the total homology is not an isomorphism")
    back = GeneralizedMorphism.from_morphism(edge.inverse())
    E = res.second
    d = qbar(M)
    degrees = list(range(-d, 1))
    emb, parts, grades, evals, codeg = {}, {}, {}, {}, {}
    for p in degrees:
        c = -p
        eps_p = res.filtration[p]
        psi = compose(back, eps_p)
        emb[p] = psi
        part = psi.source
        parts[c] = part
        grades[c] = grade(part) if not part.is_zero() else math.inf
        evals[c] = _evaluation(E, c)
        codeg[c] = _codegree_from_drops(page_drops(E, -c, c)) if not part.is_zero() else (0,)
    fs = FiltrationSystem(degrees, emb, M, "ascending")
    nz = [c for c, P in parts.items() if not P.is_zero()]
    pure = len(nz) <= 1
    refl = pure and (not nz or evals[nz[0]].is_iso())
    rep = PurityReport(M, fs, parts, grades, evals, codeg, pure, refl, res, edge)
    return rep


def _evaluation(E: SpectralSequence, c) -> GeneralizedMorphism:
    """Composite relative embedding ``E^inf_{-c,c} -> E^2_{-c,c}``."""
    p, q = E._internal(-c, c)
    last = len(E.sheets) - 1
    start = min(2, last)
    S = E.sheets[last].objects.get((p, q))
    if S is None:
        S = FPModule.zero(E.total.ring)
        T = E.sheets[start].objects.get((p, q)) or S
        return GeneralizedMorphism.zero(S, T)
    phi = GeneralizedMorphism.identity(S)
    for a in range(last, start, -1):
        rel = E.sheets[a].relative.get((p, q))
        if rel is None:
            continue
        phi = compose(rel, phi)
    return phi


def higher_evaluation(M: FPModule, c, report: PurityReport | None = None) -> GeneralizedMorphism:
    """``M_c -> Ext^c(Ext^c(M, D), D)`` as a generalized embedding."""
    gd = global_dimension(M.ring)
    if not 0 <= c <= gd:
        raise ValueError(f"codimension {c} out of range 0..{gd}")
    if report is None:
        report = purity_filtration(M)
    if c in report.evaluations:
        return report.evaluations[c]
    Z = FPModule.zero(M.ring)
    return GeneralizedMorphism.zero(Z, Z)


def codegree_of_purity(M: FPModule, report: PurityReport | None = None):
    if M.is_zero():
        return (0,)
    if report is None:
        report = purity_filtration(M)
    return report.codegree()


def purity_predicates(M: FPModule, report: PurityReport | None = None):
    """``(is_pure, is_reflexively_pure)``."""
    if M.is_zero():
        return True, True
    if report is None:
        report = purity_filtration(M)
    return report.is_pure, report.is_reflexively_pure
