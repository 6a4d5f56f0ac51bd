"""Complexes, bicomplexes and their spectral sequences.

Internally everything is homological: a chain complex has ``d_n: C_n -> C_{n-1}``
and a bicomplex has ``v: B_pq -> B_{p,q-1}`` and ``h: B_pq -> B_{p-1,q}``
anticommuting.  Cohomological data is reflected at the origin on input.

Objects of a sheet ``E^r_pq`` are concrete presentations together with an
absolute embedding (a generalized morphism into ``B_pq``), so that arrows
and the induced filtration on the total homology can be computed by lifts.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .genmor import FiltrationSystem, GeneralizedMorphism, lift
from .linalg import decide_zero_rows, solve_left, syzygies_rows
from .matrix import Mat
from .modules import FPModule, ModuleMorphism, _clean_rows, _relations_among, kernel_embedding, \
    simplify_presentation

__all__ = [
    "ComplexOfModules", "FilteredComplex", "Bicomplex", "SpectralSheet", "SpectralSequence",
    "total_complex", "column_filtration", "spectral_sequence_generic",
    "spectral_sequence_bicomplex", "homology_embedding", "homology",
    "filtration_by_spectral_sequence", "render_spectral_sequence", "render_sheets",
    "AnticommutativityError",
]


class AnticommutativityError(ValueError):
    pass


def _stack(ncols, ring, *mats):
    mats = [m for m in mats if m is not None and m.nrows]
    if not mats:
        return Mat.zero(ring, 0, ncols)
    return mats[0] if len(mats) == 1 else mats[0].stack(*mats[1:])


def _solve_first_block(A_first: Mat, rest: Mat, rhs: Mat):
    """Rows X with X * A_first == rhs modulo the row module of ``rest``."""
    ring = rhs.ring
    k = A_first.nrows
    if rhs.nrows == 0:
        return Mat.zero(ring, 0, k)
    if rhs.is_zero():
        return Mat.zero(ring, rhs.nrows, k)
    if k == 0:
        if rest.nrows and decide_zero_rows(rhs, rest).is_zero():
            return Mat.zero(ring, rhs.nrows, 0)
        return None
    X = solve_left(_stack(rhs.ncols, ring, A_first, rest), rhs)
    if X is None:
        return None
    return X.block(0, X.nrows, 0, k)


# --------------------------------------------------------------------------
# complexes

@dataclass
class ComplexOfModules:
    """Chain complex ``objects[n]`` with ``differentials[n]: C_n -> C_{n-1}``.

    With ``cochain=True`` the differentials go ``C^n -> C^{n+1}``.
    Missing objects are zero, missing differentials are zero.
    """
    objects: dict
    differentials: dict = field(default_factory=dict)
    cochain: bool = False

    @property
    def ring(self):
        return next(iter(self.objects.values())).ring

    def degrees(self):
        return sorted(self.objects)

    def obj(self, n) -> FPModule:
        M = self.objects.get(n)
        return M if M is not None else FPModule.zero(self.ring)

    def d(self, n) -> Mat:
        """Matrix of the differential leaving degree n."""
        tgt = n + 1 if self.cochain else n - 1
        m = self.differentials.get(n)
        if m is None:
            return Mat.zero(self.ring, self.obj(n).ngens, self.obj(tgt).ngens)
        return m

    def as_chain(self) -> "ComplexOfModules":
        """The homological version (reflect degrees of a cochain complex)."""
        if not self.cochain:
            return self
        return ComplexOfModules({-n: M for n, M in self.objects.items()},
                                {-n: m for n, m in self.differentials.items()})

    def check(self):
        c = self.as_chain()
        for n in c.degrees():
            prod = c.d(n) * c.d(n - 1)
            if prod.nrows and prod.ncols and not decide_zero_rows(
                    prod, c.obj(n - 2).relations).is_zero():
                raise ValueError(f"d o d != 0 at degree {n}")
        return True


def homology_embedding(C: ComplexOfModules, n) -> GeneralizedMorphism:
    """``iota: H_n(C) -> C_n`` with aid the boundaries (``n`` in the complex's own grading)."""
    c = C.as_chain()
    m = -n if C.cochain else n
    return _homology_embedding(c, m)


def _homology_embedding(c: ComplexOfModules, n):
    ring = c.ring
    Cn = c.obj(n)
    out = ModuleMorphism(Cn, c.obj(n - 1), c.d(n))
    Z = kernel_embedding(out).matrix if Cn.ngens else Mat.zero(ring, 0, 0)
    Bd = _clean_rows(c.d(n + 1), Cn.relations) if c.obj(n + 1).ngens and Cn.ngens else \
        Mat.zero(ring, 0, Cn.ngens)
    if Z.nrows == 0:
        return GeneralizedMorphism(FPModule.zero(ring), Cn, Mat.zero(ring, 0, Cn.ngens), Bd)
    H = FPModule(_relations_among(Z, _stack(Cn.ngens, ring, Bd, Cn.relations)))
    H2, to, _ = simplify_presentation(H)
    return GeneralizedMorphism(H2, Cn, to.matrix * Z, Bd)


def homology(C: ComplexOfModules, n) -> FPModule:
    return homology_embedding(C, n).source


# --------------------------------------------------------------------------
# filtered complexes

@dataclass
class FilteredComplex:
    """Chain complex with an ascending filtration ``F_p C_n`` for p0 <= p <= p1.

    ``steps[n][p]`` is a generator matrix of ``F_p C_n`` (rows in ``C_n``);
    ``F_{p0-1} = 0`` and ``F_{p1} = C``.
    """
    complex: ComplexOfModules
    steps: dict
    p0: int
    p1: int

    def F(self, p, n) -> Mat:
        Cn = self.complex.obj(n)
        ring = self.complex.ring
        if p < self.p0:
            return Mat.zero(ring, 0, Cn.ngens)
        if p >= self.p1:
            return Mat.identity(ring, Cn.ngens)
        return self.steps.get(n, {}).get(p, Mat.zero(ring, 0, Cn.ngens))

    def check(self):
        c = self.complex
        for n in c.degrees():
            for p in range(self.p0, self.p1 + 1):
                img = self.F(p, n) * c.d(n)
                R = _stack(img.ncols, c.ring, self.F(p, n - 1), c.obj(n - 1).relations)
                if img.nrows and not img.is_zero():
                    if R.nrows == 0 or not decide_zero_rows(img, R).is_zero():
                        raise ValueError(f"filtration not compatible with d at (p={p}, n={n})")
        return True


# --------------------------------------------------------------------------
# bicomplexes

class Bicomplex:
    """Bounded homological bicomplex with anticommuting differentials.

    ``vertical[(p,q)]: B_pq -> B_{p,q-1}``, ``horizontal[(p,q)]: B_pq -> B_{p-1,q}``.
    A cohomological bicomplex (differentials raising degrees) is passed with
    ``cohomological=True`` and reflected to ``B'_pq = B^{-p,-q}``.
    """

    def __init__(self, objects: dict, vertical: dict, horizontal: dict, cohomological=False,
                 ring=None, check=True):
        if ring is None:
            ring = next(iter(objects.values())).ring
        self.ring = ring
        self.cohomological = cohomological
        if cohomological:
            objects = {(-p, -q): M for (p, q), M in objects.items()}
            vertical = {(-p, -q): m for (p, q), m in vertical.items()}
            horizontal = {(-p, -q): m for (p, q), m in horizontal.items()}
        self.objects = {k: M for k, M in objects.items() if M.ngens}
        self.vertical = vertical
        self.horizontal = horizontal
        if check:
            self.check()

    @classmethod
    def from_commuting(cls, objects, vertical, horizontal, cohomological=False, ring=None):
        """Build from commuting squares using the sign trick ``(-1)^p`` on verticals."""
        v = {(p, q): (m if p % 2 == 0 else -m) for (p, q), m in vertical.items()}
        return cls(objects, v, horizontal, cohomological=cohomological, ring=ring)

    # access in internal (homological) coordinates ----------------------------

    def obj(self, p, q) -> FPModule:
        M = self.objects.get((p, q))
        return M if M is not None else FPModule.zero(self.ring)

    def rank(self, p, q):
        return self.obj(p, q).ngens

    def _map(self, maps, src, tgt, what):
        shape = (self.rank(*src), self.rank(*tgt))
        m = maps.get(src)
        if m is None:
            return Mat.zero(self.ring, *shape)
        if m.shape != shape:
            raise ValueError(f"{what} map at {src} has shape {m.shape}, expected {shape}")
        return m

    def v(self, p, q) -> Mat:
        return self._map(self.vertical, (p, q), (p, q - 1), "vertical")

    def h(self, p, q) -> Mat:
        return self._map(self.horizontal, (p, q), (p - 1, q), "horizontal")

    def window(self):
        """(p0, p1, q0, q1) bounding the nonzero objects (internal coordinates)."""
        if not self.objects:
            return (0, 0, 0, 0)
        ps = [p for p, _ in self.objects]
        qs = [q for _, q in self.objects]
        return (min(ps), max(ps), min(qs), max(qs))

    def display_window(self):
        p0, p1, q0, q1 = self.window()
        if self.cohomological:
            return (-p1, -p0, -q1, -q0)
        return (p0, p1, q0, q1)

    def transpose(self) -> "Bicomplex":
        """``trB_pq = B_qp`` (vertical and horizontal maps swap roles)."""
        B = Bicomplex.__new__(Bicomplex)
        B.ring = self.ring
        B.cohomological = self.cohomological
        B.objects = {(q, p): M for (p, q), M in self.objects.items()}
        B.vertical = {(q, p): m for (p, q), m in self.horizontal.items()}
        B.horizontal = {(q, p): m for (p, q), m in self.vertical.items()}
        return B

    def check(self):
        for (p, q), M in self.objects.items():
            R = self.obj(p, q - 1).relations
            for a, b, tgt in (
                    (self.v(p, q), self.v(p, q - 1), (p, q - 2)),
                    (self.h(p, q), self.h(p - 1, q), (p - 2, q))):
                prod = a * b
                T = self.obj(*tgt)
                if prod.nrows and prod.ncols and not decide_zero_rows(prod, T.relations).is_zero():
                    raise ValueError(f"differential squares to a nonzero map at {(p, q)}")
            T = self.obj(p - 1, q - 1)
            if M.ngens and T.ngens:
                s = self.v(p, q) * self.h(p, q - 1) + self.h(p, q) * self.v(p - 1, q)
                if not decide_zero_rows(s, T.relations).is_zero():
                    raise AnticommutativityError(f"square at {(p, q)} does not anticommute")
            # well-definedness on relations
            if M.nrels:
                for m, tgt in ((self.v(p, q), (p, q - 1)), (self.h(p, q), (p - 1, q))):
                    T = self.obj(*tgt)
                    if T.ngens and not decide_zero_rows(M.relations * m, T.relations).is_zero():
                        raise ValueError(f"map at {(p, q)} is not well defined")
        return True

    def __repr__(self):
        kind = "cohomological" if self.cohomological else "homological"
        return f"<{kind} Bicomplex with {len(self.objects)} nonzero objects in window {self.display_window()}>"


@dataclass
class TotalComplex(ComplexOfModules):
    """Total complex with its block layout ``blocks[n] = [(p, q, offset, rank), ...]``."""
    blocks: dict = field(default_factory=dict)

    def block_of(self, n, p):
        for (pp, q, off, r) in self.blocks.get(n, []):
            if pp == p:
                return off, r
        return None

    def prefix(self, n, p):
        """Number of generators of blocks with first index <= p."""
        k = 0
        for (pp, q, off, r) in self.blocks.get(n, []):
            if pp <= p:
                k = off + r
        return k


def total_complex(B: Bicomplex) -> TotalComplex:
    """``Tot_n = (+)_{p+q=n} B_pq`` with blocks ordered by increasing p."""
    ring = B.ring
    if not B.objects:
        return TotalComplex({0: FPModule.zero(ring)}, {}, False, {0: []})
    ns = sorted({p + q for p, q in B.objects})
    blocks = {}
    objects = {}
    for n in ns:
        lay = []
        off = 0
        for (p, q) in sorted(k for k in B.objects if k[0] + k[1] == n):
            r = B.rank(p, q)
            lay.append((p, q, off, r))
            off += r
        blocks[n] = lay
        rels = [B.obj(p, q).relations for (p, q, _, _) in lay]
        objects[n] = FPModule(Mat.block_diagonal(ring, rels))
    diffs = {}
    for n in ns:
        if n - 1 not in objects:
            continue
        src, tgt = blocks[n], blocks[n - 1]
        parts = {}
        idx = {(p, q): i for i, (p, q, _, _) in enumerate(tgt)}
        for i, (p, q, _, _) in enumerate(src):
            if (p, q - 1) in idx:
                parts[(i, idx[(p, q - 1)])] = B.v(p, q)
            if (p - 1, q) in idx:
                parts[(i, idx[(p - 1, q)])] = B.h(p, q)
        diffs[n] = Mat.block_matrix(ring, parts, [b[3] for b in src], [b[3] for b in tgt])
    T = TotalComplex(objects, diffs, False, blocks)
    return T


def column_filtration(B: Bicomplex) -> FilteredComplex:
    T = total_complex(B)
    ring = B.ring
    p0, p1, _, _ = B.window()
    steps = {}
    for n, lay in T.blocks.items():
        g = T.obj(n).ngens
        steps[n] = {}
        for p in range(p0, p1 + 1):
            k = T.prefix(n, p)
            steps[n][p] = Mat.identity(ring, g).block(0, k, 0, g)
    return FilteredComplex(T, steps, p0, p1)


# --------------------------------------------------------------------------
# spectral sequences

@dataclass
class SpectralSheet:
    """Page ``r``: objects, arrows ``E_pq -> E_{p-r,q+r-1}`` and embeddings.

    Keys are internal (homological) bidegrees.  ``absolute[(p,q)]`` embeds the
    object into ``E^0_pq``; ``relative[(p,q)]`` into the previous page.
    """
    level: int
    objects: dict
    arrows: dict = field(default_factory=dict)
    absolute: dict = field(default_factory=dict)
    relative: dict = field(default_factory=dict)
    total: dict = field(default_factory=dict)

    def obj(self, p, q):
        return self.objects.get((p, q))

    def is_zero_at(self, p, q):
        E = self.objects.get((p, q))
        return E is None or E.ngens == 0

    def arrow_is_zero(self, p, q):
        a = self.arrows.get((p, q))
        if a is None:
            return True
        return a.is_zero()

    def nonzero_arrows(self):
        return [k for k in self.arrows if not self.arrow_is_zero(*k)]


@dataclass
class SpectralSequence:
    sheets: list
    window: tuple               # internal (p0, p1, q0, q1)
    cohomological: bool = False
    provenance: str = "bicomplex-closed-form"
    orientation: str = "first"
    source: object = None       # bicomplex or filtered complex it came from
    total: object = None        # total complex (chain, internal coordinates)

    @property
    def stable_level(self):
        """First level from which on all arrows vanish."""
        last = -1
        for s in self.sheets:
            if s.nonzero_arrows():
                last = s.level
        return last + 1

    @property
    def infinity(self) -> SpectralSheet:
        return self.sheets[-1]

    def sheet(self, r) -> SpectralSheet:
        return self.sheets[min(r, len(self.sheets) - 1)]

    # coordinates as seen by the user
    def _internal(self, p, q):
        return (-p, -q) if self.cohomological else (p, q)

    def object(self, r, p, q) -> FPModule:
        """``E^r_pq`` in display coordinates."""
        E = self.sheet(r).objects.get(self._internal(p, q))
        return E if E is not None else FPModule.zero(self.total.ring)

    def arrow(self, r, p, q):
        return self.sheet(r).arrows.get(self._internal(p, q))

    def display_window(self):
        p0, p1, q0, q1 = self.window
        if self.cohomological:
            return (-p1, -p0, -q1, -q0)
        return self.window

    def is_stable_spot(self, r, p, q):
        """Nonzero and no live arrow touches the spot at levels >= r (internal coords).

        An arrow is live when its source and target objects are both nonzero,
        whether or not the map itself vanishes.
        """
        if self.sheet(r).is_zero_at(p, q):
            return False
        for s in self.sheets[r:]:
            k = s.level
            if s.is_zero_at(p, q):
                return False
            if not s.is_zero_at(p - k, q + k - 1) or not s.is_zero_at(p + k, q - k + 1):
                return False
        return True

    @property
    def display_level(self):
        """Last level shown: one past the last level carrying a live arrow."""
        last = -1
        for s in self.sheets:
            k = s.level
            for (p, q), E in s.objects.items():
                if E.ngens and not s.is_zero_at(p - k, q + k - 1):
                    last = k
                    break
        return min(last + 1, len(self.sheets) - 1)


def _subfactor_step(E: FPModule, K: Mat, I: Mat):
    """Presentation of (span K + span I) / span I inside E, with K-rows as generators.

    Returns ``(module, generator rows in E)`` with the presentation simplified.
    """
    ring = E.ring
    if K.nrows == 0:
        return FPModule.zero(ring), Mat.zero(ring, 0, E.ngens)
    rels = _relations_among(K, _stack(E.ngens, ring, I, E.relations))
    M, to, _ = simplify_presentation(FPModule(rels))
    return M, to.matrix * K


def _next_sheet(prev: SpectralSheet) -> SpectralSheet:
    r = prev.level
    ring = None
    objects, absolute, relative = {}, {}, {}
    if not prev.nonzero_arrows():
        nxt = SpectralSheet(r + 1, dict(prev.objects), {}, dict(prev.absolute), {}, {})
        for k, E in prev.objects.items():
            nxt.relative[k] = GeneralizedMorphism.identity(E)
        return nxt
    for (p, q), E in prev.objects.items():
        ring = E.ring
        if E.ngens == 0:
            objects[(p, q)] = E
            absolute[(p, q)] = prev.absolute[(p, q)]
            relative[(p, q)] = GeneralizedMorphism.identity(E)
            continue
        out = prev.arrows.get((p, q))
        if out is not None and not out.is_zero():
            K = kernel_embedding(out).matrix
        else:
            K = Mat.identity(ring, E.ngens)
        inc = prev.arrows.get((p + r, q - r + 1))
        if inc is not None and not inc.is_zero():
            I = _clean_rows(inc.matrix, E.relations)
        else:
            I = Mat.zero(ring, 0, E.ngens)
        if K.nrows == E.ngens and K == Mat.identity(ring, E.ngens) and I.nrows == 0:
            objects[(p, q)] = E
            absolute[(p, q)] = prev.absolute[(p, q)]
            relative[(p, q)] = GeneralizedMorphism.identity(E)
            continue
        E2, G = _subfactor_step(E, K, I)
        rho = GeneralizedMorphism(E2, E, G, I)
        a = prev.absolute[(p, q)]
        T = a.target
        aid = a.aid_generators
        if I.nrows:
            aid = _clean_rows(_stack(T.ngens, ring, aid, I * a.matrix), T.relations)
        objects[(p, q)] = E2
        relative[(p, q)] = rho
        absolute[(p, q)] = GeneralizedMorphism(E2, T, G * a.matrix, aid)
    return SpectralSheet(r + 1, objects, {}, absolute, relative, {})


def _lift_into(alpha: GeneralizedMorphism, rows: Mat) -> Mat:
    """Coefficients X with X * alpha.matrix == rows modulo the aid and relations."""
    T = alpha.target
    rest = _stack(T.ngens, T.ring, alpha.aid_generators, T.relations)
    X = _solve_first_block(alpha.matrix, rest, rows)
    if X is None:
        raise ArithmeticError("lifting condition failed while computing an arrow")
    return X


def _bicomplex_arrows(B: Bicomplex, sheet: SpectralSheet):
    """Arrows of page r >= 1 by the staircase formulas."""
    r = sheet.level
    ring = B.ring
    arrows = {}
    for (p, q), ES in sheet.objects.items():
        tgt = (p - r, q + r - 1)
        ET = sheet.objects.get(tgt)
        if ES.ngens == 0 or ET is None or ET.ngens == 0:
            continue
        aS = sheet.absolute[(p, q)]
        if r == 1:
            rows = aS.matrix * B.h(p, q)
        else:
            rows = -_staircase(B, p, q, r, aS.matrix)
        X = _lift_into(sheet.absolute[tgt], rows)
        arrows[(p, q)] = ModuleMorphism(ES, ET, X)
    return arrows


def _staircase(B: Bicomplex, p, q, r, x: Mat) -> Mat:
    """``dh(z)`` where ``dv z == h x`` modulo the image of the staircase map ``l``.

    Staircase blocks S_i = B_{p-i, q+i-1} (i = 1..r-1); ``l`` starts in
    ``B_{p-i, q+i}`` (i = 1..r-2); ``z`` lives in ``B_{p-r+1, q+r-1}``.
    """
    ring = B.ring
    S = [(p - i, q + i - 1) for i in range(1, r)]
    sizes = [B.rank(*s) for s in S]
    offs = [sum(sizes[:i]) for i in range(len(sizes))]
    width = sum(sizes)
    zsrc = (p - r + 1, q + r - 1)
    nz = B.rank(*zsrc)
    if nz == 0 or width == 0:
        return Mat.zero(ring, x.nrows, B.rank(p - r, q + r - 1))

    def place(block_idx, M):
        parts = {(0, block_idx): M}
        return Mat.block_matrix(ring, parts, [M.nrows], sizes)

    rhs = place(0, x * B.h(p, q))
    beta = place(len(S) - 1, B.v(*zsrc))
    lrows = []
    for i in range(1, r - 1):
        src = (p - i, q + i)
        k = B.rank(*src)
        if k == 0:
            continue
        parts = {}
        if sizes[i - 1]:
            parts[(0, i - 1)] = B.v(*src)
        if sizes[i]:
            parts[(0, i)] = B.h(*src)
        lrows.append(Mat.block_matrix(ring, parts, [k], sizes))
    rels = Mat.block_diagonal(ring, [B.obj(*s).relations for s in S])
    rest = _stack(width, ring, *lrows, rels)
    Z = _solve_first_block(beta, rest, rhs)
    if Z is None:
        raise ArithmeticError("staircase lift failed")
    return Z * B.h(*zsrc)


def _spots(window):
    p0, p1, q0, q1 = window
    return [(p, q) for p in range(p0, p1 + 1) for q in range(q0, q1 + 1)]


def spectral_sequence_bicomplex(B: Bicomplex, which="first") -> SpectralSequence:
    """Spectral sequence of the column filtration (``first``) or of the transposed bicomplex."""
    if which not in ("first", "second"):
        raise ValueError("which must be 'first' or 'second'")
    src = B if which == "first" else B.transpose()
    ring = B.ring
    window = src.window()
    p0, p1, q0, q1 = window
    objects, absolute = {}, {}
    for (p, q) in _spots(window):
        M = src.obj(p, q)
        objects[(p, q)] = M
        absolute[(p, q)] = GeneralizedMorphism.identity(M)
    s0 = SpectralSheet(0, objects, {}, absolute, {}, {})
    for (p, q), M in objects.items():
        if M.ngens and src.rank(p, q - 1):
            s0.arrows[(p, q)] = ModuleMorphism(M, src.obj(p, q - 1), src.v(p, q))
    sheets = [s0]
    cur = s0
    for r in range(1, p1 - p0 + 2):
        cur = _next_sheet(cur)
        if r <= p1 - p0:
            cur.arrows = _bicomplex_arrows(src, cur)
        sheets.append(cur)
    if not B.objects:
        sheets = sheets[:1]
    SS = SpectralSequence(sheets, window, B.cohomological, "bicomplex-closed-form", which, src,
                          total_complex(src))
    _attach_total_embeddings(SS, src)
    return SS


def _attach_total_embeddings(SS: SpectralSequence, src: Bicomplex):
    T = SS.total
    ring = src.ring
    last = SS.sheets[-1]
    for (p, q), E in last.objects.items():
        n = p + q
        if n not in T.objects:
            continue
        g = T.obj(n).ngens
        blk = T.block_of(n, p)
        if blk is None:
            continue
        off, k = blk
        a = last.absolute[(p, q)]
        inc = Mat.identity(ring, g).block(off, off + k, 0, g)
        pre = Mat.identity(ring, g).block(0, T.prefix(n, p - 1), 0, g)
        aid = _stack(g, ring, a.aid_generators * inc, pre)
        last.total[(p, q)] = GeneralizedMorphism(E, T.obj(n), a.matrix * inc, aid)


def spectral_sequence_generic(FC: FilteredComplex) -> SpectralSequence:
    """Sheets ``E^r_p = Z^r_p / B^r_p`` of a filtered chain complex (r = 0..m)."""
    C = FC.complex
    ring = C.ring
    p0, p1 = FC.p0, FC.p1
    ns = C.degrees()
    m = p1 - p0 + 1

    def A(r, p, n):
        """Generators of {c in F_p C_n : d c in F_{p-r} C_{n-1}}."""
        Fp = FC.F(p, n)
        if Fp.nrows == 0:
            return Fp
        if r <= 0:
            return Fp
        img = Fp * C.d(n)
        if img.ncols == 0 or img.is_zero():
            return Fp
        S = syzygies_rows(_stack(img.ncols, ring, img, FC.F(p - r, n - 1), C.obj(n - 1).relations))
        coeff = S.block(0, S.nrows, 0, Fp.nrows)
        return _clean_rows(coeff * Fp, C.obj(n).relations)

    def Bd(r, p, n):
        Cn = C.obj(n)
        low = FC.F(p - 1, n)
        if r == 0:
            return low
        a = A(r - 1, p + r - 1, n + 1)
        if a.nrows == 0 or C.obj(n + 1).ngens == 0:
            return low
        return _stack(Cn.ngens, ring, a * C.d(n + 1), low)

    sheets = []
    for r in range(0, m + 1):
        sheet = SpectralSheet(r, {}, {}, {}, {}, {})
        for n in ns:
            Cn = C.obj(n)
            for p in range(p0, p1 + 1):
                q = n - p
                Z = A(r, p, n)
                Bm = _clean_rows(Bd(r, p, n), Cn.relations) if Cn.ngens else Mat.zero(ring, 0, 0)
                if Z.nrows == 0:
                    E, G = FPModule.zero(ring), Mat.zero(ring, 0, Cn.ngens)
                else:
                    E, G = _subfactor_step(Cn, Z, Bm)
                sheet.objects[(p, q)] = E
                sheet.total[(p, q)] = GeneralizedMorphism(E, Cn, G, Bm)
        for (p, q), E in sheet.objects.items():
            tgt = (p - r, q + r - 1)
            ET = sheet.objects.get(tgt)
            if E.ngens == 0 or ET is None or ET.ngens == 0:
                continue
            n = p + q
            rows = sheet.total[(p, q)].matrix * C.d(n)
            X = _lift_into(sheet.total[tgt], rows)
            sheet.arrows[(p, q)] = ModuleMorphism(E, ET, X)
        if r:
            prev = sheets[-1]
            for k, iota in sheet.total.items():
                if iota.source.ngens:
                    sheet.relative[k] = lift(iota, prev.total[k], check=False)
        sheets.append(sheet)
    for s in sheets:
        for k, iota in s.total.items():
            if iota.source.ngens:
                s.absolute[k] = lift(iota, sheets[0].total[k], check=False)
    nz = [k for k, E in sheets[0].objects.items() if E.ngens]
    if nz:
        window = (min(k[0] for k in nz), max(k[0] for k in nz),
                  min(k[1] for k in nz), max(k[1] for k in nz))
    else:
        window = (p0, p0, 0, 0)
    return SpectralSequence(sheets, window, C.cochain, "generic-filtered", "first", FC, C.as_chain())


def filtration_by_spectral_sequence(E: SpectralSequence, n) -> FiltrationSystem:
    """Filtration system of ``H_n(Tot)`` from the total embeddings of the stable page.

    ``n`` is the total degree in the sequence's own (display) grading.
    """
    m = -n if E.cohomological else n
    T = E.total
    iota = _homology_embedding(T, m)
    H = iota.source
    last = E.sheets[-1]
    p0, p1, _, _ = E.window
    emb = {}
    for p in range(p0, p1 + 1):
        key = (p, m - p)
        ip = last.total.get(key)
        if ip is None:
            Ek = FPModule.zero(E.total.ring)
            ip = GeneralizedMorphism(Ek, T.obj(m), Mat.zero(T.ring, 0, T.obj(m).ngens),
                                     _prefix_rows(T, m, p - 1))
        emb[p] = lift(ip, iota, check=False)
    if E.cohomological:
        degrees = list(range(-p1, -p0 + 1))
        emb = {-p: e for p, e in emb.items()}
        fs = FiltrationSystem(degrees, emb, H, "descending")
    else:
        fs = FiltrationSystem(list(range(p0, p1 + 1)), emb, H, "ascending")
    fs.extra["homology_embedding"] = iota
    return fs


def _prefix_rows(T, n, p):
    g = T.obj(n).ngens
    return Mat.identity(T.ring, g).block(0, T.prefix(n, p), 0, g) if hasattr(T, "prefix") \
        else Mat.zero(T.ring, 0, g)


# --------------------------------------------------------------------------
# rendering

def render_sheets(E: SpectralSequence, levels=None) -> str:
    """Grid text: a header with the bidegree window, then one grid per level."""
    kind = "cohomological" if E.cohomological else "homological"
    dp0, dp1, dq0, dq1 = E.display_window()
    lines = [f"a {kind} spectral sequence at bidegrees",
             f"[ [ {dp0} .. {dp1} ], [ {dq0} .. {dq1} ] ]"]
    if levels is None:
        levels = range(0, E.display_level + 1)
    for r in levels:
        lines.append("---------")
        lines.append(f"Level {r}:")
        lines.append("")
        s = E.sheet(r)
        for dq in range(dq1, dq0 - 1, -1):
            toks = []
            for dp in range(dp0, dp1 + 1):
                p, q = E._internal(dp, dq)
                if s.is_zero_at(p, q):
                    toks.append(".")
                elif E.is_stable_spot(min(r, len(E.sheets) - 1), p, q):
                    toks.append("s")
                else:
                    toks.append("*")
            lines.append(" " + " ".join(toks))
    return "\n".join(lines) + "\n"


def render_spectral_sequence(E: SpectralSequence, include_transposed=False,
                             transposed: SpectralSequence | None = None) -> str:
    """Transcript-style display, optionally preceded by the transposed sequence."""
    out = ""
    if include_transposed:
        if transposed is None:
            raise ValueError("the transposed spectral sequence is required")
        out += "The associated transposed spectral sequence:\n\n"
        out += render_sheets(transposed)
        out += "\nNow the spectral sequence of the bicomplex:\n\n"
    return out + render_sheets(E)
