"""Free resolutions, Hom/Tensor functors, Ext/Tor and related invariants."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .linalg import basis_rows, decide_zero_rows, solve_left, syzygies_rows
from .matrix import Mat
from .modules import (FPModule, ModuleMorphism, Submodule, kernel_embedding, simplify_presentation,
                      smaller_presentation, subfactor, is_zero)
from .rings import PolynomialRing

__all__ = [
    "FreeResolution", "Resolution", "HomInto", "TensorWith", "DualizeToRing",
    "free_resolution", "apply_functor", "hom", "tensor", "ext", "tor", "grade", "qbar",
    "auslander_dual", "degree_of_torsion_freeness", "projective_dimension",
    "is_projective", "cartan_eilenberg", "resolve_submodule", "power", "global_dimension",
    "homology_of", "INFINITY", "resolution_of_module", "tensor_presentation",
]

INFINITY = math.inf


def global_dimension(ring):
    if isinstance(ring, PolynomialRing):
        return ring.nvars
    return 0 if ring.is_field else 1


# --------------------------------------------------------------------------
# resolutions

@dataclass
class FreeResolution:
    """Free resolution ``... -> P_2 -> P_1 -> P_0 -> module``.

    ``differentials[i-1]`` is ``d_i: P_i -> P_{i-1}`` (rank P_i x rank P_{i-1}).
    """
    module: FPModule
    differentials: list

    @property
    def length(self):
        return len(self.differentials)

    def rank(self, i):
        if i == 0:
            return self.module.ngens
        if 1 <= i <= self.length:
            return self.differentials[i - 1].nrows
        return 0

    def d(self, i):
        """d_i, or an empty matrix outside the range."""
        ring = self.module.ring
        if 1 <= i <= self.length:
            return self.differentials[i - 1]
        return Mat.zero(ring, self.rank(i), self.rank(i - 1))


def free_resolution(M: FPModule, max_length=None) -> FreeResolution:
    """d_1 = basis_rows(relations), d_{i+1} = syzygies_rows(d_i)."""
    if max_length is None:
        max_length = global_dimension(M.ring) + 1
    diffs = []
    d = basis_rows(M.relations) if M.nrels else M.relations
    while d.nrows and len(diffs) < max_length:
        diffs.append(d)
        d = syzygies_rows(d)
    return FreeResolution(M, diffs)


@dataclass
class Resolution:
    """Free resolution of a module given only through an augmentation.

    ``eps`` (rank P_0 x ngens(target)) maps P_0 onto the resolved module, which
    is a submodule of ``target``; ``diffs[i-1]`` is d_i.
    """
    target: FPModule
    eps: Mat
    diffs: list = field(default_factory=list)

    @property
    def length(self):
        return len(self.diffs)

    def rank(self, i):
        if i == 0:
            return self.eps.nrows
        if 1 <= i <= len(self.diffs):
            return self.diffs[i - 1].nrows
        return 0

    def d(self, i):
        if 1 <= i <= len(self.diffs):
            return self.diffs[i - 1]
        return Mat.zero(self.eps.ring, self.rank(i), self.rank(i - 1))


def _prune(eps, diffs, ring):
    """Cancel unit entries of the differentials (and trim the tail)."""
    mats = [eps] + list(diffs)   # mats[i] = d_i for i >= 1, mats[0] = eps
    changed = True
    while changed:
        changed = False
        for i in range(1, len(mats)):
            d = mats[i]
            hit = None
            for a, row in enumerate(d.rows):
                for b, x in enumerate(row):
                    if x and ring.is_unit(x):
                        hit = (a, b)
                        break
                if hit:
                    break
            if hit is None:
                continue
            a, b = hit
            u_inv = ring.unit_inverse(d.rows[a][b])
            col_b = [r[b] for r in d.rows]
            row_a = d.rows[a]
            new_rows = []
            for r_idx, r in enumerate(d.rows):
                if r_idx == a:
                    continue
                c = col_b[r_idx]
                if c:
                    f = c * u_inv
                    r = [x - f * y if y else x for x, y in zip(r, row_a)]
                new_rows.append([x for k, x in enumerate(r) if k != b])
            mats[i] = Mat(ring, d.nrows - 1, d.ncols - 1, new_rows)
            prev = mats[i - 1]
            mats[i - 1] = prev.select_rows([k for k in range(prev.nrows) if k != b])
            if i + 1 < len(mats):
                nxt = mats[i + 1]
                mats[i + 1] = nxt.select_cols([k for k in range(nxt.ncols) if k != a])
            changed = True
            break
    # drop trailing differentials with no rows
    while len(mats) > 1 and mats[-1].nrows == 0:
        mats.pop()
    # a differential with zero columns forces all later ones to be empty
    return mats[0], mats[1:]


def resolve_submodule(G: Mat, ambient: FPModule, max_length=None, prune=True) -> Resolution:
    """Resolution of the submodule of ``ambient`` generated by the rows of ``G``."""
    ring = ambient.ring
    if max_length is None:
        max_length = global_dimension(ring) + 2
    G = decide_zero_rows(G, ambient.relations) if ambient.nrels and G.nrows else G
    G = G.drop_zero_rows()
    eps = G
    diffs = []
    if G.nrows:
        S = syzygies_rows(G.stack(ambient.relations)) if ambient.nrels else syzygies_rows(G)
        d = S.block(0, S.nrows, 0, G.nrows).drop_zero_rows()
        if d.nrows:
            d = basis_rows(d)
        while d.nrows and len(diffs) < max_length:
            diffs.append(d)
            d = syzygies_rows(d)
    if prune:
        eps, diffs = _prune(eps, diffs, ring)
    return Resolution(ambient, eps, diffs)


def resolution_of_module(M: FPModule, prune=True) -> Resolution:
    return resolve_submodule(Mat.identity(M.ring, M.ngens), M, prune=prune)


# --------------------------------------------------------------------------
# functors

class FunctorSpec:
    variance = "covariant"

    def on_free_matrix(self, A: Mat) -> Mat:  # pragma: no cover - abstract
        raise NotImplementedError

    def on_free_object(self, n: int) -> FPModule:  # pragma: no cover - abstract
        raise NotImplementedError


class HomInto(FunctorSpec):
    variance = "contravariant"

    def __init__(self, N: FPModule):
        self.N = N

    def on_free_object(self, n):
        return power(self.N, n)

    def on_free_matrix(self, A):
        # Hom(D^b, N) -> Hom(D^a, N) for A: D^a -> D^b
        return A.transpose().kron(Mat.identity(A.ring, self.N.ngens))

    def __repr__(self):
        return f"HomInto({self.N!r})"


class TensorWith(FunctorSpec):
    variance = "covariant"

    def __init__(self, N: FPModule):
        self.N = N

    def on_free_object(self, n):
        return power(self.N, n)

    def on_free_matrix(self, A):
        return A.kron(Mat.identity(A.ring, self.N.ngens))

    def __repr__(self):
        return f"TensorWith({self.N!r})"


class DualizeToRing(FunctorSpec):
    variance = "contravariant"

    def __init__(self, ring=None):
        self.ring = ring

    def on_free_object(self, n):
        return FPModule.free(self.ring, n) if self.ring is not None else None

    def on_free_matrix(self, A):
        return A.transpose()

    def __repr__(self):
        return "DualizeToRing()"


def power(N: FPModule, n: int) -> FPModule:
    """Direct sum of n copies of N."""
    ring = N.ring
    if n == 0:
        return FPModule.zero(ring)
    return FPModule(Mat.identity(ring, n).kron(N.relations) if N.nrels else Mat.zero(ring, 0, n * N.ngens))


def _hom_embedding(M: FPModule, N: FPModule):
    """Hom(M, N) as a kernel inside N^{q}; returns (module, generator matrix)."""
    ring = M.ring
    q = M.ngens
    Nq = power(N, q)
    R = M.relations.drop_zero_rows()
    Np = power(N, R.nrows)
    f = ModuleMorphism(Nq, Np, R.transpose().kron(Mat.identity(ring, N.ngens)))
    k = kernel_embedding(f)
    return k.source, k.matrix, Nq


def apply_functor(F: FunctorSpec, phi: ModuleMorphism) -> ModuleMorphism:
    """F applied to phi; on free modules blockwise, otherwise through presentations."""
    ring = phi.ring
    src, tgt = phi.source, phi.target
    free = src.is_free_presentation() and tgt.is_free_presentation()
    if isinstance(F, DualizeToRing):
        F = HomInto(FPModule.free(ring, 1))
    if isinstance(F, TensorWith):
        if free:
            return ModuleMorphism(power(F.N, src.ngens), power(F.N, tgt.ngens), F.on_free_matrix(phi.matrix))
        return ModuleMorphism(tensor_presentation(src, F.N), tensor_presentation(tgt, F.N),
                              phi.matrix.kron(Mat.identity(ring, F.N.ngens)))
    if free:
        return ModuleMorphism(power(F.N, tgt.ngens), power(F.N, src.ngens), F.on_free_matrix(phi.matrix))
    H2, K2, N2 = _hom_embedding(tgt, F.N)
    H1, K1, N1 = _hom_embedding(src, F.N)
    images = K2 * phi.matrix.transpose().kron(Mat.identity(ring, F.N.ngens))
    X = solve_left(K1.stack(N1.relations), images) if K1.nrows else None
    if X is None:
        if images.nrows and not decide_zero_rows(images, N1.relations).is_zero():
            raise ValueError("functor image is not well defined")
        X = Mat.zero(ring, K2.nrows, K1.nrows + N1.nrels)
    return ModuleMorphism(H2, H1, X.block(0, X.nrows, 0, K1.nrows))


def hom(M: FPModule, N: FPModule) -> FPModule:
    if M.ring != N.ring:
        raise ValueError("ring mismatch")
    H, _, _ = _hom_embedding(M, N)
    return smaller_presentation(H)[0]


def tensor_presentation(M: FPModule, N: FPModule) -> FPModule:
    ring = M.ring
    a = M.relations.kron(Mat.identity(ring, N.ngens))
    b = Mat.identity(ring, M.ngens).kron(N.relations)
    return FPModule(a.stack(b))


def tensor(M: FPModule, N: FPModule) -> FPModule:
    if M.ring != N.ring:
        raise ValueError("ring mismatch")
    return smaller_presentation(tensor_presentation(M, N))[0]


def homology_of(obj: FPModule, incoming: Mat, outgoing: ModuleMorphism | None):
    """ker(outgoing) / img(incoming) inside ``obj``.

    ``incoming`` is a matrix whose rows are elements of ``obj``.  Returns
    ``(module, cycle generators, boundary generators)``.
    """
    ring = obj.ring
    if outgoing is None:
        Z = Mat.identity(ring, obj.ngens)
    else:
        Z = kernel_embedding(outgoing).matrix
    H, _ = subfactor(Submodule(obj, Z), Submodule(obj, incoming))
    return H, Z, incoming


def ext(i: int, M: FPModule, N: FPModule) -> FPModule:
    if i < 0:
        raise ValueError("negative degree")
    P = free_resolution(M)
    ring = M.ring
    g = N.ngens
    Ni = power(N, P.rank(i))
    # Hom(d_i, N): N^{r_{i-1}} -> N^{r_i}; Hom(d_{i+1}, N): N^{r_i} -> N^{r_{i+1}}
    inc = P.d(i).transpose().kron(Mat.identity(ring, g)) if i >= 1 else Mat.zero(ring, 0, Ni.ngens)
    out = ModuleMorphism(Ni, power(N, P.rank(i + 1)), P.d(i + 1).transpose().kron(Mat.identity(ring, g)))
    H, _, _ = homology_of(Ni, inc, out)
    return simplify_presentation(H)[0]


def tor(i: int, M: FPModule, N: FPModule) -> FPModule:
    if i < 0:
        raise ValueError("negative degree")
    P = free_resolution(M)
    ring = M.ring
    g = N.ngens
    Ni = power(N, P.rank(i))
    inc = P.d(i + 1).kron(Mat.identity(ring, g))
    out = ModuleMorphism(Ni, power(N, P.rank(i - 1)), P.d(i).kron(Mat.identity(ring, g))) if i >= 1 else None
    H, _, _ = homology_of(Ni, inc, out)
    return simplify_presentation(H)[0]


def _dual_ext_nonzero(P: FreeResolution, i: int) -> bool:
    """Is Ext^i(module, D) nonzero?  Cheap test on a given resolution."""
    ring = P.module.ring
    r = P.rank(i)
    if r == 0:
        return False
    out = P.d(i + 1).transpose()
    Z = syzygies_rows(out) if out.ncols and not out.is_zero() else Mat.identity(ring, r)
    if Z.nrows == 0:
        return False
    B = P.d(i).transpose() if i >= 1 else Mat.zero(ring, 0, r)
    if B.nrows == 0:
        return True
    return not decide_zero_rows(Z, B).is_zero()


def _ext_dual_profile(M: FPModule):
    P = free_resolution(M)
    return [i for i in range(P.length + 1) if _dual_ext_nonzero(P, i)]


def grade(M: FPModule):
    if is_zero(M):
        return INFINITY
    nz = _ext_dual_profile(M)
    return nz[0]


def qbar(M: FPModule):
    if is_zero(M):
        return INFINITY
    nz = _ext_dual_profile(M)
    return nz[-1]


def auslander_dual(M: FPModule) -> FPModule:
    R = basis_rows(M.relations) if M.nrels else M.relations
    return FPModule(R.transpose())


def degree_of_torsion_freeness(M: FPModule):
    A = auslander_dual(M)
    nz = set(_ext_dual_profile(A))
    for i in range(global_dimension(M.ring) + 1):
        if i + 1 in nz:
            return i
    return INFINITY


def is_projective(M: FPModule) -> bool:
    """Split test: does the identity of M lift through the free cover?

    Looks for Y with R*Y*R = R, i.e. an idempotent projection onto the
    relation module, as a one-sided linear system in the entries of Y.
    """
    M2, _, _ = simplify_presentation(M)
    R = M2.relations.drop_zero_rows()
    ring = M.ring
    p, q = R.nrows, R.ncols
    if p == 0:
        return True
    rows = []
    for a in range(q):
        for b in range(p):
            rows.append([R[i, a] * R[b, j] for i in range(p) for j in range(q)])
    K = Mat(ring, q * p, p * q, rows)
    rhs = Mat(ring, 1, p * q, [[R[i, j] for i in range(p) for j in range(q)]])
    return solve_left(K, rhs) is not None


def projective_dimension(M: FPModule) -> int:
    """Largest i with Ext^i(M, D) nonzero.

    Over the rings in scope this equals the projective dimension; for the
    value 0 the answer is confirmed by the split test of :func:`is_projective`.
    """
    if is_zero(M):
        return 0
    k = qbar(M)
    if k == 0 and not is_projective(M):
        raise ArithmeticError("Ext criterion and split test disagree")
    return k


# --------------------------------------------------------------------------
# Cartan-Eilenberg resolution of a cochain complex

def _horseshoe(M: FPModule, resA: Resolution, resC: Resolution, pi: ModuleMorphism) -> Resolution:
    """Resolution of M from resolutions of a submodule A and the quotient C = pi(M).

    ``resA.eps`` has rows in M, ``resC.eps`` has rows in ``pi.target``.
    Differentials are [[dA, 0], [sigma, dC]] with the A-summand first.
    """
    ring = M.ring
    lam = pi.preimages(resC.eps) if resC.eps.nrows else Mat.zero(ring, 0, M.ngens)
    if lam is None:
        raise ValueError("quotient map is not surjective")
    eps = resA.eps.stack(lam)
    n = max(resA.length, resC.length)
    diffs = []
    sigma_prev = None
    for i in range(1, n + 1):
        dA, dC = resA.d(i), resC.d(i)
        if i == 1:
            rhs = dC * lam
            if resA.eps.nrows and rhs.nrows:
                X = solve_left(resA.eps.stack(M.relations), rhs)
                if X is None:
                    raise ValueError("horseshoe lift failed")
                sigma = -X.block(0, X.nrows, 0, resA.eps.nrows)
            else:
                sigma = Mat.zero(ring, dC.nrows, resA.rank(0))
        else:
            rhs = dC * sigma_prev
            dA_prev = resA.d(i - 1)
            if dA_prev.nrows and rhs.nrows:
                X = solve_left(dA_prev, rhs)
                if X is None:
                    raise ValueError("horseshoe lift failed")
                sigma = -X
            else:
                sigma = Mat.zero(ring, dC.nrows, resA.rank(i - 1))
        top = dA.augment(Mat.zero(ring, dA.nrows, resC.rank(i - 1)))
        bottom = sigma.augment(dC)
        diffs.append(top.stack(bottom))
        sigma_prev = sigma
    return Resolution(M, eps, diffs)


@dataclass
class CEResolution:
    """Cartan-Eilenberg resolution of a cochain complex Q^lo -> ... -> Q^hi.

    ``column[p]`` resolves Q^p with its summands ordered (B^p, H^p, B^{p+1});
    ``horizontal[p][k]`` is the map CE^{p,-k} -> CE^{p+1,-k} (no signs).
    """
    objects: dict
    columns: dict
    horizontal: dict
    pieces: dict
    lo: int
    hi: int

    def rank(self, p, k):
        c = self.columns.get(p)
        return c.rank(k) if c is not None else 0

    def vertical(self, p, k):
        """d_k of column p: CE^{p,-k} -> CE^{p,-k+1}."""
        return self.columns[p].d(k)

    def length(self):
        return max((c.length for c in self.columns.values()), default=0)


def cartan_eilenberg(objects: dict, maps: dict) -> CEResolution:
    """CE resolution of the cochain complex with ``objects[p]`` and ``maps[p]: Q^p -> Q^{p+1}``.

    ``maps[p]`` are ModuleMorphisms; missing entries are zero.
    """
    ps = sorted(objects)
    lo, hi = ps[0], ps[-1]
    ring = objects[lo].ring
    for p in range(lo, hi):
        if p in maps and p + 1 in maps:
            comp = maps[p].matrix * maps[p + 1].matrix
            if not decide_zero_rows(comp, objects[p + 2].relations).is_zero():
                raise ValueError("not a complex: consecutive maps do not compose to zero")

    def delta(p):
        if p in maps:
            return maps[p]
        return None

    # B^p = image of delta^{p-1} in Q^p; Z^p = kernel of delta^p
    resB = {}
    resH = {}
    Zgens = {}
    for p in range(lo, hi + 2):
        Q = objects.get(p)
        prev = delta(p - 1)
        if Q is None:
            resB[p] = None
            continue
        G = prev.matrix if prev is not None else Mat.zero(ring, 0, Q.ngens)
        resB[p] = resolve_submodule(G, Q)
    for p in range(lo, hi + 1):
        Q = objects[p]
        d = delta(p)
        if d is None:
            Z = Mat.identity(ring, Q.ngens)
        else:
            Z = kernel_embedding(d).matrix
        Zgens[p] = Z
    columns = {}
    pieces = {}
    for p in range(lo, hi + 1):
        Q = objects[p]
        Bp = resB[p]
        # Z^p presented on its own generators; B^p sits inside via eps rows
        Zmod = FPModule(_relations_in(Zgens[p], Q))
        # B^p as a submodule of Z^p: express eps_B in Z-generators
        epsB_in_Z = _express(Bp.eps, Zgens[p], Q)
        resB_in_Z = Resolution(Zmod, epsB_in_Z, Bp.diffs)
        # H^p = Z^p / B^p with quotient map identity on Z generators
        Hmod = FPModule(Zmod.relations.stack(epsB_in_Z))
        resH[p] = resolve_submodule(Mat.identity(ring, Hmod.ngens), Hmod)
        piH = ModuleMorphism(Zmod, Hmod, Mat.identity(ring, Zmod.ngens))
        resZ = _horseshoe(Zmod, resB_in_Z, resH[p], piH)
        # embed Z^p into Q^p
        resZ_in_Q = Resolution(Q, resZ.eps * Zgens[p], resZ.diffs)
        # quotient Q^p -> B^{p+1}
        nxt = resB.get(p + 1)
        d = delta(p)
        if nxt is None or d is None:
            Qn = objects.get(p + 1) or FPModule.zero(ring)
            nxt = Resolution(Qn, Mat.zero(ring, 0, Qn.ngens), [])
            d = ModuleMorphism(Q, Qn, Mat.zero(ring, Q.ngens, Qn.ngens))
        col = _horseshoe(Q, resZ_in_Q, nxt, d)
        columns[p] = col
        pieces[p] = (Bp, resH[p], nxt)
    # horizontal maps: project onto the B^{p+1} summand, include as B^{p+1} summand of p+1
    horizontal = {}
    for p in range(lo, hi):
        Bp, Hp, Bn = pieces[p]
        _, _, _ = pieces[p + 1]
        col_p, col_n = columns[p], columns[p + 1]
        hmaps = {}
        for k in range(0, max(col_p.length, col_n.length) + 1):
            rb, rh, rn = Bp.rank(k), Hp.rank(k), Bn.rank(k)
            m = Mat.zero(ring, col_p.rank(k), col_n.rank(k))
            rows = [list(r) for r in m.rows]
            for t in range(rn):
                rows[rb + rh + t][t] = ring.one
            hmaps[k] = Mat(ring, col_p.rank(k), col_n.rank(k), rows)
        horizontal[p] = hmaps
    return CEResolution(objects, columns, horizontal, pieces, lo, hi)


def _relations_in(G: Mat, Q: FPModule) -> Mat:
    if G.nrows == 0:
        return Mat.zero(G.ring, 0, 0)
    S = syzygies_rows(G.stack(Q.relations)) if Q.nrels else syzygies_rows(G)
    return S.block(0, S.nrows, 0, G.nrows).drop_zero_rows()


def _express(V: Mat, G: Mat, Q: FPModule) -> Mat:
    """Coefficients c with c * G == V modulo the relations of Q."""
    if V.nrows == 0:
        return Mat.zero(V.ring, 0, G.nrows)
    X = solve_left(G.stack(Q.relations), V)
    if X is None:
        raise ValueError("elements are not in the submodule")
    return X.block(0, X.nrows, 0, G.nrows)
