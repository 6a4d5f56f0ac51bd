"""Finitely presented modules, their morphisms and submodule arithmetic.

A module is the cokernel of its relations matrix: ``M = D^{1 x q} / rows(R)``.
Elements of ``M`` are written as row vectors in the ``q`` generators.
"""
from __future__ import annotations

from itertools import combinations

from .linalg import basis_rows, decide_zero_rows, row_rank, solve_left, syzygies_rows
from .matrix import Mat
from .rings import Ring

__all__ = [
    "FPModule", "ModuleMorphism", "Submodule", "cokernel", "kernel_embedding",
    "image_embedding", "intersect", "submodule_sum", "smaller_presentation",
    "simplify_presentation", "rank", "fitting_ideal", "is_zero", "subfactor",
    "direct_sum", "determinant",
]


class FPModule:
    """Module presented by ``relations`` (p x q): q generators, p relations."""

    __slots__ = ("ring", "relations", "name")

    def __init__(self, relations: Mat, name=None):
        self.ring = relations.ring
        self.relations = relations
        self.name = name

    @classmethod
    def free(cls, ring: Ring, n: int, name=None):
        return cls(Mat.zero(ring, 0, n), name)

    @classmethod
    def zero(cls, ring: Ring):
        return cls(Mat.zero(ring, 0, 0))

    @classmethod
    def from_rows(cls, ring, rows, ncols=None, name=None):
        return cls(Mat.from_rows(ring, rows, ncols), name)

    @property
    def ngens(self):
        return self.relations.ncols

    @property
    def nrels(self):
        return self.relations.nrows

    def identity(self):
        return ModuleMorphism(self, self, Mat.identity(self.ring, self.ngens))

    def is_zero(self):
        return is_zero(self)

    def rank(self):
        return rank(self)

    def whole(self):
        return Submodule(self, Mat.identity(self.ring, self.ngens))

    def zero_submodule(self):
        return Submodule(self, Mat.zero(self.ring, 0, self.ngens))

    def reduce(self, v: Mat) -> Mat:
        """Normal forms of elements (rows of ``v``) of this module."""
        return decide_zero_rows(v, self.relations)

    def is_free_presentation(self):
        return self.nrels == 0 or self.relations.is_zero()

    def __eq__(self, other):
        return isinstance(other, FPModule) and self.relations == other.relations

    def __hash__(self):
        return hash(self.relations)

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<FPModule{label} over {self.ring}: {self.ngens} generators, {self.nrels} relations>"


class ModuleMorphism:
    """Morphism given by a matrix on generators (g_source x g_target)."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: FPModule, target: FPModule, matrix: Mat, check=False):
        if matrix.shape != (source.ngens, target.ngens):
            raise ValueError(
                f"matrix shape {matrix.shape} does not fit {source.ngens} -> {target.ngens} generators")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check and not self.is_well_defined():
            raise ValueError("morphism is not well defined")

    @property
    def ring(self):
        return self.source.ring

    def is_well_defined(self):
        img = self.source.relations * self.matrix
        return decide_zero_rows(img, self.target.relations).is_zero()

    def compose(self, first: "ModuleMorphism") -> "ModuleMorphism":
        """``self o first`` (apply ``first``, then ``self``)."""
        if first.target.ngens != self.source.ngens:
            raise ValueError("morphisms are not composable")
        return ModuleMorphism(first.source, self.target, first.matrix * self.matrix)

    def __add__(self, other):
        return ModuleMorphism(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other):
        return ModuleMorphism(self.source, self.target, self.matrix - other.matrix)

    def __neg__(self):
        return ModuleMorphism(self.source, self.target, -self.matrix)

    def is_zero(self):
        return decide_zero_rows(self.matrix, self.target.relations).is_zero()

    def _image_matrix(self):
        return self.matrix.stack(self.target.relations)

    def is_epi(self):
        I = Mat.identity(self.ring, self.target.ngens)
        return decide_zero_rows(I, self._image_matrix()).is_zero()

    def is_mono(self):
        return kernel_embedding(self).source.is_zero()

    def is_iso(self):
        return self.is_epi() and self.is_mono()

    def preimages(self, v: Mat):
        """Rows x with x * matrix == v modulo target relations, or None."""
        X = solve_left(self._image_matrix(), v)
        if X is None:
            return None
        return X.block(0, X.nrows, 0, self.source.ngens)

    def inverse(self):
        """Inverse of an isomorphism."""
        X = self.preimages(Mat.identity(self.ring, self.target.ngens))
        if X is None:
            raise ValueError("morphism is not surjective")
        return ModuleMorphism(self.target, self.source, X)

    def image(self):
        return Submodule(self.target, self.matrix)

    def __repr__(self):
        return f"<ModuleMorphism {self.source.ngens} -> {self.target.ngens} generators>"


class Submodule:
    """Submodule of ``ambient`` generated by the rows of ``generators``."""

    __slots__ = ("ambient", "generators", "_basis")

    def __init__(self, ambient: FPModule, generators: Mat):
        if generators.ncols != ambient.ngens:
            raise ValueError("generators do not live in the ambient module")
        self.ambient = ambient
        self.generators = generators
        self._basis = None

    @property
    def ring(self):
        return self.ambient.ring

    def full_matrix(self):
        """Generators stacked with the ambient relations."""
        return self.generators.stack(self.ambient.relations)

    def basis(self):
        if self._basis is None:
            self._basis = basis_rows(self.full_matrix())
        return self._basis

    def contains_rows(self, v: Mat):
        return decide_zero_rows(v, self.full_matrix()).is_zero()

    def __le__(self, other: "Submodule"):
        _same_ambient(self, other)
        return other.contains_rows(self.generators)

    def __eq__(self, other):
        if not isinstance(other, Submodule):
            return NotImplemented
        _same_ambient(self, other)
        return self.basis() == other.basis()

    def __hash__(self):
        return hash(self.basis())

    def __add__(self, other):
        return submodule_sum(self, other)

    def __and__(self, other):
        return intersect(self, other)

    def is_zero(self):
        return decide_zero_rows(self.generators, self.ambient.relations).is_zero()

    def is_whole(self):
        I = Mat.identity(self.ring, self.ambient.ngens)
        return self.contains_rows(I)

    def reduced(self):
        """Same submodule with generators reduced modulo the ambient and zero rows dropped."""
        G = decide_zero_rows(self.generators, self.ambient.relations).drop_zero_rows()
        seen = []
        for r in G.rows:
            if r not in seen:
                seen.append(r)
        return Submodule(self.ambient, Mat(self.ring, len(seen), self.ambient.ngens, seen))

    def as_module(self):
        """Presentation of the submodule itself, with its embedding."""
        return subfactor(self, self.ambient.zero_submodule())

    def __repr__(self):
        return f"<Submodule with {self.generators.nrows} generators of {self.ambient!r}>"


def _same_ambient(U, V):
    if U.ambient.relations != V.ambient.relations:
        raise ValueError("submodules live in different ambient modules")


# --------------------------------------------------------------------------
# constructions

def cokernel(phi: ModuleMorphism):
    """Cokernel of ``phi`` and the natural epimorphism target -> cokernel."""
    C = FPModule(phi.matrix.stack(phi.target.relations))
    return C, ModuleMorphism(phi.target, C, Mat.identity(phi.ring, C.ngens))


def _clean_rows(G: Mat, R: Mat) -> Mat:
    """Reduce rows modulo R, drop zero and repeated rows."""
    if G.nrows == 0:
        return G
    G = decide_zero_rows(G, R) if R.nrows else G
    seen = []
    for r in G.rows:
        if any(r) and r not in seen:
            seen.append(r)
    return Mat(G.ring, len(seen), G.ncols, seen)


def _relations_among(G: Mat, R: Mat) -> Mat:
    """Rows c with c * G in the row module of R."""
    k = G.nrows
    if k == 0:
        return Mat.zero(G.ring, 0, 0)
    S = syzygies_rows(G.stack(R))
    return S.block(0, S.nrows, 0, k).drop_zero_rows()


def kernel_embedding(phi: ModuleMorphism) -> ModuleMorphism:
    """Monomorphism from the kernel of ``phi`` into its source."""
    src = phi.source
    ring = phi.ring
    g = src.ngens
    if g == 0:
        return ModuleMorphism(FPModule.zero(ring), src, Mat.zero(ring, 0, 0))
    S = syzygies_rows(phi.matrix.stack(phi.target.relations))
    X = _clean_rows(S.block(0, S.nrows, 0, g), src.relations)
    K = FPModule(_relations_among(X, src.relations) if X.nrows else Mat.zero(ring, 0, 0))
    return ModuleMorphism(K, src, X)


def image_embedding(phi: ModuleMorphism):
    """Epi-mono factorization ``phi = mu o pi`` through the image."""
    ring = phi.ring
    I = FPModule(_relations_among(phi.matrix, phi.target.relations)
                 if phi.source.ngens else Mat.zero(ring, 0, 0))
    pi = ModuleMorphism(phi.source, I, Mat.identity(ring, phi.source.ngens))
    mu = ModuleMorphism(I, phi.target, phi.matrix)
    return pi, mu


def intersect(U: Submodule, V: Submodule) -> Submodule:
    _same_ambient(U, V)
    k = U.generators.nrows
    if k == 0 or V.generators.nrows == 0:
        return U.ambient.zero_submodule()
    S = syzygies_rows(U.generators.stack(V.generators, U.ambient.relations))
    A = S.block(0, S.nrows, 0, k)
    G = _clean_rows(A * U.generators, U.ambient.relations)
    return Submodule(U.ambient, G)


def submodule_sum(U: Submodule, V: Submodule) -> Submodule:
    _same_ambient(U, V)
    return Submodule(U.ambient, U.generators.stack(V.generators))


def subfactor(U: Submodule, V: Submodule):
    """Presentation of ``(U + V) / V`` on the generators of ``U``.

    Returns ``(module, generator_matrix)`` where the matrix expresses the
    module's generators in the ambient generators.
    """
    _same_ambient(U, V)
    ring = U.ring
    G = U.generators
    if G.nrows == 0:
        return FPModule.zero(ring), G
    R = V.generators.stack(U.ambient.relations)
    return FPModule(_relations_among(G, R)), G


def direct_sum(modules):
    ring = modules[0].ring
    return FPModule(Mat.block_diagonal(ring, [M.relations for M in modules]))


# --------------------------------------------------------------------------
# presentations

def smaller_presentation(M: FPModule):
    """Eliminate generators through unit entries of the relations.

    Returns ``(M2, iota, iota_inv)`` with ``iota: M2 -> M`` and
    ``iota_inv: M -> M2`` mutually inverse isomorphisms.
    """
    ring = M.ring
    R = [list(r) for r in M.relations.rows if any(r)]
    q = M.ngens
    # to_old[k]: generator k of the current presentation as a row in old generators
    # from_old[j]: old generator j as a row in current generators
    keep = list(range(q))
    from_old = [[ring.one if i == j else ring.zero for i in range(q)] for j in range(q)]
    changed = True
    while changed:
        changed = False
        for i, row in enumerate(R):
            j = next((j for j, a in enumerate(row) if a and ring.is_unit(a)), None)
            if j is None:
                continue
            u_inv = ring.unit_inverse(row[j])
            # e_j = -u^{-1} * sum_{k != j} row[k] e_k
            sub = [-(u_inv * a) if a else ring.zero for a in row]
            sub[j] = ring.zero
            newR = []
            for r2, other in enumerate(R):
                if r2 == i:
                    continue
                c = other[j]
                if c:
                    other = [a + c * b if b else a for a, b in zip(other, sub)]
                del other[j]
                if any(other):
                    newR.append(other)
            for fr in from_old:
                c = fr[j]
                if c:
                    for k, b in enumerate(sub):
                        if b:
                            fr[k] = fr[k] + c * b
                del fr[j]
            del keep[j]
            del sub[j]
            R = newR
            changed = True
            break
    n = len(keep)
    M2 = FPModule(Mat(ring, len(R), n, R) if R else Mat.zero(ring, 0, n), M.name)
    to_old = Mat(ring, n, q, [[ring.one if c == k else ring.zero for c in range(q)] for k in keep])
    iota = ModuleMorphism(M2, M, to_old)
    iota_inv = ModuleMorphism(M, M2, Mat(ring, q, n, from_old))
    return M2, iota, iota_inv


def simplify_presentation(M: FPModule, rounds=8):
    """Smaller presentation using unit elimination and canonical relation bases.

    Same contract as :func:`smaller_presentation`.
    """
    cur, iota, iota_inv = smaller_presentation(M)
    to_M, from_M = iota.matrix, iota_inv.matrix
    ring = M.ring
    for _ in range(rounds):
        if cur.nrels == 0:
            break
        B = basis_rows(cur.relations)
        if not any(ring.is_unit(a) for r in B.rows for a in r if a):
            if B.nrows <= cur.nrels:
                cur = FPModule(B, M.name)
            break
        nxt, i2, j2 = smaller_presentation(FPModule(B, M.name))
        to_M = i2.matrix * to_M
        from_M = from_M * j2.matrix
        cur = nxt
    return cur, ModuleMorphism(cur, M, to_M), ModuleMorphism(M, cur, from_M)


# --------------------------------------------------------------------------
# invariants

def is_zero(M: FPModule) -> bool:
    if M.ngens == 0:
        return True
    return decide_zero_rows(Mat.identity(M.ring, M.ngens), M.relations).is_zero()


def rank(M: FPModule) -> int:
    return M.ngens - row_rank(M.relations)


def determinant(rows, ring):
    """Fraction-free (Bareiss) determinant of a square list-of-lists."""
    n = len(rows)
    if n == 0:
        return ring.one
    a = [list(r) for r in rows]
    sign = 1
    prev = ring.one
    exact = _exact_division(ring)
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return ring.zero
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                v = akk * a[i][j]
                if aik and a[k][j]:
                    v = v - aik * a[k][j]
                a[i][j] = exact(v, prev) if v else v
            a[i][k] = ring.zero
        prev = akk
    d = a[n - 1][n - 1]
    return -d if sign < 0 else d


def _exact_division(ring):
    from .rings import IntegerRing, PolynomialRing
    if isinstance(ring, PolynomialRing):
        return lambda a, b: a.exact_div(b)
    if isinstance(ring, IntegerRing):
        return lambda a, b: a // b
    return lambda a, b: a / b


def _column_blocks(R: Mat):
    """Split the columns into groups that share no row of ``R``."""
    parent = list(range(R.ncols))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for row in R.rows:
        nz = [j for j, a in enumerate(row) if a]
        for j in nz[1:]:
            parent[find(j)] = find(nz[0])
    groups = {}
    for j in range(R.ncols):
        groups.setdefault(find(j), []).append(j)
    return list(groups.values())


def _minors_ideal(rows, q, k, ring):
    """Basis of the ideal of k-minors of a matrix with q columns (as a column Mat)."""
    if k <= 0:
        return Mat.identity(ring, 1)
    if k > len(rows):
        return Mat.zero(ring, 0, 1)
    gens = []
    for cols in combinations(range(q), k):
        for rs in combinations(range(len(rows)), k):
            d = determinant([[rows[r][c] for c in cols] for r in rs], ring)
            if d:
                if ring.is_unit(d):
                    return Mat.identity(ring, 1)
                gens.append([d])
        if len(gens) > 64:
            cur = basis_rows(Mat(ring, len(gens), 1, gens))
            if cur.nrows == 1 and ring.is_unit(cur[0, 0]):
                return cur
            gens = [list(r) for r in cur.rows]
    if not gens:
        return Mat.zero(ring, 0, 1)
    return basis_rows(Mat(ring, len(gens), 1, gens))


def _ideal_product(A: Mat, B: Mat, ring) -> Mat:
    if A.nrows == 0 or B.nrows == 0:
        return Mat.zero(ring, 0, 1)
    return basis_rows(Mat(ring, A.nrows * B.nrows, 1,
                          [[a[0] * b[0]] for a in A.rows for b in B.rows]))


def _ideal_sum(A: Mat, B: Mat, ring) -> Mat:
    if A.nrows == 0:
        return B
    if B.nrows == 0:
        return A
    return basis_rows(A.stack(B))


def fitting_ideal(M: FPModule, i: int) -> Submodule:
    """The i-th Fitting ideal as a submodule of the free module of rank 1.

    The presentation is split into blocks that share no generators; the
    ideal of a direct sum is ``F_k(A + B) = sum_{a+b=k} F_a(A) F_b(B)``.
    """
    ring = M.ring
    D1 = FPModule.free(ring, 1)
    M2, _, _ = simplify_presentation(M)
    q = M2.ngens
    if q - i <= 0:
        return Submodule(D1, Mat.identity(ring, 1))
    R = M2.relations.drop_zero_rows()
    blocks = []
    for cols in _column_blocks(R) if R.nrows else [[j] for j in range(q)]:
        rows = [[r[c] for c in cols] for r in R.rows if any(r[c] for c in cols)]
        blocks.append((rows, len(cols)))
    # acc[k]: F_k of the blocks seen so far, for k = 0..i
    acc = [Mat.identity(ring, 1)] * (i + 1)
    for rows, n in blocks:
        F = [_minors_ideal(rows, n, n - k, ring) for k in range(i + 1)]
        nxt = []
        for k in range(i + 1):
            ideal = Mat.zero(ring, 0, 1)
            for a in range(k + 1):
                ideal = _ideal_sum(ideal, _ideal_product(acc[a], F[k - a], ring), ring)
            nxt.append(ideal)
        acc = nxt
    return Submodule(D1, acc[i])
