"""Upper triangular presentations adapted to a filtration.

Given an ascending filtration system of ``M = coker(R)`` the module is
re-presented by a block upper triangular matrix ``M_F`` whose diagonal
blocks present the graded parts, together with an isomorphism
``coker(M_F) -> M``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .genmor import FiltrationSystem, GeneralizedMorphism, generalized_inverse, lift, \
    validate_filtration_system
from .linalg import solve_left
from .matrix import Mat
from .modules import FPModule, ModuleMorphism, kernel_embedding

__all__ = ["TriangularPresentation", "isomorphism_of_filtration", "verify_isomorphism",
           "InvalidFiltration"]


class InvalidFiltration(ValueError):
    pass


@dataclass
class TriangularPresentation:
    """``matrix`` presents ``coker(matrix)``; ``iso`` maps it onto the original module.

    ``blocks`` lists ``(degree, diagonal block, (row0, row1), (col0, col1))``
    from the top-left corner (highest degree) downwards.
    """
    matrix: Mat
    iso: ModuleMorphism
    blocks: list
    extra: dict = field(default_factory=dict)

    @property
    def module(self) -> FPModule:
        return self.iso.source

    def diagonal_block(self, degree) -> Mat:
        for p, Mp, _, _ in self.blocks:
            if p == degree:
                return Mp
        raise KeyError(degree)

    def column_boundaries(self):
        return [cols for _, _, _, cols in self.blocks]

    def row_boundaries(self):
        return [rows for _, _, rows, _ in self.blocks]

    def is_upper_triangular(self) -> bool:
        """Every entry below a diagonal block, left of its columns, is zero."""
        for _, _, (r0, r1), (c0, _) in self.blocks:
            for i in range(r0, r1):
                if any(self.matrix[i, j] for j in range(0, c0)):
                    return False
        return True


def verify_isomorphism(F: Mat, T: Mat, M: FPModule) -> dict:
    """Well-definedness, injectivity and surjectivity of ``coker F -> M`` with matrix T."""
    phi = ModuleMorphism(FPModule(F), M, T)
    return {"well_defined": phi.is_well_defined(), "mono": phi.is_mono(), "epi": phi.is_epi()}


def _solve_mod(G: Mat, R: Mat, rhs: Mat) -> Mat:
    """Coefficients c with c * G == rhs modulo the row module of R."""
    ring = rhs.ring
    if rhs.nrows == 0:
        return Mat.zero(ring, 0, G.nrows)
    if G.nrows == 0:
        return Mat.zero(ring, rhs.nrows, 0)
    A = G.stack(R) if R.nrows else G
    X = solve_left(A, rhs)
    if X is None:
        raise ArithmeticError("internal lift failed")
    return X.block(0, X.nrows, 0, G.nrows)


def isomorphism_of_filtration(fs: FiltrationSystem, M: FPModule | None = None,
                              check=True) -> TriangularPresentation:
    """Triangular presentation of the target of an ascending filtration system."""
    if M is None:
        M = fs.target
    if fs.direction != "ascending":
        raise InvalidFiltration("an ascending filtration system is required")
    if M.relations != fs.target.relations:
        raise InvalidFiltration("filtration system has a different target")
    if check:
        bad = validate_filtration_system(fs)
        if bad:
            raise InvalidFiltration("; ".join(bad))
    ring = M.ring
    degrees = sorted(fs.degrees, reverse=True)

    # current lower module F_p M with its embedding J into M
    lower = M
    J = Mat.identity(ring, M.ngens)
    top_rows = []          # relation rows of the finished part, over (done cols | lower cols)
    done_cols = 0
    T_rows = Mat.zero(ring, 0, M.ngens)
    blocks = []
    row_count = 0
    for p in degrees:
        psi = fs[p]
        Mp = psi.source
        gp = Mp.ngens
        Jm = GeneralizedMorphism.from_morphism(ModuleMorphism(lower, M, J))
        mu = lift(psi, Jm, check=False)
        pi = generalized_inverse(mu)
        if not pi.has_zero_aid():
            raise ArithmeticError("inverse of a generalized embedding is not ordinary")
        pi = pi.to_morphism()
        iota = kernel_embedding(pi)
        Fl = iota.source
        eta0 = pi.preimages(Mat.identity(ring, gp)) if gp else Mat.zero(ring, 0, lower.ngens)
        if eta0 is None:
            raise ArithmeticError("graded part is not a quotient of the filtration step")
        rel_p = Mp.relations
        eta = _solve_mod(iota.matrix, lower.relations, rel_p * eta0)
        rho = (-eta0).stack(iota.matrix) if gp + Fl.ngens else Mat.zero(ring, 0, lower.ngens)
        new_lower_gens = gp + Fl.ngens
        # old lower generators expressed in the new ones (inverse of rho)
        kappa_rows = rel_p.augment(eta) if rel_p.nrows else Mat.zero(ring, 0, new_lower_gens)
        step = FPModule(kappa_rows.stack(
            Mat.zero(ring, Fl.nrels, gp).augment(Fl.relations)) if Fl.nrels or kappa_rows.nrows
            else Mat.zero(ring, 0, new_lower_gens))
        if lower.ngens:
            S = ModuleMorphism(step, lower, rho).inverse().matrix
        else:
            S = Mat.zero(ring, 0, new_lower_gens)
        new_top = []
        for r in top_rows:
            left = r.block(0, 1, 0, done_cols)
            right = r.block(0, 1, done_cols, r.ncols) * S
            new_top.append(left.augment(right))
        width = done_cols + new_lower_gens
        for i in range(kappa_rows.nrows):
            new_top.append(Mat.zero(ring, 1, done_cols).augment(kappa_rows.block(i, i + 1, 0, new_lower_gens)))
        blocks.append((p, rel_p, (row_count, row_count + rel_p.nrows), (done_cols, done_cols + gp)))
        row_count += rel_p.nrows
        T_rows = T_rows.stack((-eta0) * J) if gp else T_rows
        J = iota.matrix * J
        top_rows = new_top
        done_cols += gp
        lower = Fl
    if lower.ngens and not lower.is_zero():
        raise ArithmeticError("filtration does not exhaust the module")
    # drop the columns of the (zero) remainder
    rows = [r.block(0, 1, 0, done_cols) for r in top_rows]
    MF = rows[0].stack(*rows[1:]) if rows else Mat.zero(ring, 0, done_cols)
    iso = ModuleMorphism(FPModule(MF), M, T_rows)
    return TriangularPresentation(MF, iso, blocks)
