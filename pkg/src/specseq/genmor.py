"""Generalized morphisms: a morphism into a quotient ``T/L`` together with ``L``.

A generalized morphism ``psi: S -> T`` is stored as the matrix of the
associated morphism ``S -> T/L`` (rows = images of the generators of S,
written in the generators of T) and a generator matrix of the aid ``L <= T``.
An ordinary morphism is the special case ``L = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .linalg import basis_rows, decide_zero_rows, solve_left, syzygies_rows
from .matrix import Mat
from .modules import FPModule, ModuleMorphism, Submodule, intersect, kernel_embedding

__all__ = [
    "GeneralizedMorphism", "LiftingError", "coarsen", "is_effective_coarsening", "compose", "lifts", "lift",
    "generalized_inverse", "quasi_equal", "FiltrationSystem", "validate_filtration_system",
]


class LiftingError(ArithmeticError):
    pass


def _stack_nonempty(ncols, ring, *mats):
    mats = [m for m in mats if m.nrows]
    if not mats:
        return Mat.zero(ring, 0, ncols)
    return mats[0].stack(*mats[1:]) if len(mats) > 1 else mats[0]


class GeneralizedMorphism:
    """``(psi_bar, L)`` with ``psi_bar: source -> target / L``."""

    __slots__ = ("source", "target", "matrix", "aid_generators", "_aid_basis")

    def __init__(self, source: FPModule, target: FPModule, matrix: Mat, aid: Mat | None = None):
        ring = source.ring
        if matrix.shape != (source.ngens, target.ngens):
            raise ValueError(f"matrix shape {matrix.shape} does not fit "
                             f"{source.ngens} -> {target.ngens} generators")
        if aid is None:
            aid = Mat.zero(ring, 0, target.ngens)
        elif isinstance(aid, Submodule):
            aid = aid.generators
        if aid.ncols != target.ngens:
            raise ValueError("aid does not live in the target")
        self.source = source
        self.target = target
        self.matrix = matrix
        self.aid_generators = aid
        self._aid_basis = None

    @classmethod
    def from_morphism(cls, phi: ModuleMorphism, aid=None):
        return cls(phi.source, phi.target, phi.matrix, aid)

    @classmethod
    def identity(cls, M: FPModule, aid=None):
        return cls(M, M, Mat.identity(M.ring, M.ngens), aid)

    @classmethod
    def zero(cls, S: FPModule, T: FPModule, aid=None):
        return cls(S, T, Mat.zero(S.ring, S.ngens, T.ngens), aid)

    @property
    def ring(self):
        return self.source.ring

    # aid bookkeeping -----------------------------------------------------

    def _aid_with_relations(self):
        return _stack_nonempty(self.target.ngens, self.ring, self.aid_generators,
                               self.target.relations)

    @property
    def aid(self) -> Mat:
        """Canonical generators of ``L + relations`` (empty when ``L = 0``)."""
        if self._aid_basis is None:
            G = self.aid_generators
            if G.nrows == 0 or decide_zero_rows(G, self.target.relations).is_zero():
                self._aid_basis = Mat.zero(self.ring, 0, self.target.ngens)
            else:
                self._aid_basis = basis_rows(self._aid_with_relations())
        return self._aid_basis

    def aid_submodule(self) -> Submodule:
        return Submodule(self.target, self.aid_generators)

    def has_zero_aid(self):
        return self.aid.nrows == 0

    # derived data ----------------------------------------------------------

    def associated_target(self) -> FPModule:
        return FPModule(self._aid_with_relations())

    def associated(self) -> ModuleMorphism:
        """The ordinary morphism ``source -> target / L``."""
        return ModuleMorphism(self.source, self.associated_target(), self.matrix)

    def is_well_defined(self):
        if self.source.nrels == 0:
            return True
        img = self.source.relations * self.matrix
        return decide_zero_rows(img, self._aid_with_relations()).is_zero()

    def kernel(self) -> ModuleMorphism:
        return kernel_embedding(self.associated())

    def combined_image(self) -> Submodule:
        return Submodule(self.target, self.matrix.stack(self.aid_generators))

    def is_mono(self):
        return self.kernel().source.is_zero()

    def is_epi(self):
        return self.combined_image().is_whole()

    def is_iso(self):
        return self.is_epi() and self.is_mono()

    def is_ordinary(self):
        return self.has_zero_aid()

    def to_morphism(self) -> ModuleMorphism:
        if not self.has_zero_aid():
            raise ValueError("generalized morphism has a nonzero aid")
        return ModuleMorphism(self.source, self.target, self.matrix)

    # arithmetic ------------------------------------------------------------

    def _check_summable(self, other):
        if self.source.ngens != other.source.ngens or self.target != other.target:
            raise ValueError("generalized morphisms have different source or target")
        if self.aid != other.aid:
            raise ValueError("generalized morphisms are not summable: aids differ")

    def __add__(self, other):
        self._check_summable(other)
        return GeneralizedMorphism(self.source, self.target, self.matrix + other.matrix,
                                   self.aid_generators)

    def __sub__(self, other):
        self._check_summable(other)
        return GeneralizedMorphism(self.source, self.target, self.matrix - other.matrix,
                                   self.aid_generators)

    def __neg__(self):
        return GeneralizedMorphism(self.source, self.target, -self.matrix, self.aid_generators)

    def scale(self, c):
        return GeneralizedMorphism(self.source, self.target, self.matrix.scale(c),
                                   self.aid_generators)

    def compose(self, first: "GeneralizedMorphism") -> "GeneralizedMorphism":
        """``self o first``."""
        return compose(self, first)

    def __repr__(self):
        kind = "ordinary" if self.has_zero_aid() else f"aid of {self.aid.nrows} generators"
        return (f"<GeneralizedMorphism {self.source.ngens} -> {self.target.ngens} "
                f"generators, {kind}>")


def _as_gm(x):
    if isinstance(x, GeneralizedMorphism):
        return x
    if isinstance(x, ModuleMorphism):
        return GeneralizedMorphism.from_morphism(x)
    raise TypeError(f"expected a (generalized) morphism, got {type(x).__name__}")


def _aid_matrix(L, target):
    if isinstance(L, Submodule):
        if L.ambient.relations != target.relations:
            raise ValueError("aid lives in a different module")
        return L.generators
    return L


def coarsen(psi: GeneralizedMorphism, L) -> GeneralizedMorphism:
    """Same associated matrix, aid enlarged to ``L``."""
    L = _aid_matrix(L, psi.target)
    if psi.aid_generators.nrows:
        R = _stack_nonempty(psi.target.ngens, psi.ring, L, psi.target.relations)
        if R.nrows == 0 or not decide_zero_rows(psi.aid_generators, R).is_zero():
            raise ValueError("the new aid does not contain the old one")
    return GeneralizedMorphism(psi.source, psi.target, psi.matrix, L)


def is_effective_coarsening(psi: GeneralizedMorphism, L) -> bool:
    """``Img psi  meet  L == aid(psi)``."""
    L = _aid_matrix(L, psi.target)
    return _meet_is_aid(psi, L)


def _meet_is_aid(psi, L):
    if L.nrows == 0:
        return True
    T = psi.target
    meet = intersect(psi.combined_image(), Submodule(T, L))
    if meet.generators.nrows == 0:
        return True
    return decide_zero_rows(meet.generators, psi._aid_with_relations()).is_zero()


def compose(psi, phi) -> GeneralizedMorphism:
    """``psi o phi``: matrix product, aid ``L_psi + psi(L_phi)``."""
    psi, phi = _as_gm(psi), _as_gm(phi)
    if phi.target.ngens != psi.source.ngens:
        raise ValueError("generalized morphisms are not composable")
    aid = psi.aid_generators
    if phi.aid_generators.nrows:
        extra = phi.aid_generators * psi.matrix
        aid = extra if aid.nrows == 0 else aid.stack(extra)
    return GeneralizedMorphism(phi.source, psi.target, phi.matrix * psi.matrix, aid)


def _common_aid(a, b):
    ring = a.ring
    return _stack_nonempty(a.target.ngens, ring, a.aid_generators, b.aid_generators)


def lifts(beta, gamma) -> bool:
    """True if ``beta`` lifts ``gamma`` (conditions (im) and (eff))."""
    beta, gamma = _as_gm(beta), _as_gm(gamma)
    if beta.target.relations != gamma.target.relations:
        raise ValueError("generalized morphisms have different targets")
    L = _common_aid(beta, gamma)
    big = _stack_nonempty(beta.target.ngens, beta.ring, beta.matrix, L, beta.target.relations)
    if gamma.matrix.nrows and not decide_zero_rows(gamma.matrix, big).is_zero():
        return False
    return _meet_is_aid(gamma, L)


def lift(gamma, beta, check=True) -> GeneralizedMorphism:
    """The lift ``beta^{-1} o gamma`` normalized by the two preimage conditions."""
    beta, gamma = _as_gm(beta), _as_gm(gamma)
    if beta.target.relations != gamma.target.relations:
        raise ValueError("generalized morphisms have different targets")
    if check and not lifts(beta, gamma):
        raise LiftingError("lifting condition fails")
    ring = beta.ring
    T = beta.target
    L = _common_aid(beta, gamma)
    gb = beta.source.ngens
    stacked = _stack_nonempty(T.ngens, ring, beta.matrix, L, T.relations)
    if gb == 0:
        return GeneralizedMorphism(gamma.source, beta.source,
                                   Mat.zero(ring, gamma.source.ngens, 0))
    X = solve_left(stacked, gamma.matrix)
    if X is None:
        raise LiftingError("lifting condition (im) fails")
    X = X.block(0, X.nrows, 0, gb)
    S = syzygies_rows(stacked)
    A = S.block(0, S.nrows, 0, gb).drop_zero_rows()
    if A.nrows:
        A = decide_zero_rows(A, beta.source.relations).drop_zero_rows() if beta.source.nrels else A
    return GeneralizedMorphism(gamma.source, beta.source, X, A)


def generalized_inverse(psi) -> GeneralizedMorphism:
    """Inverse of a generalized epimorphism, with aid ``ker psi``.

    Computed as the lift of ``(id_T, aid psi)`` along ``psi``.
    """
    psi = _as_gm(psi)
    if not psi.is_epi():
        raise ValueError("not a generalized epimorphism")
    ident = GeneralizedMorphism.identity(psi.target, psi.aid_generators)
    return lift(ident, psi, check=False)


def quasi_equal(psi, phi) -> bool:
    """Equality up to effective common coarsening."""
    psi, phi = _as_gm(psi), _as_gm(phi)
    if psi.source.ngens != phi.source.ngens or psi.target.relations != phi.target.relations:
        return False
    L = _common_aid(psi, phi)
    R = _stack_nonempty(psi.target.ngens, psi.ring, L, psi.target.relations)
    diff = psi.matrix - phi.matrix
    if diff.nrows and not diff.is_zero():
        if R.nrows == 0 or not decide_zero_rows(diff, R).is_zero():
            return False
    return _meet_is_aid(psi, L) and _meet_is_aid(phi, L)


# --------------------------------------------------------------------------
# filtration systems

@dataclass
class FiltrationSystem:
    """Generalized embeddings ``psi_p`` (p in ``degrees``) into a common target."""
    degrees: list
    embeddings: dict
    target: FPModule
    direction: str = "ascending"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.direction not in ("ascending", "descending"):
            raise ValueError("direction must be 'ascending' or 'descending'")

    def __getitem__(self, p):
        return self.embeddings[p]

    def __len__(self):
        return len(self.degrees)

    def graded_part(self, p) -> FPModule:
        return self.embeddings[p].source

    def step(self, p) -> Submodule:
        """The filtration step ``Img psi_p``."""
        return self.embeddings[p].combined_image()

    def ordered(self):
        """Degrees from the ordinary end to the generalized-isomorphism end."""
        d = list(self.degrees)
        return d if self.direction == "ascending" else d[::-1]


def validate_filtration_system(fs: FiltrationSystem) -> list:
    """Violations of the defining conditions; empty means valid."""
    out = []
    order = fs.ordered()
    if not order:
        return out
    for p in order:
        psi = fs.embeddings.get(p)
        if psi is None:
            out.append(f"degree {p}: missing embedding")
            continue
        if psi.target.relations != fs.target.relations:
            out.append(f"degree {p}: wrong target")
        if not psi.is_well_defined():
            out.append(f"degree {p}: not well defined")
        if not psi.is_mono():
            out.append(f"degree {p}: not a generalized monomorphism")
    if out:
        return out
    first = fs.embeddings[order[0]]
    if not first.has_zero_aid():
        out.append(f"degree {order[0]}: first embedding is not ordinary")
    for prev, p in zip(order, order[1:]):
        if fs.embeddings[p].aid_submodule() != fs.embeddings[prev].combined_image():
            out.append(f"degree {p}: aid differs from the combined image at degree {prev}")
    if not fs.embeddings[order[-1]].is_epi():
        out.append(f"degree {order[-1]}: last embedding is not a generalized isomorphism")
    return out
