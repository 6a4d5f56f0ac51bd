import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import LAWS, QX, random_generalized_morphism, random_module
from specseq.genmor import (FiltrationSystem, GeneralizedMorphism, LiftingError, coarsen, compose,
                            generalized_inverse, is_effective_coarsening, lift, lifts,
                            quasi_equal, validate_filtration_system)
from specseq.matrix import Mat
from specseq.modules import FPModule, ModuleMorphism
from specseq.rings import ZZ


def zmat(*rows):
    return Mat.from_rows(ZZ, [list(r) for r in rows])


Z = FPModule.free(ZZ, 1)
Z4 = FPModule.from_rows(ZZ, [[4]])


def test_aid_acts_as_extra_relations():
    psi = GeneralizedMorphism(Z, Z, zmat([1]), zmat([2]))
    assert psi.is_well_defined()
    assert psi.is_epi() and psi.is_mono() is False
    assert psi.associated_target().ngens == 1
    assert psi.kernel().source.ngens == 1


def test_generalized_inverse_of_projection():
    # ZZ -> ZZ/4 is epi, its inverse is ZZ/4 -> ZZ with aid 4ZZ
    pi = GeneralizedMorphism(Z, Z4, zmat([1]))
    inv = generalized_inverse(pi)
    assert quasi_equal(inv, GeneralizedMorphism(Z4, Z, zmat([1]), zmat([4])))
    assert quasi_equal(compose(inv, pi), GeneralizedMorphism.identity(Z, zmat([4])))
    assert quasi_equal(compose(pi, inv), GeneralizedMorphism.identity(Z4))


def test_generalized_inverse_requires_epi():
    with pytest.raises(ValueError):
        generalized_inverse(GeneralizedMorphism(Z, Z, zmat([2])))


def test_composition_collects_aids():
    a = GeneralizedMorphism(Z, Z, zmat([1]), zmat([3]))
    b = GeneralizedMorphism(Z, Z, zmat([2]), zmat([5]))
    c = compose(b, a)
    assert c.matrix == zmat([2])
    # aid is 5ZZ + 2*3ZZ = ZZ
    assert quasi_equal(c, GeneralizedMorphism(Z, Z, zmat([0]), zmat([1])))


def test_lifting_along_multiplication():
    beta = GeneralizedMorphism(Z, Z, zmat([2]))
    assert lifts(beta, GeneralizedMorphism(Z, Z, zmat([6])))
    a = lift(GeneralizedMorphism(Z, Z, zmat([6])), beta)
    assert a.matrix == zmat([3])
    assert not lifts(beta, GeneralizedMorphism(Z, Z, zmat([3])))
    with pytest.raises(LiftingError):
        lift(GeneralizedMorphism(Z, Z, zmat([3])), beta)


def test_coarsening():
    psi = GeneralizedMorphism(Z, Z, zmat([2]), zmat([4]))
    assert is_effective_coarsening(psi, zmat([4]))
    # 2ZZ meets ZZ in 2ZZ, larger than the old aid 4ZZ
    assert not is_effective_coarsening(psi, zmat([1]))
    assert coarsen(psi, zmat([2])).aid_generators == zmat([2])
    with pytest.raises(ValueError):
        coarsen(psi, zmat([3]))


def test_quasi_equality_is_not_matrix_equality():
    a = GeneralizedMorphism(Z, Z4, zmat([1]))
    b = GeneralizedMorphism(Z, Z4, zmat([5]))
    assert quasi_equal(a, b)
    assert not quasi_equal(a, GeneralizedMorphism(Z, Z4, zmat([2])))


def test_ordinary_morphisms_embed():
    phi = ModuleMorphism(Z, Z4, zmat([3]))
    g = GeneralizedMorphism.from_morphism(phi)
    assert g.has_zero_aid() and g.is_ordinary()
    assert g.to_morphism().matrix == zmat([3])


def test_filtration_system_validation():
    # 2ZZ/4ZZ inside ZZ/4: the two steps of the 2-adic filtration
    T = Z4
    top = GeneralizedMorphism(FPModule.from_rows(ZZ, [[2]]), T, zmat([1]), zmat([2]))
    bottom = GeneralizedMorphism(FPModule.from_rows(ZZ, [[2]]), T, zmat([2]))
    fs = FiltrationSystem([-1, 0], {-1: bottom, 0: top}, T)
    assert validate_filtration_system(fs) == []
    broken = FiltrationSystem([-1, 0], {-1: top, 0: bottom}, T)
    assert validate_filtration_system(broken) != []


def _law_examples():
    return st.tuples(st.sampled_from(sorted(LAWS)), st.integers(0, 10 ** 6),
                     st.sampled_from(["ZZ", "QQ[x]"]))


@settings(max_examples=60, deadline=None)
@given(_law_examples())
def test_laws_on_random_inputs(example):
    name, seed, ring_name = example
    ring = ZZ if ring_name == "ZZ" else QX
    assert LAWS[name](random.Random(seed), ring) == []


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_generalized_morphisms_are_well_defined(seed):
    rnd = random.Random(seed)
    T = random_module(rnd, ZZ, max_gens=3, max_rels=2)
    psi = random_generalized_morphism(rnd, T)
    assert psi.is_well_defined()
    assert quasi_equal(psi, psi)
    assert quasi_equal(compose(GeneralizedMorphism.identity(T), psi), psi)
