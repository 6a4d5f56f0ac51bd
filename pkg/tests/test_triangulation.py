import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import QX, invariants, random_module, random_xyz_module
from specseq.derived import purity_filtration
from specseq.genmor import FiltrationSystem, GeneralizedMorphism
from specseq.matrix import Mat
from specseq.modules import FPModule
from specseq.rings import ZZ
from specseq.triangulation import InvalidFiltration, isomorphism_of_filtration, verify_isomorphism

ALL_TRUE = {"well_defined": True, "mono": True, "epi": True}


def zmat(*rows):
    return Mat.from_rows(ZZ, [list(r) for r in rows])


def check_presentation(fs, M):
    tp = isomorphism_of_filtration(fs, M)
    assert verify_isomorphism(tp.matrix, tp.iso.matrix, M) == ALL_TRUE
    assert tp.is_upper_triangular()
    assert invariants(FPModule(tp.matrix) if tp.matrix.nrows else
                      FPModule.free(M.ring, tp.matrix.ncols)) == invariants(M)
    for p, block, _, _ in tp.blocks:
        part = fs.graded_part(p)
        got = FPModule(block) if block.nrows else FPModule.free(M.ring, block.ncols)
        assert invariants(got) == invariants(part)
    return tp


def test_single_step_filtration():
    M = FPModule(zmat([2, 4], [0, 6]))
    fs = FiltrationSystem([0], {0: GeneralizedMorphism.identity(M)}, M)
    tp = check_presentation(fs, M)
    assert [p for p, *_ in tp.blocks] == [0]


def test_two_step_filtration_of_cyclic_group():
    # 2ZZ/4 inside ZZ/4, a non-split extension of ZZ/2 by ZZ/2
    M = FPModule(zmat([4]))
    Z2 = FPModule(zmat([2]))
    fs = FiltrationSystem([-1, 0], {-1: GeneralizedMorphism(Z2, M, zmat([2])),
                                    0: GeneralizedMorphism(Z2, M, zmat([1]), zmat([2]))}, M)
    tp = check_presentation(fs, M)
    assert tp.matrix.shape == (2, 2)
    # the off-diagonal entry carries the extension
    assert not tp.matrix.block(0, 1, 1, 2).is_zero()


def test_descending_filtration_is_rejected():
    M = FPModule(zmat([4]))
    fs = FiltrationSystem([0], {0: GeneralizedMorphism.identity(M)}, M, direction="descending")
    with pytest.raises(InvalidFiltration):
        isomorphism_of_filtration(fs, M)


def test_broken_filtration_is_rejected():
    M = FPModule(zmat([4]))
    Z2 = FPModule(zmat([2]))
    fs = FiltrationSystem([-1, 0], {0: GeneralizedMorphism(Z2, M, zmat([2])),
                                    -1: GeneralizedMorphism(Z2, M, zmat([1]), zmat([2]))}, M)
    with pytest.raises(InvalidFiltration):
        isomorphism_of_filtration(fs, M)


def test_wrong_target_is_rejected():
    M = FPModule(zmat([4]))
    fs = FiltrationSystem([0], {0: GeneralizedMorphism.identity(M)}, M)
    with pytest.raises(InvalidFiltration):
        isomorphism_of_filtration(fs, FPModule(zmat([6])))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["ZZ", "QQ[x]"]))
def test_purity_filtrations_triangulate(seed, ring_name):
    ring = ZZ if ring_name == "ZZ" else QX
    M = random_module(random.Random(seed), ring, max_gens=3, max_rels=3)
    rep = purity_filtration(M)
    if rep.filtration.degrees:
        check_presentation(rep.filtration, M)


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_purity_filtrations_triangulate_in_three_variables(seed):
    M = random_xyz_module(random.Random(seed), max_gens=3)
    rep = purity_filtration(M)
    tp = isomorphism_of_filtration(rep.filtration, M)
    assert verify_isomorphism(tp.matrix, tp.iso.matrix, M) == ALL_TRUE
    assert tp.is_upper_triangular()
