"""Constructive homological algebra over computable rings.

Finitely presented modules, generalized morphisms, spectral sequences of
bicomplexes, Grothendieck spectral sequences and the purity filtration.
"""
from .rings import QQ, ZZ, ParseError, parse_ring
from .matrix import Mat, parse_matrix
from .modules import FPModule, ModuleMorphism, fitting_ideal, rank
from .functors import (DualizeToRing, HomInto, TensorWith, ext, free_resolution, grade,
                       projective_dimension, tor)
from .genmor import (FiltrationSystem, GeneralizedMorphism, LiftingError, compose,
                     generalized_inverse, lift)
from .spectral import (Bicomplex, SpectralSequence, column_filtration, render_sheets,
                       render_spectral_sequence, spectral_sequence_bicomplex,
                       spectral_sequence_generic, total_complex)
from .derived import (codegree_of_purity, double_ext_ss, grothendieck_spectral_sequence,
                      purity_filtration, tor_ext_ss)
from .triangulation import InvalidFiltration, isomorphism_of_filtration, verify_isomorphism

__version__ = "0.1.0"
