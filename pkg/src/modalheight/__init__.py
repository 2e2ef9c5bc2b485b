"""Finite-height extensions of pretransitive modal logics: formulas, Kripke
semantics, free algebras of frame-class logics, Jankov-Fine and depth
formulas, translations, and decision procedures."""

__version__ = "0.1.0"

from .algebra import (CanonicalModel, CapExceeded, FrameClassLogic, FreeAlgebra,
                      atom_formula, build_free_algebra, canonical_model,
                      dual_canonical_model, subalgebra_size_probe)
from .decision import (LogicSpec, Verdict, decide, decide_height_bounded,
                       fmp_transfer_witness, s5_frame_class)
from .formula import (FALSUM, TOP, Diamond, Falsum, Formula, Implies, Var, box, box_le,
                      conj, dia, dia_le, disj, iff, neg, star_expand, substitute)
from .frames import (depth, height, is_h_heavy, maximal_elements, skeleton,
                     top_restriction, transitivity_degree)
from .kripke import Frame, Model, frame_validates, reach, truth_set
from .parser import ParseError, parse, pretty, render
from .schemes import (bh_instance, depth_formulas, embedd_pair, glivenko_h1,
                      jankov_fine_beta, main_translation)
