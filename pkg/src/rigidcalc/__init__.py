"""Exact computation of squares, rigid complexes and rigid dualizing complexes."""
from .errors import RigidCalcError
from .polycore import QQ, Field, Mat, Poly, PolyRing
from .fpmodules import FPModule, ModuleMap, RingMap, RingPresentation
from .squaring import (RigidComplex, cup_product, rigid_isomorphism, rigidifier_coinduced,
                       rigidifier_esm, rigidifier_induced, section_rigid, solve_rigid_unit,
                       square, tautological, twisted_induced)
from .dualizing import (derived_morita_check, relative_rigid_dualizing, rigid_dualizing_complex,
                        rigid_etale_localization, rigid_trace, twisted_induction)

__version__ = "0.1.0"

__all__ = [
    "RigidCalcError", "QQ", "Field", "Mat", "Poly", "PolyRing", "FPModule", "ModuleMap",
    "RingMap", "RingPresentation", "RigidComplex", "cup_product", "rigid_isomorphism",
    "rigidifier_coinduced", "rigidifier_esm", "rigidifier_induced", "section_rigid",
    "solve_rigid_unit", "square", "tautological", "twisted_induced", "derived_morita_check",
    "relative_rigid_dualizing", "rigid_dualizing_complex", "rigid_etale_localization",
    "rigid_trace", "twisted_induction",
]
