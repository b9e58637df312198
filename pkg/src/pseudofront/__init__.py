"""Pseudospherical frontals from twisted loop-group potentials."""

from .birkhoff import birkhoff_factor, reverse_birkhoff_factor
from .curves import CurveData, curve_from_expressions, curve_from_functions, named_curve
from .errors import (DegenerateCurve, DetDrift, DomainError, IllConditioned,
                     InvalidCharacteristicData, NumericalFailure, PreconditionError,
                     PseudofrontError, TailOverflow, UnknownCurve)
from .expr import parse_scalar
from .frames import (FrameGrid, GridSpec, SurfaceGrid, build_frame_grid,
                     normalized_potentials, rebase_frame, sym_surface)
from .loopcore import TwistedLoop
from .potentials import (PotentialPair, characteristic_potential, cuspidal_edge_potential,
                         noncharacteristic_potential)
from .singular import SingularCurve, SingularSet, Tolerances, classify, detect_singular_set
from .verify import check_suite, kabsch_align

__version__ = "0.1.0"
