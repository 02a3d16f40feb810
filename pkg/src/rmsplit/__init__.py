"""Exact and numerical tools around split reduction of RM abelian surfaces."""
from .errors import (BadPrimeError, ConfigError, ConsistencyError, DegeneracyError, DomainError,
                     InvalidElementError, InvariantViolationError, NonConvergenceError,
                     NotSpecialError, NumericError, RealRootError, RegistryError, ToleranceError)
from .numberfield import FieldElement, QuadraticField, fundamental_unit, split_generator
from .hzdiv import ComponentMatrix, enumerate_components, hz_is_compact, hz_nonempty
from .hecke import MatrixGL2F, PointH2, hecke_orbit, reduce_fundamental
from .qform import BinaryQF, class_number, reduce
from .spend import FiltrationModel, QuadLattice, count_short
from .frob import FrobeniusData, Genus2Curve, frobenius_data, split_classify
from .scan import ScanConfig, ScanRecord, report, run_scan

__version__ = "0.1.0"
