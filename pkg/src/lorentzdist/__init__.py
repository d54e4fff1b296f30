"""Lorentzian distance on flat model spacetimes.

Three routes to d(p,q) -- closed forms, causal-path maximization (lower
bounds), and an eikonal-constrained admissible function family (upper
bounds) -- plus the explicit witness functions that make the two-sided
characterization computable, and the property suite that checks every
inequality behind it.
"""

from .causal import (CauchySurface, CausalRelation, SurfaceSide, classify_pair,
                     cone_trace_diameter, surface_relation)
from .distance import (Curve, DistanceEstimate, closed_form_distance,
                       curve_length, distance_field, max_path_distance)
from .eikonal import (AdmissibilityReport, check_admissible, eikonal_value,
                      export_field_csv, inverse_cauchy_schwarz_slack,
                      inverse_triangle_slack, lower_bound_slack,
                      refinement_study)
from .fields import GridSpec, ScalarField, affine_time_field, combine_fields
from .geometry import (CausalCharacter, CausalClass, ConformallyFlat,
                       FlatCylinder, Minkowski, Orientation, Point, Spacetime,
                       TangentVector, conformal_factor, spacetime_from_spec)
from .verify import (Budget, SandwichReport, SuiteReport, property_suite,
                     replay_sandwich, sandwich_report, variational_distance)
from .witness import (CoveringWitness, WitnessField, build_covering_witness,
                      build_equality_witness, build_reverse_witness,
                      build_unrelated_witness, verify_covering_invariants)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport", "Budget", "CauchySurface", "CausalCharacter",
    "CausalClass", "CausalRelation", "ConformallyFlat", "CoveringWitness",
    "Curve", "DistanceEstimate", "FlatCylinder", "GridSpec", "Minkowski",
    "Orientation", "Point", "SandwichReport", "ScalarField", "Spacetime",
    "SuiteReport", "SurfaceSide", "TangentVector", "WitnessField",
    "affine_time_field", "build_covering_witness", "build_equality_witness",
    "build_reverse_witness", "build_unrelated_witness", "check_admissible",
    "classify_pair", "closed_form_distance", "combine_fields",
    "cone_trace_diameter", "conformal_factor", "curve_length",
    "distance_field", "eikonal_value", "export_field_csv",
    "inverse_cauchy_schwarz_slack", "inverse_triangle_slack",
    "lower_bound_slack", "max_path_distance", "property_suite",
    "refinement_study", "replay_sandwich", "sandwich_report",
    "spacetime_from_spec", "surface_relation", "variational_distance",
    "verify_covering_invariants",
]
