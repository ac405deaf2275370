"""Ground-state physics of emitter arrays coupled to crossed cavity modes.

Rows and columns of a rectangular array each share one bosonic mode; in
the dispersive regime the photons mediate all-to-all couplings along every
line.  The package derives the effective parameters, diagonalizes both the
full lattice model and the fixed-sector spin model, evaluates the
single-mode closed forms and the coherent-state mean field, classifies
configurations by the array symmetry group, and maps out where the mixed
frustrated regime stays consistent.
"""

from .geometry import ArrayGeometry
from .io import ARTIFACT_VERSION, ResultTable, parse_csv, to_csv, to_json
from .params import (
    EffectiveJCParams,
    NonUniformError,
    PhysicalDriveParams,
    RegimeError,
    ResonanceError,
    SpinCouplings,
    analyze,
    classify_regime,
    delta_b_from_eta,
    derive_effective_params,
    derive_spin_couplings,
    lambda_coupling,
    validity_epsilon,
)

__version__ = ARTIFACT_VERSION

__all__ = [
    "ARTIFACT_VERSION",
    "ArrayGeometry",
    "EffectiveJCParams",
    "NonUniformError",
    "PhysicalDriveParams",
    "RegimeError",
    "ResonanceError",
    "ResultTable",
    "SpinCouplings",
    "analyze",
    "classify_regime",
    "delta_b_from_eta",
    "derive_effective_params",
    "derive_spin_couplings",
    "lambda_coupling",
    "parse_csv",
    "to_csv",
    "to_json",
    "validity_epsilon",
    "__version__",
]
