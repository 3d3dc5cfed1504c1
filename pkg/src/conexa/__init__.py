"""Connectivity structures and connective orders of entangled systems.

Subpackages by concern:

- ``connective``: finite integral connectivity structures (generation,
  irreducibles, order, meet).
- ``quantum``: dense states, projective measurement, partial trace, PPT.
- ``disentangle``: measurement-pool classification of pure states and the six
  disentanglement structures.
- ``density``: correlation / Sugita structures of density operators and the
  combined connective order.
- ``devices``: finite multilocal devices, locality taxonomy, tensorial and
  domanial structures, derivation from quantum experiments.
- ``randvars``: random-variable families, brunnian constructions, and the
  universal realization of any finite integral structure.
"""

__version__ = "0.1.0"

from .connective import (
    ConnectiveStructure,
    GroundSet,
    brunnian_structure,
    connective_order,
    discrete_structure,
    generate_integral,
    indiscrete_structure,
    irreducibles,
    is_connected_set,
    meet_structures,
)
from .density import (
    DensityReport,
    TotalOrder,
    density_structures,
    is_completely_correlated_on,
    is_completely_entangled_on,
    total_order,
)
from .devices import (
    Device,
    DeviceOrders,
    LocalityProfile,
    builtin_device,
    dependency_domain,
    derive_device,
    deterministic_realizations,
    device_order,
    domanial_structures,
    locality_profile,
    realization_count,
    sub_device,
    tensor_device,
    tensorial_structures,
)
from .disentangle import (
    Classification,
    Confidence,
    DeterminantExperiment,
    DisentanglementReport,
    IntricationClass,
    MeasurementPool,
    PoolConfig,
    build_pool,
    classify_on_subset,
    disentanglement_order,
    disentanglement_structures,
    post_states,
)
from .errors import DomainError, ResourceError
from .quantum import (
    DensityOperator,
    MeasurementOutcome,
    Observable,
    PureState,
    SiteLayout,
    Verdict,
    builtin_state,
    is_separable_bipartition,
    measure_projective,
    partial_contract,
    partial_trace,
    ppt_is_separable,
    purity,
    schmidt_coefficients,
    tensor_state,
)
from .randvars import (
    FiniteJointDistribution,
    RvReport,
    brunnian_family,
    is_separable_split,
    realize_structure,
    rv_analysis,
    rv_structure,
)
