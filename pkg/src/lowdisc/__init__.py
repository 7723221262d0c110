"""lowdisc: kernel discrepancies, low-discrepancy generators, and a
coordinate-exchange optimizer for matching designs to target distributions."""

from .backends import backend_name
from .design import Design, Domain
from .discrepancy import (
    DiscrepancyReport,
    coord_deletion_scores,
    discrepancy,
    discrepancy_report,
    discrepancy_sq_centered_l2,
    discrepancy_sq_generic,
    discrepancy_sq_normal_closed,
    discrepancy_sq_uniform_origin,
    point_deletion_scores,
    projection_decomposition,
    shift_design,
    weighted_pieces_total,
)
from .errors import (
    ContractViolationError,
    LowdiscError,
    NumericalError,
    SizeRefusalError,
)
from .experiments import (
    CubatureResult,
    Study,
    StudyConfig,
    cubature_estimate,
    integrand_example,
    reference_mu,
    run_compare_study,
    run_correlation_study,
    run_cubature_example,
    run_study,
    verify_appendix,
)
from .generators import (
    GeneratorConfig,
    GeneratorKind,
    esobol_adjust,
    generate,
    generate_sobol,
    generate_uniform,
    load_design,
    save_design,
    scramble,
    transform_to_target,
)
from .kernels import (
    KernelBase,
    KernelSpec,
    centered_l2_kernel,
    dirac_distance,
    kernel_eval,
    ktilde_origin,
    origin_kernel,
    transformed_normal_kernel,
)
from .optimizer import (
    ExchangeConfig,
    ExchangeTrace,
    Termination,
    coordinate_exchange,
    coordinate_exchange_multistart,
    delta_full,
    make_exchange_context,
    maximize_delta,
    save_trace,
)
from .targets import (
    C_NORMAL,
    C_UNIFORM,
    TargetKind,
    TargetSpec,
    centered_uniform,
    normal_cdf,
    normal_h,
    normal_pdf,
    normal_quantile,
    standard_normal,
    uniform_centered_h,
    unit_uniform,
)

__version__ = "0.1.0"
