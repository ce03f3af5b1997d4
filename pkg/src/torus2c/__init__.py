"""Skew products over circle rotations: orbit complexity, certified bounds,
small-divisor analysis, and empirical dynamical probes."""

from .diophantine import (
    ContinuedFraction,
    Convergent,
    DiophantineReport,
    ResonantSequence,
    cf_expand,
    convergents,
    dist_to_integers,
    find_nk,
    golden_alpha,
    liouville_alpha,
    resonance_witness,
    signed_frac,
    v_estimate,
)
from .complexity import (
    CSV_HEADER,
    ComplexityReport,
    PartitionPlan,
    bound_formulas,
    complexity_report,
    eps_star,
    exhaustive_separated,
    greedy_separated,
    growth_fit,
    separated_construct,
    spanning_construct,
    write_report_csv,
)
from .errors import PreconditionError, ResonanceExhausted
from .order2 import (
    CoboundaryReport,
    build_counterexample,
    coboundary_coeffs,
    order2_verdict,
    transfer_function,
)
from .funcspace import (
    FlFunction,
    FourierSeries,
    JordanDecomposition,
    ModulusEstimate,
    PiecewiseLinear,
    ZERO_PERIODIC,
    eval_lift,
    function_from_json,
    function_to_json,
    jordan,
    load_function,
    modulus,
    save_function,
    variation,
    variation_refined,
)
from .probes import (
    CoverageReport,
    DeviationReport,
    QPairWitness,
    deviation_search,
    ergodic_average,
    minimality_probe,
    qpair_witness,
    space_mean,
)
from .skew import (
    SkewProduct,
    birkhoff_lift,
    birkhoff_prefix_mod1,
    dn_dist,
    orbit,
    orbit_arrays,
    step,
    step_inverse,
)
from .torus import CirclePoint, TorusPoint, circle_dist, reduce, torus_dist, wrap_abs

__version__ = "0.1.0"
