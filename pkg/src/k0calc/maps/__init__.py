"""Normal functions, their images, and explicit piecewise-normal witnesses."""

from .normal import (
    ImageDescription,
    NormalMap,
    Out,
    Pushed,
    compose_outs,
    eval_outs,
    guard_points,
    identity_map,
    image,
    is_injective,
    is_well_defined,
    normal_extension,
    parametrization,
    pullback_simple,
    push_simple,
    selector_map,
    shift_map,
)
from .synth import (
    BijectionWitness,
    Block,
    ClassMismatch,
    DimInjections,
    InjectionWitness,
    NoInjection,
    basic_of_poly,
    default_points,
    dim_injections,
    injection_into_complement,
    synthesize_bijection,
)
from .verify import (
    AdaptedPiece,
    PiecewiseMap,
    VerifyReport,
    adapted_decomposition,
    class_certificate,
    single,
    verify_map,
)
