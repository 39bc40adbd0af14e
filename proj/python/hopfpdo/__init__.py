"""Matrix-symbol calculus for pseudo-differential operators on homogeneous
line bundles over the Hopf fibration."""

from ._hopfpdo import (  # noqa: F401
    AlgebraElement,
    CheckResult,
    Coeffs,
    Engine,
    EngineParams,
    GradedSymbol,
    GroupElement,
    Symbol,
    build_operator_symbol,
    casimir_csv,
    casimir_eigenvalue,
    coeffs_from_json,
    coeffs_to_json,
    compose,
    derived_rep,
    estimate_order,
    field_symbol,
    from_angles,
    heat_evolve,
    heat_symbol,
    identity_symbol,
    irrep_matrix,
    lambda_weight,
    laplacian_symbol,
    leibniz_field,
    mult_symbol,
    op_apply,
    parametrix,
    pointwise_inverse,
    resolvent_symbol,
    run_verification,
    weight_bracket,
    x_product,
)

__all__ = [name for name in dir() if not name.startswith("_")]
