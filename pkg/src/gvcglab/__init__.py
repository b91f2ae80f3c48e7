"""gvcglab: exact generalized-VCG engine and axiom auditor.

Combinatorial auctions with non-quasilinear dichotomous preferences,
computed and audited in exact rational arithmetic: winner determination,
externality payments at a reference transfer level, Pareto-dominance search,
strategyproofness / IR / no-subsidy audits, and reproducible random property
suites.
"""

from .prefs import (
    ClassificationReport,
    Comparison,
    DEFAULT_CLASSIFY_GRID,
    Dichotomous,
    Outcome,
    Preference,
    PwlMap,
    StructuralError,
    Tabular,
    ZERO_MAP,
    classify,
    compare_outcomes,
    empty_equivalent_transfer,
    pwl_leq,
    pwl_pointwise_max,
    rat,
    wp,
    wp_map,
)
from .allocation import (
    Economy,
    SearchSpaceError,
    assignment_bundles,
    enumerate_allocations,
    enumerate_assignments,
    ensure_search_space,
    guard_limit,
    search_space_size,
    validate_allocation,
    winner_determination,
)
from .mechanism import (
    AgentGuaranteeCheck,
    GuaranteeReport,
    InternalAuditError,
    MechanismResult,
    run_gvcg,
    run_gvcg_with_audit,
)
from .audit import (
    DominanceWitness,
    IrNoSubsidyReport,
    ManipulationWitness,
    OutcomeProfile,
    audit_dsic,
    audit_ir_no_subsidy,
    dominates,
    find_pareto_improvement,
    max_retained_payment,
)
from .generate import (
    INCOME_EFFECT_MODES,
    random_deviation_grid,
    random_dichotomous,
    random_economy,
    random_pwl_map,
)
from .scenarios import (
    AUDIT_NAMES,
    BUILTIN_NAMES,
    REPRODUCE_NAMES,
    Scenario,
    builtin_scenario,
    expected_matches,
    inefficiency_trio,
    load_scenario,
    negative_income_trio,
    positive_income_trio,
    reproduce,
    run_scenario,
    scenario_from_json,
    scenario_to_json,
    survey_axioms,
    survey_dominance,
    survey_two_agent_efficiency,
    unit_demand_misreport,
    unit_demand_pref,
    unit_demand_trio,
)

__version__ = "0.1.0"

__all__ = [
    "AUDIT_NAMES",
    "AgentGuaranteeCheck",
    "BUILTIN_NAMES",
    "ClassificationReport",
    "Comparison",
    "DEFAULT_CLASSIFY_GRID",
    "Dichotomous",
    "DominanceWitness",
    "Economy",
    "GuaranteeReport",
    "INCOME_EFFECT_MODES",
    "InternalAuditError",
    "IrNoSubsidyReport",
    "ManipulationWitness",
    "MechanismResult",
    "Outcome",
    "OutcomeProfile",
    "Preference",
    "PwlMap",
    "REPRODUCE_NAMES",
    "Scenario",
    "SearchSpaceError",
    "StructuralError",
    "Tabular",
    "ZERO_MAP",
    "assignment_bundles",
    "audit_dsic",
    "audit_ir_no_subsidy",
    "builtin_scenario",
    "classify",
    "compare_outcomes",
    "dominates",
    "empty_equivalent_transfer",
    "enumerate_allocations",
    "enumerate_assignments",
    "ensure_search_space",
    "expected_matches",
    "find_pareto_improvement",
    "guard_limit",
    "inefficiency_trio",
    "load_scenario",
    "max_retained_payment",
    "negative_income_trio",
    "positive_income_trio",
    "pwl_leq",
    "pwl_pointwise_max",
    "random_deviation_grid",
    "random_dichotomous",
    "random_economy",
    "random_pwl_map",
    "rat",
    "reproduce",
    "run_gvcg",
    "run_gvcg_with_audit",
    "run_scenario",
    "scenario_from_json",
    "scenario_to_json",
    "search_space_size",
    "survey_axioms",
    "survey_dominance",
    "survey_two_agent_efficiency",
    "unit_demand_misreport",
    "unit_demand_pref",
    "unit_demand_trio",
    "validate_allocation",
    "winner_determination",
    "wp",
    "wp_map",
]
