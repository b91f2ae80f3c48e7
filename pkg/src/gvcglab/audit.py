"""Exact axiom auditors: Pareto dominance, strategyproofness, IR, no subsidy.

The dominance search exploits divisible money.  For an alternative
allocation, the most an agent can pay while staying weakly satisfied is her
old outcome's empty-equivalent transfer plus the WP of her new bundle at that
transfer.  A profile is strictly Pareto dominated (agentwise weak preference
plus weakly larger total payment, one strict) iff some alternative allocation
has a strictly larger total of these retained payments: any strict agentwise
improvement can be converted into payment slack.  That reduces a search over
real payment vectors to a finite allocation scan with exact per-agent
suprema.

The auditors take the mechanism under test as a callable, so hand-built
alternatives can be screened with the same machinery as the built-in one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

from .allocation import (
    Economy,
    ensure_search_space,
    normalized_mask_tables,
    validate_allocation,
)
from .mechanism import MechanismResult
from .prefs import (
    Comparison,
    Dichotomous,
    Outcome,
    Preference,
    Rational,
    compare_outcomes,
    empty_equivalent_transfer,
    rat,
    wp,
    wp_map,
)

Mechanism = Callable[[Economy, Fraction], MechanismResult]


@dataclass(frozen=True)
class OutcomeProfile:
    """One (bundle, payment) outcome per agent; bundles pairwise disjoint."""

    outcomes: tuple[Outcome, ...]

    def __post_init__(self) -> None:
        normalized = tuple((int(b), rat(p)) for b, p in self.outcomes)
        used = 0
        for bundle, _ in normalized:
            if used & bundle:
                raise ValueError("outcome bundles are not pairwise disjoint")
            used |= bundle
        object.__setattr__(self, "outcomes", normalized)

    @classmethod
    def from_result(cls, result: MechanismResult) -> "OutcomeProfile":
        return cls(tuple(zip(result.allocation, result.payments)))

    def payment_total(self) -> Fraction:
        return sum((pay for _, pay in self.outcomes), Fraction(0))


@dataclass(frozen=True)
class DominanceWitness:
    """A profile that Pareto dominates the audited one.

    Every agent is exactly indifferent at the witness payments; the whole
    improvement is banked as ``payment_gain``, so ``strict_agents`` is empty
    unless a caller constructs a witness by hand.
    """

    dominating: OutcomeProfile
    payment_gain: Fraction
    strict_agents: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.payment_gain < 0:
            raise ValueError("payment gain cannot be negative")
        if self.payment_gain == 0 and not self.strict_agents:
            raise ValueError("witness needs payment gain or a strictly improved agent")


@dataclass(frozen=True)
class ManipulationWitness:
    """A profitable unilateral misreport found by the DSIC audit."""

    agent: int
    misreport: Preference
    truthful: Outcome
    deviated: Outcome


def max_retained_payment(pref: Preference, old: Outcome, new_bundle: int) -> Fraction:
    """Largest payment at which ``new_bundle`` is weakly preferred to ``old``.

    The supremum is attained: at it, the agent is exactly indifferent.
    """
    t_star = empty_equivalent_transfer(pref, old[0], rat(old[1]))
    return t_star + wp(pref, new_bundle, t_star)


def find_pareto_improvement(
    economy: Economy,
    profile: OutcomeProfile,
    *,
    limit: int | None = None,
) -> DominanceWitness | None:
    """Search all alternative allocations for a Pareto-dominating profile.

    Returns the first improving allocation in lexicographic assignment order
    (all agents held indifferent at their retained payments, the surplus
    reported as ``payment_gain``), or None when no allocation's retained
    total strictly beats the audited payment total.
    """
    n, m = economy.num_agents, economy.num_objects
    if len(profile.outcomes) != n:
        raise ValueError(f"profile has {len(profile.outcomes)} outcomes for {n} agents")
    ensure_search_space(n, m, limit)

    size = 1 << m
    retained: list[list[Fraction]] = []
    for pref, (old_bundle, old_pay) in zip(economy.preferences, profile.outcomes):
        t_star = empty_equivalent_transfer(pref, old_bundle, old_pay)
        if isinstance(pref, Dichotomous):
            keep = t_star + pref.wp_map.value(t_star)
            retained.append([keep if pref.accepts(mask) else t_star for mask in range(size)])
        else:
            retained.append(
                [t_star + wp_map(pref, mask).value(t_star) for mask in range(size)]
            )

    base_total = profile.payment_total()
    tables, denom = normalized_mask_tables(retained, extra=(base_total,))
    base_int = base_total.numerator * (denom // base_total.denominator)

    for assignment in product(range(n + 1), repeat=m):
        masks = [0] * n
        for obj, owner in enumerate(assignment):
            if owner < n:
                masks[owner] |= 1 << obj
        total = 0
        for i in range(n):
            total += tables[i][masks[i]]
        if total > base_int:
            outcomes = tuple((masks[i], retained[i][masks[i]]) for i in range(n))
            gain = Fraction(total - base_int, denom)
            return DominanceWitness(OutcomeProfile(outcomes), gain, ())
    return None


def dominates(economy: Economy, candidate: OutcomeProfile, base: OutcomeProfile) -> bool:
    """Direct definition check: agentwise weak preference, weakly larger
    payment total, and at least one strict inequality."""
    strict = candidate.payment_total() > base.payment_total()
    if candidate.payment_total() < base.payment_total():
        return False
    for pref, new, old in zip(economy.preferences, candidate.outcomes, base.outcomes):
        ranking = compare_outcomes(pref, new, old)
        if ranking is Comparison.WORSE:
            return False
        if ranking is Comparison.BETTER:
            strict = True
    return strict


def audit_dsic(
    mechanism: Mechanism,
    economy: Economy,
    deviation_sets: Sequence[Sequence[Preference]],
    t_l: Rational,
) -> ManipulationWitness | None:
    """Exhaustively test unilateral misreports against truthful reporting.

    Returns the first (agent, misreport) whose outcome the agent strictly
    prefers under her true preference, scanning agents then misreports in
    order; None if no listed deviation is profitable.
    """
    if len(deviation_sets) != economy.num_agents:
        raise ValueError("need one deviation list per agent (possibly empty)")
    t = rat(t_l)
    truth = mechanism(economy, t)
    for agent, misreports in enumerate(deviation_sets):
        true_pref = economy.preferences[agent]
        truthful = (truth.allocation[agent], truth.payments[agent])
        for misreport in misreports:
            deviated_result = mechanism(economy.replace_preference(agent, misreport), t)
            deviated = (deviated_result.allocation[agent], deviated_result.payments[agent])
            if compare_outcomes(true_pref, deviated, truthful) is Comparison.BETTER:
                return ManipulationWitness(agent, misreport, truthful, deviated)
    return None


@dataclass(frozen=True)
class IrNoSubsidyReport:
    """Per-agent individual rationality and no-subsidy checks.

    The payment-bound entries apply only at reference level zero: agents
    with zero WP on their bundle must pay exactly zero, and nobody pays
    more than her WP at zero.  They are None otherwise.
    """

    individually_rational: tuple[bool, ...]
    no_subsidy: tuple[bool, ...]
    loser_payments_zero: tuple[bool, ...] | None
    payments_within_wp: tuple[bool, ...] | None

    @property
    def ok(self) -> bool:
        parts = [all(self.individually_rational), all(self.no_subsidy)]
        if self.loser_payments_zero is not None:
            parts.append(all(self.loser_payments_zero))
        if self.payments_within_wp is not None:
            parts.append(all(self.payments_within_wp))
        return all(parts)


def audit_ir_no_subsidy(economy: Economy, result: MechanismResult) -> IrNoSubsidyReport:
    """Check IR against (empty, 0) and payments >= 0 for a mechanism result."""
    validate_allocation(result.allocation, economy.num_objects)
    zero = Fraction(0)
    ir = []
    no_subsidy = []
    losers_zero = [] if result.t_l == 0 else None
    within_wp = [] if result.t_l == 0 else None
    for pref, bundle, payment in zip(
        economy.preferences, result.allocation, result.payments
    ):
        outcome = (bundle, payment)
        ir.append(compare_outcomes(pref, outcome, (0, zero)) is not Comparison.WORSE)
        no_subsidy.append(payment >= 0)
        if result.t_l == 0:
            value = wp(pref, bundle, zero)
            losers_zero.append(payment == 0 if value == 0 else True)
            within_wp.append(0 <= payment <= value)
    return IrNoSubsidyReport(
        individually_rational=tuple(ir),
        no_subsidy=tuple(no_subsidy),
        loser_payments_zero=None if losers_zero is None else tuple(losers_zero),
        payments_within_wp=None if within_wp is None else tuple(within_wp),
    )
