"""JSON codecs for preferences, economies, results, and audit witnesses.

Rationals travel as strings, either ``"p/q"`` or decimal (``"1.9"`` parses to
19/10 exactly); emitted values always use the ``p/q`` / integer form.
Bundles are lists of object names, resolved against the economy's object
list.  Keys of tabular WP tables join member names with commas, so object
names must not contain commas.  ``dumps`` sorts keys and fixes separators,
making reports byte-deterministic.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .allocation import Economy
from .audit import DominanceWitness, ManipulationWitness, OutcomeProfile
from .mechanism import MechanismResult
from .prefs import (
    Dichotomous,
    Outcome,
    Preference,
    PwlMap,
    StructuralError,
    Tabular,
    rat,
)


def fraction_str(value: Fraction) -> str:
    return str(value)


def bundle_to_names(mask: int, names: Sequence[str]) -> list[str]:
    return [names[j] for j in range(len(names)) if mask & (1 << j)]


def bundle_from_names(members: Sequence[str], names: Sequence[str]) -> int:
    index = {name: j for j, name in enumerate(names)}
    mask = 0
    for member in members:
        if member not in index:
            raise StructuralError(f"unknown object name {member!r}")
        mask |= 1 << index[member]
    return mask


def pwl_map_to_json(pwl: PwlMap) -> dict[str, Any]:
    return {
        "breakpoints": [fraction_str(b) for b in pwl.breakpoints],
        "pieces": [
            {"intercept": fraction_str(c), "slope": fraction_str(s)} for c, s in pwl.pieces
        ],
    }


def pwl_map_from_json(obj: Mapping[str, Any]) -> PwlMap:
    return PwlMap(
        tuple(rat(b) for b in obj["breakpoints"]),
        tuple((rat(p["intercept"]), rat(p["slope"])) for p in obj["pieces"]),
    )


def preference_to_json(pref: Preference, names: Sequence[str]) -> dict[str, Any]:
    if isinstance(pref, Dichotomous):
        return {
            "kind": "dichotomous",
            "minimal_bundles": [bundle_to_names(mb, names) for mb in pref.minimal_bundles],
            "wp": pwl_map_to_json(pref.wp_map),
        }
    return {
        "kind": "tabular",
        "bundles": {
            ",".join(bundle_to_names(mask, names)): pwl_map_to_json(pwl)
            for mask, pwl in pref.wp_by_bundle
        },
    }


def preference_from_json(obj: Mapping[str, Any], names: Sequence[str]) -> Preference:
    kind = obj.get("kind")
    if kind == "dichotomous":
        return Dichotomous(
            tuple(bundle_from_names(mb, names) for mb in obj["minimal_bundles"]),
            pwl_map_from_json(obj["wp"]),
        )
    if kind == "tabular":
        table = {
            bundle_from_names(key.split(",") if key else [], names): pwl_map_from_json(val)
            for key, val in obj["bundles"].items()
        }
        return Tabular.from_table(len(names), table)
    raise StructuralError(f"unknown preference kind {kind!r}")


def economy_to_json(economy: Economy) -> dict[str, Any]:
    return {
        "objects": list(economy.object_names),
        "preferences": [
            preference_to_json(pref, economy.object_names) for pref in economy.preferences
        ],
    }


def economy_from_json(obj: Mapping[str, Any]) -> Economy:
    names = tuple(obj["objects"])
    return Economy(
        names,
        tuple(preference_from_json(p, names) for p in obj["preferences"]),
    )


def result_to_json(result: MechanismResult, names: Sequence[str]) -> dict[str, Any]:
    return {
        "allocation": [bundle_to_names(mask, names) for mask in result.allocation],
        "payments": [fraction_str(p) for p in result.payments],
        "welfare": fraction_str(result.welfare),
        "t_L": fraction_str(result.t_l),
    }


def outcome_to_json(outcome: Outcome, names: Sequence[str]) -> dict[str, Any]:
    bundle, payment = outcome
    return {"bundle": bundle_to_names(bundle, names), "payment": fraction_str(payment)}


def outcome_profile_to_json(profile: OutcomeProfile, names: Sequence[str]) -> dict[str, Any]:
    return {"outcomes": [outcome_to_json(o, names) for o in profile.outcomes]}


def dominance_witness_to_json(witness: DominanceWitness, names: Sequence[str]) -> dict[str, Any]:
    return {
        "dominating": outcome_profile_to_json(witness.dominating, names),
        "payment_gain": fraction_str(witness.payment_gain),
        "strict_agents": list(witness.strict_agents),
    }


def manipulation_witness_to_json(
    witness: ManipulationWitness, names: Sequence[str]
) -> dict[str, Any]:
    return {
        "agent": witness.agent,
        "misreport": preference_to_json(witness.misreport, names),
        "truthful": outcome_to_json(witness.truthful, names),
        "deviated": outcome_to_json(witness.deviated, names),
    }


def dumps(obj: Any) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, separators=(",", ": ")) + "\n"
