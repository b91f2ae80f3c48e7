"""Exact willingness-to-pay preference model.

An outcome is a pair ``(bundle, payment)`` where the bundle is a bitmask over
object indices and the payment is an exact rational.  Preferences over
outcomes are encoded through willingness-to-pay (WP) maps: piecewise-linear
functions of the transfer level with rational coefficients.  Two families are
supported:

* :class:`Dichotomous`: an antichain of minimal acceptable bundles plus a
  single WP map shared by every acceptable bundle.  Unacceptable bundles have
  WP zero at every transfer level.
* :class:`Tabular`: an explicit WP map per bundle, monotone under inclusion
  (free disposal).

Every slope of a WP map exceeds -1, so ``t + w(t)`` is strictly increasing
and each outcome has a unique empty-equivalent transfer: the payment at which
receiving nothing is exactly as good.  That transfer is the universal
comparison currency used by :func:`compare_outcomes`.

All arithmetic uses :class:`fractions.Fraction`; no floating point enters any
comparison.  All types are immutable after construction and every operation
is pure, so values can be shared freely across threads.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Union

Rational = Union[Fraction, int, str]
Outcome = tuple[int, Fraction]


class StructuralError(ValueError):
    """A preference, map, or query violates a structural invariant."""


def rat(value: Rational) -> Fraction:
    """Coerce an int, Fraction, or 'p/q' / decimal string to an exact Fraction.

    Floats are rejected: exactness is load-bearing everywhere in this package.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise StructuralError(f"cannot parse rational from {value!r}") from exc
    raise StructuralError(f"not an exact rational: {value!r}")


@dataclass(frozen=True)
class PwlMap:
    """Continuous piecewise-linear map of the transfer level.

    ``pieces[k]`` is an ``(intercept, slope)`` pair giving
    ``intercept + slope * t`` on the k-th interval; interval k ends at
    ``breakpoints[k]``, and the first and last pieces extend unboundedly.

    Invariants: breakpoints strictly ascending, adjacent pieces agree at
    their shared breakpoint, and every slope is strictly greater than -1
    (so ``t + value(t)`` is a strictly increasing bijection of the reals).
    Adjacent pieces with identical coefficients are merged on construction,
    so structural equality coincides with functional equality.
    """

    breakpoints: tuple[Fraction, ...]
    pieces: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        bps = tuple(rat(b) for b in self.breakpoints)
        pcs = tuple((rat(c), rat(s)) for c, s in self.pieces)
        if len(pcs) != len(bps) + 1:
            raise StructuralError(
                f"need {len(bps) + 1} pieces for {len(bps)} breakpoints, got {len(pcs)}"
            )
        for left, right in zip(bps, bps[1:]):
            if left >= right:
                raise StructuralError(f"breakpoints not ascending: {left} >= {right}")
        for _, slope in pcs:
            if slope <= -1:
                raise StructuralError(f"slope {slope} <= -1 breaks transfer monotonicity")
        for k, b in enumerate(bps):
            lc, ls = pcs[k]
            rc, rs = pcs[k + 1]
            if lc + ls * b != rc + rs * b:
                raise StructuralError(f"discontinuity at breakpoint {b}")
        # merge collinear neighbours so equal functions compare equal
        merged_bps: list[Fraction] = []
        merged_pcs: list[tuple[Fraction, Fraction]] = [pcs[0]]
        for b, piece in zip(bps, pcs[1:]):
            if piece == merged_pcs[-1]:
                continue
            merged_bps.append(b)
            merged_pcs.append(piece)
        object.__setattr__(self, "breakpoints", tuple(merged_bps))
        object.__setattr__(self, "pieces", tuple(merged_pcs))

    @classmethod
    def constant(cls, value: Rational) -> "PwlMap":
        return cls((), ((rat(value), Fraction(0)),))

    def value(self, t: Rational) -> Fraction:
        t = rat(t)
        intercept, slope = self.pieces[bisect_left(self.breakpoints, t)]
        return intercept + slope * t

    @property
    def slopes(self) -> tuple[Fraction, ...]:
        return tuple(slope for _, slope in self.pieces)

    def is_constant(self) -> bool:
        return len(self.pieces) == 1 and self.pieces[0][1] == 0

    def is_nonincreasing(self) -> bool:
        return all(slope <= 0 for slope in self.slopes)

    def _bounded_below_by(self, bound: Fraction) -> bool:
        if not self.breakpoints:
            intercept, slope = self.pieces[0]
            return slope == 0 and intercept >= bound
        if any(self.value(b) < bound for b in self.breakpoints):
            return False
        return self.pieces[0][1] <= 0 and self.pieces[-1][1] >= 0

    def is_strictly_positive(self) -> bool:
        if not self.breakpoints:
            intercept, slope = self.pieces[0]
            return slope == 0 and intercept > 0
        if any(self.value(b) <= 0 for b in self.breakpoints):
            return False
        return self.pieces[0][1] <= 0 and self.pieces[-1][1] >= 0

    def is_nonnegative(self) -> bool:
        return self._bounded_below_by(Fraction(0))

    def solve_transfer(self, total: Rational) -> Fraction:
        """Return the unique t with ``t + value(t) == total``.

        Solved piece by piece in closed form; slopes above -1 guarantee
        existence and uniqueness.
        """
        total = rat(total)
        for k, (intercept, slope) in enumerate(self.pieces):
            t = (total - intercept) / (1 + slope)
            lo = self.breakpoints[k - 1] if k > 0 else None
            hi = self.breakpoints[k] if k < len(self.breakpoints) else None
            if (lo is None or t >= lo) and (hi is None or t <= hi):
                return t
        raise AssertionError("t + value(t) is onto the reals; no piece matched")


ZERO_MAP = PwlMap.constant(0)


def _regions(cuts: list[Fraction]) -> list[tuple[Fraction | None, Fraction | None]]:
    if not cuts:
        return [(None, None)]
    bounds: list[tuple[Fraction | None, Fraction | None]] = [(None, cuts[0])]
    bounds.extend(zip(cuts, cuts[1:]))
    bounds.append((cuts[-1], None))
    return bounds


def _probe(lo: Fraction | None, hi: Fraction | None) -> Fraction:
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    return (lo + hi) / 2


def _line_at(pwl: PwlMap, t: Fraction) -> tuple[Fraction, Fraction]:
    return pwl.pieces[bisect_left(pwl.breakpoints, t)]


def pwl_pointwise_max(first: PwlMap, second: PwlMap) -> PwlMap:
    """Exact pointwise maximum of two maps (piecewise linear again)."""
    cuts = sorted(set(first.breakpoints) | set(second.breakpoints))
    crossings: list[Fraction] = []
    for lo, hi in _regions(cuts):
        probe = _probe(lo, hi)
        cf, sf = _line_at(first, probe)
        cg, sg = _line_at(second, probe)
        if sf == sg:
            continue
        x = (cg - cf) / (sf - sg)
        if (lo is None or x > lo) and (hi is None or x < hi):
            crossings.append(x)
    cuts = sorted(set(cuts) | set(crossings))
    pieces = []
    for lo, hi in _regions(cuts):
        probe = _probe(lo, hi)
        winner = first if first.value(probe) >= second.value(probe) else second
        pieces.append(_line_at(winner, probe))
    return PwlMap(tuple(cuts), tuple(pieces))


def pwl_leq(first: PwlMap, second: PwlMap) -> bool:
    """True iff ``first(t) <= second(t)`` for every real t (exact check)."""
    cuts = sorted(set(first.breakpoints) | set(second.breakpoints))
    if not cuts:
        (cf, sf), (cg, sg) = first.pieces[0], second.pieces[0]
        return sf == sg and cf <= cg
    if any(first.value(x) > second.value(x) for x in cuts):
        return False
    if second.pieces[0][1] - first.pieces[0][1] > 0:
        return False
    if second.pieces[-1][1] - first.pieces[-1][1] < 0:
        return False
    return True


@dataclass(frozen=True)
class Dichotomous:
    """Preference that only distinguishes acceptable from unacceptable bundles.

    ``minimal_bundles`` is a non-empty antichain of non-empty bitmasks; a
    bundle is acceptable iff it contains some minimal bundle.  All acceptable
    bundles share ``wp_map`` (everywhere strictly positive); unacceptable
    bundles have WP zero.
    """

    minimal_bundles: tuple[int, ...]
    wp_map: PwlMap

    def __post_init__(self) -> None:
        bundles = tuple(sorted({int(b) for b in self.minimal_bundles}))
        if not bundles:
            raise StructuralError("need at least one minimal acceptable bundle")
        if bundles[0] <= 0:
            raise StructuralError("minimal bundles must be non-empty bitmasks")
        for small in bundles:
            for big in bundles:
                if small != big and small & big == small:
                    raise StructuralError(
                        f"minimal bundles must form an antichain: {small:b} < {big:b}"
                    )
        if not self.wp_map.is_strictly_positive():
            raise StructuralError("dichotomous WP map must be strictly positive everywhere")
        object.__setattr__(self, "minimal_bundles", bundles)

    def accepts(self, bundle: int) -> bool:
        return any(mb & bundle == mb for mb in self.minimal_bundles)


@dataclass(frozen=True)
class Tabular:
    """Preference given by an explicit WP map per bundle.

    Maps must be nonnegative everywhere and monotone under inclusion at every
    transfer level.  The empty bundle is implicitly the zero map.  Bundles
    absent from the table are outside the preference's domain; querying them
    raises :class:`StructuralError` (no interpolation is ever attempted).
    """

    num_objects: int
    wp_by_bundle: tuple[tuple[int, PwlMap], ...]

    @classmethod
    def from_table(cls, num_objects: int, table: Mapping[int, PwlMap]) -> "Tabular":
        return cls(num_objects, tuple(sorted(table.items())))

    def __post_init__(self) -> None:
        if self.num_objects < 1:
            raise StructuralError("tabular preference needs at least one object")
        entries = tuple(sorted((int(mask), pwl) for mask, pwl in self.wp_by_bundle))
        full = (1 << self.num_objects) - 1
        seen: dict[int, PwlMap] = {}
        for mask, pwl in entries:
            if mask < 0 or mask > full:
                raise StructuralError(f"bundle {mask:b} outside the {self.num_objects}-object universe")
            if mask in seen:
                raise StructuralError(f"duplicate bundle {mask:b} in table")
            if mask == 0 and pwl != ZERO_MAP:
                raise StructuralError("WP of the empty bundle must be identically zero")
            if not pwl.is_nonnegative():
                raise StructuralError(f"WP map for bundle {mask:b} goes negative")
            seen[mask] = pwl
        for small, small_map in seen.items():
            for big, big_map in seen.items():
                if small != big and small & big == small and not pwl_leq(small_map, big_map):
                    raise StructuralError(
                        f"free disposal violated: WP({small:b}) exceeds WP({big:b}) somewhere"
                    )
        object.__setattr__(self, "wp_by_bundle", entries)
        object.__setattr__(self, "_index", seen)

    def map_for(self, bundle: int) -> PwlMap:
        if bundle == 0:
            return ZERO_MAP
        try:
            return self._index[bundle]  # type: ignore[attr-defined]
        except KeyError:
            raise StructuralError(f"bundle {bundle:b} missing from WP table") from None

    def bundles(self) -> tuple[int, ...]:
        return tuple(mask for mask, _ in self.wp_by_bundle)


Preference = Union[Dichotomous, Tabular]


def wp_map(pref: Preference, bundle: int) -> PwlMap:
    """Full WP map of a bundle (the zero map for unacceptable bundles)."""
    if isinstance(pref, Dichotomous):
        return pref.wp_map if pref.accepts(bundle) else ZERO_MAP
    return pref.map_for(bundle)


def wp(pref: Preference, bundle: int, t: Rational) -> Fraction:
    """Willingness to pay for ``bundle`` at transfer level ``t``."""
    return wp_map(pref, bundle).value(t)


def empty_equivalent_transfer(pref: Preference, bundle: int, pay: Rational) -> Fraction:
    """The payment t* at which receiving nothing is indifferent to (bundle, pay).

    Exact round trip: ``t* + wp(pref, bundle, t*) == pay``.
    """
    return wp_map(pref, bundle).solve_transfer(rat(pay))


class Comparison(Enum):
    BETTER = "better"
    WORSE = "worse"
    INDIFFERENT = "indifferent"


def compare_outcomes(pref: Preference, first: Outcome, second: Outcome) -> Comparison:
    """Rank ``first`` against ``second``: lower empty-equivalent transfer wins."""
    t1 = empty_equivalent_transfer(pref, first[0], first[1])
    t2 = empty_equivalent_transfer(pref, second[0], second[1])
    if t1 < t2:
        return Comparison.BETTER
    if t1 > t2:
        return Comparison.WORSE
    return Comparison.INDIFFERENT


DEFAULT_CLASSIFY_GRID: tuple[Fraction, ...] = tuple(Fraction(k, 2) for k in range(-4, 5))


@dataclass(frozen=True)
class ClassificationReport:
    """Structural flags of a preference.

    ``strict_positive_income_effect`` is certified only at the recorded
    ``grid`` of transfer levels (caller-supplied points plus all WP-map
    breakpoints inside their hull); the other flags are exact.
    """

    dichotomous: bool
    single_minded: bool
    quasilinear: bool
    positive_income_effect: bool
    strict_positive_income_effect: bool
    heterogeneous_demand: bool
    strict_decreasing_marginal_wp: bool
    unit_demand: bool
    grid: tuple[Fraction, ...]


def _minimal_masks(masks: Iterable[int]) -> tuple[int, ...]:
    masks = sorted(set(masks))
    return tuple(
        m for m in masks if not any(o != m and o & m == o for o in masks)
    )


def classify(
    pref: Preference,
    num_objects: int | None = None,
    grid: Iterable[Rational] = DEFAULT_CLASSIFY_GRID,
) -> ClassificationReport:
    """Classify a preference; see :class:`ClassificationReport`.

    For tabular preferences the table must cover every non-empty bundle of
    the universe, otherwise the flags cannot be certified and a
    :class:`StructuralError` is raised.
    """
    if num_objects is None:
        if isinstance(pref, Tabular):
            num_objects = pref.num_objects
        else:
            num_objects = max(pref.minimal_bundles).bit_length()
    m = num_objects
    full = (1 << m) - 1

    if isinstance(pref, Dichotomous):
        dichotomous = True
        minimal = pref.minimal_bundles
        all_maps: tuple[PwlMap, ...] = (pref.wp_map,)
        unit_demand = all(mb.bit_count() == 1 for mb in minimal)
    else:
        table = {mask: pref.map_for(mask) for mask in range(1, full + 1)}
        support = {mask for mask, mp in table.items() if mp != ZERO_MAP}
        nonzero_maps = [table[mask] for mask in sorted(support)]
        upward_closed = all(
            sup in support
            for mask in support
            for x in range(m)
            if (sup := mask | (1 << x)) != mask
        )
        dichotomous = (
            bool(support)
            and upward_closed
            and all(mp == nonzero_maps[0] for mp in nonzero_maps)
            and nonzero_maps[0].is_strictly_positive()
        )
        minimal = _minimal_masks(support) if support else ()
        all_maps = tuple(table.values())
        singles_by_object = [wp_map(pref, 1 << x) for x in range(m)]
        unit_demand = True
        for mask in range(1, full + 1):
            if mask.bit_count() < 2:
                continue
            best = ZERO_MAP
            for x in range(m):
                if mask & (1 << x):
                    best = pwl_pointwise_max(best, singles_by_object[x])
            if table[mask] != best:
                unit_demand = False
                break

    singles = [wp_map(pref, 1 << x) for x in range(m)]
    at_zero = [sm.value(0) for sm in singles]

    quasilinear = all(mp.is_constant() for mp in all_maps)
    positive_income_effect = all(mp.is_nonincreasing() for mp in all_maps)
    single_minded = dichotomous and len(minimal) == 1
    heterogeneous_demand = len(set(at_zero)) > 1
    strict_decreasing_marginal_wp = all(
        at_zero[x] + at_zero[y] > wp(pref, (1 << x) | (1 << y), 0)
        for x in range(m)
        for y in range(x + 1, m)
    )

    user_points = sorted({rat(g) for g in grid})
    if not user_points:
        user_points = sorted(DEFAULT_CLASSIFY_GRID)
    lo, hi = user_points[0], user_points[-1]
    points = set(user_points)
    for sm in singles:
        points.update(b for b in sm.breakpoints if lo <= b <= hi)
    grid_points = tuple(sorted(points))

    strict_pie = True
    for x in range(m):
        for y in range(m):
            if x == y:
                continue
            for j, t_hi in enumerate(grid_points):
                hi_gap = singles[x].value(t_hi) - singles[y].value(t_hi)
                if hi_gap <= 0:
                    continue
                for t_lo in grid_points[:j]:
                    if singles[x].value(t_lo) - singles[y].value(t_lo) <= hi_gap:
                        strict_pie = False
                        break
                if not strict_pie:
                    break
            if not strict_pie:
                break
        if not strict_pie:
            break

    return ClassificationReport(
        dichotomous=dichotomous,
        single_minded=single_minded,
        quasilinear=quasilinear,
        positive_income_effect=positive_income_effect,
        strict_positive_income_effect=strict_pie,
        heterogeneous_demand=heterogeneous_demand,
        strict_decreasing_marginal_wp=strict_decreasing_marginal_wp,
        unit_demand=unit_demand,
        grid=grid_points,
    )
