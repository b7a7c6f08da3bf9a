"""
Reduction Service Module - Code-improving transformations
Each rule turns a profile into one whose lambda is no smaller at every
crossover probability; the pipeline chains them until the code is linear
or Class-I, and optionally continues past Class-I codes.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from services.classi_service import TARGET_ORDERS, dominance_against
from services.errors import RuleNotApplicable
from services.profile_service import (
    ROWS, CodeProfile, canonicalize, class_one_or_none, fold,
    fold_type, format_profile, is_linear, pair_weight, permute_rows, swap_rows
)

logger = logging.getLogger(__name__)

RULES = (
    'even-replace', 'two-bit-flip', 'zero-replace', 'classI-|1|=1',
    'classI-min01', 'classI-certified', 'symmetry',
)
TWO_BIT_TARGETS = {1: (3, 5), 2: (3, 6), 4: (5, 6)}
SEVEN_TO_ONE = swap_rows(1, 4)
TO_TYPE_ONE = {2: swap_rows(3, 4), 4: swap_rows(2, 4)}


@dataclass(frozen=True)
class ReductionStep:
    rule: str
    before: CodeProfile
    after: CodeProfile
    universal: bool = True
    detail: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            'rule': self.rule,
            'before': format_profile(self.before),
            'after': format_profile(self.after),
            'universal': self.universal,
            'detail': self.detail,
        }


def _single_type(row: int) -> int:
    return 1 << (4 - row)


def even_replace(profile: CodeProfile, s: int, t: int) -> ReductionStep:
    """
    Replace a column <2^(4-s)> by <2^(4-s) + 2^(4-t)> when w(c_s xor c_t) is even.

    A flipped source column (15 - 2^(4-s)) is accepted as well and is then
    replaced by the flipped target.

    Raises:
        RuleNotApplicable: no source column, or w(c_s xor c_t) is odd
    """
    if s not in ROWS or t not in ROWS or s == t:
        raise RuleNotApplicable(f"Rows s and t must be distinct values in 1..4, got ({s}, {t}).")
    source = _single_type(s)
    target = source + _single_type(t)
    if profile[source] < 1:
        source, target = 15 - source, 15 - target
        if profile[source] < 1:
            raise RuleNotApplicable(f"No column of type {_single_type(s)} (or its flip) for s = {s}.")
    weight = pair_weight(profile, s, t)
    if weight % 2:
        raise RuleNotApplicable(f"w(c{s} xor c{t}) = {weight} is odd.")
    # a flipped column is equivalent; keep every type in 0..7
    target = fold_type(target)
    after = profile.replace(source, target)
    return ReductionStep('even-replace', profile, after, detail={'s': s, 't': t, 'source': source, 'target': target})


def two_bit_flip(profile: CodeProfile, s: int) -> ReductionStep:
    """Replace one <s> and one <7> column by the pair listed in TWO_BIT_TARGETS."""
    if s not in TWO_BIT_TARGETS:
        raise RuleNotApplicable(f"Two-bit flips start from type 1, 2 or 4, got {s}.")
    if profile[s] < 1 or profile[7] < 1:
        raise RuleNotApplicable(f"Two-bit flip needs a column of type {s} and a column of type 7.")
    first, second = TWO_BIT_TARGETS[s]
    after = profile.replace(s, first).replace(7, second)
    return ReductionStep('two-bit-flip', profile, after, detail={'source': s, 'targets': [first, second]})


def zero_replace(profile: CodeProfile) -> ReductionStep:
    """
    Replace an all-zero column by <3>.

    With a <0> source both codeword groups move by the same amount at every
    output, so the Y5 set of the one-column comparison is empty.
    """
    if profile[0] < 1:
        raise RuleNotApplicable("Profile has no all-zero column of type 0.")
    return ReductionStep('zero-replace', profile, profile.replace(0, 3), detail={'source': 0, 'target': 3})


def symmetry_step(profile: CodeProfile, order: Tuple[int, ...], reason: str) -> ReductionStep:
    return ReductionStep('symmetry', profile, permute_rows(profile, order),
                         detail={'order': list(order), 'reason': reason})


def symmetry_map(profile: CodeProfile, target: int) -> Tuple[CodeProfile, Tuple[int, ...]]:
    """
    Move type `target` (3, 5 or 6) into the <3> slot of a {1,3,5,6} profile.

    The recorded row order is an involution, so applying the map again with
    the same record restores the original profile.
    """
    if not set(fold(profile).support()) - {0} <= {1, 3, 5, 6}:
        raise RuleNotApplicable("Symmetry map needs support within types 1, 3, 5 and 6.")
    if target not in TARGET_ORDERS:
        raise RuleNotApplicable(f"Target must be 3, 5 or 6, got {target}.")
    order = TARGET_ORDERS[target]
    return permute_rows(profile, order), order


def _best_even_pair(profile: CodeProfile, sources: Tuple[int, ...]) -> Optional[ReductionStep]:
    """Applicable even-replace minimizing the resulting |1|, then smallest (s, t)."""
    candidates = []
    for s in sources:
        for t in ROWS:
            if t == s:
                continue
            try:
                step = even_replace(profile, s, t)
            except RuleNotApplicable:
                continue
            candidates.append(((fold(step.after)[1], s, t), step))
    if not candidates:
        return None
    return min(candidates, key=lambda item: item[0])[1]


def class_one_step(profile: CodeProfile, certify: bool = True) -> ReductionStep:
    """
    Replace one <1> column of a Class-I code.

    |1| = 1: by the least frequent of <3>,<5>,<6>; min count 0 or 1: by
    that type; otherwise by the first type whose dominance certificate is
    universal (only when `certify` is set).

    Raises:
        RuleNotApplicable: not Class-I, or no replacement is certified
    """
    code = class_one_or_none(profile)
    if code is None:
        raise RuleNotApplicable(f"{format_profile(profile)} is not a Class-I code.")
    counts = {3: code.n3, 5: code.n5, 6: code.n6}
    smallest = min(counts, key=lambda t: (counts[t], t))
    folded = fold(profile)
    if code.n1 == 1:
        rule, target = 'classI-|1|=1', smallest
    elif counts[smallest] <= 1:
        rule, target = 'classI-min01', smallest
    elif certify:
        rule, target = 'classI-certified', None
        for candidate in (3, 5, 6):
            if dominance_against(code, candidate).universal:
                target = candidate
                break
        if target is None:
            raise RuleNotApplicable(f"No universal replacement for the <1> column of {code.as_tuple()}.")
    else:
        raise RuleNotApplicable(f"Class-I code {code.as_tuple()} is not covered by the replacement theorems.")
    return ReductionStep(rule, folded, folded.replace(1, target), detail={'source': 1, 'target': target})


def _record(steps: List[ReductionStep], step: ReductionStep) -> CodeProfile:
    logger.debug("%s: %s -> %s", step.rule, step.before, step.after)
    steps.append(step)
    return step.after


def _to_linear_or_class_one(profile: CodeProfile, steps: List[ReductionStep]) -> CodeProfile:
    current = fold(profile)
    if current != profile:
        steps.append(ReductionStep('symmetry', profile, current, detail={'reason': 'column flips'}))

    while current[0]:
        current = _record(steps, zero_replace(current))

    sevens = current[7]
    singles = current[1] + current[2] + current[4]
    if 0 < sevens <= singles:
        while current[7]:
            s = next(t for t in (1, 2, 4) if current[t])
            current = _record(steps, two_bit_flip(current, s))
    elif sevens > singles:
        while current[1] + current[2] + current[4]:
            s = next(t for t in (1, 2, 4) if current[t])
            current = _record(steps, two_bit_flip(current, s))
        current = _record(steps, symmetry_step(current, SEVEN_TO_ONE, '7 to 1'))

    while sum(1 for t in (1, 2, 4) if current[t]) >= 2:
        step = _best_even_pair(current, (2, 3, 4))
        if step is None:
            raise RuntimeError(f"No even pair for {current}; row weights must allow one.")
        current = _record(steps, step)

    for single, order in TO_TYPE_ONE.items():
        if current[single]:
            current = _record(steps, symmetry_step(current, order, f'{single} to 1'))

    while current[1] and class_one_or_none(current) is None:
        step = _best_even_pair(current, (4,))
        if step is None:
            raise RuntimeError(f"{current} has odd pair weights but is not Class-I.")
        current = _record(steps, step)

    final = canonicalize(current)
    if final != current:
        steps.append(ReductionStep('symmetry', current, final, detail={'reason': 'sort |3| <= |5| <= |6|'}))
    return final


def reduce_to_linear_or_classI(profile: CodeProfile) -> Tuple[CodeProfile, List[ReductionStep]]:
    """
    Drive any profile to a linear or Class-I profile by universal steps.

    Args:
        profile: any valid profile

    Returns:
        tuple: (final profile, replayable list of ReductionStep)
    """
    steps: List[ReductionStep] = []
    final = _to_linear_or_class_one(profile, steps)
    logger.info("Reduced %s to %s in %d step(s).", profile, final, len(steps))
    return final, steps


def reduce_to_linear(profile: CodeProfile) -> Tuple[CodeProfile, List[ReductionStep]]:
    """
    Continue past Class-I codes with the Class-I replacement rules.

    Stops early, returning the Class-I code, when no universal replacement
    exists for it.
    """
    steps: List[ReductionStep] = []
    current = _to_linear_or_class_one(profile, steps)
    while not is_linear(current):
        try:
            step = class_one_step(current)
        except RuleNotApplicable as exc:
            logger.info("Stopping at Class-I code %s: %s", current, exc)
            break
        current = _record(steps, step)
        current = _to_linear_or_class_one(current, steps)
    return current, steps


def replay(steps: List[ReductionStep]) -> Optional[CodeProfile]:
    """Re-apply a step list; returns the final profile or None when the chain is broken."""
    current = None
    for step in steps:
        if current is not None and step.before != current:
            return None
        current = step.after
    return current
