"""
Class-I Service Module - Exact analysis of Class-I codes
For a Class-I code C whose first column is <1> and the code C' that has
that column replaced by <3>, computes the Y3/Y5 spectra alpha3/alpha5 from
binomial sums, the partial-sum dominance certificate, the polynomial whose
sign on t = eps/(1-eps) decides lambda_C' >= lambda_C, and its crossovers.

Half-integer bounds are handled on doubled integers; the Class-I parities
make every equality constraint integral.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from services.profile_service import (
    ClassIProfile, binomial, binomial_row, check_probability, permute_rows,
    swap_rows
)
from services.spectrum_service import WeightTuple, codeword_distances
from services.errors import ParityError

logger = logging.getLogger(__name__)

# Row order that moves the given type into the <3> slot while fixing <1>
TARGET_ORDERS: Dict[int, Tuple[int, ...]] = {
    3: (1, 2, 3, 4),
    5: swap_rows(2, 3),
    6: swap_rows(1, 3),
}

_T = sympy.Symbol('t')


@dataclass(frozen=True)
class ClassISpectra:
    alpha3: Tuple[int, ...]
    alpha5: Tuple[int, ...]
    profile: ClassIProfile


@dataclass(frozen=True)
class Crossover:
    """An eps-interval holding exactly one root of the comparison polynomial."""

    eps_low: Fraction
    eps_high: Fraction
    multiplicity: int

    @property
    def changes_sign(self) -> bool:
        return self.multiplicity % 2 == 1

    def to_dict(self) -> Dict:
        return {
            'eps_low': str(self.eps_low),
            'eps_high': str(self.eps_high),
            'multiplicity': self.multiplicity,
        }


@dataclass(frozen=True)
class DominanceCertificate:
    """
    Outcome of the partial-sum test for replacing one <1> column.

    margins[d-1] = Psi_d = sum_{i<=d} (alpha3_i - alpha5_{i-1}); the
    replacement is a universal improvement iff every margin is >= 0.
    """

    kind: str
    margins: Tuple[int, ...]
    coefficients: Tuple[int, ...]
    profile: Optional[ClassIProfile] = None
    replacement: int = 3
    first_failure: Optional[Tuple[int, int]] = None
    crossovers: Tuple[Crossover, ...] = field(default_factory=tuple)

    @property
    def universal(self) -> bool:
        return self.kind == 'universal'

    def to_dict(self) -> Dict:
        result = {
            'kind': self.kind,
            'profile': list(self.profile.as_tuple()) if self.profile else None,
            'replacement': self.replacement,
            'margins': [str(m) for m in self.margins],
            'coefficients': [str(c) for c in self.coefficients],
            'first_failure': None,
        }
        if self.first_failure:
            d, margin = self.first_failure
            result['first_failure'] = {'d': d, 'margin': str(margin)}
        if self.crossovers:
            result['crossovers'] = [c.to_dict() for c in self.crossovers]
        return result


def _choose(row: Sequence[int], k: int) -> int:
    return row[k] if 0 <= k < len(row) else 0


def _prefix(values: Sequence[int]) -> List[int]:
    sums = [0]
    for value in values:
        sums.append(sums[-1] + value)
    return sums


def _range_sum(prefix: List[int], lo: int, hi: int) -> int:
    lo, hi = max(lo, 0), min(hi, len(prefix) - 2)
    if lo > hi:
        return 0
    return prefix[hi + 1] - prefix[lo]


# Membership of single weight tuples

def _distances(profile: ClassIProfile, weights: WeightTuple) -> Optional[Tuple[int, int, int, int]]:
    if weights.y1 != 1 or weights.w(1) < 1:
        return None
    unknown = set(weights.weights) - {1, 3, 5, 6}
    if unknown:
        raise ParityError(f"Class-I weight tuples only use types 1, 3, 5 and 6, got {sorted(unknown)}.")
    return codeword_distances(profile.to_profile(), weights)


def y3_membership(profile: ClassIProfile, weights: WeightTuple) -> bool:
    """y1 = 1 and d4 >= min(d1, d2) = d3."""
    d = _distances(profile, weights)
    if d is None:
        return False
    d1, d2, d3, d4 = d
    return d4 >= min(d1, d2) == d3


def y5_membership(profile: ClassIProfile, weights: WeightTuple) -> bool:
    """y1 = 1 and min(d1, d2) >= d4 + 2 = d3 + 1."""
    d = _distances(profile, weights)
    if d is None:
        return False
    d1, d2, d3, d4 = d
    return min(d1, d2) >= d4 + 2 == d3 + 1


def alpha_by_enumeration(profile: ClassIProfile) -> ClassISpectra:
    """alpha3/alpha5 by testing every weight tuple for membership; O(n^4)."""
    n1, n3, n5, n6 = profile.as_tuple()
    alpha3 = [0] * (profile.n + 1)
    alpha5 = [0] * (profile.n + 1)
    for w1 in range(1, n1 + 1):
        for w3 in range(n3 + 1):
            for w5 in range(n5 + 1):
                for w6 in range(n6 + 1):
                    weights = WeightTuple({1: w1, 3: w3, 5: w5, 6: w6}, y1=1)
                    ways = binomial(n1 - 1, w1 - 1) * binomial(n3, w3) * binomial(n5, w5) * binomial(n6, w6)
                    if y3_membership(profile, weights):
                        alpha3[codeword_distances(profile.to_profile(), weights)[2]] += ways
                    elif y5_membership(profile, weights):
                        alpha5[codeword_distances(profile.to_profile(), weights)[2] - 1] += ways
    return ClassISpectra(tuple(alpha3), tuple(alpha5), profile)


# Closed-form spectra

def alpha3_vector(profile: ClassIProfile) -> Tuple[int, ...]:
    """
    alpha3_i for i = 0..n as the sum of the two Y3 cases.

    Case A (w5 + w6 below half of |5|+|6|) fixes w3 + w6 = (|3|+|6|)/2 and
    i = w1 + w5 + (|3|+|6|)/2; case B fixes w3 - w5 = (|3|-|5|)/2 and
    i = w1 + |6| - w6 + (|3|+|5|)/2. The remaining free variable is summed
    through prefix sums.
    """
    n1, n3, n5, n6 = profile.as_tuple()
    b1, b3, b5, b6 = binomial_row(n1 - 1), binomial_row(n3), binomial_row(n5), binomial_row(n6)
    h = (n3 + n6) // 2
    k = (n3 - n5) // 2
    half56 = (n5 + n6) // 2
    slack = (n1 + n5 - n6 - 1) // 2
    alpha = [0] * (profile.n + 1)

    case_a = _prefix([_choose(b3, h - w6) * b6[w6] for w6 in range(n6 + 1)])
    case_b = _prefix([_choose(b3, w5 + k) * b5[w5] for w5 in range(n5 + 1)])
    for w1 in range(1, n1 + 1):
        lead = b1[w1 - 1]
        for w5 in range(n5 + 1):
            ways = _range_sum(case_a, max(w1 + w5 - slack, h - n3), min(half56 - w5 - 1, h))
            if ways:
                alpha[w1 + w5 + h] += lead * b5[w5] * ways
        for w6 in range(n6 + 1):
            ways = _range_sum(case_b, max(half56 - w6, -k), min(w6 - w1 + slack, n3 - k))
            if ways:
                alpha[w1 + n6 - w6 + (n3 + n5) // 2] += lead * b6[w6] * ways
    return tuple(alpha)


def alpha5_vector(profile: ClassIProfile) -> Tuple[int, ...]:
    """alpha5_i for i = 0..n; w3 = (n+|3|-1)/2 - i and w6 = w1 + w5 - (|1|+|5|-|6|+1)/2."""
    n1, n3, n5, n6 = profile.as_tuple()
    n = profile.n
    b1, b3, b5, b6 = binomial_row(n1 - 1), binomial_row(n3), binomial_row(n5), binomial_row(n6)
    h = (n3 + n6) // 2
    k = (n3 - n5) // 2
    m = (n1 + n5 - n6 + 1) // 2
    top = (n + n3 - 1) // 2
    alpha = [0] * (n + 1)
    for w1 in range(1, n1 + 1):
        pairs = _prefix([b5[w5] * _choose(b6, w1 + w5 - m) for w5 in range(n5 + 1)])
        lead = b1[w1 - 1]
        for w3 in range(n3 + 1):
            i = top - w3
            if not 0 <= i <= n:
                continue
            ways = _range_sum(pairs, max(h + 1 - w3 - w1 + m, m - w1), min(w3 - k - 1, n6 + m - w1))
            if ways:
                alpha[i] += lead * b3[w3] * ways
    return tuple(alpha)


@lru_cache(maxsize=4096)
def class_one_spectra(profile: ClassIProfile) -> ClassISpectra:
    return ClassISpectra(alpha3_vector(profile), alpha5_vector(profile), profile)


def alpha3(profile: ClassIProfile, i: int) -> int:
    vector = class_one_spectra(profile).alpha3
    return vector[i] if 0 <= i < len(vector) else 0


def alpha5(profile: ClassIProfile, i: int) -> int:
    vector = class_one_spectra(profile).alpha5
    return vector[i] if 0 <= i < len(vector) else 0


# Certificates and the comparison polynomial

def comparison_coefficients(alpha3_values: Sequence[int], alpha5_values: Sequence[int]) -> Tuple[int, ...]:
    """c_d = alpha3_d - alpha5_{d-1} for d = 1..n (c_d multiplies t^(d-1))."""
    n = len(alpha3_values) - 1
    return tuple(alpha3_values[d] - alpha5_values[d - 1] for d in range(1, n + 1))


def certificate_from_spectra(alpha3_values: Sequence[int], alpha5_values: Sequence[int],
                             profile: Optional[ClassIProfile] = None,
                             replacement: int = 3) -> DominanceCertificate:
    """
    Partial-sum certificate for any pair of codes differing in one column.

    Every margin is computed even after the first negative one.
    """
    coefficients = comparison_coefficients(alpha3_values, alpha5_values)
    margins = _prefix(coefficients)[1:]
    first_failure = next(((d, m) for d, m in enumerate(margins, start=1) if m < 0), None)
    return DominanceCertificate(
        kind='refuted' if first_failure else 'universal',
        margins=tuple(margins),
        coefficients=coefficients,
        profile=profile,
        replacement=replacement,
        first_failure=first_failure,
    )


def dominance_check(profile: ClassIProfile) -> DominanceCertificate:
    """Certificate for replacing one <1> column of a Class-I code by <3>."""
    spectra = class_one_spectra(profile)
    certificate = certificate_from_spectra(spectra.alpha3, spectra.alpha5, profile)
    if not certificate.universal:
        logger.info("Profile %s refuted at d=%d.", profile.as_tuple(), certificate.first_failure[0])
    return certificate


def map_to_target(profile: ClassIProfile, target: int) -> ClassIProfile:
    """Relabel rows so that type `target` takes the <3> slot; <1> stays put."""
    if target not in TARGET_ORDERS:
        raise ParityError(f"Replacement type must be 3, 5 or 6, got {target}.")
    return ClassIProfile.from_profile(permute_rows(profile.to_profile(), TARGET_ORDERS[target]))


def dominance_against(profile: ClassIProfile, target: int) -> DominanceCertificate:
    """Certificate for replacing one <1> column by <target>, via the row map."""
    mapped = map_to_target(profile, target)
    spectra = class_one_spectra(mapped)
    return certificate_from_spectra(spectra.alpha3, spectra.alpha5, profile, replacement=target)


def comparison_polynomial(profile: ClassIProfile) -> Tuple[int, ...]:
    spectra = class_one_spectra(profile)
    return comparison_coefficients(spectra.alpha3, spectra.alpha5)


def evaluate_polynomial(coefficients: Sequence[int], eps: Fraction) -> Fraction:
    """sum_d coefficients[d] t^d at t = eps / (1 - eps)."""
    eps = check_probability(Fraction(eps))
    t = eps / (1 - eps)
    value = Fraction(0)
    for c in reversed(coefficients):
        value = value * t + c
    return value


def lambda_gap(profile: ClassIProfile, eps: Fraction) -> Fraction:
    """
    Exact lambda_C' - lambda_C, equal to
    (1/4) (1 - 2 eps) (1 - eps)^(n-1) P(eps / (1 - eps)).
    """
    eps = check_probability(Fraction(eps))
    value = evaluate_polynomial(comparison_polynomial(profile), eps)
    return Fraction(1, 4) * (1 - 2 * eps) * (1 - eps) ** (profile.n - 1) * value


def _to_fraction(value) -> Fraction:
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def crossover_intervals(coefficients: Sequence[int]) -> Tuple[Crossover, ...]:
    """
    Isolate the roots in 0 < t < 1 of sum_d coefficients[d] t^d.

    Returns:
        tuple: one Crossover per root, as an interval of eps = t / (1 + t)
    """
    coeffs = list(coefficients)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if len(coeffs) < 2:
        return ()
    poly = sympy.Poly(list(reversed(coeffs)), _T)
    unit = sympy.Poly(_T - 1, _T)
    while poly.degree() > 0 and poly.eval(1) == 0:
        poly = poly.quo(unit)
    crossovers = []
    for (low, high), multiplicity in poly.intervals(inf=0, sup=1):
        t_low, t_high = _to_fraction(low), _to_fraction(high)
        crossovers.append(Crossover(t_low / (1 + t_low), t_high / (1 + t_high), int(multiplicity)))
    return tuple(crossovers)


# Binomial facts behind the |1| = 1 argument

def binomial_dominance_holds(n3: int, n6: int, w3: int, w6: int) -> bool:
    """C(n3,w3) C(n6,w6) <= C(n3,(n3-n6)/2+w6) C(n6,(n6-n3)/2+w3)."""
    if (n3 - n6) % 2:
        raise ParityError("|3| and |6| must have the same parity.")
    shift = (n3 - n6) // 2
    return binomial(n3, w3) * binomial(n6, w6) <= binomial(n3, shift + w6) * binomial(n6, w3 - shift)


def w5_pairs(n3: int, n6: int) -> List[Tuple[int, int]]:
    """(w3, w6) with w3+w6 >= (n3+n6)/2+1, w3-w6 >= (n3-n6)/2+1 in range; no distance cut."""
    return [
        (w3, w6)
        for w3 in range(n3 + 1) for w6 in range(n6 + 1)
        if 2 * (w3 + w6) >= n3 + n6 + 2 and 2 * (w3 - w6) >= n3 - n6 + 2
    ]


def in_w3_prime(n3: int, n6: int, w3: int, w6: int) -> bool:
    return (
        2 * (w3 + w6) >= n3 + n6
        and 2 * (w3 - w6) >= n3 - n6 + 1
        and n3 - n6 <= 2 * w3 <= n3 + n6
        and n6 - n3 <= 2 * w6 <= n3 + n6
    )
