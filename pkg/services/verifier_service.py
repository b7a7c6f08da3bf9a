"""
Verifier Service Module - Optimality certification for linear (n,2) codes
Sweeps the Class-I profiles that are not already covered by the |1| = 1
and min(|3|,|5|,|6|) <= 1 replacement theorems, exhaustively ranks all
codes for small n, and finds the best linear codes.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from config import PARTITION_MAX_N, SEARCH_MAX_N
from database import insert_report
from services.classi_service import (
    TARGET_ORDERS, Crossover, DominanceCertificate, certificate_from_spectra,
    crossover_intervals, dominance_against, dominance_check, lambda_gap
)
from services.errors import (
    LengthMismatchError, OptimalityViolation, PartitionError, ScenarioError, SearchSizeError
)
from services.oracle_service import OneColumnScenario, partition_spectra
from services.profile_service import (
    ClassIProfile, CodeProfile, DistanceSpectrum, canonicalize, check_probability,
    class_one_or_none, fold, format_fraction, is_linear, materialize
)
from services.spectrum_service import spectrum_analytic

logger = logging.getLogger(__name__)

LINEAR_OPTIMAL = 'linear-optimal'
COUNTEREXAMPLE = 'counterexample-found'
INCONCLUSIVE = 'inconclusive'


@dataclass(frozen=True)
class Counterexample:
    profile: ClassIProfile
    failing_d: int
    margins: Tuple[int, ...]

    def to_dict(self, eps_list: Sequence[Fraction] = ()) -> Dict:
        result = {
            'profile': list(self.profile.as_tuple()),
            'failing_d': self.failing_d,
            'margins': [str(m) for m in self.margins],
        }
        if eps_list:
            result['lambda_gap'] = {format_fraction(e): str(lambda_gap(self.profile, e)) for e in eps_list}
        return result


@dataclass(frozen=True)
class OptimalityReport:
    n: int
    verdict: str
    profiles_checked: int
    theorem_instances_checked: int
    counterexample: Optional[Counterexample] = None
    failed_theorem_instances: Tuple[Tuple[int, int, int, int], ...] = ()
    elapsed: Optional[float] = None
    eps: Tuple[Fraction, ...] = ()

    def to_dict(self, timing: bool = False) -> Dict:
        result = {
            'n': self.n,
            'verdict': self.verdict,
            'profiles_checked': self.profiles_checked,
            'theorem_instances_checked': self.theorem_instances_checked,
            'counterexample': self.counterexample.to_dict(self.eps) if self.counterexample else None,
            'failed_theorem_instances': [list(p) for p in self.failed_theorem_instances],
        }
        if timing and self.elapsed is not None:
            result['elapsed_seconds'] = round(self.elapsed, 3)
        return result


@dataclass(frozen=True)
class LinearCodeResult:
    n: int
    best: Dict[Fraction, List[Tuple[int, int, int]]]
    lambdas: Dict[Fraction, Fraction]
    alpha: Dict[Tuple[int, int, int], Tuple[int, ...]] = field(default_factory=dict)
    compositions_checked: int = 0

    def to_dict(self) -> Dict:
        return {
            'n': self.n,
            'compositions_checked': self.compositions_checked,
            'per_eps': [
                {
                    'eps': format_fraction(eps),
                    'lambda': format_fraction(self.lambdas[eps]),
                    'maximizers': [list(t) for t in self.best[eps]],
                    'alpha': [str(a) for a in self.alpha[tuple(sorted(self.best[eps][0]))]],
                }
                for eps in self.best
            ],
        }


# Algorithm lattice

def lattice_tasks(n: int) -> List[Tuple[int, int]]:
    """(n1, n3) pairs with n1 = 3, 5, ... and n3 = 2..floor((n - n1) / 3)."""
    return [
        (n1, n3)
        for n1 in range(3, n + 1, 2)
        for n3 in range(2, (n - n1) // 3 + 1)
    ]


def lattice_for_task(n: int, n1: int, n3: int) -> Iterator[ClassIProfile]:
    """n5 = n3, n3+2, ... <= (n-n1-n3)/2 and n6 = n - n1 - n3 - n5 of the same parity."""
    for n5 in range(n3, (n - n1 - n3) // 2 + 1, 2):
        n6 = n - n1 - n3 - n5
        if n6 >= n5 and (n6 - n5) % 2 == 0:
            yield ClassIProfile(n1, n3, n5, n6)


def sweep_lattice(n: int) -> List[ClassIProfile]:
    return [p for n1, n3 in lattice_tasks(n) for p in lattice_for_task(n, n1, n3)]


def theorem_instances(n: int) -> List[ClassIProfile]:
    """Sorted Class-I profiles with n1 = 1 or n3 <= 1, which the sweep skips."""
    instances = []
    for n1 in range(1, n + 1, 2):
        rest = n - n1
        for n3 in range(0, rest // 3 + 1):
            if n1 != 1 and n3 > 1:
                continue
            for n5 in range(n3, (rest - n3) // 2 + 1, 2):
                n6 = rest - n3 - n5
                if n6 >= n5 and (n6 - n5) % 2 == 0:
                    instances.append(ClassIProfile(n1, n3, n5, n6))
    return instances


def _sweep_task(args: Tuple[int, int, int, bool]) -> Tuple[int, Optional[Tuple[Tuple[int, ...], int, Tuple[int, ...]]]]:
    n, n1, n3, full = args
    checked = 0
    first = None
    for profile in lattice_for_task(n, n1, n3):
        checked += 1
        certificate = dominance_check(profile)
        if not certificate.universal and first is None:
            first = (profile.as_tuple(), certificate.first_failure[0], certificate.margins)
            if not full:
                break
    return checked, first


def verify_linear_optimal(n: int, workers: int = 1, full: bool = False,
                          eps_list: Sequence[Fraction] = (), store: bool = False) -> OptimalityReport:
    """
    Certify that linear (n,2) codes are optimal.

    Every swept profile must get a universal certificate for replacing one
    <1> column by <3>; the theorem instances are checked separately and a
    failure there makes the verdict inconclusive.

    Args:
        n: block length
        workers: processes; tasks are (n1, n3) sublattices
        full: keep scanning a sublattice after its first counterexample
        eps_list: crossover probabilities for the counterexample's lambda gap
        store: persist the report in the result store

    Returns:
        OptimalityReport: identical for every worker count
    """
    if n < 1:
        raise SearchSizeError("Block length must be at least 1.")
    started = time.perf_counter()
    tasks = [(n, n1, n3, full) for n1, n3 in lattice_tasks(n)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(task) for task in tasks]

    checked = sum(count for count, _ in results)
    failures = sorted(first for _, first in results if first is not None)
    counterexample = None
    if failures:
        profile, d, margins = failures[0]
        counterexample = Counterexample(ClassIProfile(*profile), d, margins)

    instances = theorem_instances(n)
    failed_instances = tuple(p.as_tuple() for p in instances if not dominance_check(p).universal)

    if counterexample:
        verdict = COUNTEREXAMPLE
    elif failed_instances:
        verdict = INCONCLUSIVE
    else:
        verdict = LINEAR_OPTIMAL
    report = OptimalityReport(
        n=n,
        verdict=verdict,
        profiles_checked=checked,
        theorem_instances_checked=len(instances),
        counterexample=counterexample,
        failed_theorem_instances=failed_instances,
        elapsed=time.perf_counter() - started,
        eps=tuple(check_probability(Fraction(e)) for e in eps_list),
    )
    logger.info("n=%d: %s after %d profiles and %d theorem instances.", n, verdict, checked, len(instances))
    if store and not insert_report(n, verdict, checked, report.to_dict()):
        logger.warning("Could not store the report for n=%d.", n)
    return report


# Exhaustive search and best linear codes

def compositions(n: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """All tuples of `parts` nonnegative integers summing to n."""
    for bars in combinations_with_replacement(range(n + 1), parts - 1):
        previous = 0
        counts = []
        for b in bars:
            counts.append(b - previous)
            previous = b
        counts.append(n - previous)
        yield tuple(counts)


def canonical_profiles(n: int) -> List[CodeProfile]:
    """Distinct canonical profiles with columns of types 1..7."""
    seen = {}
    for counts in compositions(n, 7):
        profile = canonicalize(CodeProfile((0,) + counts + (0,) * 8))
        seen.setdefault(profile.counts, profile)
    return [seen[key] for key in sorted(seen)]


def exhaustive_optimal(n: int, eps_list: Sequence[Fraction]) -> Dict[Fraction, List[Tuple[CodeProfile, Fraction]]]:
    """
    Rank every canonical code of length n at each eps.

    Returns:
        dict: eps -> list of (profile, lambda) sorted best first; ties keep
        profile order

    Raises:
        SearchSizeError: n > SEARCH_MAX_N
        OptimalityViolation: for n <= 8, no linear code attains the maximum
    """
    if not 1 <= n <= SEARCH_MAX_N:
        raise SearchSizeError(f"Exhaustive search handles 1 <= n <= {SEARCH_MAX_N}, got n = {n}.")
    eps_values = [check_probability(Fraction(e)) for e in eps_list]
    profiles = canonical_profiles(n)
    spectra = {p.counts: spectrum_analytic(p) for p in profiles}
    ranking = {}
    for eps in eps_values:
        scored = [(p, spectra[p.counts].lambda_at(eps)) for p in profiles]
        scored.sort(key=lambda item: -item[1])
        ranking[eps] = scored
        best = scored[0][1]
        if n <= 8 and not any(is_linear(p) for p, lam in scored if lam == best):
            raise OptimalityViolation(f"No linear code reaches the maximum at n={n}, eps={eps}.")
    logger.info("Ranked %d canonical profiles of length %d.", len(profiles), n)
    return ranking


def maximizers(ranking: Dict[Fraction, List[Tuple[CodeProfile, Fraction]]]) -> Dict[Fraction, List[CodeProfile]]:
    return {eps: [p for p, lam in scored if lam == scored[0][1]] for eps, scored in ranking.items()}


def best_linear(n: int, eps_list: Sequence[Fraction]) -> LinearCodeResult:
    """
    Exhaustive search over all (n3, n5, n6) with n3 + n5 + n6 = n.

    Spectra are shared between orderings of the same triple since row
    interchanges permute |3|, |5|, |6|.
    """
    if n < 1:
        raise SearchSizeError("Block length must be at least 1.")
    eps_values = [check_probability(Fraction(e)) for e in eps_list]
    triples = list(compositions(n, 3))
    alpha: Dict[Tuple[int, int, int], Tuple[int, ...]] = {}
    for triple in triples:
        key = tuple(sorted(triple))
        if key not in alpha:
            alpha[key] = spectrum_analytic(CodeProfile.from_dict({3: key[0], 5: key[1], 6: key[2]})).alpha
    best: Dict[Fraction, List[Tuple[int, int, int]]] = {}
    lambdas: Dict[Fraction, Fraction] = {}
    for eps in eps_values:
        values = {key: DistanceSpectrum(alpha[key]).lambda_at(eps) for key in alpha}
        top = max(values.values())
        lambdas[eps] = top
        best[eps] = [t for t in triples if values[tuple(sorted(t))] == top]
    return LinearCodeResult(n=n, best=best, lambdas=lambdas, alpha=alpha, compositions_checked=len(triples))


# Pairwise comparison

@dataclass(frozen=True)
class ComparisonCertificate:
    """
    How code b compares with code a.

    `better` is 'a' or 'b' for a universal ordering (ties allowed at
    isolated eps), None otherwise. `coefficients` are those of
    4 (lambda_b - lambda_a) / (1 - eps)^n as a polynomial in t = eps/(1-eps).
    """

    kind: str
    better: Optional[str]
    method: str
    coefficients: Tuple[int, ...]
    margins: Tuple[int, ...] = ()
    crossovers: Tuple[Crossover, ...] = ()
    orderings: Dict[Fraction, int] = field(default_factory=dict)

    @property
    def universal(self) -> bool:
        return self.kind == 'universal'

    def to_dict(self) -> Dict:
        return {
            'kind': self.kind,
            'better': self.better,
            'method': self.method,
            'coefficients': [str(c) for c in self.coefficients],
            'margins': [str(m) for m in self.margins],
            'crossovers': [c.to_dict() for c in self.crossovers],
            'orderings': [{'eps': format_fraction(eps), 'order': order} for eps, order in self.orderings.items()],
        }


def _one_column_difference(a: CodeProfile, b: CodeProfile) -> Optional[Tuple[int, int]]:
    """(source, target) when b is a with one column changed, after folding."""
    delta = [y - x for x, y in zip(fold(a).counts, fold(b).counts)]
    removed = [i for i, v in enumerate(delta) if v < 0]
    added = [i for i, v in enumerate(delta) if v > 0]
    if len(removed) == len(added) == 1 and delta[removed[0]] == -1 and delta[added[0]] == 1:
        return removed[0], added[0]
    return None


def _one_column_certificate(a: CodeProfile, b: CodeProfile) -> Optional[Tuple[str, DominanceCertificate]]:
    change = _one_column_difference(a, b)
    if change is None:
        return None
    source, target = change
    code = class_one_or_none(a)
    if code is not None and source == 1 and target in TARGET_ORDERS:
        return 'classI-closed-form', dominance_against(code, target)
    if a.n <= PARTITION_MAX_N:
        book = materialize(fold(a), lead=(source,))
        try:
            spectra = partition_spectra(book, OneColumnScenario(source, target))
        except (PartitionError, ScenarioError) as exc:
            logger.debug("No one-column certificate for %s -> %s: %s", a, b, exc)
            return None
        return 'one-column-oracle', certificate_from_spectra(spectra[3], spectra[5], replacement=target)
    return None


def _sign_of_all(values: Sequence[int]) -> int:
    if all(v >= 0 for v in values):
        return 1
    if all(v <= 0 for v in values):
        return -1
    return 0


def compare_codes(a: CodeProfile, b: CodeProfile, eps_list: Sequence[Fraction] = ()) -> ComparisonCertificate:
    """
    Compare two codes of the same length for every eps and at the given ones.

    Tries, in order: equal spectra; the one-column partial sums (Class-I
    closed form, or oracle partition data for n <= PARTITION_MAX_N) in
    either direction; partial sums of the spectrum difference; absence of
    sign changes of the difference polynomial on 0 < t < 1. Anything else
    is eps-dependent and carries the isolated crossovers.

    Raises:
        LengthMismatchError: a and b differ in length
    """
    if a.n != b.n:
        raise LengthMismatchError(f"Cannot compare codes of length {a.n} and {b.n}.")
    eps_values = [check_probability(Fraction(e)) for e in eps_list]
    spectrum_a, spectrum_b = spectrum_analytic(a), spectrum_analytic(b)
    coefficients = tuple(y - x for x, y in zip(spectrum_a.alpha, spectrum_b.alpha))
    orderings = {}
    for eps in eps_values:
        lam_a, lam_b = spectrum_a.lambda_at(eps), spectrum_b.lambda_at(eps)
        orderings[eps] = (lam_b > lam_a) - (lam_b < lam_a)
    winner = {1: 'b', -1: 'a'}

    if not any(coefficients):
        return ComparisonCertificate('identical', None, 'equal-spectra', coefficients, orderings=orderings)

    for first, second, flip in ((a, b, 1), (b, a, -1)):
        found = _one_column_certificate(first, second)
        if found is None:
            continue
        method, certificate = found
        direction = _sign_of_all(certificate.margins) * flip
        if direction:
            return ComparisonCertificate('universal', winner[direction], method, coefficients,
                                         margins=certificate.margins, orderings=orderings)
        break

    margins = tuple(_partial_sums(coefficients))
    direction = _sign_of_all(margins)
    if direction:
        return ComparisonCertificate('universal', winner[direction], 'alpha-partial-sums', coefficients,
                                     margins=margins, orderings=orderings)

    crossovers = crossover_intervals(coefficients)
    if not any(c.changes_sign for c in crossovers):
        lowest = next(c for c in coefficients if c)
        return ComparisonCertificate('universal', winner[1 if lowest > 0 else -1], 'no-sign-change',
                                     coefficients, margins=margins, crossovers=crossovers, orderings=orderings)
    logger.info("%s and %s cross %d time(s) in (0, 1/2).", a, b, sum(c.changes_sign for c in crossovers))
    return ComparisonCertificate('eps-dependent', None, 'crossovers', coefficients,
                                 margins=margins, crossovers=crossovers, orderings=orderings)


def _partial_sums(values: Sequence[int]) -> List[int]:
    sums, total = [], 0
    for value in values:
        total += value
        sums.append(total)
    return sums
