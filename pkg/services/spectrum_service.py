"""
Spectrum Service Module - Closed-form spectra and reliability
Computes ML distance spectra by enumerating per-type weight tuples instead
of channel outputs, evaluates the reliability polynomial exactly and
compares codes at a given crossover probability.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from config import AUTO_ORACLE_MAX_N
from database import get_spectrum_by_profile, insert_spectrum
from services.errors import LengthMismatchError, ProfileError
from services.oracle_service import spectrum_bruteforce
from services.profile_service import (
    ROWS, CodeProfile, DistanceSpectrum, binomial_row, bit, canonicalize,
    check_probability, fold, format_profile, materialize
)

logger = logging.getLogger(__name__)

ENGINES = ('oracle', 'analytic', 'auto')


@dataclass(frozen=True)
class WeightTuple:
    """w_i = number of ones of y inside the columns of type i; y1 is the first bit."""

    weights: Mapping[int, int] = field(default_factory=dict)
    y1: Optional[int] = None

    def w(self, column_type: int) -> int:
        return self.weights.get(column_type, 0)


@dataclass(frozen=True)
class ReliabilityPolynomial:
    """lambda(eps) = (1/4) sum_d coeffs[d] (1-eps)^(n-d) eps^d."""

    coeffs: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_spectrum(cls, spectrum: DistanceSpectrum) -> 'ReliabilityPolynomial':
        return cls(spectrum.alpha)

    def evaluate(self, eps: Fraction) -> Fraction:
        return DistanceSpectrum(self.coeffs).lambda_at(eps)

    def t_coefficients(self) -> Tuple[int, ...]:
        """Coefficients of lambda / ((1-eps)^n / 4) as a polynomial in t = eps/(1-eps)."""
        return self.coeffs


def codeword_distances(profile: CodeProfile, weights: WeightTuple) -> Tuple[int, int, int, int]:
    """
    (d1, d2, d3, d4) for any output with the given per-type weights.

    Row j picks up w_i from columns whose entry in row j is 0, and the
    complement |i| - w_i from columns whose entry is 1.
    """
    for column_type, w in weights.weights.items():
        if not 0 <= w <= profile[column_type]:
            raise ProfileError(f"Weight {w} for type {column_type} is outside 0..{profile[column_type]}.")
    distances = []
    for row in ROWS:
        total = 0
        for column_type, count in enumerate(profile.counts):
            if count:
                w = weights.w(column_type)
                total += count - w if bit(column_type, row) else w
        distances.append(total)
    return tuple(distances)


def spectrum_analytic(profile: CodeProfile) -> DistanceSpectrum:
    """
    Exact spectrum without enumerating the 2^n outputs.

    Outputs are grouped by their distance vector (d1..d4); each column type
    is folded in turn with binomial multiplicities, so the work grows with
    the number of distinct distance vectors rather than with 2^n.

    Args:
        profile: any valid profile; types 8..15 are folded first

    Returns:
        DistanceSpectrum: alpha indexed 0..n
    """
    folded = fold(profile)
    states: Dict[Tuple[int, ...], int] = {(0, 0, 0, 0): 1}
    for column_type, count in enumerate(folded.counts):
        if not count:
            continue
        row_bits = [bit(column_type, row) for row in ROWS]
        multiplicities = binomial_row(count)
        merged: Dict[Tuple[int, ...], int] = defaultdict(int)
        for state, ways in states.items():
            for w, choose in enumerate(multiplicities):
                key = tuple(d + (count - w if b else w) for d, b in zip(state, row_bits))
                merged[key] += ways * choose
        states = merged
    alpha = [0] * (folded.n + 1)
    for state, ways in states.items():
        alpha[min(state)] += ways
    logger.debug("Analytic spectrum of %s from %d distance vectors.", profile, len(states))
    return DistanceSpectrum(tuple(alpha))


def lambda_analytic(profile: CodeProfile, eps: Fraction) -> Fraction:
    return spectrum_analytic(profile).lambda_at(eps)


def reliability_polynomial(profile: CodeProfile) -> ReliabilityPolynomial:
    return ReliabilityPolynomial.from_spectrum(spectrum_analytic(profile))


def compare_at_eps(a: CodeProfile, b: CodeProfile, eps: Fraction) -> int:
    """
    Exact three-way comparison of lambda_a and lambda_b.

    Returns:
        int: 1 if a is strictly better, -1 if b is strictly better, 0 if equal
    """
    if a.n != b.n:
        raise LengthMismatchError(f"Cannot compare codes of length {a.n} and {b.n}.")
    check_probability(eps)
    lam_a, lam_b = lambda_analytic(a, eps), lambda_analytic(b, eps)
    return (lam_a > lam_b) - (lam_a < lam_b)


def spectrum_for(profile: CodeProfile, engine: str = 'analytic', workers: int = 1,
                 store: bool = False) -> DistanceSpectrum:
    """
    Spectrum through the requested engine.

    'auto' runs the oracle for n <= AUTO_ORACLE_MAX_N and checks it against
    the analytic result; longer codes go straight to the analytic engine.
    With store=True analytic spectra are read from and written to the
    result store, keyed by the canonical profile.
    """
    if engine not in ENGINES:
        raise ProfileError(f"Unknown engine {engine!r}; choose one of {', '.join(ENGINES)}.")
    if engine == 'oracle':
        return spectrum_bruteforce(materialize(profile), workers)
    if engine == 'auto' and profile.n <= AUTO_ORACLE_MAX_N:
        brute = spectrum_bruteforce(materialize(profile), workers)
        analytic = spectrum_analytic(profile)
        if brute.alpha != analytic.alpha:
            logger.error("Engines disagree on %s: %s vs %s", profile, brute.alpha, analytic.alpha)
            raise RuntimeError(f"Oracle and analytic spectra differ for {profile}.")
        return brute
    if not store:
        return spectrum_analytic(profile)
    key = format_profile(canonicalize(profile))
    cached = get_spectrum_by_profile(key)
    if cached:
        logger.debug("Spectrum of %s served from the store.", key)
        return DistanceSpectrum(tuple(cached['alpha']))
    spectrum = spectrum_analytic(profile)
    insert_spectrum(key, spectrum.n, list(spectrum.alpha))
    return spectrum
