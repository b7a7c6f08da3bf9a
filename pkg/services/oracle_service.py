"""
Oracle Service Module - Brute-force ground truth
Enumerates all 2^n channel outputs of a codebook to get exact ML distance
spectra, and checks the five-set partitions used to compare a code with a
code that differs from it in one column or in two bits of one codeword.

Outputs are enumerated in the integer order of y read as an n-bit number,
with the first position as the most significant bit.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Dict, FrozenSet, List, Sequence, Tuple, Union

import numpy as np

from config import ORACLE_CHUNK_BITS, ORACLE_MAX_N, PARTITION_MAX_N
from services.errors import (
    LengthMismatchError, OracleSizeError, PartitionError, ScenarioError
)
from services.profile_service import (
    ROWS, CodeProfile, Codebook, DistanceSpectrum, bit, hamming_distance
)

logger = logging.getLogger(__name__)

TWO_BIT_PAIRS = {1: (3, 5), 2: (3, 6), 4: (5, 6)}


class PartitionLabel(IntEnum):
    Y1 = 1
    Y2 = 2
    Y3 = 3
    Y4 = 4
    Y5 = 5


@dataclass(frozen=True)
class GroupDistances:
    dO: int
    dP: int
    dOprime: int
    dPprime: int


@dataclass(frozen=True)
class OneColumnScenario:
    """C' changes the first column of C from <source> to <target>."""

    source: int
    target: int
    kind = 'one-column'

    def __post_init__(self):
        if not (0 <= self.source < 16 and 0 <= self.target < 16):
            raise ScenarioError("Column types must lie in 0..15.")
        if self.target in (self.source, 15 - self.source):
            raise ScenarioError("Target column must differ from the source and from its flip.")

    @property
    def lead(self) -> Tuple[int, ...]:
        return (self.source,)

    @property
    def flipped_rows(self) -> FrozenSet[int]:
        return frozenset(j for j in ROWS if bit(self.source, j) != bit(self.target, j))

    @property
    def primed_labels(self) -> FrozenSet[int]:
        return frozenset((2, 4, 5))

    def apply(self, profile: CodeProfile) -> CodeProfile:
        return profile.replace(self.source, self.target)


@dataclass(frozen=True)
class TwoBitScenario:
    """
    C has first columns <source> and <7>; C' flips both bits of one
    codeword so they become the pair in TWO_BIT_PAIRS.
    """

    source: int
    kind = 'two-bit'

    def __post_init__(self):
        if self.source not in TWO_BIT_PAIRS:
            raise ScenarioError("Two-bit scenarios start from a column of type 1, 2 or 4.")

    @property
    def lead(self) -> Tuple[int, ...]:
        return (self.source, 7)

    @property
    def flipped_rows(self) -> FrozenSet[int]:
        return frozenset((4,)) if self.source == 2 else frozenset((3,))

    @property
    def primed_labels(self) -> FrozenSet[int]:
        return frozenset((3, 4))

    def apply(self, profile: CodeProfile) -> CodeProfile:
        first, second = TWO_BIT_PAIRS[self.source]
        return profile.replace(self.source, first).replace(7, second)


Scenario = Union[OneColumnScenario, TwoBitScenario]


def _check_size(book: Codebook) -> None:
    if book.n > ORACLE_MAX_N:
        raise OracleSizeError(f"The brute-force engine handles n <= {ORACLE_MAX_N}, got n = {book.n}.")


def _as_bits(y: Union[str, Sequence[int]], n: int) -> Tuple[int, ...]:
    bits = tuple(int(ch) for ch in y)
    if len(bits) != n:
        raise LengthMismatchError(f"Output has length {len(bits)}, codebook has length {n}.")
    return bits


def _output_bits(start: int, stop: int, n: int) -> np.ndarray:
    ys = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((ys[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def _distance_matrix(rows: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """(outputs, codewords) matrix of Hamming distances."""
    return (bits[:, None, :] != rows[None, :, :]).sum(axis=2)


def _chunks(total: int) -> List[Tuple[int, int]]:
    step = 1 << ORACLE_CHUNK_BITS
    bounds = list(range(0, total, step)) + [total]
    return list(zip(bounds[:-1], bounds[1:]))


def _spectrum_range(codewords: Tuple[Tuple[int, ...], ...], start: int, stop: int) -> List[int]:
    rows = np.array(codewords, dtype=np.int8)
    n = rows.shape[1]
    distances = _distance_matrix(rows, _output_bits(start, stop, n)).min(axis=1)
    return np.bincount(distances, minlength=n + 1).tolist()


def ml_distance(book: Codebook, y: Union[str, Sequence[int]]) -> int:
    """d_C(y): distance from y to the nearest codeword."""
    bits = _as_bits(y, book.n)
    return min(hamming_distance(row, bits) for row in book.codewords)


def spectrum_bruteforce(book: Codebook, workers: int = 1) -> DistanceSpectrum:
    """
    Exact ML distance spectrum by enumerating every output.

    Args:
        book: codebook with 2..32 rows and n <= ORACLE_MAX_N
        workers: process count; the 2^n range is split into disjoint chunks

    Returns:
        DistanceSpectrum: alpha summing to 2^n
    """
    _check_size(book)
    n = book.n
    ranges = _chunks(1 << n)
    alpha = [0] * (n + 1)
    if workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_spectrum_range, [book.codewords] * len(ranges),
                                  [r[0] for r in ranges], [r[1] for r in ranges]))
    else:
        parts = [_spectrum_range(book.codewords, start, stop) for start, stop in ranges]
    for part in parts:
        for d, count in enumerate(part):
            alpha[d] += int(count)
    logger.debug("Brute-force spectrum over %d outputs in %d chunk(s).", 1 << n, len(ranges))
    return DistanceSpectrum(tuple(alpha), size=book.size)


def lambda_bruteforce(book: Codebook, eps: Fraction, workers: int = 1) -> Fraction:
    return spectrum_bruteforce(book, workers).lambda_at(eps)


# Comparison scenarios

def _check_scenario(book: Codebook, scenario: Scenario) -> None:
    if book.size != 4:
        raise ScenarioError("Partitions are defined for four-codeword books only.")
    if book.n > PARTITION_MAX_N:
        raise OracleSizeError(f"Partition checks handle n <= {PARTITION_MAX_N}, got n = {book.n}.")
    for position, column_type in enumerate(scenario.lead):
        if position >= book.n or book.column_type(position) != column_type:
            raise ScenarioError(
                f"Column {position + 1} of the codebook must have type {column_type} for a {scenario.kind} scenario."
            )


def _flip_mask(scenario: Scenario, n: int) -> int:
    return sum(1 << (n - 1 - tau) for tau in range(len(scenario.lead)))


def apply_scenario(book: Codebook, scenario: Scenario) -> Codebook:
    """The modified code C': rows in the flipped group get their first columns inverted."""
    _check_scenario(book, scenario)
    width = len(scenario.lead)
    rows = []
    for j, row in enumerate(book.codewords, start=1):
        if j in scenario.flipped_rows:
            row = tuple(1 - b if position < width else b for position, b in enumerate(row))
        rows.append(row)
    return Codebook(tuple(rows))


def _primed_distances(scenario: Scenario, d: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """d'_i = d_i + sum over changed columns of (-1)^bit_i (1 - 2 y)."""
    dprime = d.copy()
    for tau, column_type in enumerate(scenario.lead):
        change = 1 - 2 * bits[:, tau].astype(np.int64)
        for j in ROWS:
            sign = -1 if bit(column_type, j) else 1
            dprime[:, j - 1] += sign * change
    return dprime


def _group_views(book: Codebook, scenario: Scenario):
    n = book.n
    bits = _output_bits(0, 1 << n, n)
    rows = np.array(book.codewords, dtype=np.int8)
    d = _distance_matrix(rows, bits).astype(np.int64)
    dprime = _primed_distances(scenario, d, bits)
    p_cols = [j - 1 for j in ROWS if j in scenario.flipped_rows]
    o_cols = [j - 1 for j in ROWS if j not in scenario.flipped_rows]
    groups = {
        'dO': d[:, o_cols].min(axis=1),
        'dP': d[:, p_cols].min(axis=1),
        'dOp': dprime[:, o_cols].min(axis=1),
        'dPp': dprime[:, p_cols].min(axis=1),
    }
    return bits, d, groups


def _memberships(scenario: Scenario, bits: np.ndarray, g: Dict[str, np.ndarray]) -> List[np.ndarray]:
    dO, dP, dOp, dPp = g['dO'], g['dP'], g['dOp'], g['dPp']
    if scenario.kind == 'one-column':
        return [
            ((dO <= dP) & (dP < dPp)) | ((dO <= dPp) & (dPp <= dP) & (dOp <= dPp)),
            ((dP <= dPp) & (dP < dO)) | ((dPp < dP) & (dP <= dO) & (dP <= dOp)),
            (dPp == dOp) & (dOp < dP) & (dP == dO),
            (dP == dPp) & (dPp == dO) & (dO < dOp),
            (dPp == dO) & (dO < dOp) & (dOp == dP),
        ]
    differ = bits[:, 0] != bits[:, 1]
    low_o = np.minimum(dO, dOp)
    low_p = np.minimum(dP, dPp)
    return [
        ~differ,
        differ & (dO <= low_p),
        differ & (dO > low_p) & (dP <= low_o),
        differ & (dPp < low_o) & (low_o < dP),
        differ & (dOp <= low_p) & (low_p < dO) & (dOp < dP),
    ]


def partition_labels(book: Codebook, scenario: Scenario) -> np.ndarray:
    """Label 1..5 for every output, or 0 where membership is not unique."""
    _check_scenario(book, scenario)
    bits, _, groups = _group_views(book, scenario)
    masks = _memberships(scenario, bits, groups)
    hits = np.sum(masks, axis=0)
    labels = np.zeros(len(bits), dtype=np.int64)
    for label, mask in enumerate(masks, start=1):
        labels[mask] = label
    labels[hits != 1] = 0
    return labels


def group_distances(book: Codebook, scenario: Scenario, y: Union[str, Sequence[int]]) -> GroupDistances:
    _check_scenario(book, scenario)
    bits = _as_bits(y, book.n)
    d = [hamming_distance(row, bits) for row in book.codewords]
    dprime = list(d)
    for tau, column_type in enumerate(scenario.lead):
        change = 1 - 2 * bits[tau]
        for j in ROWS:
            dprime[j - 1] += (-1 if bit(column_type, j) else 1) * change
    p_rows = [j - 1 for j in ROWS if j in scenario.flipped_rows]
    o_rows = [j - 1 for j in ROWS if j not in scenario.flipped_rows]
    return GroupDistances(
        dO=min(d[i] for i in o_rows),
        dP=min(d[i] for i in p_rows),
        dOprime=min(dprime[i] for i in o_rows),
        dPprime=min(dprime[i] for i in p_rows),
    )


def classify_partition(book: Codebook, scenario: Scenario, y: Union[str, Sequence[int]]) -> PartitionLabel:
    """
    Partition set of a single output.

    Raises:
        ScenarioError: if the leading columns do not match the scenario
        PartitionError: if the output satisfies zero or several definitions
    """
    g = group_distances(book, scenario, y)
    bits = np.array([_as_bits(y, book.n)], dtype=np.int8)
    groups = {key: np.array([value]) for key, value in
              (('dO', g.dO), ('dP', g.dP), ('dOp', g.dOprime), ('dPp', g.dPprime))}
    matches = [label for label, mask in enumerate(_memberships(scenario, bits, groups), start=1) if mask[0]]
    if len(matches) != 1:
        raise PartitionError(f"Output {''.join(map(str, bits[0]))} matches partition sets {matches}.")
    return PartitionLabel(matches[0])


def partition_spectra(book: Codebook, scenario: Scenario) -> Dict[int, List[int]]:
    """alpha^i_d(C) = |{y in Y_i : d_C(y) = d}| for i = 1..5."""
    labels = partition_labels(book, scenario)
    if (labels == 0).any():
        raise PartitionError(f"{int((labels == 0).sum())} outputs fall outside a unique partition set.")
    rows = np.array(book.codewords, dtype=np.int8)
    d_code = _distance_matrix(rows, _output_bits(0, 1 << book.n, book.n)).min(axis=1)
    return {
        label: np.bincount(d_code[labels == label], minlength=book.n + 1).tolist()
        for label in range(1, 6)
    }


def check_partition_claims(book: Codebook, scenario: Scenario) -> List[str]:
    """
    Check both partitions and the pointwise distance relations for a scenario.

    Returns:
        list: human-readable violations; empty when every claim holds
    """
    _check_scenario(book, scenario)
    n = book.n
    bits, d, g = _group_views(book, scenario)
    masks = _memberships(scenario, bits, g)
    violations: List[str] = []

    hits = np.sum(masks, axis=0)
    if (hits != 1).any():
        violations.append(f"{int((hits != 1).sum())} outputs are not in exactly one set of the first partition.")

    labels = np.zeros(len(bits), dtype=np.int64)
    for label, mask in enumerate(masks, start=1):
        labels[mask & (hits == 1)] = label
    index = np.arange(1 << n, dtype=np.int64)
    flipped = index ^ _flip_mask(scenario, n)
    primed = np.isin(labels, sorted(scenario.primed_labels))
    coverage = (~primed).astype(np.int64)
    np.add.at(coverage, flipped[primed], 1)
    if (coverage != 1).any():
        violations.append(f"{int((coverage != 1).sum())} outputs are not in exactly one set of the second partition.")

    d_code = d.min(axis=1)
    modified = np.array(apply_scenario(book, scenario).codewords, dtype=np.int8)
    d_mod = _distance_matrix(modified, bits).min(axis=1)
    d_mod_f = d_mod[flipped]
    dO, dP, dOp, dPp = g['dO'], g['dP'], g['dOp'], g['dPp']
    if scenario.kind == 'one-column':
        relations = {
            1: (d_code == d_mod) & (d_mod == dO),
            2: (d_code == d_mod_f) & (d_mod_f == dP),
            3: (d_code == dP) & (dP == d_mod + 1) & (d_mod == dPp),
            4: (d_code == dO) & (dO == d_mod_f) & (d_mod_f == dP),
            5: (d_code + 1 == d_mod_f) & (d_code == dO) & (d_mod_f == dP),
        }
    else:
        low = np.minimum(dO, dP)
        relations = {
            1: d_code == d_mod,
            2: (d_code == d_mod) & (d_mod == dO),
            3: (d_code == d_mod_f) & (d_mod_f == dP),
            4: (d_code == low) & (low >= d_mod_f) & (d_mod_f == dOp),
            5: (d_code == low) & (low >= d_mod) & (d_mod == dPp),
        }
    for label, holds in relations.items():
        broken = masks[label - 1] & ~holds
        if broken.any():
            violations.append(f"Y{label}: {int(broken.sum())} outputs break the distance relation.")

    if scenario.kind == 'one-column':
        alpha3 = np.bincount(d_code[masks[2]], minlength=n + 2)
        alpha5 = np.bincount(d_code[masks[4]], minlength=n + 2)
        alpha3_mod = np.bincount(d_mod[masks[2]], minlength=n + 2)
        alpha5_mod = np.bincount(d_mod_f[masks[4]], minlength=n + 2)
        if alpha3[0] != 0 or alpha5[n] != 0:
            violations.append("Boundary counts alpha3_0 and alpha5_n must be zero.")
        if list(alpha3_mod[:n + 1]) != list(alpha3[1:n + 2]):
            violations.append("Y3 spectrum of C' is not the Y3 spectrum of C shifted down by one.")
        if list(alpha5_mod[1:n + 1]) != list(alpha5[:n]) or alpha5_mod[0] != 0:
            violations.append("Y5 spectrum of C' is not the Y5 spectrum of C shifted up by one.")
    if violations:
        logger.warning("Partition check for %s scenario found %d violation(s).", scenario.kind, len(violations))
    return violations
