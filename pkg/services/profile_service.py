"""
Profile Service Module - Column-type representation of (n,2) codes
Contains the code types, symmetry canonicalization, codeword materialization
and the exact integer primitives the other services build on.

A column type <i> is the 4-bit column whose row j (1..4) holds bit
(i >> (4 - j)) & 1, so row 1 is the most significant bit.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from config import MAX_ORACLE_ROWS
from services.errors import (
    LengthMismatchError, ParityError, ProbabilityError, ProfileError
)

logger = logging.getLogger(__name__)

NUM_TYPES = 16
ROWS = (1, 2, 3, 4)
ROW_ORDERS: List[Tuple[int, ...]] = list(permutations(ROWS))
CLASS_ONE_SUPPORT = frozenset((1, 3, 5, 6))
LINEAR_SUPPORT = frozenset((0, 3, 5, 6))


@dataclass(frozen=True)
class CodeProfile:
    """Column-type multiplicities |i| of an (n,2) code, i = 0..15."""

    counts: Tuple[int, ...]

    def __post_init__(self):
        counts = tuple(self.counts)
        if len(counts) != NUM_TYPES:
            raise ProfileError(f"A profile needs exactly {NUM_TYPES} counts, got {len(counts)}.")
        for count in counts:
            if not isinstance(count, int) or isinstance(count, bool) or count < 0:
                raise ProfileError("Column counts must be nonnegative integers.")
        if sum(counts) < 1:
            raise ProfileError("A profile must contain at least one column.")
        object.__setattr__(self, 'counts', counts)

    @classmethod
    def from_dict(cls, mapping: Dict[int, int]) -> 'CodeProfile':
        counts = [0] * NUM_TYPES
        for column_type, count in mapping.items():
            if not isinstance(column_type, int) or not 0 <= column_type < NUM_TYPES:
                raise ProfileError(f"Column type {column_type!r} is outside 0..15.")
            counts[column_type] += count
        return cls(tuple(counts))

    @property
    def n(self) -> int:
        return sum(self.counts)

    def __getitem__(self, column_type: int) -> int:
        return self.counts[column_type]

    def support(self) -> List[int]:
        return [i for i, count in enumerate(self.counts) if count]

    def to_dict(self) -> Dict[int, int]:
        return {i: count for i, count in enumerate(self.counts) if count}

    def replace(self, source: int, target: int) -> 'CodeProfile':
        """Return the profile with one <source> column changed into <target>."""
        if self.counts[source] < 1:
            raise ProfileError(f"Profile has no column of type {source}.")
        counts = list(self.counts)
        counts[source] -= 1
        counts[target] += 1
        return CodeProfile(tuple(counts))

    def __str__(self) -> str:
        return format_profile(self)


@dataclass(frozen=True)
class Codebook:
    """Explicit codewords as rows; rows are tuples of 0/1 of equal length."""

    codewords: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(entry) for entry in row) for row in self.codewords)
        if not 2 <= len(rows) <= MAX_ORACLE_ROWS:
            raise ProfileError(f"A codebook needs between 2 and {MAX_ORACLE_ROWS} rows, got {len(rows)}.")
        lengths = {len(row) for row in rows}
        if len(lengths) != 1:
            raise LengthMismatchError("All codewords must have the same length.")
        if 0 in lengths:
            raise ProfileError("Codewords must have at least one position.")
        if any(entry not in (0, 1) for row in rows for entry in row):
            raise ProfileError("Codewords may only contain 0 and 1.")
        object.__setattr__(self, 'codewords', rows)

    @property
    def n(self) -> int:
        return len(self.codewords[0])

    @property
    def size(self) -> int:
        return len(self.codewords)

    def column_type(self, position: int) -> int:
        """Type of one column; defined for four-row books only."""
        if self.size != 4:
            raise ProfileError("Column types are defined for four-row codebooks only.")
        return sum(row[position] << (3 - j) for j, row in enumerate(self.codewords))

    def as_strings(self) -> List[str]:
        return [''.join(str(entry) for entry in row) for row in self.codewords]


@dataclass(frozen=True)
class ClassIProfile:
    """(|1|,|3|,|5|,|6|) with |1| odd and |3|,|5|,|6| of one parity."""

    n1: int
    n3: int
    n5: int
    n6: int

    def __post_init__(self):
        values = (self.n1, self.n3, self.n5, self.n6)
        if any(not isinstance(v, int) or v < 0 for v in values):
            raise ParityError("Class-I counts must be nonnegative integers.")
        if self.n1 % 2 != 1:
            raise ParityError(f"Class-I codes need an odd |1|, got {self.n1}.")
        if not self.n3 % 2 == self.n5 % 2 == self.n6 % 2:
            raise ParityError("Class-I codes need |3|, |5| and |6| of the same parity.")

    @property
    def n(self) -> int:
        return self.n1 + self.n3 + self.n5 + self.n6

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.n1, self.n3, self.n5, self.n6)

    def to_profile(self) -> CodeProfile:
        return CodeProfile.from_dict({1: self.n1, 3: self.n3, 5: self.n5, 6: self.n6})

    @classmethod
    def from_profile(cls, profile: CodeProfile) -> 'ClassIProfile':
        folded = fold(profile)
        if not set(folded.support()) <= CLASS_ONE_SUPPORT:
            raise ParityError("Class-I codes only use column types 1, 3, 5 and 6.")
        return cls(folded[1], folded[3], folded[5], folded[6])


@dataclass(frozen=True)
class DistanceSpectrum:
    """
    alpha[d] = number of channel outputs at ML distance d from the code.

    `size` is the number of codewords |C| that divides the sum in the
    reliability formula; it is 4 for every (n,2) code.
    """

    alpha: Tuple[int, ...]
    size: int = 4

    def __post_init__(self):
        object.__setattr__(self, 'alpha', tuple(int(a) for a in self.alpha))
        if any(a < 0 for a in self.alpha):
            raise ProfileError("Spectrum entries must be nonnegative.")

    @property
    def n(self) -> int:
        return len(self.alpha) - 1

    def total(self) -> int:
        return sum(self.alpha)

    def lambda_at(self, eps: Fraction) -> Fraction:
        """Average correct-decoding probability at crossover probability eps."""
        eps = check_probability(Fraction(eps))
        keep = 1 - eps
        n = self.n
        value = sum(a * keep ** (n - d) * eps ** d for d, a in enumerate(self.alpha) if a)
        return Fraction(value) / self.size


# Bit and type helpers

def bit(column_type: int, row: int) -> int:
    """Entry of column <column_type> in row 1..4."""
    return (column_type >> (4 - row)) & 1


def fold_type(column_type: int) -> int:
    """Flip a column whose first row is 1, so every type lands in 0..7."""
    return 15 - column_type if column_type > 7 else column_type


def fold(profile: CodeProfile) -> CodeProfile:
    counts = [0] * NUM_TYPES
    for i, count in enumerate(profile.counts):
        counts[fold_type(i)] += count
    return CodeProfile(tuple(counts))


def permute_type(column_type: int, order: Sequence[int]) -> int:
    """New row j takes old row order[j-1]; the result is folded."""
    value = 0
    for j, source_row in enumerate(order, start=1):
        value |= bit(column_type, source_row) << (4 - j)
    return fold_type(value)


def permute_rows(profile: CodeProfile, order: Sequence[int]) -> CodeProfile:
    if sorted(order) != list(ROWS):
        raise ProfileError(f"Row order must be a permutation of 1..4, got {tuple(order)}.")
    counts = [0] * NUM_TYPES
    for i, count in enumerate(profile.counts):
        counts[permute_type(i, order)] += count
    return CodeProfile(tuple(counts))


def swap_rows(a: int, b: int) -> Tuple[int, ...]:
    order = list(ROWS)
    order[a - 1], order[b - 1] = b, a
    return tuple(order)


def removable_columns(profile: CodeProfile) -> int:
    """All-zero columns (types 0 and 15); a code with one is never optimal."""
    return profile[0] + profile[15]


def pair_weight(profile: CodeProfile, s: int, t: int) -> int:
    """w(c_s xor c_t) computed from the counts."""
    return sum(count for i, count in enumerate(profile.counts) if bit(i, s) != bit(i, t))


def row_weight(profile: CodeProfile, row: int) -> int:
    return sum(count for i, count in enumerate(profile.counts) if bit(i, row))


def is_linear(profile: CodeProfile) -> bool:
    return set(fold(profile).support()) <= LINEAR_SUPPORT


def is_class_one(profile: CodeProfile) -> bool:
    try:
        ClassIProfile.from_profile(profile)
    except ParityError:
        return False
    return True


def canonicalize(profile: CodeProfile) -> CodeProfile:
    """
    Representative of a profile under column flips and row permutations.

    Types are folded into 0..7 and every one of the 24 row orders is tried.
    When some order brings the support (ignoring type 0) into {1,3,5,6},
    only those orders compete, so Class-I and linear codes come out with
    |3| <= |5| <= |6|. The lexicographically least count vector wins.
    Every code equivalent to the input gets the same representative.
    Type-0 columns are kept.

    Args:
        profile: any valid profile

    Returns:
        CodeProfile: an equivalent profile with identical spectrum
    """
    folded = fold(profile)
    if folded[0]:
        logger.debug("Profile %s keeps %d removable all-zero column(s).", folded, folded[0])
    candidates = {permute_rows(folded, order) for order in ROW_ORDERS}
    class_shaped = [p for p in candidates if set(p.support()) - {0} <= CLASS_ONE_SUPPORT]
    return min(class_shaped or candidates, key=lambda p: p.counts)


def materialize(profile: CodeProfile, lead: Sequence[int] = ()) -> Codebook:
    """
    Build the 4 x n codebook of a profile.

    Columns appear in ascending type order, except that the types listed in
    `lead` (one column each) are placed first, in the given order.
    """
    remaining = list(profile.counts)
    columns: List[int] = []
    for column_type in lead:
        if remaining[column_type] < 1:
            raise ProfileError(f"Profile has no column of type {column_type} to place first.")
        remaining[column_type] -= 1
        columns.append(column_type)
    for column_type, count in enumerate(remaining):
        columns.extend([column_type] * count)
    rows = tuple(tuple(bit(c, row) for c in columns) for row in ROWS)
    return Codebook(rows)


def profile_of(book: Codebook) -> CodeProfile:
    if book.size != 4:
        raise ProfileError("Only four-row codebooks have a column-type profile.")
    counts = [0] * NUM_TYPES
    for position in range(book.n):
        counts[book.column_type(position)] += 1
    return CodeProfile(tuple(counts))


def hamming_distance(x: Sequence, y: Sequence) -> int:
    if len(x) != len(y):
        raise LengthMismatchError(f"Cannot compare vectors of length {len(x)} and {len(y)}.")
    return sum(1 for a, b in zip(x, y) if int(a) != int(b))


@lru_cache(maxsize=None)
def binomial_row(a: int) -> Tuple[int, ...]:
    """C(a,0..a) as a tuple; shared read-only after creation."""
    return tuple(math.comb(a, b) for b in range(a + 1))


def binomial(a: int, b: int) -> int:
    """C(a,b) with the convention C(a,b) = 0 for b < 0 or b > a."""
    if a < 0 or b < 0 or b > a:
        return 0
    return math.comb(a, b)


# Text formats

def parse_profile(text: str) -> CodeProfile:
    """
    Parse `type:count` pairs such as "1:3,3:2,5:5,6:7".

    Raises:
        ProfileError: on any malformed entry
    """
    if text is None or not text.strip():
        raise ProfileError("Profile is required.")
    mapping: Dict[int, int] = {}
    for entry in text.split(','):
        entry = entry.strip()
        if not entry:
            continue
        parts = entry.split(':')
        if len(parts) != 2:
            raise ProfileError(f"Profile entry must look like type:count, got {entry!r}.")
        try:
            column_type, count = int(parts[0]), int(parts[1])
        except ValueError:
            raise ProfileError(f"Profile entry must hold two integers, got {entry!r}.") from None
        if not 0 <= column_type < NUM_TYPES:
            raise ProfileError(f"Column type {column_type} is outside 0..15.")
        if count < 0:
            raise ProfileError(f"Column count for type {column_type} must be nonnegative.")
        mapping[column_type] = mapping.get(column_type, 0) + count
    profile = CodeProfile.from_dict(mapping)
    if removable_columns(profile):
        logger.info("Profile %s has all-zero columns; such codes are never optimal.", profile)
    return profile


def format_profile(profile: CodeProfile) -> str:
    return ','.join(f"{i}:{count}" for i, count in enumerate(profile.counts) if count)


def check_probability(eps: Fraction) -> Fraction:
    if not 0 < eps < Fraction(1, 2):
        raise ProbabilityError(f"Crossover probability must lie strictly between 0 and 1/2, got {eps}.")
    return eps


def parse_probability(text: str) -> Fraction:
    """Parse `p/q` (or a plain decimal such as 0.1) into an exact fraction."""
    try:
        eps = Fraction(text.strip())
    except (AttributeError, ValueError, ZeroDivisionError):
        raise ProbabilityError(f"Crossover probability must look like p/q, got {text!r}.") from None
    return check_probability(eps)


def format_fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def read_codebook(lines: Iterable[str]) -> Codebook:
    """Read one codeword per line; blank lines and # comments are skipped."""
    rows: List[str] = []
    for line in lines:
        line = line.split('#', 1)[0].strip()
        if line:
            if set(line) - {'0', '1'}:
                raise ProfileError(f"Codeword lines may only contain 0 and 1, got {line!r}.")
            rows.append(line)
    return Codebook(tuple(tuple(int(ch) for ch in row) for row in rows))


def class_one_or_none(profile: CodeProfile) -> Optional[ClassIProfile]:
    try:
        return ClassIProfile.from_profile(profile)
    except ParityError:
        return None
