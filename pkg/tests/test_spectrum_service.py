import pytest
from fractions import Fraction
from itertools import combinations_with_replacement

import database
from services.errors import LengthMismatchError, ProfileError
from services.oracle_service import spectrum_bruteforce
from services.profile_service import (
    CodeProfile, DistanceSpectrum, canonicalize, materialize, parse_profile
)
from services.spectrum_service import (
    WeightTuple, codeword_distances, compare_at_eps, lambda_analytic, reliability_polynomial,
    spectrum_analytic, spectrum_for
)


@pytest.fixture(autouse=True)
def reset_db_before_test(tmp_path, monkeypatch):
    monkeypatch.setattr(database, "DATABASE", str(tmp_path / "test.db"))
    database.init_database()
    yield

# Distances of a weight tuple

def test_codeword_distances_zero_tuple_gives_row_weights():
    assert codeword_distances(parse_profile("3:2,5:2"), WeightTuple({3: 0, 5: 0})) == (0, 2, 2, 4)

def test_codeword_distances_single_column():
    assert codeword_distances(parse_profile("1:1"), WeightTuple({1: 1}, y1=1)) == (1, 1, 1, 0)

def test_codeword_distances_rejects_weight_above_count():
    with pytest.raises(ProfileError):
        codeword_distances(parse_profile("3:2"), WeightTuple({3: 3}))

# Analytic spectra

def test_analytic_spectrum_examples():
    assert spectrum_analytic(parse_profile("3:1,5:1")).alpha == (4, 0, 0)
    assert spectrum_analytic(parse_profile("1:2")).alpha == (2, 2, 0)

def test_analytic_matches_oracle_on_small_code():
    profile = parse_profile("1:1,3:1,5:1,6:1")
    assert spectrum_analytic(profile).alpha == spectrum_bruteforce(materialize(profile)).alpha

def test_analytic_matches_oracle_with_flipped_and_zero_columns():
    profile = parse_profile("0:1,9:2,14:1,7:1")
    assert spectrum_analytic(profile).alpha == spectrum_bruteforce(materialize(profile)).alpha

def test_analytic_linear_code_of_length_thirty():
    spectrum = spectrum_analytic(parse_profile("3:10,5:10,6:10"))
    assert spectrum.n == 30
    assert spectrum.total() == 2 ** 30

def test_analytic_matches_oracle_on_scaled_down_linear_code():
    profile = parse_profile("3:3,5:3,6:3")
    assert spectrum_analytic(profile).alpha == spectrum_bruteforce(materialize(profile)).alpha

def _profiles_up_to(n):
    for length in range(1, n + 1):
        for types in combinations_with_replacement(range(1, 8), length):
            counts = [0] * 16
            for t in types:
                counts[t] += 1
            yield CodeProfile(tuple(counts))

def test_analytic_matches_oracle_for_every_profile_up_to_six():
    for profile in _profiles_up_to(6):
        assert spectrum_analytic(profile).alpha == spectrum_bruteforce(materialize(profile)).alpha, str(profile)

@pytest.mark.slow
def test_analytic_matches_oracle_for_canonical_profiles_up_to_twelve():
    seen = set()
    for profile in _profiles_up_to(12):
        canonical = canonicalize(profile)
        if canonical.counts in seen:
            continue
        seen.add(canonical.counts)
        assert spectrum_analytic(canonical).alpha == spectrum_bruteforce(materialize(canonical)).alpha

# Reliability

def test_lambda_analytic_examples():
    assert lambda_analytic(parse_profile("3:1,5:1"), Fraction(1, 10)) == Fraction(81, 100)
    assert lambda_analytic(parse_profile("3:2,5:2,6:2"), Fraction(1, 10)) == \
        spectrum_bruteforce(materialize(parse_profile("3:2,5:2,6:2"))).lambda_at(Fraction(1, 10))

def test_reliability_polynomial_evaluates_to_lambda():
    profile = parse_profile("1:3,3:2,5:2,6:2")
    polynomial = reliability_polynomial(profile)
    assert polynomial.n == 9
    assert polynomial.evaluate(Fraction(1, 4)) == lambda_analytic(profile, Fraction(1, 4))

def test_compare_at_eps():
    better, worse = parse_profile("3:1,5:1"), parse_profile("1:2")
    assert compare_at_eps(better, worse, Fraction(1, 10)) == 1
    assert compare_at_eps(worse, better, Fraction(1, 10)) == -1
    assert compare_at_eps(better, better, Fraction(1, 4)) == 0

def test_compare_at_eps_length_mismatch():
    with pytest.raises(LengthMismatchError):
        compare_at_eps(parse_profile("1:2"), parse_profile("1:3"), Fraction(1, 10))

def test_class_one_replacement_is_no_worse_at_one_tenth():
    code = parse_profile("1:3,3:2,5:2,6:2")
    assert compare_at_eps(code.replace(1, 3), code, Fraction(1, 10)) >= 0

# Engine selection

def test_spectrum_for_engines_agree():
    profile = parse_profile("1:1,2:2,7:1")
    oracle = spectrum_for(profile, "oracle")
    assert spectrum_for(profile, "analytic").alpha == oracle.alpha
    assert spectrum_for(profile, "auto").alpha == oracle.alpha

def test_spectrum_for_unknown_engine():
    with pytest.raises(ProfileError):
        spectrum_for(parse_profile("1:2"), "quantum")

def test_auto_engine_detects_disagreement(mocker):
    mocker.patch("services.spectrum_service.spectrum_analytic", return_value=DistanceSpectrum((1, 2, 1)))
    with pytest.raises(RuntimeError):
        spectrum_for(parse_profile("3:1,5:1"), "auto")

def test_auto_engine_skips_oracle_for_long_codes(mocker):
    brute = mocker.patch("services.spectrum_service.spectrum_bruteforce")
    spectrum_for(parse_profile("3:6,5:6,6:6"), "auto")
    brute.assert_not_called()

def test_store_serves_second_request_from_cache(mocker):
    profile = parse_profile("1:3,3:2,5:2,6:2")
    first = spectrum_for(profile, store=True)
    analytic = mocker.patch("services.spectrum_service.spectrum_analytic")
    second = spectrum_for(parse_profile("1:3,3:2,5:2,6:2"), store=True)
    analytic.assert_not_called()
    assert second.alpha == first.alpha

def test_store_is_keyed_by_canonical_profile():
    spectrum_for(parse_profile("1:1,3:4,5:2,6:2"), store=True)
    cached = database.get_spectrum_by_profile("1:1,3:2,5:2,6:4")
    assert cached is not None
    assert cached["n"] == 9
