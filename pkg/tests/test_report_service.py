import json
import pytest
from fractions import Fraction

from services.profile_service import ClassIProfile, DistanceSpectrum, parse_profile
from services.reduction_service import reduce_to_linear_or_classI
from services.report_service import (
    class_one_payload, classify_payload, decimal_string, lambda_entries, reduction_payload,
    render_text, spectrum_csv, spectrum_payload, to_csv, to_json
)

# Number formatting

@pytest.mark.parametrize("value,digits,expected", [
    (Fraction(9, 20), 3, '0.450'),
    (Fraction(2, 3), 2, '0.67'),
    (Fraction(-1, 8), 2, '-0.12'),
    (Fraction(3, 8), 2, '0.38'),
    (Fraction(7, 2), 0, '4'),
    (Fraction(1), 1, '1.0'),
])
def test_decimal_string(value, digits, expected):
    assert decimal_string(value, digits) == expected

def test_decimal_string_rejects_negative_digits():
    with pytest.raises(ValueError):
        decimal_string(Fraction(1, 2), -1)

def test_lambda_entries_exact_and_approximate():
    entries = lambda_entries(DistanceSpectrum((2, 2, 0)), [Fraction(1, 10)], decimal=3)
    assert entries == [{'eps': '1/10', 'lambda': '9/20', 'lambda_approx': '0.450'}]
    assert 'lambda_approx' not in lambda_entries(DistanceSpectrum((2, 2, 0)), [Fraction(1, 10)])[0]

# Serialization

def test_to_json_keeps_field_order():
    text = to_json({'b': 1, 'a': [1, 2]})
    assert text.endswith('\n')
    assert list(json.loads(text)) == ['b', 'a']

def test_to_csv_uses_unix_newlines():
    assert to_csv(('x', 'y'), [(1, 2), (3, 4)]) == "x,y\n1,2\n3,4\n"

def test_spectrum_csv():
    assert spectrum_csv(DistanceSpectrum((4, 0, 0))) == "d,alpha_d\n0,4\n1,0\n2,0\n"

# Payloads

def test_spectrum_payload_uses_strings_for_counts():
    payload = spectrum_payload("6:2", DistanceSpectrum((2, 2, 0)), 'analytic', [Fraction(1, 10)])
    assert payload['alpha'] == ['2', '2', '0']
    assert payload['n'] == 2
    assert payload['lambda'][0]['lambda'] == '9/20'

def test_classify_payload():
    payload = classify_payload(parse_profile("14:3"))
    assert payload['canonical'] == '1:3'
    assert payload['linear'] is False
    assert payload['class_one'] is True
    assert payload['class_one_counts'] == [3, 0, 0, 0]
    assert payload['removable_columns'] == 0

def test_classify_payload_for_other_codes():
    payload = classify_payload(parse_profile("1:2,7:1"))
    assert payload['class_one'] is False
    assert payload['class_one_counts'] is None

def test_reduction_payload():
    start = parse_profile("1:1,7:1")
    final, steps = reduce_to_linear_or_classI(start)
    payload = reduction_payload(start, final, steps)
    assert payload['final'] == '3:1,5:1'
    assert payload['linear'] is True
    assert payload['steps'][0]['rule'] == 'two-bit-flip'

def test_class_one_payload():
    payload = class_one_payload(ClassIProfile(3, 2, 2, 2))
    assert payload['target'] == 3
    assert len(payload['alpha3']) == 10
    assert payload['certificate']['kind'] == 'universal'

def test_class_one_payload_other_target():
    payload = class_one_payload(ClassIProfile(3, 4, 2, 2), target=5)
    assert payload['certificate']['replacement'] == 5
    assert payload['certificate']['profile'] == [3, 4, 2, 2]

# Text templates

def test_render_reduction_text():
    start = parse_profile("1:1,7:1")
    final, steps = reduce_to_linear_or_classI(start)
    payload = reduction_payload(start, final, steps)
    text = render_text('reduction.txt', start=payload['start'], steps=payload['steps'],
                       final=payload['final'], linear=payload['linear'], class_one=payload['class_one'])
    lines = text.splitlines()
    assert lines[0] == "Reduction of 1:1,7:1"
    assert lines[1].strip() == "1. two-bit-flip: 1:1,7:1 -> 3:1,5:1"
    assert lines[-1] == "Final profile 3:1,5:1 (linear)"
    assert text.endswith('\n')

def test_render_spectrum_text():
    text = render_text('spectrum.txt', profile='3:1,5:1', n=2, engine='analytic',
                       alpha=list(enumerate(['4', '0', '0'])), total=4,
                       lambdas=[{'eps': '1/4', 'lambda': '9/16'}])
    assert text.splitlines()[0] == "Profile 3:1,5:1 (n = 2, engine analytic)"
    assert "total 4" in text
    assert "lambda(1/4) = 9/16" in text
    assert "approx" not in text

def test_render_certificate_text():
    text = render_text('certificate.txt', certificate={
        'kind': 'refuted', 'profile': [3, 2, 2, 2], 'replacement': 3,
        'margins': ['1', '-2'], 'first_failure': {'d': 2, 'margin': '-2'},
    })
    assert "Class-I code 3,2,2,2, <1> replaced by <3>" in text
    assert "margins: 1 -2" in text
    assert "first failure at d = 2 (margin -2)" in text
