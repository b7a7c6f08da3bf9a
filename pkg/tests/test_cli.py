import json
import pytest

import database
from cli import main


@pytest.fixture(autouse=True)
def setup_database(tmp_path, monkeypatch):
    monkeypatch.setattr(database, "DATABASE", str(tmp_path / "cli.db"))
    database.init_database()


def run(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err

# Spectrum and lambda

def test_spectrum_csv(capsys):
    code, out, _ = run(capsys, 'spectrum', '--profile', '3:1,5:1', '--format', 'csv')
    assert code == 0
    assert out == "d,alpha_d\n0,4\n1,0\n2,0\n"

def test_spectrum_json_with_lambda(capsys):
    code, out, _ = run(capsys, 'spectrum', '--profile', '6:2', '--eps', '1/10')
    payload = json.loads(out)
    assert code == 0
    assert payload['alpha'] == ['2', '2', '0']
    assert payload['lambda'] == [{'eps': '1/10', 'lambda': '9/20'}]

def test_spectrum_text(capsys):
    code, out, _ = run(capsys, 'spectrum', '--profile', '3:1,5:1', '--format', 'text')
    assert code == 0
    assert out.startswith("Profile 3:1,5:1 (n = 2, engine analytic)\n")
    assert "total 4" in out

def test_spectrum_engines_agree(capsys):
    _, analytic, _ = run(capsys, 'spectrum', '--profile', '1:1,3:2,7:2')
    _, oracle, _ = run(capsys, 'spectrum', '--profile', '1:1,3:2,7:2', '--engine', 'oracle')
    assert json.loads(analytic)['alpha'] == json.loads(oracle)['alpha']

def test_spectrum_store_fills_cache(capsys):
    code, _, _ = run(capsys, 'spectrum', '--profile', '1:1,6:2,5:2,3:4', '--store')
    assert code == 0
    assert database.get_spectrum_by_profile("1:1,3:2,5:2,6:4") is not None

def test_lambda_with_decimal(capsys):
    code, out, _ = run(capsys, 'lambda', '--profile', '6:2', '--eps', '1/10', '--decimal', '3')
    assert code == 0
    assert json.loads(out)['lambda'][0]['lambda_approx'] == '0.450'

def test_lambda_csv(capsys):
    code, out, _ = run(capsys, 'lambda', '--profile', '3:1,5:1,6:1', '--eps', '1/4', '--format', 'csv')
    assert code == 0
    assert out == "eps,lambda\n1/4,9/16\n"

def test_lambda_requires_eps(capsys):
    code, _, _ = run(capsys, 'lambda', '--profile', '6:2')
    assert code == 1

@pytest.mark.parametrize("eps", ['1/2', '0', 'abc', '3/5'])
def test_bad_probability_exits_one(capsys, eps):
    code, _, err = run(capsys, 'lambda', '--profile', '6:2', '--eps', eps)
    assert code == 1
    assert err

def test_bad_profile_exits_one(capsys):
    code, _, err = run(capsys, 'spectrum', '--profile', '3:x')
    assert code == 1
    assert err

def test_oracle_size_limit_exits_one(capsys):
    code, _, err = run(capsys, 'spectrum', '--profile', '3:25', '--engine', 'oracle')
    assert code == 1
    assert 'Error' in err

def test_profile_and_codebook_are_exclusive(capsys):
    code, _, _ = run(capsys, 'spectrum')
    assert code == 1

# Codebook files

def test_codebook_file_four_rows(capsys, tmp_path):
    book = tmp_path / "code.txt"
    book.write_text("000\n011\n101\n110\n")
    code, out, _ = run(capsys, 'spectrum', '--codebook-file', str(book))
    assert code == 0
    assert json.loads(out)['alpha'] == ['4', '4', '0', '0']

def test_codebook_with_eight_rows_needs_oracle(capsys, tmp_path):
    book = tmp_path / "code.txt"
    book.write_text("\n".join(format(i, '03b') for i in range(8)) + "\n")
    code, _, _ = run(capsys, 'spectrum', '--codebook-file', str(book))
    assert code == 1
    code, out, _ = run(capsys, 'spectrum', '--codebook-file', str(book), '--engine', 'oracle')
    assert code == 0
    assert json.loads(out)['alpha'] == ['8', '0', '0', '0']

# Compare and classify

def test_compare_reports_better_code(capsys):
    code, out, _ = run(capsys, 'compare', '--a', '1:2', '--b', '3:1,5:1', '--eps', '1/4')
    payload = json.loads(out)
    assert code == 0
    assert payload['a'] == '1:2'
    assert payload['kind'] == 'universal'
    assert payload['better'] == 'b'
    assert payload['orderings'] == [{'eps': '1/4', 'order': 1}]

def test_compare_text(capsys):
    code, out, _ = run(capsys, 'compare', '--a', '7:1', '--b', '1:1', '--format', 'text')
    assert code == 0
    assert "kind: identical" in out

def test_compare_length_mismatch_exits_one(capsys):
    code, _, _ = run(capsys, 'compare', '--a', '1:2', '--b', '3:3')
    assert code == 1

def test_classify_folds_columns(capsys):
    code, out, _ = run(capsys, 'classify', '--profile', '14:3')
    payload = json.loads(out)
    assert code == 0
    assert payload['canonical'] == '1:3'
    assert payload['class_one'] is True

def test_classify_text(capsys):
    code, out, _ = run(capsys, 'classify', '--profile', '3:1,5:1,6:1', '--format', 'text')
    assert code == 0
    assert "linear: True" in out
    assert "class_one_counts: None" in out

# Reductions

def test_reduce_pipeline(capsys):
    code, out, _ = run(capsys, 'reduce', '--profile', '1:1,2:1,4:1,7:3')
    payload = json.loads(out)
    assert code == 0
    assert payload['final'] == '3:2,5:2,6:2'
    assert [s['rule'] for s in payload['steps']] == ['two-bit-flip'] * 3

def test_reduce_single_rule_not_applicable_exits_two(capsys):
    code, _, err = run(capsys, 'reduce', '--profile', '1:1,3:1,5:1,6:1', '--rule', 'even-replace',
                       '--s', '4', '--t', '3')
    assert code == 2
    assert 'odd' in err

def test_reduce_single_rule_needs_rows(capsys):
    code, _, _ = run(capsys, 'reduce', '--profile', '1:1,3:1,5:1,6:2', '--rule', 'even-replace')
    assert code == 1

def test_reduce_two_bit_flip_rule(capsys):
    code, out, _ = run(capsys, 'reduce', '--profile', '1:1,7:1', '--rule', 'two-bit-flip', '--source', '1')
    assert code == 0
    assert json.loads(out)['final'] == '3:1,5:1'

def test_reduce_exhaust_reaches_linear(capsys):
    code, out, _ = run(capsys, 'reduce', '--profile', '1:3,3:2,5:2,6:2', '--exhaust', '--format', 'csv')
    assert code == 0
    assert out.splitlines()[0] == "index,rule,before,after,universal"
    assert 'classI-certified' in out

def test_reduce_text(capsys):
    code, out, _ = run(capsys, 'reduce', '--profile', '1:1,7:1', '--format', 'text')
    assert code == 0
    assert out.splitlines()[-1] == "Final profile 3:1,5:1 (linear)"

# Class-I analysis

def test_class1_dominance_margins(capsys):
    code, out, _ = run(capsys, 'class1', '--profile', '1:3,3:2,5:2,6:2')
    payload = json.loads(out)
    assert code == 0
    assert payload['kind'] == 'universal'
    assert len(payload['margins']) == 9

def test_class1_dominance_csv(capsys):
    code, out, _ = run(capsys, 'class1', '--profile', '1:3,3:2,5:2,6:2', '--format', 'csv')
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "d,margin"
    assert len(lines) == 10

def test_class1_alpha(capsys):
    code, out, _ = run(capsys, 'class1', '--profile', '1:1,3:1,5:1,6:1', '--check', 'alpha')
    payload = json.loads(out)
    assert code == 0
    assert len(payload['alpha3']) == len(payload['alpha5']) == 5

def test_class1_polynomial_matches_lambda_gap(capsys):
    code, out, _ = run(capsys, 'class1', '--profile', '1:3,3:2,5:2,6:2', '--check', 'polynomial',
                       '--eps', '1/4')
    payload = json.loads(out)
    assert code == 0
    assert len(payload['coefficients']) == 9
    assert payload['values'][0]['eps'] == '1/4'

def test_class1_rejects_other_codes(capsys):
    code, _, _ = run(capsys, 'class1', '--profile', '1:2,3:1')
    assert code == 1

# Verification and search

def test_verify_linear_json(capsys):
    code, out, _ = run(capsys, 'verify-linear', '--n', '8')
    payload = json.loads(out)
    assert code == 0
    assert payload['verdict'] == 'linear-optimal'
    assert payload['profiles_checked'] == 0
    assert 'elapsed_seconds' not in payload

def test_verify_linear_timing(capsys):
    code, out, _ = run(capsys, 'verify-linear', '--n', '9', '--timing')
    assert code == 0
    assert 'elapsed_seconds' in json.loads(out)

def test_verify_linear_text(capsys):
    code, out, _ = run(capsys, 'verify-linear', '--n', '9', '--format', 'text')
    assert code == 0
    assert out.splitlines()[0] == "n = 9: linear-optimal"

def test_verify_linear_store(capsys):
    code, _, _ = run(capsys, 'verify-linear', '--n', '10', '--store')
    assert code == 0
    assert database.get_reports_for_n(10)[0]['verdict'] == 'linear-optimal'

def test_verify_linear_same_output_for_any_worker_count(capsys):
    _, single, _ = run(capsys, 'verify-linear', '--n', '20', '--workers', '1')
    _, several, _ = run(capsys, 'verify-linear', '--n', '20', '--workers', '2')
    assert single == several

def test_verify_linear_rejects_zero(capsys):
    code, _, _ = run(capsys, 'verify-linear', '--n', '0')
    assert code == 1

def test_search_small_length(capsys):
    code, out, _ = run(capsys, 'search', '--n', '3', '--eps', '1/4')
    payload = json.loads(out)
    assert code == 0
    assert '3:1,5:1,6:1' in payload['per_eps'][0]['maximizers']

def test_search_size_limit(capsys):
    code, _, _ = run(capsys, 'search', '--n', '13')
    assert code == 1

def test_best_linear_csv(capsys):
    code, out, _ = run(capsys, 'best-linear', '--n', '2', '--eps', '1/10', '--format', 'csv')
    assert code == 0
    assert out == "eps,lambda,n3,n5,n6\n1/10,81/100,0,1,1\n1/10,81/100,1,0,1\n1/10,81/100,1,1,0\n"

def test_best_linear_decimal(capsys):
    code, out, _ = run(capsys, 'best-linear', '--n', '2', '--eps', '1/10', '--decimal', '2')
    assert code == 0
    assert json.loads(out)['per_eps'][0]['lambda_approx'] == '0.81'
