"""
Web layer tests through the Flask test client
"""

import pytest

from app import create_app


@pytest.fixture
def client(tmp_path):
    app = create_app({'TESTING': True, 'DATABASE': str(tmp_path / 'web.db'), 'WORKERS': 1})
    return app.test_client()

# JSON API

def test_spectrum_endpoint(client):
    response = client.get('/api/spectrum?profile=3:1,5:1&eps=1/4')
    assert response.status_code == 200
    data = response.get_json()
    assert data['alpha'] == ['4', '0', '0']
    assert data['lambda'] == [{'eps': '1/4', 'lambda': '9/16'}]

def test_spectrum_unknown_engine(client):
    response = client.get('/api/spectrum?profile=3:1&engine=fast')
    assert response.status_code == 400

def test_spectrum_bad_profile(client):
    response = client.get('/api/spectrum?profile=3:x')
    assert response.status_code == 400
    assert 'error' in response.get_json()

def test_spectrum_missing_profile(client):
    assert client.get('/api/spectrum').status_code == 400

def test_lambda_endpoint(client):
    response = client.get('/api/lambda?profile=6:2&eps=1/10')
    assert response.status_code == 200
    assert response.get_json()['lambda'][0]['lambda'] == '9/20'

def test_lambda_requires_eps(client):
    assert client.get('/api/lambda?profile=6:2').status_code == 400

def test_lambda_bad_eps(client):
    assert client.get('/api/lambda?profile=6:2&eps=1/2').status_code == 400

def test_compare_endpoint(client):
    response = client.get('/api/compare?a=1:2&b=3:1,5:1')
    data = response.get_json()
    assert response.status_code == 200
    assert data['better'] == 'b'
    assert data['a'] == '1:2'

def test_compare_length_mismatch(client):
    assert client.get('/api/compare?a=1:2&b=3:3').status_code == 400

def test_classify_endpoint(client):
    data = client.get('/api/classify?profile=14:3').get_json()
    assert data['canonical'] == '1:3'
    assert data['class_one'] is True

def test_reduce_endpoint(client):
    data = client.get('/api/reduce?profile=1:1,7:1').get_json()
    assert data['final'] == '3:1,5:1'
    assert data['steps'][0]['rule'] == 'two-bit-flip'

def test_reduce_exhaust(client):
    data = client.get('/api/reduce?profile=1:3,3:2,5:2,6:2&exhaust=1').get_json()
    assert data['linear'] is True

def test_class1_endpoint(client):
    data = client.get('/api/class1?profile=1:3,3:2,5:2,6:2').get_json()
    assert data['certificate']['kind'] == 'universal'
    assert len(data['alpha3']) == 10

def test_class1_bad_target(client):
    assert client.get('/api/class1?profile=1:3,3:2,5:2,6:2&target=x').status_code == 400
    assert client.get('/api/class1?profile=1:3,3:2,5:2,6:2&target=7').status_code == 400

def test_class1_rejects_other_codes(client):
    assert client.get('/api/class1?profile=1:2,3:1').status_code == 400

def test_verify_get_does_not_store(client):
    response = client.get('/api/verify/9')
    assert response.status_code == 200
    assert response.get_json()['verdict'] == 'linear-optimal'
    assert client.get('/api/reports?n=9').get_json()['count'] == 0

def test_verify_post_stores_report(client):
    response = client.post('/api/verify/10')
    assert response.status_code == 201
    data = client.get('/api/reports?n=10').get_json()
    assert data['count'] == 1
    assert data['reports'][0]['payload']['n'] == 10

def test_verify_length_limit(client):
    assert client.get('/api/verify/61').status_code == 400
    assert client.get('/api/verify/0').status_code == 400

def test_best_linear_endpoint(client):
    data = client.get('/api/best-linear/2?eps=1/10').get_json()
    assert data['per_eps'][0]['lambda'] == '81/100'
    assert [0, 1, 1] in data['per_eps'][0]['maximizers']

def test_best_linear_requires_eps(client):
    assert client.get('/api/best-linear/2').status_code == 400

def test_all_reports(client):
    client.post('/api/verify/9')
    client.post('/api/verify/8')
    data = client.get('/api/reports').get_json()
    assert [r['n'] for r in data['reports']] == [8, 9]

# Text reports

def test_spectrum_text_report(client):
    response = client.get('/reports/spectrum?profile=3:1,5:1')
    body = response.get_data(as_text=True)
    assert response.status_code == 200
    assert response.mimetype == 'text/plain'
    assert body.startswith("Profile 3:1,5:1 (n = 2, engine analytic)\n")

def test_reduction_text_report(client):
    body = client.get('/reports/reduction?profile=1:1,7:1').get_data(as_text=True)
    assert body.splitlines()[-1] == "Final profile 3:1,5:1 (linear)"

def test_text_report_bad_profile(client):
    response = client.get('/reports/spectrum?profile=nope')
    assert response.status_code == 400
    assert response.mimetype == 'text/plain'

def test_verify_text_report_needs_stored_run(client):
    assert client.get('/reports/verify/9').status_code == 404
    client.post('/api/verify/9')
    body = client.get('/reports/verify/9').get_data(as_text=True)
    assert body.splitlines()[0] == "n = 9: linear-optimal"
