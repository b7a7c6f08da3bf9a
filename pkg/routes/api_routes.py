"""
API Routes - JSON API endpoints
"""

from fractions import Fraction
from typing import List

from flask import Blueprint, current_app, jsonify, request

from database import get_all_reports, get_reports_for_n
from services.errors import Bsc4Error, RuleNotApplicable
from services.profile_service import ClassIProfile, parse_probability, parse_profile
from services.reduction_service import reduce_to_linear, reduce_to_linear_or_classI
from services.report_service import (
    class_one_payload, classify_payload, reduction_payload, spectrum_payload
)
from services.spectrum_service import ENGINES, spectrum_for
from services.verifier_service import best_linear, compare_codes, verify_linear_optimal

api_bp = Blueprint('api', __name__, url_prefix='/api')


@api_bp.errorhandler(Bsc4Error)
def handle_input_error(error):
    """Input problems come back as 400 with the message; failed rules as 422."""
    status = 422 if isinstance(error, RuleNotApplicable) else 400
    return jsonify({'error': str(error)}), status


def _eps_args() -> List[Fraction]:
    return [parse_probability(text) for text in request.args.getlist('eps')]


@api_bp.route('/spectrum')
def get_spectrum():
    """Distance spectrum of a profile, with lambda at any requested eps."""
    profile = parse_profile(request.args.get('profile', ''))
    engine = request.args.get('engine', 'analytic')
    if engine not in ENGINES:
        return jsonify({'error': f"Engine must be one of {', '.join(ENGINES)}."}), 400
    spectrum = spectrum_for(profile, engine, workers=current_app.config['WORKERS'])
    return jsonify(spectrum_payload(profile, spectrum, engine, _eps_args()))


@api_bp.route('/lambda')
def get_lambda():
    profile = parse_profile(request.args.get('profile', ''))
    eps_list = _eps_args()
    if not eps_list:
        return jsonify({'error': 'At least one eps is required.'}), 400
    spectrum = spectrum_for(profile)
    return jsonify(spectrum_payload(profile, spectrum, 'analytic', eps_list))


@api_bp.route('/compare')
def compare():
    a = parse_profile(request.args.get('a', ''))
    b = parse_profile(request.args.get('b', ''))
    certificate = compare_codes(a, b, _eps_args())
    return jsonify({'a': str(a), 'b': str(b), **certificate.to_dict()})


@api_bp.route('/classify')
def classify():
    return jsonify(classify_payload(parse_profile(request.args.get('profile', ''))))


@api_bp.route('/reduce')
def reduce():
    """
    Reduction trail to a linear or Class-I code.
    With exhaust=1 the trail continues past certified Class-I codes.
    """
    profile = parse_profile(request.args.get('profile', ''))
    if request.args.get('exhaust', '0') in ('1', 'true'):
        final, steps = reduce_to_linear(profile)
    else:
        final, steps = reduce_to_linear_or_classI(profile)
    return jsonify(reduction_payload(profile, final, steps))


@api_bp.route('/class1')
def class_one():
    profile = parse_profile(request.args.get('profile', ''))
    try:
        target = int(request.args.get('target', '3'))
    except ValueError:
        return jsonify({'error': 'Target must be 3, 5 or 6.'}), 400
    return jsonify(class_one_payload(ClassIProfile.from_profile(profile), target))


@api_bp.route('/verify/<int:n>', methods=['GET', 'POST'])
def verify(n):
    """
    Run the optimality sweep for block length n.
    POST also stores the report in the result store.
    """
    limit = current_app.config['WEB_VERIFY_MAX_N']
    if not 1 <= n <= limit:
        return jsonify({'error': f"Block length must lie in 1..{limit} for web requests."}), 400
    report = verify_linear_optimal(
        n,
        workers=current_app.config['WORKERS'],
        eps_list=_eps_args(),
        store=request.method == 'POST',
    )
    current_app.logger.info("Verified n=%d via the API: %s", n, report.verdict)
    return jsonify(report.to_dict()), 201 if request.method == 'POST' else 200


@api_bp.route('/best-linear/<int:n>')
def get_best_linear(n):
    limit = current_app.config['WEB_VERIFY_MAX_N']
    if not 1 <= n <= limit:
        return jsonify({'error': f"Block length must lie in 1..{limit} for web requests."}), 400
    eps_list = _eps_args()
    if not eps_list:
        return jsonify({'error': 'At least one eps is required.'}), 400
    return jsonify(best_linear(n, eps_list).to_dict())


@api_bp.route('/reports')
def list_reports():
    n = request.args.get('n', type=int)
    reports = get_reports_for_n(n) if n is not None else get_all_reports()
    return jsonify({'reports': reports, 'count': len(reports)})
