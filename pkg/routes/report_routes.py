"""
Report Routes - Plain-text summaries rendered from templates
"""

from flask import Blueprint, Response, abort, render_template, request

from database import get_reports_for_n
from services.errors import Bsc4Error
from services.profile_service import class_one_or_none, is_linear, parse_profile
from services.reduction_service import reduce_to_linear_or_classI
from services.report_service import reduction_payload, spectrum_payload
from services.spectrum_service import spectrum_for

report_bp = Blueprint('reports', __name__, url_prefix='/reports')


def _text(body: str, status: int = 200) -> Response:
    return Response(body, status=status, mimetype='text/plain')


@report_bp.errorhandler(Bsc4Error)
def handle_input_error(error):
    return _text(f"{error}\n", 400)


@report_bp.route('/spectrum')
def spectrum_report():
    profile = parse_profile(request.args.get('profile', ''))
    payload = spectrum_payload(profile, spectrum_for(profile), 'analytic')
    return _text(render_template(
        'spectrum.txt',
        profile=payload['profile'],
        n=payload['n'],
        engine=payload['engine'],
        alpha=list(enumerate(payload['alpha'])),
        total=sum(int(a) for a in payload['alpha']),
        lambdas=payload['lambda'],
    ))


@report_bp.route('/reduction')
def reduction_report():
    profile = parse_profile(request.args.get('profile', ''))
    final, steps = reduce_to_linear_or_classI(profile)
    payload = reduction_payload(profile, final, steps)
    return _text(render_template(
        'reduction.txt',
        start=payload['start'],
        steps=payload['steps'],
        final=payload['final'],
        linear=is_linear(final),
        class_one=class_one_or_none(final) is not None,
    ))


@report_bp.route('/verify/<int:n>')
def verify_report(n):
    """Newest stored verifier report for n."""
    reports = get_reports_for_n(n)
    if not reports:
        abort(404)
    return _text(render_template('verify_report.txt', report=reports[0]['payload']))
