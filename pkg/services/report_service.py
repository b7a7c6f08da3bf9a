"""
Report Service Module - Serialization of analysis results
JSON, CSV and plain-text renderings shared by the command line and the web
routes. Every number is written as an exact integer or p/q string; decimal
renderings are only added on request and are labelled approximate.
"""

import csv
import io
import json
import os
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

from jinja2 import Environment, FileSystemLoader

from services.classi_service import class_one_spectra, dominance_against, map_to_target
from services.profile_service import (
    ClassIProfile, CodeProfile, DistanceSpectrum, canonicalize, class_one_or_none,
    format_fraction, format_profile, is_class_one, is_linear, removable_columns
)
from services.reduction_service import ReductionStep

FORMATS = ('json', 'csv', 'text')
TEMPLATE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'templates')

_environment: Optional[Environment] = None


def text_environment() -> Environment:
    global _environment
    if _environment is None:
        _environment = Environment(
            loader=FileSystemLoader(TEMPLATE_DIR),
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
        )
    return _environment


def render_text(template_name: str, **context) -> str:
    return text_environment().get_template(template_name).render(**context)


def decimal_string(value: Fraction, digits: int) -> str:
    """Round half-even to `digits` places, e.g. 9/20 with 3 digits -> '0.450'."""
    if digits < 0:
        raise ValueError("Decimal digits must be nonnegative.")
    scaled = round(Fraction(value) * 10 ** digits)
    sign = '-' if scaled < 0 else ''
    whole, frac = divmod(abs(scaled), 10 ** digits)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{digits}d}"


def fraction_entry(value: Fraction, decimal: Optional[int] = None) -> Dict:
    entry = {'exact': format_fraction(Fraction(value))}
    if decimal is not None:
        entry['approx'] = decimal_string(value, decimal)
    return entry


def lambda_entries(spectrum: DistanceSpectrum, eps_list: Sequence[Fraction],
                   decimal: Optional[int] = None) -> List[Dict]:
    entries = []
    for eps in eps_list:
        entry = {'eps': format_fraction(eps), 'lambda': format_fraction(spectrum.lambda_at(eps))}
        if decimal is not None:
            entry['lambda_approx'] = decimal_string(spectrum.lambda_at(eps), decimal)
        entries.append(entry)
    return entries


def to_json(payload) -> str:
    """Fields keep insertion order so repeated runs give identical bytes."""
    return json.dumps(payload, indent=2, ensure_ascii=False) + '\n'


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def spectrum_csv(spectrum: DistanceSpectrum) -> str:
    return to_csv(('d', 'alpha_d'), enumerate(spectrum.alpha))


# Payloads shared by the command line and the JSON API

def spectrum_payload(code, spectrum: DistanceSpectrum, engine: str,
                     eps_list: Sequence[Fraction] = (), decimal: Optional[int] = None) -> Dict:
    return {
        'profile': str(code),
        'n': spectrum.n,
        'engine': engine,
        'alpha': [str(a) for a in spectrum.alpha],
        'lambda': lambda_entries(spectrum, eps_list, decimal),
    }


def classify_payload(profile: CodeProfile) -> Dict:
    code = class_one_or_none(profile)
    return {
        'profile': format_profile(profile),
        'n': profile.n,
        'canonical': format_profile(canonicalize(profile)),
        'linear': is_linear(profile),
        'class_one': code is not None,
        'class_one_counts': list(code.as_tuple()) if code else None,
        'removable_columns': removable_columns(profile),
    }


def reduction_payload(start: CodeProfile, final: CodeProfile, steps: Sequence[ReductionStep]) -> Dict:
    return {
        'start': format_profile(start),
        'final': format_profile(final),
        'linear': is_linear(final),
        'class_one': is_class_one(final),
        'steps': [step.to_dict() for step in steps],
    }


def class_one_payload(code: ClassIProfile, target: int = 3) -> Dict:
    """Spectra of the mapped code and the certificate for replacing <1> by <target>."""
    spectra = class_one_spectra(map_to_target(code, target))
    return {
        'profile': list(code.as_tuple()),
        'target': target,
        'alpha3': [str(a) for a in spectra.alpha3],
        'alpha5': [str(a) for a in spectra.alpha5],
        'certificate': dominance_against(code, target).to_dict(),
    }
