"""
Command-line front end for the BSC four-codeword toolkit.

Every subcommand writes JSON (default), CSV or plain text to stdout; logs go
to stderr. `main` returns 0 on success, 2 when a reduction rule does not
apply and 1 for any other input or usage error.
"""

import logging
import sys
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import click

from config import DEFAULT_WORKERS
from database import init_database
from services.classi_service import (
    crossover_intervals, evaluate_polynomial, lambda_gap, map_to_target,
    comparison_polynomial
)
from services.errors import Bsc4Error, ProbabilityError, ProfileError, RuleNotApplicable
from services.oracle_service import spectrum_bruteforce
from services.profile_service import (
    ClassIProfile, CodeProfile, Codebook, format_fraction, format_profile, is_linear,
    parse_probability, parse_profile, profile_of, read_codebook
)
from services.reduction_service import (
    ReductionStep, class_one_step, even_replace, reduce_to_linear,
    reduce_to_linear_or_classI, two_bit_flip, zero_replace
)
from services.report_service import (
    FORMATS, class_one_payload, classify_payload, decimal_string, lambda_entries,
    reduction_payload, render_text, spectrum_csv, spectrum_payload, to_csv, to_json
)
from services.spectrum_service import ENGINES, spectrum_for
from services.verifier_service import (
    best_linear, compare_codes, exhaustive_optimal, maximizers, verify_linear_optimal
)

logger = logging.getLogger(__name__)

SEARCH_EPS = ('1/10', '1/4', '49/100')
SINGLE_RULES = ('even-replace', 'two-bit-flip', 'zero-replace', 'class-one')


class ProbabilityType(click.ParamType):
    name = 'p/q'

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return parse_probability(value)
        except ProbabilityError as exc:
            self.fail(str(exc), param, ctx)


class ProfileType(click.ParamType):
    name = 'type:count,...'

    def convert(self, value, param, ctx):
        if isinstance(value, CodeProfile):
            return value
        try:
            return parse_profile(value)
        except ProfileError as exc:
            self.fail(str(exc), param, ctx)


PROBABILITY = ProbabilityType()
PROFILE = ProfileType()


def output_options(func):
    func = click.option('--decimal', type=click.IntRange(min=0), default=None,
                        help='Add a k-digit decimal rendering (approximate).')(func)
    func = click.option('--format', 'fmt', type=click.Choice(FORMATS), default='json', show_default=True)(func)
    return func


def emit(fmt: str, payload: Dict, csv_text: Callable[[], str], text: Callable[[], str]) -> None:
    if fmt == 'json':
        click.echo(to_json(payload), nl=False)
    elif fmt == 'csv':
        click.echo(csv_text(), nl=False)
    else:
        click.echo(text(), nl=False)


def key_value_csv(payload: Dict) -> str:
    return to_csv(('field', 'value'), ((key, value) for key, value in payload.items() if not isinstance(value, (list, dict))))


def key_value_text(payload: Dict) -> str:
    lines = []
    for key, value in payload.items():
        if isinstance(value, list):
            value = ' '.join(str(item) for item in value)
        lines.append(f"{key}: {value}\n")
    return ''.join(lines)


def load_code(profile: Optional[CodeProfile], codebook_file) -> tuple:
    """(profile, codebook); the codebook is only kept when it has other than four rows."""
    if (profile is None) == (codebook_file is None):
        raise click.UsageError("Give exactly one of --profile and --codebook-file.")
    if profile is not None:
        return profile, None
    book = read_codebook(codebook_file)
    if book.size == 4:
        return profile_of(book), None
    return None, book


def code_options(func):
    func = click.option('--codebook-file', type=click.File('r'), default=None,
                        help='One codeword per line, characters 0/1.')(func)
    func = click.option('--profile', type=PROFILE, default=None, help='Column counts, e.g. 1:3,3:2,5:2,6:2.')(func)
    return func


@click.group(context_settings={'help_option_names': ['-h', '--help']})
@click.option('-v', '--verbose', count=True, help='-v for progress, -vv for per-profile detail.')
def cli(verbose):
    """Exact ML decoding analysis of four-codeword binary codes on the BSC."""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')


def _book_spectrum(book: Codebook, engine: str, workers: int):
    if engine == 'analytic':
        raise ProfileError(f"The analytic engine needs a four-row code; this codebook has {book.size} rows.")
    return spectrum_bruteforce(book, workers)


@cli.command()
@code_options
@click.option('--engine', type=click.Choice(ENGINES), default='analytic', show_default=True)
@click.option('--eps', 'eps_list', type=PROBABILITY, multiple=True)
@click.option('--workers', type=click.IntRange(min=1), default=DEFAULT_WORKERS, show_default=True)
@click.option('--store', is_flag=True, help='Read and write analytic spectra through the result store.')
@output_options
def spectrum(profile, codebook_file, engine, eps_list, workers, store, fmt, decimal):
    """Distance spectrum alpha_0..alpha_n of a code."""
    profile, book = load_code(profile, codebook_file)
    if book is not None:
        result = _book_spectrum(book, engine, workers)
        label = ','.join(book.as_strings())
    else:
        if store:
            init_database()
        result = spectrum_for(profile, engine, workers=workers, store=store)
        label = format_profile(profile)
    payload = spectrum_payload(label, result, engine, eps_list, decimal)
    emit(fmt, payload, lambda: spectrum_csv(result), lambda: render_text(
        'spectrum.txt', profile=label, n=result.n, engine=engine,
        alpha=list(enumerate(payload['alpha'])), total=result.total(), lambdas=payload['lambda'],
    ))


@cli.command('lambda')
@code_options
@click.option('--eps', 'eps_list', type=PROBABILITY, multiple=True, required=True)
@click.option('--engine', type=click.Choice(ENGINES), default='analytic', show_default=True)
@click.option('--workers', type=click.IntRange(min=1), default=DEFAULT_WORKERS, show_default=True)
@output_options
def lambda_command(profile, codebook_file, eps_list, engine, workers, fmt, decimal):
    """Exact average correct-decoding probability at each eps."""
    profile, book = load_code(profile, codebook_file)
    if book is not None:
        result, label = _book_spectrum(book, engine, workers), ','.join(book.as_strings())
    else:
        result, label = spectrum_for(profile, engine, workers=workers), format_profile(profile)
    entries = lambda_entries(result, eps_list, decimal)
    payload = {'profile': label, 'n': result.n, 'lambda': entries}
    header = ('eps', 'lambda') + (('lambda_approx',) if decimal is not None else ())
    emit(fmt, payload,
         lambda: to_csv(header, (tuple(entry.values()) for entry in entries)),
         lambda: ''.join(
             f"lambda({e['eps']}) = {e['lambda']}" + (f"  (approx. {e['lambda_approx']})" if 'lambda_approx' in e else '') + '\n'
             for e in entries
         ))


@cli.command()
@click.option('--a', 'a', type=PROFILE, required=True)
@click.option('--b', 'b', type=PROFILE, required=True)
@click.option('--eps', 'eps_list', type=PROBABILITY, multiple=True)
@output_options
def compare(a, b, eps_list, fmt, decimal):
    """Compare two codes for every eps and at the given ones."""
    certificate = compare_codes(a, b, eps_list).to_dict()
    payload = {'a': format_profile(a), 'b': format_profile(b), **certificate}
    emit(fmt, payload,
         lambda: to_csv(('eps', 'order'), ((o['eps'], o['order']) for o in certificate['orderings'])),
         lambda: render_text('certificate.txt', certificate=certificate))


@cli.command()
@click.option('--profile', type=PROFILE, required=True)
@output_options
def classify(profile, fmt, decimal):
    """Linear / Class-I membership and the canonical form."""
    payload = classify_payload(profile)
    emit(fmt, payload, lambda: key_value_csv(payload), lambda: key_value_text(payload))


def _single_rule(profile: CodeProfile, rule: str, s: Optional[int], t: Optional[int],
                 source: Optional[int]) -> ReductionStep:
    if rule == 'even-replace':
        if s is None or t is None:
            raise click.UsageError("--rule even-replace needs --s and --t.")
        return even_replace(profile, s, t)
    if rule == 'two-bit-flip':
        if source is None:
            raise click.UsageError("--rule two-bit-flip needs --source.")
        return two_bit_flip(profile, source)
    if rule == 'zero-replace':
        return zero_replace(profile)
    return class_one_step(profile)


@cli.command()
@click.option('--profile', type=PROFILE, required=True)
@click.option('--exhaust', is_flag=True, help='Continue past Class-I codes while a replacement is certified.')
@click.option('--rule', type=click.Choice(SINGLE_RULES), default=None, help='Apply one rule instead of the pipeline.')
@click.option('--s', 's', type=click.IntRange(1, 4), default=None)
@click.option('--t', 't', type=click.IntRange(1, 4), default=None)
@click.option('--source', type=click.Choice(['1', '2', '4']), default=None)
@output_options
def reduce(profile, exhaust, rule, s, t, source, fmt, decimal):
    """Universal-improvement reduction to a linear or Class-I code."""
    if rule:
        step = _single_rule(profile, rule, s, t, int(source) if source else None)
        final, steps = step.after, [step]
    elif exhaust:
        final, steps = reduce_to_linear(profile)
    else:
        final, steps = reduce_to_linear_or_classI(profile)
    payload = reduction_payload(profile, final, steps)
    emit(fmt, payload,
         lambda: to_csv(('index', 'rule', 'before', 'after', 'universal'),
                        ((i, st['rule'], st['before'], st['after'], st['universal'])
                         for i, st in enumerate(payload['steps'], start=1))),
         lambda: render_text('reduction.txt', start=payload['start'], steps=payload['steps'],
                             final=payload['final'], linear=payload['linear'], class_one=payload['class_one']))


def _polynomial_payload(code: ClassIProfile, target: int, eps_list: Sequence[Fraction]) -> Dict:
    mapped = map_to_target(code, target)
    coefficients = comparison_polynomial(mapped)
    return {
        'profile': list(code.as_tuple()),
        'target': target,
        'coefficients': [str(c) for c in coefficients],
        'crossovers': [c.to_dict() for c in crossover_intervals(coefficients)],
        'values': [
            {
                'eps': format_fraction(eps),
                'polynomial': format_fraction(evaluate_polynomial(coefficients, eps)),
                'lambda_gap': format_fraction(lambda_gap(mapped, eps)),
            }
            for eps in eps_list
        ],
    }


@cli.command()
@click.option('--profile', type=PROFILE, required=True)
@click.option('--target', type=click.Choice(['3', '5', '6']), default='3', show_default=True)
@click.option('--check', type=click.Choice(['alpha', 'dominance', 'polynomial']), default='dominance', show_default=True)
@click.option('--eps', 'eps_list', type=PROBABILITY, multiple=True)
@output_options
def class1(profile, target, check, eps_list, fmt, decimal):
    """Closed-form analysis of replacing one <1> column of a Class-I code."""
    code = ClassIProfile.from_profile(profile)
    target = int(target)
    if check == 'polynomial':
        payload = _polynomial_payload(code, target, eps_list)
        emit(fmt, payload,
             lambda: to_csv(('power', 'coefficient'), enumerate(payload['coefficients'])),
             lambda: key_value_text(payload))
        return
    full = class_one_payload(code, target)
    if check == 'alpha':
        payload = {key: full[key] for key in ('profile', 'target', 'alpha3', 'alpha5')}
        emit(fmt, payload,
             lambda: to_csv(('d', 'alpha3', 'alpha5'),
                            ((d, a3, a5) for d, (a3, a5) in enumerate(zip(payload['alpha3'], payload['alpha5'])))),
             lambda: key_value_text(payload))
        return
    certificate = full['certificate']
    emit(fmt, certificate,
         lambda: to_csv(('d', 'margin'), enumerate(certificate['margins'], start=1)),
         lambda: render_text('certificate.txt', certificate=certificate))


@cli.command('verify-linear')
@click.option('--n', 'n', type=click.IntRange(min=1), required=True)
@click.option('--workers', type=click.IntRange(min=1), default=DEFAULT_WORKERS, show_default=True)
@click.option('--full', is_flag=True, help='Scan every profile instead of stopping at the first counterexample.')
@click.option('--eps', 'eps_list', type=PROBABILITY, multiple=True, help='Report the lambda gap of a counterexample here.')
@click.option('--timing', is_flag=True, help='Include elapsed seconds in the report.')
@click.option('--store', is_flag=True, help='Save the report in the result store.')
@output_options
def verify_linear(n, workers, full, eps_list, timing, store, fmt, decimal):
    """Certify that linear (n,2) codes are optimal."""
    if store:
        init_database()
    report = verify_linear_optimal(n, workers=workers, full=full, eps_list=eps_list, store=store)
    payload = report.to_dict(timing=timing)
    emit(fmt, payload, lambda: key_value_csv(payload), lambda: render_text('verify_report.txt', report=payload))


@cli.command()
@click.option('--n', 'n', type=click.IntRange(min=1), required=True)
@click.option('--eps', 'eps_list', type=PROBABILITY, multiple=True, default=SEARCH_EPS, show_default=True)
@click.option('--top', type=click.IntRange(min=1), default=5, show_default=True)
@output_options
def search(n, eps_list, top, fmt, decimal):
    """Rank every code of length n (n <= 12) by exact lambda."""
    ranking = exhaustive_optimal(n, eps_list)
    best = maximizers(ranking)
    rows: List[Dict] = []
    for eps, scored in ranking.items():
        rows.append({
            'eps': format_fraction(eps),
            'maximizers': [format_profile(p) for p in best[eps]],
            'ranking': [
                {'profile': format_profile(p), 'lambda': format_fraction(lam), 'linear': is_linear(p),
                 **({'lambda_approx': decimal_string(lam, decimal)} if decimal is not None else {})}
                for p, lam in scored[:top]
            ],
        })
    payload = {'n': n, 'per_eps': rows}
    emit(fmt, payload,
         lambda: to_csv(('eps', 'rank', 'profile', 'lambda', 'linear'),
                        ((row['eps'], i, r['profile'], r['lambda'], r['linear'])
                         for row in rows for i, r in enumerate(row['ranking'], start=1))),
         lambda: ''.join(
             f"eps {row['eps']}: best {' | '.join(row['maximizers'])}\n"
             + ''.join(f"  {r['lambda']}  {r['profile']}{'  linear' if r['linear'] else ''}\n" for r in row['ranking'])
             for row in rows
         ))


@cli.command('best-linear')
@click.option('--n', 'n', type=click.IntRange(min=1), required=True)
@click.option('--eps', 'eps_list', type=PROBABILITY, multiple=True, required=True)
@output_options
def best_linear_command(n, eps_list, fmt, decimal):
    """Best linear (n,2) codes over all (|3|,|5|,|6|) compositions."""
    result = best_linear(n, eps_list)
    payload = result.to_dict()
    if decimal is not None:
        for entry, eps in zip(payload['per_eps'], result.best):
            entry['lambda_approx'] = decimal_string(result.lambdas[eps], decimal)
    emit(fmt, payload,
         lambda: to_csv(('eps', 'lambda', 'n3', 'n5', 'n6'),
                        ((e['eps'], e['lambda'], *t) for e in payload['per_eps'] for t in e['maximizers'])),
         lambda: ''.join(
             f"eps {e['eps']}: lambda {e['lambda']} at {', '.join(str(tuple(t)) for t in e['maximizers'])}\n"
             for e in payload['per_eps']
         ))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return its exit status."""
    try:
        result = cli.main(args=list(argv) if argv is not None else None, prog_name='bsc4', standalone_mode=False)
    except RuleNotApplicable as exc:
        click.echo(f"Error: {exc}", err=True)
        return 2
    except Bsc4Error as exc:
        click.echo(f"Error: {exc}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    return result if isinstance(result, int) else 0


if __name__ == '__main__':
    sys.exit(main())
