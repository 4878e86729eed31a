"""
Command-line entry point.

Every subcommand prints a text report, or with ``--json`` the envelope
``{command, inputs, result, residuals, runtime-ms}``. The exit status is 0 when every requested
check passes, 1 when a check fails (including two closed forms that disagree) and 2 on refused input.

>>> main(['rank', '--ring', 'ising', '--genus', '2'])
10
0
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import (
    Any,
    Callable,
    Optional,
    Sequence,
)

from loguru import logger

from fusionblocks._config import (
    Settings,
    get_settings,
    set_settings,
)
from fusionblocks.core import catalog
from fusionblocks.core.dual_graph import load_graph
from fusionblocks.core.fusion_ring import (
    FusionData,
    dump_ring,
    load_ring,
    ring_document,
    verify_axioms,
)
from fusionblocks.core.moduli_rank import (
    RankQuery,
    decomposition_invariance,
    rank_closed_form,
    rank_dual_graph,
)
from fusionblocks.exceptions import (
    FormulaMismatchError,
    FusionBlocksError,
    StructuralError,
)
from fusionblocks.report import (
    emit,
    envelope,
    frame,
    laurent_frame,
    records,
    render_text,
    series_frame,
    timed,
)
from fusionblocks.series.eisenstein import eisenstein
from fusionblocks.series.residues import (
    expected_residues,
    residue_identities,
)
from fusionblocks.series.weierstrass import (
    p_series,
    p_series_exp,
    p_wp_lemma_check,
    wp_expansion,
)
from fusionblocks.voa.zhu_trace import (
    IDENTITIES,
    run_checks,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_REFUSED = 2

Outcome = tuple[Any, list[dict[str, Any]], str, bool]


def _resolve_ring(text: str) -> FusionData:
    # a file path when one exists, otherwise a catalog name
    if Path(text).exists() or text.endswith('.json'):
        return load_ring(text)
    return catalog.by_name(text)


def _labels(text: Optional[str]) -> list[str]:
    return [piece.strip() for piece in text.split(',') if piece.strip()] if text else []


def _catalog(args: argparse.Namespace) -> Outcome:
    if args.action == 'list':
        listed = catalog.names()
        return listed, [], '\n'.join(listed), True
    ring = catalog.by_name(args.name)
    if args.out:
        dump_ring(ring, args.out)
        return {'name': args.name, 'path': str(args.out)}, [], f'wrote {args.name} to {args.out}', True
    document = ring_document(ring)
    return document.model_dump(), [], document.model_dump_json(indent=2), True


def _verify_ring(args: argparse.Namespace) -> Outcome:
    ring = _resolve_ring(args.ring)
    violations = verify_axioms(ring)
    residuals = [{'axiom': v.axiom, 'witness': list(v.witness), 'count': v.count} for v in violations]
    text = 'ok' if not violations else '\n'.join(str(v) for v in violations)
    return {'labels': list(ring.labels), 'violations': len(violations)}, residuals, text, not violations


def _rank(args: argparse.Namespace) -> Outcome:
    ring = _resolve_ring(args.ring)
    if args.graph:
        if _labels(args.legs):
            raise StructuralError('--legs cannot be combined with --graph, the graph file carries the leg labels')
        value = rank_dual_graph(ring, load_graph(args.graph))
    else:
        value = rank_closed_form(ring, RankQuery(args.genus, tuple(_labels(args.legs))))
    return value, [], str(value), True


def _decomp_check(args: argparse.Namespace) -> Outcome:
    ring = _resolve_ring(args.ring)
    report = decomposition_invariance(ring, args.genus, _labels(args.legs))
    table = frame(report.rows(), ['graph', 'vertices', 'edges', 'rank'])
    residuals = []
    if report.discrepancy is not None:
        graph, value = report.discrepancy
        residuals.append({'graph': graph.to_document().model_dump(), 'rank': value, 'closed_form': report.closed_form})
    verdict = f'common value {report.common_value}' if report.consistent else f'discrepancy {residuals[0]}'
    result = {'closed_form': report.closed_form, 'values': report.values, 'common_value': report.common_value}
    return result, residuals, f'{render_text(table)}\n{verdict}', report.consistent


def _series(args: argparse.Namespace) -> Outcome:
    order = args.order if args.order is not None else get_settings().q_order
    z_order = args.z if args.z is not None else get_settings().z_window
    kind = args.kind
    if kind == 'eisenstein':
        table = series_frame(eisenstein(args.k, order))
    elif kind == 'wp':
        table = laurent_frame(wp_expansion(args.m, order, (None, z_order), zhu_convention=args.zhu))
    elif kind == 'p':
        window = (-z_order, z_order)
        table = laurent_frame(p_series(args.m, order, window, shifted=args.shifted))
    elif kind == 'p-exp':
        table = laurent_frame(p_series_exp(args.m, order, z_order))
    elif kind == 'check-lemma':
        residual = p_wp_lemma_check(args.m, order, z_order)
        rows = residual.rows()
        text = 'ok' if not rows else render_text(laurent_frame(residual))
        return {'mp1': args.m, 'zero': not rows}, rows, text, not rows
    else:
        got = residue_identities(args.wt, args.m, order)
        wanted = expected_residues(args.m, order)
        rows = [
            {'sum': index, 'value': str(value), 'expected': str(expected), 'match': value == expected}
            for index, (value, expected) in enumerate(zip(got, wanted))
        ]
        table = frame(rows)
        passed = all(row['match'] for row in rows)
        failing = [row for row in rows if not row['match']]
        return records(table), failing, render_text(table), passed
    return records(table), [], render_text(table), True


def _zhu_check(args: argparse.Namespace) -> Outcome:
    settings = get_settings()
    identities = list(IDENTITIES) if args.identity == 'all' else [args.identity]
    deg_max = args.deg_max if args.deg_max is not None else settings.degree_bound
    q_order = args.q_order if args.q_order is not None else settings.q_order
    rows = [row.to_dict() for row in run_checks(identities, deg_max, q_order, m=args.m, window=args.window)]
    failing = [row for row in rows if row['first_bad'] is not None]
    table = frame(rows, ['identity', 'a', 'v', 'm', 'first_bad'])
    summary = f'{len(rows)} checks, {len(failing)} failing'
    text = summary if not failing else f'{render_text(frame(failing))}\n{summary}'
    return {'checks': len(rows), 'failing': len(failing), 'rows': records(table)}, failing, text, not failing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='fusionblocks', description='Fusion rings, block ranks and torus traces.')
    parser.add_argument('--json', action='store_true', help='print the JSON report envelope')
    parser.add_argument('--log-level', default='WARNING', help='loguru level for stderr (default WARNING)')
    parser.add_argument('--env-file', default=None, help='dotenv file with FUSION_BLOCKS_* settings')
    parser.add_argument('--threads', type=int, default=None, help='worker cap (FUSION_BLOCKS_THREADS)')
    parser.add_argument('--tolerance', type=float, default=None, help='Verlinde integrality tolerance')
    commands = parser.add_subparsers(dest='command', required=True)

    cat = commands.add_parser('catalog', help='list or export catalog rings')
    cat_actions = cat.add_subparsers(dest='action', required=True)
    cat_actions.add_parser('list')
    export = cat_actions.add_parser('export')
    export.add_argument('name')
    export.add_argument('--out', type=Path, default=None)
    cat.set_defaults(handler=_catalog)

    verify = commands.add_parser('verify-ring', help='check the fusion axioms')
    verify.add_argument('--ring', required=True, help='fusion JSON file or catalog name')
    verify.set_defaults(handler=_verify_ring)

    rank = commands.add_parser('rank', help='rank of the block bundle')
    rank.add_argument('--ring', required=True)
    target = rank.add_mutually_exclusive_group(required=True)
    target.add_argument('--genus', type=int)
    target.add_argument('--graph', type=Path)
    rank.add_argument('--legs', default='', help='comma separated labels')
    rank.set_defaults(handler=_rank)

    decomp = commands.add_parser('decomp-check', help='closed form against every maximal degeneration')
    decomp.add_argument('--ring', required=True)
    decomp.add_argument('--genus', type=int, required=True)
    decomp.add_argument('--legs', default='')
    decomp.set_defaults(handler=_decomp_check)

    series = commands.add_parser('series', help='Eisenstein, Weierstrass and P expansions')
    series.add_argument('kind', choices=['eisenstein', 'wp', 'p', 'p-exp', 'check-lemma', 'residues'])
    series.add_argument('--k', type=int, default=1, help='G_2k index for eisenstein')
    series.add_argument('--m', type=int, default=2, help='function index')
    series.add_argument('--wt', type=int, default=1, help='weight for residues')
    series.add_argument('--order', type=int, default=None, help='q-order')
    series.add_argument('--z', type=int, default=None, help='z-window')
    series.add_argument('--shifted', action='store_true', help='P(zq, q) instead of P(z, q)')
    series.add_argument('--zhu', action='store_true', help='drop the G_2 term from wp')
    series.set_defaults(handler=_series)

    zhu = commands.add_parser('zhu-check', help='trace identities on the Fock module')
    zhu.add_argument('--identity', default='all', choices=['all', *IDENTITIES])
    zhu.add_argument('--deg-max', type=int, default=None)
    zhu.add_argument('--q-order', type=int, default=None)
    zhu.add_argument('--m', type=int, default=2)
    zhu.add_argument('--window', type=int, default=None)
    zhu.set_defaults(handler=_zhu_check)
    return parser


def _configure(args: argparse.Namespace) -> None:
    logger.remove()
    logger.add(sys.stderr, level=args.log_level.upper())
    overrides: dict[str, Any] = {'threads': args.threads, 'tolerance': args.tolerance}
    if args.json:
        overrides['output_format'] = 'json'
    set_settings(Settings.from_env(args.env_file, **overrides))


def _inputs(args: argparse.Namespace) -> dict[str, Any]:
    skip = {'handler', 'json', 'log_level', 'env_file'}
    return {
        key: str(value) if isinstance(value, Path) else value for key, value in vars(args).items() if key not in skip
    }


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    handler: Callable[[argparse.Namespace], Outcome] = args.handler
    try:
        _configure(args)
        as_json = get_settings().output_format == 'json'
        with timed() as clock:
            result, residuals, text, passed = handler(args)
    except FormulaMismatchError as e:
        logger.error('{}: {}', type(e).__name__, e)
        print(f'check failed: {e}', file=sys.stderr)
        return EXIT_FAILED
    except FusionBlocksError as e:
        logger.error('{}: {}', type(e).__name__, e)
        print(f'error: {e}', file=sys.stderr)
        return EXIT_REFUSED
    report = envelope(args.command, _inputs(args), result, residuals, clock['runtime_ms'])
    print(emit(report, as_json, text))
    return EXIT_OK if passed else EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
