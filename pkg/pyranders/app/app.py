# pyranders/pyranders/app/app.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from pyranders.exceptions import DomainError, RandersError
from pyranders.geometry import ModelId, ModelPoint, TangentVector, point
from pyranders.isometry import ALL_MAPS, verification_table
from pyranders.measure import indicatrix
from pyranders.metric import evaluate, finsler_norm, randers_bound
from pyranders.misc import atomic_write, dumps_record, format_number
from pyranders.paths import optimize_path
from pyranders.settings import default_ctx
from pyranders.spectrum import GAP_COLUMNS, gap_experiment


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_FAILED = 3


class UsageError(Exception):
    """Bad command line"""


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting with status 2"""

    def error(self, message):
        raise UsageError(f'{self.prog}: {message}')


def _pair(text: str) -> Tuple[float, float]:
    try:
        values = tuple(float(s) for s in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected x1,x2, got {text!r}')
    if len(values) != 2 or not all(np.isfinite(values)):
        raise argparse.ArgumentTypeError(f'expected two finite numbers x1,x2, got {text!r}')
    return values


def _floats(text: str) -> List[float]:
    try:
        return [float(s) for s in text.split(',') if s]
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected comma-separated numbers, got {text!r}')


def _names(text: str) -> List[str]:
    return [s.strip() for s in text.split(',') if s.strip()]


def _nodes(text: str) -> int:
    n = int(text)
    if n < 64:
        raise argparse.ArgumentTypeError(f'nodes must be >= 64, got {n}')
    return n


def _model(args) -> ModelId:
    try:
        return ModelId.parse(args.model, args.reversible)
    except RandersError as e:
        raise UsageError(str(e))


def cmd_eval(args) -> int:
    """Prints F, alpha, beta and the Randers bound at a tangent vector"""
    model = _model(args)
    x = point(model, args.point)
    mv = evaluate(model, TangentVector(x, args.vector))
    record = {'F': mv.F, 'alpha': mv.alpha, 'beta': mv.beta, 'randers_bound': randers_bound(model, x)}
    print(dumps_record(record))
    return EXIT_OK


def cmd_verify(args) -> int:
    """Writes the isometry verification table and prints PASS or FAIL"""
    maps = _names(args.maps)
    unknown = set(maps) - set(ALL_MAPS)
    if unknown:
        raise UsageError(f'unknown maps {sorted(unknown)}')
    df, reports, comm = verification_table(args.samples, args.seed, args.truncation, maps, args.reversible)
    df.insert(2, 'seed', args.seed)
    atomic_write(args.out, df.to_csv(index=False, float_format='%.17g'))
    passed = all(r.passed(args.tol) for r in reports) and comm.passed(args.commutativity_tol)
    for r in reports:
        logging.info(f'{r.map}: max rel err {r.max_rel_err:.3e}, alpha {r.max_alpha_err:.3e}, beta {r.max_beta_err:.3e}')
    logging.info(f'commutativity: {comm.max_err:.3e} ({comm.worst_identity})')
    print('PASS' if passed else 'FAIL')
    return EXIT_OK if passed else EXIT_FAILED


def indicatrix_svg(model: ModelId, x: ModelPoint, nodes: int) -> str:
    """SVG with the indicatrix polyline, the Euclidean unit circle and diagnostics as comments"""
    profile = indicatrix(model, x, nodes)
    curve = profile.curve()
    e = np.array([[1.0, 0.0], [-1.0, 0.0]])
    r0, rpi = 1 / finsler_norm(model, np.broadcast_to(x.array, e.shape), e)
    extent = 1.1 * max(1.0, float(np.max(profile.radii)))
    pts = ' '.join(f'{format_number(p)},{format_number(q)}' for p, q in curve)
    stroke = format_number(extent / 200)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{format_number(-extent)} {format_number(-extent)} '
        f'{format_number(2 * extent)} {format_number(2 * extent)}">',
        f'<!-- model: {model.name} point: {format_number(x.coords[0])},{format_number(x.coords[1])} nodes: {nodes} -->',
        f'<!-- max_radial_deviation: {format_number(np.max(np.abs(profile.radii - 1)))} -->',
        f'<!-- r(0): {format_number(r0)} r(pi): {format_number(rpi)} asymmetry: {format_number(r0 - rpi)} -->',
        '<g transform="scale(1,-1)">',
        f'<circle cx="0" cy="0" r="1" fill="none" stroke="gray" stroke-width="{stroke}" stroke-dasharray="{stroke}"/>',
        f'<polygon points="{pts}" fill="none" stroke="black" stroke-width="{stroke}"/>',
        '</g>',
        '</svg>',
    ]
    return '\n'.join(lines) + '\n'


def cmd_indicatrix(args) -> int:
    model = _model(args)
    svg = indicatrix_svg(model, point(model, args.point), args.nodes)
    atomic_write(args.out, svg)
    logging.info(f'wrote {args.out}')
    return EXIT_OK


def gap_csv(table: pd.DataFrame, flags, seed: int) -> str:
    """Gap table, a metadata row with the seed and one trailing summary row per flag"""
    body = table.to_csv(index=False, float_format='%.17g')
    rows = [f'meta,seed,,,{seed},'] + [f'summary,{name},,,{int(ok)},' for name, ok in flags.items()]
    return body + ''.join(f'{r}\n' for r in rows)


def cmd_gap(args) -> int:
    """Runs the gap experiment and writes the CSV table"""
    models = []
    for name in _names(args.models):
        try:
            models.append(ModelId.parse(name))
        except RandersError as e:
            raise UsageError(str(e))
    if not models:
        raise UsageError('no models given')
    report = gap_experiment(models, args.truncations, args.h, args.seed, max_iters=args.iters,
                            include_reversible=not args.no_reversible)
    atomic_write(args.out, gap_csv(report.table[GAP_COLUMNS], report.flags, args.seed))
    for name, ok in report.flags.items():
        logging.info(f'{name}: {"ok" if ok else "failed"}')
    print('PASS' if report.passed else 'FAIL')
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_distance(args) -> int:
    """Prints forward and reverse distance estimates and their asymmetry"""
    model = _model(args)
    x, y = point(model, args.start), point(model, args.end)
    forward = optimize_path(model, x, y, args.control, args.iters)
    reverse = optimize_path(model, y, x, args.control, args.iters)
    print(dumps_record({
        'forward': forward.length,
        'reverse': reverse.length,
        'asymmetry': abs(forward.length - reverse.length),
    }))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ctx = default_ctx()
    verify, spectrum, paths = ctx['verify_settings'], ctx['spectrum_settings'], ctx['paths_settings']

    parser = _Parser(prog='pyranders', description='Finsler-Randers models: evaluation, isometries, spectra')
    parser.add_argument('--verbose', action='store_true', help='log progress at INFO level')
    sub = parser.add_subparsers(dest='command', parser_class=_Parser)
    sub.required = True

    def model_args(p):
        p.add_argument('--model', required=True, help='funk, pdisk or hplane')
        p.add_argument('--reversible', action='store_true', help='use the reversible counterpart')

    p = sub.add_parser('eval', help='evaluate F at a tangent vector')
    model_args(p)
    p.add_argument('--point', type=_pair, required=True)
    p.add_argument('--vector', type=_pair, required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser('verify', help='check the six isometries and the commutative diagram')
    p.add_argument('--samples', type=int, default=verify['samples'])
    p.add_argument('--seed', type=int, default=verify['seed'])
    p.add_argument('--truncation', type=float, default=verify['truncation'])
    p.add_argument('--tol', type=float, default=verify['tol'])
    p.add_argument('--commutativity-tol', type=float, default=verify['commutativity_tol'])
    p.add_argument('--maps', default=','.join(ALL_MAPS))
    p.add_argument('--reversible', action='store_true')
    p.add_argument('--out', type=Path, default=Path('verify.csv'))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser('indicatrix', help='draw the unit ball at a point as SVG')
    model_args(p)
    p.add_argument('--point', type=_pair, required=True)
    p.add_argument('--nodes', type=_nodes, default=720)
    p.add_argument('--out', type=Path, required=True)
    p.set_defaults(func=cmd_indicatrix)

    p = sub.add_parser('gap', help='minimized Rayleigh quotients over a truncation schedule')
    p.add_argument('--models', default=','.join(spectrum['models']))
    p.add_argument('--truncations', type=_floats, default=list(spectrum['truncations']))
    p.add_argument('--h', type=float, default=spectrum['h_mesh'])
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--iters', type=int, default=spectrum['max_iters'])
    p.add_argument('--no-reversible', action='store_true', help='skip the reversible counterpart rows')
    p.add_argument('--out', type=Path, default=Path('gap.csv'))
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser('distance', help='forward and reverse distance estimates')
    model_args(p)
    p.add_argument('--from', dest='start', type=_pair, required=True)
    p.add_argument('--to', dest='end', type=_pair, required=True)
    p.add_argument('--control', type=int, default=paths['control_points'])
    p.add_argument('--iters', type=int, default=paths['iterations'])
    p.set_defaults(func=cmd_distance)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parses argv, runs the command and returns the exit code"""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format='%(asctime)s %(levelname)s %(message)s')
    try:
        return args.func(args)
    except DomainError as e:
        print(f'domain error: {e}', file=sys.stderr)
        return EXIT_DOMAIN
    except (UsageError, RandersError) as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
