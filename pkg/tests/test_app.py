# pyranders/tests/test_app.py
# -*- coding: utf-8 -*-
# Copyright (C) 2020 Eric Truett
# Licensed under the MIT License

import json
import re

import numpy as np
import pandas as pd
import pytest

from pyranders.app.app import *
from pyranders.geometry import FUNK, point
from pyranders.spectrum import GAP_COLUMNS


def test_eval_funk(capsys):
    assert run(['eval', '--model', 'funk', '--point', '0,0', '--vector', '3,4']) == EXIT_OK
    record = json.loads(capsys.readouterr().out)
    assert record['F'] == 5
    assert record['alpha'] == 5
    assert record['beta'] == 0
    assert record['randers_bound'] == 0


def test_eval_pdisk(capsys):
    assert run(['eval', '--model', 'pdisk', '--point', '0.5,0', '--vector', '1,0']) == EXIT_OK
    record = json.loads(capsys.readouterr().out)
    assert record['F'] == pytest.approx(24 / 5, rel=1e-14)
    assert record['randers_bound'] == pytest.approx(0.8, rel=1e-14)


def test_eval_outside_domain(capsys):
    assert run(['eval', '--model', 'hplane', '--point=0,-1', '--vector', '1,0']) == EXIT_DOMAIN
    assert 'domain' in capsys.readouterr().err


@pytest.mark.parametrize('argv', [
    ['eval', '--model', 'klein', '--point', '0,0', '--vector', '1,0'],
    ['eval', '--model', 'funk', '--point', '0,0,0', '--vector', '1,0'],
    ['eval', '--model', 'funk', '--point', '0,0'],
    ['indicatrix', '--model', 'funk', '--point', '0,0', '--nodes', '3', '--out', 'x.svg'],
    ['verify', '--maps', 'f,k'],
    ['gap', '--models', 'funk,klein'],
    ['frobnicate'],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_USAGE
    assert capsys.readouterr().err


def test_verify_pass_and_repeatable(tmp_path, capsys):
    out1, out2 = tmp_path / 'a.csv', tmp_path / 'b.csv'
    assert run(['verify', '--samples', '500', '--out', str(out1)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == 'PASS'
    assert run(['verify', '--samples', '500', '--out', str(out2)]) == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()
    df = pd.read_csv(out1)
    assert df['map'].tolist() == list(ALL_MAPS) + ['commutativity']
    assert (df['samples'] == 500).all()
    assert (df['seed'] == 0).all()


def test_verify_reversible_subset(tmp_path):
    out = tmp_path / 'rev.csv'
    assert run(['verify', '--samples', '200', '--maps', 'f,g_inv', '--reversible', '--out', str(out)]) == EXIT_OK
    assert pd.read_csv(out)['map'].tolist() == ['f', 'g_inv', 'commutativity']


def test_verify_zero_tolerance_fails(tmp_path, capsys):
    assert run(['verify', '--samples', '500', '--tol', '0', '--out', str(tmp_path / 'v.csv')]) == EXIT_FAILED
    assert capsys.readouterr().out.strip() == 'FAIL'


def _comment(svg, key):
    return float(re.search(rf'{re.escape(key)}: (\S+)', svg).group(1))


def test_indicatrix_svg(tmp_path):
    out = tmp_path / 'ind.svg'
    assert run(['indicatrix', '--model', 'funk', '--point', '0.5,0', '--nodes', '128', '--out', str(out)]) == EXIT_OK
    svg = out.read_text()
    assert svg.startswith('<?xml')
    assert svg.count('<polygon') == 1
    assert _comment(svg, 'r(0)') == pytest.approx(0.5, rel=1e-14)
    assert _comment(svg, 'r(pi)') == pytest.approx(1.5, rel=1e-14)
    assert _comment(svg, 'asymmetry') == pytest.approx(-1, rel=1e-14)
    assert _comment(svg, 'max_radial_deviation') == pytest.approx(0.5, rel=1e-12)


def test_indicatrix_origin_is_circle():
    svg = indicatrix_svg(FUNK, point(FUNK, (0, 0)), 64)
    assert _comment(svg, 'max_radial_deviation') < 1e-15
    assert _comment(svg, 'asymmetry') == 0


def test_gap_csv_schema(tmp_path, capsys):
    out = tmp_path / 'gap.csv'
    code = run(['gap', '--models', 'pdisk', '--truncations', '0.5,0.7', '--h', '0.15', '--iters', '3',
                '--seed', '5', '--out', str(out)])
    assert code in (EXIT_OK, EXIT_FAILED)
    assert capsys.readouterr().out.strip() == ('PASS' if code == EXIT_OK else 'FAIL')
    lines = out.read_text().splitlines()
    assert lines[0] == ','.join(GAP_COLUMNS)
    assert 'meta,seed,,,5,' in lines
    rows = [line for line in lines[1:] if not line.startswith(('summary,', 'meta,'))]
    summary = [line.split(',') for line in lines[1:] if line.startswith('summary,')]
    assert len(rows) == 4
    assert {s[1] for s in summary} == {'monotone', 'finsler_threshold', 'reversible_floor'}
    assert all(len(s) == len(GAP_COLUMNS) and s[4] in ('0', '1') for s in summary)
    assert (code == EXIT_OK) == all(s[4] == '1' for s in summary)


def test_gap_bad_truncations(tmp_path):
    assert run(['gap', '--models', 'funk', '--truncations', '0.9,0.5', '--out', str(tmp_path / 'g.csv')]) == EXIT_USAGE


def test_distance(capsys):
    assert run(['distance', '--model', 'pdisk', '--from', '0,0', '--to', '0.5,0', '--control', '1',
                '--iters', '5']) == EXIT_OK
    record = json.loads(capsys.readouterr().out)
    assert record['forward'] == pytest.approx(np.log(5), rel=1e-9)
    assert record['reverse'] == pytest.approx(np.log(1.8), rel=1e-9)
    assert record['asymmetry'] > 0.1


def test_distance_reversible(capsys):
    assert run(['distance', '--model', 'funk', '--reversible', '--from', '0,0', '--to', '0.5,0',
                '--control', '0']) == EXIT_OK
    record = json.loads(capsys.readouterr().out)
    assert record['asymmetry'] < 1e-12


def test_distance_identical_endpoints(capsys):
    assert run(['distance', '--model', 'funk', '--from', '0.1,0', '--to', '0.1,0']) == EXIT_USAGE
    assert capsys.readouterr().err


def test_verify_single_sample_repeatable(tmp_path):
    out1, out2 = tmp_path / 'a.csv', tmp_path / 'b.csv'
    code1 = run(['verify', '--samples', '1', '--seed', '7', '--out', str(out1)])
    code2 = run(['verify', '--samples', '1', '--seed', '7', '--out', str(out2)])
    assert code1 == code2
    assert code1 in (EXIT_OK, EXIT_FAILED)
    assert out1.read_bytes() == out2.read_bytes()
