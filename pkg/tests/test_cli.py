import json

import numpy as np
import pandas as pd
import pytest

from lmoment import main
from models.forms import builtin_form
from services.run_config import THREADS_ENV
from utils.file_parser import write_coefficient_file


@pytest.fixture(autouse=True)
def clear_threads(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)


def test_help_and_usage_errors():
    assert main(['--help']) == 0
    assert main([]) == 2
    assert main(['moment', '--no-such-flag']) == 2
    assert main(['moment', '--builtin-set', 'level1', '--t', 'zero']) == 2


def test_gen_forms_builtin(tmp_path):
    out = tmp_path / 'delta.csv'
    assert main(['gen-forms', '--id', 'delta12', '--n-max', '50', '--out', str(out)]) == 0
    lines = out.read_text(encoding='utf-8').splitlines()
    assert lines[0] == '#meta level=1 weight=12 count=50 normalized=true'
    assert len(lines) == 51
    assert lines[1] == '1,1'


def test_gen_forms_synthetic(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(['gen-forms', '--synthetic', '2', '--level', '101', '--n-max', '200',
                 '--seed', '5']) == 0
    written = sorted(p.name for p in (tmp_path / 'synthetic').iterdir())
    assert written == ['synthetic_N101_k2_000.csv', 'synthetic_N101_k2_001.csv']


def test_gen_forms_errors(tmp_path):
    assert main(['gen-forms', '--id', 'no_such_form', '--out', str(tmp_path / 'x.csv')]) == 2
    assert main(['gen-forms']) == 2
    assert main(['gen-forms', '--synthetic', '1', '--level', '100',
                 '--out', str(tmp_path / 'syn')]) == 2


def test_moment_needs_a_family():
    assert main(['moment']) == 2


def test_moment_missing_file(tmp_path):
    assert main(['moment', '--forms', str(tmp_path / 'absent.csv')]) == 2


def test_moment_writes_json_and_csv(tmp_path):
    stem = tmp_path / 'level11'
    assert main(['moment', '--builtin-set', 'level11', '--n-max', '1000', '--out', str(stem),
                 '--quiet']) == 0
    data = json.loads((tmp_path / 'level11.json').read_text(encoding='utf-8'))
    assert data['N'] == 11 and data['kappa'] == 2
    assert data['normalized'] == pytest.approx(data['total'] / 11)
    lines = (tmp_path / 'level11.csv').read_text(encoding='utf-8').splitlines()
    assert lines[-1].startswith('TOTAL,')


def test_moment_with_buckets_and_threads(tmp_path, monkeypatch):
    monkeypatch.setenv(THREADS_ENV, '3')
    stem = tmp_path / 'level1'
    assert main(['moment', '--builtin-set', 'level1', '--n-max', '1000', '--a', '1,1',
                 '--t', '1,-1', '--buckets', '--format', 'json', '--out', str(stem)]) == 0
    data = json.loads((tmp_path / 'level1.json').read_text(encoding='utf-8'))
    assert len(data['per_form']) == 6
    assert data['surrogate_log_margin'] >= 0
    assert not (tmp_path / 'level1.csv').exists()


def test_moment_rejects_bad_thread_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, 'zero')
    assert main(['moment', '--builtin-set', 'level11']) == 2


def test_moment_reports_partial_failure(tmp_path):
    short = tmp_path / 'short.csv'
    f = builtin_form('level11_weight2', 60)
    write_coefficient_file(short, f.level, f.weight, f.coeffs)
    assert main(['moment', '--builtin-set', 'level11', '--n-max', '1000', '--forms', str(short),
                 '--out', str(tmp_path / 'partial')]) == 1
    data = json.loads((tmp_path / 'partial.json').read_text(encoding='utf-8'))
    assert [row['form_id'] for row in data['failures']] == ['short']


def test_verify_rejects_corrupted_file(tmp_path):
    coeffs = np.array(builtin_form('delta12', 100).coeffs)
    coeffs[2] = 2.5
    bad = tmp_path / 'bad.csv'
    write_coefficient_file(bad, 1, 12, coeffs)
    out = tmp_path / 'verify'
    assert main(['verify', '--forms', str(bad), '--suite', 'hecke', '--out', str(out)]) == 1
    data = json.loads((tmp_path / 'verify.json').read_text(encoding='utf-8'))
    load = data['suites'][0]
    assert load['suite'] == 'load' and not load['passed']
    assert load['failures'][0]['invariant'] == 'deligne'
    assert load['failures'][0]['n'] == 2


def test_verify_passes_on_builtin_forms(tmp_path):
    out = tmp_path / 'verify'
    assert main(['verify', '--builtin-set', 'level11', '--n-max', '1000', '--suite', 'hecke',
                 '--suite', 'deligne', '--suite', 'fe', '--out', str(out)]) == 0
    data = json.loads((tmp_path / 'verify.json').read_text(encoding='utf-8'))
    assert data['passed'] is True
    assert [s['suite'] for s in data['suites']] == ['hecke', 'deligne', 'fe']


def test_harper_rejects_small_level():
    assert main(['harper', '--builtin-set', 'level1', '--N', '11']) == 2


def test_harper_outputs(tmp_path):
    stem = tmp_path / 'harper'
    assert main(['harper', '--builtin-set', 'level1', '--n-max', '1000',
                 '--out', str(stem)]) == 0
    data = json.loads((tmp_path / 'harper.json').read_text(encoding='utf-8'))
    assert data['config']['J'] == 1
    assert sum(data['partition'].values()) == 6
    assert data['window_mertens'] == []
    assert all(row['margin'] >= 0 for row in data['lemma26'])
    margins = pd.read_csv(tmp_path / 'harper_margins.csv')
    assert list(margins.columns) == ['form_id', 'i', 'l', 'abs_M', 'threshold', 'margin']
    assert len(margins) == 6


def test_harper_with_two_windows_finishes(tmp_path):
    stem = tmp_path / 'harper'
    assert main(['harper', '--builtin-set', 'level1', '--n-max', '1000', '--T', '0.1',
                 '--out', str(stem)]) == 0
    data = json.loads((tmp_path / 'harper.json').read_text(encoding='utf-8'))
    assert data['config']['J'] == 2 and data['config']['sieve_J'] == 1
    assert sum(data['partition'].values()) == 6
    assert [row['computable'] for row in data['window_mertens']] == [False]
    assert all(row['margin'] is None for row in data['lemma26'])
    assert len(pd.read_csv(tmp_path / 'harper_margins.csv')) == 12


def test_lvalue_grid(tmp_path):
    stem = tmp_path / 'values'
    assert main(['lvalue', '--builtin-set', 'level11', '--n-max', '2000', '--t-grid', '0,1',
                 '--format', 'csv', '--format', 'json', '--out', str(stem)]) == 0
    df = pd.read_csv(tmp_path / 'values.csv')
    assert df['t'].tolist() == [0.0, 1.0]
    assert df['re'].iloc[0] == pytest.approx(0.2538418608559107, abs=1e-8)


def test_lvalue_reports_short_sequences(tmp_path):
    assert main(['lvalue', '--builtin-set', 'level11', '--n-max', '200', '--t-grid', '0,50',
                 '--out', str(tmp_path / 'short')]) == 1
    data = json.loads((tmp_path / 'short.json').read_text(encoding='utf-8'))
    assert [row['t'] for row in data['values']] == [0.0]
    assert [row['t'] for row in data['failures']] == [50.0]


def test_petersson_terms(tmp_path):
    stem = tmp_path / 'petersson'
    assert main(['petersson', '--kappa', '12', '--level', '1', '--n', '1,4', '--Y', '2',
                 '--c-max', '50', '--out', str(stem)]) == 0
    data = json.loads((tmp_path / 'petersson.json').read_text(encoding='utf-8'))
    assert [row['n'] for row in data['terms']] == [1, 4]
    assert data['terms'][1]['main_term'] == pytest.approx(11 / 12 / 2)
    assert set(data['truncation_profiles']) == {'1', '4'}


def test_petersson_needs_kappa_and_level():
    assert main(['petersson', '--n', '1']) == 2


def test_petersson_rejects_mixed_weights():
    assert main(['petersson', '--builtin-set', 'level1', '--n', '1']) == 2
    assert main(['petersson', '--builtin-set', 'all', '--n', '1']) == 2
    assert main(['petersson', '--builtin-set', 'level1', '--kappa', '14', '--n', '1']) == 2


def test_petersson_selects_one_weight_from_a_family(tmp_path):
    stem = tmp_path / 'petersson'
    assert main(['petersson', '--builtin-set', 'level1', '--n-max', '1000', '--kappa', '12',
                 '--n', '1,4', '--Y', '2', '--c-max', '50', '--out', str(stem)]) == 0
    data = json.loads((tmp_path / 'petersson.json').read_text(encoding='utf-8'))
    assert data['kappa'] == 12 and data['level'] == 1
    assert all('delta_star' in row for row in data['terms'])
