import json

import numpy as np
import pandas as pd
import pytest

from pwca_milp import __version__
from pwca_milp.bench.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, cli_dispatch
from pwca_milp.bench.experiments import random_queries
from pwca_milp.core.convex_fit import ConvexModel
from pwca_milp.core.model_io import load_model


def stdout_value(text, key):
    for line in text.splitlines():
        if line.startswith(f"{key}:"):
            return line.split(':', 1)[1].strip()
    raise AssertionError(f"{key} missing from output:\n{text}")


@pytest.fixture
def data_file(tmp_path):
    path = tmp_path / 'product.csv'
    assert cli_dispatch(['gen-data', '--grid', '6', '--out', str(path)]) == EXIT_OK
    return path


@pytest.fixture
def simplex_file(tmp_path, data_file):
    path = tmp_path / 'grid.simplex'
    assert cli_dispatch(['fit-simplex', '--data', str(data_file), '--segments', '2',
                         '--out', str(path)]) == EXIT_OK
    return path


class TestUsage:
    def test_no_command(self):
        assert cli_dispatch([]) == EXIT_USAGE

    def test_unknown_option(self):
        assert cli_dispatch(['solve', '--bogus']) == EXIT_USAGE

    def test_version(self, capsys):
        assert cli_dispatch(['--version']) == EXIT_OK
        assert __version__ in capsys.readouterr().out


class TestGenData:
    def test_writes_grid(self, data_file, capsys):
        frame = pd.read_csv(data_file)
        assert len(frame) == 36
        assert np.allclose(frame.iloc[:, -1], frame.iloc[:, 0] * frame.iloc[:, 1])

    def test_archive_copy(self, tmp_path):
        out = tmp_path / 'd.csv'
        archive = tmp_path / 'archive'
        code = cli_dispatch(['--archive-dir', str(archive), '--seed', '9',
                             'gen-data', '--grid', '3', '--out', str(out)])
        assert code == EXIT_OK
        meta = json.loads((archive / 'd.csv.meta.json').read_text(encoding='utf-8'))
        assert meta['command'] == 'gen-data'
        assert meta['seed'] == '9'
        assert meta['grid'] == '3'


class TestFitAndSolve:
    def test_fit_convex(self, tmp_path, data_file):
        out = tmp_path / 'm.convex'
        code = cli_dispatch(['fit-convex', '--data', str(data_file), '--planes', '2',
                             '--out', str(out)])
        assert code == EXIT_OK
        stored = load_model(out)
        assert isinstance(stored.model, ConvexModel)
        assert stored.domain is not None

    @pytest.mark.slow
    def test_fit_pwca_vertical_interface(self, tmp_path, data_file):
        out = tmp_path / 'm.pwca'
        code = cli_dispatch(['fit-pwca', '--data', str(data_file), '--planes', '2',
                             '--vertical-interface', '--out', str(out)])
        assert code == EXIT_OK
        assert load_model(out).model.is_vertical

    def test_replicated_minimum(self, tmp_path, simplex_file, capsys):
        lp = tmp_path / 'rep.lp'
        assert cli_dispatch(['translate', '--model', str(simplex_file), '--formulation', 'CC',
                             '--replicate', '2', '--out', str(lp)]) == EXIT_OK
        assert '16 binaries' in capsys.readouterr().out
        assert cli_dispatch(['solve', '--lp', str(lp)]) == EXIT_OK
        out = capsys.readouterr().out
        assert stdout_value(out, 'status') == 'optimal'
        # a piecewise-linear function is smallest at a vertex
        expected = 2 * load_model(simplex_file).model.values.min()
        assert float(stdout_value(out, 'objective')) == pytest.approx(expected, abs=1e-7)

    @pytest.mark.parametrize('formulation', ['CC', 'MC', 'Log'])
    def test_query_problem(self, tmp_path, simplex_file, capsys, formulation):
        lp = tmp_path / 'queries.lp'
        code = cli_dispatch(['--seed', '4', 'translate', '--model', str(simplex_file),
                             '--formulation', formulation, '--queries', '3', '--out', str(lp)])
        assert code == EXIT_OK
        capsys.readouterr()
        values = tmp_path / 'values.csv'
        assert cli_dispatch(['solve', '--lp', str(lp), '--out', str(values)]) == EXIT_OK
        objective = float(stdout_value(capsys.readouterr().out, 'objective'))

        tri = load_model(simplex_file).model
        expected = tri.predict(random_queries(3, tri.box, 4)).sum()
        assert objective == pytest.approx(expected, abs=1e-7)
        frame = pd.read_csv(values)
        assert list(frame.columns) == ['variable', 'value']
        assert {'y_1', 'y_2', 'y_3'} <= set(frame['variable'])


class TestErrors:
    def test_missing_data(self, tmp_path):
        code = cli_dispatch(['fit-convex', '--data', str(tmp_path / 'none.csv'), '--planes', '2',
                             '--out', str(tmp_path / 'm.convex')])
        assert code == EXIT_DATA

    def test_malformed_lp(self, tmp_path):
        lp = tmp_path / 'bad.lp'
        lp.write_text('Minimize\n obj: x\nSubject To\n c: x +\n', encoding='utf-8')
        assert cli_dispatch(['solve', '--lp', str(lp)]) == EXIT_DATA

    def test_invalid_time_limit(self, tmp_path, simplex_file):
        lp = tmp_path / 'rep.lp'
        cli_dispatch(['translate', '--model', str(simplex_file), '--out', str(lp)])
        assert cli_dispatch(['solve', '--lp', str(lp), '--time-limit', '0']) == EXIT_USAGE


@pytest.mark.slow
class TestBenchmarks:
    def test_bench_perf(self, tmp_path, data_file, simplex_file):
        pwca = tmp_path / 'm.pwca'
        assert cli_dispatch(['fit-pwca', '--data', str(data_file), '--planes', '2',
                             '--vertical-interface', '--out', str(pwca)]) == EXIT_OK
        out = tmp_path / 'perf.csv'
        code = cli_dispatch(['bench-perf', '--data', str(data_file), '--pwca-model', str(pwca),
                             '--simplex-model', str(simplex_file), '--sizes', '1', '2',
                             '--repeats', '1', '--out', str(out)])
        assert code == EXIT_OK
        frame = pd.read_csv(out)
        assert len(frame) == 8
        assert set(frame['status']) == {'optimal'}

    def test_bench_accuracy(self, tmp_path, data_file):
        out = tmp_path / 'acc.csv'
        code = cli_dispatch(['bench-accuracy', '--data', str(data_file), '--planes', '1', '2',
                             '--out', str(out)])
        assert code == EXIT_OK
        frame = pd.read_csv(out)
        assert list(frame['model_kind']) == ['convex', 'convex', 'pwca', 'pwca']
