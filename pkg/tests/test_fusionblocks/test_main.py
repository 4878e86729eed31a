from __future__ import annotations

import json

from fusionblocks._config import set_settings
from fusionblocks.exceptions import FormulaMismatchError
from fusionblocks.main import (
    EXIT_FAILED,
    EXIT_OK,
    EXIT_REFUSED,
    main,
)

BROKEN_RING = {'labels': ['1', 'tau'], 'dual': [0, 1], 'tensor': [[[1, 0], [0, 0]], [[0, 1], [1, 1]]]}
THETA = {'vertices': [{'genus': 0}, {'genus': 0}], 'edges': [[0, 1], [0, 1], [0, 1]], 'legs': []}


def run(capsys, *argv: str) -> tuple[int, str, str]:
    try:
        code = main(list(argv))
    finally:
        set_settings(None)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def it_lists_the_catalog(capsys) -> None:
    code, out, _ = run(capsys, 'catalog', 'list')
    assert code == EXIT_OK
    assert 'ising' in out.split()
    assert 'su2_3' in out.split()


def it_exports_a_ring_and_verifies_the_file(capsys, tmp_path) -> None:
    path = tmp_path / 'ising.json'
    code, _, _ = run(capsys, 'catalog', 'export', 'ising', '--out', str(path))
    assert code == EXIT_OK
    assert json.loads(path.read_text())['labels'] == ['1', 'eps', 'sigma']
    code, out, _ = run(capsys, 'verify-ring', '--ring', str(path))
    assert code == EXIT_OK
    assert out.strip() == 'ok'


def it_reports_axiom_violations_with_a_failing_status(capsys, tmp_path) -> None:
    path = tmp_path / 'broken.json'
    path.write_text(json.dumps(BROKEN_RING))
    code, out, _ = run(capsys, '--json', 'verify-ring', '--ring', str(path))
    assert code == EXIT_FAILED
    report = json.loads(out)
    assert report['command'] == 'verify-ring'
    assert 'identity' in {residual['axiom'] for residual in report['residuals']}


def it_refuses_unknown_rings(capsys) -> None:
    code, out, err = run(capsys, 'rank', '--ring', 'e8_1', '--genus', '2')
    assert code == EXIT_REFUSED
    assert out == ''
    assert 'e8_1' in err


def it_refuses_a_malformed_file(capsys, tmp_path) -> None:
    path = tmp_path / 'bad.json'
    path.write_text('{"labels": ["1"], "dual": [0], "tensor": [[[-1]]]}')
    code, _, err = run(capsys, 'verify-ring', '--ring', str(path))
    assert code == EXIT_REFUSED
    assert 'tensor' in err


def it_ranks_curves_and_dual_graphs(capsys, tmp_path) -> None:
    assert run(capsys, 'rank', '--ring', 'ising', '--genus', '2')[:2] == (EXIT_OK, '10\n')
    assert run(capsys, 'rank', '--ring', 'ising', '--genus', '1', '--legs', 'sigma,sigma')[:2] == (EXIT_OK, '4\n')
    path = tmp_path / 'theta.json'
    path.write_text(json.dumps(THETA))
    assert run(capsys, 'rank', '--ring', 'ising', '--graph', str(path))[:2] == (EXIT_OK, '10\n')


def it_refuses_legs_given_with_a_graph(capsys, tmp_path) -> None:
    path = tmp_path / 'theta.json'
    path.write_text(json.dumps(THETA))
    code, out, err = run(capsys, 'rank', '--ring', 'ising', '--graph', str(path), '--legs', 'sigma')
    assert code == EXIT_REFUSED
    assert out == ''
    assert '--legs' in err


def it_fails_when_the_two_closed_forms_disagree(capsys, monkeypatch) -> None:
    def disagree(*args, **kwargs):
        raise FormulaMismatchError('(N W^g)_00 = 10, Tr(N W^(g-1)) = 9')

    monkeypatch.setattr('fusionblocks.main.rank_closed_form', disagree)
    code, out, err = run(capsys, 'rank', '--ring', 'ising', '--genus', '2')
    assert code == EXIT_FAILED
    assert out == ''
    assert 'Tr(N W^(g-1))' in err


def it_refuses_unstable_graphs(capsys, tmp_path) -> None:
    path = tmp_path / 'loop.json'
    path.write_text(json.dumps({'vertices': [{'genus': 0}], 'edges': [[0, 0]]}))
    code, _, err = run(capsys, 'rank', '--ring', 'ising', '--graph', str(path))
    assert code == EXIT_REFUSED
    assert 'valence' in err


def it_checks_decomposition_invariance(capsys) -> None:
    code, out, _ = run(capsys, '--json', 'decomp-check', '--ring', 'lee_yang', '--genus', '2')
    assert code == EXIT_OK
    report = json.loads(out)
    assert report['result']['common_value'] == 5
    assert report['result']['values'] == [5, 5]
    assert report['runtime-ms'] >= 0
    assert 'runtime_ms' not in report


def it_prints_eisenstein_rows(capsys) -> None:
    code, out, _ = run(capsys, '--json', 'series', 'eisenstein', '--k', '2', '--order', '2')
    assert code == EXIT_OK
    rows = json.loads(out)['result']
    assert rows[0] == {'q': '0', 'u': 4, 'value': '1/720'}
    assert rows[1] == {'q': '1', 'u': 4, 'value': '1/3'}


def it_checks_the_series_identities(capsys) -> None:
    code, out, _ = run(capsys, 'series', 'check-lemma', '--m', '3', '--order', '3', '--z', '3')
    assert code == EXIT_OK
    assert out.strip() == 'ok'
    code, _, _ = run(capsys, 'series', 'residues', '--wt', '2', '--m', '2', '--order', '2')
    assert code == EXIT_OK


def it_runs_trace_identities(capsys) -> None:
    code, out, _ = run(capsys, 'zhu-check', '--identity', 'a0', '--deg-max', '1', '--q-order', '2')
    assert code == EXIT_OK
    assert out.strip() == '4 checks, 0 failing'


def it_refuses_invalid_settings(capsys, monkeypatch) -> None:
    monkeypatch.setenv('FUSION_BLOCKS_Q_ORDER', '0')
    code, _, err = run(capsys, 'zhu-check', '--identity', 'a0', '--deg-max', '1')
    assert code == EXIT_REFUSED
    assert 'q_order' in err
