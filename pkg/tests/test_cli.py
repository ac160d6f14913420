import json
import os

import numpy as np
import pytest

import symmean.cli as cli


def run(capsys, *argv):
    exit_code = cli.run_command(list(argv))
    captured = capsys.readouterr()
    return exit_code, captured.out, captured.err


def test_mean2_geometric(capsys):
    exit_code, out, _ = run(capsys, 'mean2', '--kernel', 'geometric',
                            'test_files/diag_1_4.json', 'test_files/diag_4_1.json')
    assert exit_code == 0
    document = json.loads(out)
    assert document['dim'] == 2
    np.testing.assert_allclose(document['data'], [2.0, 0.0, 0.0, 2.0], atol=1e-14)
    assert document['label'] == 'geometric mean'


def test_wmean(capsys):
    exit_code, out, _ = run(capsys, 'wmean', '--kernel', 'geometric', '-t', '0.5',
                            'test_files/scalar_1.json', 'test_files/scalar_4.json')
    assert exit_code == 0
    assert json.loads(out)['data'] == [pytest.approx(2.0)]



def test_wmean_writes_trace(capsys):
    exit_code, out, _ = run(capsys, 'wmean', '--kernel', 'geometric', '-t', '0.3',
                            '--trace', 'test_files/wtrace.testresult.json', '--trace-full',
                            'test_files/diag_1_4.json', 'test_files/diag_4_1.json')
    assert exit_code == 0
    np.testing.assert_allclose(json.loads(out)['data'], [4.0 ** 0.3, 0.0, 0.0, 4.0 ** 0.7], rtol=1e-9, atol=1e-12)
    with open('test_files/wtrace.testresult.json', 'r', encoding='utf-8') as trace_file:
        trace = json.load(trace_file)
    os.remove('test_files/wtrace.testresult.json')
    assert trace['kernel'] == 'geometric'
    assert trace['t'] == pytest.approx(0.3)
    assert trace['converged'] is True
    first = trace['steps'][0]
    assert set(first) == {'step', 'a', 'b', 'r_gap', 'iterates'}
    assert (first['a'], first['b']) == (0.0, 1.0)
    assert first['r_gap'] == pytest.approx(3.0)
    assert first['iterates'] == [[[1.0, 0.0], [0.0, 4.0]], [[4.0, 0.0], [0.0, 1.0]]]
    assert trace['steps'][1]['b'] == 0.5
    assert trace['steps'][-1]['r_gap'] <= 1e-12


def test_wmean_trace_stops_at_dyadic_weight(capsys):
    exit_code, _, _ = run(capsys, 'wmean', '--kernel', 'harmonic', '-t', '0.25',
                          '--trace', 'test_files/dyadic.testresult.json',
                          'test_files/diag_1_4.json', 'test_files/diag_4_1.json')
    assert exit_code == 0
    with open('test_files/dyadic.testresult.json', 'r', encoding='utf-8') as trace_file:
        trace = json.load(trace_file)
    os.remove('test_files/dyadic.testresult.json')
    assert [(step['a'], step['b']) for step in trace['steps']] == [(0.0, 1.0), (0.0, 0.5), (0.25, 0.5)]
    assert 'iterates' not in trace['steps'][0]


def test_wmean_max_depth_exceeded(capsys):
    exit_code, out, err = run(capsys, 'wmean', '--kernel', 'geometric', '-t', '0.3', '--max-depth', '3',
                              '--trace', 'test_files/wpartial.testresult.json',
                              'test_files/diag_1_4.json', 'test_files/diag_4_1.json')
    assert exit_code == 1
    assert out == ''
    assert 'did not reach tol' in err
    with open('test_files/wpartial.testresult.json', 'r', encoding='utf-8') as trace_file:
        trace = json.load(trace_file)
    os.remove('test_files/wpartial.testresult.json')
    assert trace['converged'] is False
    assert [step['step'] for step in trace['steps']] == [0, 1, 2, 3]
    assert trace['steps'][-1]['r_gap'] > 1e-12

def test_wmean_weight_out_of_range(capsys):
    exit_code, out, err = run(capsys, 'wmean', '--kernel', 'harmonic', '-t', '1.5',
                              'test_files/scalar_1.json', 'test_files/scalar_2.json')
    assert exit_code == 2
    assert out == ''
    assert 't must lie in [0, 1]' in err


def test_nmean_bmp_arithmetic(capsys):
    exit_code, out, _ = run(capsys, 'nmean', '--method', 'bmp', '--kernel', 'arithmetic',
                            'test_files/scalar_1.json', 'test_files/scalar_2.json', 'test_files/scalar_3.json')
    assert exit_code == 0
    assert json.loads(out)['data'] == [pytest.approx(2.0, rel=1e-9)]


def test_nmean_writes_trace(capsys):
    exit_code, out, _ = run(capsys, 'nmean', '--method', 'alm', '--kernel', 'harmonic',
                            '--trace', 'test_files/trace.testresult.json', '--trace-full',
                            'test_files/scalar_1.json', 'test_files/scalar_2.json', 'test_files/scalar_4.json')
    assert exit_code == 0
    assert json.loads(out)['data'] == [pytest.approx(12.0 / 7.0, rel=1e-9)]
    with open('test_files/trace.testresult.json', 'r', encoding='utf-8') as trace_file:
        trace = json.load(trace_file)
    os.remove('test_files/trace.testresult.json')
    assert trace['method'] == 'ALM'
    assert trace['converged'] is True
    assert set(trace['steps'][0]) == {'l', 'a', 'e', 'r_diam', 'iterates'}
    assert trace['steps'][0]['a'] == pytest.approx(21.0)


def test_nmean_max_iters_exceeded(capsys):
    exit_code, out, err = run(capsys, 'nmean', '--kernel', 'geometric', '--max-iters', '1',
                              '--trace', 'test_files/partial.testresult.json',
                              'test_files/spd_2x2.json', 'test_files/diag_1_4.json', 'test_files/diag_4_1.json')
    assert exit_code == 1
    assert out == ''
    assert 'did not converge' in err
    with open('test_files/partial.testresult.json', 'r', encoding='utf-8') as trace_file:
        trace = json.load(trace_file)
    os.remove('test_files/partial.testresult.json')
    assert trace['converged'] is False
    assert len(trace['steps']) == 2


def test_nmean_too_many_variables(capsys):
    exit_code, _, err = run(capsys, 'nmean', '--max-variables', '2', 'test_files/scalar_1.json',
                            'test_files/scalar_2.json', 'test_files/scalar_3.json')
    assert exit_code == 2
    assert 'max-variables' in err


def test_dimension_mismatch_is_a_computational_failure(capsys):
    exit_code, _, err = run(capsys, 'mean2', 'test_files/spd_2x2.json', 'test_files/spd_3x3.json')
    assert exit_code == 1
    assert 'Dimension mismatch' in err


@pytest.mark.parametrize('argv', [
    ['mean2', '--kernel', 'median', 'test_files/scalar_1.json', 'test_files/scalar_2.json'],
    ['mean2', 'test_files/scalar_1.json', 'test_files/thisfiledoesnotexist.json'],
    ['mean2', 'test_files/scalar_1.json', 'test_files/bad_length.json'],
    ['mean2', 'test_files/spd_2x2.json', 'test_files/not_positive.json'],
    ['mean2', 'test_files/scalar_1.json'],
    ['karcher', 'test_files/scalar_1.json'],
    [],
    ['nmean', '--tol', '-1', 'test_files/scalar_1.json', 'test_files/scalar_2.json'],
    ['verify', '--check', 'order', '--spread', '2'],
])
def test_usage_errors(capsys, argv):
    exit_code, out, _ = run(capsys, *argv)
    assert exit_code == 2
    assert out == ''


def test_out_file(capsys):
    exit_code, out, _ = run(capsys, 'mean2', '--kernel', 'arithmetic', '--out', 'test_files/out.testresult.json',
                            'test_files/scalar_1.json', 'test_files/scalar_3.json')
    assert exit_code == 0
    assert out == ''
    with open('test_files/out.testresult.json', 'r', encoding='utf-8') as out_file:
        assert json.load(out_file)['data'] == [2]
    os.remove('test_files/out.testresult.json')


def test_output_is_deterministic(capsys):
    argv = ['nmean', '--method', 'bmp', '--kernel', 'geometric', 'test_files/spd_3x3.json',
            'test_files/spd_3x3.json', 'test_files/spd_3x3.json']
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second
    assert first[0] == 0


def test_verify_sandwich(capsys):
    exit_code, out, _ = run(capsys, 'verify', '--check', 'sandwich', '--kernel', 'geometric', '--samples', '10')
    assert exit_code == 0
    report = json.loads(out)
    assert report['check'] == 'sandwich'
    assert report['passed'] is True
    assert report['samples'] == 10


def test_verify_b2(capsys):
    exit_code, out, _ = run(capsys, 'verify', '--check', 'b2', '--kernel', 'harmonic')
    assert exit_code == 0
    assert json.loads(out)['b2_estimate'] == pytest.approx(-0.25, abs=0.002)


def test_verify_lyapunov(capsys):
    exit_code, out, _ = run(capsys, 'verify', '--check', 'lyapunov', '--kernel', 'geometric', '--method', 'bmp')
    assert exit_code == 0
    assert json.loads(out)['violations'] == 0


def test_verify_trace_inequality(capsys):
    exit_code, out, _ = run(capsys, 'verify', '--check', 'trace-ineq', '--kernel', 'kfamily:1', '-k', '1',
                            '-t', '0.25', '--samples', '10')
    assert exit_code == 0
    assert json.loads(out)['passed'] is True


def test_rate(capsys):
    exit_code, out, _ = run(capsys, 'rate', '--method', 'alm', '--kernel', 'geometric', '--tol', '1e-13',
                            'test_files/scalar_1.json', 'test_files/scalar_2.json', 'test_files/scalar_8.json')
    assert exit_code == 0
    report = json.loads(out)
    assert report['method'] == 'ALM'
    assert 0.8 <= report['fitted_order'] <= 1.3
