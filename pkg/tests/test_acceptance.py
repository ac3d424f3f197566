"""The ten acceptance criteria at their stated tolerances, seed 7, full sample counts."""

import pytest

from intrinsica.experiments import (
    CRITERIA,
    DEFAULT_SEED,
    ExperimentConfig,
    SuiteContext,
    _timed,
    determinism_check,
    write_tables,
)


@pytest.fixture(scope="session")
def config():
    return ExperimentConfig.from_env(seed=DEFAULT_SEED, scale=1.0)


@pytest.fixture(scope="session")
def context(config):
    return SuiteContext(config)


@pytest.fixture(scope="session")
def results(context):
    return {}


@pytest.fixture(scope="session")
def tables(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def _record(res, log):
    line = res.line() + f" ({res.seconds:.1f}s)"
    print(line)
    log.append(line)
    return res


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, context, results, tables, acceptance_log):
    res = _record(_timed(number, CRITERIA[number], context), acceptance_log)
    results[number] = res
    write_tables([res], tables)
    assert res.passed, res.detail


def test_criterion_10_determinism(config, results, tables, acceptance_log):
    missing = sorted(set(CRITERIA) - set(results))
    if missing:
        for n in missing:
            results[n] = _timed(n, CRITERIA[n], SuiteContext(config))
        write_tables([results[n] for n in missing], tables)
    res = _record(determinism_check(config, tables, sorted(CRITERIA)), acceptance_log)
    assert res.passed, res.detail
