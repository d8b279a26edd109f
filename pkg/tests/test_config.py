import pytest
from hypothesis import given
import hypothesis.strategies as st

from cylred.config import (ConfigError, ModelConfig, build_model, bundled_names, dumps, parse_config, parse_text)
from cylred.lie import CocycleError
from cylred.models import ExpressionModel, MagneticCotangentModel
from cylred.scalars import format_scalar

from strategies import scalars


def test_bundled_configs_present():
    names = bundled_names()
    for n in ("t4_example", "t2xt2_example", "t2_area", "zero_sigma_t4", "t2_magnetic", "corrupted_h3"):
        assert n in names


@pytest.mark.parametrize("name", bundled_names())
def test_round_trip(name):
    cfg = parse_config(name)
    assert parse_text(dumps(cfg)) == cfg


def test_t4_config_builds_the_magnetic_model():
    m = build_model(parse_config("t4_example"))
    assert isinstance(m, MagneticCotangentModel) and m.alg_dim == 4 and m.d == 2
    assert format_scalar(m.cocycle.matrix[0][3]) == "0 + -1*sqrt(2)"


def test_toy_config():
    m = build_model(parse_config("t2xt2_example"))
    assert isinstance(m, ExpressionModel) and m.chart_dim == 4 and m.alg_dim == 1


def test_empty_sigma_is_zero():
    m = build_model(parse_config("zero_sigma_t4"))
    assert m.cocycle.is_zero()


def test_corrupted_cocycle_fails_at_construction():
    cfg = parse_config("corrupted_h3")
    with pytest.raises(CocycleError):
        build_model(cfg)


def test_all_diagnostics_reported():
    text = '''
name = "bad"
field = 2
[group]
torus_rank = 2
[cocycle]
sigma = [["0", "1/"], ["1", "zz"]]
'''
    with pytest.raises(ConfigError) as err:
        parse_text(text)
    diags = err.value.diagnostics
    assert len(diags) == 2
    assert diags[0].startswith("line 7, column")


def test_non_antisymmetric_sigma():
    text = 'field = 0\n[group]\ntorus_rank = 2\n[cocycle]\nsigma = [["0", "1"], ["1", "0"]]\n'
    with pytest.raises(ConfigError, match="antisymmetric"):
        parse_text(text)


def test_inconsistent_dimensions():
    text = 'field = 0\nnu0 = ["1"]\n[group]\ntorus_rank = 2\n[cocycle]\nsigma = [["0", "1"]]\n'
    with pytest.raises(ConfigError) as err:
        parse_text(text)
    assert len(err.value.diagnostics) == 2


def test_toml_syntax_error_has_position():
    with pytest.raises(ConfigError, match="line 2"):
        parse_text('name = "x"\nfield = = 2\n')


def test_missing_config():
    with pytest.raises(FileNotFoundError):
        parse_config("no_such_model")


@given(st.integers(1, 3), st.data())
def test_round_trip_random_magnetic(n, data):
    upper = {(i, j): data.draw(scalars()) for i in range(n) for j in range(i + 1, n)}
    rows = [[format_scalar(upper[i, j]) if i < j else format_scalar(-upper[j, i]) if j < i else "0"
             for j in range(n)] for i in range(n)]
    nu0 = [format_scalar(data.draw(scalars())) for _ in range(n)]
    text = f'name = "r"\nfield = 2\nnu0 = {nu0!r}\n[group]\ntorus_rank = {n}\n[cocycle]\nsigma = {rows!r}\n'
    cfg = parse_text(text.replace("'", '"'))
    assert parse_text(dumps(cfg)) == cfg
    build_model(cfg)
