import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankbs import staralg as sa
from rankbs.coeffs import Coefficient
from rankbs.errors import ParseError
from rankbs.kgraph import Path
from rankbs.parsing import SessionConfig, parse_expression, parse_path, preset_doc
from rankbs.selfsim import from_json, make_odometer, make_product_of_odometers

E23 = make_odometer(2, 3)
D23 = make_product_of_odometers((2, 3))


def test_parse_path_examples():
    assert parse_path(E23, "e[1] e[0]") == Path(((1, 0),))
    assert parse_path(E23, "x1[1]") == Path(((1,),))
    # 1 + 0*3 = 1 + 0*2, so x2[1] x1[0] = x1[1] x2[0]
    assert parse_path(D23, "x2[1] x1[0]") == D23.graph.path((1,), (0,))
    for empty in ("", "()", "∅"):
        assert parse_path(D23, empty) == Path.empty(2)


@pytest.mark.parametrize("text", ["e[0]", "x3[0]", "x1[2]", "x1[0] junk", "x1[0"])
def test_parse_path_errors(text):
    with pytest.raises(ParseError):
        parse_path(D23, text)


def test_parse_expression_examples():
    A = parse_expression(D23, "(1/6)·√2 * s[x1[0] x2[1]] * u[a^3] * s[x1[1]]^*")
    mu = parse_path(D23, "x1[0] x2[1]")
    expect = sa.mono(mu, 3, parse_path(D23, "x1[1]"), Coefficient.sqrt(2) * Fraction(1, 6))
    assert A == expect
    assert parse_expression(E23, "u[a] s[e[1]]") == sa.mono(Path(((0,),)), 3, Path.empty(1))
    assert parse_expression(E23, "u[1]") == sa.one(E23)
    assert parse_expression(E23, "u[a^(-2)]") == sa.u(E23, -2)
    assert parse_expression(E23, "-i + 2") == sa.one(E23).scale(Coefficient.gaussian(2, -1))
    assert parse_expression(E23, "sqrt(8)") == sa.one(E23).scale(Coefficient.sqrt(8))
    B = parse_expression(E23, "(s[e[0]] + s[e[1]])^*")
    assert B == sa.s_star(E23, Path(((0,),))) + sa.s_star(E23, Path(((1,),)))


@pytest.mark.parametrize("text", ["", "s[e[0]", "1/0", "u[b]", "s[e[0]] +", "2 ) 3", "√x", "@"])
def test_parse_expression_errors(text):
    with pytest.raises(ParseError):
        parse_expression(E23, text)


def test_combination_string_round_trip():
    rng = random.Random(8)
    for ss in (E23, D23):
        top = (2,) * ss.k
        for _ in range(40):
            A = sa.random_combination(ss, rng, top, 4, radicals=(2, 3))
            assert parse_expression(ss, str(A)) == A


def test_presets():
    assert preset_doc("odometer:2,3") == {"kind": "odometer", "n": 2, "m": 3}
    assert preset_doc("bs:2,-3") == {"kind": "odometer", "n": 2, "m": -3}
    assert preset_doc("po:2,3")["sizes"] == [2, 3]
    assert preset_doc("lambda1(2,4)") == {"kind": "lambda_one", "m": [2, 4]}
    assert preset_doc("gbs:2,3,3,5")["orbits"] == [[2, [0, 3]], [3, [0, 0, 5]]]
    assert preset_doc("flip")["graph"]["sizes"] == [2, 2]
    for name in ("odometer:2,3", "po:2,4", "lambda1:2,3", "gbs:2,3,3,5", "flip:3", "square"):
        from_json(preset_doc(name))
    for bad in ("odometer:2", "nope:1", "gbs:2,3,3", "square:2", "po"):
        with pytest.raises(ParseError):
            preset_doc(bad)


configs = st.builds(
    SessionConfig,
    action=st.sampled_from([preset_doc(p) for p in ("odometer:2,3", "po:2,4", "gbs:2,3,3,5")]),
    cap=st.integers(0, 10**9),
    depth=st.integers(0, 20),
    bound=st.integers(0, 20),
    seed=st.integers(0, 2**64 - 1),
    format=st.sampled_from(["text", "json"]),
)


@given(configs)
def test_session_config_round_trip(cfg):
    assert SessionConfig.loads(cfg.dumps()) == cfg
    assert json.loads(cfg.dumps()) == cfg.to_json()


def test_session_config_rejections():
    with pytest.raises(ParseError):
        SessionConfig.from_json({"seed": 1, "colour": 2})
    with pytest.raises(ParseError):
        SessionConfig(seed=2**64)
    with pytest.raises(ParseError):
        SessionConfig(depth=-1)
    with pytest.raises(ParseError):
        SessionConfig(cap=True)
    with pytest.raises(ParseError):
        SessionConfig(format="yaml")
    with pytest.raises(ParseError):
        SessionConfig(action={"n": 2})
    with pytest.raises(ParseError):
        SessionConfig.loads("{not json")
    with pytest.raises(ParseError):
        SessionConfig.loads("[1, 2]")
