import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from src.dsl.pipeline import PipelineExpr, bind_pipeline, format_pipeline, parse_angle, parse_pipeline
from src.errors import IndexOutOfRangeError, InputError, PipelineSyntaxError
from src.walk.operators import (
    OracleOperator,
    ReflectionOperator,
    SwapOperator,
    apply_pipeline,
    build_psi_matrix,
    make_phase_matrix,
)
from src.walk.state import initial_superposition, psi_state

DECIMAL = r"-?([0-9]{1,4}(\.[0-9]{0,4})?|\.[0-9]{1,4})"

decimals = st.from_regex(DECIMAL, fullmatch=True)
angles = st.one_of(
    st.just(""),
    st.just("(pi)"),
    decimals.map(lambda d: f"({d})"),
    decimals.map(lambda d: f"({d}*pi)"),
    decimals.filter(lambda d: float(d) != 0.0).map(lambda d: f"(pi/{d})"),
)
marksets = st.lists(st.integers(min_value=0, max_value=999), min_size=1, max_size=5).map(
    lambda ks: "{" + ",".join(str(k) for k in ks) + "}"
)
tokens = st.one_of(
    st.just("S"),
    angles.map(lambda a: "R" + a),
    st.tuples(st.sampled_from(["Q1", "Q2"]), marksets, angles).map("".join),
)
separators = st.text(alphabet=" \t\r\n", min_size=1, max_size=3)


@st.composite
def pipelines(draw):
    parts = draw(st.lists(tokens, min_size=1, max_size=8))
    text = parts[0]
    for part in parts[1:]:
        text += draw(separators) + part
    return draw(st.sampled_from(["", " ", "\n"])) + text + draw(st.sampled_from(["", " \t"]))


@given(pipelines())
@settings(max_examples=1000, deadline=None)
def test_round_trip(text):
    expr = parse_pipeline(text)
    formatted = format_pipeline(expr)
    again = parse_pipeline(formatted)
    assert again == expr
    assert format_pipeline(again) == formatted


@given(st.text(max_size=40))
@settings(max_examples=500, deadline=None)
def test_arbitrary_text_never_crashes(text):
    try:
        expr = parse_pipeline(text)
    except PipelineSyntaxError as e:
        assert 0 <= e.offset <= len(text.encode("utf-8"))
    else:
        assert isinstance(expr, PipelineExpr)


def test_parse_examples():
    expr = parse_pipeline("S R")
    assert [t.kind for t in expr.tokens] == ["S", "R"]
    assert expr.tokens[1].angle is None

    expr = parse_pipeline("S Q1{0,2} R")
    assert [t.kind for t in expr.tokens] == ["S", "Q1", "R"]
    assert expr.tokens[1].marked == (0, 2)

    expr = parse_pipeline("S R(pi/2) S R(0.3*pi)")
    assert expr.tokens[1].angle.value == math.pi / 2
    assert expr.tokens[3].angle.value == 0.3 * math.pi
    assert format_pipeline(expr) == "S R(pi/2) S R(0.3*pi)"


@pytest.mark.parametrize(
    "text,offset",
    [("S X R", 2), ("Q3{1}", 0), ("R(pi/0)", 5), ("", 0), ("S R(pi", None), ("Q1{} R", None)],
)
def test_malformed_text_reports_offset(text, offset):
    with pytest.raises(PipelineSyntaxError) as excinfo:
        parse_pipeline(text)
    assert isinstance(excinfo.value, InputError)
    if offset is not None:
        assert excinfo.value.offset == offset
    assert f"at byte {excinfo.value.offset}" in str(excinfo.value)


def test_parse_angle():
    assert parse_angle("pi") == math.pi
    assert parse_angle("pi/2") == math.pi / 2
    assert parse_angle(" 0.3*pi ") == 0.3 * math.pi
    assert parse_angle("-1.25") == -1.25
    for bad in ["x", "pi) R(1", "2pi", ""]:
        with pytest.raises(PipelineSyntaxError):
            parse_angle(bad)


def test_bound_coined_walk_fixes_superposition(cycle2):
    u = bind_pipeline(parse_pipeline("S R"), cycle2)
    phi = initial_superposition(build_psi_matrix(cycle2))
    assert_allclose(apply_pipeline(apply_pipeline(phi, u), u).entries, phi.entries, atol=1e-15)


def test_zero_phase_binding_equals_plain(random_graph):
    g = random_graph(4, seed=1)
    plain = bind_pipeline(parse_pipeline("R"), g)
    zero = bind_pipeline(parse_pipeline("R"), g, make_phase_matrix(np.zeros((4, 4))))
    phi = psi_state(build_psi_matrix(g), 2)
    assert_array_equal(apply_pipeline(phi, plain).entries, apply_pipeline(phi, zero).entries)


def test_double_step_equals_two_coined_steps(random_graph):
    g = random_graph(5, seed=2)
    u = bind_pipeline(parse_pipeline("S R"), g)
    w = bind_pipeline(parse_pipeline("S R S R"), g)
    phi = psi_state(build_psi_matrix(g), 0)
    assert_allclose(apply_pipeline(phi, w).entries, apply_pipeline(apply_pipeline(phi, u), u).entries, atol=1e-14)


def test_explicit_pi_is_the_sign_flip_path(random_graph):
    g = random_graph(4, seed=3)
    phi = psi_state(build_psi_matrix(g), 1)
    implicit = bind_pipeline(parse_pipeline("S Q2{1} R"), g)
    explicit = bind_pipeline(parse_pipeline("S Q2{1}(pi) R(pi)"), g)
    assert_array_equal(apply_pipeline(phi, implicit).entries, apply_pipeline(phi, explicit).entries)


def test_binding_builds_operators(random_graph):
    u = bind_pipeline(parse_pipeline("S Q1{0,3}(pi/4) R R"), random_graph(4))
    s, q, r1, r2 = u.ops
    assert isinstance(s, SwapOperator)
    assert isinstance(q, OracleOperator) and q.marked == frozenset({0, 3}) and q.target_register == 1
    assert isinstance(r1, ReflectionOperator)
    assert r1 is r2


def test_apply_order_left_reverses(random_graph):
    g = random_graph(3)
    u = bind_pipeline(parse_pipeline("S Q2{0}"), g, apply_order="left")
    assert [type(op) for op in u.ops] == [OracleOperator, SwapOperator]
    with pytest.raises(InputError):
        bind_pipeline(parse_pipeline("S"), g, apply_order="backwards")


def test_marked_nodes_checked_at_binding(random_graph):
    expr = parse_pipeline("S Q1{0,7} R")
    with pytest.raises(IndexOutOfRangeError):
        bind_pipeline(expr, random_graph(4))
    assert len(bind_pipeline(expr, random_graph(8)).ops) == 3
