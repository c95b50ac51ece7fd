"""
Textual language for unitary pipelines.

    pipeline := token+                      (whitespace separated)
    token    := "S" | "R" angle? | ("Q1" | "Q2") markset angle?
    markset  := "{" int ("," int)* "}"
    angle    := "(" expr ")"
    expr     := decimal | "pi" | decimal "*" "pi" | "pi/" decimal

Tokens are in operator notation: the leftmost token is applied last, so
"S R" is U = S R.
"""
import logging
import math
from typing import Literal, Optional, Tuple

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError
from pydantic import BaseModel, ConfigDict

from src.errors import IndexOutOfRangeError, InputError, PipelineSyntaxError
from src.graph.transition import TransitionMatrix
from src.walk.operators import (
    PhaseMatrix,
    ReflectionOperator,
    SwapOperator,
    UnitaryPipeline,
    build_psi_matrix,
    make_oracle,
    make_pipeline,
)

logger = logging.getLogger(__name__)

GRAMMAR = r"""
    start: _WS? token (_WS token)* _WS?

    ?token: swap | reflection | oracle
    swap: "S"
    reflection: "R" angle?
    oracle: ORACLE markset angle?
    markset: "{" NODE ("," NODE)* "}"
    angle: "(" expr ")"

    ?expr: DECIMAL             -> decimal
         | "pi"                -> pi
         | DECIMAL "*" "pi"    -> mul_pi
         | "pi/" DECIMAL       -> div_pi

    ORACLE: "Q1" | "Q2"
    NODE: /[0-9]+/
    DECIMAL: /-?([0-9]+(\.[0-9]*)?|\.[0-9]+)/
    _WS: /[ \t\r\n]+/
"""

_parser = Lark(GRAMMAR, parser="lalr", propagate_positions=False)


class AngleExpr(BaseModel):
    """An angle as written: `number` keeps the literal text so formatting is exact."""

    model_config = ConfigDict(frozen=True)

    form: Literal["decimal", "pi", "mul_pi", "div_pi"]
    number: Optional[str] = None

    @property
    def value(self) -> float:
        if self.form == "pi":
            return math.pi
        if self.form == "decimal":
            return float(self.number)
        if self.form == "mul_pi":
            return float(self.number) * math.pi
        return math.pi / float(self.number)

    def format(self) -> str:
        if self.form == "pi":
            return "pi"
        if self.form == "decimal":
            return self.number
        if self.form == "mul_pi":
            return f"{self.number}*pi"
        return f"pi/{self.number}"


class PipelineToken(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["S", "R", "Q1", "Q2"]
    angle: Optional[AngleExpr] = None
    marked: Optional[Tuple[int, ...]] = None

    def format(self) -> str:
        text = self.kind
        if self.marked is not None:
            text += "{" + ",".join(str(k) for k in self.marked) + "}"
        if self.angle is not None:
            text += f"({self.angle.format()})"
        return text


class PipelineExpr(BaseModel):
    model_config = ConfigDict(frozen=True)

    tokens: Tuple[PipelineToken, ...]


class _ToExpr(Transformer):
    def start(self, tokens):
        return PipelineExpr(tokens=tuple(tokens))

    def swap(self, _):
        return PipelineToken(kind="S")

    def reflection(self, children):
        return PipelineToken(kind="R", angle=children[0] if children else None)

    def oracle(self, children):
        kind, marked = children[0], children[1]
        angle = children[2] if len(children) > 2 else None
        return PipelineToken(kind=str(kind), marked=marked, angle=angle)

    def markset(self, nodes):
        return tuple(int(k) for k in nodes)

    def angle(self, children):
        return children[0]

    @v_args(inline=True)
    def decimal(self, number):
        return AngleExpr(form="decimal", number=str(number))

    def pi(self, _):
        return AngleExpr(form="pi")

    @v_args(inline=True)
    def mul_pi(self, number):
        return AngleExpr(form="mul_pi", number=str(number))

    @v_args(inline=True)
    def div_pi(self, number: Token):
        if float(number) == 0.0:
            raise PipelineSyntaxError("angle divisor must be nonzero", number.start_pos)
        return AngleExpr(form="div_pi", number=str(number))


def _byte_offset(text: str, char_pos: Optional[int]) -> int:
    if char_pos is None or char_pos < 0 or char_pos > len(text):
        char_pos = len(text)
    return len(text[:char_pos].encode("utf-8"))


def _parse(text: str):
    try:
        tree = _parser.parse(text)
        return _ToExpr().transform(tree)
    except UnexpectedInput as e:
        pos = getattr(e, "pos_in_stream", None)
        message = str(e).strip().splitlines()[0] if str(e).strip() else "unexpected input"
        raise PipelineSyntaxError(f"invalid pipeline: {message}", _byte_offset(text, pos), text) from None
    except VisitError as e:
        if isinstance(e.orig_exc, PipelineSyntaxError):
            raise PipelineSyntaxError(
                "invalid pipeline: angle divisor must be nonzero", _byte_offset(text, e.orig_exc.offset), text
            ) from None
        raise


def parse_pipeline(text: str) -> PipelineExpr:
    """
    Parse pipeline text. Malformed text raises PipelineSyntaxError carrying the
    byte offset of the failure; node indices are checked later, at binding.
    """
    if not isinstance(text, str):
        raise PipelineSyntaxError("pipeline text must be a string", 0)
    return _parse(text)


def parse_angle(text: str) -> float:
    """Evaluate a lone angle expression such as 'pi/2' or '0.3*pi'."""
    try:
        expr = parse_pipeline(f"R({text.strip()})")
    except PipelineSyntaxError as e:
        # offsets are relative to the stripped angle text
        raise PipelineSyntaxError(f"invalid angle expression {text!r}", max(e.offset - 2, 0), text) from None
    if len(expr.tokens) != 1 or expr.tokens[0].angle is None:
        raise PipelineSyntaxError(f"invalid angle expression {text!r}", 0, text)
    return expr.tokens[0].angle.value


def format_pipeline(expr: PipelineExpr) -> str:
    return " ".join(token.format() for token in expr.tokens)


def bind_pipeline(
    expr: PipelineExpr,
    g: TransitionMatrix,
    theta: Optional[PhaseMatrix] = None,
    apply_order: Literal["operator", "left"] = "operator",
) -> UnitaryPipeline:
    """
    Build operator objects for a parsed pipeline on graph g.

    Args:
        expr: parsed pipeline
        g: transition matrix for the reflections
        theta: optional phase extension of the |psi_i> states
        apply_order: 'operator' (leftmost applied last) or 'left' (leftmost applied first)

    Returns:
        UnitaryPipeline
    """
    if apply_order not in ("operator", "left"):
        raise InputError(f"apply order must be 'operator' or 'left', got {apply_order!r}")
    n = g.n
    psi = build_psi_matrix(g, theta)
    reflections = {}
    ops = []
    for token in expr.tokens:
        angle = token.angle.value if token.angle is not None else math.pi
        if token.kind == "S":
            ops.append(SwapOperator())
        elif token.kind == "R":
            if angle not in reflections:
                reflections[angle] = ReflectionOperator(psi=psi, apr_angle=angle)
            ops.append(reflections[angle])
        else:
            bad = [k for k in token.marked if k >= n]
            if bad:
                raise IndexOutOfRangeError(f"{token.format()}: marked nodes {bad} out of range for N={n}")
            ops.append(make_oracle(n, token.marked, register=int(token.kind[1]), angle=angle))
    if apply_order == "left":
        ops.reverse()
    pipeline = make_pipeline(ops)
    logger.debug(f"Bound pipeline {format_pipeline(expr)!r} on N={n}")
    return pipeline
