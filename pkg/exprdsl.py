#!/usr/bin/env python3
"""
Text form of operator polynomials (expression grammar v1).

    expr    := [sign] term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := scalar | atom | '(' expr ')'
    scalar  := digits ['.' digits] ['/' digits] ['i']
    atom    := 'a[' pol ',' mode ']' | 'ad[' pol ',' mode ']'

`ad` is the daggered symbol, pol is 0..3, mode a nonnegative index.
Whitespace is insignificant. Decimal scalars are read by place value, so
"0.25" is exactly 1/4. Products keep their written order.

format() writes the canonical text: terms sorted by word (daggered symbols
first, then mode, then pol), constant last, rational coefficients exact and
complex ones parenthesised. parse(format(p)) == p for rational coefficients.
"""

import logging
from decimal import Decimal
from functools import reduce
from pathlib import Path
from typing import List, Tuple

import pyparsing as pp
import sympy as sp

from errors import ExprSyntaxError
from opalgebra import LadderSymbol, OperatorPoly, multiply

logger = logging.getLogger(__name__)

MAX_INPUT_BYTES = 64 * 1024
MAX_NESTING = 32
NON_RATIONAL_DIGITS = 17


def _scalar_action(s, loc, tokens):
    text = tokens[0]
    imaginary = text.endswith("i")
    if imaginary:
        text = text[:-1]
    numerator, _, denominator = text.partition("/")
    value = sp.Rational(numerator)
    if denominator:
        if int(denominator) == 0:
            raise pp.ParseFatalException(s, loc, "division by zero")
        value = value / sp.Integer(denominator)
    return OperatorPoly.scalar(value * sp.I if imaginary else value)


def _atom_action(s, loc, tokens):
    name, pol, mode = tokens[0], int(tokens[1]), int(tokens[2])
    if pol > 3:
        raise pp.ParseFatalException(s, loc, f"polarization index {pol} out of range 0..3")
    return OperatorPoly.symbol(LadderSymbol(mode, pol, name == "ad"))


def _term_action(tokens):
    return reduce(multiply, tokens)


def _expr_action(tokens):
    items = list(tokens)
    sign = 1
    if isinstance(items[0], str):
        sign = -1 if items.pop(0) == "-" else 1
    total = items[0] * sign
    for op, operand in zip(items[1::2], items[2::2]):
        total = total + operand if op == "+" else total - operand
    return total


def _build_grammar() -> pp.ParserElement:
    expr = pp.Forward()
    scalar = pp.Regex(r"\d+(\.\d+)?(/\d+)?i?").set_name("scalar").set_parse_action(_scalar_action)
    atom = (
        pp.Regex(r"ad|a")("name")
        + pp.Suppress("[") + pp.Word(pp.nums)("pol") + pp.Suppress(",") + pp.Word(pp.nums)("mode") + pp.Suppress("]")
    ).set_name("ladder atom").set_parse_action(_atom_action)
    factor = scalar | atom | (pp.Suppress("(") + expr + pp.Suppress(")"))
    term = (factor + pp.ZeroOrMore(pp.Suppress("*") + factor)).set_parse_action(_term_action)
    sign = pp.one_of("+ -")
    expr <<= (pp.Optional(sign) + term + pp.ZeroOrMore(sign + term)).set_parse_action(_expr_action)
    return expr


_GRAMMAR = _build_grammar()


def _check_nesting(text: str) -> None:
    depth, line, column = 0, 1, 0
    for ch in text:
        column += 1
        if ch == "\n":
            line, column = line + 1, 0
        elif ch == "(":
            depth += 1
            if depth > MAX_NESTING:
                raise ExprSyntaxError(f"parentheses nested deeper than {MAX_NESTING}", line, column)
        elif ch == ")":
            depth -= 1


def parse(text: str) -> OperatorPoly:
    if len(text.encode("utf-8")) > MAX_INPUT_BYTES:
        raise ExprSyntaxError(f"expression exceeds {MAX_INPUT_BYTES} bytes")
    _check_nesting(text)
    try:
        result = _GRAMMAR.parse_string(text, parse_all=True)
    except pp.ParseBaseException as e:
        raise ExprSyntaxError(e.msg, e.lineno, e.col) from None
    return result[0]


def _word_key(word) -> Tuple[bool, Tuple[Tuple[int, int, int], ...]]:
    return (len(word) == 0, tuple((0 if s.dagger else 1, s.mode, s.pol) for s in word))


def _decimal(value: sp.Expr) -> str:
    return f"{Decimal(str(sp.N(value, NON_RATIONAL_DIGITS))):f}"


def _real(value: sp.Expr) -> str:
    if value.is_Rational:
        return str(value)
    return _decimal(value)


def _magnitude(value: sp.Expr) -> Tuple[int, str]:
    """Split a coefficient into a sign and the text of its magnitude"""
    re, im = sp.re(value), sp.im(value)
    if im == 0:
        return (-1 if re < 0 else 1), _real(abs(re))
    if re == 0:
        return (-1 if im < 0 else 1), f"{_real(abs(im))}i"
    sign = "-" if im < 0 else "+"
    return 1, f"({_real(re)} {sign} {_real(abs(im))}i)"


def _symbol_text(sym: LadderSymbol, unicode: bool) -> str:
    if unicode:
        return f"a{'†' if sym.dagger else ''}[{sym.pol},{sym.mode}]"
    return f"{'ad' if sym.dagger else 'a'}[{sym.pol},{sym.mode}]"


def format(p: OperatorPoly, unicode: bool = False) -> str:
    """Canonical text; the unicode form (a†, ·) is for display only"""
    if p.is_zero():
        return "0"
    times = "·" if unicode else "*"
    pieces: List[str] = []
    for word in sorted(p.terms, key=_word_key):
        sign, magnitude = _magnitude(p.terms[word])
        factors = [_symbol_text(s, unicode) for s in word]
        if magnitude != "1" or not factors:
            factors.insert(0, magnitude)
        body = times.join(factors)
        if not pieces:
            pieces.append(f"-{body}" if sign < 0 else body)
        else:
            pieces.append(f"{'-' if sign < 0 else '+'} {body}")
    return " ".join(pieces)


def load_corpus(path: Path) -> List[OperatorPoly]:
    """One expression per line; blank lines and '#' comments are skipped"""
    expressions = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                expressions.append(parse(text))
            except ExprSyntaxError as e:
                raise ExprSyntaxError(f"{path}: {e.message}", lineno, e.column) from None
    logger.info(f"Loaded {len(expressions)} expressions from {path}")
    return expressions
