"""
Mini-grammar for profile, surface and boundary-function expressions

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom (('^' | '**') unary)?
    atom   := NUMBER | CONSTANT | VARIABLE | FUNCTION '(' expr ')' | '(' expr ')'

Functions: sin cos tan sinh cosh tanh exp log sqrt abs.  Constants: pi e.
The parser builds sympy expressions, so derivatives are exact; evaluation goes
through lambdify on numpy.
"""

import re
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

import numpy as np
import sympy as sp

from models.errors import ExpressionError

Number = Union[float, np.ndarray]

FUNCTIONS = {
    'sin': sp.sin,
    'cos': sp.cos,
    'tan': sp.tan,
    'sinh': sp.sinh,
    'cosh': sp.cosh,
    'tanh': sp.tanh,
    'exp': sp.exp,
    'log': sp.log,
    'sqrt': sp.sqrt,
    'abs': sp.Abs,
}

CONSTANTS = {'pi': sp.pi, 'e': sp.E}

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)"
                    r"|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _number(text: str) -> sp.Rational:
    # exact decimal, so lambdify reproduces float(text)
    value = Fraction(text)
    return sp.Rational(value.numerator, value.denominator)


class _Parser:
    """Recursive-descent parser over a token list"""

    def __init__(self, source: str, variables: Sequence[str]):
        self.source = source
        self.symbols = {name: sp.Symbol(name, real=True) for name in variables}
        self.tokens = self._tokenize(source)
        self.pos = 0

    def _tokenize(self, source: str) -> List[Tuple[str, str, int]]:
        tokens = []
        index = 0
        stripped = source.rstrip()
        while index < len(stripped):
            match = _TOKEN.match(stripped, index)
            if not match or match.end() == index:
                raise ExpressionError("unexpected character", source, index)
            number, name, op = match.groups()
            start = match.start(1 if number else 2 if name else 3)
            if number is not None:
                tokens.append(('num', number, start))
            elif name is not None:
                tokens.append(('name', name, start))
            else:
                tokens.append(('op', op, start))
            index = match.end()
        return tokens

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _take(self):
        token = self._peek()
        self.pos += 1
        return token

    def _expect(self, value: str):
        token = self._take()
        if token is None or token[1] != value:
            where = token[2] if token else len(self.source)
            raise ExpressionError(f"expected '{value}'", self.source, where)

    def parse(self) -> sp.Expr:
        if not self.tokens:
            raise ExpressionError("empty expression", self.source, 0)
        node = self._expr()
        if self._peek() is not None:
            raise ExpressionError("unexpected token", self.source, self._peek()[2])
        return node

    def _expr(self) -> sp.Expr:
        node = self._term()
        while self._peek() is not None and self._peek()[1] in ('+', '-'):
            op = self._take()[1]
            rhs = self._term()
            node = node + rhs if op == '+' else node - rhs
        return node

    def _term(self) -> sp.Expr:
        node = self._unary()
        while self._peek() is not None and self._peek()[1] in ('*', '/'):
            op = self._take()[1]
            rhs = self._unary()
            node = node * rhs if op == '*' else node / rhs
        return node

    def _unary(self) -> sp.Expr:
        token = self._peek()
        if token is not None and token[0] == 'op' and token[1] in ('-', '+'):
            self._take()
            operand = self._unary()
            return -operand if token[1] == '-' else operand
        return self._power()

    def _power(self) -> sp.Expr:
        base = self._atom()
        token = self._peek()
        if token is not None and token[1] in ('^', '**'):
            self._take()
            return sp.Pow(base, self._unary())
        return base

    def _atom(self) -> sp.Expr:
        token = self._take()
        if token is None:
            raise ExpressionError("unexpected end of expression", self.source, len(self.source))
        kind, text, where = token
        if kind == 'num':
            return _number(text)
        if kind == 'name':
            if text in FUNCTIONS:
                self._expect('(')
                arg = self._expr()
                self._expect(')')
                return FUNCTIONS[text](arg)
            if text in CONSTANTS:
                return CONSTANTS[text]
            if text in self.symbols:
                return self.symbols[text]
            raise ExpressionError(f"unknown name '{text}'", self.source, where)
        if text == '(':
            node = self._expr()
            self._expect(')')
            return node
        raise ExpressionError(f"unexpected '{text}'", self.source, where)


class Expression:
    """Parsed expression of one variable, callable on floats and numpy arrays"""

    def __init__(self, expr: sp.Expr, variable: str, source: str = ""):
        self.expr = expr
        self.variable = variable
        self.symbol = sp.Symbol(variable, real=True)
        self.source = source or str(expr)
        self._func = sp.lambdify(self.symbol, expr, "numpy")

    def __call__(self, x: Number) -> Number:
        with np.errstate(divide='ignore', invalid='ignore'):
            value = self._func(x)
        if np.ndim(x) and np.ndim(value) == 0:
            return np.full(np.shape(x), float(value))
        return value

    def derivative(self) -> "Expression":
        return Expression(sp.diff(self.expr, self.symbol), self.variable,
                          source=f"d/d{self.variable}[{self.source}]")

    @property
    def is_constant(self) -> bool:
        return self.symbol not in self.expr.free_symbols

    def __repr__(self):
        return f"Expression({self.source!r})"


def parse_expression(source: str, variable: str = 't') -> Expression:
    """Parse a single-variable expression; raises ExpressionError on bad input"""
    if not isinstance(source, str):
        raise ExpressionError(f"expression must be a string, got {type(source).__name__}")
    expr = _Parser(source, (variable,)).parse()
    return Expression(expr, variable, source)
