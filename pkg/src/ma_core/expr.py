# Homothetic MA - numerical analysis of homogeneous Monge-Ampere solutions
# Copyright (C) 2024 Kostas Patsis
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""
Expression trees for multivariate real functions.

This module parses user-supplied formulas into immutable Expr trees, prints
them back in fully parenthesized form, substitutes variables, and evaluates
a tree over any scalar-like algebra (plain floats here, second-order jets in
ma_core.jets).

Grammar::

    expr    := term { ("+"|"-") term }
    term    := factor { ("*"|"/") factor }
    factor  := unary [ "^" factor ]
    unary   := "-" unary | primary
    primary := NUMBER | IDENT | IDENT "(" expr { "," expr } ")" | "(" expr ")"
"""

import math
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import (
    Any,
    Dict,
    FrozenSet,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Protocol,
    Sequence,
    Tuple,
    TypeVar,
)

from ma_core.errors import (
    ArityError,
    ArityMismatch,
    DomainError,
    ExprSyntaxError,
    NestingTooDeep,
    UnknownIdentifier,
)

T = TypeVar("T")

# Integer exponents up to this magnitude use repeated multiplication.
MAX_INTEGER_POWER = 1024
# deepest tree accepted by parse and evaluate
MAX_DEPTH = 200


class Kind(Enum):
    """Node kinds of an expression tree."""

    CONST = "const"
    VAR = "var"
    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"
    NEG = "neg"
    POW = "^"
    LN = "ln"
    EXP = "exp"
    SQRT = "sqrt"


BUILTINS: Dict[str, Kind] = {"ln": Kind.LN, "exp": Kind.EXP, "sqrt": Kind.SQRT}

_BINARY = (Kind.ADD, Kind.SUB, Kind.MUL, Kind.DIV, Kind.POW)
_UNARY = (Kind.NEG, Kind.LN, Kind.EXP, Kind.SQRT)


@dataclass(frozen=True)
class Expr:
    """Immutable expression node. Equality is structural."""

    kind: Kind
    children: Tuple["Expr", ...] = ()
    value: float = 0.0
    index: int = 0

    def __post_init__(self):
        if self.kind is Kind.CONST:
            if not math.isfinite(self.value):
                raise ValueError(f"Constants must be finite, got {self.value!r}")
        elif self.kind is Kind.VAR:
            if self.index < 0:
                raise ArityError(f"Variable index must be >= 0, got {self.index}")
        elif self.kind in _BINARY and len(self.children) != 2:
            raise ArityError(f"{self.kind.name} needs 2 children")
        elif self.kind in _UNARY and len(self.children) != 1:
            raise ArityError(f"{self.kind.name} needs 1 child")

    @cached_property
    def variables(self) -> FrozenSet[int]:
        if self.kind is Kind.VAR:
            return frozenset((self.index,))
        found: FrozenSet[int] = frozenset()
        for child in self.children:
            found = found | child.variables
        return found

    @property
    def n_vars(self) -> int:
        """Smallest arity that covers every variable of the tree."""
        return max(self.variables) + 1 if self.variables else 0

    @property
    def is_const(self) -> bool:
        return self.kind is Kind.CONST

    def __repr__(self) -> str:
        return f"Expr({to_text(self)})"

    def __str__(self) -> str:
        return to_text(self)

    # Operator sugar for building trees in code.

    def __add__(self, other):
        return _binary_sugar(add, self, other)

    def __radd__(self, other):
        return _binary_sugar(add, other, self)

    def __sub__(self, other):
        return _binary_sugar(sub, self, other)

    def __rsub__(self, other):
        return _binary_sugar(sub, other, self)

    def __mul__(self, other):
        return _binary_sugar(mul, self, other)

    def __rmul__(self, other):
        return _binary_sugar(mul, other, self)

    def __truediv__(self, other):
        return _binary_sugar(div, self, other)

    def __rtruediv__(self, other):
        return _binary_sugar(div, other, self)

    def __pow__(self, other):
        return _binary_sugar(pow_, self, other)

    def __rpow__(self, other):
        return _binary_sugar(pow_, other, self)

    def __neg__(self):
        return neg(self)


def as_expr(value: Any) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return const(float(value))
    raise TypeError(f"Cannot convert {type(value).__name__} to Expr")


def _binary_sugar(builder, left, right):
    try:
        return builder(as_expr(left), as_expr(right))
    except TypeError:
        return NotImplemented


# Builders. Every builder folds subtrees whose children are all literals.


def const(value: float) -> Expr:
    return Expr(Kind.CONST, value=float(value))


def var(index: int) -> Expr:
    return Expr(Kind.VAR, index=index)


def _build(kind: Kind, *children: Expr) -> Expr:
    node = Expr(kind, tuple(children))
    if not all(child.is_const for child in children):
        return node
    try:
        folded = evaluate(node, (), SCALAR)
    except (DomainError, ArityMismatch):
        return node
    return const(folded) if math.isfinite(folded) else node


def add(a: Expr, b: Expr) -> Expr:
    return _build(Kind.ADD, a, b)


def sub(a: Expr, b: Expr) -> Expr:
    return _build(Kind.SUB, a, b)


def mul(a: Expr, b: Expr) -> Expr:
    return _build(Kind.MUL, a, b)


def div(a: Expr, b: Expr) -> Expr:
    return _build(Kind.DIV, a, b)


def neg(a: Expr) -> Expr:
    return _build(Kind.NEG, a)


def pow_(a: Expr, b: Expr) -> Expr:
    return _build(Kind.POW, a, b)


def ln(a: Expr) -> Expr:
    return _build(Kind.LN, a)


def exp(a: Expr) -> Expr:
    return _build(Kind.EXP, a)


def sqrt(a: Expr) -> Expr:
    return _build(Kind.SQRT, a)


def sum_of(terms: Sequence[Expr]) -> Expr:
    if not terms:
        return const(0.0)
    total = terms[0]
    for term in terms[1:]:
        total = add(total, term)
    return total


def product_of(factors: Sequence[Expr]) -> Expr:
    if not factors:
        return const(1.0)
    total = factors[0]
    for factor in factors[1:]:
        total = mul(total, factor)
    return total


_BUILDERS = {
    Kind.ADD: add,
    Kind.SUB: sub,
    Kind.MUL: mul,
    Kind.DIV: div,
    Kind.NEG: neg,
    Kind.POW: pow_,
    Kind.LN: ln,
    Kind.EXP: exp,
    Kind.SQRT: sqrt,
}


# Variables


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


@dataclass(frozen=True)
class VarSpec:
    """Ordered, unique variable names; the position is the variable index."""

    names: Tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise ValueError("At least one variable is required")
        if len(set(names)) != len(names):
            raise ValueError(f"Variable names must be unique: {list(names)}")
        for name in names:
            if not _IDENT_RE.match(name):
                raise ValueError(f"Invalid variable name: {name!r}")
            if name in BUILTINS:
                raise ValueError(f"Variable name shadows builtin function: {name}")

    @property
    def arity(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    @classmethod
    def default(cls, n: int) -> "VarSpec":
        return cls(tuple(f"x{i + 1}" for i in range(n)))

    @classmethod
    def from_string(cls, text: str) -> "VarSpec":
        return cls(tuple(part.strip() for part in text.split(",") if part.strip()))


# Tokenizer


class _Token(NamedTuple):
    kind: str  # "number", "ident", "op", "end"
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.lastgroup is None:
            raise ExprSyntaxError(f"Unexpected character {text[pos]!r}", pos)
        start = match.start(match.lastgroup)
        tokens.append(_Token(match.lastgroup, match.group(match.lastgroup), start))
        pos = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


_PRIMARY_START = ("number", "identifier", "(", "-")


class _Parser:
    def __init__(self, text: str, variables: VarSpec, constants: Mapping[str, float]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = {name: i for i, name in enumerate(variables.names)}
        self.constants = dict(constants)

    @property
    def current(self) -> _Token:
        return self.tokens[self.i]

    def _accept(self, text: str) -> bool:
        if self.current.kind == "op" and self.current.text == text:
            self.i += 1
            return True
        return False

    def _expect(self, text: str) -> None:
        if not self._accept(text):
            self._fail([text])

    def _fail(self, expected: Sequence[str]):
        token = self.current
        if token.kind == "end":
            raise ExprSyntaxError("Unexpected end of input", token.pos, expected)
        raise ExprSyntaxError(f"Unexpected token {token.text!r}", token.pos, expected)

    def parse(self) -> Expr:
        result = self.expr()
        if self.current.kind != "end":
            self._fail(["+", "-", "*", "/", "^", "end of input"])
        return result

    def expr(self) -> Expr:
        left = self.term()
        while True:
            if self._accept("+"):
                left = add(left, self.term())
            elif self._accept("-"):
                left = sub(left, self.term())
            else:
                return left

    def term(self) -> Expr:
        left = self.factor()
        while True:
            if self._accept("*"):
                left = mul(left, self.factor())
            elif self._accept("/"):
                left = div(left, self.factor())
            else:
                return left

    def factor(self) -> Expr:
        base = self.unary()
        if self._accept("^"):
            # right-associative
            return pow_(base, self.factor())
        return base

    def unary(self) -> Expr:
        if self._accept("-"):
            return neg(self.unary())
        return self.primary()

    def primary(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self.i += 1
            value = float(token.text)
            if not math.isfinite(value):
                raise ExprSyntaxError("Numeric literal out of range", token.pos)
            return const(value)
        if token.kind == "ident":
            self.i += 1
            if self._accept("("):
                return self._call(token)
            return self._name(token)
        if self._accept("("):
            inner = self.expr()
            self._expect(")")
            return inner
        self._fail(_PRIMARY_START)

    def _call(self, token: _Token) -> Expr:
        if token.text not in BUILTINS:
            raise UnknownIdentifier(token.text, token.pos)
        args = [self.expr()]
        while self._accept(","):
            args.append(self.expr())
        self._expect(")")
        if len(args) != 1:
            raise ArityError(f"{token.text}() takes 1 argument, got {len(args)}")
        return _BUILDERS[BUILTINS[token.text]](args[0])

    def _name(self, token: _Token) -> Expr:
        name = token.text
        if name in BUILTINS:
            self._fail(["("])
        if name in self.variables:
            return var(self.variables[name])
        if name in self.constants:
            return const(self.constants[name])
        raise UnknownIdentifier(name, token.pos)


def parse(
    text: str, variables: VarSpec, constants: Optional[Mapping[str, float]] = None
) -> Expr:
    """
    Parse a formula into an Expr over ``variables``.

    Symbolic constants are bound through ``constants`` and folded at parse
    time; any other identifier raises UnknownIdentifier.

    Raises:
        ExprSyntaxError: malformed text (with 0-based column and expected tokens)
        UnknownIdentifier: unbound name or unknown function
        ArityError: builtin called with the wrong argument count
    """
    constants = dict(constants or {})
    clash = set(constants) & set(variables.names)
    if clash:
        raise ValueError(f"Names bound both as variable and constant: {sorted(clash)}")
    if not text or not text.strip():
        raise ExprSyntaxError("Empty expression", 0, _PRIMARY_START)
    try:
        tree = _Parser(text, variables, constants).parse()
    except RecursionError:
        raise _too_deep() from None
    _check_depth(tree)
    return tree


def depth(e: Expr) -> int:
    """Number of nodes on the longest root-to-leaf path."""
    seen: Dict[int, int] = {}
    stack = [(e, 1)]
    while stack:
        node, level = stack.pop()
        if seen.get(id(node), 0) >= level:
            continue
        seen[id(node)] = level
        stack.extend((child, level + 1) for child in node.children)
    return max(seen.values())


def _too_deep() -> NestingTooDeep:
    return NestingTooDeep(f"Expression nested more than {MAX_DEPTH} levels")


def _check_depth(e: Expr) -> None:
    if depth(e) > MAX_DEPTH:
        raise _too_deep()


def _natural_key(name: str):
    return [int(part) if part.isdigit() else part for part in re.split(r"(\d+)", name)]


def infer_vars(text: str, constants: Optional[Mapping[str, float]] = None) -> VarSpec:
    """Free identifiers of ``text`` in natural-sort order (x2 before x10)."""
    constants = constants or {}
    tokens = _tokenize(text)
    names = set()
    for token, following in zip(tokens, tokens[1:]):
        if token.kind != "ident" or token.text in constants:
            continue
        if following.kind == "op" and following.text == "(":
            continue
        if token.text not in BUILTINS:
            names.add(token.text)
    if not names:
        return VarSpec.default(1)
    return VarSpec(tuple(sorted(names, key=_natural_key)))


def to_text(e: Expr, names: Optional[Sequence[str]] = None) -> str:
    """Fully parenthesized text; ``parse(to_text(e))`` rebuilds ``e``."""
    if e.kind is Kind.CONST:
        text = repr(e.value)
        return f"({text})" if text.startswith("-") else text
    if e.kind is Kind.VAR:
        if names is not None and e.index < len(names):
            return names[e.index]
        return f"x{e.index + 1}"
    if e.kind is Kind.NEG:
        return f"(-{to_text(e.children[0], names)})"
    if e.kind in (Kind.LN, Kind.EXP, Kind.SQRT):
        return f"{e.kind.value}({to_text(e.children[0], names)})"
    left, right = (to_text(child, names) for child in e.children)
    return f"({left} {e.kind.value} {right})"


def substitute(
    e: Expr, bindings: Mapping[int, Expr], arity: Optional[int] = None
) -> Expr:
    """
    Replace variables by expressions. Literal-only subtrees are folded.

    ``arity``, when given, is the arity of the target variable space; every
    variable of the result must fall inside it.
    """
    for index, bound in bindings.items():
        if index < 0:
            raise ArityError(f"Binding index must be >= 0, got {index}")
        if arity is not None and bound.n_vars > arity:
            raise ArityError(
                f"Binding for x{index + 1} uses variables beyond arity {arity}"
            )

    memo: Dict[int, Expr] = {}

    def rebuild(node: Expr) -> Expr:
        key = id(node)
        if key in memo:
            return memo[key]
        if node.kind is Kind.VAR:
            result = bindings.get(node.index, node)
        elif node.kind is Kind.CONST:
            result = node
        else:
            result = _BUILDERS[node.kind](*(rebuild(c) for c in node.children))
        memo[key] = result
        return result

    result = rebuild(e)
    if arity is not None and result.n_vars > arity:
        raise ArityError(f"Result uses {result.n_vars} variables, arity is {arity}")
    return result


# Evaluation


class Algebra(Protocol[T]):
    """Scalar-like algebra an Expr can be evaluated over."""

    def variables(self, point: Sequence[float]) -> List[T]: ...

    def constant(self, value: float) -> T: ...

    def add(self, a: T, b: T) -> T: ...

    def sub(self, a: T, b: T) -> T: ...

    def mul(self, a: T, b: T) -> T: ...

    def div(self, a: T, b: T) -> T: ...

    def neg(self, a: T) -> T: ...

    def power(self, a: T, p: float) -> T:
        """Real power of a strictly positive base."""

    def ln(self, a: T) -> T: ...

    def exp(self, a: T) -> T: ...

    def sqrt(self, a: T) -> T: ...


class ScalarAlgebra:
    """Plain binary64 arithmetic with domain checks."""

    def variables(self, point: Sequence[float]) -> List[float]:
        return [float(v) for v in point]

    def constant(self, value: float) -> float:
        return value

    def add(self, a: float, b: float) -> float:
        return a + b

    def sub(self, a: float, b: float) -> float:
        return a - b

    def mul(self, a: float, b: float) -> float:
        return a * b

    def div(self, a: float, b: float) -> float:
        if b == 0.0:
            raise DomainError("division by zero", value=b)
        return a / b

    def neg(self, a: float) -> float:
        return -a

    def power(self, a: float, p: float) -> float:
        if a <= 0.0:
            raise DomainError("non-integer power of non-positive base", value=a)
        try:
            return a**p
        except OverflowError:
            raise DomainError("power overflow", value=a)

    def ln(self, a: float) -> float:
        if a <= 0.0:
            raise DomainError("logarithm of non-positive value", value=a)
        return math.log(a)

    def exp(self, a: float) -> float:
        try:
            return math.exp(a)
        except OverflowError:
            raise DomainError("exp overflow", value=a)

    def sqrt(self, a: float) -> float:
        if a < 0.0:
            raise DomainError("square root of negative value", value=a)
        return math.sqrt(a)


SCALAR = ScalarAlgebra()


def _integer_power(algebra: Algebra[T], base: T, k: int) -> T:
    if k == 0:
        return algebra.constant(1.0)
    result: Optional[T] = None
    square = base
    m = abs(k)
    while m:
        if m & 1:
            result = square if result is None else algebra.mul(result, square)
        m >>= 1
        if m:
            square = algebra.mul(square, square)
    if k < 0:
        result = algebra.div(algebra.constant(1.0), result)
    return result


def evaluate(e: Expr, point: Sequence[float], algebra: Algebra[T]) -> T:
    """
    Evaluate ``e`` at ``point`` over ``algebra``.

    Integer literal exponents use repeated multiplication (any base); other
    literal exponents need a positive base; a non-literal exponent y is
    evaluated as exp(y * ln(x)).
    """
    _check_depth(e)
    values = algebra.variables(point)
    if e.n_vars > len(values):
        raise ArityMismatch(
            f"Expression uses {e.n_vars} variables, point has {len(values)}"
        )
    memo: Dict[int, T] = {}

    def walk(node: Expr) -> T:
        key = id(node)
        if key in memo:
            return memo[key]
        try:
            result = _apply(node)
        except DomainError as err:
            raise err.locate(to_text(node))
        memo[key] = result
        return result

    def _apply(node: Expr) -> T:
        kind = node.kind
        if kind is Kind.CONST:
            return algebra.constant(node.value)
        if kind is Kind.VAR:
            return values[node.index]
        if kind is Kind.POW:
            base_node, exponent_node = node.children
            if exponent_node.is_const:
                p = exponent_node.value
                if p.is_integer() and abs(p) <= MAX_INTEGER_POWER:
                    return _integer_power(algebra, walk(base_node), int(p))
                return algebra.power(walk(base_node), p)
            log_base = algebra.ln(walk(base_node))
            return algebra.exp(algebra.mul(walk(exponent_node), log_base))
        args = [walk(child) for child in node.children]
        if kind is Kind.ADD:
            return algebra.add(*args)
        if kind is Kind.SUB:
            return algebra.sub(*args)
        if kind is Kind.MUL:
            return algebra.mul(*args)
        if kind is Kind.DIV:
            return algebra.div(*args)
        if kind is Kind.NEG:
            return algebra.neg(*args)
        if kind is Kind.LN:
            return algebra.ln(*args)
        if kind is Kind.EXP:
            return algebra.exp(*args)
        return algebra.sqrt(*args)

    return walk(e)


def eval_scalar(e: Expr, point: Sequence[float]) -> float:
    """Evaluate to a finite float, or raise DomainError / ArityMismatch."""
    result = evaluate(e, point, SCALAR)
    if not math.isfinite(result):
        raise DomainError("non-finite result", subexpression=to_text(e), value=result)
    return result
