"""Arithmetic grammar for Fourier-symbol expressions in k1..kn and |k|."""

import ast
import re
from typing import Callable

import numpy as np


class SymbolSyntaxError(ValueError):
    """Raised when a symbol expression falls outside the supported grammar."""

    def __init__(self, expression: str, reason: str):
        self.expression = expression
        self.reason = reason
        super().__init__(f"Invalid symbol expression '{expression}': {reason}")


_BINARY: dict[type, Callable] = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}

_UNARY: dict[type, Callable] = {
    ast.USub: np.negative,
    ast.UAdd: np.positive,
}

_FUNCTIONS: dict[str, Callable] = {
    "abs": np.abs,
}


def normalize_expression(expression: str) -> str:
    """
    Rewrite the user-facing notation into Python syntax.

    Examples:
        >>> normalize_expression("-i*k2/|k|")
        '-i*k2/kabs'
        >>> normalize_expression("k1^2")
        'k1**2'
    """
    text = expression.strip()
    if not text:
        raise SymbolSyntaxError(expression, "empty expression")
    text = re.sub(r"\|\s*k\s*\|", "kabs", text)
    return text.replace("^", "**")


def parse_symbol(expression: str, n: int) -> ast.Expression:
    """
    Parse and validate a symbol expression for dimension ``n``.

    Allowed: numeric constants, the imaginary unit ``i``, variables ``k1..kn``
    and ``|k|``, the operators + - * / ^ and the function ``abs``.

    Raises:
        SymbolSyntaxError: If the expression uses anything else
    """
    try:
        tree = ast.parse(normalize_expression(expression), mode="eval")
    except SyntaxError as exc:
        raise SymbolSyntaxError(expression, f"syntax error ({exc.msg})") from exc

    allowed_names = {"i", "kabs"} | {f"k{j}" for j in range(1, n + 1)}
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.Load)) or type(node) in _BINARY or type(node) in _UNARY:
            continue
        if isinstance(node, (ast.BinOp, ast.UnaryOp)):
            op = node.op
            if type(op) not in _BINARY and type(op) not in _UNARY:
                raise SymbolSyntaxError(expression, f"operator {type(op).__name__} not supported")
            continue
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
                raise SymbolSyntaxError(expression, f"constant {node.value!r} not supported")
            continue
        if isinstance(node, ast.Name):
            if node.id not in allowed_names and node.id not in _FUNCTIONS:
                raise SymbolSyntaxError(expression, f"unknown variable '{node.id}'")
            continue
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
                raise SymbolSyntaxError(expression, "only abs(...) calls are supported")
            if len(node.args) != 1 or node.keywords:
                raise SymbolSyntaxError(expression, "abs takes exactly one argument")
            continue
        raise SymbolSyntaxError(expression, f"{type(node).__name__} not supported")
    return tree


def evaluate_symbol(expression: str, wavevectors: tuple[np.ndarray, ...], magnitude: np.ndarray) -> np.ndarray:
    """
    Evaluate a symbol expression on a wavevector mesh.

    Singular points (typically k=0) come back as inf/nan; the caller decides
    their value.

    Returns:
        Complex array with the mesh shape
    """
    n = len(wavevectors)
    tree = parse_symbol(expression, n)
    variables = {f"k{j + 1}": k for j, k in enumerate(wavevectors)}
    variables["kabs"] = magnitude
    variables["i"] = 1j

    def _eval(node):
        if isinstance(node, ast.Expression):
            return _eval(node.body)
        if isinstance(node, ast.BinOp):
            return _BINARY[type(node.op)](_eval(node.left), _eval(node.right))
        if isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](_eval(node.operand))
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            return variables[node.id]
        if isinstance(node, ast.Call):
            return _FUNCTIONS[node.func.id](_eval(node.args[0]))
        raise SymbolSyntaxError(expression, f"{type(node).__name__} not supported")

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        value = _eval(tree)
        result = np.broadcast_to(np.asarray(value, dtype=np.complex128), magnitude.shape)
    return np.array(result)
