"""JSON codec for map descriptors

Descriptors are trees of {"kind": ..., parameters...}. Complex parameters are
two-element lists [re, im]; plain numbers are accepted as real values.
"""

import logging
from typing import Any, Dict

from unidisc.analytic.expressions import (
    Affine, Compose, Constant, ExampleFamily, Exp, Identity, Koebe, MapExpr,
    Mobius, NegPower, OddPoly, Power, PrimitiveOf, Product, Quotient, Scale, Sum,
)
from unidisc.errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

ZETA_NAMES = {"1": 1 + 0j, "-1": -1 + 0j, "i": 1j, "-i": -1j}


def decode_complex(value: Any, field: str = "value") -> complex:
    """Parse [re, im], a real number, or one of the unit names for zeta"""
    if isinstance(value, str):
        key = value.strip().replace(" ", "")
        if key in ZETA_NAMES:
            return ZETA_NAMES[key]
        try:
            return complex(key.replace("i", "j"))
        except ValueError:
            raise ConfigError(f"Cannot parse complex number {value!r}", field=field)
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"Complex values need two components, got {value!r}", field=field)
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)):
        return complex(value)
    raise ConfigError(f"Cannot parse complex number {value!r}", field=field)


def encode_complex(value: complex) -> list:
    value = complex(value)
    return [value.real, value.imag]


def _real(node: Dict, key: str, default=None) -> float:
    if key not in node:
        if default is None:
            raise ConfigError(f"Descriptor '{node.get('kind')}' is missing '{key}'", field=key)
        return default
    value = node[key]
    if isinstance(value, (list, tuple)) and len(value) == 2 and value[1] == 0:
        value = value[0]
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"Field '{key}' must be a real number, got {value!r}", field=key)


def _number(node: Dict, key: str, default=None) -> complex:
    """Real numbers stay real so equal descriptors hash equally"""
    if key not in node:
        if default is None:
            raise ConfigError(f"Descriptor '{node.get('kind')}' is missing '{key}'", field=key)
        return default
    value = decode_complex(node[key], field=key)
    return value.real if value.imag == 0 else value


def decode_expr(node: Any) -> MapExpr:
    """
    Build a MapExpr from its JSON tree

    Args:
        node: Parsed JSON object with a "kind" tag

    Returns:
        The descriptor

    Raises:
        ConfigError: unknown kind, malformed parameters or a parameter outside its domain
    """
    try:
        return _decode_node(node)
    except DomainError as e:
        raise ConfigError(str(e), field=node.get("kind") if isinstance(node, dict) else None)


def _decode_node(node: Any) -> MapExpr:
    if not isinstance(node, dict) or "kind" not in node:
        raise ConfigError(f"Descriptor must be an object with a 'kind', got {node!r}", field="kind")
    kind = str(node["kind"]).lower()

    if kind == "identity":
        return Identity()
    if kind == "constant":
        return Constant(_number(node, "c"))
    if kind == "affine":
        return Affine(_number(node, "a", 0.0), _number(node, "b", 1.0))
    if kind == "mobius":
        return Mobius(_number(node, "a"))
    if kind == "power":
        return Power(_number(node, "p"))
    if kind == "exp":
        return Exp()
    if kind == "sum":
        return Sum(tuple(decode_expr(term) for term in node.get("terms", [])))
    if kind == "product":
        return Product(tuple(decode_expr(factor) for factor in node.get("factors", [])))
    if kind == "quotient":
        return Quotient(decode_expr(node.get("numerator")), decode_expr(node.get("denominator")))
    if kind == "scale":
        return Scale(_number(node, "c"), decode_expr(node.get("expr")))
    if kind == "compose":
        return Compose(decode_expr(node.get("outer")), decode_expr(node.get("inner")))
    if kind == "koebe":
        return Koebe()
    if kind == "odd_poly":
        n = _real(node, "n")
        if n < 0 or not float(n).is_integer():
            raise ConfigError(f"odd_poly needs a non-negative integer n, got {n}", field="n")
        return OddPoly(int(n))
    if kind == "neg_power":
        return NegPower(_real(node, "p"))
    if kind == "example":
        return ExampleFamily(_real(node, "C"), decode_complex(node.get("zeta", "1"), field="zeta"))
    if kind == "primitive":
        return PrimitiveOf(
            decode_expr(node.get("expr")),
            decode_complex(node.get("basepoint", [0, 0]), field="basepoint"),
            decode_complex(node.get("base_value", [0, 0]), field="base_value"),
        )
    raise ConfigError(f"Unknown descriptor kind '{kind}'", field="kind")


def encode_expr(expr: MapExpr) -> Dict[str, Any]:
    """Inverse of decode_expr"""
    kind = expr.kind
    if isinstance(expr, (Identity, Exp, Koebe)):
        return {"kind": kind}
    if isinstance(expr, Constant):
        return {"kind": kind, "c": encode_complex(expr.c)}
    if isinstance(expr, Affine):
        return {"kind": kind, "a": encode_complex(expr.a), "b": encode_complex(expr.b)}
    if isinstance(expr, Mobius):
        return {"kind": kind, "a": encode_complex(expr.a)}
    if isinstance(expr, Power):
        return {"kind": kind, "p": encode_complex(expr.p)}
    if isinstance(expr, Sum):
        return {"kind": kind, "terms": [encode_expr(t) for t in expr.terms]}
    if isinstance(expr, Product):
        return {"kind": kind, "factors": [encode_expr(f) for f in expr.factors]}
    if isinstance(expr, Quotient):
        return {"kind": kind, "numerator": encode_expr(expr.numerator), "denominator": encode_expr(expr.denominator)}
    if isinstance(expr, Scale):
        return {"kind": kind, "c": encode_complex(expr.c), "expr": encode_expr(expr.expr)}
    if isinstance(expr, Compose):
        return {"kind": kind, "outer": encode_expr(expr.outer), "inner": encode_expr(expr.inner)}
    if isinstance(expr, OddPoly):
        return {"kind": kind, "n": expr.n}
    if isinstance(expr, NegPower):
        return {"kind": kind, "p": expr.p}
    if isinstance(expr, ExampleFamily):
        return {"kind": kind, "C": expr.C, "zeta": encode_complex(expr.zeta)}
    if isinstance(expr, PrimitiveOf):
        return {
            "kind": kind,
            "expr": encode_expr(expr.expr),
            "basepoint": encode_complex(expr.basepoint),
            "base_value": encode_complex(expr.base_value),
        }
    raise ConfigError(f"Cannot encode descriptor of kind '{kind}'")
