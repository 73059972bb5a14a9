from .parser import (BinOp, Call, Neg, Node, Num, Var, evaluate, format_expression,
                     parse_expression, tokenize)
from .piecewise import (Piece, PiecewiseFunction, TensorProduct, parse_interval,
                        parse_piecewise)
from .presets import SIGNAL_SPECS, signal

__all__ = [
    "BinOp", "Call", "Neg", "Node", "Num", "Var", "evaluate", "format_expression",
    "parse_expression", "tokenize", "Piece", "PiecewiseFunction", "TensorProduct",
    "parse_interval", "parse_piecewise", "SIGNAL_SPECS", "signal",
]
