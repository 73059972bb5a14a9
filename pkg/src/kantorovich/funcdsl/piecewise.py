"""Piecewise-defined signals on the real line or the positive half-line."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DomainError, ParseError, RejectedInputError
from .parser import Node, format_expression, parse_expression

DOMAINS = ("R", "R+")

_NUM = r"[-+]?(?:inf|(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)"
_CLOSED_OPEN = re.compile(rf"^\s*({_NUM})\s*<=\s*x\s*<\s*({_NUM})\s*$")
_LEFT_TAIL = re.compile(rf"^\s*x\s*<\s*({_NUM})\s*$")
_RIGHT_TAIL = re.compile(rf"^\s*x\s*>=\s*({_NUM})\s*$")


def parse_interval(text: str | None) -> tuple[float, float]:
    """Parse ``"a<=x<b"``, ``"x<b"`` or ``"x>=a"`` into ``(lo, hi)``.

    An empty string (or None) means the whole line.
    """
    if text is None or not text.strip():
        return -math.inf, math.inf
    m = _CLOSED_OPEN.match(text)
    if m:
        lo, hi = float(m.group(1)), float(m.group(2))
    elif (m := _LEFT_TAIL.match(text)):
        lo, hi = -math.inf, float(m.group(1))
    elif (m := _RIGHT_TAIL.match(text)):
        lo, hi = float(m.group(1)), math.inf
    else:
        raise ParseError(f"interval {text!r} is not of the form a<=x<b, x<b or x>=a", 0,
                         ("a<=x<b", "x<b", "x>=a"))
    if not lo < hi:
        raise RejectedInputError(f"empty interval {text!r}")
    return lo, hi


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    expr: Node

    def interval_text(self) -> str:
        if self.lo == -math.inf and self.hi == math.inf:
            return ""
        if self.lo == -math.inf:
            return f"x<{self.hi!r}"
        if self.hi == math.inf:
            return f"x>={self.lo!r}"
        return f"{self.lo!r}<=x<{self.hi!r}"


class PiecewiseFunction:
    """Ordered, gap-free list of left-closed/right-open pieces.

    Evaluation at a breakpoint returns the right-hand piece. On ``"R+"`` the
    domain is the open half-line and evaluation at ``x <= 0`` is rejected.
    """

    def __init__(self, pieces: Sequence[Piece], domain: str = "R", name: str | None = None):
        if domain not in DOMAINS:
            raise RejectedInputError(f"unknown domain {domain!r}; expected one of {DOMAINS}")
        if not pieces:
            raise RejectedInputError("a piecewise function needs at least one piece")
        pieces = sorted(pieces, key=lambda p: p.lo)
        start = pieces[0].lo
        if domain == "R" and start != -math.inf:
            raise RejectedInputError(f"pieces leave (-inf, {start!r}) uncovered")
        if domain == "R+" and start > 0:
            raise RejectedInputError(f"pieces leave (0, {start!r}) uncovered")
        for left, right in zip(pieces, pieces[1:]):
            if left.hi < right.lo:
                raise RejectedInputError(f"gap between pieces at [{left.hi!r}, {right.lo!r})")
            if left.hi > right.lo:
                raise RejectedInputError(f"pieces overlap at boundary {right.lo!r}")
        if pieces[-1].hi != math.inf:
            raise RejectedInputError(f"pieces leave [{pieces[-1].hi!r}, inf) uncovered")
        self.pieces = tuple(pieces)
        self.domain = domain
        self.name = name
        self._los = np.array([p.lo for p in self.pieces])

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<PiecewiseFunction{label} on {self.domain} with {len(self.pieces)} pieces>"

    @property
    def measure(self) -> str:
        return "log" if self.domain == "R+" else "lebesgue"

    def breakpoints(self) -> np.ndarray:
        """Interior piece boundaries, sorted."""
        pts = [p.lo for p in self.pieces[1:]]
        if self.domain == "R+":
            pts = [b for b in pts if b > 0]
        return np.array(pts, dtype=float)

    def piece_index(self, x) -> np.ndarray:
        return np.searchsorted(self._los, x, side="right") - 1

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        if np.any(np.isnan(arr)):
            raise DomainError("cannot evaluate at NaN")
        if self.domain == "R+" and np.any(arr <= 0):
            raise DomainError(f"{self!r} is defined only for x > 0")
        flat = arr.reshape(-1)
        out = np.empty_like(flat)
        idx = self.piece_index(flat)
        for i, piece in enumerate(self.pieces):
            sel = idx == i
            if np.any(sel):
                out[sel] = piece.expr(flat[sel])
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)

    eval = __call__

    def is_continuous(self, tol: float = 1e-12) -> bool:
        """True when the one-sided limits agree at every breakpoint."""
        for left, right in zip(self.pieces, self.pieces[1:]):
            try:
                a = left.expr(right.lo)
                b = right.expr(right.lo)
            except DomainError:
                return False
            if abs(a - b) > tol * max(1.0, abs(a), abs(b)):
                return False
        return True

    def to_spec(self) -> dict:
        return {
            "domain": self.domain,
            "pieces": [[p.interval_text(), format_expression(p.expr)] for p in self.pieces],
        }


def parse_piecewise(spec: Sequence[Sequence[str]], domain: str = "R",
                    name: str | None = None) -> PiecewiseFunction:
    """Build a :class:`PiecewiseFunction` from ``(interval, expression)`` text pairs."""
    pieces = []
    for item in spec:
        if isinstance(item, str):
            interval, text = "", item
        else:
            interval, text = item
        lo, hi = parse_interval(interval)
        pieces.append(Piece(lo, hi, parse_expression(text)))
    return PiecewiseFunction(pieces, domain=domain, name=name)


class TensorProduct:
    """``f(x_1, ..., x_N) = g_1(x_1) ... g_N(x_N)`` for multidimensional operators."""

    def __init__(self, factors: Sequence[PiecewiseFunction]):
        if not factors:
            raise RejectedInputError("tensor product needs at least one factor")
        self.factors = tuple(factors)

    @property
    def dim(self) -> int:
        return len(self.factors)

    def __call__(self, *coords):
        if len(coords) != self.dim:
            raise RejectedInputError(f"expected {self.dim} coordinates, got {len(coords)}")
        out = 1.0
        for g, c in zip(self.factors, coords):
            out = out * g(c)
        return out
