"""Named test signals."""

from __future__ import annotations

from ..errors import RejectedInputError
from .piecewise import PiecewiseFunction, parse_piecewise

SIGNAL_SPECS = {
    # discontinuous signal reconstructed by the scaled convolution operator
    "f1": ("R", [
        ("x<-1", "3*exp(x)"),
        ("-1<=x<0", "-1"),
        ("0<=x<1", "2"),
        ("1<=x<2", "x"),
        ("x>=2", "-2*exp(-x)"),
    ]),
    # same shape with the middle pieces merged; used with the unit convolution operator
    "f2": ("R", [
        ("x<-1", "3*exp(x)"),
        ("-1<=x<0", "-1"),
        ("0<=x<2", "2"),
        ("x>=2", "-2*exp(-x)"),
    ]),
    # signal on the positive half-line for the Mellin operator
    "f3": ("R+", [
        ("0<=x<2", "2*x"),
        ("2<=x<4", "1"),
        ("x>=4", "-25/x^3"),
    ]),
    "hat": ("R", [
        ("x<-1", "0"),
        ("-1<=x<1", "1-abs(x)"),
        ("x>=1", "0"),
    ]),
    "one": ("R", [("", "1")]),
    "one+": ("R+", [("", "1")]),
}


def signal(name: str) -> PiecewiseFunction:
    """Return the preset signal called ``name``."""
    try:
        domain, spec = SIGNAL_SPECS[name]
    except KeyError:
        raise RejectedInputError(
            f"unknown signal preset {name!r}; known: {sorted(SIGNAL_SPECS)}") from None
    return parse_piecewise(spec, domain=domain, name=name)
