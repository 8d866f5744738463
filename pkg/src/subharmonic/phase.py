"""Initial-phase values t0, carried as the unit scalar z = e^{i t0}.

Downstream recursions only ever consume z (through powers z^{sigma'}),
so a phase is exact whenever z is an exact Gaussian rational on the
unit circle (t0 in {0, pi, pi/2, ...} or any Pythagorean angle), numeric
otherwise, or fully symbolic for the higher-order Melnikov cascade.
"""

from fractions import Fraction

import mpmath

from .scalars import QQi


class Phase:
    __slots__ = ("kind", "z", "t0_value", "label")

    def __init__(self, kind, z=None, t0_value=None, label=None):
        self.kind = kind  # "exact" | "numeric" | "symbolic"
        self.z = z
        self.t0_value = t0_value
        self.label = label

    @classmethod
    def zero(cls):
        return cls("exact", z=QQi(1), t0_value=mpmath.mpf(0), label="0")

    @classmethod
    def pi(cls):
        return cls("exact", z=QQi(-1), t0_value=+mpmath.pi, label="pi")

    @classmethod
    def exact_unit(cls, re, im, t0_value=None, label=None):
        z = QQi(Fraction(re), Fraction(im))
        if z.re * z.re + z.im * z.im != 1:
            raise ValueError("phase scalar must lie on the unit circle")
        if t0_value is None:
            t0_value = mpmath.atan2(mpmath.mpf(z.im.numerator) / z.im.denominator,
                                    mpmath.mpf(z.re.numerator) / z.re.denominator)
            if t0_value < 0:
                t0_value += 2 * mpmath.pi
        return cls("exact", z=z, t0_value=t0_value, label=label)

    @classmethod
    def numeric(cls, t0, bits=256):
        with mpmath.workprec(bits):
            t0 = mpmath.mpf(t0)
            z = mpmath.exp(1j * t0)
        return cls("numeric", z=z, t0_value=t0)

    @classmethod
    def symbolic(cls):
        return cls("symbolic")

    @property
    def is_symbolic(self):
        return self.kind == "symbolic"

    def describe(self):
        if self.label is not None:
            return self.label
        if self.kind == "symbolic":
            return "t0"
        return mpmath.nstr(self.t0_value, 30)

    def __repr__(self):
        return f"Phase({self.describe()})"
