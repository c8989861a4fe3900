"""Exact angle arithmetic on rational multiples of pi.

Angles that come out of the decompositions are snapped to ``q * pi`` with ``q``
a :class:`fractions.Fraction` whenever possible.  Everything downstream that
asks a discrete question (is ``theta`` in ``2 pi Z``?  is a multiset of
curvature vectors symmetric?) runs on these exact values and refuses to decide
on floats that sit too close to a decision boundary.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import sympy

SNAP_TOL = 1e-9
MAX_DENOMINATOR = 64


class SigmaPFError(Exception):
    """Base class for errors raised by this package."""


class UndecidableError(SigmaPFError):
    """A discrete decision was requested on inexact data near a boundary."""


def snap_rational(x: float, tol: float = SNAP_TOL, max_den: int = MAX_DENOMINATOR):
    """Return a Fraction within ``tol`` of ``x`` (denominator <= max_den), else the float."""
    q = Fraction(x).limit_denominator(max_den)
    if abs(float(q) - x) <= tol:
        return q
    return float(x)


def is_exact(value) -> bool:
    if isinstance(value, Angle):
        return value.exact
    return isinstance(value, Rational)


class Angle:
    """A real number stored either as ``turns * pi`` (exact) or in radians.

    ``Angle.pi(Fraction(1, 2))`` is pi/2 exactly; ``Angle.rad(0.3)`` is an
    inexact float angle.  Arithmetic keeps exactness when every operand is
    exact.
    """

    __slots__ = ("_turns", "_rad")

    def __init__(self, turns=None, rad=None):
        if (turns is None) == (rad is None):
            raise ValueError("give exactly one of turns, rad")
        if turns is not None:
            self._turns = Fraction(turns)
            self._rad = None
        else:
            self._turns = None
            self._rad = float(rad)

    @classmethod
    def pi(cls, turns=1) -> "Angle":
        return cls(turns=turns)

    @classmethod
    def rad(cls, value: float) -> "Angle":
        return cls(rad=value)

    @classmethod
    def snap(cls, radians: float, tol: float = SNAP_TOL, max_den: int = MAX_DENOMINATOR) -> "Angle":
        q = snap_rational(radians / math.pi, tol / math.pi, max_den)
        if isinstance(q, Fraction):
            return cls(turns=q)
        return cls(rad=radians)

    zero: "Angle"

    @property
    def exact(self) -> bool:
        return self._turns is not None

    @property
    def turns(self) -> Fraction:
        """The coefficient of pi; only defined for exact angles."""
        if self._turns is None:
            raise UndecidableError(f"angle {self._rad!r} is not a rational multiple of pi")
        return self._turns

    @property
    def radians(self) -> float:
        if self._turns is not None:
            return float(self._turns) * math.pi
        return self._rad

    def __float__(self) -> float:
        return self.radians

    def __neg__(self) -> "Angle":
        if self.exact:
            return Angle(turns=-self._turns)
        return Angle(rad=-self._rad)

    def __add__(self, other) -> "Angle":
        if not isinstance(other, Angle):
            return NotImplemented
        if self.exact and other.exact:
            return Angle(turns=self._turns + other._turns)
        return Angle(rad=self.radians + other.radians)

    def __sub__(self, other) -> "Angle":
        if not isinstance(other, Angle):
            return NotImplemented
        return self + (-other)

    def __mul__(self, k) -> "Angle":
        if isinstance(k, Angle):
            return NotImplemented
        if self.exact and isinstance(k, Rational):
            return Angle(turns=self._turns * k)
        return Angle(rad=self.radians * float(k))

    __rmul__ = __mul__

    def __truediv__(self, k) -> "Angle":
        if self.exact and isinstance(k, Rational):
            return Angle(turns=self._turns / k)
        return Angle(rad=self.radians / float(k))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Angle):
            return NotImplemented
        if self.exact and other.exact:
            return self._turns == other._turns
        return self.radians == other.radians

    def __hash__(self) -> int:
        return hash(self._turns) if self.exact else hash(self._rad)

    def sort_key(self) -> float:
        return float(self._turns) if self.exact else self._rad / math.pi

    def normalized(self) -> "Angle":
        """Representative in (-pi, pi]."""
        if self.exact:
            q = self._turns % 2
            if q > 1:
                q -= 2
            return Angle(turns=q)
        x = math.remainder(self._rad, 2 * math.pi)
        if x <= -math.pi:
            x += 2 * math.pi
        return Angle(rad=x)

    def in_two_pi_z(self, tol: float = SNAP_TOL) -> bool:
        """Membership in 2 pi Z; raises UndecidableError for an inexact angle within tol."""
        if self.exact:
            return self._turns % 2 == 0
        dist = abs(math.remainder(self._rad, 2 * math.pi))
        if dist <= tol:
            raise UndecidableError(
                f"angle {self._rad!r} is within {tol:g} of 2*pi*Z but not exact"
            )
        return False

    def congruent(self, other: "Angle", modulus: Fraction = Fraction(2)) -> bool:
        """Exact congruence modulo ``modulus * pi``."""
        return (self.turns - other.turns) % modulus == 0

    def cot_half(self) -> float:
        """cot(angle / 2) as a float, exactly 0.0 at odd multiples of pi."""
        if self.exact and (self._turns - 1) % 2 == 0:
            return 0.0
        return 1.0 / math.tan(self.radians / 2)

    def tan_half(self) -> float:
        if self.exact and self._turns % 2 == 0:
            return 0.0
        return math.tan(self.radians / 2)

    def __repr__(self) -> str:
        return f"Angle({format_angle(self)})"

    def __str__(self) -> str:
        return format_angle(self)


Angle.zero = Angle(turns=0)


def format_angle(angle: Angle) -> str:
    if not angle.exact:
        return repr(angle.radians)
    q = angle.turns
    if q == 0:
        return "0"
    num = "" if abs(q.numerator) == 1 else str(abs(q.numerator))
    sign = "-" if q < 0 else ""
    den = "" if q.denominator == 1 else f"/{q.denominator}"
    return f"{sign}{num}pi{den}"


_PI_RE = re.compile(
    r"^\s*(?P<sign>[-+]?)\s*(?P<coef>\d+(?:/\d+)?)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+))?\s*$"
)
_RAT_RE = re.compile(r"^\s*[-+]?\d+(?:/\d+)?\s*$")


def parse_angle(text) -> Angle:
    """Parse ``"pi/2"``, ``"-3pi/4"``, ``"2*pi/3"``, ``"0"``; other numbers become inexact.

    A bare rational such as ``"1/2"`` is a real number that is *not* a rational
    multiple of pi, so it is returned as an inexact Angle.
    """
    if isinstance(text, Angle):
        return text
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return Angle.pi(0) if text == 0 else Angle.rad(float(text))
    s = str(text).strip()
    m = _PI_RE.match(s)
    if m:
        q = Fraction(m.group("coef") or 1)
        if m.group("den"):
            q /= int(m.group("den"))
        if m.group("sign") == "-":
            q = -q
        return Angle.pi(q)
    if _RAT_RE.match(s):
        q = Fraction(s.replace(" ", ""))
        return Angle.pi(0) if q == 0 else Angle.rad(float(q))
    return Angle.rad(float(s))


def parse_scalar(text):
    """Parse a real coordinate: rationals stay exact, anything else is a float."""
    if isinstance(text, Rational) and not isinstance(text, bool):
        return Fraction(text)
    if isinstance(text, float):
        return text
    s = str(text).strip()
    if _RAT_RE.match(s):
        return Fraction(s.replace(" ", ""))
    if "pi" in s:
        return parse_angle(s).radians
    return float(s)


# --- exact comparison of rational multiples of cotangents -----------------

def _cyclotomic_zero(terms: list[tuple[Fraction, int]], order: int) -> bool:
    """Whether sum(c * zeta**e) == 0 for zeta a primitive ``order``-th root of unity."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(0, x, domain="QQ")
    for c, e in terms:
        poly += sympy.Poly(sympy.Rational(c.numerator, c.denominator) * x ** (e % order), x, domain="QQ")
    phi = sympy.Poly(sympy.cyclotomic_poly(order, x), x, domain="QQ")
    return poly.rem(phi).is_zero


@lru_cache(maxsize=4096)
def cot_multiples_equal(k1: Fraction, phi1: Fraction, k2: Fraction, phi2: Fraction) -> bool:
    """Decide ``k1 * cot(phi1 pi) == k2 * cot(phi2 pi)`` exactly.

    Neither ``phi`` may be an integer.  Writing ``z = exp(2 i phi pi)`` gives
    ``cot(phi pi) = i (z + 1) / (z - 1)``, so the identity reduces to a
    polynomial identity in a root of unity, decided modulo the cyclotomic
    polynomial.
    """
    if phi1.denominator == 1 or phi2.denominator == 1:
        raise ValueError("cotangent pole")
    z1_zero = (phi1 - Fraction(1, 2)) % 1 == 0
    z2_zero = (phi2 - Fraction(1, 2)) % 1 == 0
    if k1 == 0 or z1_zero:
        return k2 == 0 or z2_zero
    if k2 == 0 or z2_zero:
        return False
    if abs(k1 * _cot(phi1) - k2 * _cot(phi2)) > 1e-7 * (1 + abs(k1 * _cot(phi1))):
        return False
    if k1 == k2:
        return (phi1 - phi2) % 1 == 0
    if k1 == -k2:
        return (phi1 + phi2) % 1 == 0
    # (z1 + 1)(z2 - 1) k1 - (z2 + 1)(z1 - 1) k2 == 0 with z_j = zeta**e_j
    a1, a2 = phi1, phi2
    order = math.lcm(a1.denominator, a2.denominator)
    e1 = int(a1 * order) % order
    e2 = int(a2 * order) % order
    terms = [
        (k1 - k2, e1 + e2),
        (-k1 - k2, e1),
        (k1 + k2, e2),
        (-k1 + k2, 0),
    ]
    return _cyclotomic_zero(terms, order)


def _cot(q: Fraction) -> float:
    return 1.0 / math.tan(float(q) * math.pi)
