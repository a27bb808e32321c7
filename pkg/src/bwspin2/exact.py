"""Exact scalars: rationals, complex rationals and polynomials in p0..p3, m.

Rationals are :class:`fractions.Fraction`.  Complex rationals carry two of
them.  Polynomials are sparse maps from exponent vectors over
``(p0, p1, p2, p3, m)`` to complex-rational coefficients.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

Rational = Fraction

VARIABLES = ("p0", "p1", "p2", "p3", "m")
_NVARS = len(VARIABLES)
_ONE_MONO = (0,) * _NVARS


class MissingVariable(KeyError):
    """Raised when a polynomial is evaluated without a value for one of its variables."""


class ParseError(ValueError):
    pass


_RAT_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"a/b"`` or ``"a"`` (optional leading sign).  Floats are rejected."""
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}")
    match = _RAT_RE.match(text.replace("−", "-"))
    if not match:
        raise ParseError(f"not a rational literal: {text!r}")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


class CRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _as_fraction(re)
        self.im = _as_fraction(im)

    @classmethod
    def coerce(cls, x) -> "CRational":
        if isinstance(x, CRational):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, str):
            return parse_crational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to CRational")

    def __add__(self, other):
        if isinstance(other, CRational):
            return CRational(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return CRational(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return CRational(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, CRational):
            return CRational(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return CRational(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return CRational(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, CRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b and not d:
                return CRational(a * c)
            return CRational(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return CRational(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def conjugate(self) -> "CRational":
        return CRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "CRational":
        n = self.norm2()
        if not n:
            raise ZeroDivisionError("CRational division by zero")
        return CRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("CRational division by zero")
            return CRational(self.re / other, self.im / other)
        if isinstance(other, CRational):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CRational(other) * self.inverse()
        return NotImplemented

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, CRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"CRational({format_crational(self)!r})"

    def __str__(self):
        return format_crational(self)


I = CRational(0, 1)
ZERO = CRational(0)
ONE = CRational(1)


def parse_crational(text: str) -> CRational:
    """Parse ``"a/b+c/di"``; either part may be omitted (``"i"``, ``"-3/2"``, ``"1/4i"``)."""
    s = text.replace(" ", "").replace("\u2212", "-") if isinstance(text, str) else None
    if not s:
        raise ParseError(f"empty or non-string complex literal: {text!r}")
    if not s.endswith("i"):
        return CRational(parse_rational(s))
    body = s[:-1]
    split = max(body.rfind("+"), body.rfind("-"))
    if split > 0:
        real_txt, imag_txt = body[:split], body[split:]
    else:
        real_txt, imag_txt = "", body
    real = parse_rational(real_txt) if real_txt else Fraction(0)
    if imag_txt in ("", "+"):
        imag = Fraction(1)
    elif imag_txt == "-":
        imag = Fraction(-1)
    else:
        imag = parse_rational(imag_txt)
    return CRational(real, imag)


def format_crational(z: CRational) -> str:
    if not z.im:
        return format_rational(z.re)
    mag = abs(z.im)
    im_txt = "i" if mag == 1 else f"{format_rational(mag)}i"
    sign = "-" if z.im < 0 else "+"
    if not z.re:
        return f"-{im_txt}" if sign == "-" else im_txt
    return f"{format_rational(z.re)}{sign}{im_txt}"


Scalar = Union[int, Fraction, CRational]


def _monomial(var: str, power: int = 1) -> tuple:
    try:
        idx = VARIABLES.index(var)
    except ValueError:
        raise KeyError(f"unknown variable {var!r}; expected one of {VARIABLES}") from None
    exps = [0] * _NVARS
    exps[idx] = power
    return tuple(exps)


class MomentumPoly:
    """Sparse polynomial in p0..p3 and m with CRational coefficients.

    Instances are treated as immutable; every operation returns a new value.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, Scalar] | None = None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = CRational.coerce(c)
                if c:
                    if len(mono) != _NVARS:
                        raise ValueError(f"monomial {mono} must have {_NVARS} exponents")
                    clean[tuple(mono)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, terms: dict) -> "MomentumPoly":
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def const(cls, c: Scalar) -> "MomentumPoly":
        c = CRational.coerce(c)
        return cls._raw({_ONE_MONO: c} if c else {})

    @classmethod
    def var(cls, name: str, coeff: Scalar = 1) -> "MomentumPoly":
        return cls({_monomial(name): coeff})

    @classmethod
    def zero(cls) -> "MomentumPoly":
        return cls._raw({})

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE_MONO in self.terms)

    def constant_value(self) -> CRational:
        if not self.is_constant():
            raise ValueError(f"polynomial {self} is not constant")
        return self.terms.get(_ONE_MONO, ZERO)

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def degree_in(self, var: str) -> int:
        idx = VARIABLES.index(var)
        return max((m[idx] for m in self.terms), default=0)

    def variables(self) -> set[str]:
        return {VARIABLES[i] for m in self.terms for i, e in enumerate(m) if e}

    def __add__(self, other):
        if not isinstance(other, MomentumPoly):
            try:
                other = MomentumPoly.const(other)
            except TypeError:
                return NotImplemented
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono)
            if s is None:
                out[mono] = c
            else:
                s = s + c
                if s:
                    out[mono] = s
                else:
                    del out[mono]
        return MomentumPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return MomentumPoly._raw({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MomentumPoly):
            try:
                other = MomentumPoly.const(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "MomentumPoly":
        c = CRational.coerce(c)
        if not c:
            return MomentumPoly._raw({})
        return MomentumPoly._raw({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CRational)):
            return self.scale(other)
        if not isinstance(other, MomentumPoly):
            return NotImplemented
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(mono)
                out[mono] = c1 * c2 if s is None else s + c1 * c2
        return MomentumPoly._raw({k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, MomentumPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction, CRational)):
            return self == MomentumPoly.const(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def evaluate(self, assignment: Mapping[str, Scalar]) -> CRational:
        """Exact value at ``assignment``; :class:`MissingVariable` if a variable is unassigned."""
        needed = self.variables()
        missing = sorted(needed - set(assignment))
        if missing:
            raise MissingVariable(f"no value for variable(s) {', '.join(missing)}")
        values = [CRational.coerce(assignment[v]) if v in needed else ONE for v in VARIABLES]
        total = ZERO
        for mono, c in self.terms.items():
            term = c
            for v, e in zip(values, mono):
                for _ in range(e):
                    term = term * v
            total = total + term
        return total

    def substitute(self, assignment: Mapping[str, Scalar]) -> "MomentumPoly":
        """Partial evaluation: replace the assigned variables, keep the rest symbolic."""
        out = MomentumPoly.zero()
        for mono, c in self.terms.items():
            coeff = c
            rest = list(mono)
            for i, v in enumerate(VARIABLES):
                if v in assignment and mono[i]:
                    val = CRational.coerce(assignment[v])
                    for _ in range(mono[i]):
                        coeff = coeff * val
                    rest[i] = 0
            out = out + MomentumPoly({tuple(rest): coeff})
        return out

    def sorted_terms(self) -> list[tuple[tuple, CRational]]:
        # descending total degree, then lexicographic on exponents
        return sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))

    def __repr__(self):
        return f"MomentumPoly({str(self)!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            mono_txt = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(VARIABLES, mono) if e
            )
            c_txt = format_crational(c)
            if not mono_txt:
                parts.append(c_txt if not c.im or not c.re else f"({c_txt})")
            elif c == ONE:
                parts.append(mono_txt)
            elif c == -ONE:
                parts.append(f"-{mono_txt}")
            elif c.re and c.im:
                parts.append(f"({c_txt})*{mono_txt}")
            else:
                parts.append(f"{c_txt}*{mono_txt}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


def poly_arith(a: MomentumPoly, b, op: str) -> MomentumPoly:
    """Ring operation ``op`` in {"add", "sub", "mul", "scale"}; ``scale`` takes a scalar ``b``."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"unknown polynomial operation {op!r}")


def poly_eval(a: MomentumPoly, assignment: Mapping[str, Scalar]) -> CRational:
    return a.evaluate(assignment)


def momentum_assignment(p: Iterable[Scalar], m: Scalar | None = None) -> dict[str, CRational]:
    values = [CRational.coerce(x) for x in p]
    if len(values) != 4:
        raise ValueError("momentum needs exactly four components")
    out = {f"p{i}": v for i, v in enumerate(values)}
    if m is not None:
        out["m"] = CRational.coerce(m)
    return out
