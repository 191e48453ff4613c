"""Exact scalar fields: rationals, Gaussian rationals and prime fields.

Elements are ordinary Python objects supporting ``+ - * /`` and ``== 0``:
:class:`fractions.Fraction` for the rationals, :class:`GaussianRational`
for Q(i), and :class:`Fp` for the prime field of order p.
"""

from fractions import Fraction
from functools import lru_cache
import random
import re


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


class GaussianRational:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @staticmethod
    def _lift(x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussianRational(o.re / n, -o.im / n)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k):
        if k < 0:
            return GaussianRational(1) / (self ** (-k))
        out = GaussianRational(1)
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self):
        return self.re * self.re + self.im * self.im

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"{self.re}+{self.im}i"


class Fp:
    """Element of the prime field with ``p`` elements."""

    __slots__ = ("v", "p")

    def __init__(self, v, p):
        self.p = p
        self.v = v % p

    def _lift(self, x):
        if isinstance(x, Fp):
            if x.p != self.p:
                raise ValueError(f"mixing F_{self.p} and F_{x.p}")
            return x.v
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in F_{self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Fp(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Fp(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Fp(o - self.v, self.p)

    def __neg__(self):
        return Fp(-self.v, self.p)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Fp(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return Fp(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Fp(o, self.p) / self

    def __pow__(self, k):
        return Fp(pow(self.v, k, self.p), self.p)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.v == o

    def __hash__(self):
        return hash(self.v)

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"Fp({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


class Field:
    """Common interface of the three scalar fields."""

    name = "field"
    characteristic = 0
    is_finite = False

    def __call__(self, x):
        return self.coerce(x)

    def __repr__(self):
        return f"<{self.name}>"

    def __eq__(self, other):
        return isinstance(other, Field) and other.name == self.name

    def __hash__(self):
        return hash(self.name)


class Rationals(Field):
    name = "rationals"

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def coerce(self, x):
        if isinstance(x, GaussianRational):
            if x.im != 0:
                raise ValueError(f"{x} is not rational")
            return x.re
        return _frac(x)

    def parse(self, obj):
        return self.coerce(obj)

    def format(self, x):
        return format_fraction(x)

    def random(self, rng, bound=3):
        num = rng.randint(-bound, bound)
        den = rng.randint(1, bound)
        return Fraction(num, den)


class GaussianRationals(Field):
    name = "gaussian-rationals"

    @property
    def zero(self):
        return GaussianRational(0, 0)

    @property
    def one(self):
        return GaussianRational(1, 0)

    def coerce(self, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return GaussianRational(Fraction(x.real), Fraction(x.imag))
        return GaussianRational(_frac(x), 0)

    def parse(self, obj):
        if isinstance(obj, dict):
            return GaussianRational(_frac(obj.get("re", 0)), _frac(obj.get("im", 0)))
        if isinstance(obj, (list, tuple)):
            return GaussianRational(_frac(obj[0]), _frac(obj[1]))
        return self.coerce(obj)

    def format(self, x):
        x = self.coerce(x)
        return {"re": format_fraction(x.re), "im": format_fraction(x.im)}

    def random(self, rng, bound=3):
        q = RATIONALS
        return GaussianRational(q.random(rng, bound), q.random(rng, bound))


class PrimeField(Field):
    is_finite = True

    def __init__(self, p):
        if p < 2 or any(p % k == 0 for k in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.name = f"F_{p}"

    @property
    def zero(self):
        return Fp(0, self.p)

    @property
    def one(self):
        return Fp(1, self.p)

    def coerce(self, x):
        if isinstance(x, Fp):
            if x.p != self.p:
                raise ValueError(f"{x!r} is not in {self.name}")
            return x
        if isinstance(x, str):
            x = _frac(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in {self.name}")
            return Fp(x.numerator * pow(x.denominator, -1, self.p), self.p)
        return Fp(int(x), self.p)

    def parse(self, obj):
        return self.coerce(obj)

    def format(self, x):
        return str(self.coerce(x).v)

    def elements(self):
        return [Fp(v, self.p) for v in range(self.p)]

    def random(self, rng, bound=None):
        return Fp(rng.randrange(self.p), self.p)


RATIONALS = Rationals()
GAUSSIAN_RATIONALS = GaussianRationals()


@lru_cache(maxsize=None)
def prime_field(p):
    return PrimeField(p)


def field_from_spec(spec):
    """Parse ``rationals``, ``gaussian-rationals``, ``F_p``/``GF(p)``/``p``."""
    if isinstance(spec, Field):
        return spec
    s = str(spec).strip().lower()
    if s in ("q", "qq", "rationals", "rational"):
        return RATIONALS
    if s in ("q(i)", "gaussian", "gaussian-rationals", "gaussian_rationals"):
        return GAUSSIAN_RATIONALS
    m = re.fullmatch(r"(?:f_?|gf\(?|f)?(\d+)\)?", s)
    if m:
        return prime_field(int(m.group(1)))
    raise ValueError(f"unknown field {spec!r}")


def format_fraction(x):
    x = _frac(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_scalar(x):
    """JSON form of a scalar from any of the supported fields."""
    if isinstance(x, GaussianRational):
        if x.im == 0:
            return format_fraction(x.re)
        return {"re": format_fraction(x.re), "im": format_fraction(x.im)}
    if isinstance(x, Fp):
        return str(x.v)
    return format_fraction(x)


def to_fraction(x):
    """Real rational value of a scalar (characteristic zero only)."""
    if isinstance(x, GaussianRational):
        if x.im != 0:
            raise ValueError(f"{x} is not real")
        return x.re
    if isinstance(x, Fp):
        raise TypeError("finite-field scalar has no rational value")
    return _frac(x)


def default_rng(seed=0):
    return random.Random(seed)
