"""Farey fractions and the special words W_{p/q}.

Words are strings over four letters: 'x' is X^-1, 'X' is X, 'Y' is Y and
'y' is Y^-1.  A word is read left to right as a matrix product.

Conventions (checked against matrices in the tests):
  * W_{1/0} = x, W_{0/1} = Y, and for neighbours a/b < c/d in [0, inf],
    W_{(a+c)/(b+d)} = W_{c/d} W_{a/b}.
  * For p/q >= 0 this agrees with the Dehn-twist shift Y -> x^m Y applied to
    the word of the fractional part.
  * For p/q < 0 the word is the reversal of that shifted word.  This keeps
    traces equal to the shifted formula and makes the composition identity
    W_{-s/q}[W_{p/q}^-1, W_{r/s}] = S^-1 hold letter for letter.
"""

import math
import threading
from dataclasses import dataclass
from functools import total_ordering

from .moebius import Mobius


@total_ordering
@dataclass(frozen=True)
class Frac:
    p: int
    q: int

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("denominator must be nonnegative, use Frac.make")
        if self.q == 0 and self.p != 1:
            raise ValueError("infinity is 1/0")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"{self.p}/{self.q} is not reduced")

    @classmethod
    def make(cls, p, q=1):
        if q < 0:
            p, q = -p, -q
        if q == 0:
            if p == 0:
                raise ValueError("0/0")
            return cls(1, 0)
        g = math.gcd(p, q)
        return cls(p // g, q // g)

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if "/" in text:
            p, q = text.split("/")
            return cls.make(int(p), int(q))
        return cls.make(int(text), 1)

    @property
    def value(self):
        return math.inf if self.q == 0 else self.p / self.q

    @property
    def is_integral(self):
        return self.q == 1

    def floor(self):
        return self.p // self.q

    def __add__(self, m):
        return Frac.make(self.p + m * self.q, self.q)

    def __sub__(self, m):
        return self + (-m)

    def __lt__(self, other):
        if self.q == 0:
            return False
        if other.q == 0:
            return True
        return self.p * other.q < other.p * self.q

    def __str__(self):
        return f"{self.p}/{self.q}"


INFINITY = Frac(1, 0)
ZERO = Frac(0, 1)


def is_neighbor(a, b):
    return abs(a.p * b.q - a.q * b.p) == 1


def farey_parents(f):
    """Stern-Brocot parents (a/b, c/d) of f in (0, 1], with a/b < f < c/d."""
    if f.q == 0 or not (0 < f.p <= f.q):
        raise ValueError("parents are defined for fractions in (0, 1]")
    lo, hi = (0, 1), (1, 0)
    while True:
        mp, mq = lo[0] + hi[0], lo[1] + hi[1]
        if (mp, mq) == (f.p, f.q):
            return Frac.make(*lo), Frac.make(*hi)
        if f.p * mq < mp * f.q:
            hi = (mp, mq)
        else:
            lo = (mp, mq)


def upper_neighbor(f):
    """Neighbour r/s > f used to pair with f: the upper parent, shifted.

    Integers m/1 are paired with (m+1)/1.
    """
    if f.q == 0:
        raise ValueError("no upper neighbour for 1/0")
    m = f.floor()
    frac = f - m
    if frac.p == 0:
        return Frac.make(m + 1, 1)
    return farey_parents(frac)[1] + m


def lower_neighbor(f):
    """The other Stern-Brocot parent of f (shifted); (m-1)/1 for integers."""
    if f.q == 0:
        raise ValueError("no lower neighbour for 1/0")
    m = f.floor()
    frac = f - m
    if frac.p == 0:
        return Frac.make(m - 1, 1)
    return farey_parents(frac)[0] + m


INV = {"x": "X", "X": "x", "y": "Y", "Y": "y"}


def reduce_word(w):
    out = []
    for ch in w:
        if out and out[-1] == INV[ch]:
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def invert_word(w):
    return "".join(INV[ch] for ch in reversed(w))


def cyclically_reduce(w):
    w = reduce_word(w)
    while len(w) > 1 and w[0] == INV[w[-1]]:
        w = w[1:-1]
    return w


def cyclic_conjugates(u, v):
    """True when u and v are conjugate in the free group."""
    u, v = cyclically_reduce(u), cyclically_reduce(v)
    return len(u) == len(v) and u in v + v


_lock = threading.Lock()
_cache = {}


def _unit_word(p, q):
    # Farey recursion on [0, 1] (plus 1/0)
    if (p, q) == (1, 0):
        return "x"
    if (p, q) == (0, 1):
        return "Y"
    lo, hi = (0, 1), (1, 0)
    while True:
        mp, mq = lo[0] + hi[0], lo[1] + hi[1]
        if (mp, mq) == (p, q):
            return _unit_word(*hi) + _unit_word(*lo)
        if p * mq < mp * q:
            hi = (mp, mq)
        else:
            lo = (mp, mq)


def _letters(f):
    if f.q == 0:
        return "x"
    m = f.floor()
    base = _unit_word(f.p - m * f.q, f.q)
    shift = "x" * m if m >= 0 else "X" * (-m)
    w = reduce_word("".join(shift + "Y" if ch == "Y" else ch for ch in base))
    return w if m >= 0 else w[::-1]


@dataclass(frozen=True)
class FareyWord:
    fraction: Frac
    letters: str

    def __len__(self):
        return len(self.letters)

    def pretty(self):
        names = {"x": "X⁻¹", "X": "X", "Y": "Y", "y": "Y⁻¹"}
        return " ".join(names[ch] for ch in self.letters)


def word(f):
    """The word W_f; results are cached and the cache only ever holds finished entries."""
    w = _cache.get(f)
    if w is None:
        w = FareyWord(f, _letters(f))
        with _lock:
            _cache.setdefault(f, w)
    return w


def _letters_of(w):
    return w.letters if isinstance(w, FareyWord) else w


def evaluate(w, X, Y):
    """Left-to-right product of the letters with X, Y substituted."""
    table = {"X": X, "x": X.inverse(), "Y": Y, "y": Y.inverse()}
    out = Mobius.identity()
    for ch in _letters_of(w):
        out = out @ table[ch]
    return out


def substitute(w, x_word, y_word):
    """The freely reduced word w[X := x_word, Y := y_word]."""
    x_word, y_word = _letters_of(x_word), _letters_of(y_word)
    table = {"X": x_word, "x": invert_word(x_word), "Y": y_word, "y": invert_word(y_word)}
    return reduce_word("".join(table[ch] for ch in _letters_of(w)))


def oz_compose(mn, pq, rs):
    """Fraction of W_{m/n}[W_{p/q}^-1, W_{r/s}] for neighbours p/q, r/s.

    Equals (m p + n r)/(m q + n s); the word identity is exact when m/n >= 0
    and r/s < p/q, and holds up to conjugacy and inversion otherwise.
    """
    if not is_neighbor(pq, rs):
        raise ValueError(f"{pq} and {rs} are not Farey neighbours")
    return Frac.make(mn.p * pq.p + mn.q * rs.p, mn.p * pq.q + mn.q * rs.q)


def word_equal_mod_n(a, b, n):
    """Whether W_a and W_b agree once X has order n (shift by a multiple of n)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if a.q != b.q:
        return False
    if a.q == 0:
        return True
    return (b.p - a.p) % (n * a.q) == 0
