"""The two parameterized group families and their distinguished elements."""

import cmath
import math
from dataclasses import dataclass, field

from .moebius import Mobius, three_point_map

S = Mobius(1 + 0j, 2 + 0j, 0j, 1 + 0j)
# z -> -z, normalizes G[mu] onto G[-mu]
E = Mobius(1j, 0j, 0j, -1j)


def T(mu):
    mu = complex(mu)
    return Mobius(-1j * mu, -1j, -1j, 0j)


@dataclass(frozen=True)
class MaskitGroup:
    mu: complex
    S: Mobius = field(init=False)
    T: Mobius = field(init=False)
    S_tilde: Mobius = field(init=False)
    K: Mobius = field(init=False)

    def __post_init__(self):
        t = T(self.mu)
        st = t.inverse() @ S.inverse() @ t
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "T", t)
        object.__setattr__(self, "S_tilde", st)
        object.__setattr__(self, "K", S @ st)

    @property
    def generators(self):
        return [self.S, self.T]


def maskit_group(mu):
    return MaskitGroup(complex(mu))


def normalize_parameter(mu):
    """Representative of mu under mu -> -mu (conjugation by E), mu -> conj(mu)
    (reflection) and mu -> mu + 2 (Dehn shift), with Im >= 0 and 0 <= Re <= 1.

    Returns the representative and the list of moves applied.
    """
    mu = complex(mu)
    moves = []
    if mu.imag < 0:
        mu = -mu
        moves.append("negate")
    k = math.ceil((mu.real - 1) / 2)
    if k:
        mu -= 2 * k
        moves.append(f"shift {-2 * k:+d}")
    if mu.real < 0:
        mu = -mu.conjugate()
        moves.append("reflect")
    return mu, moves


def A(n):
    if n == 2:
        return Mobius(1j, 0j, 0j, -1j)
    w = cmath.exp(1j * math.pi / n)
    return Mobius(1 / w, 0j, 0j, w)


def B(n):
    if n == 2:
        return Mobius(1j, -2j, 0j, -1j)
    s, c = math.sin(math.pi / n), math.cos(math.pi / n)
    w = cmath.exp(1j * math.pi / n)
    return Mobius(2j / s - w, -2j * c / s, 2j * c / s, -2j / s - 1 / w)


def B_hyperbolic_form(n):
    # the same matrix written through the full fixed point distance d_n
    s, c = math.sin(math.pi / n), math.cos(math.pi / n)
    d = koebe_distance(n)
    ch, sh = math.cosh(d), math.sinh(d)
    return Mobius(1j * s * ch - c, -1j * s * sh, 1j * s * sh, -1j * s * ch - c)


def C(n, tau):
    tau = complex(tau)
    if tau == 0:
        raise ValueError("tau must be nonzero")
    if n == 2:
        return Mobius(-tau, 1 / tau, -tau, 0j)
    s, c = math.sin(math.pi / n), math.cos(math.pi / n)
    cot = c / s
    return Mobius(tau * cot, -tau / s, 1 / (tau * s), -cot / tau)


def C_hyperbolic_form(n, tau):
    tau = complex(tau)
    d = koebe_distance(n)
    ch, sh = math.cosh(d / 2), math.sinh(d / 2)
    return Mobius(tau * sh, -tau * ch, ch / tau, -sh / tau)


def koebe_distance(n):
    """Hyperbolic distance between the fixed points of A_n and B_n in the upper half-space."""
    if n < 3:
        raise ValueError("defined for n >= 3")
    return 2 * math.acosh(1 / math.sin(math.pi / n))


@dataclass(frozen=True)
class KoebeGroup:
    n: int
    tau: complex
    A: Mobius = field(init=False)
    B: Mobius = field(init=False)
    C: Mobius = field(init=False)
    K: Mobius = field(init=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        object.__setattr__(self, "A", A(self.n))
        object.__setattr__(self, "B", B(self.n))
        object.__setattr__(self, "C", C(self.n, self.tau))
        object.__setattr__(self, "K", self.A @ self.B)

    @property
    def d(self):
        return koebe_distance(self.n) if self.n >= 3 else None

    @property
    def tau_squared(self):
        return self.tau ** 2

    @property
    def trace_coordinate(self):
        # the i tr C coordinate used for the covering picture
        return 1j * self.C.trace

    @property
    def generators(self):
        return [self.A, self.B, self.C]


def koebe_relation_residual(n, tau):
    """Distance in PSL(2,C) between the two sides of the relation tying C to A and B.

    C^-1 A C = B^-1 for n >= 3; for n = 2, where A and B are involutions,
    the matrices satisfy C A C^-1 = B instead.
    """
    a, b, c = A(n), B(n), C(n, tau)
    if n == 2:
        return (c @ a @ c.inverse()).distance(b)
    return (c.inverse() @ a @ c).distance(b.inverse())


def koebe_group(n, tau):
    if n < 2:
        raise ValueError("n must be at least 2")
    if tau == 0:
        raise ValueError("tau must be nonzero")
    return KoebeGroup(n, complex(tau))


def koebe_discreteness_radius(n):
    if n < 2:
        raise ValueError("n must be at least 2")
    if n == 2:
        return 2.0
    return (1 + math.sin(math.pi / n)) / math.cos(math.pi / n)


def tau_01(n):
    """tau on the positive axis where C_n[tau] is parabolic; equals coth(d_n / 4)."""
    return koebe_discreteness_radius(n)


def mu_integral(m, n):
    return 2 * m + 2j * math.cos(math.pi / n)


def beta_conjugator(n):
    """Mobius map carrying G[mu_0(n)] onto G_n[tau_{0/1}]."""
    if n < 3:
        raise ValueError("n must be at least 3")
    w = cmath.exp(1j * math.pi / n)
    return three_point_map(1j / w - 2, 1j * w - 2, -1 + 0j, 0j, complex("inf"), 1 / w)


def beta_images(n):
    """Images of S^-1 T^-1 S, T and S^-1 under conjugation by beta at mu_0(n)."""
    b = beta_conjugator(n)
    t = T(mu_integral(0, n))
    conj = lambda g: b @ g @ b.inverse()
    return conj(S.inverse() @ t.inverse() @ S), conj(t), conj(S.inverse())


def quotient_area(n):
    """Hyperbolic area of the quotient of the non-invariant components."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if n == 2:
        return 2 * math.pi
    return 2 * math.pi * (1 - 2 / n) + 2 * math.pi
