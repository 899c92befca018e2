"""Mobius transformations as SL(2,C) matrices, plus generalized disks.

A generalized disk is stored as a Hermitian form H = [[A, B], [conj(B), C]]
with the disk being {z : A|z|^2 + 2 Re(conj(B) z) + C <= 0}.  Forms are
scaled so that |B|^2 - A C = 1, which makes the sign of H carry the side
and lets images be computed exactly as (M^-1)^* H M^-1.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

INF = complex(math.inf, 0.0)

POLE_TOL = 1e-14
DET_TOL = 1e-12


def is_inf(z):
    return cmath.isinf(z)


@dataclass(frozen=True)
class Mobius:
    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def from_entries(cls, a, b, c, d):
        """Scale an invertible matrix to determinant one."""
        det = a * d - b * c
        if abs(det) == 0:
            raise ValueError("singular matrix")
        s = cmath.sqrt(det)
        return cls(complex(a) / s, complex(b) / s, complex(c) / s, complex(d) / s)

    @classmethod
    def identity(cls):
        return cls(1 + 0j, 0j, 0j, 1 + 0j)

    def __matmul__(self, o):
        return Mobius(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                      self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def __pow__(self, k):
        base = self if k >= 0 else self.inverse()
        out = Mobius.identity()
        for _ in range(abs(k)):
            out = out @ base
        return out

    def inverse(self):
        # adjugate; exact for det 1
        return Mobius(self.d, -self.b, -self.c, self.a)

    @property
    def trace(self):
        return self.a + self.d

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __call__(self, z):
        return apply(self, z)

    def canonical(self):
        """Representative of +-M whose first nonzero entry has Re > 0 (Im > 0 on ties)."""
        for x in self.entries():
            if abs(x) > 0:
                if x.real < 0 or (x.real == 0 and x.imag < 0):
                    return Mobius(-self.a, -self.b, -self.c, -self.d)
                return self
        return self

    def distance(self, other):
        """Entrywise max distance in PSL(2,C), i.e. minimized over the sign."""
        plus = max(abs(x - y) for x, y in zip(self.entries(), other.entries()))
        minus = max(abs(x + y) for x, y in zip(self.entries(), other.entries()))
        return min(plus, minus)

    def close(self, other, tol=1e-10):
        return self.distance(other) <= tol

    def is_identity(self, tol=1e-12):
        return self.distance(Mobius.identity()) <= tol


def compose(m1, m2):
    return (m1 @ m2).canonical()


def inverse(m):
    return m.inverse()


def apply(m, z):
    """Image of z under m; infinity handled by case analysis."""
    if is_inf(z):
        if abs(m.c) < POLE_TOL:
            return INF
        return m.a / m.c
    den = m.c * z + m.d
    if abs(den) < POLE_TOL:
        return INF
    return (m.a * z + m.b) / den


@dataclass(frozen=True)
class Classification:
    kind: str                      # identity | parabolic | elliptic | loxodromic
    trace: complex
    angle: float | None = None     # rotation angle in (0, 2pi) for elliptics
    order: int | None = None       # finite order if detected
    primitive: bool | None = None  # rotation by 2pi/order exactly

    def __str__(self):
        if self.kind != "elliptic":
            return self.kind
        if self.order is None:
            return "elliptic, order undetected"
        return f"elliptic of order {self.order}"


def rational_rotation(phi_over_pi, tol=1e-8, max_den=1000):
    frac = Fraction(phi_over_pi).limit_denominator(max_den)
    if abs(float(frac) - phi_over_pi) <= tol:
        return frac
    return None


def classify(m, tol=1e-10):
    t = m.trace
    t2 = t * t
    if abs(t2.imag) > tol * max(1.0, abs(t2)):
        return Classification("loxodromic", t)
    x = t2.real
    if abs(x - 4) <= tol * 4:
        if m.is_identity(1e-9):
            return Classification("identity", t)
        return Classification("parabolic", t)
    if -tol <= x < 4:
        # |tr| = 2 cos(phi), rotation angle 2 phi
        phi = math.acos(min(1.0, math.sqrt(max(x, 0.0)) / 2))
        frac = rational_rotation(phi / math.pi)
        if frac is None or frac == 0:
            return Classification("elliptic", t, angle=2 * phi)
        return Classification("elliptic", t, angle=2 * phi, order=frac.denominator,
                               primitive=frac.numerator == 1)
    return Classification("loxodromic", t)


def fixed_points(m):
    """Fixed points; parabolic gives one, otherwise two with the attracting one first."""
    kind = classify(m).kind
    if kind == "identity":
        raise ValueError("identity fixes every point")
    a, b, c, d = m.entries()
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if abs(c) <= 1e-14 * scale:
        if kind == "parabolic":
            return [INF]
        other = b / (d - a)
        # z -> (a/d) z + b/d ; infinity attracts when |a/d| > 1
        return [INF, other] if abs(a) > abs(d) else [other, INF]
    if kind == "parabolic":
        return [(a - d) / (2 * c)]
    root = cmath.sqrt((a + d) ** 2 - 4)
    z1 = (a - d + root) / (2 * c)
    z2 = (a - d - root) / (2 * c)
    # derivative at a fixed point is 1/(cz+d)^2
    if abs(c * z1 + d) >= abs(c * z2 + d):
        return [z1, z2]
    return [z2, z1]


def _to_zero_inf_one(z1, z2, z3):
    # sends z1, z2, z3 to 0, inf, 1
    if is_inf(z1):
        return (0j, z3 - z2, 1 + 0j, -z2)
    if is_inf(z2):
        return (1 + 0j, -z1, 0j, z3 - z1)
    if is_inf(z3):
        return (1 + 0j, -z1, 1 + 0j, -z2)
    return (z3 - z2, -z1 * (z3 - z2), z3 - z1, -z2 * (z3 - z1))


def _distinct(pts):
    for i in range(3):
        for j in range(i + 1, 3):
            p, q = pts[i], pts[j]
            if is_inf(p) and is_inf(q):
                return False
            if not is_inf(p) and not is_inf(q) and abs(p - q) <= 1e-14 * max(1, abs(p)):
                return False
    return True


def three_point_map(z1, z2, z3, w1, w2, w3):
    """The Mobius map sending z_i to w_i."""
    if not _distinct((z1, z2, z3)) or not _distinct((w1, w2, w3)):
        raise ValueError("points must be distinct")
    mz = Mobius.from_entries(*_to_zero_inf_one(z1, z2, z3))
    mw = Mobius.from_entries(*_to_zero_inf_one(w1, w2, w3))
    return mw.inverse() @ mz


class GeneralizedDisk:
    """Closed round disk, disk complement or half-plane of the Riemann sphere."""

    __slots__ = ("A", "B", "C")

    def __init__(self, A, B, C):
        A, C = float(A), float(C)
        B = complex(B)
        n = abs(B) ** 2 - A * C
        if n <= 0:
            raise ValueError("form does not describe a circle")
        s = math.sqrt(n)
        self.A, self.B, self.C = A / s, B / s, C / s

    @classmethod
    def circle(cls, center, radius, inside=True):
        if radius <= 0:
            raise ValueError("radius must be positive")
        center = complex(center)
        sign = 1.0 if inside else -1.0
        return cls(sign, -sign * center, sign * (abs(center) ** 2 - radius ** 2))

    @classmethod
    def halfplane(cls, point, normal):
        """Half-plane through `point` whose outward normal is `normal`."""
        n = complex(normal) / abs(normal)
        return cls(0.0, n, -2 * (n.conjugate() * complex(point)).real)

    @property
    def is_halfplane(self):
        return abs(self.A) <= 1e-12 * max(1.0, abs(self.C))

    @property
    def inside(self):
        """True for a bounded disk, False for a disk complement."""
        return self.A > 0

    @property
    def center(self):
        if self.is_halfplane:
            return INF
        return -self.B / self.A

    @property
    def radius(self):
        if self.is_halfplane:
            return math.inf
        return 1 / abs(self.A)

    @property
    def normal(self):
        # outward normal of a half-plane
        return self.B / abs(self.B)

    def form(self, z):
        if is_inf(z):
            return 0.0 if self.is_halfplane else math.copysign(math.inf, self.A)
        return self.A * abs(z) ** 2 + 2 * (self.B.conjugate() * z).real + self.C

    def contains(self, z, tol=1e-9):
        return self.form(z) <= tol

    def signed_distance(self, z):
        """Euclidean distance from z to the boundary, negative inside."""
        if self.is_halfplane:
            return self.form(z) / (2 * abs(self.B))
        d = abs(z - self.center) - self.radius
        return d if self.inside else -d

    def complement(self):
        return GeneralizedDisk(-self.A, -self.B, -self.C)

    def boundary_points(self, k=64):
        if self.is_halfplane:
            p0 = -self.C * self.B / 2
            tang = 1j * self.normal
            return [p0 + tang * (j - k // 2) for j in range(k)]
        c, r = self.center, self.radius
        return [c + r * cmath.exp(2j * math.pi * j / k) for j in range(k)]

    def hermitian(self):
        return (self.A, self.B, self.C)

    def distance(self, other):
        return max(abs(self.A - other.A), abs(self.B - other.B), abs(self.C - other.C))

    def close(self, other, tol=1e-9):
        return self.distance(other) <= tol

    def __repr__(self):
        if self.is_halfplane:
            return f"GeneralizedDisk(halfplane normal={self.normal:.6g}, offset={self.C:.6g})"
        kind = "disk" if self.inside else "exterior"
        return f"GeneralizedDisk({kind} center={self.center:.10g}, radius={self.radius:.10g})"


LOWER_HALF_PLANE = GeneralizedDisk(0.0, 1j, 0.0)
UPPER_HALF_PLANE = LOWER_HALF_PLANE.complement()


def map_disk(m, disk):
    """Image of a generalized disk: the form (M^-1)^* H M^-1."""
    a, b, c, d = m.inverse().entries()
    A, B, C = disk.A, disk.B, disk.C
    # H' = N^* H N with N = M^-1 = [[a, b], [c, d]]
    A2 = (A * abs(a) ** 2 + 2 * (a.conjugate() * B * c).real + C * abs(c) ** 2)
    B2 = (A * a.conjugate() * b + B * a.conjugate() * d + B.conjugate() * c.conjugate() * b
          + C * c.conjugate() * d)
    C2 = (A * abs(b) ** 2 + 2 * (b.conjugate() * B * d).real + C * abs(d) ** 2)
    return GeneralizedDisk(A2, B2, C2)


def inversive_distance(d1, d2):
    """Mobius-invariant pairing of two oriented disks.

    1 when tangent with disjoint interiors, > 1 when disjoint, |.| < 1 when the
    boundaries cross, <= -1 when one disk contains the other.
    """
    return (d1.A * d2.C + d2.A * d1.C - 2 * (d1.B * d2.B.conjugate()).real) / 2


def tangency_residual(d1, d2):
    """Euclidean tangency gap |dist - (r1 + r2)| / max(r1, r2, 1) for outside tangency.

    Half-planes use the signed distance to the line; two half-planes are
    tangent at infinity when their normals are opposite.
    """
    if d1.is_halfplane and d2.is_halfplane:
        return abs(d1.normal + d2.normal)
    if d1.is_halfplane:
        d1, d2 = d2, d1
    if d2.is_halfplane:
        if not d1.inside:
            return math.inf
        return abs(d2.signed_distance(d1.center) - d1.radius) / max(d1.radius, 1.0)
    r1, r2 = d1.radius, d2.radius
    gap = abs(d1.center - d2.center)
    if d1.inside and d2.inside:
        return abs(gap - (r1 + r2)) / max(r1, r2, 1.0)
    if d1.inside != d2.inside:
        return abs(gap - abs(r1 - r2)) / max(r1, r2, 1.0)
    return math.inf
