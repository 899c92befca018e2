"""One-sided discreteness tests: Jorgensen's inequality, triangle signatures, isometric circles."""

import math
from dataclasses import dataclass

import numpy as np

from . import families
from .farey import Frac, evaluate, upper_neighbor, word
from .moebius import GeneralizedDisk, classify, fixed_points, is_inf

ELEMENTARY_TOL = 1e-9
ESCAPE_ORDERS = (2, 3, 4, 6)


def chordal(z, w):
    """Chordal distance on the Riemann sphere."""
    if is_inf(z) and is_inf(w):
        return 0.0
    if is_inf(z):
        z, w = w, z
    if is_inf(w):
        return 2 / math.sqrt(1 + abs(z) ** 2)
    return 2 * abs(z - w) / math.sqrt((1 + abs(z) ** 2) * (1 + abs(w) ** 2))


def _fix(m):
    if m.is_identity(ELEMENTARY_TOL):
        return None
    return fixed_points(m)


def _maps_set_to_itself(g, pts):
    images = [g(p) for p in pts]
    return all(min(chordal(a, b) for b in pts) <= ELEMENTARY_TOL for a in images)


@dataclass
class JorgensenReport:
    f: object
    g: object
    value: float
    verdict: str                 # violating | inconclusive | elementary-suspect
    reason: str = ""
    escape_order: int | None = None


def jorgensen(f, g):
    """|tr^2 f - 4| + |tr [f, g] - 2|; only ever certifies non-discreteness."""
    comm = f @ g @ f.inverse() @ g.inverse()
    value = abs(f.trace ** 2 - 4) + abs(comm.trace - 2)
    escape = None
    for h in (g, f):
        c = classify(h)
        if c.kind == "elliptic" and c.order in ESCAPE_ORDERS:
            escape = c.order
    ff, fg = _fix(f), _fix(g)
    reason = ""
    if ff is None or fg is None:
        reason = "identity generator"
    elif comm.is_identity(ELEMENTARY_TOL):
        reason = "commuting pair"
    elif min(chordal(a, b) for a in ff for b in fg) <= ELEMENTARY_TOL:
        reason = "shared fixed point"
    elif _maps_set_to_itself(g, ff) or _maps_set_to_itself(f, fg):
        reason = "fixed point set preserved"
    elif classify(f).kind == "elliptic" and classify(g).kind == "elliptic":
        # two elliptics may generate a finite group; not certified here
        reason = "two elliptic generators"
    if reason:
        verdict = "elementary-suspect"
    elif value < 1 - 1e-12:
        verdict = "violating"
    else:
        verdict = "inconclusive"
    return JorgensenReport(f, g, value, verdict, reason, escape)


@dataclass
class ScanResult:
    f: Frac
    n: int
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray           # J per cell, indexed [row, col] = [y, x]
    verdicts: list               # rows of verdict strings
    escape: list                 # rows of escape orders (or None)

    def count(self, verdict):
        return sum(v == verdict for row in self.verdicts for v in row)

    def center(self):
        return self.verdicts[len(self.ys) // 2][len(self.xs) // 2]


def nondiscreteness_scan(center, radius, f, n, grid):
    """Jorgensen test of (K, W_f^n) on a grid x grid square around `center`."""
    if grid < 1:
        raise ValueError("grid must be positive")
    K = families.maskit_group(0).K
    w = word(f)
    if grid == 1:
        xs = np.array([center.real])
        ys = np.array([center.imag])
    else:
        xs = np.linspace(center.real - radius, center.real + radius, grid)
        ys = np.linspace(center.imag - radius, center.imag + radius, grid)
    values = np.zeros((len(ys), len(xs)))
    verdicts, escape = [], []
    for i, y in enumerate(ys):
        vrow, erow = [], []
        for j, x in enumerate(xs):
            mu = complex(x, y)
            g = evaluate(w, families.S, families.T(mu)) ** n
            rep = jorgensen(K, g)
            values[i, j] = rep.value
            vrow.append(rep.verdict)
            erow.append(rep.escape_order)
        verdicts.append(vrow)
        escape.append(erow)
    return ScanResult(f, n, xs, ys, values, verdicts, escape)


@dataclass
class Signature:
    verdict: str                 # triangle | non-discrete | cusp | loxodromic
    order: int | None
    traces: tuple
    detail: str = ""

    @property
    def signature(self):
        if self.verdict == "triangle":
            return (self.order, self.order, math.inf)
        return None


def triangle_signature(mu, f, tol=1e-6):
    """Classify the subgroup generated by W_f and its conjugate partner at mu.

    The pair is W_f and W_r^-1 W_f^-1 W_r with r the upper neighbour of f; all
    three traces (the two generators and their product) must be real.
    """
    s, t = families.S, families.T(mu)
    a = evaluate(word(f), s, t)
    r = evaluate(word(upper_neighbor(f)), s, t)
    b = r.inverse() @ a.inverse() @ r
    k = a @ b
    traces = (a.trace, b.trace, k.trace)
    worst = max(abs(x.imag) for x in traces)
    if worst > tol:
        raise ValueError(f"mu is off the real trace locus (|Im tr| = {worst:.3g})")
    c = classify(a, tol=1e-8)
    if c.kind == "parabolic":
        return Signature("cusp", None, traces, "torsion-free triangle group")
    if c.kind != "elliptic":
        return Signature("loxodromic", None, traces, "W is not elliptic")
    if c.order is None:
        return Signature("non-discrete", None, traces, "elliptic of infinite order")
    if not c.primitive:
        return Signature("non-discrete", c.order, traces,
                         "elliptic of finite order but not a primitive rotation")
    return Signature("triangle", c.order, traces)


def isometric_circle(m):
    """Circle |cz + d| = 1 where m acts as a Euclidean isometry."""
    if abs(m.c) < 1e-14:
        raise ValueError("transformation fixes infinity")
    return GeneralizedDisk.circle(-m.d / m.c, 1 / abs(m.c))


def ford_circles(gens):
    """Isometric circles of the generators and their inverses."""
    out = []
    for g in gens:
        for h in (g, g.inverse()):
            if abs(h.c) >= 1e-14:
                out.append(isometric_circle(h))
    return out


