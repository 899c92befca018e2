"""Trace functions of the special words, Newton solving and ray continuation.

Traces are holomorphic in the parameter (mu for the Maskit family, tau for
the Koebe families).  Derivatives come from the product rule applied to the
word, carried along as (M, dM) pairs of 2x2 tuples.
"""

import cmath
import math
from dataclasses import dataclass, field

from . import families
from .farey import Frac, word
from .moebius import Mobius


class ConvergenceError(RuntimeError):
    pass


class BranchPointError(RuntimeError):
    """Derivative collapsed; the real locus may branch here."""


DERIV_FLOOR = 1e-14


def _mul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _add(m, n):
    return tuple(x + y for x, y in zip(m, n))


_ZERO = (0j, 0j, 0j, 0j)
_ONE = (1 + 0j, 0j, 0j, 1 + 0j)


@dataclass(frozen=True)
class TraceFunction:
    fraction: Frac
    family: str = "maskit"
    n: int | None = None

    def __post_init__(self):
        if self.family not in ("maskit", "koebe"):
            raise ValueError(f"unknown family {self.family}")
        if self.family == "koebe" and (self.n is None or self.n < 2):
            raise ValueError("koebe family needs n >= 2")

    @property
    def letters(self):
        return word(self.fraction).letters

    def generators(self, param):
        """Letter table {letter: (matrix, derivative)} at the parameter."""
        param = complex(param)
        if self.family == "maskit":
            mu = param
            s = families.S.entries()
            si = families.S.inverse().entries()
            return {"X": (s, _ZERO), "x": (si, _ZERO),
                    "Y": ((-1j * mu, -1j, -1j, 0j), (-1j, 0j, 0j, 0j)),
                    "y": ((0j, 1j, 1j, -1j * mu), (0j, 0j, 0j, -1j))}
        tau = param
        if tau == 0:
            raise ValueError("tau must be nonzero")
        a = families.A(self.n).entries()
        ai = families.A(self.n).inverse().entries()
        if self.n == 2:
            c = (-tau, 1 / tau, -tau, 0j)
            dc = (-1 + 0j, -1 / tau ** 2, -1 + 0j, 0j)
            ci = (0j, -1 / tau, tau, -tau)
            dci = (0j, 1 / tau ** 2, 1 + 0j, -1 + 0j)
        else:
            s = math.sin(math.pi / self.n)
            cot = math.cos(math.pi / self.n) / s
            c = (tau * cot, -tau / s, 1 / (tau * s), -cot / tau)
            dc = (cot + 0j, -1 / s + 0j, -1 / (tau ** 2 * s), cot / tau ** 2)
            ci = (-cot / tau, tau / s, -1 / (tau * s), tau * cot)
            dci = (cot / tau ** 2, 1 / s + 0j, 1 / (tau ** 2 * s), cot + 0j)
        return {"X": (a, _ZERO), "x": (ai, _ZERO), "Y": (c, dc), "y": (ci, dci)}

    def matrix_and_derivative(self, param):
        table = self.generators(param)
        m, dm = _ONE, _ZERO
        for ch in self.letters:
            g, dg = table[ch]
            m, dm = _mul(m, g), _add(_mul(dm, g), _mul(m, dg))
        return m, dm

    def matrix(self, param):
        return Mobius(*self.matrix_and_derivative(param)[0])

    def value_and_derivative(self, param):
        m, dm = self.matrix_and_derivative(param)
        return m[0] + m[3], dm[0] + dm[3]

    def __call__(self, param):
        return self.value_and_derivative(param)[0]

    def derivative(self, param):
        return self.value_and_derivative(param)[1]


def trace(tf, param):
    return tf(param)


def trace_derivative(tf, param):
    return tf.derivative(param)


def _converged(value, target, tol):
    return abs(value - target) <= tol * max(1.0, abs(target))


def solve_trace(tf, target, seed, tol=1e-11, max_steps=100, max_jump=None):
    """Newton's method for tr(param) = target starting at seed."""
    z = complex(seed)
    for _ in range(max_steps):
        v, dv = tf.value_and_derivative(z)
        if _converged(v, target, tol):
            return z
        if abs(dv) < DERIV_FLOOR:
            raise BranchPointError(f"derivative {abs(dv):.3g} at {z}")
        dz = (v - target) / dv
        if max_jump is not None and abs(dz) > max_jump:
            raise ConvergenceError("Newton step left the admissible neighbourhood")
        z -= dz
        if not cmath.isfinite(z):
            break
    v = tf(z) if cmath.isfinite(z) else complex("nan")
    if cmath.isfinite(v) and _converged(v, target, tol):
        return z
    raise ConvergenceError(f"no convergence to trace {target} from {seed}")


@dataclass
class Sample:
    t: float
    param: complex
    flag: str  # inside | cusp | extended


@dataclass
class SpecialPoint:
    label: str
    param: complex
    target: float
    residual: float
    n: int | None = None


@dataclass
class RayTrace:
    fraction: Frac
    family: str
    n: int | None
    sign: int
    samples: list = field(default_factory=list)
    special: list = field(default_factory=list)
    partial: bool = False
    note: str = ""

    def params(self):
        return [s.param for s in self.samples]

    def special_point(self, label):
        for sp in self.special:
            if sp.label == label:
                return sp
        raise KeyError(label)

    @property
    def cusp(self):
        return self.special_point("cusp").param

    def elliptic(self, n):
        return self.special_point(f"elliptic({n})").param


def _flag(t):
    if abs(abs(t) - 2) <= 1e-12:
        return "cusp"
    return "inside" if abs(t) > 2 else "extended"


def seed_point(tf, height=8.0):
    """A point of the real-trace locus high up on the asymptotic branch."""
    f = tf.fraction
    if tf.family == "maskit":
        z0 = 2 * f.p / f.q + 1j * height
    else:
        z0 = height * cmath.exp(-1j * math.pi * f.p / (f.q * tf.n))
    t0 = tf(z0).real
    z = solve_trace(tf, t0, z0)
    return t0, z


class _Tracer:
    def __init__(self, tf, sign, min_step=1e-9):
        self.tf = tf
        self.sign = sign
        self.min_step = min_step

    def advance(self, z, t_from, t_to):
        """Move along the real locus from |tr| = t_from to t_to, halving on trouble."""
        t, step = t_from, t_to - t_from
        while t != t_to:
            if abs(step) < self.min_step * max(1.0, abs(t_to - t_from)):
                raise ConvergenceError(f"step collapsed near |tr| = {t}")
            t_next = t_to if abs(t_to - t) <= abs(step) else t + step
            v, dv = self.tf.value_and_derivative(z)
            if abs(dv) < DERIV_FLOOR:
                raise BranchPointError(f"derivative {abs(dv):.3g} at {z}")
            predicted = z + self.sign * (t_next - t) / dv
            jump = 3 * abs(t_next - t) / abs(dv) + 1e-12
            try:
                z_new = solve_trace(self.tf, self.sign * t_next, predicted, max_jump=jump)
            except ConvergenceError:
                step /= 2
                continue
            if abs(z_new - predicted) > jump:
                step /= 2
                continue
            z, t = z_new, t_next
        return z


def _continue(tf, t_start, t_end, step, ns, height):
    t_seed, z = seed_point(tf, height)
    sign = 1 if t_seed > 0 else -1
    ray = RayTrace(tf.fraction, tf.family, tf.n, sign)
    tracer = _Tracer(tf, sign)
    if t_start is None:
        t_start = abs(t_seed)
    try:
        z = tracer.advance(z, abs(t_seed), t_start)
    except (ConvergenceError, BranchPointError) as e:
        ray.partial, ray.note = True, f"failed before the first sample: {e}"
        return ray
    count = int(math.floor((t_start - t_end) / step + 1e-9))
    grid = [t_start - k * step for k in range(count + 1)] + [t_end]
    marks = [m for m in [2.0] + [2 * math.cos(math.pi / k) for k in ns] if t_end <= m <= t_start]
    # marks win over nearby grid points so no two targets sit closer than 1e-9
    if all(abs(t_end - m) > 1e-9 for m in marks):
        marks = marks + [t_end]
    grid = [g for g in grid if all(abs(g - m) > 1e-9 for m in marks)] + marks
    grid = sorted(set(grid), reverse=True)
    t_prev = t_start
    for target in grid:
        try:
            z = tracer.advance(z, t_prev, target)
        except BranchPointError as e:
            ray.partial = True
            ray.note = f"stopped at a critical point of the trace, branch not chosen: {e}"
            break
        except ConvergenceError as e:
            ray.partial, ray.note = True, f"continuation failed: {e}"
            break
        ray.samples.append(Sample(sign * target, z, _flag(target)))
        t_prev = target
    _refine_special(tf, ray, ns)
    return ray


def _refine_special(tf, ray, ns):
    wanted = [("cusp", 2.0, None)] + [(f"elliptic({k})", 2 * math.cos(math.pi / k), k) for k in ns]
    for label, target, k in wanted:
        near = [s for s in ray.samples if abs(abs(s.t) - target) <= 1e-9]
        if not near:
            continue
        z = solve_trace(tf, ray.sign * target, near[0].param)
        ray.special.append(SpecialPoint(label, z, ray.sign * target,
                                        abs(tf(z) - ray.sign * target), k))


def trace_ray(tf, t_start=None, t_end=0.0, step=0.05, ns=(), height=8.0):
    """Follow the real branch of the trace from inside the slice through the cusp.

    t_start and t_end are trace magnitudes; the branch sign is read at the
    seed and kept.  Samples land on every multiple of `step` below t_start
    and on the targets 2 and 2cos(pi/n) for the requested n.
    """
    if tf.family != "maskit":
        raise ValueError("use koebe_ray for the Koebe families")
    if t_start is None:
        t_start = max(10.0, t_end + step)
    return _continue(tf, t_start, t_end, step, ns, height)


def koebe_sector(f, n):
    """Range of arg tau^2 allowed for the f ray in M_n."""
    k = math.floor(f.p / f.q) % n
    return -2 * math.pi * (k + 1) / n, -2 * math.pi * k / n


def arg_tau_squared(tau, f, n):
    # unwrapped near the asymptotic direction -2 pi p/(q n)
    ref = -2 * math.pi * f.p / (f.q * n)
    a = 2 * cmath.phase(tau)
    return a + 2 * math.pi * round((ref - a) / (2 * math.pi))


def koebe_ray(n, f, t_start=10.0, step=0.05, height=8.0):
    """The f pleating ray in the tau plane of M_n, ending where W_f is parabolic."""
    if n < 3:
        raise ValueError("n must be at least 3")
    f = Frac.make(f.p % (n * f.q), f.q) if f.q else f
    tf = TraceFunction(f, "koebe", n)
    ray = _continue(tf, t_start, 2.0, step, (), height)
    lo, hi = koebe_sector(f, n)
    bad = [s for s in ray.samples
           if not (lo - 1e-9 <= arg_tau_squared(s.param, f, n) <= hi + 1e-9)]
    ray.sector = (lo, hi)
    ray.sector_ok = not bad
    return ray


def elliptic_points(f, ns, family="maskit", n=None):
    """mu_{p/q}(k) for each k in ns: points on the extended ray where |tr W| = 2cos(pi/k)."""
    tf = TraceFunction(f, family, n)
    lowest = min(2 * math.cos(math.pi / k) for k in ns)
    ray = trace_ray(tf, t_start=10.0, t_end=max(lowest - 1e-3, 0.0), step=0.05, ns=ns)
    return {k: ray.elliptic(k) for k in ns}


def cusp(f):
    tf = TraceFunction(f)
    return trace_ray(tf, t_start=10.0, t_end=2.0, step=0.05).cusp
