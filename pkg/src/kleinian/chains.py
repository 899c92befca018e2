"""Tangent circle chains for the special-word generators and their verification.

Conventions (validated by `verify_combinatorial`, not assumed):
  * At a parameter mu the generators are X = W_f and Z = W_r, r the upper
    Farey neighbour of f = p/q, s the denominator of r.
  * The chain generators are A = X^-1 and C = Z.  The chain word is
    W_{-s/q}[A, C], which reduces to S^-1 letter for letter.
  * The base disk is the closed lower half-plane, placed at index 0; it is
    stabilized by the chain word.
  * C moves the index by -s and A by +q, so X moves it by -q.  Carriers for
    s + q consecutive indices are the suffixes of the chain word; every other
    index is reached by powers of X.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import families
from .farey import Frac, evaluate, lower_neighbor, upper_neighbor, word
from .moebius import (INF, LOWER_HALF_PLANE, Mobius, classify, fixed_points, inversive_distance,
                      is_inf, map_disk, tangency_residual, three_point_map)

TANGENT_TOL = 1e-8
CARRIER_TOL = 1e-9
DISTINCT_TOL = 1e-7
SHIFT_TOL = 1e-7

# letters of carrier words: X = W_f, Z = W_r and their inverses
_INV = {"X": "x", "x": "X", "Z": "z", "z": "Z"}


def chain_generators(f, mu):
    s, t = families.S, families.T(mu)
    return evaluate(word(f), s, t), evaluate(word(upper_neighbor(f)), s, t)


def evaluate_carrier(w, X, Z):
    table = {"X": X, "x": X.inverse(), "Z": Z, "z": Z.inverse()}
    out = Mobius.identity()
    for ch in w:
        out = out @ table[ch]
    return out


def chain_word(f):
    """W_{-s/q} over the chain letters: A = X^-1 is 'x', C = Z is 'Z'."""
    r = upper_neighbor(f)
    letters = word(Frac.make(-r.q, f.q)).letters
    tr = {"X": "x", "x": "X", "Y": "Z", "y": "z"}
    return "".join(tr[ch] for ch in letters)


def _shifts(f):
    q, s = f.q, upper_neighbor(f).q
    return {"x": q, "X": -q, "Z": -s, "z": s}


def suffix_carriers(f):
    """Index -> carrier word for one turn of the chain word, plus the C-steps.

    Reading the chain word right to left from the base disk, each suffix
    carries the base to the next disk.  A C-step is an index j with
    C(delta_j) = delta_{j-s} along this walk.
    """
    cw = chain_word(f)
    shift = _shifts(f)
    words, c_steps = {0: ""}, []
    idx = 0
    for k in range(len(cw) - 1, 0, -1):
        if cw[k] == "Z":
            c_steps.append(idx)
        idx += shift[cw[k]]
        words.setdefault(idx, cw[k:])
    if cw[0] == "Z":
        c_steps.append(idx)
    return words, sorted(set(c_steps))


def carrier_word(f, index, n=None):
    """Carrier word of the disk at `index` (reduced mod nq when n is given)."""
    words, _ = suffix_carriers(f)
    q = f.q
    base = sorted(words, key=lambda i: (abs(i), i))
    for i0 in base:
        if (i0 - index) % q == 0:
            k = (i0 - index) // q
            if n is not None:
                k %= n
            return ("X" * k if k >= 0 else "x" * (-k)) + words[i0]
    raise AssertionError("suffix indices miss a residue class")


@dataclass
class Chain:
    fraction: Frac
    n: int | None                # order of W_f, None at a cusp or off the elliptic points
    mu: complex
    indices: list
    words: dict                  # index -> carrier word over X, x, Z, z
    carriers: dict               # index -> Mobius
    disks: dict                  # index -> GeneralizedDisk
    X: Mobius
    Z: Mobius
    base: object = LOWER_HALF_PLANE
    closed: bool = False         # indices run mod len(indices)

    def __len__(self):
        return len(self.indices)

    @property
    def period(self):
        return len(self.indices) if self.closed else None

    @property
    def c_steps(self):
        return suffix_carriers(self.fraction)[1]

    def neighbours(self):
        """Consecutive index pairs (cyclically for closed chains)."""
        idx = self.indices
        pairs = list(zip(idx, idx[1:]))
        if self.closed and len(idx) > 2:
            pairs.append((idx[-1], idx[0]))
        return pairs

    def separated_pairs(self):
        idx = self.indices
        m = len(idx)
        out = []
        for a in range(m):
            for b in range(a + 2, m):
                if self.closed and (b - a) % m in (1, m - 1):
                    continue
                out.append((idx[a], idx[b]))
        return out

    def carrier_residual(self):
        if not self.indices:
            return 0.0
        return max(map_disk(self.carriers[i], self.base).distance(self.disks[i]) for i in self.indices)

    def wrap(self, j):
        if self.closed:
            return j % len(self.indices)
        return j


def transported_chain(f, mu, indices, n=None):
    """Chain disks at any mu: the carrier words re-evaluated at this parameter."""
    X, Z = chain_generators(f, mu)
    words, carriers, disks = {}, {}, {}
    for i in indices:
        w = carrier_word(f, i, n)
        g = evaluate_carrier(w, X, Z)
        words[i], carriers[i] = w, g
        disks[i] = map_disk(g, LOWER_HALF_PLANE)
    return Chain(f, n, complex(mu), list(indices), words, carriers, disks, X, Z,
                 closed=n is not None)


def build_cusp_chain(f, window, mu=None):
    """Window of the tangent chain of the cusp group at mu_f.

    Indices run from -q, so a window of q + 1 disks ends at the base disk.
    """
    if f.q == 0 or not 0 < f.p < f.q:
        raise ValueError("cusp chains need 0 < p/q < 1")
    if window < 0:
        raise ValueError("window must be nonnegative")
    if mu is None:
        from .locus import cusp
        mu = cusp(f)
    return transported_chain(f, mu, range(-f.q, -f.q + window))


def build_elliptic_chain(f, n, mu=None):
    """The closed chain of nq disks at the order-n point of the extended ray."""
    if f.q == 0:
        raise ValueError("1/0 has no chain")
    if n < 2:
        raise ValueError("n must be at least 2")
    if mu is None:
        if f.is_integral:
            mu = families.mu_integral(f.p, n)
        else:
            from .locus import elliptic_points
            mu = elliptic_points(f, [n])[n]
    return transported_chain(f, mu, range(n * f.q), n=n)


# ---------------------------------------------------------------- verification

@dataclass
class Check:
    passed: bool
    residual: float
    detail: str = ""


@dataclass
class ChainReport:
    checks: dict = field(default_factory=dict)
    convention: str = ("base disk = lower half-plane at index 0; A = W_f^-1 shifts +q; "
                       "C = W_r shifts -s; chain word W_{-s/q}[A, C]")

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def failures(self):
        return [k for k, c in self.checks.items() if not c.passed]

    def to_dict(self):
        return {"passed": self.passed, "convention": self.convention,
                "checks": {k: {"passed": c.passed, "residual": _num(c.residual), "detail": c.detail}
                           for k, c in self.checks.items()}}


def _num(x):
    if x is None or not math.isfinite(x):
        return None if x is None else str(x)
    return float(x)


def triangle_circle(X, Y, K):
    """Oriented limit circle of <X, Y>: through fix K, X(fix K), Y(fix K).

    Oriented so that the attracting fixed point of X inside it is the one the
    chain does not surround; returns None for n = 2 where the limit set is a point.
    """
    p = fixed_points(K)[0]
    pts = [p, X(p), Y(p)]
    try:
        m = three_point_map(0j, 1 + 0j, INF, *pts)
    except ValueError:
        return None
    return map_disk(m, LOWER_HALF_PLANE)


def commutator_K(X, Z):
    """K = X Z^-1 X^-1 Z, parabolic for every parameter."""
    return X @ Z.inverse() @ X.inverse() @ Z


def verify_combinatorial(c, X=None, Z=None, tol=TANGENT_TOL):
    """Per-condition report for a chain with respect to generators X = W_f, Z = W_r."""
    X = c.X if X is None else X
    Z = c.Z if Z is None else Z
    A, C = X.inverse(), Z
    f = c.fraction
    q, s = f.q, upper_neighbor(f).q
    rep = ChainReport()
    checks = rep.checks
    if not c.indices:
        checks["empty"] = Check(True, 0.0, "no disks")
        return rep
    disks = c.disks

    # (1) some disk touches the limit circle of <X, Y> at fix K
    K = commutator_K(X, Z)
    Y = Z.inverse() @ X.inverse() @ Z
    pK = fixed_points(K)[0]
    on = {i: abs(d.signed_distance(pK)) / max(1.0, abs(pK)) for i, d in disks.items()
          if not d.is_halfplane or not is_inf(pK)}
    k0 = min(on, key=on.get)
    circle = triangle_circle(X, Y, K)
    if circle is None or classify(X).order == 2:
        res1 = on[k0]
        detail = f"fix K on disk {k0}; limit set of the order-2 group is the point fix K"
    else:
        res1 = max(on[k0], abs(abs(inversive_distance(disks[k0], circle)) - 1))
        detail = f"fix K on disk {k0}, tangent to the limit circle"
    checks["1_fixK_tangency"] = Check(res1 <= 1e-7, res1, detail)

    # (2) the chain word stabilizes the base disk
    cw = chain_word(f)
    g = evaluate_carrier(cw, X, Z)
    if 0 in disks:
        res2 = map_disk(g, disks[0]).distance(disks[0])
        checks["2_core_invariance"] = Check(res2 <= SHIFT_TOL, res2, f"chain word {cw}")

    # (3) C(delta_j) = delta_{j-s} on the C-steps of the chain word
    res3, used = 0.0, []
    for j in c.c_steps:
        a, b = c.wrap(j), c.wrap(j - s)
        if a in disks and b in disks:
            res3 = max(res3, _rel(map_disk(C, disks[a]), disks[b]))
            used.append(a)
    checks["3_C_shift"] = Check(res3 <= SHIFT_TOL, res3, f"checked at indices {used}")

    # (4) A(delta_j) = delta_{j+q} for every index present
    res4, count = 0.0, 0
    for j in c.indices:
        b = c.wrap(j + q)
        if b in disks:
            res4 = max(res4, _rel(map_disk(A, disks[j]), disks[b]))
            count += 1
    checks["4_A_shift"] = Check(res4 <= SHIFT_TOL, res4, f"{count} indices")

    # (5) distinct disks
    gap = math.inf
    idx = c.indices
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            gap = min(gap, disks[idx[a]].distance(disks[idx[b]]))
    checks["5_distinct"] = Check(gap > DISTINCT_TOL, gap if math.isfinite(gap) else 0.0,
                                 "min form distance between two disks")

    # tangency of neighbours, both by inversive distance and Euclidean gap
    # the Euclidean gap decides; the inversive distance loses digits for tiny
    # disks, so it is only held to a tolerance scaled by the form entries
    worst_e, worst_pair, inv_ok = 0.0, None, True
    overlap = 0.0
    for a, b in c.neighbours():
        i = inversive_distance(disks[a], disks[b])
        e = tangency_residual(disks[a], disks[b])
        if e >= worst_e:
            worst_e, worst_pair = e, (a, b)
        inv_ok &= abs(i - 1) <= tol * _form_scale(disks[a], disks[b])
        overlap = max(overlap, i - 1)
    checks["tangent"] = Check(worst_e <= tol and inv_ok, worst_e,
                              f"worst pair {worst_pair}" if worst_pair else "")

    # (*) separated disks have disjoint interiors
    min_sep, sep_pair, contacts = math.inf, None, []
    for a, b in c.separated_pairs():
        i = inversive_distance(disks[a], disks[b])
        if i < min_sep:
            min_sep, sep_pair = i, (a, b)
        if abs(i - 1) <= 1e-6:
            contacts.append((a, b))
    if math.isinf(min_sep):
        checks["star"] = Check(True, math.inf, "no separated pairs")
    else:
        detail = f"min inversive distance {min_sep:.6g} at {sep_pair}"
        if contacts:
            detail += f"; touching at {contacts}"
        checks["star"] = Check(min_sep >= 1 - 1e-6, min_sep - 1, detail)

    # proper: neighbours meet, separated interiors disjoint
    proper = checks["tangent"].passed or overlap <= tol
    proper = proper and (math.isinf(min_sep) or min_sep >= 1 - 1e-6)
    checks["proper"] = Check(proper, overlap, "max inversive distance - 1 over neighbours")

    # the chain word is parabolic (equal to S^-1 up to sign)
    res_p = g.distance(families.S.inverse())
    checks["core_parabolic"] = Check(res_p <= 1e-10 * max(1.0, _size(X), _size(Z)), res_p,
                                     f"|tr| = {abs(g.trace):.15g}")

    if c.closed:
        n = len(idx) // q
        res_c = (X ** n).distance(Mobius.identity())
        res_c = max(res_c, c.carrier_residual())
        checks["closure"] = Check(res_c <= 1e-8 * max(1.0, _size(X) ** n), res_c,
                                  f"X^{n} = +-I, {len(idx)} disks")
    return rep


def _form_scale(d1, d2):
    return max(1.0, abs(d1.A * d2.C), abs(d2.A * d1.C), abs(d1.B) * abs(d2.B))


def _size(m):
    return max(abs(x) for x in m.entries())


def _rel(d1, d2):
    scale = max(1.0, abs(d1.A), abs(d1.B), abs(d1.C))
    return d1.distance(d2) / scale


# ---------------------------------------------------------------- pleating curves

def tangency_point(d1, d2):
    """Common point of two tangent oriented disks: the pencil H1 + H2 is a point circle."""
    a = d1.A + d2.A
    b = d1.B + d2.B
    scale = max(abs(d1.A), abs(d2.A), abs(b), 1.0)
    if abs(a) <= 1e-12 * scale:
        return INF
    return -b / a


def _third_point(d, t1, t2):
    if d.is_halfplane:
        p0 = -d.C * d.B / 2
        tang = 1j * d.normal
        cands = [p0 + tang * k for k in (-1.0, 0.0, 1.0, 2.0)]
    else:
        cands = [d.center + d.radius * u for u in (1, 1j, -1, -1j)]

    def far(p):
        return min(math.inf if is_inf(t) else abs(p - t) for t in (t1, t2))
    return max(cands, key=far)


def orthogonal_arc(d, t1, t2, k=32):
    """Points of the arc inside d orthogonal to its boundary from t1 to t2."""
    t3 = _third_point(d, t1, t2)
    N = three_point_map(t1, t2, t3, 0j, INF, 1 + 0j)
    if map_disk(N, d).form(-1j) > 0:
        N = families.E @ N
    Ni = N.inverse()
    u = np.linspace(0, 1, k + 2)[1:-1]
    return [t1] + [Ni(-1j * math.tan(math.pi * x / 2)) for x in u] + [t2]


@dataclass
class PleatingCurves:
    arcs_A: list                 # per disk, arc points in the plane (may contain INF)
    arcs_B: list
    W_A: np.ndarray              # closed polylines in normalized coordinates
    W_B: np.ndarray
    normalizer: Mobius           # sends the reference limit point to infinity
    reference: complex
    disjoint: bool
    margin: float
    crossings: int
    simple_A: bool
    simple_B: bool
    dagger_residual: float
    detail: str = ""

    @property
    def W_A_plane(self):
        return _points_back(self.normalizer, self.W_A)

    @property
    def W_B_plane(self):
        return _points_back(self.normalizer, self.W_B)


def _points_back(m, pts):
    mi = m.inverse()
    return [mi(complex(z)) for z in pts]


def _polyline(arcs):
    pts = []
    for a in arcs:
        pts.extend(a[:-1])
    return np.array(pts, dtype=complex)


def _segments(poly):
    return poly, np.roll(poly, -1)


def _cross(a, b):
    return a.real * b.imag - a.imag * b.real


def _self_intersections(poly):
    p, q = _segments(poly)
    m = len(p)
    d = q - p
    # pairwise segment intersection via orientation tests
    r = p[None, :] - p[:, None]
    s = q[None, :] - p[:, None]
    o1 = np.sign(_cross(d[:, None], r))
    o2 = np.sign(_cross(d[:, None], s))
    o3 = np.sign(_cross(d[None, :], p[:, None] - p[None, :]))
    o4 = np.sign(_cross(d[None, :], q[:, None] - p[None, :]))
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    i, j = np.triu_indices(m, 2)
    ok = (j - i) % m != m - 1
    return int(np.count_nonzero(hit[i[ok], j[ok]]))


def _winding_inside(poly, pts):
    """Even-odd test of points against a closed polyline."""
    p, q = _segments(poly)
    x, y = pts.real[:, None], pts.imag[:, None]
    cond = (p.imag[None, :] > y) != (q.imag[None, :] > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = p.real + (y - p.imag) * (q.real - p.real) / (q.imag - p.imag)
    return np.count_nonzero(cond & (x < xc), axis=1) % 2 == 1


def _dist_to_polyline(pts, poly):
    p, q = _segments(poly)
    d = q - p
    L = np.abs(d) ** 2
    L[L == 0] = 1e-300
    t = ((pts[:, None] - p[None, :]) * np.conj(d)[None, :]).real / L[None, :]
    t = np.clip(t, 0, 1)
    proj = p[None, :] + t * d[None, :]
    return np.min(np.abs(pts[:, None] - proj), axis=1)


def _finite(pts, cap):
    return np.array([z for z in pts if not is_inf(z) and abs(z) <= cap], dtype=complex)


def _finite_polyline(arcs, cap):
    segs = []
    for a in arcs:
        for u, v in zip(a, a[1:]):
            if not is_inf(u) and not is_inf(v) and abs(u) <= cap and abs(v) <= cap:
                segs.append((u, v))
    return segs


def _seg_dist(pts, segs):
    if not len(pts) or not segs:
        return math.inf
    p = np.array([u for u, _ in segs])
    q = np.array([v for _, v in segs])
    d = q - p
    L = np.abs(d) ** 2
    L[L == 0] = 1e-300
    t = np.clip(((pts[:, None] - p[None, :]) * np.conj(d)[None, :]).real / L[None, :], 0, 1)
    return float(np.min(np.abs(pts[:, None] - (p[None, :] + t * d[None, :]))))


def pleating_curves(c, C=None, k=32, cap=1e6):
    """Curves W_A, W_B = C^-1(W_A) and the regions they bound.

    D_A is the side of W_A away from the limit set of F = <X, C^-1 X^-1 C>;
    the fixed point of the parabolic X C^-1 X^-1 C serves as the reference
    limit point and is sent to infinity, so both regions become the bounded
    sides of closed polygons.  The margin is the Euclidean distance between
    the finite parts of the two curves.
    """
    if not c.closed:
        raise ValueError("pleating curves need a closed chain")
    X = c.X
    if C is None:
        C = hnn_conjugator(c.fraction, c.mu, "lower")
    disks = c.disks
    if len(c.indices) < 3:
        raise ValueError("chain of fewer than three disks is degenerate")
    pairs = c.neighbours()
    for a, b in pairs:
        if abs(inversive_distance(disks[a], disks[b]) - 1) > 1e-6:
            raise ValueError(f"disks {a} and {b} are not tangent")
    ref = fixed_points(commutator_K(X, C))[0]
    M = Mobius(0j, 1 + 0j, 1 + 0j, -ref) if not is_inf(ref) else Mobius.identity()
    Ci = C.inverse()

    def build(dlist):
        m = len(dlist)
        tps = [tangency_point(dlist[j], dlist[(j + 1) % m]) for j in range(m)]
        return [orthogonal_arc(dlist[j], tps[j - 1], tps[j], k) for j in range(m)]

    ordered = [disks[i] for i in c.indices]
    arcs_A = build(ordered)
    arcs_B = [[Ci(z) for z in a] for a in arcs_A]
    # second route for W_B: arcs of the image disks
    arcs_B2 = build([map_disk(Ci, d) for d in ordered])
    dagger = 0.0
    for a1, a2 in zip(arcs_B, arcs_B2):
        circ = map_disk(three_point_map(0j, 1 + 0j, INF, a2[0], a2[len(a2) // 2], a2[-1]),
                        LOWER_HALF_PLANE)
        for z in a1:
            # images of infinity come back as huge finite numbers; skip them
            if not is_inf(z) and abs(z) < 1e8:
                dagger = max(dagger, abs(circ.signed_distance(z)) / max(1.0, abs(z)))

    WA = _polyline([[M(z) for z in a] for a in arcs_A])
    WB = _polyline([[M(z) for z in a] for a in arcs_B])
    inA = _winding_inside(WA, WB)
    inB = _winding_inside(WB, WA)
    # shared boundary arcs are sampled differently on the two curves; a point
    # only counts as inside when it is further than one segment from the boundary
    hA = np.max(np.abs(np.roll(WA, -1) - WA))
    hB = np.max(np.abs(np.roll(WB, -1) - WB))
    dB = _dist_to_polyline(WB, WA)
    dA = _dist_to_polyline(WA, WB)
    deep = (inA & (dB > hA)).sum() + (inB & (dA > hB)).sum()
    crossings = int(deep)
    disjoint = crossings == 0
    fa = _finite([z for a in arcs_A for z in a], cap)
    fb = _finite([z for a in arcs_B for z in a], cap)
    margin = min(_seg_dist(fb, _finite_polyline(arcs_A, cap)),
                 _seg_dist(fa, _finite_polyline(arcs_B, cap)))
    if not disjoint:
        margin = -margin
    simple_A = _self_intersections(WA) == 0
    simple_B = _self_intersections(WB) == 0
    return PleatingCurves(arcs_A, arcs_B, WA, WB, M, ref, disjoint, margin, crossings,
                          simple_A, simple_B, dagger,
                          f"{len(arcs_A)} arcs, reference limit point {ref:.10g}")


def hnn_conjugator(f, mu, side="upper"):
    """W_r for the upper or lower Farey neighbour r of f at mu."""
    r = upper_neighbor(f) if side == "upper" else lower_neighbor(f)
    return evaluate(word(r), families.S, families.T(mu))


# ---------------------------------------------------------------- perturbation

def _window_ok(f, mu, tol):
    q = f.q
    c = transported_chain(f, mu, range(-q, 1))
    rep = verify_combinatorial(c)
    t = rep.checks["tangent"]
    star = rep.checks["star"]
    return t.residual <= 10 * tol and star.passed


def perturbation_radius(f, samples, tol=TANGENT_TOL, t_end=0.0):
    """Largest sampled distance from the cusp along the extended ray at which
    the finite piece of q + 1 disks ending at the base still satisfies
    tangency and (*).

    Probes are `samples` points of the extended ray spaced evenly in |tr|
    from 2 down to t_end; the pass/fail boundary is located by bisection.
    """
    from .locus import TraceFunction, solve_trace, trace_ray
    if samples < 1:
        raise ValueError("samples must be positive")
    tf = TraceFunction(f)
    ray = trace_ray(tf, t_start=10.0, t_end=t_end, step=0.05)
    mu0 = ray.cusp
    probes = []
    for k in range(samples):
        t = 2 - (2 - t_end) * (k + 1) / samples
        near = min(ray.samples, key=lambda smp: abs(abs(smp.t) - t))
        z = solve_trace(tf, ray.sign * t, near.param)
        probes.append((abs(z - mu0), z))
    lo, hi = -1, len(probes)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _window_ok(f, probes[mid][1], tol):
            lo = mid
        else:
            hi = mid
    return 0.0 if lo < 0 else probes[lo][0]


# ---------------------------------------------------------------- output

def chain_to_dict(c, report=None):
    def cnum(z):
        return None if is_inf(z) else [z.real, z.imag]

    rows = []
    for i in c.indices:
        d = c.disks[i]
        g = c.carriers[i]
        rows.append({
            "index": i,
            "carrier_word": c.words[i],
            "carrier": [cnum(x) for x in g.entries()],
            "halfplane": d.is_halfplane,
            "center": cnum(d.center),
            "radius": None if d.is_halfplane else d.radius,
            "form": [d.A, [d.B.real, d.B.imag], d.C],
        })
    out = {"fraction": str(c.fraction), "n": c.n, "mu": [c.mu.real, c.mu.imag],
           "closed": c.closed, "chain_word": chain_word(c.fraction), "disks": rows}
    if report is not None:
        out["verification"] = report.to_dict()
    return out


def dump_json(c, path, report=None, extra=None):
    data = chain_to_dict(c, report)
    if extra:
        data.update(extra)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
