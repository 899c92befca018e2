import math
import random

import pytest

from kleinian import families, locus
from kleinian.discreteness import (chordal, ford_circles, isometric_circle, jorgensen,
                                   nondiscreteness_scan, triangle_signature)
from kleinian.farey import Frac, evaluate, word
from kleinian.moebius import Mobius

F = Frac.make
S = families.S
K = families.maskit_group(0).K
MU4 = 1 + 1j * (1 + 2 ** 0.5) ** 0.5


def test_jorgensen_generators():
    for mu in (3j, 1 + 2j, 0.2 + 0.4j):
        rep = jorgensen(S, families.T(mu))
        assert abs(rep.value - 4) < 1e-10
        assert rep.verdict == "inconclusive"


def test_jorgensen_identity_power():
    g = evaluate(word(F(1, 2)), S, families.T(MU4)) ** 4
    assert g.is_identity(1e-12)
    rep = jorgensen(K, g)
    assert rep.value < 1e-10 and rep.verdict == "elementary-suspect"


def test_jorgensen_elementary_cases():
    # commuting, shared fixed point
    assert jorgensen(S, S @ S).verdict == "elementary-suspect"
    p = Mobius.from_entries(1, 0, 0.01, 1)
    t = Mobius.from_entries(1, 0, 0.02, 1)
    assert jorgensen(p, t).reason
    # two elliptics are flagged, not certified
    e1 = families.A(3)
    e2 = Mobius.from_entries(0.5, -1, 1, 0.5)
    assert jorgensen(e1, e2).verdict != "violating" or jorgensen(e1, e2).reason == ""


def test_jorgensen_ring_at_radius_005():
    # some perturbation in each direction sector violates; we record and check the count
    found = 0
    for k in range(16):
        mu = MU4 + 0.05 * complex(math.cos(k * math.pi / 8), math.sin(k * math.pi / 8))
        g = evaluate(word(F(1, 2)), S, families.T(mu)) ** 4
        rep = jorgensen(K, g)
        assert rep.value >= 0
        found += rep.verdict == "violating"
    assert found == 0  # radius 0.05 is outside the violating disk, see notes


def test_jorgensen_violating_close_to_point():
    mu = MU4 + 0.002
    g = evaluate(word(F(1, 2)), S, families.T(mu)) ** 4
    rep = jorgensen(K, g)
    assert rep.value < 1 and rep.verdict == "violating"


def test_jorgensen_self_test_at_3i():
    r = random.Random(11)
    t = families.T(3j)
    letters = {"X": S, "x": S.inverse(), "Y": t, "y": t.inverse()}

    def rand_word():
        w, prev = [], None
        for _ in range(r.randint(1, 6)):
            ch = r.choice([c for c in "XxYy" if prev is None or c != prev.swapcase()])
            w.append(ch)
            prev = ch
        return w

    def ev(w):
        m = Mobius.identity()
        for ch in w:
            m = m @ letters[ch]
        return m

    for _ in range(1000):
        rep = jorgensen(ev(rand_word()), ev(rand_word()))
        assert rep.verdict != "violating"


def test_scan_examples():
    res = nondiscreteness_scan(MU4, 0.1, F(1, 2), 4, 21)
    assert res.center() == "elementary-suspect"
    assert res.values.shape == (21, 21)
    inside = nondiscreteness_scan(1 + 3j, 0.5, F(1, 2), 4, 11)
    assert inside.count("violating") == 0
    one = nondiscreteness_scan(MU4, 0.1, F(1, 2), 4, 1)
    assert one.values.shape == (1, 1) and one.center() == "elementary-suspect"
    with pytest.raises(ValueError):
        nondiscreteness_scan(MU4, 0.1, F(1, 2), 4, 0)


def test_scan_flags_escape_orders():
    res = nondiscreteness_scan(MU4, 0.01, F(1, 2), 4, 5)
    flat = [e for row in res.escape for e in row if e is not None]
    assert all(e in (2, 3, 4, 6) for e in flat)


def test_signature_examples():
    sig = triangle_signature(1j * 2 ** 0.5, F(0))
    assert sig.signature == (4, 4, math.inf)
    sig = triangle_signature(1 + 1j, F(1, 2))
    assert sig.signature == (2, 2, math.inf)
    tf = locus.TraceFunction(F(1, 2))
    mu = locus.solve_trace(tf, 2 * math.cos(1.0), 1 + 1.2j)
    sig = triangle_signature(mu, F(1, 2))
    assert sig.verdict == "non-discrete" and sig.signature is None


def test_signature_cusp_and_off_locus():
    assert triangle_signature(1 + 1j * 3 ** 0.5, F(1, 2)).verdict == "cusp"
    assert triangle_signature(3j, F(0)).verdict == "loxodromic"
    with pytest.raises(ValueError):
        triangle_signature(0.5 + 1j, F(1, 2))


def test_signature_traces_real():
    sig = triangle_signature(MU4, F(1, 2))
    assert all(abs(t.imag) < 1e-9 for t in sig.traces)
    assert abs(abs(sig.traces[2]) - 2) < 1e-9


@pytest.mark.parametrize("f", [F(0), F(1, 2), F(1, 3), F(2, 3), F(1, 4), F(3, 4), F(1, 5), F(2, 5),
                               F(3, 5), F(4, 5)])
def test_signature_at_elliptic_points(f):
    ns = list(range(2, 9))
    pts = locus.elliptic_points(f, ns)
    for n in ns:
        sig = triangle_signature(pts[n], f)
        assert sig.signature == (n, n, math.inf)


def test_dichotomy_non_discrete():
    tf = locus.TraceFunction(F(1, 2))
    r = random.Random(4)
    for _ in range(20):
        t = r.uniform(0.05, 1.95)
        if any(abs(t - 2 * math.cos(math.pi / k)) < 1e-6 for k in range(2, 1001)):
            continue
        mu = locus.solve_trace(tf, t, 1 + 1j * (1 + t) ** 0.5)
        assert triangle_signature(mu, F(1, 2)).verdict == "non-discrete"
    # a finite order that is not a primitive rotation
    mu = locus.solve_trace(tf, 2 * math.cos(2 * math.pi / 5), 1 + 1.3j)
    sig = triangle_signature(mu, F(1, 2))
    assert sig.verdict == "non-discrete" and sig.order == 5


def test_isometric_circles():
    mu = 0.3 + 1.2j
    c = isometric_circle(families.T(mu))
    assert abs(c.center) < 1e-15 and abs(c.radius - 1) < 1e-15
    c = isometric_circle(families.T(mu).inverse())
    assert abs(c.center - mu) < 1e-15 and abs(c.radius - 1) < 1e-15
    c = isometric_circle(K)
    assert abs(c.center - 0.5) < 1e-15 and abs(c.radius - 0.5) < 1e-15
    with pytest.raises(ValueError):
        isometric_circle(S)


def test_isometric_circle_isometry():
    m = families.T(0.7 + 0.4j) @ Mobius.from_entries(2, 1, 1, 1)
    c = isometric_circle(m)
    for z in c.boundary_points(8):
        h = 1e-6
        assert abs(abs(m(z + h) - m(z)) / h - 1) < 1e-4


def test_ford_circles_triangle_group():
    # generators of the (4, 4, inf) group at mu_0(4): T and S^-1 T^-1 S
    mu = 1j * 2 ** 0.5
    t = families.T(mu)
    circles = ford_circles([t, S.inverse() @ t.inverse() @ S])
    assert len(circles) == 4
    assert all(abs(c.radius - 1) < 1e-12 for c in circles)


def test_chordal():
    assert chordal(complex("inf"), complex("inf")) == 0
    assert abs(chordal(0, complex("inf")) - 2) < 1e-15
    assert abs(chordal(1, -1) - 2) < 1e-15
