"""Limit-set point clouds, raster and SVG output, ray CSV export.

Enumeration is breadth-first by word length with numpy batches, which visits
the same tree as a depth-first search and produces the same points; output is
sorted before writing so files do not depend on visiting order.
"""

from dataclasses import dataclass, field

import numpy as np

from .moebius import Mobius, classify, fixed_points, is_inf

NODE_BUDGET = 5_000_000


@dataclass
class PointCloud:
    points: np.ndarray               # complex plane points
    depths: np.ndarray               # word length that produced each point
    viewport: tuple                  # (x0, y0, x1, y1)
    truncated: bool = False
    nodes: int = 0
    # bookkeeping to rebuild defining words
    _levels: list = field(default_factory=list, repr=False)
    _origin: np.ndarray = field(default=None, repr=False)
    _seeds: list = field(default_factory=list, repr=False)
    _letters: list = field(default_factory=list, repr=False)

    def __len__(self):
        return len(self.points)

    def prefix(self, k):
        """Letters (as Mobius list) of the word that moved the seed of point k."""
        depth, node, seed = self._origin[k]
        out = []
        while depth > 0:
            parent, letter = self._levels[depth - 1]
            out.append(self._letters[letter[node]])
            node = parent[node]
            depth -= 1
        return out[::-1], self._seeds[seed]

    def defining_word(self, k):
        """A group element fixing point k: w s w^-1 with s the seed's word."""
        letters, seed = self.prefix(k)
        w = Mobius.identity()
        for g in letters:
            w = w @ g
        return w @ seed @ w.inverse()


def _letters(gens):
    letters, inverse, limit = [], [], []
    for g in gens:
        c = classify(g)
        order = c.order if c.kind == "elliptic" and c.order else None
        if c.kind == "identity":
            raise ValueError("identity generator")
        # g^j for 1 <= j <= order // 2 and g^-j for j < order / 2 represent every power once
        up = order // 2 if order else 10 ** 9
        down = (order - 1) // 2 if order else 10 ** 9
        i = len(letters)
        letters += [g, g.inverse()]
        inverse += [i + 1, i]
        limit += [up, down]
    return letters, inverse, limit


def _seed_words(gens):
    """Non-elliptic short words whose attracting fixed points seed the cloud."""
    cands = list(gens)
    for i, g in enumerate(gens):
        for h in gens[i + 1:]:
            cands += [g @ h, g @ h.inverse(), g @ h @ g.inverse() @ h.inverse()]
    out, seen = [], []
    for w in cands:
        c = classify(w)
        if c.kind in ("elliptic", "identity"):
            continue
        p = fixed_points(w)[0]
        if is_inf(p) or any(abs(p - q) < 1e-12 for q in seen):
            continue
        seen.append(p)
        out.append((w, p))
    return out


def default_viewport(gens, pad=0.2):
    pts = []
    for g in gens:
        if classify(g).kind != "identity":
            pts += [p for p in fixed_points(g) if not is_inf(p)]
    if not pts:
        return (-1.0, -1.0, 1.0, 1.0)
    xs = [p.real for p in pts]
    ys = [p.imag for p in pts]
    w = max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    cx, cy = (max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2
    h = w * (1 + pad) / 2
    return (cx - h, cy - h, cx + h, cy + h)


def _apply(a, b, c, d, z):
    with np.errstate(all="ignore"):
        return (a * z + b) / (c * z + d)


def limit_set(gens, max_depth, min_cell, budget=NODE_BUDGET, viewport=None):
    """Images of seed limit points under all reduced words of length <= max_depth.

    A node is not expanded once its image of the seed frame has diameter
    below min_cell; every visited node emits its seed images.
    """
    if not gens:
        raise ValueError("need at least one generator")
    if min_cell <= 0:
        raise ValueError("min_cell must be positive")
    letters, inverse, limit = _letters(gens)
    seeds = _seed_words(gens)
    if viewport is None:
        viewport = default_viewport(gens)
    seed_pts = np.array([p for _, p in seeds], dtype=complex)
    nl = len(letters)
    L = np.array([g.entries() for g in letters], dtype=complex)
    inv = np.array(inverse)
    lim = np.array(limit)

    pts, deps, origin = [], [], []
    levels = []
    # level 0: identity
    a = np.ones(1, complex)
    b = np.zeros(1, complex)
    c = np.zeros(1, complex)
    d = np.ones(1, complex)
    last = np.full(1, -1)
    run = np.zeros(1, int)
    alive = np.ones(1, bool)
    nodes, truncated = 1, False
    for depth in range(max_depth + 1):
        imgs = np.stack([_apply(a, b, c, d, s) for s in seed_pts], axis=1) if len(seed_pts) else None
        if imgs is not None:
            for j in range(len(seed_pts)):
                pts.append(imgs[:, j])
                deps.append(np.full(len(a), depth))
                origin.append(np.stack([np.full(len(a), depth), np.arange(len(a)), np.full(len(a), j)], 1))
            fin = np.isfinite(imgs).all(axis=1)
            if len(seed_pts) > 1:
                diam = np.max(np.abs(imgs[:, :, None] - imgs[:, None, :]), axis=(1, 2))
                alive = alive & ~(fin & (diam < min_cell))
        if depth == max_depth:
            break
        # children
        par, let = [], []
        for k in range(nl):
            ok = alive & (last != inv[k])
            same = last == k
            ok &= ~same | (run < lim[k])
            idx = np.nonzero(ok)[0]
            par.append(idx)
            let.append(np.full(len(idx), k))
        par = np.concatenate(par)
        let = np.concatenate(let)
        if nodes + len(par) > budget:
            keep = max(budget - nodes, 0)
            par, let = par[:keep], let[:keep]
            truncated = True
        if not len(par):
            break
        nodes += len(par)
        pa, pb, pc, pd = a[par], b[par], c[par], d[par]
        ga, gb, gc, gd = L[let, 0], L[let, 1], L[let, 2], L[let, 3]
        a, b = pa * ga + pb * gc, pa * gb + pb * gd
        c, d = pc * ga + pd * gc, pc * gb + pd * gd
        run = np.where(last[par] == let, run[par] + 1, 1)
        last = let
        alive = np.ones(len(par), bool)
        levels.append((par, let))
        if truncated:
            break

    if pts:
        P = np.concatenate(pts)
        D = np.concatenate(deps)
        O = np.concatenate(origin)
    else:
        P, D, O = np.zeros(0, complex), np.zeros(0, int), np.zeros((0, 3), int)
    keep = np.isfinite(P)
    P, D, O = P[keep], D[keep], O[keep]
    # dedupe on a fine grid, keep the shortest word, then sort for determinism
    q = 1e-3 * min_cell
    rx, ry = np.round(P.real / q), np.round(P.imag / q)
    order = np.lexsort((D, ry, rx))
    _, first = np.unique(np.stack([rx[order], ry[order]], 1), axis=0, return_index=True)
    sel = order[first]
    sel = sel[np.lexsort((P[sel].imag, P[sel].real))]
    return PointCloud(P[sel], D[sel], tuple(viewport), truncated, nodes,
                      levels, O[sel], [w for w, _ in seeds], letters)


# ---------------------------------------------------------------- raster

def _pixels(pc, width, height):
    x0, y0, x1, y1 = pc.viewport
    px = np.floor((pc.points.real - x0) / (x1 - x0) * width).astype(np.int64)
    py = np.floor((y1 - pc.points.imag) / (y1 - y0) * height).astype(np.int64)
    ok = (px >= 0) & (px < width) & (py >= 0) & (py < height)
    return px[ok], py[ok]


def rasterize(pc, width, height):
    img = np.full((height, width, 3), 255, dtype=np.uint8)
    if len(pc.points):
        px, py = _pixels(pc, width, height)
        img[py, px] = 0
    return img


def render_raster(pc, width, height, path):
    """P6 pixmap, or PNG when the path ends in .png; returns the number of points plotted."""
    img = rasterize(pc, width, height)
    if str(path).lower().endswith(".png"):
        from PIL import Image
        Image.fromarray(img, "RGB").save(path, format="PNG", optimize=False)
    else:
        with open(path, "wb") as fh:
            fh.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
            fh.write(img.tobytes())
    return len(_pixels(pc, width, height)[0]) if len(pc.points) else 0


# ---------------------------------------------------------------- svg

def _f(x):
    return f"{x:.10g}"


def _clip_halfplane(disk, box):
    """Polygon of a half-plane cut to the box (Sutherland-Hodgman on one edge)."""
    x0, y0, x1, y1 = box
    poly = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    out = []
    for k in range(4):
        p, q = poly[k], poly[(k + 1) % 4]
        fp, fq = disk.form(p), disk.form(q)
        if fp <= 0:
            out.append(p)
        if (fp < 0) != (fq < 0) and fp != fq:
            out.append(p + (q - p) * fp / (fp - fq))
    return out


def svg_document(disks=(), curves=(), rays=(), viewport=(-3, -1, 3, 5), meta=None):
    x0, y0, x1, y1 = viewport
    w, h = x1 - x0, y1 - y0
    sw = _f(max(w, h) / 500)
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
             f'viewBox="{_f(x0)} {_f(-y1)} {_f(w)} {_f(h)}">']
    if meta:
        lines.append(f"<desc>{_escape(meta)}</desc>")
    lines.append('<g transform="scale(1,-1)" fill="none" stroke="black" '
                 f'stroke-width="{sw}">')
    for dsk in disks:
        if dsk.is_halfplane:
            poly = _clip_halfplane(dsk, viewport)
            if poly:
                pts = " ".join(f"{_f(z.real)},{_f(z.imag)}" for z in poly)
                lines.append(f'<polygon points="{pts}"/>')
        else:
            fill = "" if dsk.inside else ' stroke-dasharray="0.05"'
            c = dsk.center
            lines.append(f'<circle cx="{_f(c.real)}" cy="{_f(c.imag)}" r="{_f(dsk.radius)}"{fill}/>')
    for curve in curves:
        pts = [z for z in curve if not is_inf(z) and abs(z) < 1e6]
        if len(pts) < 2:
            continue
        d = "M " + " L ".join(f"{_f(z.real)} {_f(z.imag)}" for z in pts)
        lines.append(f'<path d="{d}" stroke="red"/>')
    for ray in rays:
        pts = " ".join(f"{_f(z.real)},{_f(z.imag)}" for z in ray if not is_inf(z))
        lines.append(f'<polyline points="{pts}" stroke="blue"/>')
    lines += ["</g>", "</svg>"]
    return "\n".join(lines) + "\n"


def _escape(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_svg(path, disks=(), curves=(), rays=(), viewport=(-3, -1, 3, 5), meta=None):
    text = svg_document(disks, curves, rays, viewport, meta)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return text


def svg_element_count(text):
    return sum(text.count(tag) for tag in ("<circle", "<polygon", "<path", "<polyline"))


# ---------------------------------------------------------------- csv

def _g(x):
    return f"{x:.15g}"


def export_ray_csv(rt, path, meta=None):
    """Samples as t,re,im,flag,itrC rows, then the special points.

    itrC is i tr C at the sample for the Koebe families and empty otherwise.
    """
    from . import families
    rows = []
    if meta:
        rows += [f"# {k}={v}" for k, v in sorted(meta.items())]
    rows.append("t,re,im,flag,itrC")

    def extra(z):
        if rt is None or rt.family != "koebe":
            return ""
        v = 1j * families.C(rt.n, z).trace
        return f"{_g(v.real)}{'+' if v.imag >= 0 else '-'}{_g(abs(v.imag))}i"

    if rt is not None:
        for s in rt.samples:
            rows.append(f"{_g(s.t)},{_g(s.param.real)},{_g(s.param.imag)},{s.flag},{extra(s.param)}")
        for sp in rt.special:
            rows.append(f"{_g(sp.target)},{_g(sp.param.real)},{_g(sp.param.imag)},{sp.label},"
                        f"{extra(sp.param)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")
    return rows


def export_scan_csv(res, path, meta=None):
    """One row per scan cell: re, im, J, verdict, escape order."""
    rows = [f"# {k}={v}" for k, v in sorted((meta or {}).items())]
    rows.append("re,im,J,verdict,escape")
    for i, y in enumerate(res.ys):
        for j, x in enumerate(res.xs):
            e = res.escape[i][j]
            rows.append(f"{_g(x)},{_g(y)},{_g(res.values[i, j])},{res.verdicts[i][j]},"
                        f"{'' if e is None else e}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")
    return rows
