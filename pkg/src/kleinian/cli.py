"""Batch command line: ray, cusp, elliptic, chain, scan, conjugacy, limitset, signature.

Exit codes: 0 success, 1 verification failure, 2 usage error.  Settings come
from flags, then an optional JSON config file, then defaults; the effective
settings are echoed into every file written.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import chains, discreteness, families, locus, render
from .farey import Frac

DEFAULTS = {
    "frac": None, "n": None, "family": "maskit", "tol": 1e-9, "depth": 12, "grid": 41,
    "out": None, "viewport": None, "mu": None, "tau": None, "radius": 0.1, "window": None,
    "min_cell": 1e-3, "width": 800, "height": 800, "svg": None, "step": 0.05,
}


class UsageError(Exception):
    pass


def parse_complex(text):
    if text is None:
        return None
    if isinstance(text, (int, float, complex)):
        return complex(text)
    t = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise UsageError(f"not a complex number: {text}") from None


def parse_ns(text):
    if text is None:
        return None
    if isinstance(text, int):
        return [text]
    if isinstance(text, list):
        return [int(x) for x in text]
    try:
        ns = [int(x) for x in str(text).split(",") if x]
    except ValueError:
        raise UsageError(f"--n expects integers, got {text}") from None
    if any(n < 2 for n in ns):
        raise UsageError("orders must be at least 2")
    return ns


def parse_viewport(text):
    if text is None:
        return None
    vals = text if isinstance(text, list) else str(text).split(",")
    try:
        x0, y0, x1, y1 = (float(v) for v in vals)
    except ValueError:
        raise UsageError("--viewport expects x0,y0,x1,y1") from None
    if not (x1 > x0 and y1 > y0):
        raise UsageError("viewport must have positive size")
    return (x0, y0, x1, y1)


def fmt(z, digits=9):
    z = complex(z)
    re, im = f"{z.real:.{digits}g}", f"{abs(z.imag):.{digits}g}"
    return f"{re}{'-' if z.imag < 0 else '+'}{im}i"


def build_parser():
    p = argparse.ArgumentParser(prog="kleinian", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--frac", help="Farey fraction p/q")
        sp.add_argument("--n", help="order(s) of the elliptic, comma separated")
        sp.add_argument("--family", choices=["maskit", "koebe"], help="parameter family")
        sp.add_argument("--tol", type=float, help="verification tolerance")
        sp.add_argument("--depth", type=int, help="word depth for limit sets")
        sp.add_argument("--grid", type=int, help="grid size for scans")
        sp.add_argument("--out", help="output file")
        sp.add_argument("--viewport", help="x0,y0,x1,y1 in plane units")
        sp.add_argument("--config", help="JSON file with default settings")
        sp.add_argument("--mu", help="Maskit parameter, e.g. 1+1.55i")
        sp.add_argument("--tau", help="Koebe parameter")
        sp.add_argument("--radius", type=float, help="scan half-width")
        sp.add_argument("--window", type=int, help="number of disks in a cusp chain")
        sp.add_argument("--min-cell", dest="min_cell", type=float, help="pruning size for limit sets")
        sp.add_argument("--width", type=int, help="raster width")
        sp.add_argument("--height", type=int, help="raster height")
        sp.add_argument("--svg", help="also write an SVG picture here")
        sp.add_argument("--step", type=float, help="trace step along rays")
        return sp

    common(sub.add_parser("ray", help="trace a pleating ray, optionally to CSV"))
    common(sub.add_parser("cusp", help="locate the cusp of a ray"))
    common(sub.add_parser("elliptic", help="parameters where W_{p/q} has order n"))
    common(sub.add_parser("chain", help="build and verify a circle chain"))
    common(sub.add_parser("scan", help="Jorgensen scan around a parameter"))
    common(sub.add_parser("conjugacy", help="check the conjugacy of the two families"))
    common(sub.add_parser("limitset", help="render a limit set"))
    common(sub.add_parser("signature", help="triangle-group signature at a parameter"))
    return p


def resolve(args):
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config: {e}") from None
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    cfg["command"] = args.command
    if cfg["tol"] is not None and cfg["tol"] <= 0:
        raise UsageError("tolerance must be positive")
    return cfg


def _frac(cfg, required=True):
    if cfg["frac"] is None:
        if required:
            raise UsageError("--frac is required")
        return None
    try:
        return Frac.parse(str(cfg["frac"]))
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"bad fraction {cfg['frac']}: {e}") from None


def _one_n(cfg):
    ns = parse_ns(cfg["n"])
    if not ns:
        raise UsageError("--n is required")
    if len(ns) != 1:
        raise UsageError("this command takes a single --n")
    return ns[0]


def _meta(cfg):
    return {k: v for k, v in sorted(cfg.items()) if v is not None}


def cmd_ray(cfg, out):
    f = _frac(cfg)
    if cfg["family"] == "koebe":
        ray = locus.koebe_ray(_one_n(cfg), f, step=cfg["step"])
        end = ray.samples[-1].param
        print(f"endpoint tau = {fmt(end)}", file=out)
        print(f"endpoint tau^2 = {fmt(end ** 2, 12)}", file=out)
        print(f"sector ok = {ray.sector_ok}", file=out)
    else:
        ns = parse_ns(cfg["n"]) or ()
        ray = locus.trace_ray(locus.TraceFunction(f), step=cfg["step"], ns=ns)
        for sp in ray.special:
            print(f"{sp.label} {fmt(sp.param, 12)}", file=out)
    if ray.partial:
        print(f"partial ray: {ray.note}", file=sys.stderr)
    if cfg["out"]:
        render.export_ray_csv(ray, cfg["out"], meta=_meta(cfg))
    return 1 if ray.partial else 0


def cmd_cusp(cfg, out):
    f = _frac(cfg)
    print(fmt(locus.cusp(f), 12), file=out)
    return 0


def cmd_elliptic(cfg, out):
    f = _frac(cfg)
    ns = parse_ns(cfg["n"])
    if not ns:
        raise UsageError("--n is required")
    if cfg["family"] != "maskit":
        raise UsageError("elliptic points are computed in the maskit family")
    pts = locus.elliptic_points(f, ns)
    print(", ".join(fmt(pts[n]) for n in ns), file=out)
    return 0


def cmd_chain(cfg, out):
    f = _frac(cfg)
    tol = cfg["tol"] if cfg["tol"] is not None else chains.TANGENT_TOL
    tol = max(tol, chains.TANGENT_TOL)
    if cfg["n"] is None:
        window = cfg["window"] if cfg["window"] is not None else f.q + 1
        c = chains.build_cusp_chain(f, window)
    else:
        c = chains.build_elliptic_chain(f, _one_n(cfg))
    rep = chains.verify_combinatorial(c, tol=tol)
    extra = {"config": _meta(cfg)}
    curves = []
    if c.closed and len(c) >= 3:
        pc = chains.pleating_curves(c)
        extra["pleating"] = {"disjoint": pc.disjoint, "margin": pc.margin,
                             "simple": pc.simple_A and pc.simple_B,
                             "dagger_residual": pc.dagger_residual}
        curves = pc.arcs_A + pc.arcs_B
        print(f"D_A and D_B disjoint: {pc.disjoint} (margin {pc.margin:.6g})", file=out)
    for name, chk in rep.checks.items():
        print(f"{name}: {'pass' if chk.passed else 'FAIL'} residual={chk.residual:.3g} {chk.detail}",
              file=out)
    if cfg["out"]:
        chains.dump_json(c, cfg["out"], rep, extra)
    if cfg["svg"]:
        vp = parse_viewport(cfg["viewport"]) or (-3.0, -1.0, 3.0, 5.0)
        render.render_svg(cfg["svg"], disks=[c.disks[i] for i in c.indices], curves=curves,
                          viewport=vp, meta=json.dumps(_meta(cfg), sort_keys=True))
    ok = rep.passed and extra.get("pleating", {}).get("disjoint", True)
    return 0 if ok else 1


def cmd_scan(cfg, out):
    f = _frac(cfg)
    n = _one_n(cfg)
    center = parse_complex(cfg["mu"])
    if center is None:
        center = locus.elliptic_points(f, [n])[n]
    res = discreteness.nondiscreteness_scan(center, cfg["radius"], f, n, cfg["grid"])
    for v in ("violating", "inconclusive", "elementary-suspect"):
        print(f"{v}: {res.count(v)}", file=out)
    print(f"center: {res.center()}", file=out)
    if cfg["out"] and str(cfg["out"]).lower().endswith(".csv"):
        render.export_scan_csv(res, cfg["out"], _meta(cfg))
    elif cfg["out"]:
        # heat map of log J, dark = small J
        vals = np.log10(np.maximum(res.values, 1e-12))
        lo, hi = vals.min(), vals.max()
        g = np.zeros_like(vals) if hi == lo else (vals - lo) / (hi - lo)
        img = np.repeat((255 * g[::-1]).astype(np.uint8)[:, :, None], 3, axis=2)
        for i, row in enumerate(res.verdicts[::-1]):
            for j, v in enumerate(row):
                if v == "violating":
                    img[i, j] = (255, 0, 0)
        _write_pixmap(cfg["out"], img, _meta(cfg))
    return 0


def _write_pixmap(path, img, meta):
    h, w = img.shape[:2]
    if str(path).lower().endswith(".png"):
        from PIL import Image
        from PIL.PngImagePlugin import PngInfo
        info = PngInfo()
        info.add_text("config", json.dumps(meta, sort_keys=True))
        Image.fromarray(img, "RGB").save(path, format="PNG", pnginfo=info)
        return
    with open(path, "wb") as fh:
        fh.write(f"P6\n# {json.dumps(meta, sort_keys=True)}\n{w} {h}\n255\n".encode("utf-8"))
        fh.write(img.tobytes())


def cmd_conjugacy(cfg, out):
    ns = parse_ns(cfg["n"]) or list(range(3, 9))
    tol = cfg["tol"]
    worst = 0.0
    for n in ns:
        if n < 3:
            raise UsageError("conjugacy is checked for n >= 3")
        a, b, c = families.beta_images(n)
        tau = families.tau_01(n)
        r = max(a.distance(families.A(n)), b.distance(families.B(n)), c.distance(families.C(n, tau)))
        worst = max(worst, r)
        print(f"n={n} residual={r:.3e}", file=out)
    return 0 if worst <= tol else 1


def cmd_limitset(cfg, out):
    if cfg["family"] == "koebe":
        tau = parse_complex(cfg["tau"])
        if tau is None:
            raise UsageError("--tau is required for the koebe family")
        gens = families.koebe_group(_one_n(cfg), tau).generators
    else:
        mu = parse_complex(cfg["mu"])
        if mu is None:
            raise UsageError("--mu is required")
        g = families.maskit_group(mu)
        gens = [g.S, g.T]
    pc = render.limit_set(gens, cfg["depth"], cfg["min_cell"], viewport=parse_viewport(cfg["viewport"]))
    print(f"points: {len(pc)} nodes: {pc.nodes} truncated: {pc.truncated}", file=out)
    if cfg["out"]:
        _write_pixmap(cfg["out"], render.rasterize(pc, cfg["width"], cfg["height"]), _meta(cfg))
    return 0


def cmd_signature(cfg, out):
    f = _frac(cfg)
    mu = parse_complex(cfg["mu"])
    if mu is None:
        ns = parse_ns(cfg["n"])
        if not ns:
            raise UsageError("give --mu or --n")
        mu = locus.elliptic_points(f, [ns[0]])[ns[0]]
    sig = discreteness.triangle_signature(mu, f)
    shown = "" if sig.signature is None else " (" + ", ".join(
        "inf" if math.isinf(x) else str(x) for x in sig.signature) + ")"
    print(f"{sig.verdict}{shown} {sig.detail}".rstrip(), file=out)
    return 0


COMMANDS = {"ray": cmd_ray, "cusp": cmd_cusp, "elliptic": cmd_elliptic, "chain": cmd_chain,
            "scan": cmd_scan, "conjugacy": cmd_conjugacy, "limitset": cmd_limitset,
            "signature": cmd_signature}


def run(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg, out)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (locus.ConvergenceError, locus.BranchPointError) as e:
        print(f"failed: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())
