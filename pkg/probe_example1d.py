"""Probe 4: coarse quadrature grids and full-support variants."""
import numpy as np
from probe_example1 import trapezoid_weights, mgs, bspline_samples
from probe_example1c import bspline_clamped

paper = np.array([1.5018, 0.2305, 0.2298, 9.3211e-4, 2.5829e-6, 2.5673e-7])


def run(h, div, ry_list, style, a=0.0, b=10.0, scale=6.0):
    step = h / div
    n = int(round((b - a) / step))
    grid = a + step * np.arange(n + 1)
    w = trapezoid_weights(grid)
    if style == "clamped":
        V = scale * bspline_clamped(grid, h, a, b)
    elif style == "translate":
        V = scale * bspline_samples(grid, h, a, b)
    elif style == "fullsupport":
        ge = np.arange(a - 3 * h, b + 3 * h + step / 2, step)
        grid = ge
        w = trapezoid_weights(grid)
        V = scale * bspline_samples(grid, h, a - 3 * h, b + 3 * h)[3:-3]
    Y = np.array([(grid + 1.0) ** (-0.05 * i) for i in range(1, 51)])
    max_norm = max(np.sqrt(np.sum(w * yy * yy)) for yy in Y)
    qs = []
    for yy in Y:
        v = yy.copy()
        for _ in range(2):
            for q in qs:
                v -= q * np.sum(w * q * v)
        nrm = np.sqrt(np.sum(w * v * v))
        if nrm > 1e-13 * max_norm:
            qs.append(v / nrm)
    Qy_full = np.array(qs)
    for ry in ry_list:
        Qy = Qy_full[:ry]
        U = V - (V * w) @ Qy.T @ Qy
        Qu = mgs(U, w, tol=1e-12)
        B = (Qu * w) @ V.T
        s = np.linalg.svd(B, compute_uv=False)
        got = np.concatenate([[s[0]], s[-5:]])
        rel = np.abs(got - paper) / paper
        ok = "PASS" if (rel[0] < 0.01 and (rel[1:] < 0.10).all()) else "    "
        print(f"{ok} {style} h={h} div={div} M={V.shape[0]} R_y={ry}: "
              + " ".join(f"{v:.5g}" for v in got))
        print(f"      rel: " + " ".join(f"{v:.3g}" for v in rel))


for div in (1, 2, 4):
    run(0.0625, div, [3, 4], "clamped")
    run(0.0625, div, [3, 4], "translate")
run(0.0625, 16, [3, 4], "fullsupport")
