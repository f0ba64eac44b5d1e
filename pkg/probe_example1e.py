"""Probe 5: background exponent sweep."""
import numpy as np
from probe_example1 import trapezoid_weights, mgs, bspline_samples
from probe_example1c import bspline_clamped

paper = np.array([1.5018, 0.2305, 0.2298, 9.3211e-4, 2.5829e-6, 2.5673e-7])


def run(beta, style, h=0.0625, div=16, a=0.0, b=10.0, scale=6.0, rank_tol=1e-10):
    step = h / div
    n = int(round((b - a) / step))
    grid = a + step * np.arange(n + 1)
    w = trapezoid_weights(grid)
    V = scale * (bspline_clamped(grid, h, a, b) if style == "clamped"
                 else bspline_samples(grid, h, a, b))
    Y = np.array([(grid + 1.0) ** (-beta * i) for i in range(1, 51)])
    Qy = mgs(Y, w, tol=rank_tol)
    U = V - (V * w) @ Qy.T @ Qy
    Qu = mgs(U, w, tol=1e-12)
    B = (Qu * w) @ V.T
    s = np.linalg.svd(B, compute_uv=False)
    got = np.concatenate([[s[0]], s[-5:]])
    rel = np.abs(got - paper) / paper
    ok = "PASS" if (rel[0] < 0.01 and (rel[1:] < 0.10).all()) else "    "
    print(f"{ok} {style} beta={beta} R_y={Qy.shape[0]}: "
          + " ".join(f"{v:.5g}" for v in got))
    print("      rel: " + " ".join(f"{v:.3g}" for v in rel))


for beta in (0.1, 0.2, 0.25, 0.5):
    for style in ("translate", "clamped"):
        run(beta, style)
