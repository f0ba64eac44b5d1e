"""Probe 6: spline degree sweep at M = 163."""
import numpy as np
from probe_example1 import trapezoid_weights, mgs, cox_de_boor

paper = np.array([1.5018, 0.2305, 0.2298, 9.3211e-4, 2.5829e-6, 2.5673e-7])


def bsplines(grid, a, b, degree, n_int, style):
    order = degree + 1
    h = (b - a) / n_int
    atoms = []
    if style == "clamped":
        interior = a + h * np.arange(n_int + 1)
        knots = np.concatenate([[a] * degree, interior, [b] * degree])
        for j in range(n_int + degree):
            atoms.append(cox_de_boor(grid, knots[j:j + order + 1], order))
    else:
        for j in range(-degree, n_int):
            t = a + h * np.arange(j, j + order + 1)
            atoms.append(cox_de_boor(grid, t, order))
    return np.array(atoms)


def run(degree, style, ry, div=16, a=0.0, b=10.0, scale=6.0, rank_tol=1e-10):
    n_int = 163 - degree
    h = (b - a) / n_int
    step = h / div
    n = int(round((b - a) / step))
    grid = a + step * np.arange(n + 1)
    w = trapezoid_weights(grid)
    V = scale * bsplines(grid, a, b, degree, n_int, style)
    Y = np.array([(grid + 1.0) ** (-0.05 * i) for i in range(1, 51)])
    Qy = mgs(Y, w, tol=rank_tol)
    if ry is not None:
        Qy = Qy[:ry]
    U = V - (V * w) @ Qy.T @ Qy
    Qu = mgs(U, w, tol=1e-12)
    B = (Qu * w) @ V.T
    s = np.linalg.svd(B, compute_uv=False)
    got = np.concatenate([[s[0]], s[-5:]])
    rel = np.abs(got - paper) / paper
    ok = "PASS" if (rel[0] < 0.01 and (rel[1:] < 0.10).all()) else "    "
    print(f"{ok} deg={degree} {style} h={h:.5f} M={V.shape[0]} R_y={Qy.shape[0]}: "
          + " ".join(f"{v:.5g}" for v in got))
    print("      rel: " + " ".join(f"{v:.3g}" for v in rel))


for degree in (3, 4, 5):
    for style in ("translate", "clamped"):
        for ry in (3, None):
            run(degree, style, ry)
