"""Probe 3: clamped-knot basis and grid sensitivity."""
import numpy as np
from probe_example1 import trapezoid_weights, mgs, cox_de_boor

paper = np.array([1.5018, 0.2305, 0.2298, 9.3211e-4, 2.5829e-6, 2.5673e-7])


def bspline_clamped(grid, h, a, b, order=4):
    n_int = int(round((b - a) / h))
    interior = a + h * np.arange(n_int + 1)
    knots = np.concatenate([[a] * (order - 1), interior, [b] * (order - 1)])
    atoms = []
    for j in range(n_int + order - 1):
        atoms.append(cox_de_boor(grid, knots[j:j + order + 1], order))
    return np.array(atoms)


def run(h, div, scale, ry_list, clamped):
    a, b = 0.0, 10.0
    step = h / div
    n = int(round((b - a) / step))
    grid = a + step * np.arange(n + 1)
    w = trapezoid_weights(grid)
    if clamped:
        V = scale * bspline_clamped(grid, h, a, b)
    else:
        from probe_example1 import bspline_samples
        V = scale * bspline_samples(grid, h, a, b)
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
        tag = "clamped" if clamped else "translate"
        print(f"{tag} h={h} div={div} M={V.shape[0]} R_y={ry}:")
        print("  tail(-8..):", " ".join(f"{v:.4g}" for v in s[-8:]))
        print("  rel vs paper:", " ".join(f"{v:.3g}" for v in rel))


run(0.0625, 16, 6.0, [3, 4, 5, 14], clamped=True)
run(0.0625, 8, 6.0, [3], clamped=True)
run(0.0625, 32, 6.0, [3], clamped=True)
