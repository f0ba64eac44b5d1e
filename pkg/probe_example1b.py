"""Probe 2: background-rank dependence of the Example-1 tail."""
import numpy as np
from probe_example1 import trapezoid_weights, bspline_samples, mgs

paper = np.array([1.5018, 0.2305, 0.2298, 9.3211e-4, 2.5829e-6, 2.5673e-7])

h, div, scale, a, b = 0.0625, 16, 6.0, 0.0, 10.0
step = h / div
n = int(round((b - a) / step))
grid = a + step * np.arange(n + 1)
w = trapezoid_weights(grid)
V = scale * bspline_samples(grid, h, a, b)
Y = np.array([(grid + 1.0) ** (-0.05 * i) for i in range(1, 51)])

# residual-norm profile of MGS on Y (relative to largest atom norm)
max_norm = max(np.sqrt(np.sum(w * yy * yy)) for yy in Y)
qs = []
ratios = []
for yy in Y:
    v = yy.copy()
    for _ in range(2):
        for q in qs:
            v -= q * np.sum(w * q * v)
    nrm = np.sqrt(np.sum(w * v * v))
    ratios.append(nrm / max_norm)
    if nrm > 1e-13 * max_norm:
        qs.append(v / nrm)
print("MGS residual ratios (sorted desc):",
      " ".join(f"{r:.2e}" for r in sorted(ratios, reverse=True)))

Qy_full = np.array(qs)
for ry in (3, 4, 5, 6, 8, len(qs)):
    Qy = Qy_full[:ry]
    U = V - (V * w) @ Qy.T @ Qy
    Qu = mgs(U, w, tol=1e-12)
    B = (Qu * w) @ V.T
    s = np.linalg.svd(B, compute_uv=False)
    got = np.concatenate([[s[0]], s[-5:]])
    rel = np.abs(got - paper) / paper
    print(f"R_y={ry}: tail(-10..):", " ".join(f"{v:.4g}" for v in s[-10:]))
    print(f"         rel vs paper:", " ".join(f"{v:.3g}" for v in rel))
