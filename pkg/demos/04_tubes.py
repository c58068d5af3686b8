"""Thin tubes around space curves and their conformal modulus.

Run: python demos/04_tubes.py [output-dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from conformal_splines import TubeSpec, generate_tube, geometry, tube_invariants, write_obj
from conformal_splines.diagnostics import circle_curve, spherical_curve, torus_knot

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_output")
out.mkdir(exist_ok=True)

# %% Invariants from the centerline alone
# Area, volume and energy follow from thickness and curvature; the modulus
# has real part equal to the total torsion.
curves = {"circle": circle_curve(256), "trefoil": torus_knot(400), "spherical": spherical_curve(512)}
for name, c in curves.items():
    inv = tube_invariants(TubeSpec(c, 0.1))
    print(
        f"{name:9s} length {inv.length:7.3f}  theta {inv.theta:+8.4f} (winding {inv.winding:+d})"
        f"  Im tau {inv.im_tau:8.2f}  W {inv.willmore:7.2f}"
    )

# %% The mesh agrees with the thin-tube formulas
spec = TubeSpec(curves["circle"], 0.1, m=64)
f, s = generate_tube(spec)
inv = tube_invariants(spec)
print(f"circle tube: mesh area {geometry.area(s, f):.4f} vs {inv.area:.4f}, volume {geometry.volume(s, f):.5f} vs {inv.volume:.5f}")
write_obj(out / "trefoil_tube.obj", *generate_tube(TubeSpec(curves["trefoil"], 0.1)))
