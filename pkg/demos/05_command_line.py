"""Driving the solver through a scene file and the command line front end.

Run: python demos/05_command_line.py [output-dir]
The same steps work from a shell with ``conformal-splines solve pulled.scene``.
"""

from __future__ import annotations

import sys
from pathlib import Path

from conformal_splines import build_surface, shapes, write_obj
from conformal_splines.cli import main

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_output")
out.mkdir(exist_ok=True)

# %% Inputs: a mesh and a scene
# Twelve pinned points, two of them pulled; a point without coordinates stays put.
f, faces = shapes.icosphere(2)
write_obj(out / "sphere.obj", f, build_surface(faces, len(f)))
points = "\n".join(
    f"  point {v} " + " ".join(repr(float(x)) for x in 1.3 * f[v]) if v in (0, 3) else f"  point {v}" for v in range(12)
)
(out / "pulled.scene").write_text(
    f"""conformal-spline-scene 1
mesh sphere.obj
conformal from-mesh
constraints
{points}
end
solver
  tol 1e-8
end
output
  mesh pulled_out.obj
  report pulled_report.txt
  multipliers pulled_q.txt
end
"""
)
print((out / "pulled.scene").read_text())

# %% Solve, then inspect energy and the flux around vertex 0
main(["solve", str(out / "pulled.scene"), "--quiet"])
main(["energy", str(out / "pulled_out.obj")])
(out / "cycles.txt").write_text("vertex 0\nvertex 20\n")
main(["flux-report", str(out / "pulled_out.obj"), "--multipliers", str(out / "pulled_q.txt"), "--cycles", str(out / "cycles.txt")])
