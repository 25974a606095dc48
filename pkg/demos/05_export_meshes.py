"""Write A, its six images and S as OBJ meshes for an external viewer."""
import sys
from fractions import Fraction
from pathlib import Path

from cml4.export import write_region
from cml4.regions import build_region
from cml4.symmetry import apply_to_region, full_group, orbit_of_region

out = Path(sys.argv[1] if len(sys.argv) > 1 else "meshes")
out.mkdir(exist_ok=True)
eps = Fraction(41, 100)
A = build_region("A", eps)
orb = orbit_of_region(A, full_group())
for w, img in zip(orb.words, orb.images):
    print("wrote", write_region(img, out / f"A_{w or 'id'}.obj"))
print("wrote", write_region(build_region("S", eps), out / "S.obj"))
print("stabilizer of A:", ", ".join(w or "id" for w in orb.stabilizer))
