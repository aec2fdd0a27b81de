"""
From a model to conic standard form and back
=============================================

"""

# every model compiles to one fixed shape: minimize c'z subject to
# A_x x + A_z z = b, with x integer in a finite box and z in a product
# of primitive cones; all the solver machinery works on that shape only
from pathlib import Path
import numpy as np
import miconic as mc

here = Path(__file__).resolve().parent
model_text = (here.parent / "instances" / "disk.model").read_text()
model = mc.parse_model(model_text)

program, cmap = mc.emit_conic(model)
print("integer columns:", program.A_x.shape[1])
print("conic columns:  ", program.A_z.shape[1])
print("equality rows:  ", program.A_x.shape[0])
print("cone factors:   ", [(f.kind, f.dim) for f in program.cones.factors])

# the compiled program has its own text format; writing and re-reading
# reproduces every number bit for bit
conic_text = mc.write_conic(program)
print()
print(conic_text)
again = mc.read_conic(conic_text)
print("exact round-trip:", np.array_equal(again.c, program.c)
      and np.array_equal(again.b, program.b))

# solving happens in program coordinates; the compilation map translates
# the flat solution vector back to the model's named variables
res = mc.oa_solve(program)
point = mc.recover_solution(cmap, np.concatenate([res.x, res.z]))
print()
print("status:   ", res.status)
print("objective:", res.obj + program.obj_offset)
print("solution: ", {k: round(float(v), 6) for k, v in sorted(point.items())})

# the same pipeline is available from the shell:
#   miconic compile instances/disk.model -o disk.conic
#   miconic solve disk.conic
