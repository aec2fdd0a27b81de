"""
Building a model and checking its convexity rules
==================================================

"""

# import the toolkit: variables, atoms, and the rule checker
import miconic as mc
from miconic import atoms

# a small mixed-integer model: push as far as possible along a direction
# 15 degrees above the first axis, while staying inside a disk of radius
# 2.5; the first coordinate must be an integer
import numpy as np
m = mc.DcpModel()
x1 = m.variable("x1", integer=True, lb=-2, ub=2)
x2 = m.variable("x2", lb=-2.5, ub=2.5)
c, s = np.cos(np.radians(15.0)), np.sin(np.radians(15.0))
m.minimize(-(c * x1 + s * x2))
m.add(atoms.sumsquares(x1, x2) <= 2.5 ** 2)

# every model is checked against the composition rules before anything
# else happens: a convex function may only appear where convexity is
# allowed, and so on down the expression tree
report = mc.dcp_verify(m)
print("disk model passes the rules:", report.ok)

# an expression that breaks the rules is reported with the exact subtree
# to blame; log is concave, so bounding it above proves nothing
bad = mc.DcpModel()
y = bad.variable("y", lb=0.1, ub=10.0)
bad.minimize(y)
bad.add(atoms.log(y) <= 0)
report = mc.dcp_verify(bad)
print("log model passes the rules:", report.ok)
for violation in report.violations:
    print("  violation:", violation)

# models round-trip through a plain text form, handy for shipping
# instances around or editing them by hand
text = mc.print_model(m)
print()
print(text)
again = mc.parse_model(text)
print("round-trip preserves the text:", mc.print_model(again) == text)
