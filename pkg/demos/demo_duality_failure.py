"""
Detecting a strong-duality failure
===================================

"""

# outer approximation leans on one assumption: every integer fiber of
# the continuous relaxation satisfies strong duality, so an optimal
# fiber yields a supporting cut.  Here is a tiny program where that
# fails: on the fiber t = 0 the rotated-cone constraint pins u1 = 0,
# the objective infimum 0 is not attained, and no supporting cut exists
import miconic as mc

program = mc.instances.duality_failure_program()
print("integer columns:", program.A_x.shape[1])
print("cone factors:   ", [(f.kind, f.dim) for f in program.cones.factors])

# the driver neither loops forever nor invents an answer: it notices
# that the master problem stays unbounded after the root pass and
# reports the broken assumption with a diagnostic
res = mc.oa_solve(program)
print()
print("status:    ", res.status)
print("iterations:", res.iterations)
print("diagnostic:", res.diagnostic)

# brute-force enumeration hits the same wall from the other side: the
# bad fiber never resolves to a certified optimum or infeasibility, so
# the enumeration proves nothing and says so
truth = mc.brute_force_solve(program)
print()
print("brute-force status:", truth.status)

# the instance also ships as a standard-form text file; from the shell,
#   miconic solve instances/rsoc_duality_failure.conic
# exits with a dedicated status code so scripts can tell this apart
# from an ordinary infeasible or optimal answer
