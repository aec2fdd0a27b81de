"""
Random instances against a brute-force oracle
==============================================

"""

# the generators build programs whose ground truth is known by
# construction: feasible instances get a planted interior point and a
# dual certificate, infeasible ones a separating functional that kills
# every integer fiber at once
import numpy as np
import miconic as mc

rng = np.random.default_rng(11)

# solve each instance twice: with the outer-approximation driver, and
# by enumerating every integer assignment and solving the fibers
agree = 0
rows = []
for k in range(10):
    program = mc.instances.random_feasible_program(rng)
    res = mc.oa_solve(program)
    truth = mc.brute_force_solve(program)
    ok = res.status == truth.status == "optimal" and (
        abs(res.obj - truth.obj) <= 1e-5 * (1.0 + abs(truth.obj)))
    agree += ok
    rows.append(("feasible %02d" % k, res.status, res.iterations, ok))
for k in range(5):
    program = mc.instances.random_infeasible_program(rng)
    res = mc.oa_solve(program)
    truth = mc.brute_force_solve(program)
    ok = res.status == truth.status == "infeasible"
    agree += ok
    rows.append(("infeasible %02d" % k, res.status, res.iterations, ok))

print("instance       status      iterations  matches oracle")
for name, status, iters, ok in rows:
    print("%-13s  %-10s  %10d  %s" % (name, status, iters, ok))
print()
print("agreement: %d / %d" % (agree, len(rows)))

# the mix deliberately spans all cone kinds; the same comparison runs
# from the shell with `miconic solve --oracle FILE`, which exits
# nonzero if the two answers ever diverge
