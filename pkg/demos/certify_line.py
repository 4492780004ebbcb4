"""Certify the two 1x2 worked instances and read the reports.

The pair illustrates the whole story in two dimensions: with A = [[2, 1]]
the point (1/2, 0) is the unique l1 solution and a sharp minimum (the
objective grows linearly in every feasible direction), while with
A = [[1, 1]] the point (1, 0) sits on a flat edge of the solution set --
mass can slide to the second coordinate at no cost.
"""

import numpy as np

from gaugecert import L1Gauge, check_sharp, check_unique

np.set_printoptions(precision=6, suppress=True)


def show(title, rep):
    print(f"--- {title}")
    print(f"  sharp:  {rep.is_sharp}    unique: {rep.is_unique}")
    print(f"  kappa:  {rep.kappa}  (certified: {rep.kappa_certified})")
    print(f"  alpha:  {rep.alpha}  (certified: {rep.alpha_certified})")
    print(f"  margin: {rep.ri_margin}   certificate y0: {rep.dual_certificate}")
    for cid, verdict, certified in rep.conditions_checked:
        tag = "certified" if certified else "heuristic"
        print(f"    {cid:<18} {verdict:<8} {tag}")
    if rep.witness is not None:
        print(f"  witness direction: {rep.witness}")
    print()


g = L1Gauge(2)

A = np.array([[2.0, 1.0]])
x0 = np.array([0.5, 0.0])
show("A=[[2,1]], x0=(1/2, 0): sharp", check_sharp(g, A, x0))

A = np.array([[1.0, 1.0]])
x0 = np.array([1.0, 0.0])
show("A=[[1,1]], x0=(1, 0): flat", check_unique(g, A, x0))

# kappa is a growth rate you can see: step along the kernel and watch the
# objective climb by kappa per unit step
A = np.array([[2.0, 1.0]])
x0 = np.array([0.5, 0.0])
rep = check_sharp(g, A, x0)
h = np.array([-1.0, 2.0]) / np.sqrt(5.0)  # unit kernel direction attaining kappa
for t in (1e-3, 1e-2, 1e-1):
    growth = (g.value(x0 + t * h) - g.value(x0)) / t
    print(f"t={t:6g}:  [J(x0+th)-J(x0)]/t = {growth:.6f}   (kappa = {rep.kappa:.6f})")
print("(the opposite direction grows faster; kappa is the worst case)")
