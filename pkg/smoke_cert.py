import numpy as np
from gaugecert import certificates as ct
from gaugecert.gauges import (L1Gauge, AnalysisL1Gauge, SortedWeightedL1Gauge,
                              GroupL12Gauge, NonnegL1Gauge, NuclearGauge,
                              SdpTraceGauge)

# --- E1: A=[[2,1]], x0=(1/2,0) -------------------------------------------
A1 = np.array([[2.0, 1.0]])
x1 = np.array([0.5, 0.0])
g = L1Gauge(2)
r = ct.check_sharp(g, A1, x1)
print("E1 sharp:", r.is_sharp, "unique:", r.is_unique)
print("   kappa:", r.kappa, "cert?", r.kappa_certified, "| alpha:", r.alpha,
      "cert?", r.alpha_certified, "| margin:", r.ri_margin)
print("   conds:", r.conditions_checked)
assert r.is_sharp == "Yes" and abs(r.kappa - 1/np.sqrt(5)) < 1e-9
assert abs(r.alpha - 1/np.sqrt(2)) < 1e-3 and abs(r.ri_margin - 0.5) < 1e-8

rf = ct.fuchs_check(A1, x1)
print("E1 fuchs:", rf.is_sharp, "margin:", rf.ri_margin, rf.notes)
assert rf.is_sharp == "Yes" and abs(rf.ri_margin - 0.5) < 1e-8

ru = ct.check_unique(g, A1, x1)
print("E1 unique:", ru.is_unique)
assert ru.is_unique == "Yes"

# --- E2: A=[[1,1]], x0=(1,0) ----------------------------------------------
A2 = np.array([[1.0, 1.0]])
x2 = np.array([1.0, 0.0])
r2 = ct.check_unique(g, A2, x2)
print("E2 sharp:", r2.is_sharp, "unique:", r2.is_unique, "kappa:", r2.kappa,
      "witness:", r2.witness)
assert r2.is_sharp == "No" and r2.is_unique == "No"

# --- fuchs with infeasible support ----------------------------------------
rf2 = ct.fuchs_check(np.array([[1.0, 0.0]]), np.array([0.0, 1.0]))
print("fuchs infeasible:", rf2.is_sharp, rf2.notes)
assert rf2.is_sharp == "No"

# --- fuchs at zero ----------------------------------------------------------
rf0 = ct.fuchs_check(A2, np.zeros(2))
print("fuchs at zero:", rf0.is_sharp, "margin:", rf0.ri_margin)
assert rf0.is_sharp == "Yes"

# --- analysis l1, D = I reduces to fuchs -----------------------------------
ra = ct.analysis_check(A1, np.eye(2), x1)
print("analysis D=I:", ra.is_sharp, "margin:", ra.ri_margin)
assert ra.is_sharp == "Yes" and abs(ra.ri_margin - 0.5) < 1e-8
ga = AnalysisL1Gauge(np.eye(2))
rga = ct.check_sharp(ga, A1, x1)
print("analysis generic:", rga.is_sharp, rga.kappa, rga.ri_margin)
assert rga.is_sharp == "Yes"

# --- analysis TV-ish: D^T=[[1,-1]], A=[[1,1]], x0=(1,1) --------------------
D = np.array([[1.0], [-1.0]])
Atv = np.array([[1.0, 1.0]])
xtv = np.array([1.0, 1.0])
rtv = ct.analysis_check(Atv, D, xtv)
print("analysis TV:", rtv.is_sharp, rtv.conditions_checked)
gtv = AnalysisL1Gauge(D)
rtvg = ct.check_sharp(gtv, Atv, xtv)
print("analysis TV generic:", rtvg.is_sharp, "kappa:", rtvg.kappa)
assert rtv.is_sharp == rtvg.is_sharp == "Yes"

# --- wsl1 -------------------------------------------------------------------
rw = ct.wsl1_check(A2, np.array([2.0, 1.0]), np.array([1.0, 1.0]))
print("wsl1:", rw.is_sharp, "y:", rw.dual_certificate, "margin:", rw.ri_margin)
assert rw.is_sharp == "Yes" and abs(rw.dual_certificate[0] - 1.5) < 1e-8
gw = SortedWeightedL1Gauge(np.array([2.0, 1.0]))
rwg = ct.check_sharp(gw, A2, np.array([1.0, 1.0]))
print("wsl1 generic:", rwg.is_sharp, "kappa:", rwg.kappa)
assert rwg.is_sharp == "Yes" and abs(rwg.kappa - 1/np.sqrt(2)) < 1e-9

# --- nonneg -----------------------------------------------------------------
rn1 = ct.nonneg_l1_check(np.array([[1.0, -1.0]]), np.array([1.0, 0.0]))
rn2 = ct.nonneg_l1_check(np.array([[1.0, 1.0]]), np.array([1.0, 0.0]))
print("nonneg sharp case:", rn1.is_sharp, "| non-sharp case:", rn2.is_sharp,
      "witness:", rn2.witness)
assert rn1.is_sharp == "Yes" and rn2.is_sharp == "No"
gn = NonnegL1Gauge(2)
rn1g = ct.check_sharp(gn, np.array([[1.0, -1.0]]), np.array([1.0, 0.0]))
rn2g = ct.check_sharp(gn, np.array([[1.0, 1.0]]), np.array([1.0, 0.0]))
print("nonneg generic:", rn1g.is_sharp, rn2g.is_sharp)
assert rn1g.is_sharp == "Yes" and rn2g.is_sharp == "No"

# --- group -------------------------------------------------------------------
gg = GroupL12Gauge(3, [[0, 1], [2]])
Ag = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
xg = np.array([3.0, 4.0, 0.0])
rg = ct.check_sharp(gg, Ag, xg)
print("group sharp:", rg.is_sharp, "kappa:", rg.kappa, "margin:", rg.ri_margin)
print("   notes:", rg.notes)
rgu = ct.check_unique(gg, Ag, xg)
print("group unique:", rgu.is_unique)

# --- nuclear worked instance -------------------------------------------------
Phi = np.zeros((3, 4))
Phi[0, 0] = 1.0  # X11
Phi[1, 1] = 1.0  # X12
Phi[2, 2] = 1.0  # X21
X0 = np.array([[1.0, 0.0], [0.0, 0.0]])
rn = ct.nuclear_check(Phi, X0)
print("nuclear:", rn.is_sharp, "kappa:", rn.kappa, "margin:", rn.ri_margin)
print("   conds:", rn.conditions_checked)
assert rn.is_sharp == "Yes" and abs(rn.kappa - 1.0) < 1e-6
gnuc = NuclearGauge((2, 2))
rng_ = ct.check_sharp(gnuc, Phi, X0.ravel())
print("nuclear generic:", rng_.is_sharp, "kappa:", rng_.kappa)
assert rng_.is_sharp == "Yes"

# --- sdp worked instance: unique Yes, sharp No ------------------------------
PhiS = np.zeros((1, 4))
PhiS[0, 0] = 1.0  # X11
C = np.eye(2)
rs = ct.sdp_trace_check(PhiS, C, X0)
print("sdp sharp:", rs.is_sharp, "notes:", rs.notes)
assert rs.is_sharp == "No"
gs = SdpTraceGauge(C)
rsg = ct.check_sharp(gs, PhiS, X0.ravel())
print("sdp generic sharp:", rsg.is_sharp, "kappa:", rsg.kappa,
      "margin:", rsg.ri_margin)
print("   conds:", rsg.conditions_checked)
assert rsg.is_sharp == "No"
rsu = ct.check_unique(gs, PhiS, X0.ravel())
print("sdp unique:", rsu.is_unique, "conds:", rsu.conditions_checked)
assert rsu.is_unique == "Yes"

# --- qp reduction -------------------------------------------------------------
from gaugecert.solvers import solve_tikhonov
sol = solve_tikhonov(g, A1, np.array([1.0]), 0.1)
rq = ct.check_sharp_qp(g, A1, np.array([1.0]), 0.1, sol.point)
print("qp:", rq.is_sharp, rq.is_unique, "xhat:", sol.point)
assert rq.is_sharp == "Yes" and rq.is_unique == "Yes"

# --- upper lipschitz probe ----------------------------------------------------
rep1 = ct.check_sharp(g, A1, x1)
grid = [(None, np.array([0.01])), (np.array([0.0, 0.01]), None),
        (None, None)]
probe = ct.upper_lipschitz_probe(g, A1, x1, rep1.dual_certificate, grid)
print("lipschitz max ratio:", probe["max_ratio"])
for row in probe["rows"]:
    print("   ", row)

# --- to_dict round trip -------------------------------------------------------
import json
s = json.dumps(rep1.to_dict(), allow_nan=True)
back = json.loads(s)
print("json ok:", back["is_sharp"], back["kappa"])

# --- nuclear non-unique: rank-deficient tangent test -------------------------
# Phi sees only the trace of X (2x2); X0 = I/ ... minimize ||X||_* s.t. tr X = 2
PhiT = np.array([[1.0, 0.0, 0.0, 1.0]])
X0T = np.eye(2)
rnt = ct.check_unique(gnuc, PhiT, X0T.ravel())
print("nuclear trace-only:", rnt.is_sharp, rnt.is_unique,
      [c for c in rnt.conditions_checked])
print("   witness:", None if rnt.witness is None else rnt.witness.round(4))

print("ALL SMOKE OK")
