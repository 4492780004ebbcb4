import numpy as np
from gaugecert import recovery as rc
from gaugecert.gauges import L1Gauge

# E1 with adversarial omega at three deltas
g = L1Gauge(2)
A = np.array([[2.0, 1.0]])
x0 = np.array([0.5, 0.0])
for d in (1e-3, 1e-2, 1e-1):
    inst = rc.ProblemInstance(A=A, x0=x0, b0=A @ x0, delta=d,
                              omega=np.array([d]), seed=0, gauge=g,
                              instance_id=f"e1-d{d}")
    rep = rc.run_recovery(inst, c1=1.0)
    r = rep.rows[0]
    print(f"d={d}: err_moz={r['err_mozorov']:.6g} bound={r['bound_mozorov']:.6g} "
          f"err_tik={r['err_tikhonov']:.6g} b_y0={r['bound_tikhonov_y0']:.6g} "
          f"b_lip={r['bound_tikhonov_lip']:.6g} pass={r['pass']}")
    assert r["pass"] == "True"
    assert r["err_mozorov"] <= 2 * np.sqrt(2) * d + 1e-5

# E2 -> bounds not applicable
x2 = np.array([1.0, 0.0])
A2 = np.array([[1.0, 1.0]])
inst2 = rc.ProblemInstance(A=A2, x0=x2, b0=A2 @ x2, delta=0.01,
                           omega=np.array([0.01]), seed=0, gauge=g,
                           instance_id="e2")
rep2 = rc.run_recovery(inst2, c1=1.0)
print("E2:", rep2.rows[0]["pass"], "|", rep2.rows[0]["note"])
assert rep2.rows[0]["pass"] == "na"

# delta = 0 -> errors 0
inst0 = rc.ProblemInstance(A=A, x0=x0, b0=A @ x0, delta=0.0,
                           omega=np.zeros(1), seed=0, gauge=g,
                           instance_id="e1-d0")
rep0 = rc.run_recovery(inst0, c1=1.0)
r0 = rep0.rows[0]
print("d=0:", r0["err_mozorov"], r0["err_tikhonov"], r0["pass"])
assert r0["pass"] == "True" and r0["err_mozorov"] <= 1e-7

# gen_instance determinism + sweep byte-identity
cfg = {"m": 4, "n": 8, "sparsity": 1, "kind": "l1", "delta": 1e-2}
i1 = rc.gen_instance(cfg, 3)
i2 = rc.gen_instance(cfg, 3)
assert np.array_equal(i1.A, i2.A) and np.array_equal(i1.omega, i2.omega)
print("instance id:", i1.instance_id)

grid = [dict(cfg, delta=d) for d in (1e-3, 1e-2)]
rep_a, csv_a = rc.sweep(grid, seeds=range(4), c1=0.1)
rep_b, csv_b = rc.sweep(grid, seeds=range(4), c1=0.1)
assert csv_a == csv_b
print(csv_a.splitlines()[0])
for line in csv_a.splitlines()[1:4]:
    print(line)
print("summary:", rep_a.summary())

# corrupted alpha -> violation
rep_c, _ = rc.sweep([dict(cfg, delta=1e-1)], seeds=[0], c1=0.1,
                    overrides={"alpha": 1e8})
print("corrupted:", rep_c.rows[0]["pass"], rep_c.worst_violation)
assert rep_c.rows[0]["pass"] in ("False", "na")

# zero sparsity, zero delta
iz = rc.gen_instance({"m": 2, "n": 3, "sparsity": 0, "delta": 0.0}, 1)
assert np.all(iz.x0 == 0) and np.all(iz.b0 == 0)
rz = rc.run_recovery(iz, 1.0)
print("zero instance:", rz.rows[0]["pass"], rz.rows[0]["err_mozorov"])

print("RECOVERY SMOKE OK")
