"""
Scanning the logistic parameter
===============================

Off the bifurcation set every attracting cycle is hyperbolic and the
measured dimension stays near zero.  Grid points that land on a
bifurcation value spike.  Same computation as ``bifdim scan``.
"""
from concurrent.futures import ProcessPoolExecutor

from bifdim.cli import scan_row

map_spec = {"family": "logistic"}
lams = [0.5 + 0.25 * k for k in range(13)]  # 0.5 .. 3.5, hits 1 and 3 exactly

if __name__ == "__main__":
    jobs = [(map_spec, lam, (0.0, 1.0), True, 200_000, 8, 1e-9) for lam in lams]
    with ProcessPoolExecutor() as pool:
        rows = list(pool.map(scan_row, *zip(*jobs)))
    print(f"{'lambda':>7} {'period':>6} {'kind':22} {'predicted':>9} {'measured':>9}")
    for r in rows:
        pred = "" if r["predicted_dim"] is None else f"{r['predicted_dim']:.4f}"
        meas = "" if r["measured_dim"] is None else f"{r['measured_dim']:.4f}"
        print(f"{r['lambda']:7.3f} {r['period'] or '':>6} {r['kind'] or r['error']:22} {pred:>9} {meas:>9}")
