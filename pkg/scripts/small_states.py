"""Exhaustive subset sums for the small named states: Bell pairs, path cluster, W, grid.

    python scripts/small_states.py
"""
import argparse

from multient.gridcount import path_graph
from multient.kmeasure import k_grid_verify_small, k_measure, k_w_lower
from multient.qsys import bell_pairs, cluster_state, w_state


def show(name, rep):
    print(f"{name:<16} K in [{rep.k_lower:.6f}, {rep.k_upper:.6f}]  "
          f"bounded {len(rep.per_subset)}, certified zero {rep.skipped_zero}, converged {rep.converged}")
    for e in rep.per_subset:
        b = e.bounds
        print(f"    sites {e.to_dict()['sites']}: [{b.lower:.6f}, {b.upper:.6f}] "
              f"{b.certificate['lower']} / {b.certificate['upper']}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--w-n", type=int, default=4)
    args = ap.parse_args()

    show("bell pairs x2", k_measure(bell_pairs(2)))
    show("cluster path 4", k_measure(cluster_state(path_graph(4))))
    show(f"W_{args.w_n}", k_measure(w_state(args.w_n)))
    print(f"{'':<16} negativity-only reference k_w_lower = {k_w_lower(args.w_n):.6f}")

    for p in (0.0, 0.5, 1.0):
        out = k_grid_verify_small(2, 2, p)
        conn = [c.bounds.lower for c in out["checks"] if c.connected]
        print(f"grid 2x2 p={p}: delta={out['delta'].lower:.6f} min connected lower={min(conn):.6f} "
              f"all passed={out['all_passed']}")


if __name__ == "__main__":
    main()
