"""Certified W-state subset-sum bound next to the closed-form reference sum.

    python scripts/w_state_table.py --max-n 12
"""
import argparse

from multient.entanglement import w_negativity, w_negativity_as_printed
from multient.kmeasure import k_paper_w_formula, k_w_lower


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=12)
    args = ap.parse_args()

    print(f"{'n':>3} {'k_w_lower':>14} {'ratio':>7} {'(2^n-2)/16':>12}")
    prev = None
    for n in range(2, args.max_n + 1):
        value = k_w_lower(n)
        ratio = f"{value / prev:7.3f}" if prev else " " * 7
        print(f"{n:>3} {value:14.6f} {ratio} {float(k_paper_w_formula(n)[1]):12.4f}")
        prev = value

    print("\nnegativity of k-qubit marginals, j=1 cut (spectrum form vs. 4j(k-j)/n variant)")
    n = args.max_n
    for k in range(2, n + 1):
        print(f"  n={n} k={k:>2}  {w_negativity(n, k, 1):.6f}  {w_negativity_as_printed(n, k, 1):.6f}")


if __name__ == "__main__":
    main()
