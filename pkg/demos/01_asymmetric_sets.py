"""Where the six asymmetric invariant sets appear.

Sweeps rational couplings, decides invariance of the union A exactly and
prints the first failing piece with its witness point below the threshold.
"""
from fractions import Fraction

from cml4.verify import check_invariance, critical_values, proposition_report

cv = critical_values(n_max=1)
lo, hi = cv.eps_star_bracket
print(f"threshold from the cubic: {float(lo):.12f} < eps* < {float(hi):.12f}")

for k in range(388, 403, 2):
    eps = Fraction(k, 1000)
    rep = check_invariance("A", eps)
    line = f"eps = {eps!s:>9}  invariant: {rep.holds}"
    if not rep.holds:
        v = rep.violations[0]
        line += f"  (piece {v.member} in {v.branch} leaks; witness {[f'{float(c):.4f}' for c in v.witness]})"
    print(line)

rep = proposition_report(1, Fraction(41, 100))
print("\nall sub-checks at 41/100:", rep.checks)
print("routing of the generating pieces:")
for p in rep.details["invariance"]["pieces"]:
    print(f"  G({p['member']} ∩ {p['branch']}) -> {', '.join(p['all_targets'])}")
