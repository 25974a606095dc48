"""The symmetric set S and the Lorenz map that generates its corners."""
from fractions import Fraction

from cml4 import lorenz
from cml4.regions import Constants
from cml4.verify import proposition_report

eps = Fraction(2, 5)
C1, C2 = lorenz.mixing_components(eps)
print("mixing components at 2/5")
print("  C1 =", " ∪ ".join(f"({I.lo}, {I.hi})" for I in C1))
print("  C2 =", " ∪ ".join(f"({I.lo}, {I.hi})" for I in C2))
print("  cycle:", lorenz.component_cycle(eps))

print("\nconstants at 32/100:", Constants.at(Fraction(32, 100)).to_json())

print("\neps     above eps1  L^3 <= L  S invariant")
for k in (26, 28, 30, 32, 36, 40):
    e = Fraction(k, 100)
    rep = proposition_report(2, e)
    print(f"{float(e):.2f}    {lorenz.above_eps1(e)!s:<10}  {lorenz.third_iterate_condition(e)!s:<8}  "
          f"{rep.checks['invariance']}")
