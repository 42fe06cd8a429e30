"""Angular-momentum coupling coefficients for integer spins.

Exact-rational Racah evaluation, enough for the dipole (j2 = 1)
couplings between the hyperfine levels used here.  Kept dependency-free
so the branching weights do not pull in a CAS.
"""

from fractions import Fraction
from math import factorial, sqrt


def wigner_3j(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    """Wigner 3-j symbol for integer angular momenta."""
    if m1 + m2 + m3 != 0:
        return 0.0
    if not abs(j1 - j2) <= j3 <= j1 + j2:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0
    tri = Fraction(
        factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3),
        factorial(j1 + j2 + j3 + 1),
    )
    pre = (
        tri
        * factorial(j1 + m1) * factorial(j1 - m1)
        * factorial(j2 + m2) * factorial(j2 - m2)
        * factorial(j3 + m3) * factorial(j3 - m3)
    )
    t_min = max(0, j2 - j3 - m1, j1 - j3 + m2)
    t_max = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    acc = Fraction(0)
    for t in range(t_min, t_max + 1):
        denom = (
            factorial(t)
            * factorial(j3 - j2 + m1 + t) * factorial(j3 - j1 - m2 + t)
            * factorial(j1 + j2 - j3 - t)
            * factorial(j1 - m1 - t) * factorial(j2 + m2 - t)
        )
        acc += Fraction((-1) ** t, denom)
    return float(acc) * sqrt(float(pre)) * (-1.0) ** (j1 - j2 - m3)


def clebsch_gordan(j1: int, m1: int, j2: int, m2: int, J: int, M: int) -> float:
    """<j1 m1; j2 m2 | J M> for integer angular momenta."""
    return (
        (-1.0) ** (j1 - j2 + M)
        * sqrt(2 * J + 1)
        * wigner_3j(j1, j2, J, m1, m2, -M)
    )
