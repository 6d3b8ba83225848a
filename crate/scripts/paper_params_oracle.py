"""Independent oracle for the paper-scale parameter schedules.

Writes crates/core/tests/golden/paper_params.json. Integer quantities use
Python's exact integers and fractions; ceilings involving ln 2 use mpmath at
120 significant digits.
"""
import json
from fractions import Fraction
from pathlib import Path

import mpmath

mpmath.mp.dps = 120
LN2 = mpmath.log(2)


def ceil_frac(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def ceil_ln2(coeff: int) -> int:
    return int(mpmath.ceil(mpmath.mpf(coeff) * LN2))


def schedule(protocol: str, n: int, r: Fraction | None):
    if protocol == "ground":
        eps = Fraction(1, 4 * n * n)
        k = ceil_frac(32 * r * r * n**5)
        m = ceil_ln2(2 * n**5 * k * k)
        groups = 1
    elif protocol == "circuit":
        eps = Fraction(1, 2 * n**3)
        k = ceil_frac(8 * r * r * n**7)
        m = ceil_ln2(2 * n**7 * k * k)
        groups = n
    else:
        k = (4 * n) ** 7
        # k^(2/7) = (4N)^2 and k^(18/7) = (4N)^18 exactly at the minimal k.
        eps = Fraction(1, 4 * n * (4 * n) ** 2)
        m = ceil_ln2(2 * n**3 * (4 * n) ** 18)
        groups = n
    return {
        "protocol": protocol,
        "n": n,
        "r": None if r is None else float(r),
        "epsilon_exact": f"{eps.numerator}/{eps.denominator}",
        "k": str(k),
        "m": str(m),
        "registers": str(groups * k + m + 1),
    }


rows = []
for protocol in ["ground", "circuit", "hypergraph"]:
    rs = [None] if protocol == "hypergraph" else [Fraction(1), Fraction(3, 2)]
    for r in rs:
        for n in range(2, 7):
            rows.append(schedule(protocol, n, r))

out = Path(__file__).resolve().parent.parent / "crates/core/tests/golden/paper_params.json"
out.write_text(json.dumps(rows, indent=2) + "\n")
print(f"wrote {len(rows)} schedules to {out}")
