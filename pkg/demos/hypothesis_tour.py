"""Walk through the hypothesis checker on a few reference models.

Run with ``python3 demos/hypothesis_tour.py``.
"""

from qlslab import checker as ck
from qlslab.nonlinearity import FSpec, HSpec, ModelSpec

# Potential and Hartree decay exponents (m, n) against a cubic nonlinearity
for n in (2.5, 2.0):
    rep = ck.check_corollary65(2, 1.5, n, 1.0)
    print(f"N=2 m=1.5 n={n} beta=1: {rep.verdict}, cases met {rep.constants['cases_met']}")
    for name in ck.corollary65_failed(rep, "I"):
        print("   case I fails on", name)

# Sigma scattering for a pure defocusing monomial needs beta above a lower endpoint
for N in (1, 2, 3):
    lo = ck.remark63_lower(N)
    print(f"N={N}: beta window starts at {lo:.6f}")
print(ck.check_theorem7(ModelSpec(1, f=FSpec(((-1.0, 2.0),)))).to_text())

# Quasilinear cubic in 3D lands in the second sign case
print(ck.check_theorem3(ModelSpec(3, HSpec("power", 1.0), FSpec(((-1.0, 1.0),)))).to_text())

# Combined nonlinearity: the smallness product grows like mass^(2/N)
model = ModelSpec(3, HSpec("power", 1.0), FSpec(((1.0, 1.0), (-1.0, 2.0))))
for mass in (1e-3, 1e-1, 1e1):
    rep = ck.check_theorem1(model, mass, 0.1)
    print(f"mass {mass:g}: smallness {rep.constants['smallness']:.3e} -> {rep.verdict}")
