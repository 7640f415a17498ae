"""Rigid dualizing complexes and traces from Python."""
from rigidcalc import QQ, RingMap, RingPresentation, rigid_dualizing_complex, rigid_trace
from rigidcalc.dualizing import trace_tower


def ring(names, rels=()):
    return RingPresentation(QQ, names, list(rels))


A = ring(["x"])
B = ring(["x"], ["x^4"])
C = ring(["x"], ["x^2"])

for R in (A, C, ring(["x", "y"], ["x*y"])):
    rdc = rigid_dualizing_complex(R)
    print(f"{R}: degree {rdc.d}, rho = {rdc.rho.matrix}, Morita: {rdc.morita.holds}")

tr = rigid_trace(RingMap(A, C, ["x"]))
print("trace unit:", tr.unit, "cocycle:", [[str(f) for f in col] for col in tr.morphism.cocycle()])
print("tower holds:", trace_tower(RingMap(A, B, ["x"]), RingMap(B, C, ["x"])).holds)
