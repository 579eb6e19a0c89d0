"""
Connecting and separating levels of an integer field
====================================================

An integer field that changes by at most one between touching cells has,
for each axis, a level set that either connects the two opposite faces
or separates them.  ``separating_level`` finds the smallest such level
and returns a chain or a separation certificate.
"""

import numpy as np

from connsep import GridSpec, IntegerField, separating_level
from connsep.chessboard import random_lipschitz_field

# A tilted plane: value = column index - 1.
spec = GridSpec(2, 4)
G = IntegerField(spec, [c[0] - 1 for c in spec.cells()])
for axis in (1, 2):
    r = separating_level(G, axis)
    print(f"axis {axis}: {r.kind} at level {r.level}")
    if r.chain is not None:
        print("  chain", r.chain.cells)
    else:
        cert = r.certificate
        print(f"  {len(cert.minus_components())} components on the (-) side, "
              f"{len(cert.plus_components())} on the (+) side")

# Random Lipschitz fields.  Each result is checked by its own validator.
rng = np.random.default_rng(11)
kinds = {"connecting": 0, "separating": 0}
for _ in range(200):
    G = random_lipschitz_field(GridSpec(2, 6), rng)
    r = separating_level(G, 1)
    if r.kind == "connecting":
        r.chain.validate(G.spec, G.level_set(r.level))
    else:
        r.certificate.validate()
    kinds[r.kind] += 1
print("200 random fields:", kinds)
