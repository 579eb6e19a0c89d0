"""
Monochromatic chains on a coloured board
========================================

Colour every cell of a k x k board with 1 or 2.  Either colour 1 joins
the left and right sides or colour 2 joins the bottom and top.  We look
at a few boards, then check every board up to k = 4.
"""

import numpy as np

from connsep import GridSpec, Labeling, exhaustive_verify, random_verify, steinhaus_witness


def show(F, chain=()):
    # row k on top; chain cells in brackets
    k = F.spec.k
    on = set(chain)
    for j in range(k, 0, -1):
        row = []
        for i in range(1, k + 1):
            c = str(F[(i, j)])
            row.append(f"[{c}]" if (i, j) in on else f" {c} ")
        print("".join(row))


# A random 6 x 6 board.  Labels are flat with axis 1 fastest.
rng = np.random.default_rng(3)
spec = GridSpec(2, 6)
F = Labeling(spec, rng.integers(1, 3, size=spec.num_cells))
w = steinhaus_witness(F)
print(f"colour {w.axis} spans axis {w.axis} in {len(w.chain)} cells")
show(F, w.chain.cells)

# On the checkerboard colour 1 crosses through a shared corner.  The
# generalized form allows corners only for colour 1; colour i needs
# contacts of dimension i - 1, so colour 2 must share edges.
checker = Labeling(GridSpec(2, 2), [1, 2, 2, 1])
w = steinhaus_witness(checker, generalized=True)
print(f"checkerboard: colour {w.axis}, chain {w.chain.cells}, link dims {w.chain.link_dims}")

# Every board of the small sizes, plus a seeded sample in 3-D.
for n, k in [(2, 2), (2, 3), (2, 4), (3, 2)]:
    r = exhaustive_verify(n, k, "generalized")
    print(f"n={n} k={k}: {r.total} boards, {r.failures} failures, colours {r.histogram}")
r = random_verify(3, 5, "plain", 500, seed=1)
print(f"n=3 k=5 random: {r.total} boards, {r.failures} failures")
