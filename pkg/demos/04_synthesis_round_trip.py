"""
Building a field with prescribed Conn and Sep sets
==================================================

Given A_i and B_i for every axis, check that they are realizable, write
down an explicit field, and run the analyzer on it.  Every certified
level must fall inside (or outside) the prescribed sets.
"""

from connsep import ConnSepSpec, build_function, evaluate, validate_spec, verify_round_trip

spec = ConnSepSpec.make(A=[None, [0.1, 0.9], [0.2, 0.8]], B=[[0.2, 0.8], None, None])
print("violation:", validate_spec(spec))

sf = build_function(spec)
print("branch:", sf.branch, "permutation:", sf.permutation)
for e in sf.elements:
    print(" ", e)

# The far slab ramps from b^l to b^r; the near half is flat at b^l.
for p in ([0.75, 0.3, 0.6], [1.0, 0.3, 0.6], [0.2, 0.9, 0.1]):
    print(p, "->", round(evaluate(sf, p), 4))

# An unrealizable request: a point A_i needs B_i = A_i.
bad = ConnSepSpec.make([0.5, 0.5], [0.4, 0.5])
print("violation:", validate_spec(bad))

# Round trip at a modest schedule (the acceptance suite uses 16, 32, 64).
rt = verify_round_trip(sf, schedule=(8, 16, 32), dp=0.02)
print("round trip ok:", rt.ok, "violations:", len(rt.violations))
cs = rt.certified
for axis in cs.axes:
    sep = cs.intervals(axis, "sep_in")
    conn = cs.intervals(axis, "conn_in")
    print(f"axis {axis}: Sep certified on {sep or '-'}, Conn certified on {conn or '-'}")
