"""Turn an injection into a local rule and check the resulting certificate.

On Z_30 with 5-point tiles, build the injection, read off the block code at
the guaranteed horizon, find the smallest horizon that is already
conflict-free, and verify the piecewise-translation certificate.
"""

from fractions import Fraction

from comparison_chains import (FinSet, GroupCtx, Window, build_code_table, build_injection, build_tiling,
                               certificate_from_code, encode, minimal_horizon, shape_union_E,
                               verify_certificate)

ctx = GroupCtx.torus(30)
w = Window.torus(ctx)
A = FinSet(ctx, [(x,) for x in (0, 6, 12, 13, 20, 27)])
B = FinSet(ctx, [(x,) for x in (2, 3, 7, 9, 10, 11, 14, 16, 17, 21, 22, 25, 28)])
T = build_tiling(ctx, {"type": "zd_boxes", "sides": [5]}, w)
res = build_injection(A, B, T, Fraction(1, 6), w)
E = shape_union_E(T)

c = encode(A, B, w)
bound = res.stats["horizon_exponent"]
code = build_code_table([(c, res.injection)], E.power(bound))
j, _ = minimal_horizon([(c, res.injection)], E, max_power=bound)
print(f"guaranteed horizon E^{bound}, smallest conflict-free horizon E^{j}")
print("code table entries:", len(code.table))

cert = certificate_from_code(code, c)
for g, part in zip(cert.elements, cert.parts):
    print(f"  translate by {g}: {len(part)} points")
print("certificate valid:", verify_certificate(cert, A, B).passed)
