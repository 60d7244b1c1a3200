#!/usr/bin/env python3
"""Re-derives the saturation blend coefficients hard-coded in core/src/tilt.cpp.

The blend piece lives on tau = t - 1/2 in [0, 1] and is the unique polynomial
of degree <= 7 matching the identity (value 1/2 + tau slope 1, curvature 0,
third derivative 0) at tau = 0 and the constant 1 (all derivatives 0) at
tau = 1. The tau^7 coefficient comes out exactly zero.
"""

import sympy as sp

tau = sp.symbols("tau")
coeffs = sp.symbols("c0:8")
p = sum(c * tau**i for i, c in enumerate(coeffs))

conditions = [
    p.subs(tau, 0) - sp.Rational(1, 2),
    sp.diff(p, tau).subs(tau, 0) - 1,
    sp.diff(p, tau, 2).subs(tau, 0),
    sp.diff(p, tau, 3).subs(tau, 0),
    p.subs(tau, 1) - 1,
    sp.diff(p, tau).subs(tau, 1),
    sp.diff(p, tau, 2).subs(tau, 1),
    sp.diff(p, tau, 3).subs(tau, 1),
]

solution = sp.solve(conditions, coeffs)
values = [sp.nsimplify(solution[c]) for c in coeffs]
print("blend coefficients (ascending powers of tau):")
print("  " + ", ".join(str(v) for v in values))

poly = sum(v * tau**i for i, v in enumerate(values))
checks = {
    "p(0)": poly.subs(tau, 0),
    "p'(0)": sp.diff(poly, tau).subs(tau, 0),
    "p(1)": poly.subs(tau, 1),
    "p'(1)": sp.diff(poly, tau).subs(tau, 1),
    "p''(1)": sp.diff(poly, tau, 2).subs(tau, 1),
    "p'''(1)": sp.diff(poly, tau, 3).subs(tau, 1),
    "monotone on [0,1]": sp.simplify(sp.diff(poly, tau)),
}
for name, value in checks.items():
    print(f"  {name} = {value}")
