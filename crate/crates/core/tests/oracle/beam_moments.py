#!/usr/bin/env python3
"""Scalar reference values for the beam moments at the reference link.

Regenerate with:
    python3 crates/core/tests/oracle/beam_moments.py > crates/core/tests/data/beam_moments.json
"""

import json
import math

W_D = 0.0115
WAVELENGTH = 810e-9
ALPHA_P = 2e-6
N0 = {"day": 0.01, "night": 0.61}


def cn2(h, period):
    if period == "day":
        return 3.13e-13 / h
    return 4.008e-13 / h ** 1.054


def moments(direction, period, h):
    z = h  # vertical path
    k = 2.0 * math.pi / WAVELENGTH
    c = cn2(h, period)
    sigma_r2 = 1.23 * c * k ** (7.0 / 6.0) * z ** (11.0 / 6.0)
    omega = k * W_D ** 2 / (2.0 * z)
    n0 = N0[period]
    if direction == "uplink":
        x0 = 0.419 * sigma_r2 * W_D ** 2 * omega ** (-7.0 / 6.0)
        scat = 1.0 + math.pi / 8.0 * z * n0 * W_D ** 2
        w2 = W_D ** 2 / omega ** 2 * (scat + 2.6 * sigma_r2 * omega ** (5.0 / 6.0))
        pref = 1.0
    else:
        x0 = ALPHA_P * z
        scat = 1.0 + math.pi / 24.0 * z * n0 * W_D ** 2
        w2 = W_D ** 2 / omega ** 2 * (scat + 1.6 * sigma_r2 * omega ** (5.0 / 6.0))
        pref = 3.0 / 8.0
    cov = [
        [(2.0 * (i == j) - 0.8) * pref * W_D ** 4 / omega ** (19.0 / 6.0) * scat * sigma_r2
         for j in range(2)]
        for i in range(2)
    ]
    return {
        "direction": direction,
        "period": period,
        "altitude": h,
        "cn2": c,
        "rytov_sq": sigma_r2,
        "fresnel": omega,
        "centroid_var": x0,
        "mean_w_sq": w2,
        "cov_w_sq": cov,
    }


cases = [
    moments(d, p, h)
    for d in ("uplink", "downlink")
    for p in ("day", "night")
    for h in (30.0, 220.0)
]
print(json.dumps(cases, indent=2))
