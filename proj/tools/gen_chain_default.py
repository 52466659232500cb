#!/usr/bin/env python3
"""Generates data/chain_default.json for the bundled 7-joint arm.

The golden forward-kinematics pose at q = 0 is computed here with a plain
matrix product over standard DH transforms, independent of the C++ code,
and embedded in the file for regression testing.
"""
import json
import math
import pathlib

import numpy as np

JOINTS = [
    # a, alpha, d, theta_offset, lo, hi, vel
    (0.0, -math.pi / 2, 0.340, 0.0, -2.967, 2.967, 1.71),
    (0.0, math.pi / 2, 0.000, 0.0, -2.094, 2.094, 1.71),
    (0.0, math.pi / 2, 0.400, 0.0, -2.967, 2.967, 1.75),
    (0.0, -math.pi / 2, 0.000, 0.0, -2.094, 2.094, 2.27),
    (0.0, -math.pi / 2, 0.400, 0.0, -2.967, 2.967, 2.44),
    (0.0, math.pi / 2, 0.000, 0.0, -2.094, 2.094, 3.14),
    (0.0, 0.0, 0.126, 0.0, -3.054, 3.054, 3.14),
]
TOOL_T = [0.0, 0.0, 0.120]  # massage-ball offset along tool z


def dh(a, alpha, d, theta):
    ct, st = math.cos(theta), math.sin(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return np.array([
        [ct, -st * ca, st * sa, a * ct],
        [st, ct * ca, -ct * sa, a * st],
        [0.0, sa, ca, d],
        [0.0, 0.0, 0.0, 1.0],
    ])


def main():
    T = np.eye(4)
    for a, alpha, d, off, *_ in JOINTS:
        T = T @ dh(a, alpha, d, off)
    tool = np.eye(4)
    tool[:3, 3] = TOOL_T
    T = T @ tool

    chain = {
        "convention": "dh_standard",
        "joints": [
            {"a": a, "alpha": alpha, "d": d, "theta_offset": off,
             "lo": lo, "hi": hi, "vel": vel}
            for a, alpha, d, off, lo, hi, vel in JOINTS
        ],
        "tool": {
            "rotation": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            "translation": TOOL_T,
        },
        "golden_fk_q0": {
            "position_m": [float(x) for x in T[:3, 3]],
            "rotation": [[float(x) for x in row] for row in T[:3, :3]],
        },
    }
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "chain_default.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(chain, indent=2) + "\n")
    print(f"wrote {out}")
    print("fk(q=0) position:", T[:3, 3])


if __name__ == "__main__":
    main()
