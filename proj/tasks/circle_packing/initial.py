# Copyright 2026 The Shinka Authors.
# SPDX-License-Identifier: Apache-2.0

"""Packs 26 circles into the unit square and prints one "x y r" line each."""

import math

# EVOLVE-BLOCK-START
def construct_packing():
    """5x5 grid of touching circles plus one circle in a gap."""
    circles = []
    for i in range(5):
        for j in range(5):
            circles.append((0.1 + 0.2 * i, 0.1 + 0.2 * j, 0.1))
    # The gap between four touching circles of radius 0.1 fits
    # a circle of radius 0.1 * (sqrt(2) - 1).
    circles.append((0.2, 0.2, 0.1 * (math.sqrt(2.0) - 1.0)))
    return circles
# EVOLVE-BLOCK-END


def main():
    for x, y, r in construct_packing():
        print(f"{x!r} {y!r} {r!r}")


if __name__ == "__main__":
    main()
