# Copyright 2026 The Shinka Authors.
# SPDX-License-Identifier: Apache-2.0

# Synthetic vector task: the evaluator reads the coordinates below.
# EVOLVE-BLOCK-START
x0 = 0
x1 = 0
x2 = 0
# EVOLVE-BLOCK-END

if __name__ == "__main__":
    print([x0, x1, x2])
