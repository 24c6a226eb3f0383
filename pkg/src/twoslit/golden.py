"""Frozen reference data for the verification suite.

An integer camera-pair whose epipolar tensor, recovered normal-form
matrices, and self-calibration figures are known exactly or to two
decimals. The verify command and the acceptance tests check the
library against these values; nothing else should import this module
for computation.
"""

import numpy as np

# Two two-slit cameras with integer entries. The A pair has parallel
# finite slits, the B pair is a pushbroom.
REFERENCE_A1 = np.array([[-1.0, 7.0, 4.0, 0.0], [8.0, -1.0, 13.0, 4.0]])
REFERENCE_A2 = np.array([[11.0, 6.0, -2.0, 4.0], [8.0, -1.0, 13.0, -5.0]])
REFERENCE_B1 = np.array([[14.0, 9.0, -3.0, 8.0], [0.0, 0.0, 0.0, 1.0]])
REFERENCE_B2 = np.array([[-3.0, 8.0, 10.0, 3.0], [6.0, 13.0, 5.0, 13.0]])

# Their epipolar tensor: 16 integers, lexicographic in (i, j, k, l).
# The first two vanish because the second rows of A1, A2, B1 are
# linearly dependent.
REFERENCE_TENSOR = np.array([
    [[[0.0, 0.0], [21816.0, -25650.0]],
     [[1906.0, -2090.0], [-3642.0, 5510.0]]],
    [[[880.0, 475.0], [18600.0, -11875.0]],
     [[97.0, -380.0], [-1259.0, 1425.0]]],
])

# The two gauge-fixed second-row matrices recoverable from the tensor,
# published to two decimals. CONFIG_B is the one projectively
# equivalent to the reference cameras; the two matrices are each
# other's transpose conjugates.
REFERENCE_CONFIG_A = np.array([
    [-3.87, 1.0, 1.0, 1.0],
    [-14.22, 8.33, -6.67, -22.17],
    [0.44, -0.28, 0.27, 1.14],
    [-0.86, 0.26, 0.15, 0.88],
])
REFERENCE_CONFIG_B = np.array([
    [-3.87, 1.0, 1.0, 1.0],
    [-14.22, 8.33, 9.25, 4.24],
    [0.44, 0.20, 0.27, -0.07],
    [-0.86, -1.34, -2.26, 0.88],
])

# Self-calibration reference: a ground-truth frame-scrambling matrix Q,
# the normalized rank-3 dual quadric it induces (two decimals), and the
# magnifications of the first camera used in the reference run.
REFERENCE_Q = np.array([
    [1.49, 0.60, -0.11, -1.15],
    [-1.43, 0.88, -0.93, 1.52],
    [-0.38, -0.21, 1.83, -0.55],
    [0.83, -0.95, -0.63, 0.93],
])
REFERENCE_DAQ = np.array([
    [1.0, -0.58, -0.34, 0.28],
    [-0.58, 1.42, -0.52, -0.55],
    [-0.34, -0.52, 1.36, -0.49],
    [0.28, -0.55, -0.49, 0.77],
])
REFERENCE_MAGNIFICATIONS = (4.04, 1.37)
