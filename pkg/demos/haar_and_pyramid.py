"""
Horizontal Haar detail and the image pyramid
============================================

The Haar detail band keeps horizontal edges (brows, eyelids, lips) and
drops vertical ones. The pyramid halves the image until a side would go
below ``min_dim``.
"""

import numpy as np

from eyemouth import build_pyramid, haar_horizontal

# horizontal stripes: every row differs from the next
rows = np.array([[0.0 if y % 2 == 0 else 255.0] * 6 for y in range(6)])
print(haar_horizontal(rows))

# vertical stripes: rows are identical, so the band is all zeros
cols = np.array([[0.0 if x % 2 == 0 else 255.0 for x in range(6)] for _ in range(6)])
print("vertical stripes max |d|:", np.abs(haar_horizontal(cols)).max())

###############################################################################
# A 512x768 image gives five levels at min_dim=20

pyr = build_pyramid(np.random.default_rng(1).uniform(0, 255, size=(768, 512)), 20)
for level, im in enumerate(pyr):
    print(level, im.shape[1], "x", im.shape[0], "mean %.2f" % im.mean())
