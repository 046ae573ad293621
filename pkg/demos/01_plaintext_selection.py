"""
Consistency beats information ranking
=====================================

A warm-up entirely in plaintext: rank features by mutual information with
the class, then compare against what backward elimination keeps. The point
of the example is that the two highest-scoring features cannot actually
predict the class, while two zero-scoring ones can.
"""

import numpy as np

from ocwc import Dataset, cwc_select, is_consistent, mutual_information

# Eight rows, five binary features. The class is f4 XOR f5, so those two
# columns determine it exactly; f1 and f2 merely correlate with it.
features = np.array(
    [
        [1, 0, 1, 1, 1],
        [1, 1, 0, 0, 0],
        [0, 0, 0, 1, 1],
        [1, 0, 1, 0, 0],
        [1, 1, 1, 1, 0],
        [0, 1, 0, 1, 0],
        [0, 1, 0, 0, 1],
        [0, 0, 0, 0, 1],
    ],
    dtype=np.uint8,
)
classes = features[:, 3] ^ features[:, 4]
ds = Dataset(("f1", "f2", "f3", "f4", "f5"), "C", features, classes)

print("mutual information with the class:")
for j in range(1, ds.k + 1):
    print(f"  f{j}: {mutual_information(ds, j):.3f}")

# An information-style filter would pick f1 and f2 first. But equal rows on
# (f1, f2) carry different classes, so that pair cannot be the answer:
print()
print("is (f1, f2) consistent?", is_consistent(ds, (1, 1, 0, 0, 0)))
print("is (f4, f5) consistent?", is_consistent(ds, (0, 0, 0, 1, 1)))

# Backward elimination tries to drop each feature in turn (highest id
# first) and keeps it only when the rest would become inconsistent.
result = cwc_select(ds)
kept = [f"f{i + 1}" for i in result.selected_indices]
print()
print("backward elimination keeps:", " ".join(kept))
print("input consistent:", result.input_consistent)
