"""
Relative deviation on contingency tables
========================================

Who quotes whom, compared with what the margins alone would predict.
"""

import numpy as np

from crossbound.attraction import ContingencyTable, attraction_edges, relative_deviation

labels = ("U", "U-C", "A-D", "PL", "CP")

# Under independence every cell equals row_total * col_total / total,
# so the relative deviation vanishes everywhere.
independent = np.outer([12, 3, 8, 2, 5], [10, 2, 6, 4, 8])
rd = relative_deviation(ContingencyTable(labels, labels, independent))
print("max |RD| under independence:", np.nanmax(np.abs(rd.values)))

# Now plant a preference: champions quote the project leader far more often.
rng = np.random.default_rng(0)
counts = rng.poisson(independent / 4).astype(np.int64)
counts[1, 3] += 25
rd = relative_deviation(ContingencyTable(labels, labels, counts))
np.set_printoptions(precision=2, suppress=True)
print(counts)
print(rd.values)

# The weighted sum of RD is zero by construction.
print("sum expected*RD:", np.nansum(rd.expected * np.nan_to_num(rd.values)))

for e in attraction_edges(rd, threshold=0.5):
    print(f"{e.source} -> {e.target}: RD={e.weight:.2f} over {e.count} quotes")
