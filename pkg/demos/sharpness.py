"""When the group is too small, projections do lose dimension.

The product of two Cantor measures of ratio 1/4 has dimension 1, and all
its rotation parts are trivial. Projecting onto a coordinate axis gives
back one Cantor factor, of dimension 1/2, well below min(1, dim) = 1.
A generic direction does not lose anything.
"""

import numpy as np

from ssproj.dimension import box_count_dimension
from ssproj.experiments import marginal_ifs, sharpness_ifs
from ssproj.grassmann import coordinate_plane, project, span_plane
from ssproj.ifs import sample_measure, similarity_dimension

ifs = sharpness_ifs()
cloud = sample_measure(ifs, 100_000, 1e-6, seed=0)
print(f"dim of the product: {similarity_dimension(ifs):.3f}")
print(f"dim of one factor:  {similarity_dimension(marginal_ifs(ifs, 0)):.3f}")

for label, plane in [
    ("x-axis", coordinate_plane(2, [0])),
    ("y-axis", coordinate_plane(2, [1])),
    ("direction (1, golden)", span_plane([[1.0, (np.sqrt(5) - 1) / 2]])),
]:
    e = box_count_dimension(project(plane, cloud))
    print(f"{label:22s} {e.value:.3f} +- {e.stderr:.3f}")
