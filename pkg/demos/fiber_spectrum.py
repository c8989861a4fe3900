"""Principal curvatures of the fiber of the parallel transport map over SU(3).

With sigma = id and w = 0 the orbit collapses to the identity, so only
lattice families <alpha, xi> / (2 n pi) survive.
"""

import numpy as np

from sigmapf.exact import parse_scalar
from sigmapf.orbit import OrbitSpec, split_tangent_normal
from sigmapf.pf import pf_spectrum_sigma
from sigmapf.report import emit_spectrum_table
from sigmapf.roots import decompose
from sigmapf.scenario import build_frame, bundled_scenario

sc = bundled_scenario("su3_fiber")
data = decompose(sc.sigma, build_frame(sc, np.random.default_rng(0)))
split = split_tangent_normal(OrbitSpec(data, sc.w))
print(f"orbit dimension {split.dim}, normal dimension {split.codim}")

for xi in (("1", "0"), ("2", "1")):
    spec = pf_spectrum_sigma(split, tuple(parse_scalar(c) for c in xi))
    print(f"\nxi = {xi}:  lattice families {[(str(f.numer), f.mult) for f in spec.lattice]}")
    print(emit_spectrum_table(spec, 2), end="")
