"""Scan w for the complex-conjugation action on SU(3) (restricted roots of type BC1).

For each w = q pi the finite orbit and its path-space lift are tested for
austerity.  Since sigma has order 2 an austere orbit always lifts to an
austere PF submanifold; the root system is not reduced, so the converse can
fail, and it does at w = pi/4 and 3pi/4.
"""

from fractions import Fraction

import numpy as np

from sigmapf.exact import Angle
from sigmapf.orbit import OrbitSpec, austere_check_finite, split_tangent_normal
from sigmapf.pf import austere_check_pf
from sigmapf.roots import decompose
from sigmapf.scenario import build_frame, bundled_scenario

sc = bundled_scenario("su3_conj")
data = decompose(sc.sigma, build_frame(sc, np.random.default_rng(0)))

print(f"{'w':>8}  {'dim':>3}  {'finite':>12}  {'path space':>12}")
for k in range(0, 13):
    w = Angle.pi(Fraction(k, 12))
    split = split_tangent_normal(OrbitSpec(data, (w,)))
    fin = austere_check_finite(split)["verdict"]
    pf = austere_check_pf(split)["verdict"]
    print(f"{str(w):>8}  {split.dim:>3}  {fin:>12}  {pf:>12}")
