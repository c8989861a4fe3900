"""Principal curvature spectra of sigma-action orbits and their path-space lifts."""

from .automorphism import AutomorphismModel, automorphism, eigen_angles, fixed_algebra, verify_ad_tau_split
from .exact import Angle, SigmaPFError, UndecidableError
from .lie import LieAlgebraModel, ad_operator, bracket, exp_map, inner, product_model, simple_model
from .orbit import OrbitSpec, numeric_shape_oracle, shape_spectrum, split_tangent_normal
from .pf import austere_check_pf, consistency_check, pf_spectrum_general, pf_spectrum_sigma
from .roots import decompose, find_maximal_abelian, frame_from_basis

__version__ = "0.1.0"
