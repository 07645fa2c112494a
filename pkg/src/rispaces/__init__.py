"""Computations in rearrangement-invariant function and sequence spaces.

Functions live on (0,1), (0,∞) or ℕ as finitely many analytic pieces; the
space engines compute norms, distances to the order-continuous ideal and the
ℓ∞-copy criteria built on top of them.
"""

from .cesaro import bound_probe, c_at_zero, cesaro_apply, cx_norm
from .errors import RispacesError
from .expr import Expr, Term
from .generators import OrliczFn, QuasiConcaveFn, delta2_probe, eval_F, eval_phi, phi_derivative, phi_limits
from .ideal import (CheckReport, DistResult, WitnessFamily, am_property_probe, build_witness, cesaro_copy_check,
                    discrete_oc_membership, dist_oc, hudzik_check, is_order_continuous, modular_domination_check,
                    trivial_ideal_copy_check, verify_witness)
from .measurable import Domain, PeriodicTail, Piece, PiecewiseFn, SeqFn, distribution, tail_head
from .profiles import bracket, complement_window, rearrange, window
from .scalars import INF, Approx
from .spaces import (Cesaro, CalderonLozanovskii, EvalResult, Intersection, Linf, Lorentz, Lp, Marcinkiewicz,
                     SumLpLinf, embed_norm_to_Linf, fundamental, norm, oc_ideal_class, satisfies_d_infinity)

__version__ = "0.1.0"


def orlicz(F, domain=Domain.HALFLINE):
    """The Orlicz space L_F = X_F over L_1."""
    return CalderonLozanovskii(Lp(1, domain), F)


def convexification(X, p):
    """X^(p), the p-convexification of X."""
    return CalderonLozanovskii(X, OrliczFn.power(p))
