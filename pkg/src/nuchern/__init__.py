"""Exact algebra for nu-projective superspaces, their nu-class and supermatrix Chern forms."""
from .atlas import (ONE_NU, ChartAtlas, ChartLabel, TransitionMap, body_transition_check, build_atlas,
                    compose, entry_M, entry_M_prime, line_cocycle, transition, verify_gluing,
                    verify_line_cocycle)
from .charclass import (SyntheticCocycle, ber_multiplicativity, ber_series, curvature_suite,
                        exp_str_log, gauge_checks, matrix_connection, matrix_curvature, newton_check,
                        str_powers, synth_cocycle, three_sum, verify_bianchi)
from .coefficient import Coefficient
from .errors import *  # noqa: F401,F403
from .forms import (Form, PartitionFamily, TruncationPolicy, dlog, exterior_d, make_partition,
                    pullback, wedge)
from .grassmann import GrassmannElement, invert, nu_apply, substitute
from .nuclass import (BranchAssignment, KernelElement, LogPreimage, branch_log_L,
                      chern_connection_forms, delta_eta, e_prime, e_prime_exact, scan_delta_eta,
                      verify_global_2form)
from .numeric import NumericGrassmann, Window, eval_numeric, exp_log_numeric, numeric_nu
from .report import CheckRecord, VerificationReport
from .sexpr import (format_element, format_form, format_label, format_matrix, parse_element,
                    parse_form, parse_label, parse_matrix)
from .supermatrix import SuperMatrix, berezinian, berezinian_a, sm_inverse, supertrace
from .symbols import Kind, Registry, SymbolId

__version__ = "0.1.0"
