"""Verification engine for one-sided and generalized Drazin inverses.

Dense matrix side: computation of the Drazin inverse through the core/nil
splitting, independent pseudoinverse oracles, one-sided axiom checkers,
idempotent round trips, power lifts, and kernel/range chain analysis with
exact integer cross checks.

Operator side: banded operators on a one-sided sequence space with lazy
exact columns, shift bundles witnessing strictly one-sided invertibility,
truncated Neumann inverses with certified budgets, quasi-polar round trips,
and windowed two-term resolvents whose remainder bounds are decidable in
exact arithmetic.

The cli-runner (`drazin-lab run ...`) packages everything into
seed-deterministic check suites with machine-readable reports.
"""

from .chains import (ChainReport, PerturbReport, analytic_core, bf_index,
                     chain_report, decomposition_index_equality,
                     index_stability, kato_decomposition, perturb_expand,
                     quasinilpotent_part)
from .corpus import GeneratedMatrix, generate_corpus, generate_matrix, write_corpus
from .drazin import (AxiomResiduals, DrazinResult, adjoint_duality,
                     bc_witness, check_group, check_left_drazin,
                     check_right_drazin, core_nil_split, drazin_index,
                     drazin_inverse, drazin_pinv_oracle, group_lift,
                     inverse_from_idempotent, matrix_equation_equivalence,
                     merge_two_sided, nilpotency_order, power_lift,
                     residual_nilpotency, spectra_scan,
                     spectral_idempotent_left)
from .errors import (BandwidthCapError, CheckFailure, PreconditionError,
                     ResolventDomainError, SpectralSplitError)
from .exactnum import QComplex
from .linalg import (SubspaceBasis, intersect, load_matrix_text, null_basis,
                     pinv, range_basis, rank, save_matrix_text, subspace_sum)
from .operators import (BandedOp, ComposeOp, DirectSum, Identity, Scaled,
                        Shift, SumOp, WeightRule, ZeroOp, left_shift,
                        op_from_spec, qnil_certificate, right_shift,
                        verify_on_basis)
from .suites import RunConfig, format_report, run_suite
from .witnesses import (ShiftBundle, commutant_invariance,
                        derive_left_inverse, left_resolvent,
                        neumann_inverse, one_sided_bundle,
                        operator_adjoint_duality, quasipolar_left_witness,
                        resolvent_ring_points, uniqueness_window,
                        vanishing_row_witness, window_axiom_report)

__version__ = "0.1.0"
