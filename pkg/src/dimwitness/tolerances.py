"""Numerical tolerances used across the package.

Every tolerance-based comparison in the library and in the test suite should
reference one of these constants rather than a bare literal, so that the
accuracy contract of each routine is stated in exactly one place.
"""

# linear algebra kernel
MAX_DIM = 25                    # largest square matrix the kernel accepts
DET_COFACTOR_MAX_DIM = 4        # cofactor expansion up to here, elimination above
DET_RTOL = 1e-12                # relative determinant accuracy, well-conditioned inputs
ADJUGATE_IDENTITY_TOL = 1e-10   # max entry of m @ adj(m) - det(m) * I
EIG_RESIDUAL_RTOL = 1e-8        # ||m v - lam v|| <= rtol * ||m|| per eigenpair
CONJUGATE_PAIR_TOL = 1e-10      # spectrum of a real matrix closes under conjugation
SPECTRUM_TIE_TOL = 1e-10        # moduli closer than this sort by phase

# operator and channel invariants
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10                 # min eigenvalue >= -PSD_TOL
TRACE_TOL = 1e-10
MEASUREMENT_SPECTRUM_TOL = 1e-10  # spectrum of M within [-tol, 1 + tol]
KRAUS_NORM_TOL = 1e-9           # || sum_j K_j K_j^dag - 1 ||_max
UNITARY_TOL = 1e-10
STOCHASTIC_TOL = 1e-12
UNIT_EIGENVALUE_TOL = 1e-9      # superoperator spectrum must contain 1
PROB_CLAMP_TOL = 1e-9           # probabilities may stray this far outside [0, 1]
MODE_IMAG_TOL = 1e-10           # reconstructed mode sums must be real to here

# witnesses
WITNESS_NULL_TOL = 1e-12        # ideal-unitary nulls
DET_EQUALITY_TOL = 1e-11        # witness_W vs witness_W_tilde
RANK_BOUND_TOL = 1e-9           # |det W_N| for N at/above the rank bound
RANK_BOUND_TOL_QUTRIT = 1e-8    # looser for the 9x9 qutrit case
UNITARY_NULL_TOL = 1e-10        # F1 = F2 = 0 for unitary qubit channels
GRAD_FD_RTOL = 1e-6             # analytic vs central finite differences
FD_STEP = 1e-6                  # central-difference step for gradient checks
HESSIAN_FD_STEP = 1e-4          # step for the finite-difference Hessian fallback
REEVAL_TOL = 1e-12              # reported witness value vs re-evaluation

# statistics
CLOSED_FORM_TOL = 1e-10         # closed-form variance vs generic delta method
MC_VARIANCE_RTOL = 0.05         # Monte Carlo variance vs delta prediction
MC_SHIFT_SIGMAS = 3.0           # Monte Carlo bias vs delta shift, in MC standard errors

# maxima
PGRAD_NORM_TOL = 1e-10          # projected-gradient stopping criterion
ARMIJO_C = 1e-4
BACKTRACK_START = 0.5
BACKTRACK_FACTOR = 0.5
TABLE_MAXIMA_TOL_SMALL = 1e-6   # N <= 6
TABLE_MAXIMA_TOL_LARGE = 1e-4   # N = 7..9

# harness
EPS_SCALING_RTOL = 0.05         # F1/eps and F2/eps^2 constancy across a sweep
DRIFT_SLOPE_SIGMAS = 5.0        # slope significance for drift detection
SIGNIFICANCE_FLAG = 5.0         # |(F - dF)/sigma| above this is flagged in reports
