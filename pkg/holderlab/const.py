"""Constants for the operator Hölder laboratory."""

import math

# Tolerances of the linear algebra layer
HERMITIAN_TOL = 1e-12  # relative to the matrix norm
UNITARY_TOL = 1e-10  # times the dimension
REASSEMBLY_TOL = 1e-10  # relative to the matrix norm
FRAME_TOL = 1e-12  # times the dimension
CONFLUENT_TOL = 1e-12  # times max(1, |x|, |y|)

# Seminorm estimation
SEMINORM_GRID_STEP = 1e-4
SEMINORM_T_MIN = 2.0**-16
SEMINORM_T_MAX = 2.0**-1
SUP_NORM_SAMPLES = 2**14
CIRCLE_INTERVAL = (-math.pi, math.pi)

# Moduli of continuity
MODULUS_SLACK = 1e-9
OMEGA_STAR_ACCURACY = 1e-8

# Smooth cutoff of the windowed x*log|x| witness: 1 on [-1, 1], 0 outside [-2, 2]
WINDOW_INNER = 1.0
WINDOW_OUTER = 2.0

# Harness defaults
DEFAULT_DIMS = (8, 16, 32)
DEFAULT_TRIALS = 50
DEFAULT_SEED = 1
DEFAULT_SCALES = tuple(2.0**-k for k in range(4, 15))
FINEST_SCALE = 2.0**-14
DEFAULT_ADVERSARIAL_STEPS = 25
DEFAULT_SPECTRUM_RADIUS = 1.0
DEFAULT_SPECTRAL_GAP = 0.5
BERNSTEIN_SPECTRUM_RADIUS = 2.0**-5
DEFAULT_SIGMAS = (1.0, 2.0, 4.0, 8.0)
DEFAULT_DEGREES = (1, 2, 4, 8)
DEFAULT_RANKS = ("1", "half", "full")
MAX_RESAMPLE_ATTEMPTS = 5

SLOPE_TOL_FIRST_ORDER = 0.05
SLOPE_TOL_HIGHER_ORDER = 0.1
GROWTH_TOL = 1.25
SKIP_TOL = 0.05
DOI_TOL = 1e-9

# Adversarial search schedule
SEARCH_INITIAL_STEP = 0.5
SEARCH_COORDINATES_PER_SWEEP = 20
SEARCH_STREAM = 0x5EA2C4

# Perturbation spectra
SPECTRUM_SIGNED = "signed"
SPECTRUM_POSITIVE = "positive"
POSITIVE_SPECTRUM_FLOOR = 0.1
# norm of the perturbation off the planted vector, relative to the scale
PLANTED_COMPLEMENT_SHARE = 0.25

# Contraction modes
MODE_LITERAL = "literal"
MODE_INTERPOLATING = "interpolating"

# Settings of the modulus experiment
SETTING_UNITARY = "unitary"
SETTING_SELFADJOINT = "selfadjoint"

# Output formats
FORMAT_JSON = "json"
FORMAT_CSV = "csv"
FORMAT_BOTH = "both"
REPORT_JSON = "report.json"
REPORT_CSV = "report.csv"
REPORT_SCHEMA_VERSION = "1"
CSV_COLUMNS = (
    "experiment_id",
    "dim",
    "scale",
    "max_ratio",
    "mean_ratio",
    "q95_ratio",
    "lhs_max",
)

# Exit codes
EXIT_OK = 0
EXIT_VERDICT_FAILED = 1
EXIT_USAGE = 2

# Configuration keys
CONF_EXPERIMENTS = "experiments"
CONF_EXPERIMENT_ID = "experiment_id"
CONF_SEED = "seed"
CONF_TOLERANCES = "tolerances"

EXPERIMENT_PREFIX = "experiment_"
EXPERIMENT_IDS = {
    "selfadjoint_holder": "First differences of Hölder functions of self-adjoint matrices",
    "zygmund": "Symmetric second differences of Zygmund functions",
    "bernstein": "Bernstein-type bound for band-limited functions and trigonometric polynomials",
    "unitary_holder": "First differences of Hölder functions of unitary matrices",
    "unitary_lipschitz_log": "Zygmund functions of unitary matrices with the logarithmic factor",
    "unitary_higher": "Multiplicative higher differences of unitary matrices",
    "omega": "Arbitrary moduli of continuity through the omega-star transform",
    "contraction": "Higher differences of analytic functions of contractions",
    "selfadjoint_higher": "Higher-order differences of self-adjoint matrices",
    "schatten": "Schatten-class perturbations of Hölder functions",
    "schatten_higher": "Schatten-class perturbations of higher-order differences",
    "farforovskaya_compare": "Comparison with the logarithmic interval bound",
}
