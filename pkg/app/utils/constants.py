# backend/app/utils/constants.py
# Enums, numerical defaults and reference values

from enum import Enum


class MeshFamily(str, Enum):
    """Supported Lagrange mesh families."""

    LAGUERRE = "laguerre"
    GENERALIZED_LAGUERRE = "generalized_laguerre"


class ThresholdKind(str, Enum):
    """Functional forms of the energy just below the continuum."""

    SWAVE_3D = "swave_3d"
    NONZERO_L_3D = "nonzero_l_3d"
    TWOD_GROUND = "twod_ground"
    TWOD_LOG = "twod_log"
    TWOD_LINEAR = "twod_linear"


class SpinChannel(str, Enum):
    TRIPLET = "triplet"
    SINGLET = "singlet"


class DeuteronMethod(str, Enum):
    LMM = "lmm"
    ANSATZ = "ansatz"
    THRESHOLD_FORMULA = "threshold_formula"


class Command(str, Enum):
    SOLVE = "solve"
    CRITICAL = "critical"
    THRESHOLD_FIT = "threshold-fit"
    ANSATZ = "ansatz"
    DEUTERON = "deuteron"
    QDOT = "qdot"
    REPRODUCE = "reproduce"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class TableId(str, Enum):
    TABLE1 = "table1"
    TABLE2 = "table2"
    TABLE3 = "table3"
    TABLE4 = "table4"
    TABLE5 = "table5"
    FIGURE1 = "figure1"


ARTIFACT_VERSION = "1.0.0"

# Mesh construction
MAX_MESH_SIZE = 4000
MAX_NEWTON_ITERATIONS = 10
NEWTON_TOLERANCE = 1e-10
ROOT_DISTINCTNESS = 1e-12
RECURRENCE_RESCALE_LIMIT = 1e150
NORMALIZATION_TOLERANCE = 1e-10
VARIANCE_CLAMP = 1e-12

# Spectrum
DEFAULT_MESH_SIZE = 300
DEFAULT_SCALING = 1.0
GENERALIZED_ALPHA = 1.0
# n = k + shift * ell, k the radial index counted from 1; mirrors the (n, l) labels of the tables
PRINCIPAL_LABEL_SHIFT = {2: 1, 3: 1}

# Critical parameters
CRITICAL_MESH_SIZE = 1000
CRITICAL_TOLERANCE_S = 1e-6
CRITICAL_TOLERANCE_L = 1e-8
CRITICAL_BRACKET_START = 1.0
CRITICAL_BRACKET_MAX = 1e4
H_GRID_RATIO = 1.5
H_GRID_POINTS = 8
H_GRID_MIN_POINTS = 6
EXTRAPOLATION_MESH_SIZES = (500, 700, 1000)
CAP_JUMP_LIMIT = 1e-3
CAP_TREND_FACTOR = 4.0
FIT_RESIDUAL_LIMIT = 1e-4
TAU_RANGE = (0.5, 2.0)
TAU_BOUNDS = (0.2, 5.0)
MAX_SIGNIFICANT_DIGITS = 12

# Threshold expansions
THRESHOLD_WINDOW = (1e-3, 0.15)
THRESHOLD_WINDOW_2D_GROUND = (0.5, 3.0)
THRESHOLD_SAMPLES = 30
# higher powers fitted alongside the reported ones so they do not leak into them
THRESHOLD_EXTRA_TERMS = 2
THRESHOLD_MESH_SIZE = 2000
THRESHOLD_SCALING_S = 4.0
THRESHOLD_SCALING_L = 1.0
THRESHOLD_CONDITION_LIMIT = 1e12
HELLMANN_FEYNMAN_OFFSET = 1e-6

# Variational Ansatz
ANSATZ_START = (1.0, 0.1, 0.5)
ANSATZ_START_SPREAD = 0.75
DEFAULT_RESTARTS = 8
DEFAULT_SEED = 20240117
DEFAULT_QUADRATURE_ORDER = 200
QUADRATURE_SPLIT = 6.0
DECAY_HINT_MESH_SIZE = 150
DECAY_FALLBACK = 0.05
OVERLAP_CONDITION_LIMIT = 1e12
CONFIG_DISTINCTNESS = 1e-6
OBJECTIVE_PENALTY = 1e10
NELDER_MEAD_XATOL = 1e-9
NELDER_MEAD_FATOL = 1e-13
NELDER_MEAD_MAXITER = 6000

# Deuteron
HBAR2_OVER_MU = 82.9  # MeV fm^2
DEUTERON_ARGUMENT_SCALE = 2.0  # trial written in Lambda * r12 = 2 * dimensionless r
DEUTERON_MESH_SIZE = 1000
DEUTERON_PARAMETER_TOLERANCE = 0.05

# Quantum dot
QDOT_RADIAL_ORDER = 80
QDOT_ANGULAR_ORDER = 40
QDOT_DENSITY_CUTOFF = 50.0
QDOT_START = (1.0, 1.0, 0.25, 0.1, 0.3)
QDOT_START_SPREAD = 0.3
QDOT_RESTARTS = 4
QDOT_STABILITY_LIMIT = 1e-4
TRIANGLE_TOLERANCE = 1e-12

# Critical depth of the 3D ground state, used as the binding threshold
V0_CRITICAL_3D_GROUND = 1.342002

# Energies, <r> and sigma_r; (d, n, ell, v0, energy, mean_r, sigma_r, h, mesh size, boldface decimals)
# 2D l > 0 states converge slowly on the Laguerre mesh and the loosest 3D state needs N >= 1000
TABLE1_ROWS = [
    (3, 1, 0, 100.0, -79.738800, 0.314, 0.135, 1.0, 300, 6),
    (3, 1, 0, 50.0, -35.958446, 0.381, 0.165, 1.0, 300, 5),
    (3, 1, 0, 10.0, -4.280602, 0.637, 0.291, 1.0, 300, 4),
    (3, 1, 0, 5.0, -1.271701, 0.858, 0.423, 1.0, 300, 4),
    (3, 1, 0, 2.0, -0.075432, 1.950, 1.335, 1.0, 300, 3),
    (3, 1, 0, 1.4, -0.000726, 13.834, 13.128, 4.0, 300, 3),
    (3, 2, 0, 100.0, -55.388745, 0.506, 0.233, 1.0, 300, 4),
    (3, 2, 0, 50.0, -19.987486, 0.641, 0.292, 1.0, 300, 4),
    (3, 2, 0, 15.0, -1.214669, 1.192, 0.537, 1.0, 300, 4),
    (3, 2, 0, 12.5, -0.506521, 1.451, 0.681, 1.0, 300, 3),
    (3, 2, 0, 10.0, -0.061198, 2.525, 1.520, 1.0, 300, 2),
    (3, 2, 0, 9.0, -0.000608, 15.527, 14.344, 4.0, 1000, 1),
    (3, 2, 1, 100.0, -66.896220, 0.428, 0.142, 1.0, 300, 5),
    (3, 2, 1, 50.0, -27.282428, 0.526, 0.178, 1.0, 300, 5),
    (3, 2, 1, 10.0, -1.282861, 0.997, 0.398, 1.0, 300, 4),
    (3, 2, 1, 7.5, -0.361014, 1.258, 0.588, 1.0, 300, 3),
    (3, 2, 1, 6.5, -0.089254, 1.602, 0.945, 1.0, 300, 2),
    (3, 2, 1, 6.1, -0.008031, 2.357, 2.164, 1.0, 300, 1),
    (2, 1, 0, 100.0, -86.362354, 0.244, 0.129, 1.0, 300, 6),
    (2, 1, 0, 10.0, -6.042272, 0.476, 0.261, 1.0, 300, 5),
    (2, 1, 0, 1.0, -0.115386, 1.581, 1.137, 1.0, 300, 3),
    (2, 2, 0, 100.0, -61.196987, 0.456, 0.222, 1.0, 300, 6),
    (2, 2, 0, 10.0, -0.635548, 1.318, 0.640, 1.0, 300, 4),
    (2, 2, 0, 7.0, -0.041781, 2.903, 1.873, 1.0, 300, 2),
    (2, 2, 1, 100.0, -73.249069, 0.374, 0.139, 1.0, 2000, 4),
    (2, 2, 1, 10.0, -2.684722, 0.801, 0.330, 1.0, 2000, 3),
    (2, 2, 1, 5.0, -0.391199, 1.230, 0.618, 1.0, 2000, 1),
]
TABLE1_ENERGY_TOLERANCE = 1.5e-6
TABLE1_MOMENT_TOLERANCE = 1e-3

# Critical depths; (d, n, ell) -> (value, tolerance)
TABLE2_NONZERO_L = {
    (3, 2, 1): (6.049655, 1e-6),
    (3, 3, 1): (17.544889, 1e-6),
    (3, 4, 1): (35.241429, 1e-6),
    (3, 3, 2): (13.450538800, 1e-6),
    (3, 4, 2): (28.837886068, 1e-6),
    (3, 4, 3): (23.553939852, 1e-6),
    (2, 2, 1): (3.35962, 1e-5),
    (2, 3, 1): (12.89453, 1e-5),
    (2, 3, 2): (9.41285, 1e-5),
}
# Printed (3, 4, 3) depth with two digits swapped (939852 for 930852); gated on the corrected value
TABLE2_CORRECTED = {
    (3, 4, 3): 23.553930852,
}
TABLE2_SWAVE = {
    (3, 1, 0): (1.342002, 1e-3),
    (3, 2, 0): (8.897850, 1e-3),
    (3, 3, 0): (22.786740, 1e-3),
    (3, 4, 0): (42.981700, 1e-3),
    (2, 2, 0): (5.660, 1e-2),
    (2, 3, 0): (17.71, 1e-1),
}

# Threshold coefficients; (d, n, ell) -> (c2, c3, c4) and Hellmann-Feynman slopes
TABLE3_SWAVE = {
    (3, 1, 0): (-0.2212, 0.0966, -0.0682),
    (3, 2, 0): (-0.0593, 0.0101, -0.0002),
    (3, 3, 0): (-0.0285, 0.0029, -0.0006),
    (3, 4, 0): (-0.0171, 0.0013, -0.0003),
}
TABLE3_NONZERO_L = {
    (3, 2, 1): (-0.1422, -0.0734, -0.0081),
    (3, 3, 1): (-0.0794, -0.0408, -0.0048),
    (3, 3, 2): (-0.0548, -0.0274, -0.0027),
    (3, 4, 1): (-0.2438, -0.0103, -0.0093),
    (3, 4, 2): (-0.1644, -0.0033, -0.0089),
    (3, 4, 3): (-0.2846, -0.0010, -0.0058),
}
TABLE3_HELLMANN_FEYNMAN = {
    (3, 2, 1): -0.1423,
    (3, 3, 1): -0.0795,
    (3, 3, 2): -0.0549,
    (3, 4, 1): -0.2442,
    (3, 4, 2): -0.1646,
    (3, 4, 3): -0.2847,
}
# Printed labels of the 2D block do not follow one convention; reported, never gated
TABLE3_TWOD = {
    (2, 1, 0): {"eta_1": -4.4e-4, "eta_2": 0.2995},
    (2, 2, 1): {"eta_1": 0.2712},
    (2, 3, 2): {"eta_1": -0.2091},
}
TABLE3_TOLERANCE = 1e-3

# Deuteron parameter sets and energies (MeV)
DEUTERON_MODELS = {
    4.0: {"c1": -487.5, "c2": -17.5},
    6.0: {"c1": -1064.0, "c2": -26.0},
}
TABLE4_ENERGIES = {
    4.0: {"K1": -2.1639, "K2": -2.2238, "K3": -2.2242, "LMM": -2.2242, "formula": -2.2300},
    6.0: {"K1": -2.1064, "K2": -2.2232, "K3": -2.2244, "LMM": -2.2244, "formula": -2.2263},
}
TABLE4_PARAMETERS = {
    (4.0, 1): [(1.5031, 0.0349, 0.7284)],
    (4.0, 2): [(0.9614, 0.0521, 0.5832), (8.3627, 0.8846, 1.0675)],
    (4.0, 3): [(0.9519, 0.0535, 0.5784), (8.1823, 0.9016, 1.0127), (60.0845, 0.1164, 0.8402)],
    (6.0, 1): [(1.3954, 0.0214, 0.7006)],
    (6.0, 2): [(0.8851, 0.0354, 0.5622), (5.4551, 1.1227, 0.1445)],
    (6.0, 3): [(0.8303, 0.0376, 0.5993), (6.3339, 1.2810, 0.1832), (21.2916, 0.0141, 1.4484)],
}
# Converged mesh energies of the printed couplings with hbar^2/mu = 82.9 MeV fm^2; no single
# hbar^2/mu brings both cutoffs onto the printed LMM column
DEUTERON_LMM_ENERGIES = {4.0: -2.2294961, 6.0: -2.2214083}
TABLE4_LMM_TOLERANCE = 1e-4
TABLE4_ANSATZ_TOLERANCE = 5e-4
TABLE4_FORMULA_TOLERANCE = 0.02

# Two-electron dot; (lambda, V0, E_T, E_T reference, <1/r12>)
TABLE5_ROWS = [
    (0.05, 10.0, -16.380161, -16.389353, 0.152650),
    (0.05, 8.0, -12.740711, -12.750555, 0.143053),
    (0.05, 6.0, -9.155680, -9.164120, 0.131107),
    (0.1, 10.0, -15.110462, -15.110283, 0.252596),
    (0.1, 8.0, -11.611217, -11.612391, 0.237427),
    (0.1, 6.0, -8.186968, -8.186970, 0.215436),
    (0.2, 10.0, -13.406999, -13.397977, 0.415227),
    (0.2, 8.0, -10.108105, -10.098433, 0.384509),
    (0.2, 6.0, -6.909523, -6.899916, 0.348081),
    (0.5, 10.0, -10.3079923, -10.290023, 0.781601),
    (0.5, 8.0, -7.402543, -7.385087, 0.719914),
]
TABLE5_ENERGY_SLACK = 0.005
TABLE5_INV_R12_TOLERANCE = 0.01

FIGURE1_MESH_SIZES = (500, 700, 1000)
FIGURE1_ASYMPTOTE_TOLERANCE = 1e-3
FIGURE1_MONOTONE_NOISE = 1e-5
