# Forest
N_TREES = 500
MAX_DEPTH = 7
MIN_NODE_SIZE = 5
MTRY = 'auto'
SEED = 42
GAIN_VARIANT = 'per_node_normalized'
GAIN_VARIANTS = ['per_node_normalized', 'literal_eq1', 'shannon']
TASK_REGRESSION = 'regression'
TASK_CLASSIFICATION = 'classification'
N_JOBS = 1
TIE_TOLERANCE = 1e-12

# Distances
SYMMETRY_TOLERANCE = 1e-12
TRIANGLE_TOLERANCE = 1e-9
TRIANGLE_EXHAUSTIVE_MAX_N = 200
TRIANGLE_SAMPLES_PER_N2 = 10
SPD_GATE = 1e-10
EIGEN_CLIP = 1e-12
WEIGHTS_TOLERANCE = 1e-12

# Importance
PAIR_VARIANT = 'squared'

# Manifold
DIMS = 2
LAPLACIAN = 'symmetric'
DEGENERATE_GAP = 1e-9
TRTE_TREES = 200
TRTE_MAX_DEPTH = 5

# Population (desk scale)
N_FOUNDERS = 200
N_GENERATIONS = 50
FINAL_SIZE = 2000
N_LOCI = 385
RECOMB_RATE = 1e-8
MUTATION_RATE = 1e-8
FOUNDER_MAF_RANGE = (0.05, 0.5)
FOUNDER_LD_BLOCK = 10
FOUNDER_LD_STRENGTH = 0.8

# SNP sets
N_SELECTED_SNPS = 16
CAUSAL_MAF_WINDOW = (0.195, 0.205)
SPURIOUS_MAF_WINDOW = (0.22, 0.24)
WINDOW_WIDEN_STEP = 0.005

# Phenotypes
N_ROI = 400
N_COV_ROI = 100
N_DISEASE_ROI = 28
N_SPURIOUS_ROI = 56
BASE_MEAN = -0.38
BASE_SD = 2.27
BASE_CORRELATION = 0.3
N_REFERENCE_SUBJECTS = 154
MU_CN = -0.38
MU_AD = 0.57
SIGMA = 0.90
PENETRANCE = 0.2
PENETRANCE_LEVELS = [0.05, 0.2, 0.35, 0.5]
DELTA = 1.5
GAMMA = 0.3
ZETA_BRACKET = (0.0, 20.0)
ZETA_TOLERANCE = 0.01
COVARIANCE_NOISE = 1.0
COVARIANCE_CLIP = 1e-6

# Graphical lasso
SICE_RHO = 1.0
SICE_TOL = 1e-4
SICE_MAX_ITER = 100
SICE_EDGE_THRESHOLD = 1e-8

# Study / evaluation
STUDY_SIZE = 200
ITERATIONS = 8
ROC_GRID_POINTS = 101
FUSION_WEIGHTS = (0.5, 0.5)
SPURIOUS_SCALE = 3.0
E5_DELTA = 0.75
