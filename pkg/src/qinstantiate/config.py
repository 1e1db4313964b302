"""Default hyperparameters and size guards.

Defaults follow the evaluation settings of the sampled instantiation
algorithm. The guards keep every dense computation at desk scale.
"""

# Optimizer defaults
DIST_TOL = 1e-10
DIFF_TOL_R = 1e-3
PLATEAU_WINDOW = 5
BETA = 0.0
NUM_TRAINING_STATES = 2
OVERTRAIN_RATIO = 0.1
MIN_ITER = 6
MAX_ITER = 1_000_000
MULTISTARTS = 32
MULTISTART_BATCH = 8
SEED = 0

# Size guards (qubits)
MAX_DENSE_QUBITS = 14  # circuit_unitary, frobenius_cost, full backend
MAX_SAMPLED_QUBITS = 20  # sampled backend state tensors
MAX_SVD_DIM = 64  # gates up to 6 qubits
MAX_PARTITION_QUBITS = 12  # block unitary verification in resynth
RESYNTH_VERIFY_QUBITS = 10  # whole-circuit distance check after resynth

# Resynth per-partition instantiation budget
RESYNTH_MAX_ITER = 10_000

# Numeric tolerances
UNITARY_TOL = 1e-8  # accepted drift when validating gate unitaries
CONVERGED_FLOOR = 1e-14  # c_train below this counts as exactly converged
RENORMALIZE_EVERY = 64  # gate applications between state re-normalizations
