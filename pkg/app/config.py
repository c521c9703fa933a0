"""Configuration constants and defaults for the Z-group toolkit"""

# Exact real sign determination
DEFAULT_MAX_BITS = 4096
START_BITS = 64

# Independence spot-check of declared base reals
INDEPENDENCE_CHECK_BITS = 128
RELATION_SEARCH_HEIGHT = 100
RELATION_SEARCH_STEPS = 2000

# Quantifier elimination
DEFAULT_NODE_CAP = 10**6
DNF_SPLIT_LIMIT = 64

# Sampling
DEFAULT_SEED = 0
DEFAULT_SAMPLES = 100
DEFAULT_TRIALS = 200
SAMPLE_COEFF_BOUND = 6
LAURENT_SAMPLE_WINDOW = 2

# Automorphism verification
RESIDUE_CHECK_MODULUS = 30
NEAR_ZERO_CONVERGENTS = 12

# Rigidity decision
ADVERSARIAL_CANDIDATES = 1000
ADVERSARIAL_HEIGHT = 10
LAURENT_GAMMA_MAX_POWER = 4
GAMMA_SEARCH_HEIGHT = 10

# Random formulas for QE soundness runs
FORMULA_GUARD = 4
FORMULA_GRID = 50
FORMULA_COUNT = 200
# outermost quantifier over all of Z, free variables on a smaller grid
UNBOUNDED_FORMULA_COUNT = 40
UNBOUNDED_FREE = ("x", "w")
UNBOUNDED_GRID = 6

# CLI exit codes
EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE = 2

# Streamlit explorer
UI_HOST = "localhost"
UI_PORT = "8502"
PLOT_HEIGHT = 600
PLOT_WIDTH = 1000
RESIDUE_PLOT_MAX_MODULUS = 30

# Span structures shown in the explorer
SPAN_STRUCTURES = {
    'finite': 'Finite span (listed base reals)',
    'laurent-pi': 'Laurent polynomials in pi plus 1/(pi - 1)'
}
