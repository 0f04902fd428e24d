"""Constants shared across the discovery, benchmark and runner packages."""

# Graph document schema
SCHEMA_VERSION: str = "1"
SURROGATE_NAME: str = "C"

# Edge marks
MARK_DIRECTED: str = "directed"
MARK_UNDIRECTED: str = "undirected"

# Significance and search defaults
DEFAULT_ALPHA: float = 0.05
DEFAULT_TAU_MAX: int = 2
DEFAULT_MAX_CONDSET: int = 3
DEFAULT_SEED: int = 0
DEFAULT_WORKERS: int = 1

# Per-phase error control on the final edge decisions
CORRECTION_NONE: str = "none"
CORRECTION_BONFERRONI: str = "bonferroni"
CORRECTIONS: tuple = (CORRECTION_NONE, CORRECTION_BONFERRONI)
DEFAULT_CORRECTION: str = CORRECTION_BONFERRONI

# Test kinds
TEST_PARCORR: str = "pcorr"
TEST_KCI: str = "kci"
TEST_KINDS: tuple = (TEST_PARCORR, TEST_KCI)

# KCI defaults
BANDWIDTH_MEDIAN: str = "median"
NULL_GAMMA: str = "gamma"
NULL_PERMUTATION: str = "permutation"
DEFAULT_RIDGE_EPSILON: float = 1e-3
DEFAULT_PERMUTATIONS: int = 500
MIN_PERMUTATIONS: int = 100
DEFAULT_SURROGATE_BANDWIDTH_STEPS: float = 20.0
MEDIAN_SUBSAMPLE_ROWS: int = 500
KCI_MIN_SAMPLES: int = 20

# Extended-HSIC dependence defaults
DEFAULT_HSIC_RIDGE: float = 0.01
DEFAULT_HSIC_MAX_SAMPLES: int = 300
DEFAULT_HSIC_REFERENCE_POINTS: int = 25
HSIC_TIE_TOLERANCE: float = 1e-9

# Orientation rules
RULE_TIME_ORDER: str = "TimeOrder"
RULE_SURROGATE_OUT: str = "SurrogateOut"
RULE_TRIPLE_COLLIDER: str = "TripleCollider"
RULE_TRIPLE_CHAIN: str = "TripleChain"
RULE_HSIC_DIRECTION: str = "HsicDirection"
RULE_UNORIENTED: str = "Unoriented"

# Pipeline phases
PHASE_LAGGED: str = "lagged"
PHASE_PARTIAL_GRAPH: str = "partial_graph"
PHASE_SKELETON: str = "skeleton"
PHASE_ORIENT: str = "orient"
PHASES: tuple = (PHASE_LAGGED, PHASE_PARTIAL_GRAPH, PHASE_SKELETON, PHASE_ORIENT)

# Synthetic benchmark
SYNTH_VAR_COUNTS: tuple = (4, 6, 8)
SYNTH_LAGS: tuple = (2, 4, 6, 8)
DEFAULT_SYNTH_T: int = 1000
DEFAULT_NOISE_STD: float = 1.0
DEFAULT_BURN_IN: int = 200
MIN_SYNTH_T: int = 100

# Evaluation modes
EVAL_MODE_WINDOW: str = "window"
EVAL_MODE_CONTEMPORANEOUS: str = "contemporaneous"
EVAL_MODES: tuple = (EVAL_MODE_WINDOW, EVAL_MODE_CONTEMPORANEOUS)

# Edge classification labels
EDGE_TP: str = "TP"
EDGE_SPURIOUS: str = "spurious"
EDGE_MISSING: str = "missing"
EDGE_REVERSED: str = "reversed"
EDGE_UNORIENTED: str = "unoriented"
EDGE_MISORIENTED: str = "misoriented"

# Output file names (runner out-dir)
FILE_DATA: str = "data.csv"
FILE_TRUTH_JSON: str = "truth.json"
FILE_TRUTH_DOT: str = "truth.dot"
FILE_GRAPH_JSON: str = "graph.json"
FILE_GRAPH_DOT: str = "graph.dot"
FILE_SUMMARY_DOT: str = "summary.dot"
FILE_TEST_LOG: str = "tests.tsv"
FILE_METRICS_TSV: str = "metrics.tsv"
FILE_METRICS_JSON: str = "metrics.json"
