"""
fuzztree - fuzzy fault tree analysis with alpha-cuts
"""
from .engines import (
    Bdd, EngineChoice, bdd_build, bdd_unreliability, bottom_up_crisp, bottom_up_fuzzy,
    compile_engine, select_engine,
)
from .errors import FuzzTreeError
from .ft_model import (
    FaultTree, FaultTreeBuilder, NodeKind, ProbabilisticFaultTree, cut_sets, is_tree_structured,
    structure_eval, unreliability_bruteforce, validate,
)
from .fuzzy_core import (
    AlphaFuzzy, DiscreteFuzzy, Interval, Trapezoidal, Triangular, TruncGaussian, discrete_zadeh,
    discretize, membership_at, zadeh_endpoint_map,
)
from .fuzzy_unreliability import (
    AnalysisResult, FuzzyProbVector, fuzzy_unreliability, fuzzy_unreliability_discrete,
)

__version__ = "1.0.0"
