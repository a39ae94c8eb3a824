"""seqtrial: design and interim monitoring for two-arm binary-endpoint trials.

Subpackages cover direction-aware exact inference (:mod:`seqtrial.stats`),
fixed and re-estimated sample sizes (:mod:`seqtrial.design`), conditional-
power stopping boundaries (:mod:`seqtrial.boundaries`), blinded interim
analysis (:mod:`seqtrial.monitor`), Monte Carlo operating characteristics
(:mod:`seqtrial.simulate`), and expected-sample-size-optimal group
sequential designs (:mod:`seqtrial.optimize`).
"""

from seqtrial._backend import backend_name
from seqtrial.stats import (
    Direction,
    TestResult,
    TwoByTwoTable,
    fisher_exact_test,
    fisher_one_sided_p,
    hypergeom_pmf,
    max_significance_one_sided_p,
    normal_cdf,
    normal_quantile,
    two_prop_z_test,
)

__version__ = "0.1.0"

__all__ = [
    "Direction",
    "TestResult",
    "TwoByTwoTable",
    "backend_name",
    "fisher_exact_test",
    "fisher_one_sided_p",
    "hypergeom_pmf",
    "max_significance_one_sided_p",
    "normal_cdf",
    "normal_quantile",
    "two_prop_z_test",
    "__version__",
]
