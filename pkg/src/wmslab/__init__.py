"""Certification lab for iterative LDPC decoding.

Weighted min-sum and attenuated max-product decoding with contraction-based
convergence analysis, LP/ML optimality certificates, density-evolution
thresholds, and Monte Carlo experiment campaigns.
"""

from importlib import resources

from . import certify, channel, de, msgpass, opt, sim, tanner

__version__ = "0.1.0"


def load_benchmark_code():
    """The bundled 9x12 (3,4)-regular benchmark code."""
    text = resources.files("wmslab").joinpath("data/benchmark12.alist").read_text()
    return tanner.parse_alist(text)
