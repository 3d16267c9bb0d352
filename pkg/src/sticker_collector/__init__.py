"""How many packets does it take to fill a sticker album, and what does it cost?

Three independent routes to the same answers:

* :mod:`~sticker_collector.exact` -- inclusion-exclusion in exact rationals
  and big floats,
* :mod:`~sticker_collector.dp` -- an absorbing Markov chain on the number of
  stickers owned,
* :mod:`~sticker_collector.simulate` -- seeded Monte Carlo with a compiled
  kernel and a pure-Python fallback.
"""
from .album import PAPER_ALBUM, AlbumSpec, PacketModel
from .dp import expectation_dp, quantile_dp, survival_dp, transition_distribution
from .exact import (
    BigFloatConfig,
    PrecisionError,
    all_distinct_packet_probability,
    expected_packets_exact,
    expected_packets_rational,
    expected_stickers_approx,
    expected_stickers_exact,
    harmonic_number,
    miss_probability,
    pmf_exact,
    sticker_survival_iid,
    survival_exact,
    survival_sweep,
)
from .reporting import PAPER_KS, cdf_curve, completion_table, cost_of, histogram_bins
from .simulate import KERNEL, SimulationConfig, simulate_batch, simulate_one, trace_collection

__version__ = "0.1.0"
