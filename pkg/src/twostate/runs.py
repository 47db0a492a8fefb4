"""Run-length extraction and expected run counts.

A run is a maximal stretch of one state.  Persistence (p, q > 0.5) lengthens
runs, anti-persistence shortens them; the run-length histogram is where the
chain's memory is most directly visible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import MarkovParams, ParameterError, derive
from .simulate import BinarySequence, child_seed, generate

STATE_A = 1
STATE_B = 0


@dataclass(frozen=True)
class RunHistogram:
    """Counts of runs of one state, keyed by run length.

    Boundary runs (first and last) are counted at their observed length;
    no censoring correction is applied.
    """

    state: int
    counts: dict
    total_length: int

    def __post_init__(self):
        if self.state not in (STATE_A, STATE_B):
            raise ParameterError(f"state must be 0 or 1, got {self.state!r}")
        if self.total_length < 1:
            raise ParameterError("total_length must be positive")
        for m, c in self.counts.items():
            if m < 1 or c < 0:
                raise ParameterError(f"invalid histogram bin {m!r}: {c!r}")

    @property
    def n_runs(self) -> int:
        return sum(self.counts.values())

    @property
    def occupied_length(self) -> int:
        """Total number of positions covered by this state's runs."""
        return sum(m * c for m, c in self.counts.items())

    @property
    def mean_length(self) -> float:
        n = self.n_runs
        return self.occupied_length / n if n else float("nan")


def extract_runs(seq: BinarySequence) -> tuple[RunHistogram, RunHistogram]:
    """Histogram the maximal same-state stretches, state A first."""
    x = seq.states
    change = np.flatnonzero(x[1:] != x[:-1])
    starts = np.concatenate(([0], change + 1))
    ends = np.concatenate((change + 1, [x.size]))
    lengths = ends - starts
    values = x[starts]

    def hist(state):
        ls, cs = np.unique(lengths[values == state], return_counts=True)
        return RunHistogram(state, dict(zip(ls.tolist(), cs.tolist())), x.size)

    return hist(STATE_A), hist(STATE_B)


def _check_run_domain(n: int, m: int) -> None:
    if m < 1:
        raise ParameterError(f"run length must be >= 1, got {m!r}")
    if m > n - 2:
        raise ParameterError(f"run length {m} outside formula domain (needs m <= n-2 for n={n})")


def expected_runs_memoryfree(n: int, p_bar: float, m: int) -> float:
    """Expected number of runs of length m (both states) in a memory-free
    sequence of length n with state-A frequency p_bar:

        (n-m-1) * [p_bar^2 (1-p_bar)^m + (1-p_bar)^2 p_bar^m]
    """
    _check_run_domain(n, m)
    if not 0.0 < p_bar < 1.0:
        raise ParameterError(f"p_bar must lie strictly inside (0, 1), got {p_bar!r}")
    return (n - m - 1) * (
        p_bar**2 * (1.0 - p_bar) ** m + (1.0 - p_bar) ** 2 * p_bar**m
    )


def expected_runs_markov(params: MarkovParams, n: int, m: int, state: int) -> float:
    """Expected number of runs of one state with length exactly m.

    For state A: (n-m-1) * (1-pinf)(1-q) * p^(m-1) * (1-p) -- the stationary
    probability that a position opens an A-run of exactly m steps, times the
    number of interior positions.  State B swaps p with q and pinf with
    1-pinf.  Summed over both states at p = q = 0.5 this reduces to the
    memory-free expectation.
    """
    _check_run_domain(n, m)
    pinf = derive(params).pinf
    if state == STATE_A:
        enter, stay, other = 1.0 - params.q, params.p, 1.0 - pinf
    elif state == STATE_B:
        enter, stay, other = 1.0 - params.p, params.q, pinf
    else:
        raise ParameterError(f"state must be 0 or 1, got {state!r}")
    return (n - m - 1) * other * enter * stay ** (m - 1) * (1.0 - stay)


def average_and_normalize(histograms) -> dict:
    """Average raw counts bin-wise across histograms of one state, then
    normalize so the frequencies sum to 1.

    Zero-count bins are retained up to the largest observed run length, so
    curves from different parameter sets share a common support.
    """
    histograms = list(histograms)
    if not histograms:
        raise ParameterError("need at least one histogram")
    state = histograms[0].state
    if any(h.state != state for h in histograms):
        raise ParameterError("histograms must all describe the same state")
    max_m = max((max(h.counts) for h in histograms if h.counts), default=0)
    if max_m == 0:
        raise ParameterError("histograms contain no runs to normalize")
    avg = np.array(
        [sum(h.counts.get(m, 0) for h in histograms) / len(histograms) for m in range(1, max_m + 1)]
    )
    freq = avg / avg.sum()
    return {m: float(f) for m, f in zip(range(1, max_m + 1), freq)}


def expected_run_frequencies(params: MarkovParams, n: int, ms, state: int) -> np.ndarray:
    """Model run-length frequencies at the requested lengths, normalized
    over the full domain 1..n-2 (not just the requested bins)."""
    all_m = np.arange(1, n - 1, dtype=float)
    if state == STATE_A:
        stay = params.p
    elif state == STATE_B:
        stay = params.q
    else:
        raise ParameterError(f"state must be 0 or 1, got {state!r}")
    weights = (n - all_m - 1) * stay ** (all_m - 1)
    total = weights.sum()
    ms = np.asarray(ms, dtype=np.int64)
    if ms.size and (ms.min() < 1 or ms.max() > n - 2):
        raise ParameterError("requested run lengths outside formula domain")
    return weights[ms - 1] / total


def memoryfree_curve(n: int, p_bar: float, max_m: int) -> dict:
    """Normalized memory-free run-length curve over lengths 1..max_m."""
    _check_run_domain(n, max_m)
    all_m = np.arange(1, n - 1, dtype=float)
    counts = (n - all_m - 1) * (
        p_bar**2 * (1.0 - p_bar) ** all_m + (1.0 - p_bar) ** 2 * p_bar**all_m
    )
    freq = counts / counts.sum()
    return {m: float(freq[m - 1]) for m in range(1, max_m + 1)}


def simulate_run_curves(params: MarkovParams, n: int, n_seqs: int, seed: int) -> tuple[dict, dict]:
    """Averaged, normalized run curves for states A and B from n_seqs
    simulated sequences of length n (one sub-stream per sequence)."""
    if n_seqs < 1:
        raise ParameterError("need at least one sequence")
    hists_a, hists_b = [], []
    for i in range(n_seqs):
        ha, hb = extract_runs(generate(params, n, child_seed(seed, i)))
        hists_a.append(ha)
        hists_b.append(hb)
    return average_and_normalize(hists_a), average_and_normalize(hists_b)
