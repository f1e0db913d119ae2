"""Locating the data/blank boundary of a condensed block with smeared projections.

Positions are counted so that the projector at ``l`` (0 <= l <= n) checks
that qubits ``l+1 .. n`` (1-based) are all zero. A block with boundary
``k`` has its data in qubits ``1 .. k``. Smeared measurements are applied at
basepoints that are multiples of the step ``L``, from the largest one not
exceeding ``n - Y`` downwards, until one reports "not all zero".

Fidelity bookkeeping: a step whose outcome had probability ``p`` given the
current state contributes a factor ``p``; an erroneous positive projection
(one left of the boundary reporting all-zero) sets the fidelity of the run
to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class SmearConfig:
    """Cluster size Y, basepoint step L (default Y + 1) and block length n."""

    Y: int
    n: int
    L: int | None = None
    allow_small_step: bool = False

    def __post_init__(self):
        if self.L is None:
            object.__setattr__(self, "L", self.Y + 1)
        if self.Y < 1 or self.L < 1:
            raise ValueError("Y and L must be positive")
        if self.L <= self.Y and not self.allow_small_step:
            raise ValueError(f"step L={self.L} must exceed cluster size Y={self.Y}")
        if self.n < self.Y:
            raise ValueError(f"block length {self.n} shorter than cluster size {self.Y}")

    def basepoints(self) -> np.ndarray:
        """Basepoints in the order they are measured (descending)."""
        top = (self.n - self.Y) // self.L * self.L
        return np.arange(top, -1, -self.L)


def boundary_uncertainty(config: SmearConfig) -> int:
    """Width bound L + Y of the emitted interval."""
    return config.L + config.Y


@dataclass(frozen=True)
class IdealizedBlock:
    """k maximally mixed qubits followed by n - k zeros, realised as sampled bits."""

    n: int
    k: int
    sampled_bits: np.ndarray

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError(f"boundary {self.k} outside 0..{self.n}")
        bits = np.asarray(self.sampled_bits, dtype=np.uint8)
        if bits.shape != (self.n,) or np.any(bits[self.k:]):
            raise ValueError("sampled bits must have length n and vanish beyond k")
        object.__setattr__(self, "sampled_bits", bits)

    @classmethod
    def sample(cls, n: int, k: int, rng: np.random.Generator) -> "IdealizedBlock":
        bits = np.zeros(n, np.uint8)
        bits[:k] = rng.integers(0, 2, size=k, dtype=np.uint8)
        return cls(n, k, bits)

    @property
    def last_one(self) -> int:
        ones = np.flatnonzero(self.sampled_bits)
        return int(ones[-1]) + 1 if ones.size else 0


def projector_outcome(block: IdealizedBlock, l: int) -> tuple[int, IdealizedBlock, float]:
    """Apply the projector at `l`: outcome 1 iff qubits l+1..n are all zero.

    Returns (outcome, block after the measurement, fidelity factor). In the
    sampled realisation the post-measurement block equals the input block.
    """
    if not 0 <= l <= block.n:
        raise ValueError(f"projector position {l} outside 0..{block.n}")
    s = block.k - l
    outcome = int(block.last_one <= l)
    if s <= 0:
        return outcome, block, 1.0
    if outcome:
        return 1, block, 0.0
    return 0, block, 1.0 - 2.0**-s


def smeared_povm(block: IdealizedBlock, basepoint: int, config: SmearConfig,
                 rng: np.random.Generator) -> tuple[int, IdealizedBlock, float]:
    """Apply one projector chosen uniformly from the cluster at `basepoint`."""
    if basepoint < 0 or basepoint + config.Y - 1 > block.n:
        raise ValueError(f"cluster at {basepoint} does not fit in a block of {block.n}")
    m = basepoint + int(rng.integers(config.Y))
    return projector_outcome(block, m)


@dataclass(frozen=True)
class TruncationResult:
    interval: tuple[int, int]
    fidelity: float
    error_flag: bool
    povms_applied: int

    @property
    def retained(self) -> int:
        return self.interval[1]


def _interval(stop: int, config: SmearConfig, top: int) -> tuple[int, int]:
    # spans the cluster that answered 0 and the one measured just before it
    if stop >= top:
        return stop, config.n
    return stop, stop + config.L + config.Y - 1


def run_truncation(block: IdealizedBlock, config: SmearConfig, rng: np.random.Generator) -> TruncationResult:
    """Measure clusters in decreasing order until one answers 0."""
    if config.n != block.n:
        raise ValueError("config and block lengths differ")
    bases = config.basepoints()
    fidelity = 1.0
    error = False
    applied = 0
    stop = 0
    for base in bases:
        m = int(base) + int(rng.integers(config.Y))
        outcome, block, factor = projector_outcome(block, m)
        applied += 1
        fidelity *= factor
        if outcome and m < block.k:
            error = True
        if not outcome:
            stop = int(base)
            break
    if error:
        fidelity = 0.0
    return TruncationResult(_interval(stop, config, int(bases[0])), fidelity, error, applied)


# --- vectorised Monte Carlo ------------------------------------------------


@dataclass(frozen=True)
class BlockModel:
    """Distribution of the position of the last non-zero qubit.

    The data region ends at `k`. To the left, the probability that the last
    ``s`` data qubits are all zero is ``left_base**-s`` (2 for maximally
    mixed qubits). `right_base`, if given, adds stray data past ``k``: the
    last non-zero qubit lies at least ``s`` places right of ``k`` with
    probability ``right_base**-s``. ``left_base=inf`` is a definite
    boundary: the last non-zero qubit is exactly at `k`.
    """

    n: int
    k: int
    left_base: float = 2.0
    right_base: float | None = None

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError(f"boundary {self.k} outside 0..{self.n}")
        if self.left_base <= 1 or (self.right_base is not None and self.right_base <= 1):
            raise ValueError("decay bases must exceed 1")

    def pmf(self) -> np.ndarray:
        n, k, b = self.n, self.k, self.left_base
        left = np.zeros(n + 1)
        # terms below ~1e-330 underflow anyway
        j = np.arange(min(k, int(1100 / np.log2(b)) + 1))
        left[k - j] = (1 - 1 / b) * b ** (-j.astype(float))
        left[0] += b ** (-float(k))
        if self.right_base is None or n == k:
            return left
        r = self.right_base
        w = np.arange(1, n - k)
        w = w[: int(1100 / np.log2(r)) + 1]
        right = np.zeros(n + 1)
        right[k + w] = (1 - 1 / r) * r ** (-w.astype(float))
        right[n] = r ** (-float(n - k))  # stray data reaching the end of the block
        return (1 - 1 / r) * left + right

    def cdf(self) -> np.ndarray:
        c = np.cumsum(self.pmf())
        c[-1] = 1.0
        return np.minimum(c, 1.0)


@dataclass(frozen=True)
class TruncationSamples:
    """Per-trial outcomes of a batch of truncation runs."""

    k: int
    config: SmearConfig
    lo: np.ndarray
    hi: np.ndarray
    fidelity: np.ndarray
    error: np.ndarray
    povms: np.ndarray

    @property
    def trials(self) -> int:
        return int(self.lo.shape[0])

    def summary(self) -> "TruncationStats":
        t = self.trials
        ok = ~self.error
        covered = (self.lo[ok] <= self.k) & (self.k <= self.hi[ok])
        pe = float(self.error.mean())
        return TruncationStats(
            trials=t,
            mean_fidelity=float(self.fidelity.mean()),
            stderr_fidelity=float(self.fidelity.std(ddof=1) / np.sqrt(t)) if t > 1 else float("nan"),
            error_rate=pe,
            stderr_error=float(np.sqrt(pe * (1 - pe) / t)),
            coverage=float(covered.mean()) if covered.size else float("nan"),
            max_width=int((self.hi - self.lo).max()),
            mean_retained=float(self.hi.mean()),
        )


@dataclass(frozen=True)
class TruncationStats:
    trials: int
    mean_fidelity: float
    stderr_fidelity: float
    error_rate: float
    stderr_error: float
    coverage: float
    max_width: int
    mean_retained: float


def simulate_truncation(model: BlockModel, config: SmearConfig, trials: int, seed) -> TruncationSamples:
    """Run `trials` independent truncations of blocks drawn from `model`."""
    if model.n != config.n:
        raise ValueError("model and config lengths differ")
    rng = np.random.default_rng(seed)
    cdf = model.cdf()
    last = np.searchsorted(cdf, rng.random(trials), side="right")
    last = np.minimum(last, model.n)

    bases = config.basepoints()
    top = int(bases[0])
    support_max = int(np.flatnonzero(model.pmf() > 0).max())
    fid = np.ones(trials)
    err = np.zeros(trials, bool)
    upper = np.full(trials, model.n)
    stop = np.zeros(trials, np.int64)
    povms = np.zeros(trials, np.int64)
    active = np.arange(trials)

    # clusters at or above the last possible non-zero qubit pass with certainty, undisturbed
    certain = int(np.count_nonzero(bases >= support_max))
    povms += certain
    for base in bases[certain:]:
        if active.size == 0:
            break
        base = int(base)
        m = base + rng.integers(config.Y, size=active.size)
        passed = m >= last[active]
        c_m = cdf[m]
        c_u = cdf[upper[active]]
        fid[active] *= np.where(passed, c_m / c_u, (c_u - c_m) / c_u)
        err[active] |= passed & (m < model.k)
        upper[active] = np.where(passed, m, upper[active])
        povms[active] += 1
        stop[active[~passed]] = base
        active = active[passed]

    fid[err] = 0.0
    lo = stop
    hi = np.where(stop >= top, config.n, stop + config.L + config.Y - 1)
    return TruncationSamples(model.k, config, lo, hi, fid, err, povms)


def sampled_truncation(n: int, k: int, config: SmearConfig, trials: int, seed) -> TruncationSamples:
    """Batch of `run_truncation` calls on freshly sampled idealized blocks."""
    rng = np.random.default_rng(seed)
    cols = {"lo": [], "hi": [], "fidelity": [], "error": [], "povms": []}
    for _ in range(trials):
        res = run_truncation(IdealizedBlock.sample(n, k, rng), config, rng)
        cols["lo"].append(res.interval[0])
        cols["hi"].append(res.interval[1])
        cols["fidelity"].append(res.fidelity)
        cols["error"].append(res.error_flag)
        cols["povms"].append(res.povms_applied)
    return TruncationSamples(k, config, np.array(cols["lo"]), np.array(cols["hi"]),
                             np.array(cols["fidelity"]), np.array(cols["error"], bool),
                             np.array(cols["povms"]))


# --- exact diagonal density-matrix evolution -------------------------------

MAX_EXACT_QUBITS = 12


def _zero_tail_mask(n: int, m: int) -> np.ndarray:
    # basis index x has qubit 1 as its most significant bit
    x = np.arange(1 << n)
    return (x & ((1 << (n - m)) - 1)) == 0


def exact_truncation(n: int, k: int, config: SmearConfig) -> tuple[dict, float]:
    """Exact outcome law of the procedure on the density matrix of the idealized block.

    Every operator involved is diagonal in the computational basis, so the
    density matrix is carried as its diagonal. Returns
    ``({(stop_basepoint, error): probability}, expected fidelity)``; runs in
    which every cluster passes are keyed by basepoint 0.
    """
    if n > MAX_EXACT_QUBITS:
        raise ValueError(f"exact simulation limited to {MAX_EXACT_QUBITS} qubits")
    if config.n != n:
        raise ValueError("config and block lengths differ")
    rho = np.zeros(1 << n)
    rho[::1 << (n - k)] = 2.0**-k  # first k qubits uniform, rest |0>
    ok = rho.copy()
    bad = np.zeros_like(rho)
    law: dict = {}
    fidelity = 0.0
    bases = config.basepoints()
    for base in bases:
        base = int(base)
        new_ok = np.zeros_like(rho)
        new_bad = np.zeros_like(rho)
        weight = ok.sum()
        for m in range(base, base + config.Y):
            mask = _zero_tail_mask(n, m)
            p_ok_pass = ok * mask / config.Y
            p_ok_fail = ok * ~mask / config.Y
            if m >= k:
                new_ok += p_ok_pass
            else:
                new_bad += p_ok_pass
            new_bad += bad * mask / config.Y
            stop_ok = p_ok_fail.sum()
            stop_bad = (bad * ~mask).sum() / config.Y
            if stop_ok:
                law[(base, False)] = law.get((base, False), 0.0) + stop_ok
                # outcome probability conditional on this path, as the fidelity factor
                fidelity += stop_ok * (stop_ok * config.Y / weight)
            if stop_bad:
                law[(base, True)] = law.get((base, True), 0.0) + stop_bad
        ok, bad = new_ok, new_bad
    if ok.sum():
        law[(0, False)] = law.get((0, False), 0.0) + ok.sum()
        fidelity += ok.sum()
    if bad.sum():
        law[(0, True)] = law.get((0, True), 0.0) + bad.sum()
    return law, fidelity


def stop_law(samples: TruncationSamples) -> dict:
    """Empirical frequencies of (stop basepoint, error), keyed like `exact_truncation`."""
    keys, counts = np.unique(np.column_stack([samples.lo, samples.error.astype(int)]),
                             axis=0, return_counts=True)
    return {(int(a), bool(b)): c / samples.trials for (a, b), c in zip(keys, counts)}


# --- closed forms ----------------------------------------------------------


def _num(exact: bool, base):
    if exact:
        return Fraction(1), Fraction(base)
    return 1.0, float(base)


def analytic_fidelity(K: int, Y: int, L: int, base: float = 2, exact: bool = False):
    """Expected fidelity when the boundary sits K places above a basepoint.

    K >= Y: all projectors of the cluster lie left of the boundary.
    K < Y: the boundary falls inside the cluster; projectors at or right of
    it hand over to the cluster one step L lower.
    """
    if K < 0 or Y < 1:
        raise ValueError("need K >= 0 and Y >= 1")
    one, b = _num(exact, base)

    def cluster(offset):
        return sum((one - b ** -(offset - i)) ** 2 for i in range(Y)) / Y

    if K >= Y:
        return cluster(K)
    inside = sum((one - b**-s) ** 2 for s in range(1, K + 1)) / Y
    return inside + Fraction(Y - K, Y) * cluster(K + L) if exact else inside + (Y - K) / Y * cluster(K + L)


def analytic_error(K: int, Y: int, L: int, base: float = 2, exact: bool = False):
    """Probability of an erroneous positive projection, same two cases as the fidelity."""
    if K < 0 or Y < 1:
        raise ValueError("need K >= 0 and Y >= 1")
    one, b = _num(exact, base)

    def cluster(offset):
        return sum(b ** -(offset - i) for i in range(Y)) / Y

    if K >= Y:
        return cluster(K)
    inside = sum(b**-s for s in range(1, K + 1)) / Y
    return inside + Fraction(Y - K, Y) * cluster(K + L) if exact else inside + (Y - K) / Y * cluster(K + L)
