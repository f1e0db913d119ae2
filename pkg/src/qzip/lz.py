"""LZ78 parsing and coding of binary sequences.

Bit sequences are numpy ``uint8`` arrays of 0/1; strings such as ``"0110"``
are accepted wherever a sequence is expected. The wire format is described
in ``docs/lz-format.md``:

* pair ``t`` (1-based) is ``ceil(log2 t)`` index bits, MSB first, followed by
  the extension bit;
* after the last pair comes the end-of-stream reference: ``ceil(log2 t)``
  bits naming the dictionary phrase equal to the unfinished tail (0 = none),
  where ``t`` is the number the next pair would have had.

A decoder recognises the end-of-stream reference because exactly that many
bits remain, so the format needs no length header.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .source import sample_with_uniforms, symbols_to_bits

MAX_PERMUTATION_BITS = 20


class LZDecodeError(ValueError):
    """Bitstring is not a valid LZ78 codeword."""


def as_bits(seq) -> np.ndarray:
    """Coerce a '0'/'1' string or integer sequence to a uint8 bit array."""
    if isinstance(seq, str):
        arr = np.frombuffer(seq.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(seq)
        if arr.dtype == bool:
            arr = arr.astype(np.uint8)
    arr = np.ascontiguousarray(arr, dtype=np.uint8).ravel()
    if arr.size and arr.max() > 1:
        raise ValueError("sequence is not binary")
    return arr


def bits_to_str(bits) -> str:
    return (np.asarray(bits, dtype=np.uint8) + ord("0")).tobytes().decode("ascii")


# --- kernels ---------------------------------------------------------------


@numba.njit(cache=True)
def _bit_length(x):
    n = 0
    while x > 0:
        x >>= 1
        n += 1
    return n


@numba.njit(cache=True)
def _parse(bits):
    n = bits.shape[0]
    child = np.full((n + 1, 2), -1, np.int64)
    prefix = np.empty(n, np.int64)
    symbol = np.empty(n, np.uint8)
    nodes = 1
    cur = 0
    for i in range(n):
        b = bits[i]
        nxt = child[cur, b]
        if nxt >= 0:
            cur = nxt
        else:
            child[cur, b] = nodes
            prefix[nodes - 1] = cur
            symbol[nodes - 1] = b
            nodes += 1
            cur = 0
    return prefix[: nodes - 1].copy(), symbol[: nodes - 1].copy(), cur


@numba.njit(cache=True)
def _count_pairs(bits):
    n = bits.shape[0]
    child = np.full((n + 1, 2), -1, np.int64)
    nodes = 1
    cur = 0
    for i in range(n):
        b = bits[i]
        nxt = child[cur, b]
        if nxt >= 0:
            cur = nxt
        else:
            child[cur, b] = nodes
            nodes += 1
            cur = 0
    return nodes - 1


@numba.njit(cache=True)
def _encoded_length(npairs):
    total = 0
    for t in range(1, npairs + 1):
        total += _bit_length(t - 1) + 1
    return total + _bit_length(npairs)


@numba.njit(cache=True)
def _pack(prefix, symbol, tail):
    c = prefix.shape[0]
    out = np.empty(_encoded_length(c), np.uint8)
    pos = 0
    for t in range(1, c + 2):
        w = _bit_length(t - 1)
        value = prefix[t - 1] if t <= c else tail
        for j in range(w - 1, -1, -1):
            out[pos] = (value >> j) & 1
            pos += 1
        if t <= c:
            out[pos] = symbol[t - 1]
            pos += 1
    return out


@numba.njit(cache=True)
def _unpack(bits):
    """Returns (prefix, symbol, tail, status); status 0 ok, 1 truncated, 2 bad index."""
    n = bits.shape[0]
    prefix = np.empty(n + 1, np.int64)
    symbol = np.empty(n + 1, np.uint8)
    pos = 0
    t = 1
    while True:
        w = _bit_length(t - 1)
        remaining = n - pos
        if remaining < w:
            return prefix[:0].copy(), symbol[:0].copy(), 0, 1
        value = 0
        for j in range(w):
            value = (value << 1) | bits[pos + j]
        pos += w
        if value > t - 1:
            return prefix[:0].copy(), symbol[:0].copy(), 0, 2
        if remaining == w:
            return prefix[: t - 1].copy(), symbol[: t - 1].copy(), value, 0
        prefix[t - 1] = value
        symbol[t - 1] = bits[pos]
        pos += 1
        t += 1


@numba.njit(cache=True)
def _expand(prefix, symbol, tail):
    c = prefix.shape[0]
    length = np.zeros(c + 1, np.int64)
    for t in range(1, c + 1):
        length[t] = length[prefix[t - 1]] + 1
    total = length[1:].sum() + length[tail]
    out = np.empty(total, np.uint8)
    pos = 0
    for t in range(1, c + 2):
        node = t if t <= c else tail
        ln = length[node]
        k = pos + ln - 1
        while node != 0:
            out[k] = symbol[node - 1]
            node = prefix[node - 1]
            k -= 1
        pos += ln
    return out


# --- public API ------------------------------------------------------------


@dataclass(frozen=True)
class ParseOutput:
    """LZ78 parse: pair t is (index of an earlier phrase, extension bit).

    `tail` is the index of the phrase equal to the unfinished last phrase,
    0 when the input ends exactly on a phrase boundary.
    """

    prefixes: np.ndarray
    symbols: np.ndarray
    tail: int

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.prefixes.tolist(), self.symbols.tolist()))

    def __len__(self) -> int:
        return int(self.prefixes.shape[0])

    def phrase(self, index: int) -> str:
        out = []
        while index:
            out.append(str(int(self.symbols[index - 1])))
            index = int(self.prefixes[index - 1])
        return "".join(reversed(out))

    @property
    def phrases(self) -> list[str]:
        return [self.phrase(t) for t in range(1, len(self) + 1)]

    @property
    def tail_phrase(self) -> str:
        return self.phrase(self.tail)

    def reconstruct(self) -> np.ndarray:
        return _expand(self.prefixes, self.symbols, np.int64(self.tail))


def lz_parse(seq) -> ParseOutput:
    """Incremental LZ78 parse of a binary sequence."""
    prefixes, symbols, tail = _parse(as_bits(seq))
    return ParseOutput(prefixes, symbols, int(tail))


def encoded_length(parse_or_pairs) -> int:
    """Length in bits of the codeword for a parse (or for a pair count)."""
    c = len(parse_or_pairs) if isinstance(parse_or_pairs, ParseOutput) else int(parse_or_pairs)
    return int(_encoded_length(c))


def lz_encode(seq) -> np.ndarray:
    p = lz_parse(seq)
    return _pack(p.prefixes, p.symbols, np.int64(p.tail))


def lz_decode(bits) -> np.ndarray:
    bits = as_bits(bits)
    prefixes, symbols, tail, status = _unpack(bits)
    if status == 1:
        raise LZDecodeError("codeword ends inside a reference")
    if status == 2:
        raise LZDecodeError("reference to a phrase that does not exist yet")
    return _expand(prefixes, symbols, np.int64(tail))


def codeword_length(seq) -> int:
    """|lz_encode(seq)| without materialising the codeword."""
    return int(_encoded_length(_count_pairs(as_bits(seq))))


@dataclass(frozen=True)
class CondensedBlock:
    """Condensed n-bit block: data region followed by blank (zero) bits.

    The data region is the codeword plus a terminating 1, so its end is the
    last 1 of the block. A block whose codeword does not fit is kept raw.
    """

    data_bits: np.ndarray
    n: int
    raw: bool = False

    @property
    def blank_count(self) -> int:
        return self.n - int(self.data_bits.shape[0])

    def to_bits(self) -> np.ndarray:
        out = np.zeros(self.n, np.uint8)
        out[: self.data_bits.shape[0]] = self.data_bits
        return out


def condense(block) -> CondensedBlock:
    block = as_bits(block)
    n = block.shape[0]
    code = lz_encode(block)
    if code.shape[0] + 1 > n:
        return CondensedBlock(block.copy(), n, raw=True)
    return CondensedBlock(np.append(code, np.uint8(1)), n)


def data_length(block_len: int, code_len: int) -> int:
    """Size of the data region of a condensed block, given its codeword length."""
    return code_len + 1 if code_len + 1 <= block_len else block_len


def expand_retained(retained, raw: bool = False) -> np.ndarray:
    """Decode the retained prefix of a condensed block.

    Trailing blanks and the terminating 1 are stripped before LZ decoding.
    """
    retained = as_bits(retained)
    if raw:
        return retained.copy()
    ones = np.flatnonzero(retained)
    if ones.size == 0:
        raise LZDecodeError("no terminator in retained bits")
    return lz_decode(retained[: ones[-1]])


# --- permutation model of the reversible condenser -------------------------


def _rank_to_output(rank: np.ndarray, n: int) -> np.ndarray:
    """r-th n-bit string ordered by (position of last 1, lexicographic)."""
    rank = np.asarray(rank, dtype=np.int64)
    m = np.frexp(rank.astype(float))[1].astype(np.int64)  # bit length, exact below 2**53
    nz = rank > 0
    out = np.zeros_like(rank)
    head = rank[nz] - (np.int64(1) << (m[nz] - 1))
    out[nz] = (head << (n - m[nz] + 1)) | (np.int64(1) << (n - m[nz]))
    return out


@numba.njit(cache=True)
def _all_codewords(n):
    size = 1 << n
    code_len = np.empty(size, np.int64)
    code_val = np.empty(size, np.int64)
    row = np.empty(n, np.uint8)
    for i in range(size):
        for j in range(n):
            row[j] = (i >> (n - 1 - j)) & 1
        prefix, symbol, tail = _parse(row)
        code = _pack(prefix, symbol, tail)
        v = 0
        for b in code:
            v = (v << 1) | b
        code_len[i] = code.shape[0]
        code_val[i] = v
    return code_len, code_val


def permutation_order(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inputs sorted by (codeword length, codeword, input), with codeword data.

    Returns (order, code_len, code_value) where code_len/code_value are
    indexed by input.
    """
    if n < 1 or n > MAX_PERMUTATION_BITS:
        raise ValueError(f"n must be in 1..{MAX_PERMUTATION_BITS}, got {n}")
    inputs = np.arange(1 << n, dtype=np.int64)
    code_len, code_val = _all_codewords(n)
    order = np.lexsort((inputs, code_val, code_len))
    return order, code_len, code_val


def as_permutation(n: int) -> np.ndarray:
    """Bijection on n-bit strings (as MSB-first integers) modelling the condenser.

    Inputs are ranked by (codeword length, codeword, input); the input of
    rank r goes to the r-th string in (position of last 1, lexicographic)
    order. An input with codeword length l therefore lands on an output with
    at least n - l - 1 trailing zeros.
    """
    order, _, _ = permutation_order(n)
    table = np.empty(1 << n, np.int64)
    table[order] = _rank_to_output(np.arange(1 << n, dtype=np.int64), n)
    return table


def inverse_permutation(table) -> np.ndarray:
    table = np.asarray(table, dtype=np.int64)
    inv = np.empty_like(table)
    inv[table] = np.arange(table.shape[0], dtype=np.int64)
    return inv


def trailing_zeros(value: int, n: int) -> int:
    if value == 0:
        return n
    return (int(value) & -int(value)).bit_length() - 1


# --- empirical rates -------------------------------------------------------


@dataclass(frozen=True)
class RateStats:
    n: int
    trials: int
    mean_rate: float
    stderr: float


def _block_bits(mu, n: int, rng: np.random.Generator) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    symbols = sample_with_uniforms(mu, rng.random(n))
    return symbols_to_bits(symbols, mu.shape[0])


def rate_samples(mu, n: int, trials: int, seed) -> np.ndarray:
    """Per-trial |lz_encode(block)| / n for i.i.d. blocks of n symbols from `mu`."""
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be positive")
    children = np.random.SeedSequence(seed).spawn(trials)
    out = np.empty(trials)
    for i, ss in enumerate(children):
        out[i] = codeword_length(_block_bits(mu, n, np.random.default_rng(ss))) / n
    return out


def rate_statistics(mu, n: int, trials: int, seed) -> RateStats:
    r = rate_samples(mu, n, trials, seed)
    stderr = float(r.std(ddof=1) / np.sqrt(trials)) if trials > 1 else float("nan")
    return RateStats(n, trials, float(r.mean()), stderr)


def empirical_rate(mu, n: int, trials: int, seed) -> float:
    """Mean LZ78 codeword bits per source symbol."""
    return float(rate_samples(mu, n, trials, seed).mean())
