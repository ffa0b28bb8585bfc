"""Order-n count-based language model with stupid backoff.

Scores are normalized per context so that they sum to one over the
prediction vocabulary.  The raw stupid-backoff score of a token w after a
context c (trimmed to the last n-1 keys) is

    S(w | c) = count(c.w) / count(c)      if count(c.w) > 0
             = lambda * S(w | c[1:])      otherwise (0.4 by default)

bottoming out in an add-one-floored unigram distribution that also carries
the mass of the reserved <unk> key.  score_next divides by the exact
normalizer Z(c) = sum_v S(v | c), computed recursively from the stored
continuation sets rather than by scanning the vocabulary.

Model files are a versioned binary container; see ``save`` for the layout.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

START = "<s>"
END = "</s>"
UNK = "<unk>"

MAGIC = b"SCLM"
FORMAT_VERSION = 1


class EmptyCorpus(Exception):
    pass


class FormatVersionMismatch(Exception):
    pass


@dataclass
class NGramModel:
    n: int
    lam: float
    counts: dict[tuple[str, ...], int]

    # derived, rebuilt after construction/load
    vocab: tuple[str, ...] = field(default_factory=tuple, compare=False)
    _cont: dict = field(default_factory=dict, compare=False, repr=False)
    _uni: dict = field(default_factory=dict, compare=False, repr=False)
    _uni_denom: float = field(default=0.0, compare=False, repr=False)
    _z_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self._rebuild()

    def _rebuild(self) -> None:
        uni_counts: dict[str, int] = {}
        cont: dict[tuple[str, ...], dict[str, int]] = {}
        for gram, c in self.counts.items():
            if len(gram) == 1:
                uni_counts[gram[0]] = c
            ctx = gram[:-1]
            if ctx:
                cont.setdefault(ctx, {})[gram[-1]] = c
        # Prediction vocabulary: every unigram key except the start marker,
        # plus the reserved <unk> and </s> keys.
        keys = set(uni_counts) | {UNK, END}
        keys.discard(START)
        self.vocab = tuple(sorted(keys))
        self._uni = {k: uni_counts.get(k, 0) for k in self.vocab}
        self._uni_denom = float(sum(self._uni.values()) + len(self.vocab))
        self._cont = cont
        self._z_cache = {}

    def __eq__(self, other) -> bool:
        return (isinstance(other, NGramModel) and self.n == other.n
                and self.lam == other.lam and self.counts == other.counts)

    # -- scoring --

    def _map_key(self, key: str) -> str:
        return key if key in self._uni or key == START else UNK

    def _trim(self, context) -> tuple[str, ...]:
        ctx = tuple(self._map_key(k) for k in context)
        if len(ctx) < self.n - 1:
            ctx = (START,) * (self.n - 1 - len(ctx)) + ctx
        return ctx[len(ctx) - (self.n - 1):] if self.n > 1 else ()

    def _unigram(self, key: str) -> float:
        return (self._uni.get(key, 0) + 1) / self._uni_denom

    def _raw(self, key: str, ctx: tuple[str, ...]) -> float:
        while ctx:
            seen = self._cont.get(ctx)
            if seen is not None:
                c = seen.get(key, 0)
                if c > 0:
                    return c / self.counts[ctx]
            key_score = None
            ctx = ctx[1:]
            if key_score is None:
                # back off one level, discounting by lambda
                return self.lam * self._raw(key, ctx)
        return self._unigram(key)

    def _z(self, ctx: tuple[str, ...]) -> float:
        if not ctx:
            return 1.0
        z = self._z_cache.get(ctx)
        if z is not None:
            return z
        seen = self._cont.get(ctx)
        shorter = ctx[1:]
        if not seen:
            z = self.lam * self._z(shorter)
        else:
            total = self.counts[ctx]
            covered = sum(seen.values()) / total
            rest = self._z(shorter) - sum(self._raw(v, shorter) for v in seen)
            z = covered + self.lam * rest
        self._z_cache[ctx] = z
        return z

    def score_next(self, context, token: str) -> float:
        """Normalized probability of ``token`` following ``context``."""
        ctx = self._trim(context)
        key = self._map_key(token)
        if key == START:
            key = UNK
        return self._raw(key, ctx) / self._z(ctx)

    def score_candidates(self, context, tokens) -> dict[str, float]:
        """score_next for many candidate tokens sharing one context."""
        ctx = self._trim(context)
        z = self._z(ctx)
        out = {}
        for tok in tokens:
            key = self._map_key(tok)
            if key == START:
                key = UNK
            out[tok] = self._raw(key, ctx) / z
        return out

    def score_sequence(self, sequence) -> float:
        """Log-likelihood of a sequence under start padding.

        No end-marker term is added, so extending a sequence can never
        increase the log-likelihood.
        """
        return self.score_continuation((), sequence)

    def score_continuation(self, context, continuation) -> float:
        """Sum of log score_next over the continuation positions only."""
        history = list(context)
        total = 0.0
        for tok in continuation:
            total += math.log(self.score_next(history, tok))
            history.append(tok)
        return total

    # -- persistence --

    def save(self, path) -> None:
        """Write the versioned binary container.

        Layout (little endian):
          magic "SCLM" | u32 version | u32 n | f64 lambda |
          u32 vocab size | vocab entries (u32 byte length + utf-8 bytes,
          sorted) | u64 record count | records (u8 k, k * u32 key ids,
          u64 count) sorted by (k, ids).
        """
        keys = sorted({k for gram in self.counts for k in gram})
        key_id = {k: i for i, k in enumerate(keys)}
        records = sorted(
            (len(gram), tuple(key_id[k] for k in gram), c)
            for gram, c in self.counts.items())
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<II", FORMAT_VERSION, self.n))
            fh.write(struct.pack("<d", self.lam))
            fh.write(struct.pack("<I", len(keys)))
            for k in keys:
                data = k.encode("utf-8")
                fh.write(struct.pack("<I", len(data)))
                fh.write(data)
            fh.write(struct.pack("<Q", len(records)))
            for k, ids, c in records:
                fh.write(struct.pack("<B", k))
                fh.write(struct.pack(f"<{k}I", *ids))
                fh.write(struct.pack("<Q", c))


def load(path) -> NGramModel:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise FormatVersionMismatch("bad magic bytes")
    pos = 4
    version, n = struct.unpack_from("<II", data, pos)
    pos += 8
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch(f"unsupported version {version}")
    (lam,) = struct.unpack_from("<d", data, pos)
    pos += 8
    (nkeys,) = struct.unpack_from("<I", data, pos)
    pos += 4
    keys = []
    for _ in range(nkeys):
        (klen,) = struct.unpack_from("<I", data, pos)
        pos += 4
        keys.append(data[pos:pos + klen].decode("utf-8"))
        pos += klen
    (nrec,) = struct.unpack_from("<Q", data, pos)
    pos += 8
    counts: dict[tuple[str, ...], int] = {}
    try:
        for _ in range(nrec):
            (k,) = struct.unpack_from("<B", data, pos)
            pos += 1
            ids = struct.unpack_from(f"<{k}I", data, pos)
            pos += 4 * k
            (c,) = struct.unpack_from("<Q", data, pos)
            pos += 8
            counts[tuple(keys[i] for i in ids)] = c
    except (struct.error, IndexError) as e:
        raise FormatVersionMismatch(f"truncated or corrupt model file: {e}")
    return NGramModel(n=n, lam=lam, counts=counts)


def train(sequences, n: int, lam: float = 0.4) -> NGramModel:
    """Count all k-grams (k <= n) of each sequence padded with n-1 start
    markers and one end marker.  Deterministic regardless of input order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    seqs = [list(s) for s in sequences]
    if not seqs:
        raise EmptyCorpus("no training sequences")
    counts: dict[tuple[str, ...], int] = {}
    pad = [START] * (n - 1)
    for seq in seqs:
        padded = pad + seq + [END]
        ln = len(padded)
        for i in range(ln):
            for k in range(1, n + 1):
                if i + k > ln:
                    break
                gram = tuple(padded[i:i + k])
                counts[gram] = counts.get(gram, 0) + 1
    return NGramModel(n=n, lam=lam, counts=counts)
