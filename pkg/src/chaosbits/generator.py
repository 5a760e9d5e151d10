"""Chaotic-iterations pseudo-random bit generator driven by the logistic map.

The generator iterates a Boolean vector of ``n_cells`` components.  At
each internal step exactly one component, selected by a strategy value
in ``[1, n_cells]``, is negated; all other components are left alone.
After m such steps (the return gap, drawn from a finite alphabet) the
whole vector is emitted as the next block of output bits, component 1
first.

Both the strategy values and the return gaps derive from one shared
logistic orbit y -> 4*y*(1-y), evaluated in IEEE-754 binary64 with
round-to-nearest.  Each gap decision consumes exactly one sample of the
orbit and each cell update consumes one further sample, in that order
within a block.  The driver state stored between calls is always the
next unconsumed sample, which pins down the consumption schedule: with
seed y^0, the first driven block takes its gap from y^0 and its m
strategy values from y^1 ... y^m, and the following block's gap comes
from y^(m+1).

Blocks can instead be driven by explicit gap/strategy transcripts
(`TranscriptDriver`), which makes short traces exactly reproducible
independent of the logistic driver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DegenerateSeedError",
    "TranscriptExhausted",
    "logistic_step",
    "strategy_from_y",
    "m_from_y",
    "chaotic_step",
    "seed_from_time",
    "SeedSpec",
    "GeneratorConfig",
    "GeneratorState",
    "LogisticDriver",
    "TranscriptDriver",
    "ChaoticBitGenerator",
    "generate_bits",
    "pack_bits",
    "bits_to_ascii",
    "parse_ascii_bits",
    "config_to_text",
    "config_from_text",
    "transcript_from_text",
]


class DegenerateSeedError(Exception):
    """The logistic driver was seeded on, or reached, a fixed point.

    A fixed point makes every further sample identical, so the output
    would degenerate into a constant stream; re-seed with a different
    value.
    """


class TranscriptExhausted(Exception):
    """A non-cycling forced transcript ran out of values."""


# Seeds that collapse onto a logistic fixed point within two steps.
_DEAD_SEEDS = (0.0, 0.25, 0.5, 0.75, 1.0)


def _check_y0(y0: float) -> float:
    y0 = float(y0)
    if not 0.0 < y0 < 1.0:
        raise DegenerateSeedError(
            f"y0={y0!r} lies outside the open interval (0,1); re-seed"
        )
    if y0 in _DEAD_SEEDS:
        raise DegenerateSeedError(
            f"y0={y0!r} collapses onto a logistic fixed point; re-seed"
        )
    return y0


def logistic_step(y: float) -> float:
    """One step of the logistic map, 4*y*(1-y), in binary64.

    The interval [0,1] is closed under the map, so no range error can
    occur on valid input.
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"logistic_step: y={y!r} outside [0,1]")
    return 4.0 * y * (1.0 - y)


def strategy_from_y(y: float, n_cells: int) -> int:
    """Strategy value floor(1e7*y) mod n_cells + 1, in [1, n_cells].

    The floor is taken directly on the binary64 product, with no
    decimal rounding, so results are bit-exact across platforms.
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"strategy_from_y: y={y!r} outside [0,1]")
    if n_cells < 2:
        raise ValueError(f"strategy_from_y: n_cells must be >= 2, got {n_cells}")
    return int(1e7 * y) % n_cells + 1


def m_from_y(y: float, m_set: Sequence[int]) -> int:
    """Return gap drawn from a sorted alphabet by equal-width partition.

    [0,1) is split into len(m_set) equal intervals; the interval that y
    falls in indexes the sorted alphabet (y=1.0 maps to the last
    element).  For a two-element alphabet this is exactly the rule
    "first element if y < 0.5, second if y >= 0.5"; a singleton
    alphabet gives a constant gap.
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"m_from_y: y={y!r} outside [0,1]")
    k = len(m_set)
    if k == 0:
        raise ValueError("m_from_y: empty gap alphabet")
    i = int(y * k)
    if i >= k:
        i = k - 1
    return m_set[i]


def chaotic_step(x: Sequence[int], s: int) -> tuple[int, ...]:
    """Negate component s (1-based) of x; every other component is kept.

    Applying the same step twice is the identity.
    """
    x = tuple(x)
    n = len(x)
    if not 1 <= s <= n:
        raise ValueError(f"chaotic_step: strategy {s} out of range for {n} cells")
    return x[: s - 1] + (1 - x[s - 1],) + x[s:]


def seed_from_time(t: int, n_cells: int) -> tuple[tuple[int, ...], float]:
    """Derive an (x0, y0) seed pair from a non-negative integer time value.

    y0 is t read as a decimal fraction: t / 10**d with d the number of
    decimal digits of t (t=484076 gives 0.484076).  x0 is the
    big-endian n_cells-bit expansion of t mod 2**n_cells, most
    significant bit in component 1.  Degenerate y0 values are rejected
    with an error instructing a re-seed.
    """
    if not isinstance(t, int) or isinstance(t, bool) or t < 0:
        raise ValueError(f"seed_from_time: t must be a non-negative integer, got {t!r}")
    if n_cells < 2:
        raise ValueError(f"seed_from_time: n_cells must be >= 2, got {n_cells}")
    y0 = t / 10 ** len(str(t))
    y0 = _check_y0(y0)
    r = t % (1 << n_cells)
    x0 = tuple((r >> (n_cells - 1 - i)) & 1 for i in range(n_cells))
    return x0, y0


def _validate_x0(x0: Iterable[int]) -> tuple[int, ...]:
    bits = tuple(int(b) for b in x0)
    if not bits:
        raise ValueError("x0 must be a non-empty bit vector")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("x0 components must be 0 or 1")
    return bits


@dataclass(frozen=True)
class SeedSpec:
    """Seed material: either time-derived (t) or explicit (x0, y0).

    Exactly one of the two forms must be populated.  Explicit y0 must
    lie strictly inside (0,1) and off the degenerate values
    {0.25, 0.5, 0.75}, which collapse the logistic orbit.
    """

    t: int | None = None
    x0: tuple[int, ...] | None = None
    y0: float | None = None

    def __post_init__(self) -> None:
        time_form = self.t is not None
        explicit_form = self.x0 is not None or self.y0 is not None
        if time_form and explicit_form:
            raise ValueError("SeedSpec: give either t or (x0, y0), not both")
        if time_form:
            if not isinstance(self.t, int) or isinstance(self.t, bool) or self.t < 0:
                raise ValueError(f"SeedSpec: t must be a non-negative integer, got {self.t!r}")
        else:
            if self.x0 is None or self.y0 is None:
                raise ValueError("SeedSpec: explicit form needs both x0 and y0")
            object.__setattr__(self, "x0", _validate_x0(self.x0))
            object.__setattr__(self, "y0", _check_y0(self.y0))

    @classmethod
    def from_time(cls, t: int) -> "SeedSpec":
        return cls(t=t)

    @classmethod
    def explicit(cls, x0: Iterable[int], y0: float) -> "SeedSpec":
        return cls(x0=tuple(x0), y0=y0)

    def resolve(self, n_cells: int) -> tuple[tuple[int, ...], float]:
        """Concrete (x0, y0) for a system of n_cells components."""
        if self.t is not None:
            return seed_from_time(self.t, n_cells)
        if len(self.x0) != n_cells:
            raise ValueError(
                f"SeedSpec: x0 has {len(self.x0)} components, expected {n_cells}"
            )
        return self.x0, self.y0


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of one generator instance.

    n_cells is the system size (at least 2).  m_set is the return-gap
    alphabet: positive integers, no duplicates, stored sorted
    ascending.  emit_initial controls whether block 0 is the seed
    vector itself (the default) or the first driven block.
    """

    n_cells: int
    m_set: tuple[int, ...]
    seed: SeedSpec
    emit_initial: bool = True

    def __post_init__(self) -> None:
        if not isinstance(self.n_cells, int) or isinstance(self.n_cells, bool) or self.n_cells < 2:
            raise ValueError(f"GeneratorConfig: n_cells must be an integer >= 2, got {self.n_cells!r}")
        m = tuple(int(v) for v in self.m_set)
        if not m:
            raise ValueError("GeneratorConfig: m_set must be non-empty")
        if any(v < 1 for v in m):
            raise ValueError("GeneratorConfig: m_set elements must be >= 1")
        if len(set(m)) != len(m):
            raise ValueError("GeneratorConfig: m_set must not contain duplicates")
        object.__setattr__(self, "m_set", tuple(sorted(m)))
        if not isinstance(self.seed, SeedSpec):
            raise ValueError("GeneratorConfig: seed must be a SeedSpec")
        object.__setattr__(self, "emit_initial", bool(self.emit_initial))


@dataclass
class GeneratorState:
    """Snapshot of the evolving state.

    y is the next unconsumed logistic sample (NaN under a forced
    transcript driver, which has no logistic state).  iter_count is the
    total number of cell updates performed so far.
    """

    x: tuple[int, ...]
    y: float
    iter_count: int
    blocks_emitted: int


class LogisticDriver:
    """Shared logistic sample stream; ``y`` is the next unconsumed sample."""

    __slots__ = ("y",)

    def __init__(self, y0: float) -> None:
        self.y = _check_y0(y0)

    def _draw(self) -> float:
        v = self.y
        nxt = 4.0 * v * (1.0 - v)
        if nxt == v:
            raise DegenerateSeedError(
                f"logistic driver reached fixed point y={v!r}; the seed is dead"
            )
        self.y = nxt
        return v

    def next_gap(self, m_set: Sequence[int]) -> int:
        return m_from_y(self._draw(), m_set)

    def next_strategy(self, n_cells: int) -> int:
        return strategy_from_y(self._draw(), n_cells)

    def key(self) -> tuple:
        return ("logistic", self.y)


class TranscriptDriver:
    """Replays explicit gap and strategy sequences (two separate streams).

    Gap values are used verbatim; the configured alphabet is not
    consulted in forced mode.  Strategy values are validated against
    the cell count at the moment they are drawn.  With cycle=True both
    sequences repeat forever, otherwise running past the end raises
    TranscriptExhausted.
    """

    def __init__(self, m_seq: Iterable[int], s_seq: Iterable[int], cycle: bool = False) -> None:
        m = tuple(int(v) for v in m_seq)
        s = tuple(int(v) for v in s_seq)
        if not m or not s:
            raise ValueError("TranscriptDriver: both sequences must be non-empty")
        if any(v < 1 for v in m) or any(v < 1 for v in s):
            raise ValueError("TranscriptDriver: transcript values must be >= 1")
        self.m_seq = m
        self.s_seq = s
        self.cycle = bool(cycle)
        self._gi = 0
        self._si = 0

    def next_gap(self, m_set: Sequence[int]) -> int:
        if not self.cycle and self._gi >= len(self.m_seq):
            raise TranscriptExhausted("gap transcript exhausted")
        v = self.m_seq[self._gi % len(self.m_seq)]
        self._gi += 1
        return v

    def next_strategy(self, n_cells: int) -> int:
        if not self.cycle and self._si >= len(self.s_seq):
            raise TranscriptExhausted("strategy transcript exhausted")
        v = self.s_seq[self._si % len(self.s_seq)]
        self._si += 1
        if not 1 <= v <= n_cells:
            raise ValueError(
                f"TranscriptDriver: strategy {v} out of range for {n_cells} cells"
            )
        return v

    def key(self) -> tuple:
        if self.cycle:
            return (
                "transcript",
                self._gi % len(self.m_seq),
                self._si % len(self.s_seq),
            )
        return ("transcript", self._gi, self._si)


class ChaoticBitGenerator:
    """Sequential block/bit emitter combining a driver with cell updates.

    Instances are plain sequential state machines: no internal
    concurrency, safe to move between threads between calls.  Distinct
    instances are fully independent.
    """

    def __init__(self, config: GeneratorConfig, driver=None) -> None:
        if not isinstance(config, GeneratorConfig):
            raise TypeError("config must be a GeneratorConfig")
        self.config = config
        n = config.n_cells
        x0, y0 = config.seed.resolve(n)
        if driver is None:
            driver = LogisticDriver(y0)
        self._driver = driver
        self._n = n
        mask = 0
        for b in x0:
            mask = (mask << 1) | b
        self._mask = mask
        self._iter_count = 0
        self._blocks_emitted = 0
        self._initial_pending = bool(config.emit_initial)
        self._pending_bits: list[int] = []

    # -- state inspection ---------------------------------------------

    def _mask_tuple(self, mask: int) -> tuple[int, ...]:
        n = self._n
        return tuple((mask >> (n - 1 - i)) & 1 for i in range(n))

    @property
    def state(self) -> GeneratorState:
        y = self._driver.y if isinstance(self._driver, LogisticDriver) else math.nan
        return GeneratorState(
            x=self._mask_tuple(self._mask),
            y=y,
            iter_count=self._iter_count,
            blocks_emitted=self._blocks_emitted,
        )

    def state_key(self) -> tuple:
        """Hashable full digital state: cell vector plus driver state.

        Excludes emission bookkeeping; two generators with equal keys
        produce identical futures under advance_block.
        """
        return (self._mask, self._driver.key())

    # -- block production ---------------------------------------------

    def _advance_masks(self, nblocks: int) -> list[int]:
        """Run nblocks driven blocks, returning the emitted cell masks.

        On a degenerate-driver error mid-block the generator is left in
        the state reached at the failure point and the error
        propagates; the failing sample is never consumed.
        """
        driver = self._driver
        n = self._n
        mset = self.config.m_set
        masks: list[int] = []
        if type(driver) is LogisticDriver:
            # Hot path: same arithmetic as the module-level operations,
            # inlined because this loop dominates generation time.
            y = driver.y
            k = len(mset)
            mask = self._mask
            iters = 0
            append = masks.append
            try:
                for _ in range(nblocks):
                    i = int(y * k)
                    m = mset[i if i < k else k - 1]
                    nxt = 4.0 * y * (1.0 - y)
                    if nxt == y:
                        raise DegenerateSeedError(
                            f"logistic driver reached fixed point y={y!r}; the seed is dead"
                        )
                    y = nxt
                    for _ in range(m):
                        s = int(1e7 * y) % n + 1
                        nxt = 4.0 * y * (1.0 - y)
                        if nxt == y:
                            raise DegenerateSeedError(
                                f"logistic driver reached fixed point y={y!r}; the seed is dead"
                            )
                        y = nxt
                        mask ^= 1 << (n - s)
                        iters += 1
                    append(mask)
            finally:
                driver.y = y
                self._mask = mask
                self._iter_count += iters
                self._blocks_emitted += len(masks)
            return masks
        for _ in range(nblocks):
            m = driver.next_gap(mset)
            for _ in range(m):
                s = driver.next_strategy(n)
                self._mask ^= 1 << (n - s)
                self._iter_count += 1
            self._blocks_emitted += 1
            masks.append(self._mask)
        return masks

    def next_block(self) -> tuple[int, ...]:
        """Emit the next block, components in order 1..n_cells.

        When emit_initial is set, the first emission is the seed vector
        itself and consumes no driver samples.
        """
        if self._initial_pending:
            self._initial_pending = False
            self._blocks_emitted += 1
            return self._mask_tuple(self._mask)
        return self._mask_tuple(self._advance_masks(1)[0])

    def advance_block(self) -> tuple[int, ...]:
        """Run exactly one driven block and return the resulting vector.

        Unlike next_block this never echoes the seed vector; it also
        cancels a pending initial emission.  Cycle detection walks the
        state orbit with this method.
        """
        self._initial_pending = False
        return self._mask_tuple(self._advance_masks(1)[0])

    def bits(self, count: int) -> np.ndarray:
        """The next ``count`` output bits as a numpy uint8 array.

        Bit k of a fresh generator equals component (k mod n_cells)+1
        of block floor(k / n_cells); successive calls continue the
        stream, buffering any partially consumed block.
        """
        if count < 0:
            raise ValueError(f"bits: count must be non-negative, got {count}")
        out = np.empty(count, dtype=np.uint8)
        pos = 0
        pend = self._pending_bits
        while pos < count and pend:
            out[pos] = pend.pop(0)
            pos += 1
        if pos == count:
            return out
        remaining = count - pos
        n = self._n
        masks: list[int] = []
        if self._initial_pending:
            self._initial_pending = False
            self._blocks_emitted += 1
            masks.append(self._mask)
        need = remaining - n * len(masks)
        if need > 0:
            masks.extend(self._advance_masks((need + n - 1) // n))
        arr = _masks_to_bit_array(masks, n)
        out[pos:] = arr[:remaining]
        self._pending_bits = [int(b) for b in arr[remaining:]]
        return out


def _masks_to_bit_array(masks: Sequence[int], n_cells: int) -> np.ndarray:
    if not masks:
        return np.empty(0, dtype=np.uint8)
    if n_cells <= 64:
        a = np.asarray(masks, dtype=np.uint64)
        shifts = np.arange(n_cells - 1, -1, -1, dtype=np.uint64)
        return ((a[:, None] >> shifts) & np.uint64(1)).astype(np.uint8).ravel()
    out = np.empty(len(masks) * n_cells, dtype=np.uint8)
    pos = 0
    for mask in masks:
        for i in range(n_cells - 1, -1, -1):
            out[pos] = (mask >> i) & 1
            pos += 1
    return out


def generate_bits(config: GeneratorConfig, count: int, *, driver=None) -> np.ndarray:
    """First ``count`` bits of a fresh generator built from config.

    Deterministic: identical config (and driver, if forced) always
    yields an identical sequence.
    """
    return ChaoticBitGenerator(config, driver=driver).bits(count)


def pack_bits(bits: Sequence[int]) -> bytes:
    """Pack bits into bytes, first bit in the most significant position.

    The final partial byte, if any, is zero-padded in the low bits.
    """
    arr = np.asarray(bits)
    if arr.size == 0:
        return b""
    if np.any((arr != 0) & (arr != 1)):
        raise ValueError("pack_bits: input must contain only 0s and 1s")
    return np.packbits(arr.astype(np.uint8)).tobytes()


def bits_to_ascii(bits: Sequence[int], wrap: int = 0) -> str:
    """Render bits as '0'/'1' characters, optionally wrapped.

    With wrap > 0 the text is split into newline-terminated lines of at
    most ``wrap`` characters; with wrap = 0 a single bare string is
    returned.
    """
    s = "".join("1" if b else "0" for b in bits)
    if wrap and wrap > 0:
        chunks = [s[i : i + wrap] for i in range(0, len(s), wrap)]
        return "".join(c + "\n" for c in chunks)
    return s


def parse_ascii_bits(text: str) -> np.ndarray:
    """Parse '0'/'1' text (whitespace ignored) into a uint8 bit array."""
    out = []
    for c in text:
        if c.isspace():
            continue
        if c == "0":
            out.append(0)
        elif c == "1":
            out.append(1)
        else:
            raise ValueError(f"parse_ascii_bits: invalid character {c!r}")
    return np.array(out, dtype=np.uint8)


def config_to_text(config: GeneratorConfig) -> str:
    """Serialize a config as plain key=value lines."""
    lines = [
        f"n_cells={config.n_cells}",
        "m_set=" + ",".join(str(m) for m in config.m_set),
    ]
    if config.seed.t is not None:
        lines.append(f"seed.t={config.seed.t}")
    else:
        lines.append("seed.x0=" + "".join(str(b) for b in config.seed.x0))
        lines.append(f"seed.y0={config.seed.y0!r}")
    lines.append(f"emit_initial={'true' if config.emit_initial else 'false'}")
    return "".join(line + "\n" for line in lines)


_CONFIG_KEYS = {"n_cells", "m_set", "seed.t", "seed.x0", "seed.y0", "emit_initial"}


def config_from_text(text: str) -> GeneratorConfig:
    """Parse the key=value serialization produced by config_to_text.

    Blank lines and lines starting with '#' are ignored.  y0 is parsed
    as a binary64 decimal literal, so a serialized config round-trips
    bit-exactly.
    """
    entries: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ValueError(f"config: expected key=value, got {line!r}")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"config: unknown key {key!r}")
        if key in entries:
            raise ValueError(f"config: duplicate key {key!r}")
        entries[key] = value.strip()
    for required in ("n_cells", "m_set"):
        if required not in entries:
            raise ValueError(f"config: missing required key {required!r}")
    try:
        n_cells = int(entries["n_cells"])
        m_set = tuple(int(v) for v in entries["m_set"].split(","))
    except ValueError as exc:
        raise ValueError(f"config: bad numeric field ({exc})") from None
    if "seed.t" in entries:
        if "seed.x0" in entries or "seed.y0" in entries:
            raise ValueError("config: give either seed.t or seed.x0/seed.y0, not both")
        seed = SeedSpec.from_time(int(entries["seed.t"]))
    elif "seed.x0" in entries and "seed.y0" in entries:
        x0_text = entries["seed.x0"]
        if not x0_text or any(c not in "01" for c in x0_text):
            raise ValueError(f"config: seed.x0 must be a bit string, got {x0_text!r}")
        seed = SeedSpec.explicit(tuple(int(c) for c in x0_text), float(entries["seed.y0"]))
    else:
        raise ValueError("config: missing seed (seed.t or seed.x0 plus seed.y0)")
    emit_initial = True
    if "emit_initial" in entries:
        flag = entries["emit_initial"].lower()
        if flag not in ("true", "false"):
            raise ValueError(f"config: emit_initial must be true or false, got {flag!r}")
        emit_initial = flag == "true"
    return GeneratorConfig(n_cells=n_cells, m_set=m_set, seed=seed, emit_initial=emit_initial)


def transcript_from_text(text: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Parse a forced transcript: lines ``m=4,5,4`` and ``s=2,4,2,...``.

    Blank lines and '#' comments are ignored; both lines are required.
    """
    m_seq: tuple[int, ...] | None = None
    s_seq: tuple[int, ...] | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep or key not in ("m", "s"):
            raise ValueError(f"transcript: expected m=... or s=..., got {line!r}")
        try:
            seq = tuple(int(v) for v in value.strip().split(","))
        except ValueError:
            raise ValueError(f"transcript: bad integer list in {line!r}") from None
        if key == "m":
            m_seq = seq
        else:
            s_seq = seq
    if m_seq is None or s_seq is None:
        raise ValueError("transcript: both an m= line and an s= line are required")
    return m_seq, s_seq
