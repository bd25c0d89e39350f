"""
Message-level simulation of the two-phase EER-BR protocol.

MAC phase: both sources send their exchange messages as lattice codewords and
source 2 superposes its (relabeled) private stream; the relay decodes the private
stream first, removes it, then decodes the modulo sum of the codewords.
BC phase: the relay broadcasts the sum index plus the relabeled tail bits and
each source strips its own codeword using side information.
"""

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from twrc import LOGGER
from twrc.config import Settings
from twrc.helper.exceptions import (
    DomainError, MalformedSnapshotError, PreconditionError, WidthError,
)
from twrc.helper.lattice import LatticeWord, fits, lattice_map_g, lattice_unmap_g, mod_add, mod_sub
from twrc.helper.regions import ChannelConfig, RateTuple, eer_br_ma_member

MAX_WIDTH = 62
MODES = ("genie", "awgn")


class Widths(NamedTuple):
    b12: int
    b21: int
    b1r: int
    b2r: int


def message_widths(rates: RateTuple, n: int) -> Widths:
    """floor(n * R) bits per message."""
    if int(n) != n or n < 1:
        raise DomainError(f"block length n must be >= 1, got {n!r}")
    # absorb round-off such as (2 / 3) * 3 = 1.9999999999999998
    widths = Widths(*(int(math.floor(n * rate + 1e-9)) for rate in rates))
    for name, width in zip(Widths._fields, widths):
        if width > MAX_WIDTH:
            raise WidthError(f"{name}: {width} bits exceeds the {MAX_WIDTH}-bit message limit")
    return widths


@dataclass(frozen=True)
class MessageSet:
    w12: int
    w21: int
    w1r: int
    w2r: int
    widths: Widths

    def __post_init__(self):
        object.__setattr__(self, "widths", Widths(*self.widths))
        for name, width in zip(("w12", "w21", "w1r", "w2r"), self.widths):
            value = getattr(self, name)
            if width < 0 or width > MAX_WIDTH:
                raise WidthError(f"{name}: width {width} outside [0, {MAX_WIDTH}]")
            if int(value) != value or not 0 <= value < (1 << width):
                raise DomainError(f"{name}={value!r} does not fit in {width} bits")
            object.__setattr__(self, name, int(value))

    @classmethod
    def zeros(cls, widths: Widths) -> "MessageSet":
        return cls(0, 0, 0, 0, widths)


@dataclass(frozen=True)
class SplitLayout:
    """How the surplus bits of the longer exchange message move into its sender's private message."""
    widths: Widths
    longer: Optional[str]       # "r12", "r21", or None when the exchange widths match

    @classmethod
    def from_widths(cls, widths: Widths) -> "SplitLayout":
        widths = Widths(*widths)
        if widths.b12 == widths.b21:
            return cls(widths, None)
        return cls(widths, "r21" if widths.b12 < widths.b21 else "r12")

    @property
    def exchange_bits(self) -> int:
        return min(self.widths.b12, self.widths.b21)

    @property
    def delta_bits(self) -> int:
        return abs(self.widths.b12 - self.widths.b21)

    @property
    def relabeled_widths(self) -> Widths:
        w, e, d = self.widths, self.exchange_bits, self.delta_bits
        if self.longer == "r12":
            return Widths(e, e, w.b1r + d, w.b2r)
        return Widths(e, e, w.b1r, w.b2r + d)

    def operating_point(self, n: int) -> RateTuple:
        return RateTuple(*(width / n for width in self.widths))


def _split(value: int, low_bits: int) -> Tuple[int, int]:
    return value & ((1 << low_bits) - 1), value >> low_bits


def relabel(msgs: MessageSet, layout: SplitLayout) -> MessageSet:
    if msgs.widths != layout.widths:
        raise DomainError(f"message widths {tuple(msgs.widths)} do not match layout {tuple(layout.widths)}")
    e, out = layout.exchange_bits, layout.relabeled_widths
    if layout.longer == "r12":
        head, tail = _split(msgs.w12, e)
        return MessageSet(head, msgs.w21, msgs.w1r | (tail << msgs.widths.b1r), msgs.w2r, out)
    head, tail = _split(msgs.w21, e)
    return MessageSet(msgs.w12, head, msgs.w1r, msgs.w2r | (tail << msgs.widths.b2r), out)


def relabel_split(msgs: MessageSet, rates: RateTuple, n: int) -> Tuple[MessageSet, SplitLayout]:
    """
    Equalize the exchange widths by moving the high-order surplus bits of the longer
    exchange message onto its sender's private message.

    With widths b12 <= b21, W21 splits into W21' (low b12 bits) and W21'' (the
    rest), and W21'' is appended above the b2r bits of W2r. Mirrored otherwise.
    """
    layout = SplitLayout.from_widths(message_widths(rates, n))
    return relabel(msgs, layout), layout


def unrelabel(relabeled: MessageSet, layout: SplitLayout) -> MessageSet:
    if relabeled.widths != layout.relabeled_widths:
        raise DomainError("relabeled widths do not match layout")
    e = layout.exchange_bits
    if layout.longer == "r12":
        w1r, tail = _split(relabeled.w1r, layout.widths.b1r)
        return MessageSet(relabeled.w12 | (tail << e), relabeled.w21, w1r, relabeled.w2r, layout.widths)
    if layout.longer == "r21":
        w2r, tail = _split(relabeled.w2r, layout.widths.b2r)
        return MessageSet(relabeled.w12, relabeled.w21 | (tail << e), relabeled.w1r, w2r, layout.widths)
    return MessageSet(relabeled.w12, relabeled.w21, relabeled.w1r, relabeled.w2r, layout.widths)


def random_message_set(layout: SplitLayout, rng: np.random.Generator) -> MessageSet:
    values = [int(rng.integers(0, 1 << width)) if width else 0 for width in layout.widths]
    return MessageSet(*values, layout.widths)


@dataclass(frozen=True)
class RelaySnapshot:
    """Everything the relay holds after the MAC phase. It never learns W12 or W21 themselves."""
    w1r_hat: int
    w2r_hat: int
    t0: LatticeWord
    w0_hat: int
    exchange_tail: int

    def __post_init__(self):
        if not isinstance(self.t0, LatticeWord):
            raise MalformedSnapshotError("t0 must be a lattice word")
        if self.w0_hat != lattice_unmap_g(self.t0):
            raise MalformedSnapshotError(f"w0_hat={self.w0_hat} is not the index of t0")
        if min(self.w1r_hat, self.w2r_hat, self.exchange_tail) < 0:
            raise MalformedSnapshotError("decoded messages must be non-negative")


def _check_codebook(layout: SplitLayout, q: int, n: int):
    if not fits(layout.exchange_bits, q, n):
        raise WidthError(f"{layout.exchange_bits} exchange bits do not fit {q}^{n} lattice points")


def _relay_snapshot(layout: SplitLayout, t0: LatticeWord, w1r_rel: int, w2r_rel: int) -> RelaySnapshot:
    w1r, w2r, tail = w1r_rel, w2r_rel, 0
    if layout.longer == "r12":
        w1r, tail = _split(w1r_rel, layout.widths.b1r)
    elif layout.longer == "r21":
        w2r, tail = _split(w2r_rel, layout.widths.b2r)
    return RelaySnapshot(w1r, w2r, t0, lattice_unmap_g(t0), tail)


def pam(symbols: np.ndarray, q: int) -> np.ndarray:
    """q-ary PAM with unit average power: (d - (q-1)/2) * sqrt(12 / (q^2 - 1))."""
    step = math.sqrt(12.0 / (q * q - 1))
    return (np.asarray(symbols, dtype=float) - 0.5 * (q - 1)) * step


def _awgn_relay(t12: np.ndarray, t21: np.ndarray, v: np.ndarray, cfg: ChannelConfig, q: int,
                noise_var: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    Uncoded superposition over one real AWGN MAC use per symbol.

    Returns the relay's estimates (v_hat, t_hat) of the private stream and of
    (t12 + t21) mod q.
    """
    step = math.sqrt(12.0 / (q * q - 1))
    a_lat, a_priv = math.sqrt(cfg.p1), math.sqrt(cfg.p2 - cfg.p1)
    y = a_lat * (pam(t12, q) + pam(t21, q)) + a_priv * pam(v, q)
    if noise_var > 0:
        y = y + rng.normal(scale=math.sqrt(noise_var), size=y.shape)

    if a_priv > 0:
        v_hat = np.clip(np.rint(y / (a_priv * step) + 0.5 * (q - 1)), 0, q - 1).astype(np.int64)
        y = y - a_priv * pam(v_hat, q)
    else:
        v_hat = np.zeros_like(np.asarray(v, dtype=np.int64))
    if a_lat > 0:
        t_hat = np.mod(np.rint(y / (a_lat * step) + (q - 1)), q).astype(np.int64)
    else:
        t_hat = np.zeros_like(np.asarray(t12, dtype=np.int64))
    return v_hat, t_hat


def noise_variance(snr_db: float) -> float:
    if math.isnan(snr_db) or snr_db == -math.inf:
        raise DomainError(f"SNR must be a number above -inf dB, got {snr_db!r}")
    return 0.0 if snr_db == math.inf else 10.0 ** (-snr_db / 10.0)


def run_mac_phase(relabeled: MessageSet, cfg: ChannelConfig, layout: SplitLayout, q: int, n: int,
                  mode: str = "genie", noise_var: float = 0.0,
                  rng: Optional[np.random.Generator] = None, tol: float = None) -> RelaySnapshot:
    if mode not in MODES:
        raise DomainError(f"mode must be one of {', '.join(MODES)}, got {mode!r}")
    if relabeled.widths != layout.relabeled_widths:
        raise DomainError("messages are not in the relabeled layout")
    _check_codebook(layout, q, n)
    t12 = lattice_map_g(relabeled.w12, q, n)
    t21 = lattice_map_g(relabeled.w21, q, n)

    if mode == "genie":
        point = layout.operating_point(n)
        report = eer_br_ma_member(cfg, point, tol)
        if not report.member:
            worst = report.worst
            raise PreconditionError(
                f"operating point {tuple(point)} outside R2,ma ({worst.label} = {worst.value:.6g})")
        # lattice decoding of the noiseless sum, reduced mod q
        t0 = mod_add(t12, t21)
        return _relay_snapshot(layout, t0, relabeled.w1r, relabeled.w2r)

    if not cfg.is_canonical:
        raise PreconditionError("awgn mode superposes the private stream on source 2 and needs p1 <= p2")
    if layout.relabeled_widths.b1r:
        raise PreconditionError("awgn mode carries no private stream from source 1")
    if not fits(layout.relabeled_widths.b2r, q, n):
        raise WidthError(f"{layout.relabeled_widths.b2r} private bits do not fit {q}^{n} PAM words")
    if noise_var < 0 or not math.isfinite(noise_var):
        raise DomainError(f"noise variance must be finite and >= 0, got {noise_var!r}")
    rng = rng if rng is not None else np.random.default_rng(Settings.seed())
    v = lattice_map_g(relabeled.w2r, q, n)
    v_hat, t_hat = _awgn_relay(t12.as_array(), t21.as_array(), v.as_array(), cfg, q, noise_var, rng)
    w2r_rel = lattice_unmap_g(LatticeWord.from_array(v_hat, q))
    # a wrong PAM decision can land on an index no width-limited message uses
    w2r_rel &= (1 << layout.relabeled_widths.b2r) - 1
    return _relay_snapshot(layout, LatticeWord.from_array(t_hat, q), 0, w2r_rel)


class BcDecode(NamedTuple):
    w21_at_source1: int
    w12_at_source2: int


def run_bc_phase(snapshot: RelaySnapshot, side_info_1: Tuple[int, int], side_info_2: Tuple[int, int],
                 layout: SplitLayout, q: int, n: int, mode: str = "genie") -> BcDecode:
    """
    Broadcast (w0, tail) and decode at both sources with their own messages.

    side_info_1 is source 1's (w12, w1r), side_info_2 source 2's (w21, w2r).
    """
    if mode != "genie":
        raise DomainError("the broadcast phase is simulated with an ideal channel code only")
    if snapshot.t0.q != q or snapshot.t0.n != n:
        raise MalformedSnapshotError(f"t0 is over (q={snapshot.t0.q}, n={snapshot.t0.n}), expected ({q}, {n})")
    if snapshot.exchange_tail >= (1 << layout.delta_bits):
        raise MalformedSnapshotError(f"tail {snapshot.exchange_tail} exceeds {layout.delta_bits} bits")

    e = layout.exchange_bits
    t0 = lattice_map_g(snapshot.w0_hat, q, n)
    own12, _ = _split(side_info_1[0], e)
    own21, _ = _split(side_info_2[0], e)
    w21_hat = lattice_unmap_g(mod_sub(t0, lattice_map_g(own12, q, n)))
    w12_hat = lattice_unmap_g(mod_sub(t0, lattice_map_g(own21, q, n)))
    if layout.longer == "r21":
        w21_hat |= snapshot.exchange_tail << e
    elif layout.longer == "r12":
        w12_hat |= snapshot.exchange_tail << e
    return BcDecode(w21_hat, w12_hat)


@dataclass(frozen=True)
class ProtocolOutcome:
    snapshot: RelaySnapshot
    decoded: BcDecode
    relay_w1r_ok: bool
    relay_w2r_ok: bool
    source1_ok: bool        # W21 recovered at source 1
    source2_ok: bool        # W12 recovered at source 2

    @property
    def success(self) -> bool:
        return self.relay_w1r_ok and self.relay_w2r_ok and self.source1_ok and self.source2_ok


def run_protocol(msgs: MessageSet, cfg: ChannelConfig, layout: SplitLayout, q: int, n: int,
                 mode: str = "genie", noise_var: float = 0.0,
                 rng: Optional[np.random.Generator] = None, tol: float = None) -> ProtocolOutcome:
    relabeled = relabel(msgs, layout)
    snapshot = run_mac_phase(relabeled, cfg, layout, q, n, mode, noise_var, rng, tol)
    decoded = run_bc_phase(snapshot, (msgs.w12, msgs.w1r), (msgs.w21, msgs.w2r), layout, q, n)
    return ProtocolOutcome(
        snapshot, decoded,
        snapshot.w1r_hat == msgs.w1r, snapshot.w2r_hat == msgs.w2r,
        decoded.w21_at_source1 == msgs.w21, decoded.w12_at_source2 == msgs.w12,
    )


@dataclass(frozen=True)
class SerPoint:
    snr: float
    ser_private: float
    ser_modsum: float
    trials: int
    seed: int

    def row(self) -> tuple:
        return self.snr, self.ser_private, self.ser_modsum, self.trials, self.seed

    def to_dict(self) -> dict:
        return dict(zip(SER_HEADER, self.row()))


SER_HEADER = ("snr", "ser_private", "ser_modsum", "trials", "seed")


def ser_curve(cfg: ChannelConfig, q: int, n: int, snr_points: Sequence[float], trials: int,
              seed: int) -> List[SerPoint]:
    """
    Symbol-error rates of both relay decoding stages in awgn mode.

    SNR points are in dB (noise variance 10^(-snr/10), inf for a noiseless channel).
    Point j draws its trials from np.random.default_rng([seed, j]); symbols are
    uniform over Z_q, so each trial contributes n symbols per stage.
    """
    if len(snr_points) == 0:
        raise DomainError("snr_points must not be empty")
    if int(trials) != trials or trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {trials!r}")
    if int(q) != q or q < 2 or int(n) != n or n < 1:
        raise DomainError(f"need q >= 2 and n >= 1, got q={q!r}, n={n!r}")
    if int(seed) != seed or seed < 0:
        raise DomainError(f"seed must be a non-negative integer, got {seed!r}")
    if not cfg.is_canonical:
        raise PreconditionError("awgn mode superposes the private stream on source 2 and needs p1 <= p2")

    variances = [noise_variance(float(s)) for s in snr_points]
    points = []
    for j, (snr, noise_var) in enumerate(zip(snr_points, variances)):
        rng = np.random.default_rng([seed, j])
        t12, t21, v = (rng.integers(0, q, size=(trials, n)) for _ in range(3))
        v_hat, t_hat = _awgn_relay(t12, t21, v, cfg, q, noise_var, rng)
        ser_private = float(np.mean(v_hat != v)) if cfg.p2 > cfg.p1 else 0.0
        ser_modsum = float(np.mean(t_hat != (t12 + t21) % q)) if cfg.p1 > 0 else 0.0
        points.append(SerPoint(float(snr), ser_private, ser_modsum, int(trials), int(seed)))
    LOGGER.info(f"SER curve over {len(points)} points, {trials} trials each")
    return points
