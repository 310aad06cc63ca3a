"""I/Q recordings on disk and the packet/frame tensor the GAN trains on.

Payload format is header-less raw interleaved little-endian float32, I then Q
per complex sample (the common SDR capture layout). Capture metadata travels
in a UTF-8 ``key=value`` sidecar at ``<payload path> + ".meta"`` with at least
``sample_rate_hz``, ``center_freq_hz`` and ``rx_gain_db``; unknown keys are
preserved for audit but ignored here.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .kvfile import read_kv, write_kv

PAYLOAD_DTYPE = np.dtype("<f4")
META_SUFFIX = ".meta"
REQUIRED_META = ("sample_rate_hz", "center_freq_hz", "rx_gain_db")

_COMPONENTS = ("I", "Q")


class IQFormatError(ValueError):
    """Raised for malformed I/Q payloads or sidecar metadata."""


@dataclass
class IQRecording:
    """A contiguous complex baseband capture plus its physical metadata."""

    samples: np.ndarray
    sample_rate_hz: float
    center_freq_hz: float = 0.0
    rx_gain_db: float = 0.0

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D array")
        self.sample_rate_hz = float(self.sample_rate_hz)
        self.center_freq_hz = float(self.center_freq_hz)
        self.rx_gain_db = float(self.rx_gain_db)
        if self.sample_rate_hz <= 0.0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        if self.center_freq_hz < 0.0:
            raise ValueError(f"center_freq_hz must be non-negative, got {self.center_freq_hz}")

    @property
    def n_samples(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz

    def mean_power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))


def sidecar_path(path: str | Path) -> Path:
    return Path(str(path) + META_SUFFIX)


def load_iq(path: str | Path, expected_format: str = "cf32") -> IQRecording:
    """Load a raw interleaved float32 I/Q payload and its metadata sidecar.

    Parameters
    ----------
    path : str or Path
        Payload file; ``path + ".meta"`` must exist alongside it.
    expected_format : str
        Payload sample format tag. Only ``"cf32"`` (complex float32) is
        defined; anything else raises ``IQFormatError``.
    """
    path = Path(path)
    if expected_format != "cf32":
        raise IQFormatError(f"unsupported payload format {expected_format!r}")
    raw = path.read_bytes()
    if len(raw) == 0:
        raise IQFormatError(f"{path}: empty payload")
    if len(raw) % (2 * PAYLOAD_DTYPE.itemsize) != 0:
        raise IQFormatError(f"{path}: truncated sample (payload is {len(raw)} bytes)")
    floats = np.frombuffer(raw, dtype=PAYLOAD_DTYPE).astype(np.float64)
    if not np.all(np.isfinite(floats)):
        raise IQFormatError(f"{path}: payload contains non-finite values")
    samples = floats[0::2] + 1j * floats[1::2]

    meta_path = sidecar_path(path)
    if not meta_path.is_file():
        raise IQFormatError(f"missing metadata sidecar {meta_path}")
    meta = read_kv(meta_path)
    missing = [key for key in REQUIRED_META if key not in meta]
    if missing:
        raise IQFormatError(f"{meta_path}: missing metadata keys {missing}")
    try:
        fields = {key: float(meta[key]) for key in REQUIRED_META}
    except ValueError as exc:
        raise IQFormatError(f"{meta_path}: malformed metadata value ({exc})") from exc
    return IQRecording(samples=samples, **fields)


def save_iq(rec: IQRecording, path: str | Path, extra_meta: dict | None = None) -> None:
    """Write the payload as interleaved little-endian float32 plus a sidecar."""
    path = Path(path)
    interleaved = np.empty(2 * rec.n_samples, dtype=PAYLOAD_DTYPE)
    interleaved[0::2] = rec.samples.real.astype(PAYLOAD_DTYPE)
    interleaved[1::2] = rec.samples.imag.astype(PAYLOAD_DTYPE)
    path.write_bytes(interleaved.tobytes())
    meta = {
        "sample_rate_hz": repr(rec.sample_rate_hz),
        "center_freq_hz": repr(rec.center_freq_hz),
        "rx_gain_db": repr(rec.rx_gain_db),
    }
    if extra_meta:
        for key, value in extra_meta.items():
            meta.setdefault(str(key), str(value))
    write_kv(sidecar_path(path), meta)


@dataclass
class PrototypeTensor:
    """Training view of a recording: [n_frames, n_packets, 2, packet_len].

    Axis 2 separates the I (index 0) and Q (index 1) components, so each
    ``data[frame, packet, component]`` row is one real-valued training packet.
    """

    data: np.ndarray
    normalized: bool = False

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 4:
            raise ValueError(f"tensor must be 4-D, got shape {self.data.shape}")
        n_frames, n_packets, n_comp, packet_len = self.data.shape
        if n_comp != 2:
            raise ValueError(f"component axis must have size 2, got {n_comp}")
        if n_frames < 1 or n_packets < 1 or packet_len < 2:
            raise ValueError(f"degenerate tensor shape {self.data.shape}")

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    @property
    def n_packets(self) -> int:
        return self.data.shape[1]

    @property
    def packet_len(self) -> int:
        return self.data.shape[3]

    def _check_frame(self, frame: int) -> int:
        frame = int(frame)
        if not 0 <= frame < self.n_frames:
            raise ValueError(f"frame {frame} out of range [0, {self.n_frames})")
        return frame

    def frame_power(self, frame: int) -> float:
        """Mean packet power of one frame: mean over packets/samples of I^2+Q^2."""
        return float(np.mean(np.sum(self.data[self._check_frame(frame)] ** 2, axis=1)))

    def component_packets(self, frame: int, component: str) -> np.ndarray:
        """Real packets [n_packets, packet_len] of one component of one frame."""
        if component not in _COMPONENTS:
            raise ValueError(f"component must be 'I' or 'Q', got {component!r}")
        return self.data[self._check_frame(frame), :, _COMPONENTS.index(component), :]

    def complex_packets(self, frame: int) -> np.ndarray:
        """Complex packets [n_packets, packet_len] of one frame."""
        frame = self._check_frame(frame)
        return self.data[frame, :, 0, :] + 1j * self.data[frame, :, 1, :]


@dataclass
class FrameStats:
    """Per-frame mean packet power recorded at normalization time."""

    per_frame_power: np.ndarray

    def __post_init__(self) -> None:
        self.per_frame_power = np.asarray(self.per_frame_power, dtype=np.float64)
        if self.per_frame_power.ndim != 1 or self.per_frame_power.size == 0:
            raise ValueError("per_frame_power must be a non-empty 1-D array")
        if not np.all(self.per_frame_power > 0.0):
            raise ValueError("frame powers must be positive")

    @property
    def n_frames(self) -> int:
        return int(self.per_frame_power.size)


def frame_tensor(rec: IQRecording, n_fft: int, n_frames: int) -> PrototypeTensor:
    """Slice a recording into the 4-D [n_frames, n_packets, 2, n_fft] tensor.

    The packet count per frame is ``n_samples // (n_frames * n_fft)``; trailing
    samples that do not fill a whole packet are dropped.
    """
    if n_fft < 2:
        raise ValueError(f"n_fft must be >= 2, got {n_fft}")
    if n_frames < 1:
        raise ValueError(f"n_frames must be >= 1, got {n_frames}")
    n_packets = rec.n_samples // (n_frames * n_fft)
    if n_packets < 1:
        raise ValueError(
            f"recording too short: {rec.n_samples} samples cannot fill one "
            f"packet per frame at n_fft={n_fft}, n_frames={n_frames}"
        )
    used = n_frames * n_packets * n_fft
    block = rec.samples[:used].reshape(n_frames, n_packets, n_fft)
    data = np.stack([block.real, block.imag], axis=2)
    return PrototypeTensor(data=data, normalized=False)


def normalize_frames(tensor: PrototypeTensor) -> tuple[PrototypeTensor, FrameStats]:
    """Scale each frame to unit mean packet power; return stats to undo it.

    Every sample of frame ``f`` is divided by ``sqrt(P_f)`` where ``P_f`` is
    the frame's mean over packets and samples of ``I^2 + Q^2``, so amplitudes
    land inside the generator's tanh output range.
    """
    if tensor.normalized:
        raise ValueError("tensor is already normalized")
    power = np.mean(np.sum(tensor.data**2, axis=2), axis=(1, 2))
    if not np.all(power > 0.0):
        dead = np.flatnonzero(power <= 0.0).tolist()
        raise ValueError(f"cannot normalize all-zero frame(s) {dead}")
    scaled = tensor.data / np.sqrt(power)[:, None, None, None]
    return PrototypeTensor(data=scaled, normalized=True), FrameStats(per_frame_power=power)


def denormalize(packets: np.ndarray, frame_power: float) -> np.ndarray:
    """Rescale normalized packets back to the source frame's power."""
    if frame_power <= 0.0:
        raise ValueError(f"frame_power must be positive, got {frame_power}")
    return np.asarray(packets) * np.sqrt(frame_power)
