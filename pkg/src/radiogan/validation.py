"""Quantitative model validation: spectra, PDFs, KS distance, verdicts.

Each of the qualitative checks usually done by eye on spectra and PDF
overlays is converted into a number: occupied-band energy fractions against
a white-noise baseline, Kolmogorov-Smirnov distances between sample
distributions, and the mean discriminator accuracy near the end of training.
The pass thresholds are artifact decisions calibrated on the synthetic
prototype and are stored inside the report so the verdict is re-derivable
from the report alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dsp import dft
from .gan import GanModel, GeneratorNet, TrainingLog
from .iqcore import FrameStats, IQRecording, PrototypeTensor, denormalize
from .kvfile import format_kv, parse_kv
from .seeding import substream
from .synthesis import assemble_iq, generate_packets

DEFAULT_COVERAGE = 0.9
DEFAULT_N_BINS = 101
DEFAULT_SIGMA_SPAN = 4.0
DEFAULT_BAND_RATIO_MIN = 2.0
DEFAULT_ACCURACY_BAND = (0.3, 0.8)

_CRITERIA = ("ks_gen_below_noise", "band_fraction_ratio", "accuracy_in_band")


@dataclass
class SpectralMatrix:
    """Per-packet magnitude spectra, one column per packet: [n_fft, n_packets]."""

    magnitudes: np.ndarray

    def __post_init__(self) -> None:
        self.magnitudes = np.asarray(self.magnitudes, dtype=np.float64)
        if self.magnitudes.ndim != 2 or self.magnitudes.size == 0:
            raise ValueError("magnitudes must be a non-empty 2-D array")
        if np.any(self.magnitudes < 0.0):
            raise ValueError("magnitudes must be non-negative")

    @property
    def n_fft(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def n_packets(self) -> int:
        return self.magnitudes.shape[1]

    def bin_energies(self) -> np.ndarray:
        """Total energy per frequency bin, summed over packets."""
        return np.sum(self.magnitudes**2, axis=1)


def spectral_matrix(packets: np.ndarray) -> SpectralMatrix:
    """Magnitude spectra of a packet matrix [P, n_fft], transposed to [n_fft, P]."""
    packets = np.asarray(packets, dtype=np.complex128)
    if packets.ndim != 2 or packets.shape[0] < 1:
        raise ValueError("packets must be a non-empty 2-D array")
    return SpectralMatrix(magnitudes=np.abs(dft(packets)).T)


def empirical_pdf(samples, n_bins: int, value_range) -> tuple:
    """Histogram masses over equal bins; out-of-range samples go to edge bins.

    Returns ``(bin_centers, masses)`` with the masses summing to 1.
    """
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size == 0:
        raise ValueError("empty input")
    if n_bins < 2:
        raise ValueError(f"n_bins must be >= 2, got {n_bins}")
    lo, hi = float(value_range[0]), float(value_range[1])
    if not lo < hi:
        raise ValueError(f"range must satisfy lo < hi, got ({lo}, {hi})")
    clipped = np.clip(samples, lo, hi)
    counts, edges = np.histogram(clipped, bins=n_bins, range=(lo, hi))
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, counts / samples.size


def ks_distance(a, b) -> float:
    """Sup-norm distance between the empirical CDFs of two sample sets."""
    a = np.sort(np.asarray(a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("empty input")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def occupied_band_bins(spectral: SpectralMatrix, coverage: float = DEFAULT_COVERAGE) -> np.ndarray:
    """Smallest set of bins holding ``coverage`` of total spectral energy.

    Bins are taken greedily by descending energy (ties broken by bin index);
    the returned indices are sorted ascending.
    """
    if not 0.0 < coverage <= 1.0:
        raise ValueError(f"coverage must lie in (0, 1], got {coverage}")
    energies = spectral.bin_energies()
    total = energies.sum()
    if total <= 0.0:
        raise ValueError("all-zero spectrum has no occupied band")
    order = np.argsort(-energies, kind="stable")
    cumulative = np.cumsum(energies[order])
    n_needed = int(np.searchsorted(cumulative, coverage * total)) + 1
    return np.sort(order[:n_needed])


def band_bin_indices(f_lo: float, f_hi: float, n_fft: int) -> np.ndarray:
    """DFT bins whose center frequency (as a fraction of fs) falls in [f_lo, f_hi]."""
    k = np.arange(n_fft)
    freqs = np.where(k <= n_fft // 2, k / n_fft, k / n_fft - 1.0)
    return np.flatnonzero((freqs >= f_lo) & (freqs <= f_hi))


def in_band_fraction(packets: np.ndarray, bins: np.ndarray) -> float:
    """Fraction of a packet matrix's spectral energy inside the given bins."""
    energies = spectral_matrix(packets).bin_energies()
    total = energies.sum()
    if total <= 0.0:
        raise ValueError("all-zero packets carry no energy")
    return float(energies[bins].sum() / total)


@dataclass
class ValidationConfig:
    """Validation knobs; defaults match the calibrated report thresholds."""

    frame: int = 0
    n_gen: int | None = None
    snr_db: float | None = None
    coverage: float = DEFAULT_COVERAGE
    n_bins: int = DEFAULT_N_BINS
    sigma_span: float = DEFAULT_SIGMA_SPAN
    band_ratio_min: float = DEFAULT_BAND_RATIO_MIN
    accuracy_band: tuple = DEFAULT_ACCURACY_BAND
    seed: int = 0
    allow_empty_log: bool = False


@dataclass
class ValidationReport:
    """Validation numbers plus the thresholds that turn them into a verdict."""

    ks_proto_vs_gen: float
    ks_proto_vs_noise: float
    band_energy_fraction_gen: float
    band_energy_fraction_noise: float
    mean_d_accuracy: float
    packet_correlation_gen: float
    band_ratio_min: float = DEFAULT_BAND_RATIO_MIN
    accuracy_band: tuple = DEFAULT_ACCURACY_BAND
    criteria: dict = field(default_factory=dict)
    verdict: str = ""
    tables: dict | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.accuracy_band = (float(self.accuracy_band[0]), float(self.accuracy_band[1]))
        derived = self.derive_criteria()
        if not self.criteria:
            self.criteria = derived
        elif self.criteria != derived:
            raise ValueError("stored criteria disagree with the stored numbers")
        expected = "pass" if all(derived.values()) else "fail"
        if not self.verdict:
            self.verdict = expected
        elif self.verdict != expected:
            raise ValueError(f"stored verdict {self.verdict!r} disagrees with the stored numbers")

    def derive_criteria(self) -> dict:
        return {
            "ks_gen_below_noise": bool(self.ks_proto_vs_gen < self.ks_proto_vs_noise),
            "band_fraction_ratio": bool(
                self.band_energy_fraction_gen >= self.band_ratio_min * self.band_energy_fraction_noise
            ),
            "accuracy_in_band": bool(
                self.accuracy_band[0] < self.mean_d_accuracy < self.accuracy_band[1]
            ),
        }

    def to_text(self) -> str:
        pairs = {
            "ks_proto_vs_gen": repr(self.ks_proto_vs_gen),
            "ks_proto_vs_noise": repr(self.ks_proto_vs_noise),
            "band_energy_fraction_gen": repr(self.band_energy_fraction_gen),
            "band_energy_fraction_noise": repr(self.band_energy_fraction_noise),
            "mean_d_accuracy": repr(self.mean_d_accuracy),
            "packet_correlation_gen": repr(self.packet_correlation_gen),
            "band_ratio_min": repr(self.band_ratio_min),
            "accuracy_band_low": repr(self.accuracy_band[0]),
            "accuracy_band_high": repr(self.accuracy_band[1]),
        }
        for name in _CRITERIA:
            pairs[f"criterion_{name}"] = "true" if self.criteria[name] else "false"
        pairs["verdict"] = self.verdict
        return format_kv(pairs)

    @classmethod
    def from_text(cls, text: str) -> "ValidationReport":
        pairs = parse_kv(text)
        criteria = {name: pairs[f"criterion_{name}"] == "true" for name in _CRITERIA}
        return cls(
            ks_proto_vs_gen=float(pairs["ks_proto_vs_gen"]),
            ks_proto_vs_noise=float(pairs["ks_proto_vs_noise"]),
            band_energy_fraction_gen=float(pairs["band_energy_fraction_gen"]),
            band_energy_fraction_noise=float(pairs["band_energy_fraction_noise"]),
            mean_d_accuracy=float(pairs["mean_d_accuracy"]),
            packet_correlation_gen=float(pairs["packet_correlation_gen"]),
            band_ratio_min=float(pairs["band_ratio_min"]),
            accuracy_band=(float(pairs["accuracy_band_low"]), float(pairs["accuracy_band_high"])),
            criteria=criteria,
            verdict=pairs["verdict"],
        )


def _pooled_values(packets: np.ndarray) -> np.ndarray:
    packets = np.asarray(packets)
    return np.concatenate([packets.real.ravel(), packets.imag.ravel()])


def _as_generator_net(model) -> GeneratorNet:
    if isinstance(model, GanModel):
        return model.generator
    if isinstance(model, GeneratorNet):
        return model
    raise ValueError(f"expected a GanModel or GeneratorNet, got {type(model).__name__}")


def _mean_pairwise_correlation(packets: np.ndarray, max_packets: int = 256) -> float:
    """Mean absolute pairwise Pearson correlation between packets (diversity stat)."""
    rows = np.asarray(packets)[:max_packets]
    rows = np.concatenate([rows.real, rows.imag], axis=1)
    if rows.shape[0] < 2:
        return 0.0
    centered = rows - rows.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(centered, axis=1)
    norms[norms == 0.0] = 1.0
    unit = centered / norms[:, None]
    corr = unit @ unit.T
    upper = np.triu_indices(corr.shape[0], k=1)
    return float(np.mean(np.abs(corr[upper])))


def _frame_packets(rec: IQRecording, n_fft: int) -> np.ndarray:
    n_packets = rec.n_samples // n_fft
    if n_packets < 1:
        raise ValueError(f"recording too short for one {n_fft}-sample packet")
    return rec.samples[: n_packets * n_fft].reshape(n_packets, n_fft)


def validate(model, tensor: PrototypeTensor, stats: FrameStats, log,
             cfg: ValidationConfig | None = None, generated=None,
             with_tables: bool = False) -> ValidationReport:
    """Score a trained model pair against its prototype.

    ``model`` is the ``(i_model, q_model)`` pair (GanModel or GeneratorNet
    each). ``log`` is one TrainingLog or a sequence of them; the mean
    discriminator accuracy over the final quartile of each non-empty log is
    averaged. ``generated`` optionally supplies an already-synthesized
    recording (or complex packet matrix); otherwise ``cfg.n_gen`` packets
    (default: the prototype's packet count) are generated in-process.
    """
    cfg = cfg or ValidationConfig()
    if not tensor.normalized:
        raise ValueError("tensor must be normalized (validate uses stats to denormalize)")
    if not 0 <= cfg.frame < tensor.n_frames:
        raise ValueError(f"frame {cfg.frame} out of range [0, {tensor.n_frames})")
    try:
        i_model, q_model = model
    except (TypeError, ValueError) as exc:
        raise ValueError("model must be the (i_model, q_model) pair") from exc
    i_gen = _as_generator_net(i_model)
    q_gen = _as_generator_net(q_model)
    n_fft = tensor.packet_len
    if i_gen.n_fft != n_fft or q_gen.n_fft != n_fft:
        raise ValueError("model packet length does not match tensor")

    logs = [log] if isinstance(log, TrainingLog) else list(log)
    populated = [l for l in logs if len(l) > 0]
    if populated:
        quartiles = [l.mean_accuracy(last_n=-(-len(l) // 4)) for l in populated]
        mean_accuracy = float(np.mean(quartiles))
    elif cfg.allow_empty_log:
        mean_accuracy = 0.0
    else:
        raise ValueError("empty training log")

    frame_power = float(stats.per_frame_power[cfg.frame])
    proto_packets = denormalize(tensor.complex_packets(cfg.frame), frame_power)

    if generated is None:
        n_gen = cfg.n_gen or tensor.n_packets
        if cfg.snr_db is not None:
            snr_db = cfg.snr_db
        elif isinstance(i_model, GanModel):
            snr_db = 0.5 * sum(i_model.config.snr_range_db)
        else:
            snr_db = 0.0
        i_mat = generate_packets(i_gen, n_gen, snr_db, substream(cfg.seed, "validate", "latent", "I"))
        q_mat = generate_packets(q_gen, n_gen, snr_db, substream(cfg.seed, "validate", "latent", "Q"))
        gen_packets = assemble_iq(i_mat, q_mat, frame_power)
    elif isinstance(generated, IQRecording):
        gen_packets = _frame_packets(generated, n_fft)
    else:
        gen_packets = np.asarray(generated, dtype=np.complex128)
        if gen_packets.ndim != 2 or gen_packets.shape[1] != n_fft:
            raise ValueError(f"generated packets must be [P, {n_fft}]")

    noise_rng = substream(cfg.seed, "validate", "noise")
    proto_power = float(np.mean(np.abs(proto_packets) ** 2))
    noise_packets = np.sqrt(proto_power / 2.0) * (
        noise_rng.standard_normal(gen_packets.shape) + 1j * noise_rng.standard_normal(gen_packets.shape)
    )

    proto_values = _pooled_values(proto_packets)
    ks_gen = ks_distance(proto_values, _pooled_values(gen_packets))
    ks_noise = ks_distance(proto_values, _pooled_values(noise_packets))

    proto_spectral = spectral_matrix(proto_packets)
    band = occupied_band_bins(proto_spectral, cfg.coverage)
    raw_proto = in_band_fraction(proto_packets, band)
    raw_gen = in_band_fraction(gen_packets, band)
    raw_noise = in_band_fraction(noise_packets, band)
    bef_gen = min(1.0, raw_gen / raw_proto)
    bef_noise = min(1.0, raw_noise / raw_proto)

    report = ValidationReport(
        ks_proto_vs_gen=ks_gen,
        ks_proto_vs_noise=ks_noise,
        band_energy_fraction_gen=bef_gen,
        band_energy_fraction_noise=bef_noise,
        mean_d_accuracy=mean_accuracy,
        packet_correlation_gen=_mean_pairwise_correlation(gen_packets),
        band_ratio_min=cfg.band_ratio_min,
        accuracy_band=cfg.accuracy_band,
    )
    if with_tables:
        sigma = float(np.std(proto_values))
        span = cfg.sigma_span * (sigma if sigma > 0.0 else 1.0)
        centers, proto_mass = empirical_pdf(proto_values, cfg.n_bins, (-span, span))
        _, gen_mass = empirical_pdf(_pooled_values(gen_packets), cfg.n_bins, (-span, span))
        _, noise_mass = empirical_pdf(_pooled_values(noise_packets), cfg.n_bins, (-span, span))
        report.tables = {
            "histogram": (centers, proto_mass, gen_mass, noise_mass),
            "spectrum_prototype": proto_spectral,
            "spectrum_generated": spectral_matrix(gen_packets),
            "spectrum_noise": spectral_matrix(noise_packets),
        }
    return report
