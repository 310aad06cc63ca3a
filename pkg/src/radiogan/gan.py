"""The chained generator/discriminator pair and its adversarial training loop.

The generator is a small tanh MLP from latent packets to synthetic packets;
the discriminator is a conv1d front end followed by dense/dropout stages and
a two-class softmax. Latent noise is Gaussian with a per-epoch variance set
by a virtual SNR drawn uniformly from a configured range, real-class targets
are smoothed one-sidedly to ``1 - alpha``, and both nets update with Adam.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .kvfile import format_kv, parse_kv
from .net.adam import AdamState, adam_step
from .net.checkpoint import CheckpointError, load_stacks, save_stacks
from .net.layers import (
    Conv1DLayer,
    DenseLayer,
    DropoutLayer,
    FlattenLayer,
    net_backward,
    net_forward,
    net_params,
    set_net_params,
)
from .seeding import as_generator, substream

PROB_EPS = 1e-7
REAL, FAKE = 0, 1  # softmax class indices

GENERATOR_WIDTH = 128
GENERATOR_DECAY = 1e-3
GENERATOR_LR = 0.011
DISCRIMINATOR_WIDTH = 32
KERNEL_COUNT = 32
KERNEL_LEN = 128
DISCRIMINATOR_DECAY = 1e-4
DISCRIMINATOR_LR = 1e-4
DROPOUT_RATE = 0.5

COMPONENTS = ("I", "Q")


class TrainingDiverged(RuntimeError):
    """Raised when a loss or gradient goes non-finite; carries the partial log."""

    def __init__(self, message: str, epoch: int, log: "TrainingLog"):
        super().__init__(message)
        self.epoch = epoch
        self.log = log


class GeneratorNet:
    """Latent packet -> synthetic packet MLP; output bounded to (-1, 1)."""

    def __init__(self, layers, n_fft: int):
        if not layers:
            raise ValueError("generator has no layers")
        if layers[0].fan_in != n_fft or layers[-1].fan_out != n_fft:
            raise ValueError(
                f"generator input/output widths must equal n_fft={n_fft}, "
                f"got {layers[0].fan_in}/{layers[-1].fan_out}"
            )
        self.layers = list(layers)
        self.n_fft = int(n_fft)

    @classmethod
    def build(cls, n_fft, seed, width=GENERATOR_WIDTH, weight_decay=GENERATOR_DECAY):
        if n_fft < 2:
            raise ValueError(f"n_fft must be >= 2, got {n_fft}")
        rng = seed if isinstance(seed, np.random.Generator) else substream(seed, "generator-init")
        layers = [
            DenseLayer.create(n_fft, width, "tanh", rng),
            DenseLayer.create(width, width, "tanh", rng, weight_decay_lambda=weight_decay),
            DenseLayer.create(width, n_fft, "tanh", rng),
        ]
        return cls(layers, n_fft)

    def forward(self, z, train=False, rng=None):
        return net_forward(self.layers, z, train=train, rng=rng)

    def predict(self, z) -> np.ndarray:
        return self.forward(z)[0]

    def params(self):
        return net_params(self.layers)

    def set_params(self, params):
        set_net_params(self.layers, params)


class DiscriminatorNet:
    """Packet -> [P(real), P(fake)] classifier with conv front end."""

    def __init__(self, layers, n_fft: int):
        if not layers:
            raise ValueError("discriminator has no layers")
        if not isinstance(layers[0], Conv1DLayer):
            raise ValueError("discriminator must start with the conv1d layer")
        if layers[-1].fan_out != 2 or layers[-1].activation != "softmax":
            raise ValueError("discriminator must end in a 2-way softmax")
        self.layers = list(layers)
        self.n_fft = int(n_fft)

    @classmethod
    def build(
        cls,
        n_fft,
        seed,
        n_kernels=KERNEL_COUNT,
        kernel_len=KERNEL_LEN,
        width=DISCRIMINATOR_WIDTH,
        dropout_rate=DROPOUT_RATE,
        weight_decay=DISCRIMINATOR_DECAY,
    ):
        if n_fft < kernel_len:
            raise ValueError(f"n_fft={n_fft} shorter than conv kernel ({kernel_len})")
        rng = seed if isinstance(seed, np.random.Generator) else substream(seed, "discriminator-init")
        conv_out = n_fft - kernel_len + 1
        layers = [
            Conv1DLayer.create(n_kernels, kernel_len, rng),
            DenseLayer.create(conv_out, width, "relu", rng),
            DropoutLayer(dropout_rate),
            FlattenLayer(),
            DenseLayer.create(n_kernels * width, width, "identity", rng, weight_decay_lambda=weight_decay),
            DropoutLayer(dropout_rate),
            DenseLayer.create(width, width, "identity", rng, weight_decay_lambda=weight_decay),
            DropoutLayer(dropout_rate),
            DenseLayer.create(width, width, "identity", rng),
            DropoutLayer(dropout_rate),
            DenseLayer.create(width, 2, "softmax", rng),
        ]
        return cls(layers, n_fft)

    def forward(self, x, train=False, rng=None):
        return net_forward(self.layers, x, train=train, rng=rng)

    def predict_proba(self, x) -> np.ndarray:
        return self.forward(x)[0]

    def params(self):
        return net_params(self.layers)

    def set_params(self, params):
        set_net_params(self.layers, params)


@dataclass
class TrainConfig:
    """Training hyperparameters; published defaults unless noted.

    ``eta_*``, ``dropout_rate``, ``lambda_*`` mirror the published
    architecture tables; ``lr_decay`` (linear, per run, default off) and the
    optional accuracy-band early stop are artifact knobs.
    """

    n_epoch: int = 1000
    n_epoch_pretrain: int = 1
    s_batch: int = 300
    s_minibatch_pretrain: int = 32
    n_examples: int = 128
    label_smoothing_alpha: float = 0.2
    snr_range_db: tuple = (-30.0, -24.0)
    seed: int = 0
    eta_g: float = GENERATOR_LR
    eta_d: float = DISCRIMINATOR_LR
    dropout_rate: float = DROPOUT_RATE
    lambda_g: float = GENERATOR_DECAY
    lambda_d: float = DISCRIMINATOR_DECAY
    lr_decay: float = 0.0
    early_stop_band: tuple | None = None
    early_stop_patience: int = 50

    def __post_init__(self) -> None:
        self.snr_range_db = (float(self.snr_range_db[0]), float(self.snr_range_db[1]))
        if self.n_epoch < 0 or self.n_epoch_pretrain < 0:
            raise ValueError("epoch counts must be >= 0")
        if self.s_batch < 1 or self.s_minibatch_pretrain < 1:
            raise ValueError("batch sizes must be >= 1")
        if self.n_examples < 1:
            raise ValueError("n_examples must be >= 1")
        if not 0.0 <= self.label_smoothing_alpha < 0.5:
            raise ValueError(f"label_smoothing_alpha must lie in [0, 0.5), got {self.label_smoothing_alpha}")
        if self.snr_range_db[0] > self.snr_range_db[1]:
            raise ValueError(f"snr_range_db must be ordered, got {self.snr_range_db}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must lie in [0, 1)")
        if self.eta_g <= 0 or self.eta_d <= 0:
            raise ValueError("learning rates must be positive")
        if self.lambda_g < 0 or self.lambda_d < 0:
            raise ValueError("weight decays must be >= 0")
        if not 0.0 <= self.lr_decay < 1.0:
            raise ValueError("lr_decay must lie in [0, 1)")
        if self.early_stop_band is not None:
            self.early_stop_band = (float(self.early_stop_band[0]), float(self.early_stop_band[1]))
            if not 0.0 <= self.early_stop_band[0] < self.early_stop_band[1] <= 1.0:
                raise ValueError(f"early_stop_band must be an ordered sub-range of [0,1]")
        if self.early_stop_patience < 1:
            raise ValueError("early_stop_patience must be >= 1")

    def validate_for(self, n_fft: int) -> None:
        """Check the batch-size invariant against a packet length."""
        smallest = min(KERNEL_LEN, DISCRIMINATOR_WIDTH, GENERATOR_WIDTH)
        if not smallest < self.s_batch < n_fft:
            raise ValueError(
                f"s_batch={self.s_batch} must satisfy {smallest} < s_batch < n_fft={n_fft}"
            )


def _range_to_text(pair) -> str:
    return f"{pair[0]!r}:{pair[1]!r}"


def _range_from_text(text: str) -> tuple:
    lo, _, hi = text.partition(":")
    return (float(lo), float(hi))


def config_to_text(cfg: TrainConfig) -> str:
    """Serialize a config to key=value text (field names as keys)."""
    pairs = {}
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name in ("snr_range_db", "early_stop_band"):
            pairs[f.name] = "none" if value is None else _range_to_text(value)
        elif isinstance(value, float):
            pairs[f.name] = repr(value)
        else:
            pairs[f.name] = str(value)
    return format_kv(pairs)


def config_from_pairs(pairs: dict, base: TrainConfig | None = None) -> TrainConfig:
    """Build a config from parsed key=value pairs over optional base defaults."""
    known = {f.name: f for f in fields(TrainConfig)}
    unknown = sorted(set(pairs) - set(known))
    if unknown:
        raise ValueError(f"unknown config keys: {unknown}")
    kwargs = {}
    for name, raw in pairs.items():
        if name in ("snr_range_db", "early_stop_band"):
            kwargs[name] = None if raw.lower() == "none" else _range_from_text(raw)
        elif name in ("n_epoch", "n_epoch_pretrain", "s_batch", "s_minibatch_pretrain",
                      "n_examples", "seed", "early_stop_patience"):
            kwargs[name] = int(raw)
        else:
            kwargs[name] = float(raw)
    if base is None:
        return TrainConfig(**kwargs)
    return replace(base, **kwargs)


def config_from_text(text: str, base: TrainConfig | None = None) -> TrainConfig:
    return config_from_pairs(parse_kv(text), base=base)


@dataclass
class TrainingLog:
    """Per-epoch training metrics, appended once per completed epoch."""

    d_loss: list = field(default_factory=list)
    g_loss: list = field(default_factory=list)
    d_accuracy: list = field(default_factory=list)
    snr_db: list = field(default_factory=list)
    wall_ms: list = field(default_factory=list)

    CSV_HEADER = "epoch,d_loss,g_loss,d_accuracy,snr_db,wall_ms"

    def __len__(self) -> int:
        return len(self.d_loss)

    def append(self, d_loss, g_loss, d_accuracy, snr_db, wall_ms) -> None:
        if not 0.0 <= d_accuracy <= 1.0:
            raise ValueError(f"accuracy must lie in [0,1], got {d_accuracy}")
        self.d_loss.append(float(d_loss))
        self.g_loss.append(float(g_loss))
        self.d_accuracy.append(float(d_accuracy))
        self.snr_db.append(float(snr_db))
        self.wall_ms.append(int(wall_ms))

    def mean_accuracy(self, last_n: int | None = None) -> float:
        if len(self) == 0:
            raise ValueError("empty log")
        acc = self.d_accuracy if last_n is None else self.d_accuracy[-last_n:]
        return float(np.mean(acc))

    def to_csv_text(self) -> str:
        lines = [self.CSV_HEADER]
        for epoch in range(len(self)):
            lines.append(
                f"{epoch},{self.d_loss[epoch]!r},{self.g_loss[epoch]!r},"
                f"{self.d_accuracy[epoch]!r},{self.snr_db[epoch]!r},{self.wall_ms[epoch]}"
            )
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        from pathlib import Path

        Path(path).write_text(self.to_csv_text(), encoding="utf-8")

    @classmethod
    def from_csv_text(cls, text: str) -> "TrainingLog":
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines or lines[0] != cls.CSV_HEADER:
            raise ValueError("not a training log CSV")
        log = cls()
        for expected, line in enumerate(lines[1:]):
            cells = line.split(",")
            if len(cells) != 6:
                raise ValueError(f"bad row: {line!r}")
            if int(cells[0]) != expected:
                raise ValueError(f"non-contiguous epoch column at {line!r}")
            log.append(float(cells[1]), float(cells[2]), float(cells[3]), float(cells[4]), int(cells[5]))
        return log

    @classmethod
    def from_csv(cls, path) -> "TrainingLog":
        from pathlib import Path

        return cls.from_csv_text(Path(path).read_text(encoding="utf-8"))


@dataclass
class GanModel:
    """A trained (or initialized) generator/discriminator pair plus context."""

    generator: GeneratorNet
    discriminator: DiscriminatorNet
    generator_opt: AdamState | None
    discriminator_opt: AdamState | None
    config: TrainConfig
    component: str = "I"
    frame: int = 0

    @property
    def n_fft(self) -> int:
        return self.generator.n_fft


def save_gan(path, model: GanModel) -> None:
    extras = {
        "component": model.component,
        "frame": str(model.frame),
        "n_fft": str(model.n_fft),
    }
    text = config_to_text(model.config) + format_kv(extras)
    save_stacks(
        path,
        [model.generator.layers, model.discriminator.layers],
        [model.generator_opt, model.discriminator_opt],
        text,
    )


def load_gan(path) -> GanModel:
    stacks, opts, text = load_stacks(path)
    if len(stacks) != 2:
        raise CheckpointError(f"{path}: expected generator+discriminator, found {len(stacks)} stacks")
    pairs = parse_kv(text)
    component = pairs.pop("component", "I")
    frame = int(pairs.pop("frame", "0"))
    n_fft = int(pairs.pop("n_fft"))
    cfg = config_from_pairs(pairs)
    generator = GeneratorNet(stacks[0], n_fft)
    discriminator = DiscriminatorNet(stacks[1], n_fft)
    return GanModel(generator, discriminator, opts[0], opts[1], cfg, component, frame)


def latent_noise_variance(power: float, snr_db: float) -> float:
    """Gaussian latent variance for a virtual SNR against a signal power.

    ``sigma^2 = 10 ** ((10*log10(power) - snr_db) / 10)``: at 0 dB the noise
    power equals the signal power; each -10 dB multiplies it by 10.
    """
    if power <= 0.0:
        raise ValueError(f"power must be positive, got {power}")
    return float(10.0 ** ((10.0 * np.log10(power) - snr_db) / 10.0))


def sample_latent(n: int, n_fft: int, sigma2: float, seed) -> np.ndarray:
    """Draw an [n, n_fft] matrix of i.i.d. zero-mean Gaussian latent packets."""
    if sigma2 <= 0.0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    if n < 1 or n_fft < 1:
        raise ValueError("n and n_fft must be >= 1")
    rng = as_generator(seed)
    return rng.normal(0.0, np.sqrt(sigma2), size=(n, n_fft))


def _clamp(p) -> np.ndarray:
    return np.clip(np.asarray(p, dtype=np.float64), PROB_EPS, 1.0 - PROB_EPS)


def discriminator_loss(d_real, d_fake, alpha: float = 0.0) -> float:
    """Half-weighted cross-entropy of real (target 1-alpha) and fake (target 0)."""
    if not 0.0 <= alpha < 0.5:
        raise ValueError(f"alpha must lie in [0, 0.5), got {alpha}")
    pr = _clamp(d_real)
    pf = _clamp(d_fake)
    real_term = -np.mean((1.0 - alpha) * np.log(pr) + alpha * np.log(1.0 - pr))
    fake_term = -np.mean(np.log(1.0 - pf))
    return float(0.5 * (real_term + fake_term))


def generator_loss(d_fake) -> float:
    """Non-saturating objective: -1/2 * mean log D(G(z))."""
    return float(-0.5 * np.mean(np.log(_clamp(d_fake))))


def saturating_generator_loss(d_real, d_fake) -> float:
    """The zero-sum (minimax) generator objective; equals -discriminator_loss at alpha=0."""
    pr = _clamp(d_real)
    pf = _clamp(d_fake)
    return float(0.5 * np.mean(np.log(pr)) + 0.5 * np.mean(np.log(1.0 - pf)))


def discriminator_accuracy(d_real, d_fake) -> float:
    """Fraction of correct hard decisions at threshold 0.5; ties are incorrect."""
    pr = np.asarray(d_real, dtype=np.float64).ravel()
    pf = np.asarray(d_fake, dtype=np.float64).ravel()
    if pr.size == 0 or pf.size == 0:
        raise ValueError("empty batch")
    correct = int(np.sum(pr > 0.5)) + int(np.sum(pf < 0.5))
    return correct / (pr.size + pf.size)


def _class_targets(n_real: int, n_fake: int, alpha: float) -> np.ndarray:
    targets = np.zeros((n_real + n_fake, 2))
    targets[:n_real, REAL] = 1.0 - alpha
    targets[:n_real, FAKE] = alpha
    targets[n_real:, FAKE] = 1.0
    return targets


def _supervised_minibatch(discriminator, opt, x, targets, dropout_rng):
    """One cross-entropy Adam step on the discriminator; returns the new state."""
    probs, caches = net_forward(discriminator.layers, x, train=True, rng=dropout_rng)
    p = _clamp(probs)
    grad = -(targets / p) / x.shape[0]
    _, grads = net_backward(discriminator.layers, caches, grad)
    new_params, opt = adam_step(net_params(discriminator.layers), grads, opt)
    set_net_params(discriminator.layers, new_params)
    return opt


def _generator_minibatch(generator, discriminator, opt, z, dropout_rng):
    """One non-saturating Adam step on the generator through the frozen discriminator."""
    fake, g_caches = net_forward(generator.layers, z)
    probs, d_caches = net_forward(discriminator.layers, fake, train=True, rng=dropout_rng)
    p_real = _clamp(probs[:, REAL])
    grad_probs = np.zeros_like(probs)
    grad_probs[:, REAL] = -0.5 / (z.shape[0] * p_real)
    grad_fake, _ = net_backward(discriminator.layers, d_caches, grad_probs)
    _, g_grads = net_backward(generator.layers, g_caches, grad_fake)
    new_params, opt = adam_step(net_params(generator.layers), g_grads, opt)
    set_net_params(generator.layers, new_params)
    return opt


def pretrain_discriminator(discriminator, prototype_frame, cfg: TrainConfig, labels=("pretrain",)):
    """Supervised warm-up: prototype packets vs raw latent noise.

    Runs ``cfg.n_epoch_pretrain`` epochs of minibatch cross-entropy updates
    (minibatch ``cfg.s_minibatch_pretrain``) with real targets ``1 - alpha``
    and noise targets 0; the generator is untouched. Returns the (mutated)
    discriminator.
    """
    packets = np.asarray(prototype_frame, dtype=np.float64)
    if packets.ndim != 2 or packets.size == 0:
        raise ValueError("prototype_frame must be a non-empty 2-D packet array")
    if cfg.n_examples > packets.shape[0]:
        raise ValueError(
            f"n_examples={cfg.n_examples} exceeds available packets ({packets.shape[0]})"
        )
    n_fft = packets.shape[1]
    lo, hi = cfg.snr_range_db
    snr_rng = substream(cfg.seed, *labels, "snr")
    latent_rng = substream(cfg.seed, *labels, "latent")
    pick_rng = substream(cfg.seed, *labels, "pick")
    shuffle_rng = substream(cfg.seed, *labels, "shuffle")
    dropout_rng = substream(cfg.seed, *labels, "dropout")
    opt = AdamState.for_params(net_params(discriminator.layers), cfg.eta_d)
    for _ in range(cfg.n_epoch_pretrain):
        snr_db = float(snr_rng.uniform(lo, hi))
        sigma2 = latent_noise_variance(1.0, snr_db)
        noise = sample_latent(cfg.n_examples, n_fft, sigma2, latent_rng)
        real = packets[pick_rng.permutation(packets.shape[0])[: cfg.n_examples]]
        pool = np.concatenate([real, noise], axis=0)
        targets = _class_targets(cfg.n_examples, cfg.n_examples, cfg.label_smoothing_alpha)
        order = shuffle_rng.permutation(pool.shape[0])
        for start in range(0, order.size, cfg.s_minibatch_pretrain):
            sel = order[start : start + cfg.s_minibatch_pretrain]
            opt = _supervised_minibatch(discriminator, opt, pool[sel], targets[sel], dropout_rng)
    return discriminator


def train(generator, discriminator, tensor, stats, component, frame, cfg: TrainConfig):
    """Adversarial training on one component of one frame.

    Per epoch: draw a virtual SNR uniformly from ``cfg.snr_range_db``, set the
    latent variance against unit power (frames are normalized), sample
    ``n_examples`` latent packets and as many prototype packets (without
    replacement, reshuffled each epoch), update the discriminator on the
    shuffled labeled pool in ceil-division minibatches of ``s_batch``, then
    update the generator through the frozen discriminator (dropout active) on
    the non-saturating objective. Metrics are evaluated after both updates in
    inference mode and appended to the log. Returns ``(GanModel, TrainingLog)``.
    """
    if component not in COMPONENTS:
        raise ValueError(f"component must be 'I' or 'Q', got {component!r}")
    if not tensor.normalized:
        raise ValueError("tensor must be normalized before training")
    if not 0 <= frame < tensor.n_frames:
        raise ValueError(f"frame {frame} out of range [0, {tensor.n_frames})")
    if stats.n_frames != tensor.n_frames:
        raise ValueError("stats do not match tensor")
    n_fft = tensor.packet_len
    cfg.validate_for(n_fft)
    if generator.n_fft != n_fft or discriminator.n_fft != n_fft:
        raise ValueError("model widths do not match tensor packet length")
    if cfg.n_examples > tensor.n_packets:
        raise ValueError(
            f"n_examples={cfg.n_examples} exceeds packets per frame ({tensor.n_packets})"
        )

    packets = tensor.component_packets(frame, component)
    lo, hi = cfg.snr_range_db
    snr_rng = substream(cfg.seed, "train", component, "snr")
    latent_rng = substream(cfg.seed, "train", component, "latent")
    pick_rng = substream(cfg.seed, "train", component, "pick")
    shuffle_rng = substream(cfg.seed, "train", component, "shuffle")
    dropout_rng = substream(cfg.seed, "train", component, "dropout")

    g_opt = AdamState.for_params(generator.params(), cfg.eta_g)
    d_opt = AdamState.for_params(discriminator.params(), cfg.eta_d)
    log = TrainingLog()

    for epoch in range(cfg.n_epoch):
        tic = time.perf_counter()
        if cfg.lr_decay > 0.0 and cfg.n_epoch > 1:
            scale = 1.0 - cfg.lr_decay * (epoch / (cfg.n_epoch - 1))
            d_opt = replace(d_opt, learning_rate=cfg.eta_d * scale)
            g_opt = replace(g_opt, learning_rate=cfg.eta_g * scale)

        snr_db = float(snr_rng.uniform(lo, hi))
        sigma2 = latent_noise_variance(1.0, snr_db)
        z = sample_latent(cfg.n_examples, n_fft, sigma2, latent_rng)
        real = packets[pick_rng.permutation(tensor.n_packets)[: cfg.n_examples]]
        fake = net_forward(generator.layers, z)[0]
        pool = np.concatenate([real, fake], axis=0)
        targets = _class_targets(cfg.n_examples, cfg.n_examples, cfg.label_smoothing_alpha)
        order = shuffle_rng.permutation(pool.shape[0])
        try:
            for start in range(0, order.size, cfg.s_batch):
                sel = order[start : start + cfg.s_batch]
                d_opt = _supervised_minibatch(discriminator, d_opt, pool[sel], targets[sel], dropout_rng)
            for start in range(0, cfg.n_examples, cfg.s_batch):
                zb = z[start : start + cfg.s_batch]
                g_opt = _generator_minibatch(generator, discriminator, g_opt, zb, dropout_rng)
        except ValueError as exc:
            raise TrainingDiverged(f"epoch {epoch}: {exc}", epoch, log) from exc

        d_real_p = net_forward(discriminator.layers, real)[0][:, REAL]
        regen = net_forward(generator.layers, z)[0]
        d_fake_p = net_forward(discriminator.layers, regen)[0][:, REAL]
        d_loss = discriminator_loss(d_real_p, d_fake_p, cfg.label_smoothing_alpha)
        g_loss = generator_loss(d_fake_p)
        if not (np.isfinite(d_loss) and np.isfinite(g_loss)):
            raise TrainingDiverged(
                f"non-finite loss at epoch {epoch}: d_loss={d_loss}, g_loss={g_loss}", epoch, log
            )
        accuracy = discriminator_accuracy(d_real_p, d_fake_p)
        wall_ms = int(round((time.perf_counter() - tic) * 1000.0))
        log.append(d_loss, g_loss, accuracy, snr_db, wall_ms)

        if cfg.early_stop_band is not None and len(log) >= cfg.early_stop_patience:
            window_mean = log.mean_accuracy(last_n=cfg.early_stop_patience)
            if cfg.early_stop_band[0] <= window_mean <= cfg.early_stop_band[1]:
                break

    model = GanModel(
        generator=generator,
        discriminator=discriminator,
        generator_opt=g_opt,
        discriminator_opt=d_opt,
        config=cfg,
        component=component,
        frame=frame,
    )
    return model, log
