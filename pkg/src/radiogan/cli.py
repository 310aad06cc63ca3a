"""Command-line pipeline: protogen -> train -> generate -> validate (+ inspect).

Exit codes: 0 success (and validation pass), 1 validation fail or training
divergence, 2 bad arguments or unreadable/malformed inputs. Every
artifact-producing command writes a provenance manifest beside its outputs.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .gan import (
    DiscriminatorNet,
    GanModel,
    GeneratorNet,
    TrainConfig,
    TrainingDiverged,
    TrainingLog,
    config_from_pairs,
    config_to_text,
    load_gan,
    pretrain_discriminator,
    save_gan,
    train,
)
from .iqcore import FrameStats, frame_tensor, load_iq, normalize_frames, save_iq
from .kvfile import parse_kv, read_kv, write_kv
from .manifest import write_manifest
from .protogen import MODULATIONS, SyntheticScenario, synth_prototype
from .seeding import substream
from .synthesis import (
    DEFAULT_RC_LENGTH,
    DEFAULT_ROLLOFF,
    GEN_PACKETS_PER_PROTOTYPE_PACKET,
    SynthesisConfig,
    synthesize,
)
from .validation import ValidationConfig, validate

PRESETS = {
    # Band center deliberately off fs/4: a quarter-rate carrier hits only
    # {0, +/-1} phase points and collapses the amplitude PDF to two spikes.
    "qpsk-burst": dict(
        n_samples=32768,
        occupied_band=(0.17, 0.30),
        burst_duty_cycle=0.5,
        symbol_rate_frac=1.0 / 32.0,
        modulation="qpsk",
        snr_db=30.0,
        cfo_frac=0.0,
    ),
    "tone": dict(
        n_samples=32768,
        occupied_band=(0.245, 0.255),
        burst_duty_cycle=1.0,
        symbol_rate_frac=1.0 / 16.0,
        modulation="tone",
        snr_db=40.0,
        cfo_frac=0.0,
    ),
    "multitone-burst": dict(
        n_samples=32768,
        occupied_band=(0.1, 0.4),
        burst_duty_cycle=0.5,
        symbol_rate_frac=1.0 / 16.0,
        modulation="multitone",
        snr_db=30.0,
        cfo_frac=0.0,
    ),
}

# Regularization ablation rows: each enables exactly one mechanism on the
# discriminator side (the generator keeps its published architecture).
SWEEP_CONFIGS = (
    ("none", dict(label_smoothing_alpha=0.0, dropout_rate=0.0, lambda_d=0.0)),
    ("dropout", dict(label_smoothing_alpha=0.0, dropout_rate=0.5, lambda_d=0.0)),
    ("weight_decay", dict(label_smoothing_alpha=0.0, dropout_rate=0.0, lambda_d=1e-4)),
    ("label_smoothing", dict(label_smoothing_alpha=0.2, dropout_rate=0.0, lambda_d=0.0)),
)

_INT_CONFIG_FLAGS = (
    ("epochs", "n_epoch"),
    ("pretrain_epochs", "n_epoch_pretrain"),
    ("batch", "s_batch"),
    ("examples", "n_examples"),
    ("seed", "seed"),
)
_FLOAT_CONFIG_FLAGS = (
    ("alpha", "label_smoothing_alpha"),
    ("eta_g", "eta_g"),
    ("eta_d", "eta_d"),
    ("dropout", "dropout_rate"),
    ("lambda_g", "lambda_g"),
    ("lambda_d", "lambda_d"),
    ("lr_decay", "lr_decay"),
)


def _say(args, message: str) -> None:
    if not getattr(args, "quiet", False):
        print(message)


def _parse_range(text: str) -> tuple:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    try:
        return (float(lo), float(hi))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI numbers, got {text!r}") from exc


def _manifest_path(out_path: Path) -> Path:
    return out_path.with_suffix(".manifest")


def cmd_protogen(args) -> int:
    params = dict(PRESETS[args.preset])
    if args.samples is not None:
        params["n_samples"] = args.samples
    if args.band is not None:
        params["occupied_band"] = args.band
    if args.duty is not None:
        params["burst_duty_cycle"] = args.duty
    if args.symbol_rate is not None:
        params["symbol_rate_frac"] = args.symbol_rate
    if args.modulation is not None:
        params["modulation"] = args.modulation
    if args.snr is not None:
        params["snr_db"] = args.snr
    if args.cfo is not None:
        params["cfo_frac"] = args.cfo
    scenario = SyntheticScenario(seed=args.seed, **params)
    rec = synth_prototype(scenario)
    out = Path(args.out)
    save_iq(rec, out, extra_meta=scenario.sidecar_extras())
    resolved = {"preset": args.preset, **scenario.sidecar_extras()}
    write_manifest(_manifest_path(out), "protogen", resolved, args.seed)
    _say(args, f"wrote {rec.n_samples} samples to {out} (+.meta, {_manifest_path(out).name})")
    return 0


def _resolve_train_config(args, n_fft: int) -> TrainConfig:
    file_pairs = parse_kv(Path(args.config).read_text(encoding="utf-8")) if args.config else {}
    cfg = config_from_pairs(file_pairs, base=TrainConfig())
    overrides = {}
    for flag, field_name in _INT_CONFIG_FLAGS:
        value = getattr(args, flag)
        if value is not None:
            overrides[field_name] = value
    for flag, field_name in _FLOAT_CONFIG_FLAGS:
        value = getattr(args, flag)
        if value is not None:
            overrides[field_name] = value
    if args.snr_range is not None:
        overrides["snr_range_db"] = args.snr_range
    if args.batch is None and "s_batch" not in file_pairs:
        # Desk-scale default keeping the batch-size invariant at small n_fft.
        overrides["s_batch"] = min(300, max(33, n_fft // 2))
    return replace(cfg, **overrides)


def _train_one_component(tensor, stats, component, frame, cfg):
    generator = GeneratorNet.build(
        tensor.packet_len,
        substream(cfg.seed, "init", component, "generator"),
        weight_decay=cfg.lambda_g,
    )
    discriminator = DiscriminatorNet.build(
        tensor.packet_len,
        substream(cfg.seed, "init", component, "discriminator"),
        dropout_rate=cfg.dropout_rate,
        weight_decay=cfg.lambda_d,
    )
    if cfg.n_epoch == 0:
        return GanModel(generator, discriminator, None, None, cfg, component, frame), TrainingLog()
    if cfg.n_epoch_pretrain > 0:
        pretrain_discriminator(
            discriminator,
            tensor.component_packets(frame, component),
            cfg,
            labels=("pretrain", component),
        )
    return train(generator, discriminator, tensor, stats, component, frame, cfg)


def _write_run_meta(out_dir: Path, rec, tensor, stats, frame: int, cfg: TrainConfig) -> None:
    meta = {
        "n_fft": tensor.packet_len,
        "n_frames": tensor.n_frames,
        "n_packets": tensor.n_packets,
        "frame": frame,
        "snr_low": repr(cfg.snr_range_db[0]),
        "snr_high": repr(cfg.snr_range_db[1]),
        "seed": cfg.seed,
        "sample_rate_hz": repr(rec.sample_rate_hz),
        "center_freq_hz": repr(rec.center_freq_hz),
        "rx_gain_db": repr(rec.rx_gain_db),
    }
    for i, power in enumerate(stats.per_frame_power):
        meta[f"frame_power_{i}"] = repr(float(power))
    write_kv(out_dir / "run.meta", meta)


def _run_sweep(args, rec, tensor, stats, base_cfg: TrainConfig, out_dir: Path) -> int:
    frame = args.frame
    rows = ["regularization,mean_d_accuracy,runtime_s"]
    for name, overrides in SWEEP_CONFIGS:
        cfg = replace(base_cfg, **overrides)
        sub_dir = out_dir / name
        sub_dir.mkdir(parents=True, exist_ok=True)
        tic = time.perf_counter()
        model, log = _train_one_component(tensor, stats, "I", frame, cfg)
        runtime_s = time.perf_counter() - tic
        save_gan(sub_dir / "model_i.psg", model)
        log.to_csv(sub_dir / "train_log_i.csv")
        accuracy = log.mean_accuracy() if len(log) else float("nan")
        rows.append(f"{name},{accuracy!r},{runtime_s:.3f}")
        _say(args, f"sweep {name}: mean accuracy {accuracy:.4f} in {runtime_s:.1f}s")
    (out_dir / "sweep.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    _write_run_meta(out_dir, rec, tensor, stats, frame, base_cfg)
    resolved = parse_kv(config_to_text(base_cfg))
    resolved.update({"sweep": "regularization", "n_fft": tensor.packet_len, "frame": frame})
    write_manifest(out_dir / "train.manifest", "train --sweep regularization", resolved, base_cfg.seed)
    return 0


def cmd_train(args) -> int:
    rec = load_iq(args.proto)
    tensor = frame_tensor(rec, args.nfft, args.frames)
    tensor, stats = normalize_frames(tensor)
    cfg = _resolve_train_config(args, args.nfft)
    cfg.validate_for(args.nfft)
    if cfg.n_examples > tensor.n_packets:
        raise ValueError(
            f"n_examples={cfg.n_examples} exceeds packets per frame ({tensor.n_packets}); "
            f"pass --examples {tensor.n_packets} or fewer"
        )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.sweep:
        return _run_sweep(args, rec, tensor, stats, cfg, out_dir)

    for component in ("I", "Q"):
        tic = time.perf_counter()
        try:
            model, log = _train_one_component(tensor, stats, component, args.frame, cfg)
        except TrainingDiverged as exc:
            exc.log.to_csv(out_dir / f"train_log_{component.lower()}.csv")
            print(f"error: {component}-component training diverged: {exc}", file=sys.stderr)
            return 1
        save_gan(out_dir / f"model_{component.lower()}.psg", model)
        log.to_csv(out_dir / f"train_log_{component.lower()}.csv")
        if len(log):
            _say(
                args,
                f"{component}: {len(log)} epochs in {time.perf_counter() - tic:.1f}s, "
                f"final-quartile accuracy {log.mean_accuracy(last_n=-(-len(log) // 4)):.4f}",
            )
        else:
            _say(args, f"{component}: wrote initialized (untrained) checkpoint")
    _write_run_meta(out_dir, rec, tensor, stats, args.frame, cfg)
    resolved = parse_kv(config_to_text(cfg))
    resolved.update({"n_fft": tensor.packet_len, "n_frames": tensor.n_frames, "frame": args.frame})
    write_manifest(out_dir / "train.manifest", "train", resolved, cfg.seed)
    return 0


def _load_run(run_dir: Path):
    meta = read_kv(run_dir / "run.meta")
    model_i = load_gan(run_dir / "model_i.psg")
    model_q = load_gan(run_dir / "model_q.psg")
    n_fft = int(meta["n_fft"])
    if model_i.n_fft != n_fft or model_q.n_fft != n_fft:
        raise ValueError(
            f"checkpoint/nfft mismatch: run metadata says {n_fft}, models are "
            f"{model_i.n_fft}/{model_q.n_fft}"
        )
    powers = [float(meta[f"frame_power_{i}"]) for i in range(int(meta["n_frames"]))]
    stats = FrameStats(np.asarray(powers))
    return meta, model_i, model_q, stats


def cmd_generate(args) -> int:
    run_dir = Path(args.run_dir)
    meta, model_i, model_q, stats = _load_run(run_dir)
    n_fft = int(meta["n_fft"])
    n_gen = args.ngen if args.ngen is not None else int(meta["n_packets"]) * GEN_PACKETS_PER_PROTOTYPE_PACKET
    snr_db = args.snr if args.snr is not None else 0.5 * (float(meta["snr_low"]) + float(meta["snr_high"]))
    frame = args.frame if args.frame == "random" else int(args.frame)
    cfg = SynthesisConfig(
        n_gen=n_gen,
        snr_db=snr_db,
        rc_length=args.rc_length,
        rolloff=args.rolloff,
        seed=args.seed,
        sample_rate_hz=float(meta["sample_rate_hz"]),
        center_freq_hz=float(meta["center_freq_hz"]),
        rx_gain_db=float(meta["rx_gain_db"]),
    )
    rec = synthesize(model_i, model_q, cfg, stats, frame)
    out = Path(args.out)
    save_iq(
        rec,
        out,
        extra_meta={
            "n_fft": n_fft,
            "n_gen": n_gen,
            "gen_snr_db": repr(snr_db),
            "rc_length": args.rc_length,
            "rolloff": repr(args.rolloff),
            "frame": frame,
        },
    )
    resolved = {
        "run_dir": str(run_dir),
        "n_gen": n_gen,
        "snr_db": repr(snr_db),
        "rc_length": args.rc_length,
        "rolloff": repr(args.rolloff),
        "frame": frame,
    }
    write_manifest(_manifest_path(out), "generate", resolved, args.seed)
    _say(args, f"wrote {rec.n_samples} samples ({rec.duration_s:.6f}s) to {out}")
    return 0


def _write_histogram_csv(path: Path, tables: dict) -> None:
    centers, proto_mass, gen_mass, noise_mass = tables["histogram"]
    lines = ["value,prototype_mass,generated_mass,noise_mass"]
    for c, p, g, n in zip(centers, proto_mass, gen_mass, noise_mass):
        lines.append(f"{c:.8g},{p:.8g},{g:.8g},{n:.8g}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_spectrum_csv(path: Path, spectral, max_cols: int = 64) -> None:
    mags = spectral.magnitudes[:, :max_cols]
    header = "bin," + ",".join(f"packet_{i}" for i in range(mags.shape[1]))
    lines = [header]
    for k in range(mags.shape[0]):
        lines.append(str(k) + "," + ",".join(f"{v:.8g}" for v in mags[k]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_validate(args) -> int:
    run_dir = Path(args.run_dir)
    meta, model_i, model_q, stats = _load_run(run_dir)
    n_fft = int(meta["n_fft"])
    rec = load_iq(args.proto)
    tensor = frame_tensor(rec, n_fft, int(meta["n_frames"]))
    tensor, fresh_stats = normalize_frames(tensor)
    logs = [
        TrainingLog.from_csv(run_dir / "train_log_i.csv"),
        TrainingLog.from_csv(run_dir / "train_log_q.csv"),
    ]
    generated = load_iq(args.generated) if args.generated else None
    frame = args.frame if args.frame is not None else int(meta["frame"])
    cfg = ValidationConfig(
        frame=frame,
        n_gen=args.ngen,
        snr_db=0.5 * (float(meta["snr_low"]) + float(meta["snr_high"])),
        seed=args.seed,
        allow_empty_log=True,
    )
    report = validate(
        (model_i, model_q), tensor, fresh_stats, logs, cfg, generated=generated, with_tables=True
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.txt").write_text(report.to_text(), encoding="utf-8")
    _write_histogram_csv(out_dir / "histogram.csv", report.tables)
    _write_spectrum_csv(out_dir / "spectrum_prototype.csv", report.tables["spectrum_prototype"])
    _write_spectrum_csv(out_dir / "spectrum_generated.csv", report.tables["spectrum_generated"])
    _write_spectrum_csv(out_dir / "spectrum_noise.csv", report.tables["spectrum_noise"])
    resolved = {
        "run_dir": str(run_dir),
        "frame": frame,
        "generated": args.generated or "",
        "coverage": repr(cfg.coverage),
        "band_ratio_min": repr(cfg.band_ratio_min),
        "accuracy_band": f"{cfg.accuracy_band[0]}:{cfg.accuracy_band[1]}",
    }
    write_manifest(out_dir / "validate.manifest", "validate", resolved, args.seed)
    _say(args, f"verdict: {report.verdict}")
    for name, ok in report.criteria.items():
        _say(args, f"  {name}: {'ok' if ok else 'FAILED'}")
    _say(
        args,
        f"  ks gen/noise: {report.ks_proto_vs_gen:.4f}/{report.ks_proto_vs_noise:.4f}; "
        f"band gen/noise: {report.band_energy_fraction_gen:.4f}/{report.band_energy_fraction_noise:.4f}; "
        f"accuracy: {report.mean_d_accuracy:.4f}",
    )
    return 0 if report.verdict == "pass" else 1


def cmd_inspect(args) -> int:
    rec = load_iq(args.infile)
    dc = np.mean(rec.samples)
    print(f"file            {args.infile}")
    print(f"samples         {rec.n_samples}")
    print(f"sample_rate_hz  {rec.sample_rate_hz}")
    print(f"duration_s      {rec.duration_s:.9g}")
    print(f"center_freq_hz  {rec.center_freq_hz}")
    print(f"rx_gain_db      {rec.rx_gain_db}")
    print(f"mean_power      {rec.mean_power():.9g}")
    print(f"peak_magnitude  {np.max(np.abs(rec.samples)):.9g}")
    print(f"dc_offset       {dc.real:.6g}{dc.imag:+.6g}j")
    return 0


def _add_common(sub) -> None:
    sub.add_argument("--seed", type=int, default=None, help="run seed (default 0)")
    sub.add_argument("--quiet", action="store_true", help="suppress progress output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radiogan",
        description="Train a GAN on a recorded I/Q prototype and synthesize lookalike signals.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("protogen", help="synthesize a ground-truth prototype recording")
    p.add_argument("--preset", choices=sorted(PRESETS), default="qpsk-burst")
    p.add_argument("--out", required=True, help="output I/Q payload path")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--band", type=_parse_range, default=None, metavar="LO:HI",
                   help="occupied band as fractions of fs (use --band=LO:HI)")
    p.add_argument("--duty", type=float, default=None, help="burst duty cycle in (0,1]")
    p.add_argument("--symbol-rate", type=float, default=None, help="symbols per sample")
    p.add_argument("--modulation", choices=MODULATIONS, default=None)
    p.add_argument("--snr", type=float, default=None, help="capture SNR in dB (inf = noiseless)")
    p.add_argument("--cfo", type=float, default=None, help="carrier offset as fraction of fs")
    _add_common(p)
    p.set_defaults(func=cmd_protogen)

    p = sub.add_parser("train", help="train the I/Q model pair on a prototype")
    p.add_argument("--proto", required=True, help="prototype I/Q payload")
    p.add_argument("--out-dir", required=True, help="run directory for checkpoints and logs")
    p.add_argument("--nfft", type=int, default=2048, help="packet length (default 2048)")
    p.add_argument("--frames", type=int, default=2, help="frame count (default 2)")
    p.add_argument("--frame", type=int, default=0, help="training frame index (default 0)")
    p.add_argument("--config", default=None, help="key=value config file (flags override it)")
    p.add_argument("--epochs", type=int, default=None, help="adversarial epochs (default 1000)")
    p.add_argument("--pretrain-epochs", type=int, default=None)
    p.add_argument("--batch", type=int, default=None,
                   help="minibatch size (default min(300, max(33, nfft//2)))")
    p.add_argument("--examples", type=int, default=None, help="packets per epoch side (default 128)")
    p.add_argument("--alpha", type=float, default=None, help="one-sided label smoothing (default 0.2)")
    p.add_argument("--snr-range", type=_parse_range, default=None, metavar="LO:HI",
                   help="virtual SNR range in dB (use --snr-range=-30:-24)")
    p.add_argument("--eta-g", type=float, default=None, help="generator learning rate")
    p.add_argument("--eta-d", type=float, default=None, help="discriminator learning rate")
    p.add_argument("--dropout", type=float, default=None, help="discriminator dropout rate")
    p.add_argument("--lambda-g", type=float, default=None, help="generator weight decay")
    p.add_argument("--lambda-d", type=float, default=None, help="discriminator weight decay")
    p.add_argument("--lr-decay", type=float, default=None, help="linear LR decay over the run")
    p.add_argument("--sweep", choices=["regularization"], default=None,
                   help="run the regularization ablation instead of a plain run")
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="synthesize a pseudo-radio-signal from a trained run")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--out", required=True, help="output I/Q payload path")
    p.add_argument("--ngen", type=int, default=None, help="packet count (default 20 x trained N_p)")
    p.add_argument("--snr", type=float, default=None,
                   help="latent SNR in dB (default: training range midpoint)")
    p.add_argument("--rc-length", type=int, default=DEFAULT_RC_LENGTH)
    p.add_argument("--rolloff", type=float, default=DEFAULT_ROLLOFF)
    p.add_argument("--frame", default="random", help='frame index for power, or "random"')
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="score generated output against the prototype")
    p.add_argument("--proto", required=True)
    p.add_argument("--run-dir", required=True)
    p.add_argument("--generated", default=None, help="generated I/Q payload (default: generate in-process)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--frame", type=int, default=None, help="frame to score (default: training frame)")
    p.add_argument("--ngen", type=int, default=None, help="packets for in-process generation")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("inspect", help="print summary statistics of an I/Q recording")
    p.add_argument("--in", dest="infile", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else int(exc.code)
    # train resolves seed through its config stack; everything else defaults here
    if getattr(args, "seed", None) is None and args.func is not cmd_train:
        args.seed = 0
    try:
        return args.func(args)
    except TrainingDiverged as exc:
        print(f"error: training diverged: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
