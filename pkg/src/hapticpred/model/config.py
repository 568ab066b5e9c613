"""Architecture and training configuration, serialised as one JSON document."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields

from ..errors import ConfigError

SCHEMA_VERSION = 1
ATTRIBUTES = ("R-S", "F-B", "S-S", "H-S")


@dataclass
class HvNetConfig:
    input_dim: int = 2304
    encoder_filters: list = field(default_factory=lambda: [256, 256, 128, 64, 32])
    encoder_kernels: list = field(default_factory=lambda: [4, 4, 3, 3, 3])
    decoder_filters: list = field(default_factory=lambda: [32, 64, 128, 256, 256])
    decoder_kernels: list = field(default_factory=lambda: [3, 3, 3, 4, 4])
    recon_kernel: int = 3
    head_units: list = field(default_factory=lambda: [512, 128])
    tap_point: str = "bottleneck"
    recon_weight: float = 0.1

    def validate(self):
        if len(self.encoder_filters) != len(self.encoder_kernels):
            raise ConfigError("encoder filters and kernels differ in length")
        if len(self.decoder_filters) != len(self.decoder_kernels):
            raise ConfigError("decoder filters and kernels differ in length")
        if len(self.decoder_filters) != len(self.encoder_filters):
            raise ConfigError("decoder must mirror the encoder depth")
        if self.input_dim % (2 ** len(self.encoder_filters)):
            raise ConfigError(f"input_dim {self.input_dim} is not divisible by "
                              f"2^{len(self.encoder_filters)}")
        if self.tap_point not in ("bottleneck", "decoder_output"):
            raise ConfigError(f"unknown tap_point {self.tap_point!r}")
        if self.recon_weight < 0:
            raise ConfigError("recon_weight must be nonnegative")

    @property
    def feature_dim(self) -> int:
        return self.head_units[-1]


@dataclass
class HtNetConfig:
    input_dim: int = 526
    seq_len: int = 8
    filters: list = field(default_factory=lambda: [128, 256, 128, 128, 256, 128])
    kernel: int = 3
    pool_after: list = field(default_factory=lambda: [2, 4, 5])
    peephole: bool = True

    def validate(self):
        if self.seq_len < 2 ** len(self.pool_after) or self.seq_len % 2 ** len(self.pool_after):
            raise ConfigError(f"sequence length {self.seq_len} is incompatible with "
                              f"{len(self.pool_after)} temporal halvings")
        if any(not 1 <= p <= len(self.filters) for p in self.pool_after):
            raise ConfigError("pool_after refers to a missing ConvLSTM layer")

    @property
    def feature_dim(self) -> int:
        return self.filters[-1]


@dataclass
class FusionConfig:
    hidden_units: list = field(default_factory=lambda: [128, 128])
    pool: int = 2
    post_pool_units: list = field(default_factory=lambda: [32])
    n_outputs: int = 4
    # the head works in units of output_scale; predictions are reported on -100..100
    output_scale: float = 100.0


@dataclass
class AnnConfig:
    tactile_dim: int = 526
    visual_dim: int = 2304
    branch_units: list = field(default_factory=lambda: [128, 256, 256, 128])
    regression_units: list = field(default_factory=lambda: [64, 64])
    n_outputs: int = 4
    output_scale: float = 100.0


@dataclass
class TrainConfig:
    max_epochs: int = 200
    patience: int = 10
    val_fraction: float = 0.1
    batch_size: int = 16
    learning_rate: float = 1e-3
    seed: int = 0
    dtype: str = "float64"
    pairing: str = "random"

    def validate(self):
        # a single-epoch cap is allowed with any patience
        if self.max_epochs > 1 and self.patience >= self.max_epochs:
            raise ConfigError("patience must be smaller than max_epochs")
        if self.max_epochs < 1 or self.batch_size < 1:
            raise ConfigError("max_epochs and batch_size must be positive")
        if not 0 < self.val_fraction < 1:
            raise ConfigError("val_fraction must lie in (0, 1)")
        if self.dtype not in ("float64", "float32"):
            raise ConfigError(f"unsupported dtype {self.dtype!r}")


@dataclass
class FeatureConfig:
    segment_hop: int = 250
    seq_stride: int = 4
    # cap on sequences per texture (evenly spaced); None keeps all
    max_sequences_per_texture: int | None = None
    clamp_predictions: bool = False


@dataclass
class ModelConfig:
    kind: str = "visuotactile"
    hv: HvNetConfig = field(default_factory=HvNetConfig)
    ht: HtNetConfig = field(default_factory=HtNetConfig)
    fusion: FusionConfig = field(default_factory=FusionConfig)
    ann: AnnConfig = field(default_factory=AnnConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    schema_version: int = SCHEMA_VERSION

    def validate(self) -> "ModelConfig":
        if self.kind not in ("visuotactile", "ann"):
            raise ConfigError(f"unknown model kind {self.kind!r}")
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported config schema {self.schema_version}")
        self.hv.validate()
        self.ht.validate()
        self.train.validate()
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        parts = {"hv": HvNetConfig, "ht": HtNetConfig, "fusion": FusionConfig,
                 "ann": AnnConfig, "train": TrainConfig, "features": FeatureConfig}
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if key in parts:
                sub = parts[key]
                sub_known = {f.name for f in fields(sub)}
                bad = set(value) - sub_known
                if bad:
                    raise ConfigError(f"unknown keys in {key}: {sorted(bad)}")
                kwargs[key] = sub(**value)
            else:
                kwargs[key] = value
        return cls(**kwargs).validate()

    @classmethod
    def from_json(cls, text: str) -> "ModelConfig":
        try:
            return cls.from_dict(json.loads(text))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid config: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ModelConfig":
        with open(path) as fh:
            return cls.from_json(fh.read())

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())


def reduced_config(**train_overrides) -> ModelConfig:
    """Desk-scale architecture: narrow encoder and ConvLSTM stacks."""
    cfg = ModelConfig()
    cfg.hv.encoder_filters = [32, 32, 16, 8, 8]
    cfg.hv.decoder_filters = [8, 8, 16, 32, 32]
    cfg.ht.filters = [16, 16, 16, 16, 16, 16]
    for k, v in train_overrides.items():
        setattr(cfg.train, k, v)
    return cfg.validate()
