"""Flat key=value run configuration with strict unknown-key rejection."""

import dataclasses
from dataclasses import dataclass


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    num_qubits: int = 6
    num_partitions: int = 3
    num_layers: int = 0  # 0 = derive from features / qubits
    alpha_init: str = "half_pi"  # half_pi | small | comma-separated radians
    lambda_initial: float = 0.01
    lambda_final: float = 0.0001
    lambda_switch_epoch: int = 10
    lambda_anneal_epochs: int = 0
    regularizer: str = "log_product"
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 0.01
    gradient_estimator: str = "parameter_shift"
    forward_mode: str = "full"
    num_samples: int = 10000
    spsa_c: float = 0.1
    seed_data: int = 0
    seed_init: int = 1
    seed_train: int = 2
    seed_sampling: int = 3
    noise_std: float = 0.0
    n_train: int = 100
    n_val: int = 50
    n_test: int = 50
    out_dir: str = "."
    resource_cap: int = 1_000_000
    record_wallclock: bool = False

    @property
    def n_samples(self):
        return self.n_train + self.n_val + self.n_test

    def alpha_init_value(self):
        if self.alpha_init in ("half_pi", "small"):
            return self.alpha_init
        try:
            return [float(v) for v in self.alpha_init.split(",")]
        except ValueError:
            raise ConfigError(f"bad alpha_init {self.alpha_init!r}") from None


_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _parse_value(name, raw, typ):
    raw = raw.strip()
    if typ == "bool" or typ is bool:
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
    try:
        if typ == "int" or typ is int:
            return int(raw)
        if typ == "float" or typ is float:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{name}: expected a number, got {raw!r}") from None
    return raw


def load_config(path=None, overrides=None):
    """Build a RunConfig from an optional file plus CLI overrides.

    Unknown keys fail loudly: a misspelled hyperparameter must not silently
    fall back to a default.
    """
    values = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, raw = (part.strip() for part in line.split("=", 1))
                if key not in _FIELDS:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = _parse_value(key, raw, _FIELDS[key])
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELDS:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = value
    return RunConfig(**values)
