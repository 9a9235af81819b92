"""Analysis configuration: tunables, validation, file parsing, hashing."""

import hashlib
from dataclasses import dataclass, fields, replace

import numpy as np


@dataclass(frozen=True)
class AnalysisConfig:
    """All pipeline tunables with their default parameterization."""

    window_s: float = 1.0
    shift_s: float = 0.25
    band_high_lo: float = 30.0
    band_high_hi: float = 250.0
    band_low_lo: float = 4.0
    band_low_hi: float = 12.0
    tau_max_s: float = 0.10
    lag_step_s: float = 0.010
    delta_s: float = 5.0
    gamma: float = 0.0
    alpha: float = 1.0
    eta: float = 0.0
    m: int | None = None
    m_pct: float | None = None
    t_base_offset_s: float = -20.0
    comb_hz: float = 50.0
    notch_bandwidth_hz: float = 1.0
    max_harmonic_hz: float | None = None
    cusum_init: str = "zero"
    cusum_norm: str = "mean"
    bin_rule: str = "ceil"
    threads: int | None = None

    def validate(self) -> None:
        problems = []
        if self.window_s <= 0:
            problems.append(f"window_s must be positive, got {self.window_s}")
        if self.shift_s <= 0:
            problems.append(f"shift_s must be positive, got {self.shift_s}")
        if not 0 <= self.band_high_lo < self.band_high_hi:
            problems.append("high band is empty or negative")
        if not 0 <= self.band_low_lo < self.band_low_hi:
            problems.append("low band is empty or negative")
        if self.tau_max_s < 0:
            problems.append(f"tau_max_s must be >= 0, got {self.tau_max_s}")
        if self.lag_step_s <= 0:
            problems.append(f"lag_step_s must be positive, got {self.lag_step_s}")
        if self.delta_s <= 0:
            problems.append(f"delta_s must be positive, got {self.delta_s}")
        if not 0.0 <= self.alpha <= 1.0:
            problems.append(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.eta <= 1.0:
            problems.append(f"eta must be in [0, 1], got {self.eta}")
        if self.m is not None and self.m_pct is not None:
            problems.append("conflicting M specifications: give m or m_pct, not both")
        if self.m is not None and self.m < 1:
            problems.append(f"m must be >= 1, got {self.m}")
        if self.m_pct is not None and not 0 < self.m_pct <= 100:
            problems.append(f"m_pct must be in (0, 100], got {self.m_pct}")
        if self.comb_hz <= 0:
            problems.append(f"comb_hz must be positive, got {self.comb_hz}")
        if self.notch_bandwidth_hz <= 0:
            problems.append("notch_bandwidth_hz must be positive")
        if self.cusum_init not in ("zero", "literal"):
            problems.append(f"cusum_init must be zero|literal, got {self.cusum_init!r}")
        if self.cusum_norm not in ("mean", "zscore"):
            problems.append(f"cusum_norm must be mean|zscore, got {self.cusum_norm!r}")
        if self.bin_rule not in ("ceil", "round"):
            problems.append(f"bin_rule must be ceil|round, got {self.bin_rule!r}")
        if self.threads is not None and self.threads < 1:
            problems.append(f"threads must be >= 1, got {self.threads}")
        if problems:
            raise ValueError("invalid configuration: " + "; ".join(problems))

    def validate_for_fs(self, fs: float) -> None:
        self.validate()
        if self.band_high_hi > fs / 2:
            raise ValueError(
                f"high band upper edge {self.band_high_hi} Hz needs fs >= "
                f"{2 * self.band_high_hi} Hz, recording has {fs} Hz"
            )
        if self.band_low_hi > fs / 2:
            raise ValueError(f"low band upper edge {self.band_low_hi} Hz exceeds Nyquist")

    def resolve_m(self, n_channels: int) -> int:
        """Selection size for a network of ``n_channels``: an absolute count,
        a percentage rounded half-up, or the default 10%."""
        if self.m is not None:
            return self.m
        pct = self.m_pct if self.m_pct is not None else 10.0
        return max(1, int(np.floor(pct / 100.0 * n_channels + 0.5)))

    def canonical_lines(self) -> list:
        out = []
        for f in fields(self):
            if f.name == "threads":
                continue  # execution detail; must not alter output bytes
            value = getattr(self, f.name)
            out.append(f"{f.name}={'' if value is None else value!r}")
        return out

    def config_hash(self) -> str:
        text = "\n".join(self.canonical_lines())
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


_FIELD_TYPES = {f.name: f.type for f in fields(AnalysisConfig)}
_INT_FIELDS = {"m", "threads"}
_STR_FIELDS = {"cusum_init", "cusum_norm", "bin_rule"}


def config_from_file(path, base: AnalysisConfig | None = None) -> AnalysisConfig:
    """Parse a key=value config file over ``base`` defaults.

    Unknown keys are rejected; blank lines and ``#`` comments allowed.
    """
    cfg = base if base is not None else AnalysisConfig()
    updates = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: malformed config line {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _FIELD_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            if value == "":
                updates[key] = None
            elif key in _STR_FIELDS:
                updates[key] = value
            elif key in _INT_FIELDS:
                updates[key] = int(value)
            else:
                updates[key] = float(value)
    cfg = replace(cfg, **updates)
    cfg.validate()
    return cfg
