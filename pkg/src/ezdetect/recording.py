"""Loading, validation, filtering, and re-referencing of multichannel recordings.

The canonical on-disk format is self-describing: a text header of
``key=value`` lines terminated by a ``data`` line, followed by the raw
sample matrix as channel-major little-endian float32. Epoch annotations
live in a sidecar ``key=value`` text file. A CSV import path (one header
row of channel names, one row per sample) is supported for interchange.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import signal as sp_signal


class RecordingFormatError(ValueError):
    """Raised when a recording or annotation file cannot be parsed."""


@dataclass(frozen=True)
class Recording:
    """Channel-labeled sample matrix with its sampling rate.

    ``samples`` has shape (n_channels, n_samples), amplitudes in
    microvolts. Instances are immutable; every transformation returns
    a new recording.
    """

    channel_names: tuple
    fs: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.channel_names) == 0:
            raise RecordingFormatError("no channels")
        if len(set(self.channel_names)) != len(self.channel_names):
            dupes = sorted({c for c in self.channel_names if self.channel_names.count(c) > 1})
            raise RecordingFormatError(f"duplicate channel names: {', '.join(dupes)}")
        if self.fs <= 0:
            raise RecordingFormatError(f"sampling frequency must be positive, got {self.fs}")
        if self.samples.ndim != 2 or self.samples.shape[0] != len(self.channel_names):
            raise RecordingFormatError(
                f"sample matrix shape {self.samples.shape} does not match "
                f"{len(self.channel_names)} channels"
            )

    @property
    def n_channels(self) -> int:
        return len(self.channel_names)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.fs

    def channel_index(self, name: str) -> int:
        try:
            return self.channel_names.index(name)
        except ValueError:
            raise KeyError(f"unknown channel {name!r}") from None


@dataclass(frozen=True)
class EpochAnnotation:
    """Epoch timing, exclusions, and ground-truth labels for one seizure."""

    t_base: float
    t_start: float
    t_end: float
    excluded_channels: frozenset = frozenset()
    ez_channels: frozenset = frozenset()

    def validate(self, rec: Recording) -> None:
        if not self.t_base < self.t_start < self.t_end:
            raise ValueError(
                f"need t_base < t_start < t_end, got "
                f"{self.t_base}, {self.t_start}, {self.t_end}"
            )
        if self.t_end > rec.duration_s:
            raise ValueError(
                f"t_end={self.t_end} s beyond epoch duration {rec.duration_s} s"
            )
        overlap = self.ez_channels & self.excluded_channels
        if overlap:
            raise ValueError(f"channels both ez and excluded: {sorted(overlap)}")
        known = set(rec.channel_names)
        for label, group in (("excluded", self.excluded_channels), ("ez", self.ez_channels)):
            unknown = group - known
            if unknown:
                raise ValueError(f"unknown {label} channel name: {sorted(unknown)}")


@dataclass(frozen=True)
class FilterSpec:
    """Comb filter layout: notches at every harmonic of ``comb_center``."""

    comb_center: float = 50.0
    notch_bandwidth: float = 1.0
    max_harmonic: float | None = None  # defaults to fs/2 at application time

    def validate(self, fs: float) -> None:
        if self.comb_center >= fs / 2:
            raise ValueError(
                f"comb center {self.comb_center} Hz must lie below Nyquist {fs / 2} Hz"
            )
        if self.comb_center <= 0 or self.notch_bandwidth <= 0:
            raise ValueError("comb_center and notch_bandwidth must be positive")


# --------------------------------------------------------------------------
# native format


def save_native(rec: Recording, path) -> None:
    """Write the canonical header + channel-major float32 format."""
    for name in rec.channel_names:
        if "," in name or "\n" in name:
            raise RecordingFormatError(f"channel name {name!r} may not contain ',' or newline")
    header = (
        f"version=1\n"
        f"fs_hz={rec.fs!r}\n"
        f"n_channels={rec.n_channels}\n"
        f"n_samples={rec.n_samples}\n"
        f"channels={','.join(rec.channel_names)}\n"
        f"encoding=float32le\n"
        f"data\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8"))
        fh.write(rec.samples.astype("<f4").tobytes(order="C"))


def _parse_header(fh, path):
    fields = {}
    while True:
        line = fh.readline()
        if not line:
            raise RecordingFormatError(f"{path}: header ended before 'data' marker")
        text = line.decode("utf-8", errors="replace").strip()
        if text == "data":
            return fields
        if "=" not in text:
            raise RecordingFormatError(f"{path}: malformed header line {text!r}")
        key, value = text.split("=", 1)
        fields[key.strip()] = value.strip()


def load_native(path) -> Recording:
    with open(path, "rb") as fh:
        fields = _parse_header(fh, path)
        required = ("version", "fs_hz", "n_channels", "n_samples", "channels", "encoding")
        missing = [k for k in required if k not in fields]
        if missing:
            raise RecordingFormatError(f"{path}: header missing keys {missing}")
        if fields["encoding"] != "float32le":
            raise RecordingFormatError(f"{path}: unsupported encoding {fields['encoding']!r}")
        try:
            fs = float(fields["fs_hz"])
            n_channels = int(fields["n_channels"])
            n_samples = int(fields["n_samples"])
        except ValueError as exc:
            raise RecordingFormatError(f"{path}: malformed header value ({exc})") from None
        names = tuple(c for c in fields["channels"].split(",") if c)
        if len(names) != n_channels:
            raise RecordingFormatError(
                f"{path}: header claims {n_channels} channels but names {len(names)}"
            )
        raw = fh.read()
    expected = n_channels * n_samples * 4
    if len(raw) != expected:
        raise RecordingFormatError(
            f"{path}: expected {expected} bytes of samples, found {len(raw)} "
            "(inconsistent channel lengths?)"
        )
    samples = (
        np.frombuffer(raw, dtype="<f4").reshape(n_channels, n_samples).astype(np.float64)
    )
    return Recording(channel_names=names, fs=fs, samples=samples)


def load_csv(path, fs: float) -> Recording:
    """CSV import: one header row of channel names, then one row per sample."""
    if fs is None or fs <= 0:
        raise RecordingFormatError("csv format carries no sampling rate; pass fs > 0")
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header:
            raise RecordingFormatError(f"{path}: empty csv")
        names = tuple(c.strip() for c in header.split(","))
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(names):
                raise RecordingFormatError(
                    f"{path}:{lineno}: row has {len(parts)} values for {len(names)} channels"
                )
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise RecordingFormatError(f"{path}:{lineno}: non-numeric sample") from None
    if not rows:
        raise RecordingFormatError(f"{path}: csv holds no sample rows")
    samples = np.asarray(rows, dtype=np.float64).T
    return Recording(channel_names=names, fs=fs, samples=samples)


def load_recording(path, format: str = "native", fs: float | None = None) -> Recording:
    """Load and validate a recording in the named format."""
    if format == "native":
        return load_native(path)
    if format == "csv":
        return load_csv(path, fs)
    raise RecordingFormatError(f"unknown recording format {format!r}")


def load_annotation(path) -> EpochAnnotation:
    """Parse the key=value annotation sidecar."""
    fields = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise RecordingFormatError(f"{path}:{lineno}: malformed line {line!r}")
            key, value = line.split("=", 1)
            fields[key.strip()] = value.strip()
    try:
        t_start = float(fields["t_start_s"])
        t_end = float(fields["t_end_s"])
    except KeyError as exc:
        raise RecordingFormatError(f"{path}: missing required key {exc}") from None
    t_base = float(fields["t_base_s"]) if "t_base_s" in fields else None

    def names(key):
        raw = fields.get(key, "")
        return frozenset(c.strip() for c in raw.split(",") if c.strip())

    if t_base is None:
        # Resolved later against the configured baseline offset.
        t_base = float("nan")
    return EpochAnnotation(
        t_base=t_base,
        t_start=t_start,
        t_end=t_end,
        excluded_channels=names("excluded"),
        ez_channels=names("ez"),
    )


def save_annotation(ann: EpochAnnotation, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"t_base_s={ann.t_base!r}\n")
        fh.write(f"t_start_s={ann.t_start!r}\n")
        fh.write(f"t_end_s={ann.t_end!r}\n")
        fh.write(f"excluded={','.join(sorted(ann.excluded_channels))}\n")
        fh.write(f"ez={','.join(sorted(ann.ez_channels))}\n")


# --------------------------------------------------------------------------
# preprocessing


def apply_comb_filter(rec: Recording, spec: FilterSpec = FilterSpec()) -> Recording:
    """Remove the powerline frequency and its harmonics.

    Cascaded second-order notches at every harmonic below
    ``min(max_harmonic, fs/2)``, applied forward then backward for zero
    net phase shift. Output length equals input length.
    """
    spec.validate(rec.fs)
    top = rec.fs / 2 if spec.max_harmonic is None else min(spec.max_harmonic, rec.fs / 2)
    sos_sections = []
    k = 1
    while k * spec.comb_center < top:
        f0 = k * spec.comb_center
        b, a = sp_signal.iirnotch(f0, Q=f0 / spec.notch_bandwidth, fs=rec.fs)
        sos_sections.append(np.hstack([b, a]))
        k += 1
    if not sos_sections:
        return replace(rec, samples=rec.samples.copy())
    sos = np.vstack(sos_sections)
    # A notch this narrow rings for ~1/(pi*bw) seconds; pad well past the
    # default so edge transients cannot leak the powerline tone back in.
    padlen = min(rec.n_samples - 1, int(round(4.0 * rec.fs / (np.pi * spec.notch_bandwidth))))
    filtered = sp_signal.sosfiltfilt(sos, rec.samples, axis=1, padlen=padlen)
    return replace(rec, samples=filtered)


def exclude_channels(rec: Recording, excluded) -> Recording:
    """Drop the named channels, preserving the order of the rest."""
    excluded = set(excluded)
    unknown = excluded - set(rec.channel_names)
    if unknown:
        raise KeyError(f"unknown channel name: {sorted(unknown)}")
    keep = [i for i, c in enumerate(rec.channel_names) if c not in excluded]
    if not keep:
        raise ValueError("empty recording after exclusion")
    names = tuple(rec.channel_names[i] for i in keep)
    return Recording(channel_names=names, fs=rec.fs, samples=rec.samples[keep])


def bipolar_montage(rec: Recording, electrode_groups) -> Recording:
    """Derive adjacent-contact difference channels per electrode.

    ``electrode_groups`` maps electrode label to its ordered contact
    names; each electrode with k contacts yields k-1 channels named
    like ``"A1-A2"``.
    """
    names = []
    rows = []
    for electrode, contacts in electrode_groups.items():
        if len(contacts) < 2:
            raise ValueError(f"electrode {electrode!r} lists {len(contacts)} contacts; need >= 2")
        idx = [rec.channel_index(c) for c in contacts]
        for a, b in zip(idx[:-1], idx[1:]):
            names.append(f"{rec.channel_names[a]}-{rec.channel_names[b]}")
            rows.append(rec.samples[a] - rec.samples[b])
    return Recording(channel_names=tuple(names), fs=rec.fs, samples=np.asarray(rows))
