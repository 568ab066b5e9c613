"""Tactile signal conditioning.

Raw multi-rate recordings (3-axis acceleration, force and velocity) are
brought onto a common 1 kHz grid, cropped, filtered and reduced to the three
scalar channels used downstream:

* ``a`` -- vibration, band-passed per axis and collapsed with DFT321
* ``v`` -- scanning speed, the norm of the velocity vector
* ``f`` -- normal force, the force vector projected on the surface normal

Every function here is pure; recordings can be processed in parallel.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import signal as sps

from .errors import (CropError, FilterError, IngestError, NormalError,
                     SegmentError, ShapeError)

TARGET_HZ = 1000.0
CROP_S = 2.5
INTERACTION_CUTOFF_HZ = 25.0
ACCEL_BAND_HZ = (20.0, 500.0)
FILTER_ORDER = 4


@dataclass
class TimeSeries:
    """Uniformly sampled signal.

    ``samples`` has shape ``(n,)`` for a scalar channel or ``(n, channels)``.
    """

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim not in (1, 2):
            raise ShapeError(f"samples must be 1-D or 2-D, got {self.samples.ndim}-D")
        if not self.sample_rate_hz > 0:
            raise IngestError(f"sample rate must be positive, got {self.sample_rate_hz}")
        if len(self.samples) < 1:
            raise IngestError("time series is empty")
        if not np.all(np.isfinite(self.samples)):
            raise IngestError("time series contains non-finite samples")

    def __len__(self):
        return self.samples.shape[0]

    @property
    def channel_count(self) -> int:
        return 1 if self.samples.ndim == 1 else self.samples.shape[1]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self)) / self.sample_rate_hz

    def channel(self, i: int) -> "TimeSeries":
        if self.samples.ndim == 1:
            if i != 0:
                raise ShapeError("scalar series has a single channel")
            return self
        return TimeSeries(self.samples[:, i], self.sample_rate_hz)


@dataclass
class Recording:
    texture_id: str
    accel_xyz: TimeSeries
    force_xyz: TimeSeries
    velocity_xyz: TimeSeries
    surface_normal: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    class_label: str | None = None

    def __post_init__(self):
        self.surface_normal = _check_normal(self.surface_normal, tol=1e-9)


@dataclass
class ProcessedSignals:
    """The three conditioned scalar channels on a shared 1 kHz grid."""

    texture_id: str
    a: TimeSeries
    v: TimeSeries
    f: TimeSeries

    def to_csv(self, path) -> None:
        n = len(self.a)
        t = np.arange(n) / self.a.sample_rate_hz
        table = np.column_stack([t, self.a.samples, self.v.samples, self.f.samples])
        np.savetxt(path, table, delimiter=",", header="t_s,a,v,f", comments="",
                   fmt="%.6g")

    @classmethod
    def from_csv(cls, path, texture_id: str = "") -> "ProcessedSignals":
        table = _read_table(path, ["t_s", "a", "v", "f"])
        t = table[:, 0]
        if len(t) < 2:
            raise IngestError(f"{path}: need at least two rows")
        fs = 1.0 / float(np.median(np.diff(t)))
        fs = float(np.round(fs, 6))
        return cls(texture_id, TimeSeries(table[:, 1], fs), TimeSeries(table[:, 2], fs),
                   TimeSeries(table[:, 3], fs))


def _check_normal(normal, tol):
    n = np.asarray(normal, dtype=np.float64).reshape(-1)
    if n.shape != (3,):
        raise NormalError(f"surface normal must be a 3-vector, got shape {n.shape}")
    norm = np.linalg.norm(n)
    if abs(norm - 1.0) > tol:
        raise NormalError(f"surface normal has norm {norm:.12g}, expected 1")
    return n


def _check_three(ts: TimeSeries, what: str) -> np.ndarray:
    x = ts.samples
    if x.ndim != 2 or x.shape[1] != 3:
        raise ShapeError(f"{what} must have 3 channels, got shape {x.shape}")
    return x


# --- resampling -----------------------------------------------------------

def resample(ts: TimeSeries, target_hz: float) -> TimeSeries:
    """Linear-interpolation resampling onto a uniform ``target_hz`` grid.

    The output keeps the input duration (``n / rate``) to within one output
    sample period. Matching rates return an exact copy.
    """
    if not target_hz > 0:
        raise IngestError(f"target rate must be positive, got {target_hz}")
    if ts.sample_rate_hz == target_hz:
        return TimeSeries(ts.samples.copy(), target_hz)
    n_out = max(1, int(round(len(ts) * target_hz / ts.sample_rate_hz)))
    grid = np.arange(n_out) / target_hz
    return TimeSeries(_interp(ts.times, ts.samples, grid), target_hz)


def _interp(t, values, grid):
    if values.ndim == 1:
        return np.interp(grid, t, values)
    return np.column_stack([np.interp(grid, t, values[:, c]) for c in range(values.shape[1])])


def resample_timestamped(t, values, target_hz: float, start: float | None = None,
                         stop: float | None = None) -> TimeSeries:
    """Resample irregularly timestamped samples onto ``start + k / target_hz``."""
    t = np.asarray(t, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if len(t) == 0:
        raise IngestError("no samples to resample")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(values))):
        raise IngestError("non-finite timestamps or samples")
    if np.any(np.diff(t) <= 0):
        raise IngestError("timestamps must be strictly increasing")
    start = t[0] if start is None else start
    stop = t[-1] if stop is None else stop
    if stop < start:
        raise IngestError("empty time interval")
    # small slack so float round-off cannot drop the last grid point
    n_out = int(np.floor((stop - start) * target_hz + 1e-9)) + 1
    grid = start + np.arange(n_out) / target_hz
    return TimeSeries(_interp(t, values, grid), target_hz)


# --- cropping and filtering --------------------------------------------------

def crop_ends(ts: TimeSeries, crop_s: float) -> TimeSeries:
    """Drop ``crop_s`` seconds from both ends."""
    if crop_s < 0:
        raise CropError("crop duration must be nonnegative")
    if ts.duration_s <= 2 * crop_s:
        raise CropError(f"duration {ts.duration_s:g} s too short to crop {crop_s:g} s per end")
    k = int(round(crop_s * ts.sample_rate_hz))
    return TimeSeries(ts.samples[k:len(ts) - k].copy(), ts.sample_rate_hz)


def _filtfilt(sos, ts: TimeSeries) -> TimeSeries:
    padlen = 3 * FILTER_ORDER
    if len(ts) <= padlen:
        raise FilterError(f"series of {len(ts)} samples too short for zero-phase filtering")
    y = sps.sosfiltfilt(sos, ts.samples, axis=0, padtype="odd", padlen=padlen)
    return TimeSeries(y, ts.sample_rate_hz)


def lowpass(ts: TimeSeries, cutoff_hz: float, order: int = FILTER_ORDER) -> TimeSeries:
    """Zero-phase Butterworth low-pass (forward-backward, unit DC gain)."""
    nyq = ts.sample_rate_hz / 2
    if not 0 < cutoff_hz < nyq:
        raise FilterError(f"cutoff {cutoff_hz} Hz outside (0, {nyq}) Hz")
    sos = sps.butter(order, cutoff_hz, btype="low", fs=ts.sample_rate_hz, output="sos")
    return _filtfilt(sos, ts)


def bandpass(ts: TimeSeries, lo_hz: float, hi_hz: float, order: int = FILTER_ORDER) -> TimeSeries:
    """Zero-phase Butterworth band-pass.

    An upper edge at the Nyquist frequency leaves nothing to reject above
    the band, so the filter reduces to a high-pass at ``lo_hz``.
    """
    nyq = ts.sample_rate_hz / 2
    if not (0 < lo_hz < hi_hz <= nyq):
        raise FilterError(f"invalid band ({lo_hz}, {hi_hz}) Hz for Nyquist {nyq} Hz")
    if hi_hz >= nyq:
        sos = sps.butter(order, lo_hz, btype="high", fs=ts.sample_rate_hz, output="sos")
    else:
        sos = sps.butter(order, [lo_hz, hi_hz], btype="band", fs=ts.sample_rate_hz,
                         output="sos")
    return _filtfilt(sos, ts)


# --- axis reduction -------------------------------------------------------------

def dft321(accel_xyz: TimeSeries) -> TimeSeries:
    """Collapse 3-axis vibration into one axis.

    Per frequency bin the output magnitude is the Euclidean combination of
    the three axis magnitudes and the phase is that of the summed spectra.
    Building the result from the one-sided spectrum enforces conjugate
    symmetry, so the output is real and carries the total energy of the
    three inputs.
    """
    x = _check_three(accel_xyz, "acceleration")
    n = x.shape[0]
    spectrum = np.fft.rfft(x, axis=0)
    magnitude = np.sqrt(np.sum(np.abs(spectrum) ** 2, axis=1))
    phase = np.angle(np.sum(spectrum, axis=1))
    combined = magnitude * np.exp(1j * phase)
    return TimeSeries(np.fft.irfft(combined, n=n), accel_xyz.sample_rate_hz)


def speed_magnitude(velocity_xyz: TimeSeries) -> TimeSeries:
    v = _check_three(velocity_xyz, "velocity")
    return TimeSeries(np.sqrt(np.sum(v * v, axis=1)), velocity_xyz.sample_rate_hz)


def normal_force(force_xyz: TimeSeries, normal) -> TimeSeries:
    f = _check_three(force_xyz, "force")
    n = _check_normal(normal, tol=1e-6)
    return TimeSeries(f @ n, force_xyz.sample_rate_hz)


def segment(ts: TimeSeries, window_samples: int, hop_samples: int) -> np.ndarray:
    """Fixed-length windows starting at ``0, hop, 2*hop, ...``.

    Returns an array of shape ``(count, window_samples)`` (plus a channel
    axis for multi-channel input); a trailing partial window is dropped.
    """
    n = len(ts)
    if hop_samples < 1:
        raise SegmentError("hop must be at least one sample")
    if window_samples < 1 or window_samples > n:
        raise SegmentError(f"window of {window_samples} samples does not fit {n} samples")
    count = (n - window_samples) // hop_samples + 1
    starts = np.arange(count) * hop_samples
    idx = starts[:, None] + np.arange(window_samples)[None, :]
    return ts.samples[idx].copy()


# --- raw recording ingest -----------------------------------------------------

def _read_table(path, columns):
    path = Path(path)
    try:
        with open(path) as fh:
            header = fh.readline().strip()
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    names = [c.strip() for c in header.split(",")]
    if names != columns:
        raise IngestError(f"{path}: expected header {','.join(columns)}, got {header!r}")
    try:
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise IngestError(f"{path}: {exc}") from exc
    if table.shape[0] == 0 or table.shape[1] != len(columns):
        raise IngestError(f"{path}: no data rows")
    if not np.all(np.isfinite(table)):
        raise IngestError(f"{path}: non-finite values")
    return table


def load_recording(raw_dir, target_hz: float = TARGET_HZ) -> Recording:
    """Read a raw texture directory and put all channels on one grid.

    The grid spans the interval covered by every file, so the channels stay
    aligned in wall-clock time whatever their native rates.
    """
    raw_dir = Path(raw_dir)
    meta_path = raw_dir / "meta.json"
    try:
        meta = json.loads(meta_path.read_text())
    except (OSError, ValueError) as exc:
        raise IngestError(f"cannot read {meta_path}: {exc}") from exc
    tables = {
        "accel": _read_table(raw_dir / "accel.csv", ["t_s", "ax", "ay", "az"]),
        "force": _read_table(raw_dir / "force.csv", ["t_s", "fx", "fy", "fz"]),
        "kin": _read_table(raw_dir / "kinematics.csv", ["t_s", "vx", "vy", "vz"]),
    }
    start = max(tab[0, 0] for tab in tables.values())
    stop = min(tab[-1, 0] for tab in tables.values())
    if stop <= start:
        raise IngestError(f"{raw_dir}: channels do not overlap in time")
    series = {k: resample_timestamped(tab[:, 0], tab[:, 1:], target_hz, start, stop)
              for k, tab in tables.items()}
    return Recording(
        texture_id=str(meta.get("texture_id", raw_dir.name)),
        accel_xyz=series["accel"],
        force_xyz=series["force"],
        velocity_xyz=series["kin"],
        surface_normal=np.asarray(meta.get("surface_normal", [0.0, 0.0, 1.0]), dtype=float),
        class_label=meta.get("class"),
    )


def preprocess(rec: Recording, crop_s: float = CROP_S,
               interaction_cutoff_hz: float = INTERACTION_CUTOFF_HZ,
               accel_band_hz: tuple = ACCEL_BAND_HZ) -> ProcessedSignals:
    """Recording -> cropped, filtered (a, v, f) at 1 kHz.

    Order: resample any channel not already at 1 kHz, crop, filter each
    acceleration axis, DFT321; speed and normal force are derived first and
    then low-passed. Channels are trimmed to their common length.
    """
    chans = [resample(ts, TARGET_HZ) for ts in (rec.accel_xyz, rec.force_xyz, rec.velocity_xyz)]
    n = min(len(ts) for ts in chans)
    accel, force, vel = (crop_ends(TimeSeries(ts.samples[:n], TARGET_HZ), crop_s) for ts in chans)
    accel = bandpass(accel, *accel_band_hz)
    a = dft321(accel)
    v = lowpass(speed_magnitude(vel), interaction_cutoff_hz)
    f = lowpass(normal_force(force, rec.surface_normal), interaction_cutoff_hz)
    return ProcessedSignals(rec.texture_id, a, v, f)


def write_raw_recording(raw_dir, rec: Recording, meta_extra: dict | None = None) -> None:
    """Write a recording in the raw ingest layout (used by the synthetic generator)."""
    raw_dir = Path(raw_dir)
    raw_dir.mkdir(parents=True, exist_ok=True)
    for name, cols, ts in (("accel.csv", "t_s,ax,ay,az", rec.accel_xyz),
                           ("force.csv", "t_s,fx,fy,fz", rec.force_xyz),
                           ("kinematics.csv", "t_s,vx,vy,vz", rec.velocity_xyz)):
        table = np.column_stack([ts.times, ts.samples])
        np.savetxt(raw_dir / name, table, delimiter=",", header=cols, comments="",
                   fmt="%.9g")
    meta = {"texture_id": rec.texture_id, "class": rec.class_label,
            "surface_normal": [float(c) for c in rec.surface_normal],
            "units": {"accel": "m/s^2", "force": "N", "velocity": "m/s"}}
    meta.update(meta_extra or {})
    (raw_dir / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
