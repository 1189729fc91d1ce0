"""Snapshots, diagnostics CSV, config files and sweep directories.

Snapshot layout (little-endian)::

    offset  size  field
    0       4     magic b"SQGA"
    4       2     version (uint16) = 1
    6       2     n (uint16)
    8       8     alpha (float64)
    16      8     t (float64)
    24      8n^2  theta values, row-major float64

Config files are flat ``key = value`` lines; sections are dotted key prefixes
(``integrator.courant = 0.5``).  ``#`` starts a comment.
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from . import spectral as sp
from .diagnostics import CSV_COLUMNS, DiagnosticsRecord
from .errors import (
    BadMagicError,
    ConfigurationError,
    TruncatedPayloadError,
    VersionMismatchError,
)
from .model import State, recover_theta, state_from_theta

MAGIC = b"SQGA"
VERSION = 1
_HEADER = struct.Struct("<4sHHdd")
HEADER_SIZE = _HEADER.size  # 24


# --- snapshots ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Snapshot:
    n: int
    alpha: float
    t: float
    theta: np.ndarray

    @classmethod
    def from_state(cls, state: State) -> Snapshot:
        values = sp.inverse(recover_theta(state)).values
        return cls(state.grid.n, state.alpha, state.t, values)

    def to_state(self) -> State:
        grid = sp.make_grid(self.n)
        return state_from_theta(sp.PhysicalField(grid, self.theta), self.alpha, self.t)

    def identical(self, other: Snapshot) -> bool:
        return (self.n == other.n
                and _bits(self.alpha) == _bits(other.alpha)
                and _bits(self.t) == _bits(other.t)
                and self.theta.tobytes() == other.theta.tobytes())


def _bits(x: float) -> bytes:
    return struct.pack("<d", x)


def encode_snapshot(snap: Snapshot) -> bytes:
    if not 0 < snap.n < 1 << 16:
        raise ConfigurationError(f"snapshot n={snap.n} does not fit the header")
    theta = np.ascontiguousarray(snap.theta, dtype="<f8")
    if theta.shape != (snap.n, snap.n):
        raise ConfigurationError(f"theta shape {theta.shape} != ({snap.n}, {snap.n})")
    return _HEADER.pack(MAGIC, VERSION, snap.n, snap.alpha, snap.t) + theta.tobytes()


def decode_snapshot(data: bytes) -> Snapshot:
    if len(data) < HEADER_SIZE:
        if data[:4] != MAGIC[: len(data[:4])]:
            raise BadMagicError(f"bad magic {data[:4]!r}")
        raise TruncatedPayloadError(f"header truncated: {len(data)} bytes")
    magic, version, n, alpha, t = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise VersionMismatchError(f"snapshot version {version}, expected {VERSION}")
    expected = HEADER_SIZE + 8 * n * n
    if len(data) != expected:
        raise TruncatedPayloadError(
            f"payload is {len(data)} bytes, expected {expected} for n={n}")
    theta = np.frombuffer(data, dtype="<f8", offset=HEADER_SIZE).reshape(n, n).astype(float)
    return Snapshot(n, alpha, t, theta)


def write_snapshot(obj: State | Snapshot, path) -> None:
    snap = obj if isinstance(obj, Snapshot) else Snapshot.from_state(obj)
    Path(path).write_bytes(encode_snapshot(snap))


def read_snapshot_raw(path) -> Snapshot:
    return decode_snapshot(Path(path).read_bytes())


def read_snapshot(path) -> State:
    return read_snapshot_raw(path).to_state()


# --- diagnostics CSV ---------------------------------------------------------

def format_float(x: float) -> str:
    return format(float(x), ".17g")


class DiagnosticsWriter:
    """Streams DiagnosticsRecords to a CSV file with a header row."""

    def __init__(self, path):
        self._fh = open(path, "w", newline="")
        self._w = csv.writer(self._fh)
        self._w.writerow(CSV_COLUMNS)

    def write(self, rec: DiagnosticsRecord) -> None:
        self._w.writerow([format_float(v) for v in rec.as_row()])
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_diagnostics_csv(records: Iterable[DiagnosticsRecord], path) -> None:
    with DiagnosticsWriter(path) as w:
        for r in records:
            w.write(r)


def read_diagnostics_csv(path) -> list[DiagnosticsRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ConfigurationError(f"{path}: missing or wrong CSV header")
    return [DiagnosticsRecord.from_row(r) for r in rows[1:] if r]


# --- config files ------------------------------------------------------------

def _parse_value(text: str) -> Any:
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", "null", ""):
        return None
    if "," in text:
        return [_parse_value(p.strip()) for p in text.split(",") if p.strip()]
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return text[1:-1]
    return text


def parse_config(text: str, source: str = "<config>") -> dict[str, tuple[Any, int]]:
    """Parse ``key = value`` lines into ``{key: (value, line_number)}``."""
    out: dict[str, tuple[Any, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not all(part.replace("_", "").isalnum() for part in key.split(".")):
            raise ConfigurationError(f"{source}:{lineno}: invalid key {key!r}")
        if key in out:
            raise ConfigurationError(
                f"{source}:{lineno}: duplicate key {key!r} (first on line {out[key][1]})")
        out[key] = (_parse_value(value), lineno)
    return out


class ConfigReader:
    """Typed, located access to a parsed config; tracks unused keys."""

    def __init__(self, entries: dict[str, tuple[Any, int]], source: str, base_dir: Path):
        self.entries = entries
        self.source = source
        self.base_dir = base_dir
        self._used: set[str] = set()

    @classmethod
    def from_file(cls, path) -> ConfigReader:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigurationError(f"{path}: cannot read config ({exc.strerror})") from None
        return cls(parse_config(text, str(path)), str(path), path.parent)

    def where(self, key):
        if key in self.entries:
            return f"{self.source}:{self.entries[key][1]}: field {key!r}"
        return f"{self.source}: field {key!r}"

    def has(self, key) -> bool:
        return key in self.entries

    def raw(self, key, default=None, required=False):
        if key not in self.entries:
            if required:
                raise ConfigurationError(f"{self.where(key)}: required field missing")
            return default
        self._used.add(key)
        return self.entries[key][0]

    def get_float(self, key, default=None, required=False, positive=False,
                  nonnegative=False) -> Optional[float]:
        v = self.raw(key, default, required)
        if v is None:
            return None
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigurationError(f"{self.where(key)}: expected a number, got {v!r}")
        v = float(v)
        if not np.isfinite(v):
            raise ConfigurationError(f"{self.where(key)}: must be finite")
        if positive and not v > 0:
            raise ConfigurationError(f"{self.where(key)}: must be positive, got {v}")
        if nonnegative and v < 0:
            raise ConfigurationError(f"{self.where(key)}: must be nonnegative, got {v}")
        return v

    def get_int(self, key, default=None, required=False) -> Optional[int]:
        v = self.raw(key, default, required)
        if v is None:
            return None
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigurationError(f"{self.where(key)}: expected an integer, got {v!r}")
        return v

    def get_str(self, key, default=None, required=False) -> Optional[str]:
        v = self.raw(key, default, required)
        if v is None:
            return None
        return str(v)

    def get_floats(self, key, default=None, required=False) -> Optional[list[float]]:
        v = self.raw(key, default, required)
        if v is None:
            return None
        items = v if isinstance(v, list) else [v]
        for x in items:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ConfigurationError(f"{self.where(key)}: expected numbers, got {x!r}")
        return [float(x) for x in items]

    def get_path(self, key, default=None, required=False) -> Optional[Path]:
        v = self.get_str(key, default, required)
        if v is None:
            return None
        p = Path(v)
        return p if p.is_absolute() else self.base_dir / p

    def prefixed(self, prefix: str) -> dict[str, Any]:
        """All ``prefix.<name>`` entries, marking them used."""
        out = {}
        for key in self.entries:
            if key.startswith(prefix + "."):
                out[key[len(prefix) + 1:]] = self.raw(key)
        return out

    def wrap(self, key, exc: Exception) -> ConfigurationError:
        return ConfigurationError(f"{self.where(key)}: {exc}")

    def check_unused(self):
        for key, (_, lineno) in self.entries.items():
            if key not in self._used:
                raise ConfigurationError(f"{self.source}:{lineno}: unknown field {key!r}")


# --- sweep directories -------------------------------------------------------

def alpha_filename(alpha: float) -> str:
    return f"alpha_{alpha!r}.csv"


def sweep_payload(result) -> dict:
    """JSON-ready dict for ``sweep.json``."""
    from .sweep import eps_sup

    return {
        "config": result.config.echo(),
        "theta0_h1": result.theta0_h1,
        "threshold": result.threshold,
        "liminf_estimates": [
            {"t": t, "epsilon_hat": e, "fit_residual": r}
            for t, (e, r) in sorted(result.liminf_estimates.items())
        ],
        "eps_sup": eps_sup(result),
        "verdict": result.verdict.value if result.verdict else None,
        "runs": [
            {"alpha": a, "n": result.resolutions[a], "file": alpha_filename(a),
             "truncated_at": result.truncated[a], "samples": len(result.per_alpha[a])}
            for a in result.config.alphas
        ],
        "metadata": result.metadata,
    }


def save_sweep(result, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for a, series in result.per_alpha.items():
        write_diagnostics_csv(series, out / alpha_filename(a))
    (out / "sweep.json").write_text(json.dumps(sweep_payload(result), indent=2) + "\n")
    return out


def load_sweep(out_dir) -> tuple[dict, dict[float, list[DiagnosticsRecord]]]:
    out = Path(out_dir)
    payload = json.loads((out / "sweep.json").read_text())
    series = {run["alpha"]: read_diagnostics_csv(out / run["file"]) for run in payload["runs"]}
    return payload, series


# --- gnuplot scripts ---------------------------------------------------------

_COL = {name: i + 1 for i, name in enumerate(CSV_COLUMNS)}


def _gp_header(title: str, png: str, xlabel: str, ylabel: str, logx=False) -> str:
    lines = [
        f"# gnuplot script: {title}",
        "set datafile separator ','",
        "set key outside",
        f"set title '{title}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
    ]
    if logx:
        lines.append("set logscale x")
    lines.append(f"set terminal pngcairo size 900,600\nset output '{png}'")
    return "\n".join(lines) + "\n"


def emit_plot_scripts(input_path, out_dir) -> list[Path]:
    """Write gnuplot scripts for E(t), sup-norm(t) and B(alpha, t).

    ``input_path`` is a diagnostics CSV or a sweep directory.
    """
    src = Path(input_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if src.is_dir():
        payload, series = load_sweep(src)
        csvs = [(f"alpha={a!r}", (src / alpha_filename(a)).resolve()) for a in series]
    else:
        read_diagnostics_csv(src)  # validate
        payload, series = None, None
        csvs = [(src.stem, src.resolve())]

    written = []

    def curves(col):
        return ", \\\n     ".join(
            f"'{p}' using {_COL['t']}:{_COL[col]} skip 1 with linespoints title '{label}'"
            for label, p in csvs)

    e = out / "energy.gp"
    e.write_text(_gp_header("modified energy E(t)", "energy.png", "t", "E")
                 + f"plot {curves('energy_modified')}\n")
    written.append(e)

    linf = out / "linf.gp"
    body = ", \\\n     ".join(
        f"'{p}' using {_COL['t']}:(abs(${_COL['linf_max']}) > abs(${_COL['linf_min']}) ? "
        f"abs(${_COL['linf_max']}) : abs(${_COL['linf_min']})) skip 1 "
        f"with linespoints title '{label}'"
        for label, p in csvs)
    linf.write_text(_gp_header("sup-norm of theta", "linf.png", "t", "max |theta|")
                    + f"plot {body}\n")
    written.append(linf)

    ind = out / "indicator.gp"
    if series is None:
        ind.write_text(_gp_header("blow-up indicator B(t)", "indicator.png", "t", "B")
                       + f"plot {curves('blowup_indicator')}\n")
    else:
        # one curve per sample time, B against alpha
        times = sorted({r.t for s in series.values() for r in s})
        dat = out / "indicator_vs_alpha.dat"
        with open(dat, "w") as fh:
            fh.write("# alpha," + ",".join(f"t={format_float(t)}" for t in times) + "\n")
            for a in sorted(series):
                by_t = {r.t: r.blowup_indicator for r in series[a]}
                fh.write(format_float(a) + "," + ",".join(
                    format_float(by_t[t]) if t in by_t else "NaN" for t in times) + "\n")
        plots = ", \\\n     ".join(
            f"'{dat.resolve()}' using 1:{j + 2} with linespoints title 't={t:g}'"
            for j, t in enumerate(times))
        ind.write_text(_gp_header("indicator B(alpha, t)", "indicator.png", "alpha", "B",
                                  logx=True) + f"plot {plots}\n")
        written.append(dat)
    written.append(ind)
    return written
