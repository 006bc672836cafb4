"""Experiment configuration (``key = value`` text files) and table output."""

import hashlib
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "PRESETS",
    "parse_config",
    "load_config",
    "output_dir",
    "write_table",
    "read_table",
    "write_gnuplot",
    "sha256",
]


class ConfigError(ValueError):
    """Malformed configuration; ``lineno`` is 1-based when known."""

    def __init__(self, msg, lineno=None, source=None):
        where = f"{source or '<config>'}:{lineno}: " if lineno else ""
        super().__init__(where + msg)
        self.lineno = lineno


@dataclass
class ExperimentConfig:
    """Everything a pipeline run needs.

    Attributes
    ----------
    initial_data : str
        ``sech2`` or ``file:<path>``.
    epsilons, times : list of float
    L : float
        Half-width of the periodic domain.
    N : int
        Grid size; 0 selects the default for each ``eps``.
    dt : float
        Time step bound; 0 selects the default for each ``eps``.
    tol : float
        Newton tolerance of the hodograph solve.
    hm_tol : float
        Stopping tolerance of the Painleve-II iteration.
    zone_points : int
        Samples of the Whitham zone.
    points : int
        Samples of the asymptotic curves.
    outdir : str
    preset : str
    order : str
        Multiscale order (``one_third`` or ``two_thirds``).
    jobs : int
        Worker processes for independent ``eps`` runs.
    """

    initial_data: str = "sech2"
    epsilons: list = field(default_factory=lambda: [0.08, 0.04, 0.02, 0.01])
    times: list = field(default_factory=lambda: [0.4])
    L: float = 15.0
    N: int = 0
    dt: float = 0.0
    tol: float = 1e-12
    hm_tol: float = 1e-14
    zone_points: int = 401
    points: int = 2001
    outdir: str = "dswlab-out"
    preset: str = ""
    order: str = "one_third"
    jobs: int = 1

    def validate(self):
        if self.preset and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}")
        for name in ("tol", "hm_tol", "L"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.dt < 0 or self.N < 0:
            raise ConfigError("dt and N must be non-negative")
        if not self.epsilons or any(e <= 0 for e in self.epsilons):
            raise ConfigError("epsilons must be a non-empty list of positive values")
        if not self.times or any(t < 0 for t in self.times):
            raise ConfigError("times must be a non-empty list of non-negative values")
        if self.order not in ("one_third", "two_thirds"):
            raise ConfigError("order must be one_third or two_thirds")
        if self.jobs < 1 or self.points < 2 or self.zone_points < 5:
            raise ConfigError("jobs, points or zone_points out of range")
        return self

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def dumps(self):
        out = []
        for k, v in self.as_dict().items():
            if isinstance(v, list):
                v = ",".join(repr(float(a)) for a in v)
            out.append(f"{k} = {v}")
        return "\n".join(out) + "\n"


PRESETS = {
    "figure1": {"epsilons": [0.1], "times": [0.0, 0.4]},
    "figure4": {"epsilons": [0.01], "times": [0.4]},
    "figure5": {"epsilons": [0.01], "times": [0.4]},
    "scaling": {"epsilons": [0.08, 0.04, 0.02, 0.01], "times": [0.4]},
    "zonewidth": {"epsilons": [0.08, 0.04, 0.02, 0.01], "times": [0.4]},
    "breakup": {"epsilons": [0.01], "times": [0.22, 0.25, 0.3]},
    "hastings-mcleod": {"epsilons": [0.01], "times": [0.4]},
}

_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _convert(key, raw):
    kind = _TYPES[key]
    try:
        if kind == "list" or kind is list:
            vals = [float(v) for v in raw.replace(" ", "").split(",") if v]
            if not vals:
                raise ValueError
            return vals
        if kind in ("int", int):
            return int(raw)
        if kind in ("float", float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return raw


def parse_config(text, source=None, base=None):
    """Parse ``key = value`` lines (``#`` comments) onto ``base``."""
    cfg = replace(base) if base is not None else ExperimentConfig()
    seen_preset = None
    updates = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {line!r}", n, source)
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"unknown key {key!r}", n, source)
        if not val:
            raise ConfigError(f"empty value for {key}", n, source)
        try:
            updates[key] = (_convert(key, val), n)
        except ConfigError as exc:
            raise ConfigError(str(exc), n, source) from None
        if key == "preset":
            seen_preset = (val, n)
    if seen_preset:
        name, n = seen_preset
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}", n, source)
        for k, v in PRESETS[name].items():
            setattr(cfg, k, v)
    # explicit keys win over the preset
    for key, (val, _) in updates.items():
        setattr(cfg, key, val)
    try:
        return cfg.validate()
    except ConfigError as exc:
        raise ConfigError(str(exc), None, source) from None


def load_config(path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def output_dir(default):
    """``DSWLAB_OUTDIR`` if set, else ``default``; created on demand."""
    d = Path(os.environ.get("DSWLAB_OUTDIR") or default)
    d.mkdir(parents=True, exist_ok=True)
    return d


def write_table(path, columns, data, meta=None):
    """Whitespace-delimited table, 17 significant digits, ``#`` header."""
    arr = np.column_stack([np.asarray(c, dtype=float).ravel() for c in data]) if data else np.empty((0, len(columns)))
    with open(path, "w") as fh:
        for k, v in (meta or {}).items():
            fh.write(f"# {k}: {v}\n")
        fh.write("# " + " ".join(columns) + "\n")
        np.savetxt(fh, arr, fmt="%.17g")
    return Path(path)


def read_table(path):
    """``(columns, array, meta)`` from a file written by :func:`write_table`."""
    meta, cols = {}, []
    with open(path) as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            s = line[1:].strip()
            if ": " in s:
                k, v = s.split(": ", 1)
                meta[k] = v
            else:
                cols = s.split()
        elif line.strip():
            body.append([float(v) for v in line.split()])
    return cols, np.array(body).reshape(len(body), len(cols)), meta


def write_gnuplot(data_path, columns, title=""):
    """Companion gnuplot script plotting every column against the first."""
    data_path = Path(data_path)
    script = data_path.with_suffix(".gp")
    plots = ", ".join(f"'{data_path.name}' using 1:{i + 1} with lines title '{c}'"
                      for i, c in enumerate(columns[1:], 1))
    script.write_text(
        "set terminal pngcairo size 1000,600\n"
        f"set output '{data_path.stem}.png'\n"
        f"set title '{title}'\nset xlabel '{columns[0]}'\n"
        f"plot {plots}\n")
    return script


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
