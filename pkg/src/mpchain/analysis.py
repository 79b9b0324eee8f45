"""Parameter sweeps, peak finding, finite-size scaling and table output."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .entanglement import finite_negativity, thermo_negativity
from .model import ModelParams
from .observables import one_site_entropy, two_point_transverse, two_point_zz

log = logging.getLogger(__name__)

QUANTITIES = ("entropy", "negativity", "correlator-zz", "correlator-xy")
CSV_HEADER = ("sigma", "mode", "g", "N", "r", "quantity", "value", "error")
DEFAULT_SCALING_NS = tuple(range(20, 90, 5))
# N*g window used for the collapse statistic; covers the rise and the peak
COLLAPSE_WINDOW = (1e-5, 0.8)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("MPCHAIN_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items):
    """Order-preserving map; parallel across processes if MPCHAIN_THREADS > 1."""
    items = list(items)
    n = worker_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# --- sweeps -------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    quantity: str
    g_min: float = 0.0
    g_max: float = 1.0
    g_count: int = 11
    g_scale: str = "linear"
    g_values: tuple[float, ...] | None = None
    N_list: tuple[int, ...] = ()
    r_list: tuple[int, ...] = (2,)
    sigmas: tuple[int, ...] = (1,)
    mode: str = "finite"
    log_base: str = "2"

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if self.mode not in ("finite", "thermo"):
            raise ValueError(f"mode must be finite or thermo, got {self.mode!r}")
        if self.g_scale not in ("linear", "log"):
            raise ValueError("g_scale must be linear or log")
        if self.g_values is None and self.g_count < 1:
            raise ValueError("empty g grid")
        if self.g_values is not None and len(self.g_values) == 0:
            raise ValueError("empty g grid")
        if self.g_scale == "log" and self.g_values is None and min(self.g_min, self.g_max) <= 0:
            raise ValueError("log g grid needs positive bounds")
        if not self.sigmas or any(s not in (1, -1) for s in self.sigmas):
            raise ValueError("sigmas must be a non-empty subset of {+1, -1}")
        if self.quantity != "entropy" and not self.r_list:
            raise ValueError("empty r list")
        if self.mode == "finite" and not self.N_list:
            raise ValueError("finite mode needs a non-empty N list")
        if self.mode == "thermo" and self.N_list:
            log.info("thermo mode ignores N_list %s", self.N_list)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown sweep fields: {sorted(unknown)}")
        d = dict(d)
        for key in ("g_values", "N_list", "r_list", "sigmas"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)

    def g_grid(self) -> np.ndarray:
        if self.g_values is not None:
            return np.asarray(self.g_values, dtype=float)
        if self.g_scale == "log":
            return np.logspace(math.log10(self.g_min), math.log10(self.g_max), self.g_count)
        return np.linspace(self.g_min, self.g_max, self.g_count)

    def points(self):
        """Grid points in lexicographic (sigma, g, N, r) order."""
        Ns = [math.inf] if self.mode == "thermo" else list(self.N_list)
        rs = [None] if self.quantity == "entropy" else list(self.r_list)
        for s in self.sigmas:
            for g in self.g_grid():
                for N in Ns:
                    for r in rs:
                        yield (s, float(g), N, r)


class Row(NamedTuple):
    sigma: int
    mode: str
    g: float
    N: float | None
    r: int | None
    quantity: str
    value: float | None
    error: str = ""


def evaluate(quantity: str, params: ModelParams, N, r, log_base="2") -> float:
    thermo = N == math.inf
    if quantity == "entropy":
        return one_site_entropy(params, None if thermo else int(N), base=log_base)
    if quantity == "negativity":
        return thermo_negativity(params, r) if thermo else finite_negativity(params, r, int(N))
    if quantity == "correlator-zz":
        return two_point_zz(params, r, None if thermo else int(N)).value
    if quantity == "correlator-xy":
        return two_point_transverse(params, r, None if thermo else int(N)).value
    raise ValueError(f"unknown quantity {quantity!r}")


def _sweep_point(job) -> Row:
    spec, (s, g, N, r) = job
    try:
        value = evaluate(spec.quantity, ModelParams(g, s), N, r, spec.log_base)
        return Row(s, spec.mode, g, N, r, spec.quantity, float(value))
    except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
        return Row(s, spec.mode, g, N, r, spec.quantity, None, str(exc))


def run_sweep(spec: SweepSpec) -> list[Row]:
    return pmap(_sweep_point, [(spec, p) for p in spec.points()])


def preset(name: str) -> list[SweepSpec]:
    """Sweep definitions whose output suffices to replot each figure."""
    odd = (15, 21, 25, 31, 35)
    presets = {
        "fig1": [SweepSpec("negativity", 0.005, 0.3, 30, "log", r_list=tuple(range(2, 41)), mode="thermo")],
        "fig2": [SweepSpec("entropy", -1.0, 1.0, 101, N_list=odd, sigmas=(1, -1))],
        "fig3": [SweepSpec("negativity", g_values=(0.01, 0.02, 0.03, 0.05), N_list=(40,), r_list=tuple(range(2, 21)))],
        # the figure's g is not given; 0.08 shows the finite entangled windows
        "fig4": [SweepSpec("negativity", g_values=(0.08,), N_list=tuple(range(8, 61)), r_list=(2, 3, 4, 5))],
        "fig5": [
            SweepSpec("negativity", 0.0, 0.3, 61, N_list=(15, 20, 25, 30, 35)),
            SweepSpec("negativity", 0.0, 0.3, 61, mode="thermo"),
        ],
        "fig5odd": [SweepSpec("negativity", -0.3, 0.3, 61, N_list=odd, sigmas=(-1,))],
    }
    if name not in presets:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(presets) + ['fig6']}")
    return presets[name]


# --- peaks and scaling -----------------------------------------------------------


@dataclass(frozen=True)
class Peak:
    N: int
    g_m: float
    E_m: float
    certified: bool


def _adjacent(g: float, sigma: int, N: int) -> float:
    return finite_negativity(ModelParams(g, sigma), 2, N)


def find_peak(params_base: ModelParams, N: int, g_lo=1e-4, g_hi=1.0, n_grid=200, xtol=1e-6, probe=1e-3) -> Peak:
    """Near-critical maximum of the adjacent-site negativity over g > 0.

    The profile rises like 2g, peaks at g ~ 1/N, dips and then climbs again
    towards the thermodynamic value, so the first interior local maximum of
    the log-spaced grid is the one refined by golden-section search.
    """
    if params_base.sigma != 1:
        raise ValueError("peak search is defined on the sigma = +1 branch")
    if N < 3:
        raise ValueError("N must be >= 3")
    s = params_base.sigma
    gs = np.logspace(math.log10(g_lo), math.log10(g_hi), n_grid)
    vals = np.array([_adjacent(g, s, N) for g in gs])
    if not np.any(vals > 0):
        raise ValueError(f"flat zero negativity profile at N={N}")
    interior = [k for k in range(1, n_grid - 1) if vals[k] >= vals[k - 1] and vals[k] >= vals[k + 1]]
    if not interior:
        raise ValueError(f"no interior maximum on the g grid at N={N}")
    k = interior[0]
    res = minimize_scalar(
        lambda g: -_adjacent(g, s, N),
        bracket=(gs[k - 1], gs[k], gs[k + 1]),
        method="golden",
        options={"xtol": xtol / gs[k]},
    )
    g_m, E_m = float(res.x), float(-res.fun)
    probes = [g for g in (g_m - probe, g_m + probe) if g > 0]
    certified = all(E_m >= _adjacent(g, s, N) for g in probes)
    return Peak(N, g_m, E_m, certified)


def _peak_job(N):
    return find_peak(ModelParams(0.01, 1), N)


def _collapse_job(job):
    N, xs = job
    return [math.log10(N * _adjacent(x / N, 1, N)) for x in xs]


@dataclass
class ScalingFit:
    slope_gm: float
    intercept_gm: float
    slope_Em: float
    intercept_Em: float
    N_list: list[int]
    rss_gm: float
    rss_Em: float
    collapse_scatter: float
    collapse_decades: float
    peaks: list[Peak] = field(default_factory=list)
    # (N, log10(N g), log10(N E)) triples
    collapse: list[tuple[int, float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["peaks"] = [asdict(p) for p in self.peaks]
        return d


def _ols(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    rss = float(((np.polyval([slope, intercept], x) - y) ** 2).sum())
    return float(slope), float(intercept), rss


def scaling_analysis(N_list=DEFAULT_SCALING_NS, window=COLLAPSE_WINDOW, n_collapse=41) -> ScalingFit:
    """Peak laws log10 g_m, log10 E_m vs log10 N and the N*E vs N*g collapse.

    Every N is sampled at g = x/N on one common log grid of x = N*g, so the
    spread across N at fixed x needs no interpolation.
    """
    N_list = [int(N) for N in N_list]
    if len(N_list) < 2:
        raise ValueError("need at least two system sizes")
    peaks = pmap(_peak_job, N_list)
    logN = np.log10(N_list)
    sg, ig, rg = _ols(logN, np.log10([p.g_m for p in peaks]))
    se, ie, re = _ols(logN, np.log10([p.E_m for p in peaks]))

    lx = np.linspace(math.log10(window[0]), math.log10(window[1]), n_collapse)
    xs = 10**lx
    Y = np.array(pmap(_collapse_job, [(N, xs) for N in N_list]))
    scatter = float((Y.max(axis=0) - Y.min(axis=0)).max())
    collapse = [(N, float(x), float(y)) for N, row in zip(N_list, Y) for x, y in zip(lx, row)]
    return ScalingFit(sg, ig, se, ie, N_list, rg, re, scatter, float(lx[-1] - lx[0]), peaks, collapse)


def scaling_rows(fit: ScalingFit) -> list[Row]:
    rows = []
    for p in fit.peaks:
        rows.append(Row(1, "finite", p.g_m, p.N, 2, "g_m", p.g_m))
        rows.append(Row(1, "finite", p.g_m, p.N, 2, "E_m", p.E_m))
    for name in ("slope_gm", "intercept_gm", "slope_Em", "intercept_Em", "collapse_scatter", "collapse_decades"):
        rows.append(Row(1, "finite", None, None, None, name, getattr(fit, name)))
    for N, lx, ly in fit.collapse:
        rows.append(Row(1, "finite", 10**lx / N, N, 2, "log10_NE", ly))
    return rows


# --- output -------------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if x == math.inf:
        return "inf"
    return format(x, ".17g")


def _fmt_int(x) -> str:
    if x is None:
        return ""
    if x == math.inf:
        return "inf"
    return str(int(x))


def report(rows, fmt: str = "csv", extra: dict | None = None) -> bytes:
    """Serialize rows; floats carry 17 significant digits (CSV) or repr (JSON)."""
    rows = list(rows)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in rows:
            w.writerow([
                str(row.sigma), row.mode, _fmt(row.g), _fmt_int(row.N), _fmt_int(row.r),
                row.quantity, _fmt(row.value), row.error,
            ])
        return buf.getvalue().encode()
    if fmt == "json":
        doc = {"rows": [_json_row(r) for r in rows]}
        if extra:
            doc.update(extra)
        return (json.dumps(doc, indent=1, sort_keys=True) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}")


def _json_row(row: Row) -> dict:
    d = row._asdict()
    if d["N"] == math.inf:
        d["N"] = "inf"
    elif d["N"] is not None:
        d["N"] = int(d["N"])
    return d


def parse_csv(data: bytes) -> list[Row]:
    reader = csv.reader(io.StringIO(data.decode()))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected header {header}")

    def num(s, kind=float):
        if s == "":
            return None
        if s == "inf":
            return math.inf
        return kind(s)

    return [
        Row(int(s), mode, num(g), num(N, int), num(r, int), q, num(v), err)
        for s, mode, g, N, r, q, v, err in reader
    ]


def write_output(data: bytes, path: str | None):
    if path is None:
        return
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write output to {path}: {exc}") from exc
