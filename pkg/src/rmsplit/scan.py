"""Prime-range scans, their records and aggregate reports.

Four modes share one record shape (see CSV_COLUMNS):

  satotate       Frobenius data and split classes of a registry curve
  heckenear      Hecke orbits of a base point versus a compact HZ divisor
  lattice-bench  depth of contact in a seeded synthetic filtration model
  hz-audit       nonemptiness predicate versus witness search for T(p), T(pD)
"""
import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from sympy import primerange

from . import frob, hecke, hzdiv, spend
from .errors import ConfigError, DomainError, NonConvergenceError, NumericError
from .numberfield import QuadraticField, SplittingType, split_generator, splitting_type

MODES = ("satotate", "heckenear", "lattice-bench", "hz-audit")
CSV_COLUMNS = ("p", "mode", "a1", "a2", "s1", "s2", "class",
               "min_proximity", "neglog_sum", "depth", "status")
DEFAULT_BASE = (0.3 + 1.1j, -0.2 + 0.9j)
REPORT_EPSILONS = (0.05, 0.1, 0.2)


@dataclass
class ScanConfig:
    mode: str = "satotate"
    D: int = None                 # None: the curve's field, or 5
    curve: str = "x5p1"
    registry: str = None
    nmin: int = None              # None: ceil(sqrt(nmax))
    nmax: int = 100
    epsilon: float = 0.1
    seed: int = 0
    base_point: tuple = DEFAULT_BASE
    divisor_height: int = None    # heckenear: None means q D
    ell: int = 2
    e_v: int = 1
    n0: int = 1
    lambda_rank: int = 1
    audit_height: int = 400       # hz-audit: witness height is min(10 r, this)
    bins: int = 20
    workers: int = 1

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; choose from {', '.join(MODES)}")
        if self.nmax is None or self.nmax < 1:
            raise ConfigError("nmax must be a positive integer")
        if self.nmin is None:
            self.nmin = math.isqrt(self.nmax - 1) + 1
        if self.nmin < 1 or self.nmin > self.nmax:
            raise ConfigError(f"empty range [{self.nmin}, {self.nmax}]")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if self.ell < 2 or self.e_v < 1 or self.n0 < 1 or self.lambda_rank not in (0, 1, 2):
            raise ConfigError("need ell >= 2, e_v >= 1, n0 >= 1, lambda_rank in {0, 1, 2}")
        if self.bins < 1 or self.workers < 1 or self.audit_height < 1:
            raise ConfigError("bins, workers and audit_height must be positive")
        if self.D is not None:
            try:
                QuadraticField.from_discriminant(self.D)
            except DomainError as e:
                raise ConfigError(str(e)) from e
        z1, z2 = self.base_point
        if complex(z1).imag <= 0 or complex(z2).imag <= 0:
            raise ConfigError("base point must lie in H^2")
        return self


@dataclass
class ScanRecord:
    p: int
    mode: str
    a1: int = None
    a2: int = None
    s1: float = None
    s2: float = None
    cls: str = None
    min_proximity: float = None
    neglog_sum: float = None
    depth: int = None
    status: str = "ok"
    elapsed: float = field(default=0.0, compare=False)

    def row(self):
        """Field values in CSV_COLUMNS order (timing excluded)."""
        return [self.p, self.mode, self.a1, self.a2, self.s1, self.s2, self.cls,
                self.min_proximity, self.neglog_sum, self.depth, self.status]

    def as_dict(self):
        return dict(zip(CSV_COLUMNS, self.row()))

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["cls"] = d.pop("class", None)
        return cls(**{f.name: d[f.name] for f in fields(cls) if f.name in d})


# per-mode workers --------------------------------------------------------------------

def _smallest_inert(F):
    return next(q for q in primerange(2, 10 ** 6) if splitting_type(F, q) is SplittingType.INERT)


def _satotate_chunk(ctx, primes):
    C, D = ctx["curve"], ctx["D"]
    lo, hi = primes[0], primes[-1]
    t0 = time.perf_counter()
    summary = frob.sato_tate_scan(C, D, hi, xmin=lo)
    out = [ScanRecord(p, "satotate", cls=frob.SplitKind.BAD.value, status="skip:bad-prime")
           for p in summary.bad_primes]
    for p, data, c in summary.records:
        out.append(ScanRecord(p, "satotate", data.a1, data.a2, c.s1, c.s2, c.kind.value))
    dt = (time.perf_counter() - t0) / max(1, len(out))
    for r in out:
        r.elapsed = dt
    return out


def _heckenear_one(ctx, p):
    F, base, comps, eps = ctx["field"], ctx["base"], ctx["components"], ctx["epsilon"]
    if splitting_type(F, p) is not SplittingType.SPLIT:
        return ScanRecord(p, "heckenear", status="skip:not-split")
    lam = split_generator(F, p)
    if lam is None:
        return ScanRecord(p, "heckenear", status="skip:no-generator")
    try:
        orbit = hecke.hecke_orbit(base, p, lam)
    except NonConvergenceError:
        return ScanRecord(p, "heckenear", status="error:nonconvergent-reduction")
    except NumericError:
        return ScanRecord(p, "heckenear", status="error:numeric")
    mins = orbit_minima(orbit, comps)
    if np.any(mins <= 0):
        return ScanRecord(p, "heckenear", min_proximity=0.0, status="error:on-divisor")
    neglog = float(-np.sum(np.log(mins)))
    flag = neglog >= eps * p * math.log(p)
    return ScanRecord(p, "heckenear", min_proximity=float(mins.min()), neglog_sum=neglog,
                      status="flag" if flag else "ok")


def orbit_minima(points, components):
    """For each point, its least proximity to any of the components."""
    if not components:
        raise ConfigError("no divisor components configured")
    a = np.array([float(M.a) for M in components])
    b = np.array([float(M.b) for M in components])
    g = np.array([M.gamma.embeddings() for M in components])
    out = []
    for z in points:
        v = a * z.z1 * z.z2 + g[:, 0] * z.z1 + g[:, 1] * z.z2 + b
        out.append(np.abs(v).min())
    return np.array(out)


def synthetic_model(seed, ell=2, e_v=1, n0=1, lambda_rank=1, rank=4):
    """Seeded FiltrationModel with a unimodular Gram matrix and a primitive Lambda."""
    rng = np.random.default_rng(seed)
    while True:
        # unit upper triangular A keeps det G = 1 and small minima
        A = np.triu(rng.integers(-1, 2, size=(rank, rank)), 1) + np.eye(rank, dtype=np.int64)
        G = (A.T @ A).tolist()
        rows = rng.integers(-2, 3, size=(lambda_rank, rank)).tolist()
        if spend.is_primitive(rows, rank) and len(rows) == lambda_rank:
            try:
                return spend.FiltrationModel(spend.QuadLattice(G), rows, ell, e_v, n0)
            except DomainError:
                continue


def contact_depth(model, value, max_levels=64, cache=None):
    """Largest n with value represented by M_n: (n, status).

    n is None with status "no-contact" when M itself misses the value, and
    with status "unbounded" once the projection argument forces every
    representation into Lambda (then all deeper levels represent it too).
    """
    cache = {} if cache is None else cache
    if "rho2" not in cache:
        cache["rho2"] = spend._projected_min_sq(model) if model.m_prime < model.m else None
    rho2 = cache["rho2"]
    depth = None
    for k in range(max_levels + 1):
        n = model.n0 + k * model.e_v
        if n not in cache:
            cache[n] = spend.filtration_lattice(model, n)
        if not spend.represents_value(cache[n], value):
            return depth, "ok" if depth is not None else "no-contact"
        depth = n
        if rho2 is None or model.ell ** (2 * k) * rho2 > value:
            return None, "unbounded"
    return depth, "ok"


def _lattice_one(ctx, p):
    depth, status = contact_depth(ctx["model"], p, cache=ctx.setdefault("levels", {}))
    if status == "ok":
        if depth >= ctx["t_log"]:
            status = "deep"
        elif depth >= ctx["t_loglog"]:
            status = "mid"
    return ScanRecord(p, "lattice-bench", depth=depth, status=status)


def _hz_state(r, F, H):
    nonempty = hzdiv.hz_nonempty(r, F)
    witness = hzdiv.has_witness(r, F, H=min(10 * r, H))
    if not nonempty:
        label = "empty"
    else:
        label = "compact" if hzdiv.hz_is_compact(r, F) else "noncompact"
    ok = nonempty == witness
    if nonempty:
        ram = hzdiv.quaternion_ramified_primes(F.D, -r)
        ok = ok and (bool(ram) == (label == "compact"))
    return label, ok


def _hz_one(ctx, p):
    F, H = ctx["field"], ctx["audit_height"]
    a, ok_a = _hz_state(p, F, H)
    b, ok_b = _hz_state(p * F.D, F, H)
    return ScanRecord(p, "hz-audit", cls=f"{a}/{b}", status="ok" if ok_a and ok_b else "mismatch")


_ONE = {"heckenear": _heckenear_one, "lattice-bench": _lattice_one, "hz-audit": _hz_one}


def _run_chunk(mode, ctx, primes):
    if mode == "satotate":
        return _satotate_chunk(ctx, primes)
    out = []
    for p in primes:
        t0 = time.perf_counter()
        rec = _ONE[mode](ctx, p)
        rec.elapsed = time.perf_counter() - t0
        out.append(rec)
    return out


def thresholds(config):
    """(ceil(3 e_v log log N), ceil(e_v log N / log ell)) at N = nmax."""
    N = max(config.nmax, 3)
    return (math.ceil(3 * config.e_v * math.log(math.log(N))),
            math.ceil(config.e_v * math.log(N) / math.log(config.ell)))


def _context(config):
    ctx = {"epsilon": config.epsilon}
    if config.mode == "satotate":
        entry = frob.get_curve(config.curve, config.registry)
        ctx["curve"] = entry.curve
        ctx["D"] = config.D if config.D is not None else entry.D
        return ctx
    F = QuadraticField.from_discriminant(config.D if config.D is not None else 5)
    ctx["field"] = F
    if config.mode == "heckenear":
        q = _smallest_inert(F)
        H = config.divisor_height if config.divisor_height is not None else q * F.D
        ctx["base"] = hecke.PointH2(*config.base_point)
        ctx["components"] = hzdiv.enumerate_components(q * F.D, F, H=H)
    elif config.mode == "lattice-bench":
        ctx["model"] = synthetic_model(config.seed, config.ell, config.e_v, config.n0,
                                       config.lambda_rank)
        ctx["t_loglog"], ctx["t_log"] = thresholds(config)
    else:
        ctx["audit_height"] = config.audit_height
    return ctx


def run_scan(config):
    """Records for every odd prime in [nmin, nmax], sorted by p.

    Raises ConfigError for invalid settings and RegistryError for an unknown
    curve; per-prime failures become records with an error status.
    """
    config.validate()
    primes = [int(p) for p in primerange(max(3, config.nmin), config.nmax + 1)]
    if not primes:
        return []
    ctx = _context(config)
    w = min(config.workers, len(primes))
    chunks = [list(c) for c in np.array_split(primes, w) if len(c)]
    chunks = [[int(p) for p in c] for c in chunks]
    if w == 1:
        results = [_run_chunk(config.mode, ctx, chunks[0])]
    else:
        with ProcessPoolExecutor(w) as pool:
            results = list(pool.map(_run_chunk, [config.mode] * len(chunks),
                                    [ctx] * len(chunks), chunks))
    records = [r for chunk in results for r in chunk]
    records.sort(key=lambda r: r.p)
    return records


# persistence -----------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def to_csv(records):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_COLUMNS)
    for r in records:
        wr.writerow([_fmt(v) for v in r.row()])
    return buf.getvalue()


def _config_dict(config):
    d = asdict(config)
    d["base_point"] = [[complex(z).real, complex(z).imag] for z in config.base_point]
    d.pop("workers")
    return d


def to_json(records, config=None):
    doc = {"columns": list(CSV_COLUMNS),
           "config": None if config is None else _config_dict(config),
           "records": [r.as_dict() for r in records]}
    return json.dumps(doc, indent=2) + "\n"


def config_from_dict(d):
    d = dict(d)
    if "base_point" in d:
        d["base_point"] = tuple(complex(x, y) for x, y in d["base_point"])
    return ScanConfig(**d)


def read_records(path):
    """(records, config or None) from a JSON or CSV scan file."""
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".json"):
        doc = json.loads(text)
        cfg = doc.get("config")
        return ([ScanRecord.from_dict(r) for r in doc["records"]],
                None if cfg is None else config_from_dict(cfg))
    rows = list(csv.DictReader(io.StringIO(text)))
    if rows and set(rows[0]) != set(CSV_COLUMNS):
        raise ConfigError(f"{path}: unexpected CSV header")
    conv = {"p": int, "a1": int, "a2": int, "depth": int, "s1": float, "s2": float,
            "min_proximity": float, "neglog_sum": float}
    recs = []
    for row in rows:
        d = {k: (None if v == "" else conv.get(k, str)(v)) for k, v in row.items()}
        recs.append(ScanRecord.from_dict(d))
    return recs, None


# report ----------------------------------------------------------------------------

def _table(columns, rows=()):
    return {"columns": list(columns), "rows": [list(r) for r in rows]}


def report(records, config=None):
    """Aggregate tables computed from the records alone (plus config thresholds)."""
    config = config or ScanConfig()
    tables = {}

    counts = {}
    for r in records:
        if r.cls is not None:
            counts[r.cls] = counts.get(r.cls, 0) + 1
    tables["class_counts"] = _table(("class", "count"), sorted(counts.items()))

    status = {}
    for r in records:
        status[r.status] = status.get(r.status, 0) + 1
    tables["status_counts"] = _table(("status", "count"), sorted(status.items()))

    good = [r for r in records if r.mode == "satotate" and r.a1 is not None]
    rows, split, total = [], 0, 0.0
    for r in good:
        total += 1 / math.sqrt(r.p)
        if r.cls in (frob.SplitKind.SPLIT_RATIONAL.value, frob.SplitKind.SPLIT_EQUAL.value):
            split += 1
        rows.append((r.p, split, total, split / total))
    tables["split_vs_sum_inv_sqrt"] = _table(("p", "split_count", "sum_inv_sqrt", "ratio"), rows)

    rows = []
    if good:
        bins = config.bins
        edges = np.linspace(-2, 2, bins + 1)
        hist, _, _ = np.histogram2d([r.s1 for r in good], [r.s2 for r in good],
                                    bins=[edges, edges])
        expected = frob.st_bin_masses(bins, ordered=True) * len(good)
        for i in range(bins):
            for j in range(bins):
                rows.append((i, j, float(edges[i]), float(edges[i + 1]), float(edges[j]),
                             float(edges[j + 1]), int(hist[i, j]), float(expected[i, j])))
    tables["st_histogram"] = _table(("i", "j", "s1_lo", "s1_hi", "s2_lo", "s2_hi",
                                     "observed", "expected"), rows)

    near = [r for r in records if r.mode == "heckenear" and r.neglog_sum is not None]
    rows = []
    if near:
        for eps in sorted(set(REPORT_EPSILONS) | {config.epsilon}):
            k = sum(1 for r in near if r.neglog_sum >= eps * r.p * math.log(r.p))
            rows.append((eps, len(near), k, k / len(near)))
    tables["epsilon_exceedance"] = _table(("epsilon", "primes", "exceeding", "fraction"), rows)
    tables["heckenear_minima"] = _table(
        ("p", "min_proximity", "neglog_sum"),
        [(r.p, r.min_proximity, r.neglog_sum) for r in near])

    bench = [r for r in records if r.mode == "lattice-bench"]
    rows = []
    if bench:
        t1, t2 = thresholds(config)
        finite = [r.depth for r in bench if r.depth is not None]
        unbounded = sum(1 for r in bench if r.status == "unbounded")
        rows.append((config.nmax, len(bench), t1, sum(d >= t1 for d in finite) + unbounded,
                     t2, sum(d >= t2 for d in finite) + unbounded))
    tables["depth_thresholds"] = _table(("N", "primes", "loglog_threshold", "at_or_above_loglog",
                                         "log_threshold", "at_or_above_log"), rows)
    return tables


def report_json(tables):
    return json.dumps(tables, indent=2) + "\n"


def report_csv(tables):
    out = []
    for name, t in tables.items():
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(t["columns"])
        for row in t["rows"]:
            wr.writerow([_fmt(v) for v in row])
        out.append(f"# {name}\n{buf.getvalue()}")
    return "\n".join(out)
