"""Command line entry point: rmsplit <subcommand> [options].

Exit codes: 0 success, 2 configuration or argument error, 3 registry error.
"""
import argparse
import sys

from . import hecke, hzdiv, qform, scan, spend
from .errors import ConfigError, RegistryError
from .numberfield import (QuadraticField, fundamental_unit, split_generator,
                          splitting_type)

EXIT_OK, EXIT_CONFIG, EXIT_REGISTRY = 0, 2, 3


def _field(args):
    return QuadraticField.from_discriminant(args.discriminant)


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_field(args):
    F = _field(args)
    lines = [f"field Q(sqrt {F.d}), discriminant {F.D}",
             f"fundamental unit {fundamental_unit(F)}"]
    for p in args.prime or []:
        lam = split_generator(F, p)
        lines.append(f"p={p} {splitting_type(F, p).name.lower()} generator={lam}")
    _emit("\n".join(lines) + "\n", args.out)


def cmd_hz(args):
    F = _field(args)
    r = args.r
    comps = hzdiv.enumerate_components(r, F, H=args.height)
    lines = [f"T({r}) over D={F.D}",
             f"nonempty {hzdiv.hz_nonempty(r, F)}",
             f"compact {hzdiv.hz_is_compact(r, F)}",
             f"ramified {sorted(hzdiv.quaternion_ramified_primes(F.D, -r))}",
             f"components with height <= {args.height}: {len(comps)}"]
    for M in comps[:args.show]:
        lines.append(f"  a={M.a} b={M.b} gamma={M.gamma}")
    _emit("\n".join(lines) + "\n", args.out)


def cmd_hecke(args):
    F = _field(args)
    lam = split_generator(F, args.prime)
    if lam is None:
        raise ConfigError(f"{args.prime} is inert in F; no Hecke orbit")
    z = hecke.PointH2(complex(args.z1), complex(args.z2))
    orbit = hecke.hecke_orbit(z, args.prime, lam)
    lines = [f"lambda={lam}; {len(orbit)} orbit points (reduced)"]
    for w in orbit:
        lines.append(f"  {w.z1.real:.10f}{w.z1.imag:+.10f}i  {w.z2.real:.10f}{w.z2.imag:+.10f}i")
    _emit("\n".join(lines) + "\n", args.out)


def cmd_qform(args):
    lines = []
    if args.disc is not None:
        forms = qform.reduced_forms(args.disc)
        lines.append(f"h({args.disc}) = {len(forms)}")
        lines += [f"  {Q.triple()}" for Q in forms]
    if args.form:
        Q = qform.reduce(qform.BinaryQF(*args.form))
        lines.append(f"reduced {Q.triple()} disc {Q.disc}")
        if args.represent is not None:
            lines.append(f"represents {args.represent}: {qform.represents(Q, args.represent)}")
        if args.count is not None:
            n, bound = qform.count_represented_interval(Q, args.count)
            lines.append(f"represented in [sqrt N, N]: {n} (bound {bound:.3f})")
    if not lines:
        raise ConfigError("give --disc and/or --form")
    _emit("\n".join(lines) + "\n", args.out)


def _parse_gram(text):
    try:
        return [[int(x) for x in row.split()] for row in text.split(";")]
    except ValueError as e:
        raise ConfigError(f"bad --gram {text!r}") from e


def cmd_lattice(args):
    L = spend.QuadLattice(_parse_gram(args.gram))
    n, bound = spend.count_short(L, args.N)
    lines = [f"rank {L.rank} det {L.det()}",
             f"successive minima^2 {list(spend.successive_minima_sq(L))}",
             f"#{{Q(v) <= {args.N}}} = {n}  (Schmidt bound {bound:.1f})"]
    _emit("\n".join(lines) + "\n", args.out)


def cmd_scan(args):
    cfg = scan.ScanConfig(mode=args.mode, D=args.discriminant, curve=args.curve,
                          registry=args.registry, nmin=args.nmin, nmax=args.nmax,
                          epsilon=args.epsilon, seed=args.seed, workers=args.workers)
    records = scan.run_scan(cfg)
    text = scan.to_csv(records) if args.format == "csv" else scan.to_json(records, cfg)
    _emit(text, args.out)
    if args.out:
        print(f"{len(records)} records -> {args.out}", file=sys.stderr)


def cmd_report(args):
    try:
        records, cfg = scan.read_records(args.input)
    except (OSError, ValueError, KeyError) as e:
        raise ConfigError(f"cannot read {args.input}: {e}") from e
    tables = scan.report(records, cfg)
    _emit(scan.report_csv(tables) if args.format == "csv" else scan.report_json(tables), args.out)


def build_parser():
    ap = argparse.ArgumentParser(prog="rmsplit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, disc=True):
        if disc:
            p.add_argument("--discriminant", "-D", type=int, default=5)
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        return p

    p = common(sub.add_parser("field", help="fundamental unit, splitting, generators"))
    p.add_argument("--prime", type=int, action="append")
    p.set_defaults(func=cmd_field)

    p = common(sub.add_parser("hz", help="Hirzebruch-Zagier divisor T(r)"))
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--height", type=int, default=10)
    p.add_argument("--show", type=int, default=5)
    p.set_defaults(func=cmd_hz)

    p = common(sub.add_parser("hecke", help="reduced Hecke orbit of a point"))
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--z1", default="0.3+1.1j")
    p.add_argument("--z2", default="-0.2+0.9j")
    p.set_defaults(func=cmd_hecke)

    p = common(sub.add_parser("qform", help="binary quadratic forms"), disc=False)
    p.add_argument("--disc", type=int)
    p.add_argument("--form", type=int, nargs=3, metavar=("A", "B", "C"))
    p.add_argument("--represent", type=int)
    p.add_argument("--count", type=int, metavar="N")
    p.set_defaults(func=cmd_qform)

    p = common(sub.add_parser("lattice", help="short vectors and minima"), disc=False)
    p.add_argument("--gram", required=True, help='rows separated by ";", e.g. "2 1;1 2"')
    p.add_argument("--N", type=int, default=10)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("scan", help="run a prime-range scan")
    p.add_argument("--mode", choices=scan.MODES, default="satotate")
    p.add_argument("--discriminant", "-D", type=int, default=None)
    p.add_argument("--curve", default="x5p1")
    p.add_argument("--registry", default=None, help="curve registry file")
    p.add_argument("--nmin", type=int, default=None)
    p.add_argument("--nmax", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("report", help="aggregate tables from a scan file")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except RegistryError as e:
        print(f"registry error: {e}", file=sys.stderr)
        return EXIT_REGISTRY
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
