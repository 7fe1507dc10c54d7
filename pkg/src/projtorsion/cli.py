"""Command line front end.

Exit codes: 0 success, 2 well-defined negative verdict (not flat, not
equivalent), 1 bad input or evaluation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import __version__
from .affine import (
    AffineConnection,
    DimensionMismatch,
    DimensionTooSmall,
    recover_rho,
)
from .fields import EXACT, FLOAT, DomainError, Expression, fmt_scalar, parse_scalar, sample_points, to_source
from .projective import SingularJacobian, curvature, hlavaty, normalize
from .tw import (
    VolumeConnection,
    normal_tw,
    structural_equiv_beta,
    tw_curvature,
    tw_from_connection,
    tw_ricci,
)
from . import torus

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# input


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno} (offset {exc.pos}): {exc.msg}") from None


def load_connection(path, mode=None) -> AffineConnection:
    doc = load_json(path)
    try:
        c = AffineConnection.from_dict(doc)
        if mode is not None and mode != c.mode:
            c = AffineConnection(c.n, c.gamma, mode)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    return c


def load_points(args, n):
    if args.points:
        doc = load_json(args.points)
        if not isinstance(doc, list) or not all(isinstance(p, list) for p in doc):
            raise InputError(f"{args.points}: expected a list of points")
        pts = []
        for p in doc:
            if len(p) != n:
                raise InputError(f"{args.points}: point {p} does not have {n} coordinates")
            try:
                pts.append(tuple(parse_scalar(x) for x in p))
            except (ValueError, ZeroDivisionError):
                raise InputError(f"{args.points}: bad coordinate in {p}") from None
        if not pts:
            raise InputError(f"{args.points}: no points")
    else:
        pts = sample_points(n, args.samples, args.seed)
    if args.mode == FLOAT:
        pts = [tuple(float(x) for x in p) for p in pts]
    return pts


# ---------------------------------------------------------------------------
# output helpers


def _key(*idx):
    return ",".join(str(i + 1) for i in idx)


def grid_dict(grid, depth):
    out = {}

    def rec(g, idx):
        if len(idx) == depth:
            out[_key(*idx)] = fmt_scalar(g)
            return
        for i, sub in enumerate(g):
            rec(sub, idx + (i,))

    rec(grid, ())
    return out


def field_out(f, constant_value=None):
    if constant_value is not None:
        return fmt_scalar(constant_value)
    if isinstance(f, Expression):
        return to_source(f)
    return None


def fields_dict(grid, depth, at=None, mode=None):
    """Expression sources, or values when every field is constant."""
    out = {}

    def rec(g, idx):
        if len(idx) == depth:
            if g.is_constant and at is not None:
                out[_key(*idx)] = fmt_scalar(g.jet(at, mode).value)
            else:
                out[_key(*idx)] = field_out(g)
            return
        for i, sub in enumerate(g):
            rec(sub, idx + (i,))

    rec(grid, ())
    return out


def write_report(report, args):
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _origin(n, mode):
    return tuple(0.0 if mode == FLOAT else Fraction(0) for _ in range(n))


# ---------------------------------------------------------------------------
# commands


def _normal_report(c, args, with_curvature=True):
    d = normalize(c)
    pts = load_points(args, c.n)
    n = c.n
    o = _origin(n, c.mode)
    report = {
        "n": n,
        "mode": c.mode,
        "mu": [field_out(m, m.jet(o, c.mode).value if m.is_constant else None) for m in d.mu.components],
        "nu": [field_out(m, m.jet(o, c.mode).value if m.is_constant else None) for m in d.nu.components],
        "pi_upper": fields_dict(d.pi_upper, 3, o, c.mode),
        "pi_lower": grid_dict(d.lower_values(o), 2) if c.is_constant else None,
    }
    flat = tors_free = curv_free = True
    at = []
    if with_curvature:
        for p in pts:
            r = curvature(d, p)
            tors_free = tors_free and r.torsion_vanishes()
            curv_free = curv_free and r.curvature_vanishes()
            flat = tors_free and curv_free
            entry = {"point": [fmt_scalar(x) for x in r.point]}
            if not c.is_constant:
                entry["pi_lower"] = grid_dict(d.lower_values(p), 2)
            entry.update({"K": grid_dict(r.K_torsion, 3), "k": grid_dict(r.k_curv, 4),
                          "K_lower": grid_dict(r.omega_lower, 3)})
            at.append(entry)
    report["curvature_at"] = at
    report["torsion_free"] = tors_free if with_curvature else None
    report["curvature_free"] = curv_free if with_curvature else None
    report["flat"] = flat if with_curvature else None
    return report, flat


def cmd_normalize(args):
    c = load_connection(args.connection, args.mode)
    report, _ = _normal_report(c, args, with_curvature=False)
    write_report(report, args)
    return EXIT_OK


def cmd_curvature(args):
    c = load_connection(args.connection, args.mode)
    report, _ = _normal_report(c, args)
    write_report(report, args)
    return EXIT_OK


def cmd_flat(args):
    c = load_connection(args.connection, args.mode)
    report, flat = _normal_report(c, args)
    write_report(report, args)
    return EXIT_OK if flat else EXIT_NEGATIVE


def cmd_equivalent(args):
    a = load_connection(args.first, args.mode)
    b = load_connection(args.second, args.mode)
    if a.n != b.n:
        raise InputError(f"dimension mismatch: {a.n} vs {b.n}")
    rho = recover_rho(a, b, args.samples, args.seed)
    if rho:
        report = {"equivalent": True}
        if all(r.is_constant for r in rho.components):
            report["rho"] = [fmt_scalar(v) for v in rho.values(_origin(a.n, a.mode))]
        else:
            report["rho"] = [to_source(r) for r in rho.components]
            report["rho_at"] = [{"point": [fmt_scalar(x) for x in p], "rho": [fmt_scalar(v) for v in rho.values(p)]}
                                for p in load_points(args, a.n)]
        write_report(report, args)
        return EXIT_OK
    report = {"equivalent": False, "reason": rho.reason,
              "point": [fmt_scalar(x) for x in rho.point] if rho.point else None}
    write_report(report, args)
    return EXIT_NEGATIVE


def cmd_hlavaty(args):
    c = load_connection(args.connection, args.mode)
    phi = hlavaty(c)
    write_report({"n": c.n, "phi": fields_dict(phi, 3, _origin(c.n, c.mode), c.mode)}, args)
    return EXIT_OK


def cmd_tw(args):
    c = load_connection(args.connection, args.mode)
    t, v = normal_tw(c)
    n = c.n
    o = _origin(n, c.mode)
    pts = load_points(args, n)
    report = {
        "n": n,
        "alpha": fields_dict(t.alpha, 3, o, c.mode),
        "beta": grid_dict(t.values(o)[1], 2) if c.is_constant else None,
        "f": [field_out(x, x.jet(o, c.mode).value if x.is_constant else None) for x in v.f],
        "curvature_at": [],
        "ricci_at": [],
    }
    for p in pts:
        cv = tw_curvature(t, p)
        entry = {"point": [fmt_scalar(x) for x in p]}
        if not c.is_constant:
            entry["beta"] = grid_dict(t.values(p)[1], 2)
        entry["R"] = [[grid_dict(cell, 2) for cell in row] for row in cv.matrix()]
        report["curvature_at"].append(entry)
        report["ricci_at"].append({"point": [fmt_scalar(x) for x in p], "ricci": grid_dict(tw_ricci(t, p), 2)})
    write_report(report, args)
    return EXIT_OK


def cmd_tw_equiv(args):
    a = load_connection(args.first, args.mode)
    b = load_connection(args.second, args.mode)
    if a.n != b.n:
        raise InputError(f"dimension mismatch: {a.n} vs {b.n}")
    zero = VolumeConnection.zero(a.n)
    t1, t2 = tw_from_connection(a, zero), tw_from_connection(b, zero)
    beta = structural_equiv_beta(t1, t2, args.samples, args.seed)
    if not beta:
        write_report({"structurally_equivalent": False, "reason": beta.reason}, args)
        return EXIT_NEGATIVE
    pts = load_points(args, a.n)
    write_report({
        "structurally_equivalent": True,
        "beta_at": [{"point": [fmt_scalar(x) for x in p], "beta": grid_dict(beta.values(p), 2)} for p in pts],
    }, args)
    return EXIT_OK


def cmd_torus_scan(args):
    samples = torus.solve_variety(args.seed, args.count)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tau1", "tau2", "tau3", "tau4", "tau5", "tau6", "F", "G", "residual", "rank", "has_torsion"])
    for s in samples:
        w.writerow([repr(float(x)) for x in s.tau] + [repr(float(s.F)), repr(float(s.G)), repr(s.residual),
                                                       s.rank, str(s.has_torsion).lower()])
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def _verify_examples():
    import sympy

    checks = []

    def add(name, ok, detail=None):
        checks.append({"check": name, "pass": bool(ok), **({"detail": detail} if detail else {})})

    ts = torus.SAMPLE_TAU
    ct = torus.complete_tau(ts)
    add("sample F=G=0", torus.F_G(ts) == (0, 0))
    add("sample Pi_11=-1", ct.lower == ((-1, 0), (0, 0)))
    add("sample torsion", torus.torsion_of(ts) == (0, -2))
    m = torus.family_first_vanishing(Fraction(1), Fraction(1), Fraction(-1))
    add("first-vanishing (1,1,-1) is the sample", m.tau == ts)
    for a, b, c in [(Fraction(2), Fraction(3), Fraction(5)), (Fraction(-1, 2), Fraction(7, 3), Fraction(1, 4))]:
        m = torus.family_first_vanishing(a, b, c)
        add(f"first-vanishing ({a},{b},{c}) F=G=0", torus.F_G(m.tau) == (0, 0))
        add(f"first-vanishing ({a},{b},{c}) Pi_11", m.completed.lower[0][0] == Fraction(3, 2) * b * c + b * b / 2)
        add(f"first-vanishing ({a},{b},{c}) rho^2", m.tw_torsion[1] == (b - c) / 3)
    for label, th in [("pi/6", sympy.pi / 6), ("pi/4", sympy.pi / 4), ("pi/3", sympy.pi / 3)]:
        for case in ("zero", "curved"):
            m = torus.family_rotating(th, 3, case)
            f, g = torus.F_G(m.tau)
            add(f"rotating theta={label} {case} F=G=0", sympy.simplify(f) == 0 and sympy.simplify(g) == 0)
            k = m.torsion
            add(f"rotating theta={label} {case} torsion",
                sympy.simplify(k[0] + 2 * sympy.sin(th)) == 0 and sympy.simplify(k[1] - 2 * sympy.cos(th)) == 0)
    for br, th in [(1, 0), (1, sympy.pi), (2, sympy.pi / 2), (2, -sympy.pi / 2)]:
        m = torus.family_rotating(sympy.Integer(th) if th == 0 else th, br, free=Fraction(3, 7))
        f, g = torus.F_G(m.tau)
        add(f"rotating branch {br} theta={th} F=G=0", sympy.simplify(f) == 0 and sympy.simplify(g) == 0)
    return checks


def cmd_torus_verify(args):
    checks = _verify_examples()
    ok = all(c["pass"] for c in checks)
    write_report({"pass": ok, "checks": checks}, args)
    return EXIT_OK if ok else EXIT_NEGATIVE


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors, so they exit 1 rather than argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="projtorsion", description="Normal projective and TW connections with torsion.")
    p.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--mode", choices=[EXACT, FLOAT], default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=20)
    common.add_argument("--points", default=None, help="JSON list of sample points")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, hlp in [
        ("normalize", cmd_normalize, "normal projective coefficients"),
        ("curvature", cmd_curvature, "torsion and curvature at sample points"),
        ("flat", cmd_flat, "flatness verdict (exit 2 if not flat)"),
        ("hlavaty", cmd_hlavaty, "trace-free Hlavaty connection"),
        ("tw", cmd_tw, "normal Thomas-Whitehead connection"),
    ]:
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("connection")
        s.set_defaults(func=fn)
    for name, fn, hlp in [
        ("equivalent", cmd_equivalent, "projective equivalence (exit 2 if not)"),
        ("tw-equiv", cmd_tw_equiv, "structural equivalence of TW connections (exit 2 if not)"),
    ]:
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("first")
        s.add_argument("second")
        s.set_defaults(func=fn)

    t = sub.add_parser("torus", help="torus moduli variety")
    tsub = t.add_subparsers(dest="torus_command", required=True)
    s = tsub.add_parser("scan", parents=[common], help="sample the variety, CSV output")
    s.add_argument("--count", type=int, default=100)
    s.set_defaults(func=cmd_torus_scan)
    s = tsub.add_parser("verify", parents=[common], help="check the example families, JSON output")
    s.set_defaults(func=cmd_torus_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "samples", 1) < 1:
        print("error: --samples must be positive", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (DomainError, DimensionMismatch, DimensionTooSmall, SingularJacobian,
            torus.ConvergenceFailure, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
