"""Command-line interface: ``plurienv <command> --scenario FILE``.

Exit codes: 0 success, 1 comparison failed, 2 validation error,
3 singular center, 4 oracle ill-posed, 5 optimizer exhausted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .envelope import EnvelopeEstimate, PointError, envelope_field
from .errors import (DomainError, InfeasibleDiscError, OptimizerExhaustedError,
                     OracleIllPosedError, SingularCenterError)
from .functionals import omega_functional, poisson_functional
from .mollify import mollified_envelope_check, write_report_rows
from .perron import omega_envelope_oracle
from .potentials import parse_cvector
from .riesz import QuadratureConfig, riesz_area, riesz_boundary
from .scenario import ScenarioError, disc_from_json, load_scenario

EXIT_OK = 0
EXIT_COMPARE_FAILED = 1
EXIT_VALIDATION = 2
EXIT_SINGULAR = 3
EXIT_ORACLE = 4
EXIT_EXHAUSTED = 5

log = logging.getLogger("plurienv")


def fmt(x) -> str:
    return f"{float(x):.17g}"


def _point_cols(n):
    cols = []
    for j in range(n):
        cols += [f"re_z{j + 1}", f"im_z{j + 1}"]
    return cols


def _point_vals(p):
    out = []
    for c in np.atleast_1d(p):
        out += [fmt(c.real), fmt(c.imag)]
    return out


def _exit_for(exc) -> int:
    if isinstance(exc, SingularCenterError):
        return EXIT_SINGULAR
    if isinstance(exc, OracleIllPosedError):
        return EXIT_ORACLE
    if isinstance(exc, (OptimizerExhaustedError, InfeasibleDiscError)):
        return EXIT_EXHAUSTED
    return EXIT_VALIDATION


def _status(exc) -> str:
    return {EXIT_SINGULAR: "singular_center", EXIT_EXHAUSTED: "exhausted",
            EXIT_ORACLE: "oracle_ill_posed"}.get(_exit_for(exc), "invalid")


class Runner:
    def __init__(self, args, out=None):
        self.args = args
        self.stdout = out or sys.stdout
        self.out_dir = Path(args.out) if args.out else None
        if self.out_dir:
            self.out_dir.mkdir(parents=True, exist_ok=True)

    def say(self, text):
        if not self.args.quiet:
            print(text, file=self.stdout)

    def emit(self, name, text):
        if self.out_dir:
            (self.out_dir / name).write_text(text)
        self.say(text.rstrip("\n"))

    def scenario(self):
        sc = load_scenario(self.args.scenario)
        if self.args.seed is not None:
            sc = sc.with_seed(int(self.args.seed))
        if self.args.points is not None:
            try:
                pts = [parse_cvector(p) for p in json.loads(self.args.points)]
            except (ValueError, TypeError) as exc:
                raise ScenarioError("--points", str(exc)) from None
            sc = sc.with_points(pts)
        return sc

    # commands ----------------------------------------------------------

    def functional(self):
        sc = self.scenario()
        raw = self.args.disc
        try:
            obj = json.loads(Path(raw).read_text() if Path(raw).is_file() else raw)
        except (json.JSONDecodeError, OSError) as exc:
            raise ScenarioError("disc", f"invalid JSON: {exc}") from None
        f = disc_from_json(obj, sc.dom.dim)
        q = QuadratureConfig(n_circle=sc.optimizer.n_circle)
        p = poisson_functional(sc.weight, f, q)
        h = omega_functional(sc.omega, sc.weight, f, q)
        rb = riesz_boundary(sc.omega.psi1, f, q) - riesz_boundary(sc.omega.psi2, f, q)
        try:
            ra = fmt(riesz_area(sc.omega.psi1, f, q) - riesz_area(sc.omega.psi2, f, q))
        except (InfeasibleDiscError, ArithmeticError):
            ra = "nan"
        rows = [("poisson_functional", fmt(p.value.value)),
                ("omega_functional", fmt(h.value.value)),
                ("riesz_boundary", fmt(rb)),
                ("riesz_area", ra),
                ("rejected_nodes", str(h.n_rejected_boundary_nodes)),
                ("reliable", str(int(h.reliable)))]
        self.emit("functional.csv", _csv([("quantity", "value")] + rows))
        return EXIT_OK

    def envelope(self):
        sc = self.scenario()
        results = envelope_field(sc.points, sc.omega, sc.weight, sc.dom, sc.optimizer)
        header = _point_cols(sc.dom.dim) + ["status", "value", "feasibility_margin", "starts_used", "best_disc"]
        rows = [header]
        code = EXIT_OK
        for p, r in zip(sc.points, results):
            if isinstance(r, PointError):
                rows.append(_point_vals(np.asarray(p)) + [_status(r.error), "nan", "nan", "0", str(r.error)])
                code = code or _exit_for(r.error)
            else:
                rows.append(_point_vals(np.asarray(p)) + [
                    "ok", fmt(r.value.value), fmt(r.feasibility_margin), str(r.starts_used),
                    json.dumps(r.best_disc.to_json(), separators=(",", ":"))])
        self.emit("envelope.csv", _csv(rows))
        return code

    def oracle(self):
        sc = self.scenario()
        settings = sc.oracle
        coarse = None
        if self.args.resume:
            prev = self.out_dir / "oracle.json" if self.out_dir else None
            if prev is not None and prev.exists():
                meta = json.loads(prev.read_text())
                coarse = _read_grid_csv(self.out_dir / "oracle.csv", sc.dom.dim)
                settings = _replace(settings, res=2 * int(meta["resolution"]))
            else:
                gf0 = omega_envelope_oracle(sc.omega, sc.weight, sc.dom, settings)
                coarse = gf0.interior_values()
                settings = _replace(settings, res=2 * settings.res)
        gf = omega_envelope_oracle(sc.omega, sc.weight, sc.dom, settings)
        if coarse is not None:
            pts, vals = coarse
            d = gf.interpolate(pts) - vals
            gf.meta["refinement"] = {"max_increase": float(np.max(d)), "max_abs_delta": float(np.max(np.abs(d))),
                                     "coarse_nodes": int(len(vals))}
        meta = gf.metadata()
        if self.out_dir:
            gf.write(self.out_dir / "oracle.csv", self.out_dir / "oracle.json")
        self.say(json.dumps({k: meta[k] for k in ("resolution", "iteration_count", "residual", "n_exceptional")}
                            | ({"refinement": meta["refinement"]} if "refinement" in meta else {})))
        return EXIT_OK

    def compare(self):
        sc = self.scenario()
        tol = float(self.args.tolerance) if self.args.tolerance is not None else sc.compare_tolerance
        gf = omega_envelope_oracle(sc.omega, sc.weight, sc.dom, sc.oracle)
        results = envelope_field(sc.points, sc.omega, sc.weight, sc.dom, sc.optimizer)
        rows = [_point_cols(sc.dom.dim) + ["oracle", "optimizer", "gap", "pass"]]
        ok = True
        for p, r in zip(sc.points, results):
            o = gf.interpolate(np.asarray(p))
            if isinstance(r, PointError):
                rows.append(_point_vals(np.asarray(p)) + [fmt(o), "nan", "nan", "0"])
                ok = False
                continue
            v = r.value.value
            gap = abs(o - v)
            passed = bool(gap <= tol)
            ok &= passed
            rows.append(_point_vals(np.asarray(p)) + [fmt(o), fmt(v), fmt(gap), str(int(passed))])
        self.emit("compare.csv", _csv(rows))
        return EXIT_OK if ok else EXIT_COMPARE_FAILED

    def mollify(self):
        sc = self.scenario()
        if sc.mollify is None or not sc.mollify.deltas:
            self.emit("mollify.csv", _report_csv([]))
            return EXIT_OK
        m = sc.mollify
        x = np.asarray(m.point if m.point is not None else sc.points[0])
        tol = float(self.args.tolerance) if self.args.tolerance is not None else m.tolerance
        for d in m.deltas:
            if d >= sc.dom.inradius or not sc.dom.signed_distance(x) > d:
                raise ScenarioError("scenario.mollify.deltas", f"delta={d} leaves no room around the point")
        rep = mollified_envelope_check(sc.weight, sc.dom, x, m.deltas, sc.optimizer, sc.omega,
                                       n_quad=m.n_quad, tolerance=tol, limit_tolerance=m.limit_tolerance)
        self.emit("mollify.csv", _report_csv(rep.rows))
        return EXIT_OK


def _replace(settings, **kw):
    from dataclasses import replace
    return replace(settings, **kw)


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _report_csv(rows) -> str:
    buf = io.StringIO()
    write_report_rows(buf, rows)
    return buf.getvalue().replace("\r\n", "\n")


def _read_grid_csv(path, n):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    pts = data[:, 0:2 * n:2] + 1j * data[:, 1:2 * n:2]
    return pts, data[:, -1]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plurienv", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="scenario JSON file")
    common.add_argument("--out", default=None, help="directory for CSV/JSON outputs")
    common.add_argument("--seed", default=None, help="override the scenario seed")
    common.add_argument("--points", default=None, help="JSON list of points overriding the scenario")
    common.add_argument("--tolerance", default=None, help="override the pass/fail tolerance")
    common.add_argument("--quiet", action="store_true", help="do not print results")
    sub = parser.add_subparsers(dest="command", required=True)
    f = sub.add_parser("functional", parents=[common], help="evaluate the disc functionals on one disc")
    f.add_argument("--disc", required=True, help="disc JSON (inline or file)")
    sub.add_parser("envelope", parents=[common], help="optimizer upper bounds at the scenario points")
    o = sub.add_parser("oracle", parents=[common], help="grid Perron oracle")
    o.add_argument("--resume", action="store_true", help="re-run at doubled resolution and report the change")
    sub.add_parser("compare", parents=[common], help="oracle vs optimizer at the scenario points")
    sub.add_parser("mollify", parents=[common], help="delta sweep of mollified envelopes")
    return parser


def main(argv=None, out=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING)
    runner = Runner(args, out)
    try:
        return getattr(runner, args.command)()
    except ScenarioError as exc:
        print(f"validation error at {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SingularCenterError, OracleIllPosedError, OptimizerExhaustedError, InfeasibleDiscError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_for(exc)


if __name__ == "__main__":
    sys.exit(main())
