"""Batch entry point: ``rhocalc --group FILE --cmd NAME [options]``.

Every command writes a deterministic report (JSON or CSV) and exits with
status 1 when an exact identity fails or the input is invalid.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from fractions import Fraction
from typing import Callable

from . import alexander_spanier as AS
from . import chern as CH
from . import cyclic as CY
from . import kernels as KN
from . import pairing as PR
from .errors import IdentityFailure, RhoCalcError, TruncationOverflow
from .forms import NCForm, _key_sort, abelianize
from .groups import CyclicGroup, FreeAbelianGroup, FreeGroup, GroupModel, group_from_json, symmetric_group
from .scalars import parse_scalar, render

COMMANDS = ("hc-table", "burghelea-check", "chern", "transgression-check", "pair",
            "as-identities", "kernel-identities")

MAX_DEGREE = 8
MAX_RADIUS = 12


class InputError(RhoCalcError):
    """Invalid job parameters or input literals."""


# ---------------------------------------------------------------------------
# input helpers


def resolve_group(spec: str) -> GroupModel:
    """A JSON group file, or one of the shorthands ``Z/n``, ``Sn``, ``Z^n``, ``Fk``."""
    if os.path.exists(spec):
        with open(spec) as fh:
            return group_from_json(json.load(fh))
    s = spec.strip()
    try:
        if s.startswith("Z/"):
            return CyclicGroup(int(s[2:]))
        if s == "Z":
            return FreeAbelianGroup(1)
        if s.startswith("Z^"):
            return FreeAbelianGroup(int(s[2:]))
        if s.startswith("S") and s[1:].isdigit():
            return symmetric_group(int(s[1:]))
        if s.startswith("F") and s[1:].isdigit():
            return FreeGroup(int(s[1:]))
    except ValueError as exc:
        raise InputError(f"bad group shorthand {spec!r}: {exc}") from exc
    raise InputError(f"group file {spec!r} does not exist")


def _load_input(path: str | None) -> dict:
    if path is None:
        return {}
    if not os.path.exists(path):
        raise InputError(f"input file {path!r} does not exist")
    with open(path) as fh:
        return json.load(fh)


def _ring_element(G: GroupModel, obj) -> dict | Fraction:
    """``{"label": coef}`` or a bare scalar."""
    if isinstance(obj, dict):
        return {G.parse(k): parse_scalar(v) for k, v in obj.items()}
    return parse_scalar(obj)


def _path_entry(G: GroupModel, obj):
    """A path entry: a ring element, or a list of ``{"t": power, "g": label, "coef": c}``."""
    if isinstance(obj, list):
        coeffs: dict = {}
        for term in obj:
            mono = (int(term.get("t", 0)), 0)
            g = G.parse(term.get("g", "e")) if "g" in term else G.identity
            slot = coeffs.setdefault(mono, {})
            slot[(g, ())] = slot.get((g, ()), 0) + parse_scalar(term.get("coef", 1))
        return CH.PolyForm(G, coeffs)
    return _ring_element(G, obj)


def _rows(G: GroupModel, rows, entry=_ring_element) -> list:
    return [[entry(G, x) for x in r] for r in rows]


def _form_json(w: NCForm) -> list:
    G = w.group
    return [{"coef": render(c), "g0": G.format(g0), "dgs": [G.format(g) for g in gs]}
            for (g0, gs), c in sorted(w.terms.items(), key=lambda kv: _key_sort(G, kv[0]))]


def _check_caps(args) -> None:
    if args.degree is not None and not 0 <= args.degree <= MAX_DEGREE:
        raise InputError(f"degree must lie in 0..{MAX_DEGREE}")
    if args.radius is not None and not 0 <= args.radius <= MAX_RADIUS:
        raise InputError(f"radius must lie in 0..{MAX_RADIUS}")
    if args.trials < 0:
        raise InputError("trials must be nonnegative")


def _class_elt(G: GroupModel, args):
    if args.class_ is None:
        return None
    x = G.parse(args.class_)
    if x == G.identity and args.cmd == "pair":
        raise InputError("the pairing needs a delocalized class")
    return x


# ---------------------------------------------------------------------------
# counterexample shrinking


def shrink_kernel(A: KN.EqKernel, fails: Callable[[KN.EqKernel], bool]) -> KN.EqKernel:
    """Greedily zero coefficients of ``A`` while ``fails`` stays true."""
    cur = A
    for (pos, w) in sorted(A.entries.items(), key=lambda kv: kv[0]):
        for key in sorted(w.terms, key=lambda k: _key_sort(w.group, k)):
            ents = dict(cur.entries)
            if pos not in ents:
                continue
            terms = dict(ents[pos].terms)
            terms.pop(key, None)
            ents[pos] = NCForm(w.group, terms)
            trial = KN.EqKernel(cur.model, ents, cur.degree, cur.grading)
            if fails(trial):
                cur = trial
    return cur


def _kernel_json(A: KN.EqKernel) -> list:
    return [{"f1": a, "f2": b, "form": _form_json(w)} for (a, b), w in sorted(A.entries.items())]


# ---------------------------------------------------------------------------
# commands


def cmd_hc_table(G, args, data) -> tuple:
    D = 4 if args.degree is None else args.degree
    x = _class_elt(G, args)
    radius = None
    if x is None:
        if not G.is_finite:
            raise InputError("infinite groups need --class")
        dims = CY.cyclic_dims(G, D)
    elif G.is_finite:
        dims = CY.homology(CY.cyclic_total_slice(G, D, x), range(D + 1)).dims
    else:
        R0 = args.radius or 2
        rep = CY.stabilized_homology(lambda r: CY.cyclic_total_slice(G, D, x, r), R0,
                                     max(R0 + 1, 8), range(D + 1))
        if not rep.stabilized:
            raise InputError(f"dimensions did not stabilize up to radius {rep.radius}")
        dims, radius = rep.dims, rep.radius
    rows = [{"deg": n, "dim": d} for n, d in enumerate(dims)]
    return rows, True, {"radius": radius}


def cmd_burghelea(G, args, data) -> tuple:
    D = 4 if args.degree is None else args.degree
    x = _class_elt(G, args)
    rep = CY.burghelea_check(G, x, D, args.radius)
    rows = [{"deg": n, "direct": a, "formula": b} for n, (a, b) in enumerate(zip(rep.direct, rep.formula))]
    return rows, rep.match, {"stabilized": rep.stabilized, "radius": rep.radius}


def cmd_chern(G, args, data) -> tuple:
    D = 2 if args.degree is None else args.degree
    rows = []
    ok = True
    if "idempotent" in data:
        p = CH.GRingMatrix(G, _rows(G, data["idempotent"])).require_idempotent()
        cases = [("input", p)]
    elif "unit" in data:
        u = CH.GRingMatrix(G, _rows(G, data["unit"]), _rows(G, data["inverse"])).require_invertible()
        for k in range(min(D, max(CH.C_K)) + 1):
            w = CH.ch_odd_form(u, k)
            closed = abelianize(w.d(), args.radius).is_zero()
            ok &= closed
            rows.append({"case": "input", "degree": 2 * k + 1, "closed": closed, "form": _form_json(w)})
        return rows, ok, {}
    else:
        rng = random.Random(args.seed)
        cases = [(f"random {i}", CH.random_idempotent(G, 1 + i % 3, rng)) for i in range(args.trials)]
    for name, p in cases:
        for k in range(D + 1):
            w = CH.ch_even_form(p, k)
            closed = abelianize(w.d(), args.radius).is_zero()
            ok &= closed
            rows.append({"case": name, "degree": 2 * k, "closed": closed, "form": _form_json(w)})
    return rows, ok, {}


def cmd_transgression(G, args, data) -> tuple:
    D = 2 if args.degree is None else args.degree
    if "path" in data:
        paths = [("input", CH.MatrixPath.from_rows(G, _rows(G, data["path"], _path_entry)))]
    else:
        rng = random.Random(args.seed)
        paths = [(f"random {i}", CH.random_idempotent_path(G, 2, rng)) for i in range(args.trials)]
    rows = []
    ok = True
    for name, P in paths:
        for k in range(1, D + 1):
            defect = CH.transgression_defect(P, k, args.radius)
            rows.append({"case": name, "k": k, "holds": not defect, "defect_terms": len(defect)})
            ok &= not defect
    return rows, ok, {}


def _cocycle(G, spec: dict, k: int, R) -> PR.DelCocycle:
    kind = spec.get("kind", "trace")
    x = G.parse(spec["class"])
    if kind == "trace":
        if k != 0:
            raise InputError("the trace cocycle has degree 0; use 'normalized' or 'table' for k > 0")
        return PR.delocalized_trace(G, x, R)
    if kind == "normalized":
        basis = PR.normalized_cyclic_cocycles(G, x, 2 * k, R)
        i = int(spec.get("index", 0))
        if not 0 <= i < len(basis):
            raise InputError(f"normalized cocycle index {i} out of range (dimension {len(basis)})")
        return basis[i]
    if kind == "table":
        vals = {tuple(G.parse(g) for g in r["args"]): parse_scalar(r["value"]) for r in spec["values"]}
        tau = PR.cyclic_cochain(G, 2 * k, x, vals, R)
        return tau.require_cocycle(G.ball() if G.is_finite else G.ball(R or 1))
    raise InputError(f"unknown cocycle kind {kind!r}")


def cmd_pair(G, args, data) -> tuple:
    if "projection" not in data:
        raise InputError("pair needs an input file with a 'projection'")
    k = int(data.get("k", 0 if args.degree is None else args.degree))
    mspec = data.get("model", {"F_size": len(data["projection"])})
    model = KN.CoveringModel.from_json(G, mspec)
    P = PR.ProjectionKernel(KN.EqKernel.from_group_ring(model, _rows(G, data["projection"])))
    cspec = dict(data.get("cocycle", {}))
    if args.class_ is not None:
        cspec["class"] = args.class_
    if "class" not in cspec:
        raise InputError("no class given for the cocycle")
    tau = _cocycle(G, cspec, k, args.radius)
    direct = PR.pair(tau, P, k)
    dual = PR.pair_duality(tau, PR.ch_del_projection(P, k))
    rows = [{"k": k, "cocycle": tau.name, "direct": render(direct), "duality": render(dual),
             "agree": direct == dual}]
    return rows, direct == dual, {"value": render(direct)}


def cmd_as_identities(G, args, data) -> tuple:
    D = 2 if args.degree is None else args.degree
    mspec = data.get("model", {"F_size": 2, "weights": ["1", "2"]})
    base = KN.CoveringModel.from_json(G, mspec)
    rng = random.Random(args.seed)
    model = base.two_translate_cutoff(rng)
    bad = AS.check_as_homotopy(base, D)
    rows = [{"identity": f"dK + Kd = r* - id (degree {q})", "checked": 1,
             "failures": 0 if v is None else 1, "counterexample": _pts(G, v)} for q, v in bad.items()]
    names = ["tau_{d chi} = -b tau_chi", "cyclic sign", "local vanishing", "norm bound"]
    counts = {n: [0, 0, None] for n in names}
    for t in range(args.trials):
        k = 1 + t % 2
        chi = AS.random_chi(model, k, rng)
        As = [KN.random_kernel(model, rng, 0) for _ in range(k + 1)]
        As2 = [KN.random_kernel(model, rng, 0) for _ in range(k + 2)]
        v = AS.tau_chi(chi, As)
        checks = {
            names[0]: AS.tau_chi(AS.as_delta(chi), As2) == -AS.b_cochain(lambda a: AS.tau_chi(chi, a), As2),
            names[1]: AS.tau_chi(chi, [As[-1]] + As[:-1]) == (-1) ** k * v,
            names[2]: AS.tau_chi(chi, [AS.random_local_kernel(model, rng) for _ in range(k + 1)]) == 0,
            names[3]: AS.norm_bound_holds(chi, As),
        }
        for n, good in checks.items():
            counts[n][0] += 1
            if not good:
                counts[n][1] += 1
                if counts[n][2] is None:
                    counts[n][2] = f"trial {t}"
    for n in names:
        rows.append({"identity": n, "checked": counts[n][0], "failures": counts[n][1],
                     "counterexample": counts[n][2]})
    ok = all(r["failures"] == 0 for r in rows)
    return rows, ok, {}


def _pts(G, t):
    if t is None:
        return None
    return [[f, G.format(mu)] for f, mu in t]


def cmd_kernel_identities(G, args, data) -> tuple:
    default = {"F_size": 2, "weights": ["1", "2"]}
    if not G.is_finite:
        default["radius"] = args.radius or 6
    mspec = data.get("model", default)
    model = KN.CoveringModel.from_json(G, mspec)
    rng = random.Random(args.seed)
    if not data.get("model", {}).get("cutoff"):
        model = model.two_translate_cutoff(rng)
    D = 2 if args.degree is None else args.degree
    reps = KN.kernel_identities(model, rng, args.trials, max_degree=D)
    rows = []
    for r in reps:
        cx = None
        if r.failures:
            f = r.failures[0]
            if len(f) > 1 and isinstance(f[1], KN.EqKernel):
                A = f[1]
                R = model.radius
                if r.name.startswith("nabla^2"):
                    Th = KN.curvature(model)
                    A = shrink_kernel(A, lambda T: KN.lott_connection(KN.lott_connection(T)) != Th * T - T * Th)
                elif r.name.startswith("d TR"):
                    A = shrink_kernel(A, lambda T: not KN.trace_equal(KN.tr_del(T).d(),
                                                                      KN.tr_del(KN.lott_connection(T)), R))
                cx = _kernel_json(A)
            else:
                cx = str(f[0])
        rows.append({"identity": r.name, "checked": r.checked, "failures": len(r.failures),
                     "counterexample": cx})
    ok = all(r.ok for r in reps)
    status = "all 5 identities exact" if ok else "identity failure"
    return rows, ok, {"status": status}


HANDLERS = {
    "hc-table": cmd_hc_table,
    "burghelea-check": cmd_burghelea,
    "chern": cmd_chern,
    "transgression-check": cmd_transgression,
    "pair": cmd_pair,
    "as-identities": cmd_as_identities,
    "kernel-identities": cmd_kernel_identities,
}


# ---------------------------------------------------------------------------
# report assembly


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    rows = report.get("rows", [])
    cols: list = []
    for r in rows:
        for c in r:
            if c not in cols:
                cols.append(c)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    if isinstance(v, bool):
        return "true" if v else "false"
    return "" if v is None else v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rhocalc", description="Exact cyclic homology and higher rho computations.")
    ap.add_argument("--group", required=True, help="group JSON file, or Z/n, Sn, Z, Z^n, Fk")
    ap.add_argument("--cmd", required=True, choices=COMMANDS)
    ap.add_argument("--degree", type=int)
    ap.add_argument("--radius", type=int)
    ap.add_argument("--class", dest="class_")
    ap.add_argument("--input")
    ap.add_argument("--out")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=50)
    return ap


def run(argv: list | None = None) -> int:
    args = build_parser().parse_args(argv)
    report: dict = {"command": args.cmd, "seed": args.seed, "trials": args.trials,
                    "degree": args.degree, "radius": args.radius, "class": args.class_}
    try:
        _check_caps(args)
        G = resolve_group(args.group)
        report["group"] = G.to_json() if G.kind != "finite-table" else {"kind": "finite-table",
                                                                       "order": len(G.ball())}
        data = _load_input(args.input)
        rows, ok, extra = HANDLERS[args.cmd](G, args, data)
        report.update(extra)
        report["rows"] = rows
        report["ok"] = bool(ok)
        status = 0 if ok else 1
    except TruncationOverflow as exc:
        report.update(ok=False, error="truncation-overflow", message=str(exc), rows=[])
        status = 1
    except IdentityFailure as exc:
        report.update(ok=False, error="identity-failure", message=str(exc),
                      counterexample=repr(exc.counterexample), rows=[])
        status = 1
    except (RhoCalcError, ValueError, KeyError, json.JSONDecodeError) as exc:
        report.update(ok=False, error=type(exc).__name__, message=str(exc), rows=[])
        status = 1
    if "error" in report:
        sys.stderr.write(f"rhocalc: {report['error']}: {report['message']}\n")
    text = render_report(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())
