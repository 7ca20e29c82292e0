"""Command-line front end.

Subcommands load systems, tuples, and polynomials from files, run the
checks, and emit certificates as human-readable text or JSON.  Exit codes:
0 = all checks consistent, 1 = a predicted violation was found (success of
a refutation), 2 = usage or I/O error.  All randomized checks draw from
the global --seed, so reports are reproducible bit for bit.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import kv as kvmod
from .errors import DimensionError, FormatError, SingularityError
from .matrixcore import Certificate, _serialize, operator_norm
from .polynomial import _eval_mats, eval_tuple, load_poly, torus_sup
from .lft import poly_at_tuple_via_lft
from .scattering import (
    check_dissipative,
    check_realizes,
    load_system,
    load_tuple,
    transfer_eval,
)

_TARGET_NORM = 3.0 * math.sqrt(3.0) / 5.0
_ESCALATION_R = 0.999


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polyreal",
        description=(
            "Certificates for dissipative nD scattering realizations, the "
            "restricted von Neumann inequality, and the Kaijser-Varopoulos "
            "counterexample."
        ),
    )
    ap.add_argument(
        "--seed", type=int, default=1234,
        help="seed for every randomized check (default 1234; reports are reproducible)",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("counterexample", help="reproduce and certify the counterexample")
    c.add_argument("--json", dest="as_json", action="store_true", help="emit a JSON certificate document")
    c.add_argument("--out", default=None, help="also write the report to this path")
    c.add_argument(
        "--selftest-corrupt-v1", action="store_true",
        help="self-test: inject a corrupted v_1 and confirm the checks catch it",
    )

    r = sub.add_parser("refute", help="test a candidate realization of a polynomial")
    r.add_argument("--system", required=True, help="system description file (JSON)")
    r.add_argument("--poly", required=True, help="polynomial file, or the builtin 'kv'")
    r.add_argument("--grid", type=int, default=64, help="torus grid points per phase axis")
    r.add_argument("--refine", type=int, default=200, help="ascent refinement passes")
    r.add_argument("--tol", type=float, default=1e-9, help="dissipativity/escalation tolerance")
    r.add_argument("--realize-tol", type=float, default=1e-6, help="Taylor coefficient matching tolerance")
    r.add_argument("--json", dest="as_json", action="store_true")

    d = sub.add_parser("check-dissipative", help="sampled dissipativity check of a system")
    d.add_argument("--system", required=True)
    d.add_argument("--grid", type=int, default=64)
    d.add_argument("--refine", type=int, default=200)
    d.add_argument("--tol", type=float, default=1e-9)
    d.add_argument("--json", dest="as_json", action="store_true")

    t = sub.add_parser("transfer", help="evaluate a system's transfer function at a point")
    t.add_argument("--system", required=True)
    t.add_argument("--z", required=True, help="point as 're,im;re,im;...'")
    t.add_argument("--json", dest="as_json", action="store_true")

    v = sub.add_parser("vn-test", help="compare ||p(T)|| against the torus sup of |p|")
    v.add_argument("--poly", required=True, help="polynomial file, or the builtin 'kv'")
    v.add_argument("--tuple", dest="tuple_spec", required=True, help="tuple file (JSON), or the builtin 'kv'")
    v.add_argument("--grid", type=int, default=64)
    v.add_argument("--refine", type=int, default=200)
    v.add_argument("--tol", type=float, default=1e-9)
    v.add_argument("--json", dest="as_json", action="store_true")
    return ap


def _resolve_poly(spec: str):
    return kvmod.kv_polynomial() if spec == "kv" else load_poly(spec)


def _resolve_tuple(spec: str):
    return kvmod.build_kv().t if spec == "kv" else load_tuple(spec)


def _emit(report: dict, lines: list, as_json: bool, out_path=None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) if as_json else "\n".join(lines)
    print(text)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _value_check(name, value, tol, description, witness_on_fail) -> tuple:
    passed = value <= tol
    cert = Certificate(
        passed=passed,
        margin=value,
        tolerance=tol,
        description=description,
        witness=None if passed else witness_on_fail,
    )
    return name, cert


def _cmd_counterexample(args) -> int:
    rng = np.random.default_rng(args.seed)
    v = kvmod.kv_vectors()
    if args.selftest_corrupt_v1:
        v[0] = v[0].copy()
        v[0][3] += 0.05
    T = kvmod.kv_matrices(v)
    p = kvmod.kv_polynomial()
    e5e1 = np.zeros((5, 5), dtype=complex)
    e5e1[4, 0] = 1.0

    checks = []
    comm, comm_pair = 0.0, (0, 1)
    for j in range(3):
        for k in range(j + 1, 3):
            dev = operator_norm(T[j] @ T[k] - T[k] @ T[j])
            if dev >= comm:
                comm, comm_pair = dev, (j, k)
    checks.append(_value_check(
        "commutativity", comm, 1e-15,
        "max pairwise commutator norm of the T_j", {"pair": comm_pair, "norm": comm},
    ))
    vdev = max(abs(float(np.linalg.norm(vec)) - 1.0) for vec in v)
    checks.append(_value_check(
        "unit_vectors", vdev, 1e-14, "max | ||v_j|| - 1 |", {"deviation": vdev},
    ))
    ndev = max(abs(operator_norm(t) - 1.0) for t in T)
    checks.append(_value_check(
        "generator_norms", ndev, 1e-14, "max | ||T_j|| - 1 |", {"deviation": ndev},
    ))
    sqdev = max(float(np.max(np.abs(t @ t + e5e1 / math.sqrt(3.0)))) for t in T)
    checks.append(_value_check(
        "squares", sqdev, 1e-14,
        "max entry deviation of T_j^2 from -(1/sqrt 3) e_5 e_1*", {"deviation": sqdev},
    ))
    struct_margin, identity_margin = 0.0, 0.0
    struct_ok, identity_ok = True, True
    for dim in (1, 2, 3, 4):
        x = [rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)) for _ in range(3)]
        sc = kvmod.structure_certificate(T, x)
        nc = kvmod.norm_identity_certificate(T, x)
        struct_margin = max(struct_margin, sc.margin)
        identity_margin = max(identity_margin, nc.margin)
        struct_ok = struct_ok and sc.passed
        identity_ok = identity_ok and nc.passed
    checks.append(("structure", Certificate(
        passed=struct_ok, margin=struct_margin, tolerance=kvmod.STRUCTURE_TOL,
        description="worst block-pattern deviation over seeded random X triples",
        witness=None if struct_ok else {"worst_margin": struct_margin},
    )))
    checks.append(("norm_identity", Certificate(
        passed=identity_ok, margin=identity_margin, tolerance=kvmod.NORM_IDENTITY_TOL,
        description="worst column/row norm-identity deviation over seeded random X triples",
        witness=None if identity_ok else {"worst_margin": identity_margin},
    )))

    violation = operator_norm(_eval_mats(p, T))
    vio_dev = abs(violation - _TARGET_NORM)
    checks.append(_value_check(
        "violation_norm", vio_dev, 1e-12,
        f"| ||p(T)|| - 3*sqrt(3)/5 | with ||p(T)|| = {violation!r}",
        {"violation_norm": violation},
    ))
    sup = torus_sup(p, grid_per_axis=64, refine_steps=200)
    sup_ok = (sup.lower >= 1.0 - 1e-6) and (sup.lower <= 1.0 + 1e-12)
    checks.append(("torus_sup", Certificate(
        passed=sup_ok, margin=sup.lower - 1.0, tolerance=1e-6,
        description=f"search lower bound {sup.lower!r}, coefficient-sum upper bound {sup.upper!r}",
        witness=sup.witness,
    )))

    all_pass = all(cert.passed for _, cert in checks)
    confirmed = all_pass and violation > 1.0
    rc = 0 if confirmed else 1

    lines = [f"Kaijser-Varopoulos counterexample report (seed {args.seed})"]
    for name, cert in checks:
        lines.append(f"  [{cert.verdict:4s}] {name:16s} margin={cert.margin: .3e}  tol={cert.tolerance:g}")
        if not cert.passed:
            lines.append(f"         failing check: {name}: {cert.description}")
    lines.append(f"violation_norm = {violation!r}   (3*sqrt(3)/5 = {_TARGET_NORM!r})")
    lines.append(f"sup_torus_lower = {sup.lower!r}")
    lines.append(f"sup_torus_upper = {sup.upper!r}")
    if confirmed:
        lines.append("verdict: COUNTEREXAMPLE CONFIRMED (structural checks pass and ||p(T)|| > 1 >= torus sup evidence)")
    else:
        failed = ", ".join(name for name, cert in checks if not cert.passed) or "violation_norm <= 1"
        lines.append(f"verdict: CHECKS FAILED ({failed})")

    report = {
        "command": "counterexample",
        "seed": args.seed,
        "corrupted": bool(args.selftest_corrupt_v1),
        "checks": [dict(name=name, **cert.to_dict()) for name, cert in checks],
        "violation_norm": violation,
        "sup_torus": {"lower": sup.lower, "upper": sup.upper, "witness": _serialize(sup.witness)},
        "verdict": "confirmed" if confirmed else "failed",
        "exit_code": rc,
    }
    _emit(report, lines, args.as_json, args.out)
    return rc


def _poly_matches_kv(p, tol: float) -> bool:
    if p.n != 3:
        return False
    ref = kvmod.kv_polynomial()
    keys = set(p.terms) | set(ref.terms)
    return all(abs(p.terms.get(a, 0j) - ref.terms.get(a, 0j)) <= tol for a in keys)


def _cmd_refute(args) -> int:
    s = load_system(args.system)
    p = _resolve_poly(args.poly)
    if s.in_dim != 1 or s.out_dim != 1:
        raise FormatError("refute applies to scalar systems (in_dim = out_dim = 1)")
    realizes = check_realizes(s, p, args.realize_tol)
    report = {
        "command": "refute",
        "system": args.system,
        "poly": args.poly,
        "realizes": realizes.to_dict(),
        "dissipative": None,
        "escalation": None,
    }
    lines = [f"refute: system {args.system} against polynomial {args.poly}"]

    if not realizes.passed:
        outcome, rc = "not_a_realization", 1
        lines.append(f"not a realization of p: {realizes.description}")
    else:
        lines.append(f"realization check: pass ({realizes.description})")
        dissip = check_dissipative(s, args.grid, args.refine, args.tol)
        report["dissipative"] = dissip.to_dict()
        if not dissip.passed:
            outcome, rc = "not_dissipative", 1
            zeta = ";".join(f"{z.real:.6f},{z.imag:.6f}" for z in dissip.witness)
            lines.append(
                f"realization but not dissipative: witness zeta = {zeta}, margin = {dissip.margin:.6e}"
            )
        elif s.n == 3:
            lines.append(f"dissipativity: pass at this resolution ({dissip.description})")
            kvd = kvmod.build_kv()
            singular = False
            try:
                esc_norm = operator_norm(poly_at_tuple_via_lft(kvd.t, s, _ESCALATION_R))
            except SingularityError as exc:
                singular, esc_norm = True, float("inf")
                lines.append(f"escalation solve singular: {exc}")
            report["escalation"] = {
                "r": _ESCALATION_R,
                "norm": None if singular else esc_norm,
                "singular": singular,
                "threshold": 1.0 + args.tol,
            }
            if singular or esc_norm > 1.0 + args.tol:
                outcome, rc = "lft_escalation", 1
                lines.append(
                    "contradiction certificate: the transfer evaluated at the "
                    f"Kaijser-Varopoulos tuple has norm {esc_norm:.12g} > 1 at r = {_ESCALATION_R}, "
                    "impossible for a dissipative system; dissipativity must fail between grid points"
                )
            elif _poly_matches_kv(p, args.realize_tol):
                outcome, rc = "anomaly", 2
                lines.append(
                    "numerical-tolerance escalation: every check passed although the "
                    "polynomial matches the counterexample, which no dissipative system "
                    "realizes; rerun with a finer grid / tighter tolerances"
                )
            else:
                outcome, rc = "valid_realization", 0
                lines.append("valid dissipative realization (sampled); escalation found no contradiction")
        else:
            outcome, rc = "valid_realization", 0
            lines.append(f"valid dissipative realization (sampled: {dissip.description})")

    report["outcome"] = outcome
    report["exit_code"] = rc
    lines.append(f"outcome: {outcome}")
    _emit(report, lines, args.as_json)
    return rc


def _cmd_check_dissipative(args) -> int:
    s = load_system(args.system)
    cert = check_dissipative(s, args.grid, args.refine, args.tol)
    rc = 0 if cert.passed else 1
    lines = [
        f"check-dissipative: {args.system}",
        f"[{cert.verdict}] margin = {cert.margin!r} (tol {cert.tolerance:g})",
        cert.description,
    ]
    if not cert.passed:
        zeta = ";".join(f"{z.real:.6f},{z.imag:.6f}" for z in cert.witness)
        lines.append(f"witness zeta = {zeta}")
    report = {
        "command": "check-dissipative",
        "system": args.system,
        "certificate": cert.to_dict(),
        "exit_code": rc,
    }
    _emit(report, lines, args.as_json)
    return rc


def _parse_point(text: str) -> np.ndarray:
    segments = [seg for seg in text.split(";") if seg.strip()]
    if not segments:
        raise FormatError("empty point; expected 're,im;re,im;...'")
    vals = []
    for i, seg in enumerate(segments):
        nums = seg.split(",")
        if len(nums) != 2:
            raise FormatError(f"z component {i}: expected 're,im', got {seg.strip()!r}")
        try:
            vals.append(complex(float(nums[0]), float(nums[1])))
        except ValueError:
            raise FormatError(f"z component {i}: bad number in {seg.strip()!r}") from None
    return np.array(vals, dtype=complex)


def _cmd_transfer(args) -> int:
    s = load_system(args.system)
    z = _parse_point(args.z)
    theta = transfer_eval(s, z)
    lines = [f"transfer value at z = {args.z} ({s.out_dim} x {s.in_dim}):"]
    for row in theta:
        lines.append("  " + "  ".join(f"{v.real:.12g}{v.imag:+.12g}j" for v in row))
    report = {
        "command": "transfer",
        "system": args.system,
        "z": _serialize(z),
        "transfer": _serialize(theta),
        "exit_code": 0,
    }
    _emit(report, lines, args.as_json)
    return 0


def _cmd_vn_test(args) -> int:
    p = _resolve_poly(args.poly)
    t = _resolve_tuple(args.tuple_spec)
    norm_pt = operator_norm(eval_tuple(p, t))
    sup = torus_sup(p, args.grid, args.refine)
    violation = norm_pt > sup.lower + args.tol
    certified = norm_pt > sup.upper + args.tol
    rc = 1 if violation else 0
    lines = [
        f"vn-test: polynomial {args.poly} at tuple {args.tuple_spec}",
        f"||p(T)|| = {norm_pt!r}",
        f"torus sup interval: lower = {sup.lower!r} (search), upper = {sup.upper!r} (coefficient sum)",
    ]
    if violation:
        tag = "certified: exceeds the coefficient-sum bound" if certified else "evidence: sup search is a lower bound"
        lines.append(f"VIOLATION: ||p(T)|| = {norm_pt:.12g} > sup evidence {sup.lower:.12g} ({tag})")
    else:
        lines.append(f"consistent: ||p(T)|| <= torus sup evidence + {args.tol:g}")
    report = {
        "command": "vn-test",
        "poly": args.poly,
        "tuple": args.tuple_spec,
        "norm_pT": norm_pt,
        "sup_lower": sup.lower,
        "sup_upper": sup.upper,
        "violation": bool(violation),
        "certified": bool(certified),
        "exit_code": rc,
    }
    _emit(report, lines, args.as_json)
    return rc


_HANDLERS = {
    "counterexample": _cmd_counterexample,
    "refute": _cmd_refute,
    "check-dissipative": _cmd_check_dissipative,
    "transfer": _cmd_transfer,
    "vn-test": _cmd_vn_test,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (FormatError, DimensionError, SingularityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
