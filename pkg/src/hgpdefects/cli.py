"""Command-line interface: build codes, carve defects, run deformations, trace logicals."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import defect as dfc
from . import wormhole as wmh
from .deform import (
    StabilizerState,
    check_nonmixing,
    compose,
    measure_round,
    partition_by_weight,
)
from .f2core import BitMatrix, rank
from .fgraph import AlistError, FactorGraph, from_alist
from .hgp import HgpCode, build, code_report, embedded_logical_pairs, logical_count
from .pauli import SymplecticOp, commutation_violations, logical_pairs, ops_matrix
from .trace import build_logical_graph, eulerian_trail, eulerian_traceable, move_point_puncture

BUNDLE_FORMAT = "hgpdefects-bundle"
BUNDLE_VERSION = 1

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


class VerificationError(Exception):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _read(path: str) -> tuple[Path, bytes]:
    p = Path(path)
    try:
        return p, p.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _emit(obj: dict, out: str | None) -> None:
    text = dumps(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def parse_index_list(text: str | None, side: str, one_based: bool) -> list[int]:
    """Comma or space separated ids; with ``one_based`` checks may be letters and numbers are 1-based."""
    if text is None:
        return []
    out = []
    for tok in text.replace(",", " ").split():
        if one_based and side == "check" and tok.isalpha() and len(tok) == 1:
            out.append(ord(tok.lower()) - ord("a"))
            continue
        try:
            v = int(tok)
        except ValueError as exc:
            raise InputError(f"bad index {tok!r}") from exc
        out.append(v - 1 if one_based else v)
    if any(v < 0 for v in out):
        raise InputError(f"negative index in {text!r}")
    return out


# bundles ------------------------------------------------------------------------


def _ops_json(ops: Sequence[SymplecticOp]) -> list[dict]:
    return [op.to_json() for op in ops]


def _bits_json(m: BitMatrix) -> list[list[int]]:
    return m.supports()


def _css_ops(hx: BitMatrix, hz: BitMatrix) -> list[SymplecticOp]:
    return [SymplecticOp.x_type(r) for r in hx.to_dense()] + [SymplecticOp.z_type(r) for r in hz.to_dense()]


def _realize(code: HgpCode, defect: dict | None, force: bool = False):
    """Rebuild the stabilizer generators, measured qubits, logical bases and expected count."""
    k = logical_count(code)
    if defect is None:
        d = dfc.base_deformed(code)
        lx, lz = embedded_logical_pairs(code)
        return _css_ops(d.sx, d.sz), {}, _ops_from_css(lx, lz), k, None
    kind = defect["kind"]
    if kind in (dfc.SMOOTH, dfc.ROUGH):
        spec = dfc.make_puncture(code, kind, defect["S"], defect["T"])
        d = dfc.apply_puncture(code, spec, force=force or defect.get("force", False))
        extra = d.new_logical_z.rows if kind == dfc.SMOOTH else d.new_logical_x.rows
        logs = _ops_from_css(d.new_logical_x, d.new_logical_z)
        return _css_ops(d.sx, d.sz), dict(d.measured_out), logs, k + extra, (spec, d)
    if kind == "wormhole":
        wh = wmh.apply_wormhole(code, defect["S"], defect["T"], force=force or defect.get("force", False))
        logs = wmh.wormhole_logical_operators(code, wh)
        ops = logs.type1_loops + logs.type2_loops
        return list(wh.generators), dict(wh.measured_out), {"x": [], "z": _ops_json(ops)}, k + logs.count, (wh, logs)
    raise InputError(f"unknown defect kind {kind!r}")


def _ops_from_css(lx: BitMatrix, lz: BitMatrix) -> dict:
    return {
        "x": _ops_json([SymplecticOp.x_type(r) for r in lx.to_dense()]),
        "z": _ops_json([SymplecticOp.z_type(r) for r in lz.to_dense()]),
    }


def make_bundle(code: HgpCode, defect: dict | None, report: dict, provenance: dict, force: bool = False) -> dict:
    gens, measured, logs, expected, _ = _realize(code, defect, force)
    return {
        "format": BUNDLE_FORMAT,
        "version": BUNDLE_VERSION,
        "kind": "base" if defect is None else defect["kind"],
        "h": {"n": code.n, "m": code.m, "rows": code.h.supports()},
        "defect": defect,
        "stabilizers": _ops_json(gens),
        "measured_out": [[q, b] for q, b in sorted(measured.items())],
        "logicals": logs,
        "expected_logical_count": expected,
        "report": report,
        "provenance": provenance,
    }


def code_from_bundle(bundle: dict) -> HgpCode:
    try:
        h = bundle["h"]
        return build(BitMatrix.from_supports(h["rows"], h["n"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed bundle: {exc}") from exc


def load_bundle(path: str) -> tuple[dict, str]:
    p, raw = _read(path)
    try:
        bundle = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not JSON: {exc}") from exc
    if not isinstance(bundle, dict) or bundle.get("format") != BUNDLE_FORMAT:
        raise InputError(f"{path} is not a code bundle")
    n = bundle["h"]["n"] ** 2 + bundle["h"]["m"] ** 2
    gens = [SymplecticOp.from_json(n, o) for o in bundle["stabilizers"]]
    bad = commutation_violations(gens)
    if bad:
        raise VerificationError(f"bundle stabilizers anticommute: {bad[:3]}")
    return bundle, hashlib.sha256(raw).hexdigest()


def audit(bundle: dict) -> dict:
    code = code_from_bundle(bundle)
    n = code.n_qubits
    gens = [SymplecticOp.from_json(n, o) for o in bundle["stabilizers"]]
    measured = {int(q): b for q, b in bundle["measured_out"]}
    checks: dict[str, bool] = {}
    checks["css_base"] = True
    checks["commutation"] = not commutation_violations(gens)
    try:
        regen, regen_measured, _, expected, _ = _realize(code, bundle["defect"], force=True)
    except ValueError as exc:
        raise VerificationError(f"defect cannot be rebuilt: {exc}") from exc
    checks["generators_match"] = [g.to_json() for g in regen] == bundle["stabilizers"]
    checks["measured_match"] = regen_measured == measured
    live = [q for q in range(n) if q not in measured]
    checks["stabilizers_avoid_measured"] = all(
        not any((g.z if b == "X" else g.x)[q] for g in gens) for q, b in measured.items()
    )
    m = ops_matrix(gens, n).take_cols(live + [n + q for q in live])
    observed = len(live) - rank(m)
    checks["logical_count"] = observed == expected == bundle.get("expected_logical_count")
    base_w = max(int(r.sum()) for r in np.vstack([code.hx.to_dense(), code.hz.to_dense()]))
    max_w = max((g.weight() for g in gens), default=0)
    checks["ldpc_weight"] = max_w <= 2 * base_w
    return {
        "ok": all(checks.values()),
        "checks": checks,
        "n_qubits": n,
        "live_qubits": len(live),
        "observed_logical_count": observed,
        "expected_logical_count": expected,
        "max_generator_weight": max_w,
        "base_max_weight": base_w,
    }


# commands -----------------------------------------------------------------------


def cmd_build(args) -> int:
    p, raw = _read(args.alist)
    try:
        g = from_alist(raw.decode())
    except (AlistError, UnicodeDecodeError) as exc:
        raise InputError(f"alist parse error: {exc}") from exc
    h = g.to_matrix()
    if h.is_zero():
        raise InputError("parity-check matrix is zero")
    code = build(h)
    report = code_report(code, args.distance_budget)
    prov = {"inputs": [hashlib.sha256(raw).hexdigest()], "history": [{"command": "build", "distance_budget": args.distance_budget}]}
    bundle = make_bundle(code, None, report, prov)
    if args.out:
        Path(args.out).write_text(dumps(bundle))
    summary = {k: report[k] for k in ("n", "m", "n_qubits", "k", "d", "d_bound")}
    sys.stdout.write(dumps(summary))
    return EXIT_OK


def _defect_command(args, kind: str) -> int:
    bundle, digest = load_bundle(args.code)
    if bundle["defect"] is not None:
        raise InputError("defects are carved into base codes only")
    code = code_from_bundle(bundle)
    S = parse_index_list(args.vars, "var", args.paper_indexing)
    T = parse_index_list(args.checks, "check", args.paper_indexing)
    if not S or not T:
        raise InputError("--vars and --checks must be nonempty")
    if max(S) >= code.n or max(T) >= code.m:
        raise InputError("index out of range for this code")
    force = bool(getattr(args, "force", False))
    defect = {"kind": kind, "S": sorted(set(S)), "T": sorted(set(T)), "force": force}
    if kind == "wormhole":
        rep = wmh.check_extended_correctable(code, S, T)
        if not rep.passed and not force:
            _emit({"error": "wormhole is not correctable", "correctability": rep.to_json()}, None)
            return EXIT_VERIFY
        wh = wmh.apply_wormhole(code, S, T, force=True)
        report = wmh.wormhole_report(code, wh, wmh.wormhole_logical_operators(code, wh))
        report["correctability"] = rep.to_json()
    else:
        spec = dfc.make_puncture(code, kind, S, T)
        rep = dfc.check_correctable(code, spec)
        if not rep.correctable and not force:
            _emit({"error": "puncture is not correctable", "correctability": rep.to_json()}, None)
            return EXIT_VERIFY
        report = dfc.defect_report(code, spec, dfc.apply_puncture(code, spec, force=True))
    hist = bundle["provenance"]["history"] + [{"command": kind if kind == "wormhole" else "puncture", **defect}]
    prov = {"inputs": bundle["provenance"]["inputs"] + [digest], "history": hist}
    out = make_bundle(code, defect, report, prov, force=True)
    verdict = audit(out)
    out["report"]["audit"] = verdict
    if args.out:
        Path(args.out).write_text(dumps(out))
    sys.stdout.write(dumps(out["report"]))
    return EXIT_OK if verdict["ok"] else EXIT_VERIFY


def cmd_puncture(args) -> int:
    return _defect_command(args, args.kind)


def cmd_wormhole(args) -> int:
    return _defect_command(args, "wormhole")


def _initial_state(bundle: dict) -> StabilizerState:
    code = code_from_bundle(bundle)
    n = code.n_qubits
    gens = [SymplecticOp.from_json(n, o) for o in bundle["stabilizers"]]
    gens = [g for g in gens if not g.is_identity()]
    if bundle["defect"] is None:
        lx, lz = embedded_logical_pairs(code)
        pairs = [(SymplecticOp.x_type(a), SymplecticOp.z_type(b)) for a, b in zip(lx.to_dense(), lz.to_dense())]
    else:
        pairs = logical_pairs(ops_matrix(gens, n), n)
    state = StabilizerState(n, gens, pairs)
    state.validate()
    return state


def _parse_script(raw: bytes, n: int) -> list[tuple[list[SymplecticOp], bool]]:
    try:
        script = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"script is not JSON: {exc}") from exc
    if isinstance(script, dict):
        script = script.get("rounds")
    if not isinstance(script, list):
        raise InputError("script must be a list of rounds")
    rounds = []
    for rnd in script:
        promote = True
        if isinstance(rnd, dict):
            promote = bool(rnd.get("promote", True))
            rnd = rnd.get("measure", [])
        try:
            ops = [SymplecticOp.from_json(n, o) for o in rnd]
        except (TypeError, AttributeError, IndexError) as exc:
            raise InputError(f"bad operator in script: {exc}") from exc
        rounds.append((ops, promote))
    return rounds


def cmd_deform(args) -> int:
    bundle, _ = load_bundle(args.code)
    state = _initial_state(bundle)
    _, raw = _read(args.script)
    rounds = _parse_script(raw, state.n_qubits)
    start_labels = partition_by_weight(state.logicals, args.threshold)
    state = state.with_logicals(state.logicals, start_labels)
    steps = []
    for ops, promote in rounds:
        try:
            state, step = measure_round(state, ops, promote=promote)
        except ValueError as exc:
            raise InputError(f"round {len(steps)}: {exc}") from exc
        steps.append(step)
    out: dict = {"rounds": [s.to_json() for s in steps], "final_logicals": len(state.logicals)}
    if steps:
        q = compose(steps)
        end_labels = partition_by_weight(state.logicals, args.threshold)
        rows = [lbl for lbl in end_labels for _ in range(2)]
        cols = [lbl for lbl in start_labels for _ in range(2)]
        out["composed_q"] = q.to_dense().tolist()
        out["nonmixing"] = check_nonmixing(q, rows, cols)
        out["threshold"] = args.threshold
    _emit(out, args.out)
    return EXIT_OK


def cmd_trace(args) -> int:
    bundle, _ = load_bundle(args.code)
    code = code_from_bundle(bundle)
    n = code.n_qubits
    out: dict = {}
    if args.path:
        _, raw = _read(args.path)
        try:
            path = [tuple(p) for p in json.loads(raw)]
        except (json.JSONDecodeError, TypeError) as exc:
            raise InputError(f"path must be a JSON list of [check, var]: {exc}") from exc
        if args.paper_indexing:
            path = [(c - 1, v - 1) for c, v in path]
        out["move"] = move_point_puncture(code, path).to_json()
    if args.logical is not None or args.support is not None:
        if args.logical is not None:
            logs = bundle["logicals"]["x"] + bundle["logicals"]["z"]
            idx = args.logical - 1 if args.paper_indexing else args.logical
            if not 0 <= idx < len(logs):
                raise InputError(f"logical index out of range (have {len(logs)})")
            op = SymplecticOp.from_json(n, logs[idx])
        else:
            sup = parse_index_list(args.support, "qubit", args.paper_indexing)
            if any(q >= n for q in sup):
                raise InputError("support index out of range")
            op = SymplecticOp.from_supports(n, sup, ()) if args.pauli == "X" else SymplecticOp.from_supports(n, (), sup)
        g = build_logical_graph(code, op)
        out["graph"] = g.to_json()
        out.update(eulerian_traceable(g))
        out["open_trail"] = eulerian_trail(g)
    if not out:
        raise InputError("give --logical, --support or --path")
    _emit(out, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    bundle, _ = load_bundle(args.code)
    verdict = audit(bundle)
    _emit(verdict, None)
    return EXIT_OK if verdict["ok"] else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hgpdefects", description=__doc__)
    ap.add_argument("--paper-indexing", action="store_true", help="1-based ids; checks may be letters a, b, ...")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="hypergraph product of an alist parity-check matrix")
    b.add_argument("--alist", required=True)
    b.add_argument("--out")
    b.add_argument("--distance-budget", type=int, default=6)
    b.set_defaults(func=cmd_build)

    p = sub.add_parser("puncture", help="carve a smooth or rough puncture")
    p.add_argument("--code", required=True)
    p.add_argument("--kind", choices=[dfc.SMOOTH, dfc.ROUGH], required=True)
    p.add_argument("--vars", required=True)
    p.add_argument("--checks", required=True)
    p.add_argument("--out")
    p.add_argument("--force", action="store_true", help="skip the correctability refusal")
    p.set_defaults(func=cmd_puncture)

    w = sub.add_parser("wormhole", help="carve a wormhole")
    w.add_argument("--code", required=True)
    w.add_argument("--vars", required=True)
    w.add_argument("--checks", required=True)
    w.add_argument("--out")
    w.add_argument("--force", action="store_true")
    w.set_defaults(func=cmd_wormhole)

    d = sub.add_parser("deform", help="run a measurement script")
    d.add_argument("--code", required=True)
    d.add_argument("--script", required=True)
    d.add_argument("--out")
    d.add_argument("--threshold", type=int, default=0)
    d.set_defaults(func=cmd_deform)

    t = sub.add_parser("trace", help="traceability of a logical or a puncture path")
    t.add_argument("--code", required=True)
    grp = t.add_mutually_exclusive_group()
    grp.add_argument("--logical", type=int)
    grp.add_argument("--support")
    t.add_argument("--pauli", choices=["X", "Z"], default="X")
    t.add_argument("--path", help="JSON list of [check, var] positions")
    t.add_argument("--out")
    t.set_defaults(func=cmd_trace)

    v = sub.add_parser("verify", help="audit a bundle")
    v.add_argument("--code", required=True)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except VerificationError as exc:
        sys.stderr.write(f"verification failed: {exc}\n")
        return EXIT_VERIFY
    except (KeyError, TypeError) as exc:
        sys.stderr.write(f"error: malformed input ({exc})\n")
        return EXIT_INPUT
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
