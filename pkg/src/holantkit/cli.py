"""Command-line surface and JSON file formats.

Complex entries serialize as {"re": ..., "im": ...} decimal strings with 17
significant digits, so parse -> serialize -> parse round-trips bit-exactly.
All randomness flows from --seed; identical invocations print identical
bytes.  HOLANTKIT_EDGE_CAP overrides the brute-force edge cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

import numpy as np

from . import boolean, classify, fasteval, grideval, holo, interp
from .classify import Certificate, HARD
from .grideval import GridTooLargeError, SignatureGrid
from .sigcore import (
    EvalConfig,
    SignatureError,
    SymmetricSignature,
    Tensor,
    table_size,
    to_tensor,
)


class DocumentError(ValueError):
    """Malformed input document; carries a location string."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


BUILTIN_SIGNATURES = {
    "EQ3": Tensor(3, 2, np.eye(3, dtype=np.complex128)),
    "EQ_GR": Tensor(3, 2, holo.EQ_GR),
    "NEQ_GR": Tensor(3, 2, holo.NEQ_GR),
    "NEQ_BGR": Tensor(3, 2, holo.NEQ_B_GR),
    "EQ2": Tensor(2, 2, np.eye(2, dtype=np.complex128)),
    "NEQ2": Tensor(2, 2, np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)),
}


# -- complex <-> decimal-string encoding ------------------------------------


def encode_complex(z: complex) -> dict:
    return {"re": "%.17g" % z.real, "im": "%.17g" % z.imag}


def decode_complex(obj, where: str) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    if not isinstance(obj, dict) or "re" not in obj or "im" not in obj:
        raise DocumentError(where, "expected {re, im} entry")
    try:
        return complex(float(obj["re"]), float(obj["im"]))
    except (TypeError, ValueError) as exc:
        raise DocumentError(where, f"bad decimal value ({exc})")


# -- signature documents ------------------------------------------------------


def signature_to_doc(sig) -> dict:
    t = to_tensor(sig)
    if isinstance(sig, SymmetricSignature):
        return {
            "kind": "symmetric",
            "domain_size": sig.domain_size,
            "arity": sig.arity,
            "entries": [encode_complex(z) for z in sig.table],
        }
    return {
        "kind": "tensor",
        "domain_size": t.domain_size,
        "arity": t.arity,
        "entries": [encode_complex(z) for z in t.entries],
    }


def signature_from_doc(doc, where: str = "signature"):
    if isinstance(doc, str):
        if doc not in BUILTIN_SIGNATURES:
            raise DocumentError(where, f"unknown builtin signature {doc!r}")
        return BUILTIN_SIGNATURES[doc]
    for key in ("kind", "domain_size", "arity", "entries"):
        if key not in doc:
            raise DocumentError(where, f"missing field {key!r}")
    kind = doc["kind"]
    d, r = doc["domain_size"], doc["arity"]
    entries = [
        decode_complex(e, f"{where}.entries[{i}]") for i, e in enumerate(doc["entries"])
    ]
    try:
        if kind == "symmetric":
            if len(entries) != table_size(d, r):
                raise SignatureError(
                    f"expected {table_size(d, r)} entries, got {len(entries)}"
                )
            return SymmetricSignature(d, r, np.array(entries))
        if kind == "tensor":
            return Tensor(d, r, np.array(entries))
    except SignatureError as exc:
        raise DocumentError(where, str(exc))
    raise DocumentError(where, f"unknown kind {kind!r}")


def grid_from_doc(doc, where: str = "grid") -> tuple[SignatureGrid, dict]:
    for key in ("vertices", "edges"):
        if key not in doc:
            raise DocumentError(where, f"missing field {key!r}")
    grid = SignatureGrid(domain_size=int(doc.get("domain_size", 3)))
    ids = {}
    for i, vdoc in enumerate(doc["vertices"]):
        vwhere = f"{where}.vertices[{i}]"
        if "id" not in vdoc or "signature" not in vdoc:
            raise DocumentError(vwhere, "vertex needs id and signature")
        if vdoc["id"] in ids:
            raise DocumentError(vwhere, f"duplicate vertex id {vdoc['id']!r}")
        ids[vdoc["id"]] = grid.add_vertex(signature_from_doc(vdoc["signature"], vwhere))

    def port(p, pwhere):
        if not (isinstance(p, (list, tuple)) and len(p) == 2 and p[0] in ids):
            raise DocumentError(pwhere, "port must be [vertex id, port index]")
        return (ids[p[0]], int(p[1]))

    for i, edge in enumerate(doc["edges"]):
        ewhere = f"{where}.edges[{i}]"
        if not (isinstance(edge, (list, tuple)) and len(edge) == 2):
            raise DocumentError(ewhere, "edge must be a pair of ports")
        grid.add_edge(port(edge[0], ewhere), port(edge[1], ewhere))
    for i, p in enumerate(doc.get("dangling", [])):
        grid.add_dangling(port(p, f"{where}.dangling[{i}]"))
    try:
        grid.validate()
    except SignatureError as exc:
        raise DocumentError(where, str(exc))
    return grid, ids


def matrix_from_doc(doc, where: str = "matrix") -> np.ndarray:
    rows = doc.get("rows") if isinstance(doc, dict) else doc
    if not isinstance(rows, list) or not rows:
        raise DocumentError(where, "expected {rows: [[...], ...]}")
    out = [
        [decode_complex(e, f"{where}.rows[{i}][{j}]") for j, e in enumerate(row)]
        for i, row in enumerate(rows)
    ]
    return np.array(out, dtype=np.complex128)


def certificate_to_doc(cert: Certificate) -> dict:
    doc = {
        "variant": cert.variant,
        "residual": "%.17g" % cert.residual,
        "all_matches": list(cert.all_matches),
        "ambiguous": cert.ambiguous,
        "vectors": [[encode_complex(z) for z in v] for v in cert.vectors],
    }
    if cert.f_beta is not None:
        doc["f_beta"] = signature_to_doc(cert.f_beta)
    return doc


def certificate_from_doc(doc, where: str = "certificate") -> Certificate:
    vectors = tuple(
        np.array([decode_complex(e, f"{where}.vectors[{i}]") for e in vec])
        for i, vec in enumerate(doc.get("vectors", []))
    )
    f_beta = None
    if doc.get("f_beta") is not None:
        f_beta = signature_from_doc(doc["f_beta"], f"{where}.f_beta")
    return Certificate(
        variant=doc["variant"],
        vectors=vectors,
        f_beta=f_beta,
        residual=float(doc.get("residual", 0.0)),
        all_matches=tuple(doc.get("all_matches", [])),
        ambiguous=bool(doc.get("ambiguous", False)),
    )


# -- command helpers -----------------------------------------------------------


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DocumentError(path, str(exc))
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg)


def _config(args) -> EvalConfig:
    cap = args.edge_cap
    env_cap = os.environ.get("HOLANTKIT_EDGE_CAP")
    if cap is None and env_cap is not None:
        cap = int(env_cap)
    return EvalConfig(
        tol=args.tol, seed=args.seed, edge_cap=cap if cap is not None else 16
    )


def _fmt_complex(z: complex) -> str:
    return "%.12g%+.12gj" % (z.real, z.imag)


def _emit(payload: dict, as_json: bool, lines) -> None:
    if as_json:
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        for line in lines:
            print(line)


def cmd_classify(args) -> int:
    cfg = _config(args)
    sig = signature_from_doc(_load_json(args.signature), args.signature)
    if not isinstance(sig, SymmetricSignature) or sig.domain_size != 3 or sig.arity != 3:
        raise DocumentError(args.signature, "classify needs a symmetric ternary on domain 3")
    cert = classify.classify(sig, cfg)
    doc = certificate_to_doc(cert)
    lines = [f"variant: {cert.variant}", f"residual: {cert.residual:.3g}"]
    for i, v in enumerate(cert.vectors):
        lines.append(f"vector[{i}]: " + " ".join(_fmt_complex(z) for z in v))
    lines.append("all_matches: " + (",".join(cert.all_matches) or "-"))
    lines.append(f"ambiguous: {str(cert.ambiguous).lower()}")
    _emit(doc, args.json, lines)
    if cert.ambiguous:
        return 3
    return 2 if cert.is_hard else 0


def _single_ternary(grid: SignatureGrid) -> Optional[SymmetricSignature]:
    from .sigcore import from_tensor

    found = None
    for sig in grid.vertices:
        t = to_tensor(sig)
        if t.arity == 3:
            if not t.is_symmetric():
                return None
            f = from_tensor(t, check=False)
            if found is not None and not found.isclose(f):
                return None
            found = f
    return found


def cmd_eval(args) -> int:
    cfg = _config(args)
    grid, _ = grid_from_doc(_load_json(args.grid), args.grid)
    results = {}
    if args.mode in ("brute", "both"):
        try:
            results["brute"] = grideval.holant(grid, cfg)
        except GridTooLargeError as exc:
            print(f"refused: {exc}")
            return 1
    if args.mode in ("fast", "both"):
        if args.cert:
            cert = certificate_from_doc(_load_json(args.cert), args.cert)
            ternary = _single_ternary(grid)
        else:
            ternary = _single_ternary(grid)
            if ternary is None:
                print("error: fast mode needs a single ternary label or --cert")
                return 1
            cert = classify.classify(ternary, cfg)
        if cert.variant == HARD:
            print("certificate: HARD (no fast evaluation)")
            return 2
        inst = fasteval.TractableInstance(grid, ternary, cert)
        results["fast"] = fasteval.fast_holant(inst, cfg)
    payload = {k: encode_complex(v) for k, v in results.items()}
    lines = [f"{k}: {_fmt_complex(v)}" for k, v in sorted(results.items())]
    if len(results) == 2:
        diff = abs(results["fast"] - results["brute"]) / max(1.0, abs(results["brute"]))
        payload["relative_difference"] = "%.17g" % diff
        lines.append(f"relative difference: {diff:.3g}")
    _emit(payload, args.json, lines)
    return 0


def cmd_gadget(args) -> int:
    cfg = _config(args)
    grid, _ = grid_from_doc(_load_json(args.grid), args.grid)
    tensor = grideval.gadget_signature(grid, cfg)
    doc = signature_to_doc(tensor)
    lines = [f"arity: {tensor.arity}", f"domain_size: {tensor.domain_size}"]
    lines += ["entries: " + " ".join(_fmt_complex(z) for z in tensor.entries)]
    _emit(doc, args.json, lines)
    return 0


def cmd_transform(args) -> int:
    cfg = _config(args)
    sig = signature_from_doc(_load_json(args.signature), args.signature)
    mat = matrix_from_doc(_load_json(args.matrix), args.matrix)
    out = holo.apply_transform(mat, sig)
    doc = signature_to_doc(out)
    if isinstance(out, SymmetricSignature):
        entries = out.table
    else:
        entries = out.entries
    _emit(doc, args.json, ["entries: " + " ".join(_fmt_complex(z) for z in entries)])
    return 0


def cmd_interp_demo(args) -> int:
    cfg = _config(args)
    doc = _load_json(args.instance)
    grid, ids = grid_from_doc(doc, args.instance)
    marked_ids = doc.get("marked", [])
    try:
        marked = tuple(ids[m] for m in marked_ids)
    except KeyError as exc:
        raise DocumentError(args.instance, f"unknown marked vertex {exc}")
    h = matrix_from_doc(_load_json(args.h_matrix), args.h_matrix)
    inst = interp.OccurrenceInstance(grid, marked)

    def oracle(g: SignatureGrid) -> complex:
        return grideval.holant(g, cfg)

    recovered = interp.interpolate(inst, h, oracle, cfg)
    direct = grideval.holant(grid, cfg)
    diff = abs(recovered - direct) / max(1.0, abs(direct))
    payload = {
        "recovered": encode_complex(recovered),
        "direct": encode_complex(direct),
        "relative_difference": "%.17g" % diff,
    }
    _emit(
        payload,
        args.json,
        [
            f"recovered: {_fmt_complex(recovered)}",
            f"direct:    {_fmt_complex(direct)}",
            f"relative difference: {diff:.3g}",
        ],
    )
    return 0


def cmd_verify(args) -> int:
    cfg = _config(args)
    report = grideval.regression_fixture_suite(cfg)
    payload = {
        "fixtures": [
            {"name": r.name, "params": repr(r.params), "residual": "%.17g" % r.residual}
            for r in report.results
        ],
        "max_residual": "%.17g" % report.max_residual,
    }
    lines = [f"{r.residual:12.3e}  {r.name}  {r.params}" for r in report.results]
    lines.append(f"max residual: {report.max_residual:.3e}")
    _emit(payload, args.json, lines)
    return 0 if report.max_residual <= 1e-8 else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holantkit",
        description="Classify ternary signatures on domain 3 and evaluate Holant values.",
    )
    parser.add_argument("--tol", type=float, default=1e-9, help="relative tolerance")
    parser.add_argument("--seed", type=int, default=20259, help="seed for randomized probes")
    parser.add_argument("--edge-cap", type=int, default=None, help="brute-force edge cap")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="emit a tractability certificate or HARD")
    p.add_argument("signature")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("eval", help="evaluate the Holant value of a grid")
    p.add_argument("grid")
    p.add_argument("--mode", choices=("brute", "fast", "both"), default="both")
    p.add_argument("--cert", default=None, help="certificate JSON for fast mode")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gadget", help="signature of a gadget with dangling edges")
    p.add_argument("grid")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("transform", help="apply a matrix to every signature index")
    p.add_argument("signature")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("interp-demo", help="interpolation recovery vs direct evaluation")
    p.add_argument("instance")
    p.add_argument("h_matrix")
    p.set_defaults(func=cmd_interp_demo)

    p = sub.add_parser("verify", help="run the gadget regression fixtures")
    p.add_argument("fixtures", nargs="?", default="paper-gadgets")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"parse error at {exc.location}: {exc.args[0]}", file=sys.stderr)
        return 1
    except (SignatureError, interp.InterpolationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
