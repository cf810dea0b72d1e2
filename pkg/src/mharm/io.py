"""Binary and CSV serialization for stacks, weight systems and reports.

Binary layout: an 8-byte magic, a little-endian ``uint32`` header length,
a UTF-8 JSON header, then raw little-endian arrays in C order.
"""

from __future__ import annotations

import csv
import io
import json
import struct
from pathlib import Path

import numpy as np

from mharm.errors import InvalidSpecError
from mharm.modes import CONVENTION_TAG, GridSpec, ModeStack, SpectralStack
from mharm.report import SCHEMA_VERSION, VerificationReport, sort_key
from mharm.weights import WeightSystem, density_from_record

STACK_MAGIC = b"MHARMSTK"
WEIGHT_MAGIC = b"MHARMWGT"
REPORT_COLUMNS = ("check", "generator", "params", "lhs", "rhs", "rel_err", "tol", "pass")


def _pack(magic: bytes, header: dict, arrays) -> bytes:
    head = json.dumps(header, sort_keys=True).encode()
    body = b"".join(np.ascontiguousarray(a).astype(a.dtype.newbyteorder("<"), copy=False).tobytes() for a in arrays)
    return magic + struct.pack("<I", len(head)) + head + body


def _unpack(data: bytes, magic: bytes) -> tuple[dict, memoryview]:
    if data[:8] != magic:
        raise InvalidSpecError("not an mharm file of the expected kind")
    (n,) = struct.unpack("<I", data[8:12])
    header = json.loads(data[12 : 12 + n].decode())
    if header.get("schema") != SCHEMA_VERSION:
        raise InvalidSpecError(f"unsupported schema {header.get('schema')}")
    return header, memoryview(data)[12 + n :]


def _grid_header(g: GridSpec) -> dict:
    return {"L": g.L, "N": g.N, "M": g.M, "convention": CONVENTION_TAG, "schema": SCHEMA_VERSION}


def _grid_from(header: dict) -> GridSpec:
    if header.get("convention") != CONVENTION_TAG:
        raise InvalidSpecError(f"file uses convention {header.get('convention')!r}")
    return GridSpec(float(header["L"]), int(header["N"]), int(header["M"]))


def stack_to_bytes(stack: ModeStack | SpectralStack) -> bytes:
    kind = "spectral" if isinstance(stack, SpectralStack) else "spatial"
    return _pack(STACK_MAGIC, _grid_header(stack.grid) | {"kind": kind}, [stack.modes.astype("<c16")])


def stack_from_bytes(data: bytes) -> ModeStack | SpectralStack:
    header, body = _unpack(data, STACK_MAGIC)
    g = _grid_from(header)
    arr = np.frombuffer(body, dtype="<c16").reshape(g.n_modes, g.N, g.N).astype(complex)
    return SpectralStack(g, arr) if header["kind"] == "spectral" else ModeStack(g, arr)


def write_stack(path, stack) -> None:
    Path(path).write_bytes(stack_to_bytes(stack))


def read_stack(path) -> ModeStack | SpectralStack:
    return stack_from_bytes(Path(path).read_bytes())


def stack_to_csv(stack) -> str:
    """One row per sample: ``m, i, j, re, im`` with ``repr`` floats (round-trips exactly)."""
    g = stack.grid
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    kind = "spectral" if isinstance(stack, SpectralStack) else "spatial"
    buf.write(f"# {json.dumps(_grid_header(g) | {'kind': kind}, sort_keys=True)}\n")
    w.writerow(["m", "i", "j", "re", "im"])
    for mi, m in enumerate(g.mode_indices):
        block = stack.modes[mi]
        for i in range(g.N):
            for j in range(g.N):
                v = block[i, j]
                w.writerow([int(m), i, j, repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()


def stack_from_csv(text: str):
    first, rest = text.split("\n", 1)
    header = json.loads(first[2:])
    g = _grid_from(header)
    arr = np.zeros((g.n_modes, g.N, g.N), dtype=complex)
    for row in csv.DictReader(io.StringIO(rest)):
        arr[int(row["m"]) + g.M, int(row["i"]), int(row["j"])] = complex(float(row["re"]), float(row["im"]))
    return SpectralStack(g, arr) if header["kind"] == "spectral" else ModeStack(g, arr)


def weights_to_bytes(W: WeightSystem) -> bytes:
    if W.phase_a is not None:
        raise InvalidSpecError("a weight system with a phase function cannot be serialized")
    header = _grid_header(W.grid) | {
        "mu": {"name": W.mu.name, "params": W.mu.params},
        "nu": {"name": W.nu.name, "params": W.nu.params},
        "r_cut": W.r_cut,
        "u_cut": W.u_cut,
    }
    arrays = [W.log_sigma.astype("<f8"), W.log_delta.astype("<f8"), W.phase_c.astype("<c16")]
    return _pack(WEIGHT_MAGIC, header, arrays)


def weights_from_bytes(data: bytes) -> WeightSystem:
    header, body = _unpack(data, WEIGHT_MAGIC)
    g = _grid_from(header)
    n_sig = g.N * g.N * 8
    n_del = g.n_modes * 8
    ls = np.frombuffer(body[:n_sig], dtype="<f8").reshape(g.N, g.N).astype(float)
    ld = np.frombuffer(body[n_sig : n_sig + n_del], dtype="<f8").astype(float)
    c = np.frombuffer(body[n_sig + n_del :], dtype="<c16").astype(complex)
    mu = density_from_record(2, header["mu"]["name"], header["mu"]["params"])
    nu = density_from_record(1, header["nu"]["name"], header["nu"]["params"])
    for a in (ls, ld, c):
        a.flags.writeable = False
    return WeightSystem(g, mu, nu, ls, ld, c, None, header["r_cut"], header["u_cut"])


def report_rows(reports) -> list[list[str]]:
    rows = []
    for r in sorted(reports, key=sort_key):
        rows.append(
            [
                r.check_name,
                r.generator,
                json.dumps(r.params, sort_keys=True),
                repr(r.lhs),
                repr(r.rhs),
                repr(r.rel_err),
                repr(r.tolerance),
                "true" if r.passed else "false",
            ]
        )
    return rows


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    w.writerows(report_rows(reports))
    return buf.getvalue()


def reports_to_json(reports, suite: str = "") -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "suite": suite,
        "convention": CONVENTION_TAG,
        "reports": [r.to_dict() for r in sorted(reports, key=sort_key)],
    }
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def write_reports(reports, out_dir, suite: str) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{suite}.csv"
    json_path = out / f"{suite}.json"
    csv_path.write_text(reports_to_csv(reports))
    json_path.write_text(reports_to_json(reports, suite))
    return csv_path, json_path


def report_from_dict(d: dict) -> VerificationReport:
    d = dict(d)
    d["warnings"] = tuple(d.get("warnings", ()))
    return VerificationReport(**d)
