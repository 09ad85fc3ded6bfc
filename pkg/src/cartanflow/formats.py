"""JSON file format for structure constants.

::

    {"dim": 3, "basis": ["h", "e", "f"],
     "brackets": [{"i": 0, "j": 1, "coeffs": {"1": 2.0}}, ...]}

Only ``i < j`` entries are listed; the loader fills in ``[e_j, e_i]`` by
antisymmetry. For complex algebras each coefficient is a ``[re, im]`` pair
and the document carries ``"field": "complex"``. A realified algebra
written by :func:`dumps_algebra` also stores ``"field": "complex-realified"``
and its ``"J"`` matrix.
"""
from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .algebra import LieAlgebra, validate
from .errors import StructureError
from .realify import ComplexLieAlgebra, realify

__all__ = ["dumps_algebra", "loads_algebra", "load_algebra", "save_algebra", "atomic_write"]


def _entries(c):
    n = c.shape[0]
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            nz = np.flatnonzero(c[:, i, j]) if not np.iscomplexobj(c) else np.flatnonzero(np.abs(c[:, i, j]))
            if nz.size == 0:
                continue
            if np.iscomplexobj(c):
                coeffs = {str(k): [float(c[k, i, j].real), float(c[k, i, j].imag)] for k in nz}
            else:
                coeffs = {str(k): float(c[k, i, j]) for k in nz}
            out.append({"i": i, "j": j, "coeffs": coeffs})
    return out


def dumps_algebra(alg, indent=None) -> str:
    """Serialize a :class:`LieAlgebra` or :class:`ComplexLieAlgebra`."""
    if isinstance(alg, ComplexLieAlgebra):
        doc = {"dim": alg.dim_c, "field": "complex", "basis": list(alg.labels), "brackets": _entries(alg.c)}
    else:
        doc = {"dim": alg.dim, "basis": list(alg.labels), "brackets": _entries(alg.c)}
        if alg.field_tag != "real":
            doc["field"] = alg.field_tag
            doc["J"] = np.asarray(alg.J).tolist()
    if alg.name:
        doc["name"] = alg.name
    return json.dumps(doc, indent=indent)


def _fail(msg):
    raise StructureError(msg)


def _parse(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise StructureError(f"malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None


def loads_algebra(text: str, complex_field=None, tol=1e-9, check=True):
    """Parse a document produced by :func:`dumps_algebra` (or written by hand).

    Parameters
    ----------
    complex_field : bool, optional
        Force reading coefficients as ``[re, im]`` pairs and return the
        realified algebra. Defaults to the document's ``"field"`` entry.
    tol : float
        Validation tolerance (antisymmetry is automatic; Jacobi is checked).

    Returns
    -------
    LieAlgebra
        Realified (with ``J``) when the input is complex.
    """
    doc = _parse(text)
    if not isinstance(doc, dict):
        _fail("top level must be a JSON object")
    for key in ("dim", "brackets"):
        if key not in doc:
            _fail(f"missing key {key!r}")
    n = doc["dim"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        _fail("'dim' must be a positive integer")
    field_tag = doc.get("field", "real")
    if field_tag not in ("real", "complex", "complex-realified"):
        _fail(f"unknown field {field_tag!r}")
    is_complex = field_tag == "complex" if complex_field is None else bool(complex_field)
    labels = doc.get("basis")
    if labels is not None and (not isinstance(labels, list) or len(labels) != n):
        _fail(f"'basis' must list {n} names")
    c = np.zeros((n, n, n), dtype=complex if is_complex else float)
    seen = set()
    if not isinstance(doc["brackets"], list):
        _fail("'brackets' must be a list")
    for pos, entry in enumerate(doc["brackets"]):
        where = f"brackets[{pos}]"
        if not isinstance(entry, dict) or not {"i", "j", "coeffs"} <= entry.keys():
            _fail(f"{where}: need keys i, j, coeffs")
        i, j = entry["i"], entry["j"]
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (i, j)):
            _fail(f"{where}: i and j must be integers")
        if not 0 <= i < j < n:
            _fail(f"{where}: need 0 <= i < j < {n}, got i={i}, j={j}")
        if (i, j) in seen:
            _fail(f"{where}: duplicate entry for ({i}, {j})")
        seen.add((i, j))
        if not isinstance(entry["coeffs"], dict):
            _fail(f"{where}: coeffs must be an object")
        for k_str, val in entry["coeffs"].items():
            try:
                k = int(k_str)
            except ValueError:
                _fail(f"{where}: coefficient key {k_str!r} is not an index")
            if not 0 <= k < n:
                _fail(f"{where}: coefficient index {k} out of range")
            if is_complex:
                if isinstance(val, (int, float)) and not isinstance(val, bool):
                    z = complex(val)
                elif isinstance(val, list) and len(val) == 2 and all(
                        isinstance(v, (int, float)) and not isinstance(v, bool) for v in val):
                    z = complex(val[0], val[1])
                else:
                    _fail(f"{where}: complex coefficient must be [re, im]")
                c[k, i, j], c[k, j, i] = z, -z
            else:
                if not isinstance(val, (int, float)) or isinstance(val, bool):
                    _fail(f"{where}: coefficient must be a number")
                c[k, i, j], c[k, j, i] = val, -val
    name = doc.get("name", "")
    if is_complex:
        calg = ComplexLieAlgebra(c.real, c.imag, labels, name)
        alg, _ = realify(calg, tol)
        return LieAlgebra(alg.c, alg.labels, alg.field_tag, alg.J, name=name)
    J = doc.get("J")
    alg = LieAlgebra(c, labels, field_tag, None if J is None else np.array(J, dtype=float), name=name)
    if check:
        validate(alg, tol, raise_on_failure=True)
    return alg


def load_algebra(path, complex_field=None, tol=1e-9, check=True):
    with open(path, encoding="utf-8") as fh:
        return loads_algebra(fh.read(), complex_field, tol, check)


def atomic_write(path, text: str):
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_algebra(alg, path, indent=2):
    atomic_write(path, dumps_algebra(alg, indent) + "\n")
