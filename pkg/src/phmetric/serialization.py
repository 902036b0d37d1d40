"""
Reading and writing the shared JSON matrix format

  {"dim": d, "entries": [[re, im], ...]}   (row-major, d*d pairs)

and complex vectors as plain arrays of [re, im] pairs.

MIT License

Copyright (c) 2026 The phmetric authors

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""

from phmetric.errors import ValidationError

import json
import os
from typing import Any, List

import numpy as np


def complex_to_json(z: complex) -> List[float]:
  z = complex(z)
  return [float(z.real), float(z.imag)]


def complex_from_json(pair) -> complex:
  if len(pair) != 2:
    raise ValidationError(f"Expected a [re, im] pair, got {pair!r}.")
  return complex(float(pair[0]), float(pair[1]))


def vector_to_json(v: np.ndarray) -> List[List[float]]:
  return [complex_to_json(z) for z in np.asarray(v).ravel()]


def vector_from_json(obj) -> np.ndarray:
  v = np.array([complex_from_json(pair) for pair in obj], dtype=complex)
  if not np.all(np.isfinite(v)):
    raise ValidationError("Vector contains non-finite entries.")
  return v


def matrix_to_json(M: np.ndarray) -> dict:
  M = np.asarray(M)
  if M.ndim != 2 or M.shape[0] != M.shape[1]:
    raise ValidationError(f"Only square matrices can be exported, got shape {M.shape}.")
  return {"dim": int(M.shape[0]), "entries": vector_to_json(M)}


def matrix_from_json(obj: dict) -> np.ndarray:
  """Parse and validate a matrix in the shared format."""
  try:
    dim = int(obj["dim"])
    entries = obj["entries"]
  except (KeyError, TypeError) as e:
    raise ValidationError(f"Malformed matrix object, missing {e}.")
  if dim < 1 or len(entries) != dim * dim:
    raise ValidationError(f"Matrix of dimension {dim} needs {dim * dim} entries, got {len(entries)}.")
  return vector_from_json(entries).reshape(dim, dim)


def write_json(path: str, obj: Any):
  directory = os.path.dirname(path)
  if directory:
    os.makedirs(directory, exist_ok=True)
  with open(path, "w") as file:
    json.dump(obj, file, indent=1)
    file.write("\n")


def read_json(path: str) -> Any:
  with open(path, "r") as file:
    return json.load(file)


def write_matrix(path: str, M: np.ndarray):
  write_json(path, matrix_to_json(M))


def read_matrix(path: str) -> np.ndarray:
  return matrix_from_json(read_json(path))
