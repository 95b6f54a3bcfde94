"""Raw binary dump of dense complex matrices.

Layout: a 16-byte header with the row and column counts as little-endian
unsigned 64-bit integers, followed by the entries as little-endian
complex128 in row-major order.
"""

import numpy as np

__all__ = ["save_matrix", "load_matrix"]


def save_matrix(path, matrix):
    a = np.ascontiguousarray(matrix, dtype="<c16")
    if a.ndim != 2:
        raise ValueError("only 2-D matrices can be dumped")
    with open(path, "wb") as fh:
        fh.write(np.array(a.shape, dtype="<u8").tobytes())
        fh.write(a.tobytes(order="C"))


def load_matrix(path):
    with open(path, "rb") as fh:
        rows, cols = np.frombuffer(fh.read(16), dtype="<u8")
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != rows * cols:
        raise ValueError("file size does not match header dimensions")
    return data.reshape(int(rows), int(cols)).copy()
