"""Uniform cell-centered grid on the unit box with no-flux boundaries.

Fields live on cell centers; gradients live on faces.  Boundary faces always
carry zero flux, which makes the summation-by-parts identity

    quad(phi * div F) = -<F, grad phi>_faces

exact and is the discrete realization of the homogeneous Neumann condition.
Spatial axes are the trailing axes of an array, so vector fields of shape
(ncomp, n) or (ncomp, n, n) go through the same code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse


@dataclass(frozen=True)
class Grid:
    d: int
    n: int

    def __post_init__(self) -> None:
        if self.d not in (1, 2):
            raise ValueError("grid dimension must be 1 or 2")
        if self.n < 2:
            raise ValueError("grid needs at least 2 cells per axis")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def ncells(self) -> int:
        return self.n**self.d

    def _axis(self, f: np.ndarray, a: int) -> int:
        return f.ndim - self.d + a

    def cell_centers(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of shape `self.shape`, one per axis."""
        x = (np.arange(self.n) + 0.5) * self.h
        grids = np.meshgrid(*([x] * self.d), indexing="ij")
        return tuple(grids)

    def gradient(self, f: np.ndarray) -> tuple[np.ndarray, ...]:
        """Two-point face differences per axis; boundary faces are zero."""
        f = np.asarray(f, dtype=float)
        if f.shape[-self.d :] != self.shape:
            raise ValueError(f"field shape {f.shape} does not match grid {self.shape}")
        out = []
        for a in range(self.d):
            ax = self._axis(f, a)
            shape = list(f.shape)
            shape[ax] += 1
            g = np.zeros(shape)
            interior = [slice(None)] * f.ndim
            interior[ax] = slice(1, self.n)
            g[tuple(interior)] = np.diff(f, axis=ax) / self.h
            out.append(g)
        return tuple(out)

    def face_average(self, f: np.ndarray) -> tuple[np.ndarray, ...]:
        """Arithmetic cell-to-face averages; boundary faces copy the edge cell."""
        f = np.asarray(f, dtype=float)
        out = []
        for a in range(self.d):
            ax = self._axis(f, a)

            def at(sl):
                full = [slice(None)] * f.ndim
                full[ax] = sl
                return tuple(full)

            shape = list(f.shape)
            shape[ax] += 1
            g = np.empty(shape)
            g[at(slice(1, self.n))] = 0.5 * (f[at(slice(0, self.n - 1))] + f[at(slice(1, self.n))])
            g[at(0)] = f[at(0)]
            g[at(self.n)] = f[at(self.n - 1)]
            out.append(g)
        return tuple(out)

    def divergence(self, faces: tuple[np.ndarray, ...]) -> np.ndarray:
        """Adjoint of `gradient` under the no-flux convention."""
        if len(faces) != self.d:
            raise ValueError(f"expected {self.d} face arrays, got {len(faces)}")
        out = None
        for a, F in enumerate(faces):
            F = np.asarray(F, dtype=float)
            ax = F.ndim - self.d + a
            if F.shape[ax] != self.n + 1:
                raise ValueError("face array has wrong extent along its axis")
            term = np.diff(F, axis=ax) / self.h
            out = term if out is None else out + term
        return out

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        return self.divergence(self.gradient(f))

    def quad(self, f: np.ndarray) -> float | np.ndarray:
        """Midpoint quadrature over the spatial axes (|domain| = 1)."""
        f = np.asarray(f, dtype=float)
        axes = tuple(range(f.ndim - self.d, f.ndim))
        out = f.sum(axis=axes) * self.h**self.d
        return float(out) if np.ndim(out) == 0 else out

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        """Full L2 inner product, summing component axes as well."""
        return float(np.sum(np.asarray(f) * np.asarray(g)) * self.h**self.d)

    def reg_form(self, W: np.ndarray, phi: np.ndarray, eps: float) -> float:
        """Elliptic regularization form eps * (<lap W, lap phi> + <W, phi>)."""
        if eps == 0.0:
            return 0.0
        return eps * (self.inner(self.laplacian(W), self.laplacian(phi)) + self.inner(W, phi))

    def interior_face_pairs(self, a: int) -> tuple[np.ndarray, np.ndarray]:
        """Flat (left, right) cell indices for the interior faces of axis a."""
        idx = np.arange(self.ncells).reshape(self.shape)
        lo = [slice(None)] * self.d
        hi = [slice(None)] * self.d
        lo[a] = slice(0, self.n - 1)
        hi[a] = slice(1, self.n)
        return idx[tuple(lo)].ravel(), idx[tuple(hi)].ravel()

    def neg_laplacian_matrix(self) -> sparse.csr_matrix:
        """Sparse matrix of -laplacian on flat cell vectors (Neumann)."""
        rows: list[np.ndarray] = []
        cols: list[np.ndarray] = []
        data: list[np.ndarray] = []
        w = 1.0 / self.h**2
        for a in range(self.d):
            L, R = self.interior_face_pairs(a)
            ones = np.full(L.size, w)
            rows += [L, L, R, R]
            cols += [L, R, R, L]
            data += [ones, -ones, ones, -ones]
        mat = sparse.coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.ncells, self.ncells),
        )
        return mat.tocsr()
