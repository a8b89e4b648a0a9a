"""Three-point potentials K(x, y, z) that depend only on the Gram triple (u, v, t).

Families:
    - p-frame potential |uvt|^p
    - raw triple product uvt
    - semidefinite kernels: Q_m^d, Y_{m,i,j}^d and their symmetrizations
      S_{m,i,j}^d over the six permutations of (x, y, z)
    - symmetric polynomials in (u, v, t)
    - cone combinations sum_m Tr(S_m^d A_m) with PSD blocks A_m, whose energy
      at the uniform measure is 0 and which are therefore minimized by it

Every evaluator accepts scalars or numpy arrays of matching shape, so energy
sums and Monte-Carlo estimates vectorize over whole batches of triples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from src.threepoint.data import BLOCK_EIGEN_TOL, INNER_PRODUCT_SLACK
from src.threepoint.errors import DomainError, KernelError
from src.threepoint.gegenbauer import gegenbauer_all, gegenbauer_eval, recurrence_step
from src.threepoint.geometry import GramTriple, UnitVector, gram_triple

ArrayLike = Union[float, np.ndarray]
Monomial = Tuple[int, int, int]

# Six permutations of (x, y, z) act on (u, v, t) as the six permutations of
# the triple itself (u is opposite x, v opposite y, t opposite z).
TRIPLE_PERMUTATIONS: Tuple[Tuple[int, int, int], ...] = tuple(itertools.permutations(range(3)))


class KernelKind(Enum):
    """Kernel family; the value is the JSON "kind" tag."""

    PFRAME = "pframe"
    TRIPLE_PRODUCT = "uvt"
    S_ENTRY = "s"
    POLY = "poly"
    CONE = "cone"


# =============================================================================
# PSD BLOCKS
# =============================================================================

@dataclass(frozen=True, eq=False)
class PsdBlock:
    """Finite symmetric PSD matrix A_m attached to level m.

    Entry (i, j) (0-based) multiplies S_{m,i,j}^d. For m = 0 the first row
    and column must vanish, otherwise the constant kernel S_{0,0,0} = 1
    would enter with a positive weight.

    Raises:
        KernelError: non-square, asymmetric, not PSD, or A_0 with a nonzero
            first row/column
    """

    level: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if self.level < 0:
            raise KernelError(f"block level must be nonnegative, got {self.level}")
        mat = np.array(self.matrix, dtype=np.float64, copy=True)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise KernelError(f"block for level {self.level} must be a non-empty square matrix")
        if not np.allclose(mat, mat.T, rtol=0.0, atol=1e-12):
            raise KernelError(f"block for level {self.level} is not symmetric")
        smallest = float(np.min(np.linalg.eigvalsh(mat)))
        if smallest < BLOCK_EIGEN_TOL:
            raise KernelError(
                f"block for level {self.level} is not positive semidefinite "
                f"(smallest eigenvalue {smallest:.3g})"
            )
        if self.level == 0 and (np.any(mat[0, :] != 0.0) or np.any(mat[:, 0] != 0.0)):
            raise KernelError("block for level 0 must have a zero first row and column")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    def to_dict(self) -> dict:
        return {"m": self.level, "matrix": self.matrix.tolist()}


# =============================================================================
# KERNEL SPEC
# =============================================================================

@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Immutable description of a three-point potential.

    Build through the named constructors (pframe, triple_product, s_entry,
    poly, cone) or from JSON via from_dict.

    Attributes:
        kind: kernel family
        dim: ambient dimension d of S^{d-1}
        p: exponent of the p-frame potential
        m, i, j: indices of an S_{m,i,j}^d entry
        monomials: symmetrized coefficients {(a, b, c): coef} of u^a v^b t^c
        blocks: PSD blocks of a cone combination
    """

    kind: KernelKind
    dim: int
    p: Optional[float] = None
    m: int = 0
    i: int = 0
    j: int = 0
    monomials: Tuple[Tuple[Monomial, float], ...] = ()
    blocks: Tuple[PsdBlock, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise KernelError(f"kernel dimension must be at least 2, got {self.dim}")
        if self.kind is KernelKind.PFRAME:
            if self.p is None or not self.p > 0:
                raise KernelError(f"p-frame exponent must be positive, got {self.p}")
        elif self.kind is KernelKind.S_ENTRY:
            check_level(self.m, self.dim)
            if self.i < 0 or self.j < 0:
                raise KernelError("S entry indices must be nonnegative")
        elif self.kind is KernelKind.CONE:
            for block in self.blocks:
                check_level(block.level, self.dim)

    # ---- constructors -------------------------------------------------------

    @classmethod
    def pframe(cls, p: float, dim: int) -> "KernelSpec":
        return cls(KernelKind.PFRAME, dim, p=float(p))

    @classmethod
    def triple_product(cls, dim: int) -> "KernelSpec":
        return cls(KernelKind.TRIPLE_PRODUCT, dim)

    @classmethod
    def s_entry(cls, m: int, i: int, j: int, dim: int) -> "KernelSpec":
        return cls(KernelKind.S_ENTRY, dim, m=m, i=i, j=j)

    @classmethod
    def poly(cls, coefficients: Mapping[Monomial, float], dim: int) -> "KernelSpec":
        """Polynomial kernel, symmetrized over the six permutations of (u, v, t)."""
        return cls(KernelKind.POLY, dim, monomials=symmetrize_monomials(coefficients))

    @classmethod
    def cone(cls, blocks: Iterable[PsdBlock], dim: int) -> "KernelSpec":
        return cls(KernelKind.CONE, dim, blocks=tuple(blocks))

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any], dim: int) -> "KernelSpec":
        """Parse the JSON kernel form; the dimension comes from the configuration.

        Raises:
            KernelError: unknown kind or malformed fields
        """
        try:
            kind = KernelKind(raw.get("kind"))
        except ValueError as exc:
            raise KernelError(f"unknown kernel kind {raw.get('kind')!r}") from exc
        try:
            if kind is KernelKind.PFRAME:
                return cls.pframe(float(raw["p"]), dim)
            if kind is KernelKind.TRIPLE_PRODUCT:
                return cls.triple_product(dim)
            if kind is KernelKind.S_ENTRY:
                return cls.s_entry(int(raw["m"]), int(raw["i"]), int(raw["j"]), dim)
            if kind is KernelKind.POLY:
                coeffs: Dict[Monomial, float] = {}
                for mono in raw["monomials"]:
                    key = (int(mono["a"]), int(mono["b"]), int(mono["c"]))
                    coeffs[key] = coeffs.get(key, 0.0) + float(mono["coef"])
                return cls.poly(coeffs, dim)
            blocks = [
                PsdBlock(int(b["m"]), np.asarray(b["matrix"], dtype=float)) for b in raw["blocks"]
            ]
            return cls.cone(blocks, dim)
        except (KeyError, TypeError) as exc:
            raise KernelError(f"malformed {kind.value} kernel: {exc}") from exc

    # ---- properties ---------------------------------------------------------

    @property
    def is_smoothable(self) -> bool:
        """Kernels the optimizer can differentiate (after smoothing)."""
        return self.kind in (KernelKind.PFRAME, KernelKind.TRIPLE_PRODUCT, KernelKind.POLY)

    def to_dict(self) -> dict:
        out: Dict[str, Any] = {"kind": self.kind.value}
        if self.kind is KernelKind.PFRAME:
            out["p"] = self.p
        elif self.kind is KernelKind.S_ENTRY:
            out.update(m=self.m, i=self.i, j=self.j)
        elif self.kind is KernelKind.POLY:
            out["monomials"] = [
                {"a": a, "b": b, "c": c, "coef": coef} for (a, b, c), coef in self.monomials
            ]
        elif self.kind is KernelKind.CONE:
            out["blocks"] = [block.to_dict() for block in self.blocks]
        return out

    def describe(self) -> str:
        if self.kind is KernelKind.PFRAME:
            return f"|uvt|^{self.p:g} (d={self.dim})"
        if self.kind is KernelKind.TRIPLE_PRODUCT:
            return f"uvt (d={self.dim})"
        if self.kind is KernelKind.S_ENTRY:
            return f"S_{{{self.m},{self.i},{self.j}}} (d={self.dim})"
        if self.kind is KernelKind.POLY:
            return f"symmetric polynomial with {len(self.monomials)} monomials (d={self.dim})"
        levels = ",".join(str(b.level) for b in self.blocks)
        return f"cone combination of levels [{levels}] (d={self.dim})"


def check_level(m: int, d: int) -> None:
    """Q_m^d needs d >= 3 once m >= 2 (P^{d-1} with d - 1 >= 2)."""
    if m < 0:
        raise KernelError(f"kernel level must be nonnegative, got {m}")
    if m >= 2 and d < 3:
        raise KernelError(f"level m={m} requires d >= 3, got d={d}")
    if d < 2:
        raise KernelError(f"dimension must be at least 2, got {d}")


def symmetrize_monomials(
    coefficients: Mapping[Monomial, float]
) -> Tuple[Tuple[Monomial, float], ...]:
    """Average each monomial over the six permutations of its exponents.

    Each coefficient is split evenly over the distinct permuted exponent
    tuples, which equals the six-term average and keeps u^0 v^0 t^0 exact.
    """
    acc: Dict[Monomial, float] = {}
    for exps, coef in coefficients.items():
        if len(exps) != 3 or any(int(e) != e or e < 0 for e in exps):
            raise KernelError(f"monomial exponents must be three nonnegative integers: {exps}")
        images = sorted({(exps[p[0]], exps[p[1]], exps[p[2]]) for p in TRIPLE_PERMUTATIONS})
        share = coef / len(images)
        for key in images:
            acc[key] = acc.get(key, 0.0) + share
    return tuple(sorted((k, v) for k, v in acc.items() if v != 0.0))


# =============================================================================
# GRAM-TRIPLE EVALUATORS
# =============================================================================

def _unpack(g: Union[GramTriple, Sequence[ArrayLike]]) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    if isinstance(g, GramTriple):
        return g.u, g.v, g.t
    u, v, t = g
    return u, v, t


def _check_cosines(*values: ArrayLike) -> None:
    for value in values:
        if np.any(np.abs(np.asarray(value)) > 1.0 + INNER_PRODUCT_SLACK):
            raise DomainError("Gram triple entries must lie in [-1, 1]")


def q_kernel(m: int, d: int, g: Union[GramTriple, Sequence[ArrayLike]]) -> ArrayLike:
    """Q_m^d(u, v, t) = q^{m/2} P_m^{d-1}((t - uv) / sqrt(q)),  q = (1-u^2)(1-v^2).

    Evaluated square-root free: with s = t - uv, R_0 = 1, R_1 = s and
    R_{k+1} = a_k s R_k - b_k q R_{k-1}, where (a_k, b_k) are the normalized
    Gegenbauer recurrence coefficients for P^{d-1}. Every R_k is a polynomial
    in (u, v, t), so the value is finite at |u| = 1 or |v| = 1.

    Raises:
        KernelError: m < 0, or m >= 2 with d < 3

    Example:
        >>> q_kernel(2, 4, GramTriple(0.0, 0.0, 0.5))   # (3 * 0.25 - 1) / 2
        -0.125
    """
    check_level(m, d)
    u, v, t = _unpack(g)
    _check_cosines(u, v, t)
    s = t - u * v
    if m == 0:
        return _like(s, 1.0)
    if m == 1:
        return s
    q = (1.0 - u * u) * (1.0 - v * v)
    h = d - 1
    prev, cur = _like(s, 1.0), s
    for k in range(1, m):
        a, b = recurrence_step(k, h)
        prev, cur = cur, a * s * cur - b * q * prev
    return cur


def y_kernel(
    m: int, i: int, j: int, d: int, g: Union[GramTriple, Sequence[ArrayLike]]
) -> ArrayLike:
    """Y_{m,i,j}^d = P_i^{d+2m}(u) P_j^{d+2m}(v) Q_m^d(u, v, t)."""
    if i < 0 or j < 0:
        raise KernelError("Y kernel indices must be nonnegative")
    u, v, t = _unpack(g)
    h = d + 2 * m
    return gegenbauer_eval(i, h, u) * gegenbauer_eval(j, h, v) * q_kernel(m, d, (u, v, t))


def s_kernel_gram(
    m: int, i: int, j: int, d: int, g: Union[GramTriple, Sequence[ArrayLike]]
) -> ArrayLike:
    """S_{m,i,j}^d computed from a Gram triple (average over its six permutations)."""
    triple = _unpack(g)
    total: ArrayLike = 0.0
    for perm in TRIPLE_PERMUTATIONS:
        total = total + y_kernel(m, i, j, d, (triple[perm[0]], triple[perm[1]], triple[perm[2]]))
    return total / 6.0


def s_kernel(m: int, i: int, j: int, d: int, x: UnitVector, y: UnitVector, z: UnitVector) -> float:
    """S_{m,i,j}^d(x, y, z): average of Y over the six orderings of the points.

    Raises:
        DimensionMismatchError: the points differ in dimension
    """
    points = (x, y, z)
    total = 0.0
    for perm in TRIPLE_PERMUTATIONS:
        g = gram_triple(points[perm[0]], points[perm[1]], points[perm[2]])
        total += float(y_kernel(m, i, j, d, g))
    return total / 6.0


def pframe_potential(p: float, g: Union[GramTriple, Sequence[ArrayLike]]) -> ArrayLike:
    """|uvt|^p with 0^p = 0.

    Raises:
        DomainError: p <= 0
    """
    if not p > 0:
        raise DomainError(f"p-frame exponent must be positive, got {p}")
    u, v, t = _unpack(g)
    return np.abs(u * v * t) ** p


def poly_eval(
    monomials: Sequence[Tuple[Monomial, float]], g: Union[GramTriple, Sequence[ArrayLike]]
) -> ArrayLike:
    u, v, t = _unpack(g)
    total: ArrayLike = _like(np.asarray(u) * 0.0, 0.0)
    for (a, b, c), coef in monomials:
        total = total + coef * (u**a) * (v**b) * (t**c)
    return total


def s_block(m: int, size: int, d: int, g: Union[GramTriple, Sequence[ArrayLike]]) -> np.ndarray:
    """Leading size x size block of S_m^d, shape (size, size, *shape(u)).

    One Gegenbauer pass per permutation serves every entry.
    """
    check_level(m, d)
    triple = tuple(np.asarray(x, dtype=np.float64) for x in _unpack(g))
    _check_cosines(*triple)
    h = d + 2 * m
    total = np.zeros((size, size) + np.shape(triple[0]))
    for perm in TRIPLE_PERMUTATIONS:
        u, v, t = triple[perm[0]], triple[perm[1]], triple[perm[2]]
        pu = np.asarray(gegenbauer_all(size - 1, h, u))
        pv = np.asarray(gegenbauer_all(size - 1, h, v))
        q = np.asarray(q_kernel(m, d, (u, v, t)))
        total += pu[:, None] * pv[None, :] * q
    return total / 6.0


def cone_gram_eval(spec: KernelSpec, g: Union[GramTriple, Sequence[ArrayLike]]) -> ArrayLike:
    """sum_m sum_{i,j} (A_m)_{i,j} S_{m,i,j}^d on Gram triples."""
    u, v, t = _unpack(g)
    total: ArrayLike = _like(np.asarray(u) * 0.0, 0.0)
    for block in spec.blocks:
        entries = s_block(block.level, block.size, spec.dim, (u, v, t))
        total = total + np.tensordot(block.matrix, entries, axes=([0, 1], [0, 1]))
    if isinstance(total, np.ndarray) and total.ndim == 0:
        return float(total)
    return total


def packing_certificate_kernel(d: int) -> KernelSpec:
    """6((d-1)^2/d^2 S_{0,2,2} + S_{1,1,1}) as a cone combination.

    Pointwise it equals 6uvt - (4/d)(u^2 + v^2 + t^2) + 6/d^2, and its
    energy is nonnegative for every measure.
    """
    a0 = np.zeros((3, 3))
    a0[2, 2] = 6.0 * (d - 1) ** 2 / d**2
    a1 = np.zeros((2, 2))
    a1[1, 1] = 6.0
    return KernelSpec.cone([PsdBlock(0, a0), PsdBlock(1, a1)], d)


def cone_kernel_eval(spec: KernelSpec, x: UnitVector, y: UnitVector, z: UnitVector) -> float:
    """Tr-form cone kernel sum_m Tr(S_m^d(x, y, z) A_m) on three points."""
    if spec.kind is not KernelKind.CONE:
        raise KernelError(f"expected a cone kernel, got {spec.kind.value}")
    return float(cone_gram_eval(spec, gram_triple(x, y, z)))


def evaluate(spec: KernelSpec, u: ArrayLike, v: ArrayLike, t: ArrayLike) -> ArrayLike:
    """Evaluate any kernel on (arrays of) Gram triples."""
    if spec.kind is KernelKind.PFRAME:
        assert spec.p is not None
        return pframe_potential(spec.p, (u, v, t))
    if spec.kind is KernelKind.TRIPLE_PRODUCT:
        return u * v * t
    if spec.kind is KernelKind.S_ENTRY:
        return s_kernel_gram(spec.m, spec.i, spec.j, spec.dim, (u, v, t))
    if spec.kind is KernelKind.POLY:
        return poly_eval(spec.monomials, (u, v, t))
    return cone_gram_eval(spec, (u, v, t))


def evaluate_points(spec: KernelSpec, x: UnitVector, y: UnitVector, z: UnitVector) -> float:
    return float(evaluate(spec, *gram_triple(x, y, z).as_tuple()))


def _like(template: ArrayLike, value: float) -> ArrayLike:
    if isinstance(template, np.ndarray) and template.ndim > 0:
        return np.full(template.shape, value)
    return value


def random_cone_kernel(
    dim: int, rng: np.random.Generator, levels: Sequence[int] = (0, 1, 2), size: int = 3
) -> KernelSpec:
    """Random valid cone combination: A_m = B B^T, first row/column of A_0 zeroed."""
    blocks: List[PsdBlock] = []
    for level in levels:
        if level >= 2 and dim < 3:
            continue
        factor = rng.standard_normal((size, size))
        mat = factor @ factor.T
        if level == 0:
            mat[0, :] = 0.0
            mat[:, 0] = 0.0
        blocks.append(PsdBlock(level, (mat + mat.T) / 2.0))
    return KernelSpec.cone(blocks, dim)
