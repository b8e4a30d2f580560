"""Single-chart curvature pipeline.

Metric components are evaluated in jet arithmetic, so Christoffel symbols come
out carrying one valid derivative order and the full Riemann tensor needs no
finite differencing anywhere.  Pointwise norms are taken in an orthonormalized
frame (Cholesky of the metric), which makes every reported residual a
chart-independent scalar.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .errors import (
    DegenerateMetricError,
    DimensionError,
    DomainError,
    SingularEvaluationError,
)

__all__ = [
    "Chart",
    "ScalarField",
    "OneFormField",
    "TwoFormField",
    "MetricField",
    "metric_jets",
    "jet_matrix_inverse",
    "christoffel_jets",
    "christoffel",
    "riemann",
    "weyl",
    "hodge_star",
    "sd_asd_split",
    "split_two_form",
    "exterior_derivative",
    "ext_d",
    "conformal_rescale",
    "sectional_curvature",
    "curvature_report",
    "CurvatureReport",
    "orthonormal_frame",
    "levi_civita_symbol",
    "PAIRS4",
    "star_matrix_flat4",
    "two_form_to_six",
    "tensor_norm",
]


# ---------------------------------------------------------------------------
# charts and fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Chart:
    """Open axis-aligned box with named, ordered coordinates.

    The coordinate order fixes the orientation: the volume form of
    dx^0 ^ ... ^ dx^{n-1} has sign ``orientation`` (+1 unless flipped).
    """

    names: tuple
    lo: tuple
    hi: tuple
    orientation: int = 1

    def __post_init__(self):
        if self.dim not in (2, 3, 4):
            raise DimensionError(f"charts support dimensions 2-4, got {self.dim}")
        for a, (l, h) in enumerate(zip(self.lo, self.hi)):
            if not l < h:
                raise DomainError(f"chart axis {self.names[a]} has empty range [{l}, {h}]")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @property
    def dim(self):
        return len(self.names)

    def contains(self, point):
        return all(l < x < h for x, l, h in zip(point, self.lo, self.hi))

    def require_inside(self, point):
        if len(point) != self.dim:
            raise DomainError(f"point {tuple(point)} has wrong dimension for chart {self.names}")
        if not self.contains(point):
            raise DomainError(f"point {tuple(point)} outside chart domain "
                              f"{list(zip(self.names, self.lo, self.hi))}")

    def flipped(self):
        return Chart(self.names, self.lo, self.hi, -self.orientation)


def box(names, **ranges):
    lo = tuple(ranges[n][0] for n in names)
    hi = tuple(ranges[n][1] for n in names)
    return Chart(tuple(names), lo, hi)


def _eval_at(fn, coords, point):
    """Call a field closure, attaching the evaluation point to any singular
    evaluation raised from inside jet arithmetic."""
    try:
        return fn(coords)
    except SingularEvaluationError as exc:
        if exc.point is None:
            raise SingularEvaluationError(exc.args[0], point=point) from None
        raise


class ScalarField:
    """Closed-form scalar on a chart: ``fn`` maps coordinate jets (or floats)
    to one jet (or float)."""

    def __init__(self, chart, fn, name=""):
        self.chart = chart
        self.fn = fn
        self.name = name

    def jet(self, point):
        self.chart.require_inside(point)
        out = _eval_at(self.fn, jets.seed_all(point), point)
        if not isinstance(out, jets.Jet):
            out = jets.constant(float(out), len(point))
        if not out.is_finite():
            raise SingularEvaluationError(f"scalar field {self.name or self.fn} is not finite",
                                          point=point)
        return out

    def value(self, point):
        out = _eval_at(self.fn, [float(x) for x in point], point)
        return out.value if isinstance(out, jets.Jet) else float(out)


class OneFormField:
    """Closed-form one-form; ``fn`` returns a list of d component jets."""

    def __init__(self, chart, fn, name=""):
        self.chart = chart
        self.fn = fn
        self.name = name

    def jets(self, point):
        self.chart.require_inside(point)
        comps = _eval_at(self.fn, jets.seed_all(point), point)
        return [_as_jet(c, len(point)) for c in comps]

    def values(self, point):
        return np.array([j.value for j in self.jets(point)])


class TwoFormField:
    """Closed-form two-form; ``fn`` returns a full d x d antisymmetric nested
    list of component jets."""

    def __init__(self, chart, fn, name=""):
        self.chart = chart
        self.fn = fn
        self.name = name

    def jets(self, point):
        self.chart.require_inside(point)
        d = len(point)
        comps = _eval_at(self.fn, jets.seed_all(point), point)
        out = [[_as_jet(comps[a][b], d) for b in range(d)] for a in range(d)]
        for a in range(d):
            for b in range(d):
                if abs(out[a][b].value + out[b][a].value) > 1e-12 * (1 + abs(out[a][b].value)):
                    raise SingularEvaluationError(
                        f"two-form {self.name} not antisymmetric in components ({a},{b})",
                        point=point)
        return out

    def values(self, point):
        comps = self.jets(point)
        d = len(point)
        return np.array([[comps[a][b].value for b in range(d)] for a in range(d)])


class MetricField:
    """Symmetric metric tensor; ``fn`` returns the d x d nested component list."""

    def __init__(self, chart, fn, name=""):
        self.chart = chart
        self.fn = fn
        self.name = name

    def jets(self, point):
        self.chart.require_inside(point)
        return metric_jets(self, point)

    def values(self, point):
        d = self.chart.dim
        comps = _eval_at(self.fn, [float(x) for x in point], point)
        out = np.empty((d, d))
        for a in range(d):
            for b in range(d):
                c = comps[a][b]
                out[a, b] = c.value if isinstance(c, jets.Jet) else float(c)
        return out


def _as_jet(x, dim):
    return x if isinstance(x, jets.Jet) else jets.constant(float(x), dim)


def metric_jets(g, point):
    """Evaluate metric components as order-2 jets; enforce symmetry and finiteness."""
    d = g.chart.dim
    comps = _eval_at(g.fn, jets.seed_all(point), point)
    out = [[_as_jet(comps[a][b], d) for b in range(d)] for a in range(d)]
    for a in range(d):
        for b in range(a + 1, d):
            if abs(out[a][b].value - out[b][a].value) > 1e-12 * (1.0 + abs(out[a][b].value)):
                raise SingularEvaluationError(
                    f"metric {g.name} not symmetric in components ({a},{b})", point=point)
    for a in range(d):
        for b in range(d):
            if not out[a][b].is_finite():
                raise SingularEvaluationError(f"metric {g.name} has a non-finite component",
                                              point=point)
    return out


# ---------------------------------------------------------------------------
# jet linear algebra
# ---------------------------------------------------------------------------

def jet_matrix_inverse(mat, point=None):
    """Gauss-Jordan inverse of a small matrix of jets (partial pivoting on values)."""
    n = len(mat)
    dim = mat[0][0].dim
    aug = [[mat[i][j] for j in range(n)]
           + [jets.constant(1.0 if i == j else 0.0, dim) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(aug[r][col].value))
        if abs(aug[piv][col].value) < 1e-14:
            raise DegenerateMetricError("singular matrix in jet inverse", point=point)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv_p = aug[col][col].reciprocal()
        aug[col] = [x * inv_p for x in aug[col]]
        for r in range(n):
            if r != col:
                f = aug[r][col]
                if f.value != 0.0 or np.any(f._grad) or np.any(f._hess):
                    aug[r] = [aug[r][j] - f * aug[col][j] for j in range(2 * n)]
    return [[aug[i][n + j] for j in range(n)] for i in range(n)]


def jet_values(mat):
    return np.array([[m.value for m in row] for row in mat])


def christoffel_jets(gj, ginv=None, point=None):
    """Levi-Civita Christoffel symbols as order-1 jets, Gamma[a][b][c] symmetric in (b,c)."""
    d = len(gj)
    if ginv is None:
        ginv = jet_matrix_inverse(gj, point=point)
    dg = [[[gj[a][b].deriv(c) for c in range(d)] for b in range(d)] for a in range(d)]
    gamma = [[[None] * d for _ in range(d)] for _ in range(d)]
    for b in range(d):
        for c in range(b, d):
            low = [dg[e][c][b] + dg[e][b][c] - dg[b][c][e] for e in range(d)]
            for a in range(d):
                acc = ginv[a][0] * low[0]
                for e in range(1, d):
                    acc = acc + ginv[a][e] * low[e]
                val = acc * 0.5
                gamma[a][b][c] = val
                gamma[a][c][b] = val
    return gamma


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def _gamma_arrays(gamma):
    d = len(gamma)
    G = np.empty((d, d, d))
    dG = np.empty((d, d, d, d))       # dG[e,a,b,c] = d_e Gamma^a_{bc}
    for a in range(d):
        for b in range(d):
            for c in range(d):
                G[a, b, c] = gamma[a][b][c].value
                dG[:, a, b, c] = gamma[a][b][c].grad
    return G, dG


def christoffel(g, point):
    """Christoffel symbols Gamma^a_{bc} of the Levi-Civita connection as floats."""
    gj = g.jets(point)
    det = np.linalg.det(jet_values(gj))
    if abs(det) < 1e-14:
        raise DegenerateMetricError("metric is singular", point=point, det=det)
    gamma = christoffel_jets(gj, point=point)
    G, _ = _gamma_arrays(gamma)
    return G


def riemann_from_gamma(gamma):
    """(R^a_bcd, dGamma consumed) from order-1 Christoffel jets."""
    G, dG = _gamma_arrays(gamma)
    # R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}
    term1 = np.einsum("cadb->abcd", dG)
    term2 = np.einsum("dacb->abcd", dG)
    term3 = np.einsum("ace,edb->abcd", G, G)
    term4 = np.einsum("ade,ecb->abcd", G, G)
    return term1 - term2 + term3 - term4


def riemann(g, point):
    """(R^a_bcd, R_abcd, Ric_ab, scalar) with the unit round sphere positive."""
    gj = g.jets(point)
    gv = jet_values(gj)
    det = np.linalg.det(gv)
    if abs(det) < 1e-14:
        raise DegenerateMetricError("metric is singular", point=point, det=det)
    ginv_j = jet_matrix_inverse(gj, point=point)
    gamma = christoffel_jets(gj, ginv_j, point=point)
    R_up = riemann_from_gamma(gamma)
    if not np.all(np.isfinite(R_up)):
        raise SingularEvaluationError("curvature evaluation produced non-finite values",
                                      point=point)
    R_low = np.einsum("ae,ebcd->abcd", gv, R_up)
    ric = np.einsum("abad->bd", R_up)
    ginv = jet_values(ginv_j)
    scal = np.einsum("bd,bd->", ginv, ric)
    return R_up, R_low, ric, scal


def schouten(gv, ginv, ric, scal, n):
    return (ric - scal / (2.0 * (n - 1.0)) * gv) / (n - 2.0)


def kulkarni_nomizu(A, B):
    return (np.einsum("ac,bd->abcd", A, B) + np.einsum("bd,ac->abcd", A, B)
            - np.einsum("ad,bc->abcd", A, B) - np.einsum("bc,ad->abcd", A, B))


def weyl(g, point):
    """Weyl tensor W_abcd on a 4-chart (trace-free part of the curvature)."""
    if g.chart.dim != 4:
        raise DimensionError("Weyl tensor computed only on 4-charts; it vanishes "
                             "identically in dimension 3")
    gj = g.jets(point)
    gv = jet_values(gj)
    ginv = np.linalg.inv(gv)
    _, R_low, ric, scal = riemann(g, point)
    S = schouten(gv, ginv, ric, scal, 4)
    return R_low - kulkarni_nomizu(S, gv)


# ---------------------------------------------------------------------------
# orthonormal frames and norms
# ---------------------------------------------------------------------------

def orthonormal_frame(gv, point=None):
    """Columns E[:, i] form an oriented g-orthonormal frame (E^T g E = I).

    Cholesky doubles as the lazy positive-definiteness check.
    """
    try:
        L = np.linalg.cholesky(gv)
    except np.linalg.LinAlgError:
        raise DegenerateMetricError("metric not positive definite", point=point,
                                    det=float(np.linalg.det(gv)))
    return np.linalg.inv(L).T     # det > 0: orientation preserved


def to_frame(T, E):
    """Transform an all-lower-index tensor into the frame of orthonormal_frame."""
    for _ in range(T.ndim):
        T = np.tensordot(T, E, axes=([0], [0]))
    return T


def tensor_norm(T, gv):
    """Frame-invariant Frobenius norm of an all-lower-index tensor."""
    E = orthonormal_frame(gv)
    return float(np.sqrt(np.sum(to_frame(np.asarray(T, dtype=float), E) ** 2)))


# ---------------------------------------------------------------------------
# Hodge star and self-dual split
# ---------------------------------------------------------------------------

_LC_CACHE = {}


def levi_civita_symbol(n):
    if n not in _LC_CACHE:
        eps = np.zeros((n,) * n)
        for perm in itertools.permutations(range(n)):
            sign = 1
            p = list(perm)
            for i in range(n):
                while p[i] != i:
                    j = p[i]
                    p[i], p[j] = p[j], p[i]
                    sign = -sign
            eps[perm] = sign
        _LC_CACHE[n] = eps
    return _LC_CACHE[n]


def hodge_star(omega, gv, k, orientation=1, point=None):
    """Coordinate Hodge star of a k-form (full antisymmetric component array).

    (*w)_{b...} = (1/k!) w^{a...} eps_{a...b...} sqrt(det g), with eps fixed by
    the coordinate order and the chart orientation sign.
    """
    n = gv.shape[0]
    if not 0 <= k <= n:
        raise DimensionError(f"no {k}-forms on a {n}-chart")
    det = np.linalg.det(gv)
    if det <= 0:
        raise DegenerateMetricError("Hodge star needs a positive-definite metric",
                                    point=point, det=det)
    eps = levi_civita_symbol(n) * orientation
    vol = np.sqrt(det)
    if k == 0:
        return float(omega) * vol * eps
    ginv = np.linalg.inv(gv)
    up = np.asarray(omega, dtype=float)
    for _ in range(k):
        up = np.tensordot(up, ginv, axes=([0], [0]))
    # indices of `up` are now (a1...ak) raised, in order
    out = np.tensordot(up, eps, axes=(list(range(k)), list(range(k))))
    return out * vol / _factorial(k)


def _factorial(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


PAIRS4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def star_matrix_flat4(orientation=1):
    """Hodge star on 2-forms of flat oriented R^4 as a 6x6 matrix on PAIRS4."""
    eps = levi_civita_symbol(4) * orientation
    S = np.zeros((6, 6))
    for p, (i, j) in enumerate(PAIRS4):
        for q, (k, l) in enumerate(PAIRS4):
            S[p, q] = eps[i, j, k, l]
    return S


def two_form_to_six(F):
    return np.array([F[i, j] for (i, j) in PAIRS4])


def six_to_two_form(v):
    F = np.zeros((4, 4))
    for p, (i, j) in enumerate(PAIRS4):
        F[i, j] = v[p]
        F[j, i] = -v[p]
    return F


def weyl_operator_matrix(W_frame):
    """Weyl tensor in an orthonormal frame as the 6x6 endomorphism of 2-forms."""
    M = np.empty((6, 6))
    for p, (i, j) in enumerate(PAIRS4):
        for q, (k, l) in enumerate(PAIRS4):
            M[p, q] = W_frame[i, j, k, l]
    return M


def sd_asd_split(W, gv, orientation=1, point=None):
    """Split the Weyl endomorphism into self-dual / anti-self-dual blocks.

    Returns (W_plus, W_minus, plus_norm, minus_norm) with the blocks as 6x6
    matrices in the orthonormalized 2-form basis.
    """
    if gv.shape[0] != 4:
        raise DimensionError("self-dual decomposition requires a 4-chart")
    E = orthonormal_frame(gv, point=point)
    M = weyl_operator_matrix(to_frame(np.asarray(W, dtype=float), E))
    S = star_matrix_flat4(orientation)
    P_plus = 0.5 * (np.eye(6) + S)
    P_minus = 0.5 * (np.eye(6) - S)
    Wp = P_plus @ M @ P_plus
    Wm = P_minus @ M @ P_minus
    return Wp, Wm, float(np.linalg.norm(Wp)), float(np.linalg.norm(Wm))


def split_two_form(F, gv, orientation=1, point=None):
    """(plus part, minus part) of a 2-form in coordinates; parts sum to F."""
    if gv.shape[0] != 4:
        raise DimensionError("self-dual decomposition requires a 4-chart")
    E = orthonormal_frame(gv, point=point)
    Ff = to_frame(np.asarray(F, dtype=float), E)
    S = star_matrix_flat4(orientation)
    v = two_form_to_six(Ff)
    vp = 0.5 * (v + S @ v)
    vm = 0.5 * (v - S @ v)
    Einv = np.linalg.inv(E)
    back = lambda w: np.einsum("ia,jb,ij->ab", Einv, Einv, six_to_two_form(w))
    return back(vp), back(vm), float(np.linalg.norm(vp)), float(np.linalg.norm(vm))


# ---------------------------------------------------------------------------
# exterior derivative
# ---------------------------------------------------------------------------

def ext_d(comp_jets, dim):
    """Exterior derivative acting on a full antisymmetric array of component
    jets; result components are jets one order lower.

    Accepts k in {0, 1, 2}: a single jet, a list of d jets, or a d x d nested
    list.  Returns the (k+1)-form as a nested structure of jets.
    """
    if isinstance(comp_jets, jets.Jet):                      # k = 0
        return [comp_jets.deriv(a) for a in range(dim)]
    if isinstance(comp_jets[0], jets.Jet):                   # k = 1
        return [[comp_jets[b].deriv(a) - comp_jets[a].deriv(b) for b in range(dim)]
                for a in range(dim)]
    # k = 2
    out = [[[None] * dim for _ in range(dim)] for _ in range(dim)]
    for a in range(dim):
        for b in range(dim):
            for c in range(dim):
                out[a][b][c] = (comp_jets[b][c].deriv(a)
                                - comp_jets[a][c].deriv(b)
                                + comp_jets[a][b].deriv(c))
    return out


def form_values(comp, dim, k):
    if k == 1:
        return np.array([c.value for c in comp])
    if k == 2:
        return np.array([[comp[a][b].value for b in range(dim)] for a in range(dim)])
    if k == 3:
        return np.array([[[comp[a][b][c].value for c in range(dim)] for b in range(dim)]
                         for a in range(dim)])
    raise DimensionError(f"unsupported form degree {k}")


def exterior_derivative(form, point):
    """d of a scalar/one-form/two-form field, as float components."""
    dim = form.chart.dim
    if isinstance(form, ScalarField):
        return form_values(ext_d(form.jet(point), dim), dim, 1)
    if isinstance(form, OneFormField):
        return form_values(ext_d(form.jets(point), dim), dim, 2)
    if isinstance(form, TwoFormField):
        return form_values(ext_d(form.jets(point), dim), dim, 3)
    raise TypeError(f"not a form field: {form!r}")


# ---------------------------------------------------------------------------
# conformal rescaling, sectional curvature, full report
# ---------------------------------------------------------------------------

def conformal_rescale(g, f):
    """Metric field f * g for a positive scalar field f on the same chart."""
    def fn(coords):
        fac = f.fn(coords)
        comps = g.fn(coords)
        d = g.chart.dim
        if isinstance(fac, jets.Jet) and fac.value <= 0.0:
            raise DegenerateMetricError("conformal factor is not positive",
                                        point=tuple(c.value for c in coords))
        return [[fac * _as_jet(comps[a][b], d) for b in range(d)] for a in range(d)]
    return MetricField(g.chart, fn, name=f"({f.name or 'f'})*{g.name or 'g'}")


def sectional_curvature(g, point, X, Y):
    """Sectional curvature of span(X, Y); unit round spheres give +k."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    gv = g.values(point)
    gram = (X @ gv @ X) * (Y @ gv @ Y) - (X @ gv @ Y) ** 2
    if gram < 1e-14:
        raise ValueError("plane spanned by X, Y is degenerate")
    _, R_low, _, _ = riemann(g, point)
    num = np.einsum("abcd,a,b,c,d->", R_low, X, Y, X, Y)
    return float(num / gram)


@dataclass
class CurvatureReport:
    """Everything the pipeline knows about one metric at one point."""

    point: tuple
    gamma: np.ndarray
    riemann_up: np.ndarray
    riemann_low: np.ndarray
    ricci: np.ndarray
    scalar: float
    riemann_norm: float
    ricci_norm: float
    einstein_residual_norm: float
    weyl_low: np.ndarray | None = None
    weyl_norm: float = 0.0
    w_plus_norm: float = 0.0
    w_minus_norm: float = 0.0
    normalized: dict = field(default_factory=dict)

    def raw(self):
        out = {
            "riemann": self.riemann_norm,
            "ricci": self.ricci_norm,
            "scalar_curv": self.scalar,
            "einstein": self.einstein_residual_norm,
        }
        if self.weyl_low is not None:
            out.update(weyl=self.weyl_norm, w_plus=self.w_plus_norm,
                       w_minus=self.w_minus_norm)
        return out


def curvature_report(g, point, orientation=None):
    """Full pointwise curvature data; raises on singular/non-finite evaluation."""
    n = g.chart.dim
    if orientation is None:
        orientation = g.chart.orientation
    gj = g.jets(point)
    gv = jet_values(gj)
    det = np.linalg.det(gv)
    if abs(det) < 1e-14:
        raise DegenerateMetricError("metric is singular", point=point, det=det)
    ginv_j = jet_matrix_inverse(gj, point=point)
    gamma = christoffel_jets(gj, ginv_j, point=point)
    G, _ = _gamma_arrays(gamma)
    R_up = riemann_from_gamma(gamma)
    if not np.all(np.isfinite(R_up)):
        raise SingularEvaluationError("curvature evaluation produced non-finite values",
                                      point=point)
    R_low = np.einsum("ae,ebcd->abcd", gv, R_up)
    ric = np.einsum("abad->bd", R_up)
    ginv = jet_values(ginv_j)
    scal = float(np.einsum("bd,bd->", ginv, ric))

    riem_norm = tensor_norm(R_low, gv)
    ric_norm = tensor_norm(ric, gv)
    einstein = tensor_norm(ric - (scal / n) * gv, gv)

    report = CurvatureReport(
        point=tuple(float(x) for x in point),
        gamma=G, riemann_up=R_up, riemann_low=R_low, ricci=ric, scalar=scal,
        riemann_norm=riem_norm, ricci_norm=ric_norm, einstein_residual_norm=einstein,
    )
    if n == 4:
        S = schouten(gv, ginv, ric, scal, 4)
        W = R_low - kulkarni_nomizu(S, gv)
        _, _, wp, wm = sd_asd_split(W, gv, orientation, point=point)
        report.weyl_low = W
        report.weyl_norm = float(np.linalg.norm(
            weyl_operator_matrix(to_frame(W, orthonormal_frame(gv)))))
        report.w_plus_norm = wp
        report.w_minus_norm = wm

    scale = riem_norm + 1.0
    report.normalized = {k: abs(v) / scale for k, v in report.raw().items()}
    return report
