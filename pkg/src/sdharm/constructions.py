"""Factories for the fibred 4-metric families and the catalog of closed-form
base geometries, one-forms and potentials.

Every family is stored in the common normal form

    g = lam^-2 phi*(h) + lam^2 theta (x) theta

on a 4-chart whose first coordinate is the fibre coordinate; phi projects onto
the remaining three.  Factories never check their PDE hypotheses (Beltrami,
monopole, Einstein-Weyl): verification is always a separate call, so broken
inputs stay representable as negative controls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from . import jets
from .errors import DomainError

__all__ = [
    "FibrationMetric",
    "bryant_metric",
    "jones_tod_metric",
    "type2_warped",
    "type3_metric",
    "type4_metric",
    "type4_normalize",
    "conformal_rescale_fibration",
    "catalog",
    "catalog_names",
    "catalog_describe",
    "CATALOG",
]


# ---------------------------------------------------------------------------
# fibration container
# ---------------------------------------------------------------------------

@dataclass
class FibrationMetric:
    """A 4-metric fibred over a 3-chart by dropping the first coordinate."""

    total_chart: geo.Chart
    base_chart: geo.Chart
    h: geo.MetricField                 # base 3-metric
    g: geo.MetricField                 # total 4-metric
    theta: geo.OneFormField            # connection form on the total chart
    dilation_sq_inv: geo.ScalarField   # lam^-2 on the total chart
    family_tag: str
    family_params: dict = field(default_factory=dict)

    def base_point(self, point):
        return tuple(point[1:])

    def with_orientation(self, orientation):
        if orientation == self.total_chart.orientation:
            return self
        flipped = self.total_chart.flipped()
        return FibrationMetric(
            flipped, self.base_chart,
            self.h,
            geo.MetricField(flipped, self.g.fn, self.g.name),
            geo.OneFormField(flipped, self.theta.fn, self.theta.name),
            geo.ScalarField(flipped, self.dilation_sq_inv.fn, self.dilation_sq_inv.name),
            self.family_tag, dict(self.family_params))


def _total_chart(base_chart, fibre_range, fibre_name):
    return geo.Chart((fibre_name,) + tuple(base_chart.names),
                     (fibre_range[0],) + tuple(base_chart.lo),
                     (fibre_range[1],) + tuple(base_chart.hi),
                     base_chart.orientation)


def _pullback_metric(h_fn):
    """Base metric components extended by a zero fibre row/column."""
    def fn(coords):
        hb = h_fn(coords[1:])
        def comp(a, b):
            if a == 0 or b == 0:
                return 0.0
            return hb[a - 1][b - 1]
        return [[comp(a, b) for b in range(4)] for a in range(4)]
    return fn


def _assemble(total_chart, base_chart, h, lam_inv_sq_fn, theta_fn, tag, params,
              positivity_name="lam^-2"):
    """g = A phi*(h) + A^-1 theta^2 with A = lam^-2 evaluated in jets."""
    hp = _pullback_metric(h.fn)

    def g_fn(coords):
        A = lam_inv_sq_fn(coords)
        is_jet = isinstance(A, jets.Jet)
        aval = A.value if is_jet else float(A)
        if aval <= 0.0:
            raise DomainError(
                f"{positivity_name} must be positive on the domain, got {aval:.6g} "
                f"at {tuple(c.value if isinstance(c, jets.Jet) else c for c in coords)}")
        Ainv = A.reciprocal() if is_jet else 1.0 / A
        th = theta_fn(coords)
        hpv = hp(coords)
        return [[A * hpv[a][b] + Ainv * th[a] * th[b] for b in range(4)] for a in range(4)]

    g = geo.MetricField(total_chart, g_fn, name=tag)
    theta = geo.OneFormField(total_chart, theta_fn, name=f"{tag}.theta")
    lam = geo.ScalarField(total_chart, lam_inv_sq_fn, name=f"{tag}.lam_inv_sq")
    return FibrationMetric(total_chart, base_chart, h, g, theta, lam, tag, params)


def _theta_dtau_plus(A_fn):
    """theta = d(fibre) + pullback of a base one-form (A_fn may be None)."""
    def fn(coords):
        one = 1.0 + 0.0 * coords[0]
        if A_fn is None:
            zero = 0.0 * coords[0]
            return [one, zero, zero, zero]
        Ab = A_fn(coords[1:])
        return [one, Ab[0], Ab[1], Ab[2]]
    return fn


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

def bryant_metric(h, lam, A=None, fibre_range=(0.1, 5.0), fibre_name="tau"):
    """General normal form g = lam^-2 phi*(h) + lam^2 theta^2, theta = dtau + phi*(A).

    ``lam`` is a positive scalar field on the total chart (the dilation); the
    fundamental vertical field then satisfies g(V, V) = lam^2.
    """
    chart = _total_chart(h.chart, fibre_range, fibre_name)

    def lam_inv_sq(coords):
        l = lam.fn(coords)
        return (l * l).reciprocal() if isinstance(l, jets.Jet) else 1.0 / (l * l)

    return _assemble(chart, h.chart, h, lam_inv_sq,
                     _theta_dtau_plus(None if A is None else A.fn),
                     "bryant", {"lam": lam, "A": A}, positivity_name="lam^-2")


def jones_tod_metric(h, u, theta_fn=None, A=None, fibre_range=(-3.0, 3.0)):
    """g = v phi*(h) + v^-1 theta^2 with v = u o phi; fibre generated by a
    Killing field.  ``theta_fn`` defaults to dtau + phi*(A)."""
    chart = _total_chart(h.chart, fibre_range, "tau")
    if theta_fn is None:
        theta_fn = _theta_dtau_plus(None if A is None else A.fn)
    lam_inv_sq = lambda coords: u.fn(coords[1:])
    return _assemble(chart, h.chart, h, lam_inv_sq, theta_fn,
                     "type1", {"u": u, "A": A}, positivity_name="u")


def type2_warped(h, f, fibre_range=(-1.5, 1.5)):
    """g = f phi*(h) + dtau^2 for a positive warping f of the fibre coordinate.

    Normal form data: lam^-2 = f, theta = sqrt(f) dtau.  Geodesic fibres,
    integrable horizontal distribution, dilation constant on horizontal curves.
    """
    chart = _total_chart(h.chart, fibre_range, "tau")

    def theta_fn(coords):
        root = jets.sqrt(f.fn(coords)) if isinstance(f.fn(coords), jets.Jet) \
            else math.sqrt(f.fn(coords))
        zero = 0.0 * coords[0]
        return [root, zero, zero, zero]

    return _assemble(chart, h.chart, h, f.fn, theta_fn, "type2", {"f": f},
                     positivity_name="f")


def type3_metric(h, A=None, fibre_range=(0.1, 5.0)):
    """g = rho h + rho^-1 (drho + A)^2 on (0, inf) x N^3; lam^-2 = rho."""
    if fibre_range[0] <= 0:
        raise DomainError("type 3 fibre coordinate must stay positive")
    chart = _total_chart(h.chart, fibre_range, "rho")
    lam_inv_sq = lambda coords: coords[0]
    return _assemble(chart, h.chart, h, lam_inv_sq,
                     _theta_dtau_plus(None if A is None else A.fn),
                     "type3", {"A": A}, positivity_name="rho")


def type4_metric(h, alpha=None, c=1.0, fibre_range=(-1.5, 1.5)):
    """g = (e^rho + c) h + (e^rho + c)^-1 (drho - alpha)^2; lam^-2 = e^rho + c.

    ``c`` is a number or a basic scalar field.  Evaluation raises where
    e^rho + c <= 0 (the signature-flipping branch is not represented).
    """
    chart = _total_chart(h.chart, fibre_range, "rho")
    c_field = c if isinstance(c, geo.ScalarField) else None
    c_num = None if c_field is not None else float(c)

    def lam_inv_sq(coords):
        cv = c_field.fn(coords[1:]) if c_field is not None else c_num
        return jets.exp(coords[0]) + cv

    def theta_fn(coords):
        one = 1.0 + 0.0 * coords[0]
        if alpha is None:
            zero = 0.0 * coords[0]
            return [one, zero, zero, zero]
        ab = alpha.fn(coords[1:])
        return [one, -1.0 * ab[0], -1.0 * ab[1], -1.0 * ab[2]]

    return _assemble(chart, h.chart, h, lam_inv_sq, theta_fn, "type4",
                     {"alpha": alpha, "c": c}, positivity_name="e^rho + c")


def type4_normalize(fm):
    """Rescale a type-4 fibration so that the structure function becomes +-1.

    Output: g~ = |c| g, h~ = c^2 h, lam~^-2 = lam^-2 / |c|, theta~ = theta,
    alpha~ = alpha - d log|c|.  Requires c nowhere zero on the base domain.
    """
    if fm.family_tag != "type4":
        raise ValueError("normalization applies to type-4 fibrations")
    c = fm.family_params["c"]
    alpha = fm.family_params["alpha"]
    base = fm.base_chart

    if not isinstance(c, geo.ScalarField):
        c_num = float(c)
        if c_num == 0.0:
            raise DomainError("c vanishes; normalization undefined")
        c_fn = lambda coords3: c_num
    else:
        c_fn = c.fn

    def abs_c(coords3):
        cv = c_fn(coords3)
        v = cv.value if isinstance(cv, jets.Jet) else float(cv)
        if v == 0.0:
            raise DomainError("c vanishes; normalization undefined")
        return cv if v > 0 else -1.0 * cv

    h_tilde = geo.MetricField(
        base,
        lambda coords3: [[c_fn(coords3) * c_fn(coords3) * comp
                          for comp in row] for row in fm.h.fn(coords3)],
        name=fm.h.name + ".normalized")

    def alpha_tilde_fn(coords3):
        cv = c_fn(coords3)
        if isinstance(cv, jets.Jet):
            # jet axes must be the base axes; this form is for base-chart checks
            if cv.dim != 3:
                raise DomainError("normalized Lee form evaluates on the base chart only")
            if cv.value == 0.0:
                raise DomainError("c vanishes; normalization undefined")
            dlog = [cv.deriv(a) / cv for a in range(3)]
        else:
            dlog = [0.0, 0.0, 0.0]
        if alpha is None:
            return [-1.0 * d + 0.0 * coords3[0] for d in dlog]
        av = alpha.fn(coords3)
        return [av[a] - dlog[a] for a in range(3)]

    alpha_tilde = geo.OneFormField(base, alpha_tilde_fn, name="alpha.normalized")

    def g_fn(coords):
        w = abs_c(coords[1:])
        gv = fm.g.fn(coords)
        return [[w * comp for comp in row] for row in gv]

    def lam_fn(coords):
        return fm.dilation_sq_inv.fn(coords) / abs_c(coords[1:])

    if isinstance(c, geo.ScalarField):
        center = tuple(0.5 * (l + u) for l, u in zip(base.lo, base.hi))
        sign = 1 if c.value(center) > 0 else -1
    else:
        sign = 1 if float(c) > 0 else -1

    return FibrationMetric(
        fm.total_chart, base, h_tilde,
        geo.MetricField(fm.total_chart, g_fn, name=fm.g.name + ".normalized"),
        geo.OneFormField(fm.total_chart, fm.theta.fn, name=fm.theta.name),
        geo.ScalarField(fm.total_chart, lam_fn, name="lam_inv_sq.normalized"),
        "type4",
        {"alpha": alpha_tilde, "c": float(sign), "normalized_from": fm.family_params})


def conformal_rescale_fibration(fm, w):
    """g -> (w o phi) g for a positive basic factor w on the base chart.

    The stored normal-form data transforms as lam^-2 -> w lam^-2 and
    theta -> w theta, keeping theta(V) = 1 for the new fundamental field.
    """
    def wj(coords):
        v = w.fn(coords[1:])
        return v if isinstance(v, jets.Jet) else jets.constant(float(v), 4)

    def g_fn(coords):
        fac = wj(coords)
        if fac.value <= 0.0:
            raise DomainError("conformal factor must be positive")
        return [[fac * comp for comp in row] for row in fm.g.fn(coords)]

    return FibrationMetric(
        fm.total_chart, fm.base_chart, fm.h,
        geo.MetricField(fm.total_chart, g_fn, name=fm.g.name + ".rescaled"),
        geo.OneFormField(fm.total_chart,
                         lambda coords: [wj(coords) * t for t in fm.theta.fn(coords)],
                         name=fm.theta.name + ".rescaled"),
        geo.ScalarField(fm.total_chart,
                        lambda coords: wj(coords) * fm.dilation_sq_inv.fn(coords),
                        name=fm.dilation_sq_inv.name + ".rescaled"),
        fm.family_tag, dict(fm.family_params, rescaled=True))


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def _flat3_chart():
    return geo.Chart(("x", "y", "z"), (-2.0, -2.0, -2.0), (2.0, 2.0, 2.0))


def _spherical_chart():
    # avoids the origin and both halves of the polar string axis
    return geo.Chart(("r", "th", "ph"), (0.1, 0.2, 0.1), (5.0, 2.9, 6.1))


def _euler_chart():
    return geo.Chart(("th", "ps", "ph"), (0.3, 0.1, 0.1), (2.8, 6.0, 6.0))


def _delta3(chart):
    return geo.MetricField(
        chart, lambda c: [[(1.0 if a == b else 0.0) + 0.0 * c[0] for b in range(3)]
                          for a in range(3)], "flat3")


def flat3():
    """Euclidean metric on a Cartesian 3-chart."""
    return _delta3(_flat3_chart())


def flat3_spherical():
    """Euclidean metric in spherical coordinates (r, th, ph)."""
    ch = _spherical_chart()
    def fn(c):
        r, th, _ = c
        s = jets.sin(th)
        return [[1.0 + 0 * r, 0, 0], [0, r * r, 0], [0, 0, r * r * s * s]]
    return geo.MetricField(ch, fn, "flat3_spherical")


def constant_curvature3(k):
    """h = (1 + (k/4)|x|^2)^-2 delta, sectional curvature k."""
    k = float(k)
    if k < 0:
        lim = 2.0 / math.sqrt(-k)
        half = 0.45 * lim
        ch = geo.Chart(("x", "y", "z"), (-half,) * 3, (half,) * 3)
    else:
        ch = _flat3_chart()
    def fn(c):
        q = 1.0 + (k / 4.0) * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2])
        w = jets.powc(q, -2)
        return [[w, 0, 0], [0, w, 0], [0, 0, w]]
    return geo.MetricField(ch, fn, f"constant_curvature3({k})")


def trkalian(sign=1):
    """alpha = cos z dx +- sin z dy on flat R^3; satisfies d alpha = -+ * alpha."""
    if sign not in (1, -1):
        raise DomainError("trkalian sign must be +1 or -1")
    ch = _flat3_chart()
    return geo.OneFormField(
        ch, lambda c: [jets.cos(c[2]), float(sign) * jets.sin(c[2]), 0.0 * c[2]],
        f"trkalian({sign})")


def xdy():
    """alpha = x dy: a generic non-Beltrami control form on flat R^3."""
    ch = _flat3_chart()
    return geo.OneFormField(ch, lambda c: [0.0 * c[0], c[0], 0.0 * c[0]], "xdy")


def _euler_sigma(c):
    th, ps, _ = c
    s1 = [0.5 * jets.cos(ps), 0.0 * th, 0.5 * jets.sin(ps) * jets.sin(th)]
    s2 = [0.5 * jets.sin(ps), 0.0 * th, -0.5 * jets.cos(ps) * jets.sin(th)]
    s3 = [0.0 * th, 0.5 + 0.0 * th, 0.5 * jets.cos(th)]
    return s1, s2, s3


def euler_s3_frame():
    """Left-invariant coframe (s1, s2, s3) with d s_i = 2 s_j ^ s_k (cyclic)."""
    ch = _euler_chart()
    return tuple(geo.OneFormField(ch, lambda c, i=i: _euler_sigma(c)[i], f"sigma{i+1}")
                 for i in range(3))


def round_s3_euler():
    """Unit round metric s1^2 + s2^2 + s3^2 in the Euler chart."""
    return berger_s3(1.0)


def berger_s3(mu):
    """Squashed metric s1^2 + s2^2 + mu^2 s3^2; mu = 1 is the unit round sphere."""
    mu = float(mu)
    if mu <= 0:
        raise DomainError("berger parameter mu must be positive")
    ch = _euler_chart()
    def fn(c):
        s1, s2, s3 = _euler_sigma(c)
        return [[s1[a] * s1[b] + s2[a] * s2[b] + (mu * mu) * s3[a] * s3[b]
                 for b in range(3)] for a in range(3)]
    return geo.MetricField(ch, fn, f"berger_s3({mu})")


def berger_lee(scale):
    """alpha = scale * s3 on the Euler chart (d alpha = 2 * scale s1^s2)."""
    ch = _euler_chart()
    return geo.OneFormField(
        ch, lambda c: [float(scale) * x for x in _euler_sigma(c)[2]],
        f"berger_lee({scale})")


def berger_ew_scale(mu):
    """The scale for which (berger_s3(mu), berger_lee(scale)) is Einstein-Weyl."""
    mu = float(mu)
    if not 0 < mu <= 1:
        raise DomainError("Einstein-Weyl squashings need 0 < mu <= 1")
    return 2.0 * mu * math.sqrt(1.0 - mu * mu)


def gh_potential(m=1.0):
    """u = 1 + m/(2r) on the spherical chart; harmonic away from the centre."""
    m = float(m)
    ch = _spherical_chart()
    return geo.ScalarField(ch, lambda c: 1.0 + (m / 2.0) * jets.powc(c[0], -1),
                           f"gh_potential({m})")


def dirac_A(m=1.0, sign=1):
    """Base one-form A with dA = *du for u = 1 + m/(2r): A = (m/2)(cos th -+ 1) dph.

    The sign selects which half of the polar axis carries the string; the
    spherical chart excludes both.
    """
    m = float(m)
    if sign not in (1, -1):
        raise DomainError("dirac sign must be +1 or -1")
    ch = _spherical_chart()
    return geo.OneFormField(
        ch, lambda c: [0.0 * c[0], 0.0 * c[0], (m / 2.0) * (jets.cos(c[1]) - float(sign))],
        f"dirac_A({m},{sign})")


def dirac_theta(m=1.0, sign=1):
    """Connection form dtau + phi*(dirac_A) on the Gibbons-Hawking total chart."""
    A = dirac_A(m, sign)
    ch = _total_chart(A.chart, (-3.0, 3.0), "tau")
    return geo.OneFormField(ch, _theta_dtau_plus(A.fn), f"dirac_theta({m},{sign})")


def fibre_exp(rate=2.0):
    """e^{rate * tau} as a scalar on any total chart (depends on coordinate 0)."""
    def make(chart):
        return geo.ScalarField(chart, lambda c: jets.exp(float(rate) * c[0]),
                               f"fibre_exp({rate})")
    return make


def fibre_power(p):
    """tau^p as a scalar of the fibre coordinate (for dilations like rho^-1/2)."""
    def make(chart):
        return geo.ScalarField(chart, lambda c: jets.powc(c[0], float(p)),
                               f"fibre_power({p})")
    return make


def variable_c_background():
    """A type-4 data set with genuinely variable c on a conformally flat base.

    Gauge-transforms the flat Trkalian solution: c(x) = 1 + sin(x)/2,
    h = c^-2 delta, alpha = trkalian(-1) + d log c.  Satisfies
    d alpha - c * alpha + * dc = 0 with the chart star of h.
    """
    ch = _flat3_chart()

    def cj(c):
        return 1.0 + 0.5 * jets.sin(c[0])

    def dlog(c):
        cv = cj(c)
        return [(0.5 * jets.cos(c[0])) / cv, 0.0 * c[0], 0.0 * c[0]]

    c_field = geo.ScalarField(ch, cj, "one_plus_half_sin_x")
    h = geo.MetricField(
        ch, lambda c: [[jets.powc(cj(c), -2) * (1.0 if a == b else 0.0)
                        for b in range(3)] for a in range(3)], "cinv2_flat")
    alpha = geo.OneFormField(
        ch, lambda c: [jets.cos(c[2]) + dlog(c)[0], -1.0 * jets.sin(c[2]), 0.0 * c[2]],
        "trkalian_gauge")
    return h, alpha, c_field


# registry: name -> (factory, parameter schema, short formula text)
CATALOG = {
    "flat3": (lambda: flat3(), {}, "delta_ij on a Cartesian 3-chart"),
    "flat3_spherical": (lambda: flat3_spherical(), {},
                        "dr^2 + r^2 dth^2 + r^2 sin^2(th) dph^2"),
    "constant_curvature3": (constant_curvature3, {"k": 1.0},
                            "(1 + (k/4)|x|^2)^-2 delta; sectional curvature k"),
    "round_s3_euler": (lambda: round_s3_euler(), {},
                       "s1^2 + s2^2 + s3^2 in Euler angles"),
    "berger_s3": (berger_s3, {"mu": 0.8}, "s1^2 + s2^2 + mu^2 s3^2"),
    "euler_s3_frame": (lambda: euler_s3_frame(), {},
                       "left-invariant coframe with d s_i = 2 s_j ^ s_k"),
    "trkalian": (trkalian, {"sign": 1},
                 "cos z dx + sign sin z dy; d alpha = -sign * alpha"),
    "xdy": (lambda: xdy(), {}, "x dy (non-Beltrami control)"),
    "berger_lee": (berger_lee, {"scale": 0.96}, "scale * s3"),
    "gh_potential": (gh_potential, {"m": 1.0}, "1 + m/(2r), harmonic off the centre"),
    "dirac_A": (dirac_A, {"m": 1.0, "sign": 1}, "(m/2)(cos th - sign) dph; dA = *du"),
    "dirac_theta": (dirac_theta, {"m": 1.0, "sign": 1}, "dtau + (m/2)(cos th - sign) dph"),
}


def catalog_names():
    return sorted(CATALOG)


def catalog(name, **params):
    if name not in CATALOG:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(catalog_names())}")
    factory, schema, _ = CATALOG[name]
    unknown = set(params) - set(schema)
    if unknown:
        raise DomainError(f"catalog entry {name!r} does not take parameters {sorted(unknown)}")
    merged = dict(schema, **params)
    return factory(**merged) if merged else factory()


def catalog_describe(name):
    if name not in CATALOG:
        raise KeyError(f"unknown catalog entry {name!r}")
    _, schema, formula = CATALOG[name]
    return {"name": name, "params": schema, "formula": formula}


def catalog_validate(name, **params):
    """Run the entry's own defining check and return named residuals."""
    from . import weyl3 as w3
    obj = catalog(name, **params)
    merged = dict(CATALOG[name][1], **params)

    if name in ("flat3", "flat3_spherical"):
        pts = _probe(obj.chart)
        return {"riemann_norm": max(geo.curvature_report(obj, p).riemann_norm
                                    for p in pts)}
    if name == "constant_curvature3":
        k = merged["k"]
        pts = _probe(obj.chart)
        dev = 0.0
        for p in pts:
            K = geo.sectional_curvature(obj, p, (1.0, 0.2, -0.1), (0.3, -1.0, 0.5))
            dev = max(dev, abs(K - k))
        return {"sectional_deviation": dev}
    if name in ("round_s3_euler", "berger_s3"):
        mu = merged.get("mu", 1.0)
        expected = 8.0 - 2.0 * mu * mu
        pts = _probe(obj.chart)
        return {"scalar_deviation": max(abs(geo.curvature_report(obj, p).scalar - expected)
                                        for p in pts)}
    if name == "euler_s3_frame":
        s1, s2, s3 = obj
        dev = 0.0
        for p in _probe(s1.chart):
            vals = [f.values(p) for f in (s1, s2, s3)]
            for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
                d = geo.exterior_derivative((s1, s2, s3)[i], p)
                target = 2.0 * (np.outer(vals[j], vals[k]) - np.outer(vals[k], vals[j]))
                dev = max(dev, float(np.max(np.abs(d - target))))
        return {"structure_equation_deviation": dev}
    if name == "trkalian":
        sign = merged["sign"]
        w = w3.WeylStructure3(flat3(), obj)
        pts = _probe(obj.chart)
        return {"beltrami_residual": max(w3.beltrami_residual(w, -sign, p) for p in pts)}
    if name == "xdy":
        w = w3.WeylStructure3(flat3(), obj)
        p = (0.4, 0.2, -0.3)
        return {"min_beltrami_residual": min(w3.beltrami_residual(w, s, p) for s in (1, -1))}
    if name == "berger_lee":
        scale = merged["scale"]
        dev = 0.0
        for p in _probe(obj.chart):
            d = geo.exterior_derivative(obj, p)
            s1, s2, _ = _euler_sigma([float(x) for x in p])
            v1 = np.array([x.value if isinstance(x, jets.Jet) else x for x in s1])
            v2 = np.array([x.value if isinstance(x, jets.Jet) else x for x in s2])
            target = 2.0 * scale * (np.outer(v1, v2) - np.outer(v2, v1))
            dev = max(dev, float(np.max(np.abs(d - target))))
        return {"curl_deviation": dev}
    if name == "gh_potential":
        h = flat3_spherical()
        dev = 0.0
        for p in _probe(obj.chart):
            uj = obj.jet(p)
            hv = h.values(p)
            hinv = np.linalg.inv(hv)
            hj = h.jets(p)
            dh = np.array([[[hj[a][b].grad[c] for c in range(3)] for b in range(3)]
                           for a in range(3)])
            dhinv = -np.einsum("ae,efc,fb->abc", hinv, dh, hinv)
            det = np.linalg.det(hv)
            ddet = det * np.einsum("ab,abc->c", hinv, dh)
            lap = 0.0
            for a in range(3):
                for b in range(3):
                    lap += hinv[a, b] * uj.hess[a, b]
                    lap += dhinv[a, b, a] * uj.grad[b]
                    lap += 0.5 * hinv[a, b] * (ddet[a] / det) * uj.grad[b]
            dev = max(dev, abs(lap))
        return {"laplacian": dev}
    if name in ("dirac_A", "dirac_theta"):
        m = merged["m"]
        sign = merged["sign"]
        A = dirac_A(m, sign)
        u = gh_potential(m)
        h = flat3_spherical()
        dev = 0.0
        for p in _probe(A.chart):
            dA = geo.exterior_derivative(A, p)
            star_du = geo.hodge_star(u.jet(p).grad, h.values(p), 1)
            dev = max(dev, float(np.max(np.abs(dA - star_du))))
        return {"monopole_deviation": dev}
    return {}


def _probe(chart, n=3):
    rng = np.random.default_rng(0)
    lo = np.asarray(chart.lo)
    hi = np.asarray(chart.hi)
    margin = 0.15 * (hi - lo)
    return [tuple(rng.uniform(lo + margin, hi - margin)) for _ in range(n)]
