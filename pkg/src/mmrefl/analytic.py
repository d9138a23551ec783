"""Numerical evaluation of the analytic coverage model.

Distance laws for the shortest visible direct path and the first-order
reflected path (through the nearest visible reflector, arc approximation),
association probabilities, and SINR coverage with the interference Laplace
functional. Defective masses at infinity (no visible path) are carried
explicitly throughout.

All thresholds are linear here; dB conversion happens at the CLI boundary.
All expectations treat the direct and reflected path lengths as independent.
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import (DEFAULT_SPEC, QuadratureError, QuadratureSpec,
                         integrate, integrate_semi_infinite, leggauss_01)
from .sampling import NetworkParams, derive_beta

TWO_PI = 2.0 * math.pi

# Density multiplier for the candidate-transmitter field in the mirror cone,
# used by the unconditional reflected law and everything built on it. The
# default 2.0 overlays the source and image point fields (what the reference
# curves this tool validates against were computed with); 1.0 is the strict
# one-sided specular model, which is also what the Monte Carlo engine's exact
# geometry realizes. The conditional-law operations themselves take an
# explicit intensity and stay single-sided.
CONE_DENSITY_SCALE = 2.0


# ---------------------------------------------------------------------------
# Elementary pieces
# ---------------------------------------------------------------------------

def prob_link_visible(r, beta):
    """P(a link of length r crosses no object) = exp(-beta*r)."""
    return np.exp(-np.asarray(beta, dtype=float) * np.asarray(r, dtype=float))


def _one_minus_emt(t):
    """1 - e^{-t}(1+t), series-guarded near t=0."""
    t = np.asarray(t, dtype=float)
    small = t < 1e-2
    ts = np.where(small, t, 1.0)
    series = ts * ts * (0.5 - ts / 3.0 + ts * ts / 8.0 - ts ** 3 / 30.0)
    direct = -np.expm1(-t) - t * np.exp(-t)
    return np.where(small, series, direct)


def s_factor(x, beta):
    """Blocked-area shape factor S(x) in (0, 1]; S -> 1 as beta*x -> 0."""
    x = np.asarray(x, dtype=float)
    t = beta * x
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 2.0 * _one_minus_emt(t) / (t * t)
    return np.where(t < 1e-8, 1.0 - 2.0 * t / 3.0, val)


def _g_exponent(r, lam, beta):
    """Exponent of the direct-law CCDF: lam*pi*r^2*S(r) + ... = (2 pi lam / beta^2) * (1 - e^{-br}(1+br))."""
    r = np.asarray(r, dtype=float)
    if beta == 0.0:
        return lam * math.pi * r * r
    return (TWO_PI * lam / (beta * beta)) * _one_minus_emt(beta * r)


def ccdf_direct_distance(r, lambda_bs, beta):
    """P(distance to nearest visible BS > r); tends to the atom as r -> inf."""
    return np.exp(-_g_exponent(r, lambda_bs, beta))


def pdf_direct_distance(r_d, lambda_bs, beta):
    """Density of the nearest visible BS distance (defective for beta > 0)."""
    r = np.asarray(r_d, dtype=float)
    return TWO_PI * lambda_bs * r * np.exp(-beta * r) * ccdf_direct_distance(r, lambda_bs, beta)


def prob_no_direct(lambda_bs, beta):
    """Mass at infinity of the direct law: exp(-2 pi lam / beta^2)."""
    if beta <= 0.0:
        return 0.0
    return math.exp(-TWO_PI * lambda_bs / (beta * beta))


def pdf_nearest_reflector(d, lambda_reflector, beta):
    """Density of the distance to the nearest visible reflector center."""
    return pdf_direct_distance(d, lambda_reflector, beta)


def ccdf_nearest_reflector(d, lambda_reflector, beta):
    return ccdf_direct_distance(d, lambda_reflector, beta)


def prob_no_reflector(lambda_reflector, beta):
    if lambda_reflector <= 0.0:
        return 1.0
    return prob_no_direct(lambda_reflector, beta)


def theta_d(l, d):
    """Half-angle subtended at the user by a perpendicular reflector."""
    return np.arctan(np.asarray(l, dtype=float) / (2.0 * np.asarray(d, dtype=float)))


def _phi_primitive(r, beta):
    """phi(r) = e^{-br}(r/b + 1/b^2); primitive of r*e^{-br} up to sign (beta > 0)."""
    return np.exp(-beta * r) * (r / beta + 1.0 / (beta * beta))


def K_and_Kprime(r_r, d, beta):
    """Area-rate kernel K of the arc-approximated reflected law and K' = 2 r e^{-br}.

    K(d) = 0; beta = 0 reduces to the annulus form K = r^2 - d^2, K' = 2r.
    """
    r = np.asarray(r_r, dtype=float)
    d = np.asarray(d, dtype=float)
    if beta == 0.0:
        return r * r - d * d, 2.0 * r
    K = 2.0 * (_phi_primitive(d, beta) - _phi_primitive(r, beta))
    return K, 2.0 * r * np.exp(-beta * r)


def k_infinity(d, beta):
    """Limit of K(r) as r -> inf (finite for beta > 0)."""
    if beta == 0.0:
        return np.full_like(np.asarray(d, dtype=float), np.inf)
    return 2.0 * _phi_primitive(np.asarray(d, dtype=float), beta)


# ---------------------------------------------------------------------------
# Conditional reflected-path law given nearest-reflector distance d
# ---------------------------------------------------------------------------

def ccdf_reflected_given_d_exact(r_r: float, d: float, l: float, lambda_bs: float,
                                 beta: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Exact region integral of the conditional CCDF (perpendicular reflector).

    Polar form over the mirrored cone: azimuth in [-theta_d, theta_d], radial
    lower limit d/cos(phi) (the chord), upper limit r_r.
    """
    if r_r <= d:
        return 1.0
    td = float(theta_d(l, d))
    phi_cap = math.acos(min(1.0, d / r_r))
    phi_max = min(td, phi_cap)
    if phi_max <= 0.0:
        return 1.0

    if beta == 0.0:
        def radial(lo):
            return 0.5 * (r_r * r_r - lo * lo)
    else:
        phi_rr = _phi_primitive(r_r, beta)

        def radial(lo):
            return _phi_primitive(lo, beta) - phi_rr

    def integrand(phi):
        lo = d / math.cos(phi)
        if lo >= r_r:
            return 0.0
        return radial(lo)

    region = 2.0 * integrate(integrand, 0.0, phi_max, spec)
    return math.exp(-lambda_bs * region)


def ccdf_reflected_given_d_approx(r_r, d, l, lambda_bs, beta):
    """Arc-approximated conditional CCDF exp(-lam * theta_d * K(r_r))."""
    r = np.asarray(r_r, dtype=float)
    K, _ = K_and_Kprime(np.maximum(r, d), d, beta)
    return np.exp(-lambda_bs * theta_d(l, d) * K)


def _length_nodes(L1, L2, n):
    """Nodes/normalized weights for the expectation over l ~ U(L1, L2)."""
    if L1 == L2:
        return np.array([L1]), np.array([1.0])
    x, w = leggauss_01(n)
    return L1 + (L2 - L1) * x, w


def pdf_reflected_given_d_approx(r_r, d, L1, L2, lambda_bs, beta,
                                 spec: QuadratureSpec = DEFAULT_SPEC):
    """Conditional density E_l[lam*theta_d*K'(r) * exp(-lam*theta_d*K(r))]."""
    r = np.asarray(r_r, dtype=float)
    ls, wl = _length_nodes(L1, L2, spec.length_nodes)
    td = theta_d(ls, d)                              # (nl,)
    K, Kp = K_and_Kprime(r[..., None], d, beta)       # (..., 1) broadcast over l? K is l-free
    rate = lambda_bs * td                             # (nl,)
    dens = rate * Kp * np.exp(-rate * K)              # (..., nl)
    out = np.sum(dens * wl, axis=-1)
    return np.where(r < d, 0.0, out)


def prob_no_reflection_given_d(d, L1, L2, lambda_bs, beta,
                               spec: QuadratureSpec = DEFAULT_SPEC):
    """Conditional mass at infinity: E_l[exp(-lam*theta_d*K(inf))]."""
    d = np.asarray(d, dtype=float)
    if beta == 0.0:
        return np.zeros_like(d) if lambda_bs > 0 else np.ones_like(d)
    ls, wl = _length_nodes(L1, L2, spec.length_nodes)
    td = theta_d(ls, d[..., None])                     # (..., nl)
    kinf = k_infinity(d, beta)[..., None]
    return np.sum(np.exp(-lambda_bs * td * kinf) * wl, axis=-1)


# ---------------------------------------------------------------------------
# Quantile machinery for the closed-form CCDFs
# ---------------------------------------------------------------------------

def _solve_y_minus_log1p(t):
    """Solve y - log(1+y) = t for y >= 0 (vectorized Newton, monotone from above)."""
    t = np.asarray(t, dtype=float)
    y = np.sqrt(2.0 * t) + t  # >= root; f convex so Newton descends monotonically
    for _ in range(60):
        f = y - np.log1p(y) - t
        step = f * (1.0 + y) / np.maximum(y, 1e-300)
        y_new = np.maximum(y - step, 0.0)
        if np.all(np.abs(y_new - y) <= 1e-14 * (1.0 + y_new)):
            y = y_new
            break
        y = y_new
    return y


def _quantile_visible_law(u, lam, beta):
    """Inverse CDF of the nearest-visible-point law (direct or reflector)."""
    u = np.asarray(u, dtype=float)
    if beta == 0.0:
        return np.sqrt(-np.log1p(-u) / (math.pi * lam))
    # e^{-y}(1+y) = 1 + log(1-u) * beta^2 / (2 pi lam), y = beta * r
    c = 1.0 + np.log1p(-u) * beta * beta / (TWO_PI * lam)
    c = np.clip(c, 1e-300, 1.0)
    y = _solve_y_minus_log1p(-np.log(c))
    return y / beta


def _k_inverse(k, d, beta):
    """Solve K(r; d) = k for r >= d."""
    k = np.asarray(k, dtype=float)
    if beta == 0.0:
        return np.sqrt(d * d + k)
    # phi(r) = phi(d) - k/2, then e^{-y}(1+y) = c*beta^2 with y = beta*r
    c = _phi_primitive(np.asarray(d, dtype=float), beta) - 0.5 * k
    c = np.clip(c * beta * beta, 1e-300, 1.0)
    y = _solve_y_minus_log1p(-np.log(c))
    return y / beta


# ---------------------------------------------------------------------------
# Unconditional reflected law
# ---------------------------------------------------------------------------

def pdf_reflected(r_r, params: NetworkParams,
                  spec: QuadratureSpec = DEFAULT_SPEC,
                  cone_density_scale: float = CONE_DENSITY_SCALE):
    """Unconditional reflected-path density: f(r) = E_d[f(r | d)], d < r."""
    r = np.atleast_1d(np.asarray(r_r, dtype=float))
    lam_r = params.lambda_reflector
    beta = derive_beta(params)
    if lam_r <= 0.0:
        out = np.zeros_like(r)
        return out if np.ndim(r_r) else float(out[0])

    v_cap = 1.0 - prob_no_reflector(lam_r, beta)
    vstar = np.minimum(1.0 - ccdf_nearest_reflector(r, lam_r, beta), v_cap)  # (nr,)
    xs, ws = leggauss_01(spec.grid_nodes)
    v = vstar[:, None] * xs[None, :]                   # (nr, nv)
    d = _quantile_visible_law(v, lam_r, beta)          # (nr, nv)

    ls, wl = _length_nodes(params.L1, params.L2, spec.length_nodes)
    td = theta_d(ls[None, None, :], d[..., None])      # (nr, nv, nl)
    K, Kp = K_and_Kprime(r[:, None], d, beta)          # (nr, nv)
    rate = cone_density_scale * params.lambda_bs * td
    dens_l = rate * Kp[..., None] * np.exp(-rate * K[..., None])
    dens = np.sum(dens_l * wl, axis=-1)                # (nr, nv)
    out = vstar * np.sum(dens * ws, axis=-1)
    return out if np.ndim(r_r) else float(out[0])


def atom_reflected_inf(params: NetworkParams,
                       spec: QuadratureSpec = DEFAULT_SPEC,
                       cone_density_scale: float = CONE_DENSITY_SCALE) -> float:
    """Total mass at infinity of the reflected law (no reflector, or none reachable)."""
    lam_r = params.lambda_reflector
    beta = derive_beta(params)
    if lam_r <= 0.0:
        return 1.0
    atom_d = prob_no_reflector(lam_r, beta)
    v_cap = 1.0 - atom_d
    xs, ws = leggauss_01(spec.grid_nodes)
    d = _quantile_visible_law(v_cap * xs, lam_r, beta)
    mass = v_cap * np.sum(prob_no_reflection_given_d(
        d, params.L1, params.L2, cone_density_scale * params.lambda_bs,
        beta, spec) * ws)
    return float(atom_d + mass)


def ccdf_reflected(r_r, params: NetworkParams,
                   spec: QuadratureSpec = DEFAULT_SPEC,
                   cone_density_scale: float = CONE_DENSITY_SCALE):
    """P(shortest reflected path > r), including all mass at infinity."""
    r = np.atleast_1d(np.asarray(r_r, dtype=float))
    lam_r = params.lambda_reflector
    beta = derive_beta(params)
    if lam_r <= 0.0:
        out = np.ones_like(r)
        return out if np.ndim(r_r) else float(out[0])

    lam_cone = cone_density_scale * params.lambda_bs
    atom_d = prob_no_reflector(lam_r, beta)
    v_cap = 1.0 - atom_d
    xs, ws = leggauss_01(spec.grid_nodes)
    ls, wl = _length_nodes(params.L1, params.L2, spec.length_nodes)

    # split the d-axis at d = r: beyond it the conditional CCDF is 1
    vstar = np.minimum(1.0 - ccdf_nearest_reflector(r, lam_r, beta), v_cap)
    v = vstar[:, None] * xs[None, :]
    d = _quantile_visible_law(v, lam_r, beta)
    td = theta_d(ls[None, None, :], d[..., None])
    K, _ = K_and_Kprime(np.maximum(r[:, None], d), d, beta)
    cc = np.sum(np.exp(-lam_cone * td * K[..., None]) * wl, axis=-1)
    below = vstar * np.sum(cc * ws, axis=-1)
    out = atom_d + (v_cap - vstar) + below
    return out if np.ndim(r_r) else float(out[0])


def mean_direct_distance(params: NetworkParams,
                         spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """E[direct distance | finite], via the closed-form CCDF."""
    lam, beta = params.lambda_bs, derive_beta(params)
    atom = prob_no_direct(lam, beta)
    scale = 1.0 / (2.0 * math.sqrt(lam))
    val = integrate_semi_infinite(
        lambda r: ccdf_direct_distance(r, lam, beta) - atom, 0.0, spec,
        scale=4.0 * scale + 4.0 / (beta + 1.0 / scale))
    return val / (1.0 - atom)


def mean_reflected_distance(params: NetworkParams,
                            spec: QuadratureSpec = DEFAULT_SPEC,
                            cone_density_scale: float = CONE_DENSITY_SCALE) -> float:
    """E[shortest reflected path | finite], via the unconditional CCDF."""
    lam_r = params.lambda_reflector
    if lam_r <= 0.0:
        return math.inf
    beta = derive_beta(params)
    atom = atom_reflected_inf(params, spec, cone_density_scale)
    if atom >= 1.0 - 1e-12:
        return math.inf
    scale = 1.0 / (2.0 * math.sqrt(lam_r)) + 1.0 / (beta + 2.0 * math.sqrt(params.lambda_bs))
    val = integrate_semi_infinite(
        lambda r: float(ccdf_reflected(r, params, spec, cone_density_scale)) - atom,
        0.0, spec, scale=4.0 * scale)
    return val / (1.0 - atom)


# ---------------------------------------------------------------------------
# Association probabilities
# ---------------------------------------------------------------------------

def association_probabilities(params: NetworkParams,
                              spec: QuadratureSpec = DEFAULT_SPEC,
                              cone_density_scale: float = CONE_DENSITY_SCALE):
    """(p_d, p_r): probability the serving path is direct resp. reflected.

    p_d counts {r_d < inf, r_r = inf}; p_r counts {r_r < inf, r_d = inf};
    the deficit 1 - p_d - p_r is the probability both are infinite.
    """
    lam, beta = params.lambda_bs, derive_beta(params)
    lam_r = params.lambda_reflector
    atom_rd = prob_no_direct(lam, beta)
    u_cap = 1.0 - atom_rd

    if lam_r <= 0.0:
        return u_cap, 0.0

    lam_cone = cone_density_scale * lam
    xs, ws = leggauss_01(spec.grid_nodes)
    ls, wl = _length_nodes(params.L1, params.L2, spec.length_nodes)
    atom_d = prob_no_reflector(lam_r, beta)
    v_cap = 1.0 - atom_d

    # p_d = int_0^{u_cap} P(R_r > r_d(u)) du
    u = u_cap * xs
    rd = _quantile_visible_law(u, lam, beta)                    # (nu,)
    p_rr_gt = ccdf_reflected(rd, params, spec, cone_density_scale)
    p_d = u_cap * float(np.sum(p_rr_gt * ws))

    # p_r = int_0^{v_cap} E_l[ G(d) - C_l(inf) * atom_rd
    #       - int_{F(d)}^{u_cap} C_l(r_d(u)) du ] dv
    v = v_cap * xs
    d = _quantile_visible_law(v, lam_r, beta)                   # (nv,)
    td = theta_d(ls[None, :], d[:, None])                       # (nv, nl)
    kinf = k_infinity(d, beta)[:, None]
    c_inf = np.exp(-lam_cone * td * kinf)                       # (nv, nl)
    g_d = ccdf_direct_distance(d, lam, beta)                    # (nv,)

    f_d = 1.0 - g_d                                             # CDF_Rd(d)
    lo = np.minimum(f_d, u_cap)
    width = u_cap - lo                                          # (nv,)
    uu = lo[:, None] + width[:, None] * xs[None, :]             # (nv, nu)
    r_u = _quantile_visible_law(uu, lam, beta)                  # (nv, nu)
    K_u, _ = K_and_Kprime(np.maximum(r_u[:, :, None], d[:, None, None]),
                          d[:, None, None], beta)               # (nv, nu, 1)
    c_u = np.exp(-lam_cone * td[:, None, :] * K_u)              # (nv, nu, nl)
    inner_int = width[:, None] * np.einsum("vul,u->vl", c_u, ws)
    integrand = g_d[:, None] - c_inf * atom_rd - inner_int      # (nv, nl)
    p_r = v_cap * float(np.einsum("vl,v,l->", integrand, ws, wl))

    return p_d, max(p_r, 0.0)


# ---------------------------------------------------------------------------
# Interference Laplace factor and coverage
# ---------------------------------------------------------------------------

def _laplace_exponent_integral(b, T, alpha, n):
    """J(b) = int_1^inf (T u / (u^alpha + T)) e^{-b u} du, vectorized over b."""
    b = np.asarray(b, dtype=float)
    xs, ws = leggauss_01(n)
    s = max(1.0, T ** (1.0 / alpha))
    u = 1.0 + s * xs / (1.0 - xs)                 # (n,)
    jac = s / (1.0 - xs) ** 2
    f = T * u / (u ** alpha + T)                  # (n,)
    return np.einsum("...n,n->...", np.exp(-b[..., None] * u) * (f * jac), ws)


def laplace_direct_interference(r_d, T, lambda_bs, beta, alpha,
                                spec: QuadratureSpec = DEFAULT_SPEC):
    """PGFL factor of the visible-interferer field beyond the serving distance.

    exp(-2 pi lam int_{r}^{inf} (T r^a x^{-a} e^{-b x} / (1 + T r^a x^{-a})) x dx).
    """
    r = np.asarray(r_d, dtype=float)
    if T <= 0.0:
        return np.ones_like(r) if r.ndim else 1.0
    J = _laplace_exponent_integral(beta * r, T, alpha, spec.laplace_nodes)
    out = np.exp(-TWO_PI * lambda_bs * r * r * J)
    return out if r.ndim else float(out)


def coverage_baseline_alpha4(T: float) -> float:
    """Closed-form SIR coverage with no objects, alpha=4, sigma2=0."""
    if T <= 0.0:
        return 1.0
    rt = math.sqrt(T)
    return 1.0 / (1.0 + rt * (math.pi / 2.0 - math.atan(1.0 / rt)))


def _coverage_direct_only(T, params, spec) -> float:
    """P_D when there are no reflectors: single quantile-domain integral."""
    lam, beta = params.lambda_bs, derive_beta(params)
    alpha, n0 = params.alpha, params.noise_over_ptx
    u_cap = 1.0 - prob_no_direct(lam, beta)

    def integrand(u):
        r = float(_quantile_visible_law(u, lam, beta))
        L = float(laplace_direct_interference(r, T, lam, beta, alpha, spec))
        return L * math.exp(-n0 * T * r ** alpha)

    return integrate(integrand, 0.0, u_cap, spec)


def _reflected_tail_weight(x, d, td, w_inf, lam_bs, beta, T, alpha, nw):
    """E over the conditional reflected law beyond max(x, d) of the Theorem-1
    reflected-interferer factor, plus the conditional no-reflection mass.

    x: scalar serving direct distance. d, td, w_inf: (nv, nl) arrays.
    """
    K_low, _ = K_and_Kprime(np.maximum(x, d), d, beta)           # (nv, nl)
    w_low = -np.expm1(-lam_bs * td * K_low)                      # CDF at the lower limit
    xs, ws = leggauss_01(nw)
    w = w_low[..., None] + (w_inf - w_low)[..., None] * xs       # (nv, nl, nw)
    k = -np.log1p(-w) / (lam_bs * td[..., None])
    r = _k_inverse(k, d[..., None], beta)                        # (nv, nl, nw)
    A = T * x ** alpha
    M = 1.0 - A * np.exp(-beta * r) / (r ** alpha + A)
    tail = (w_inf - w_low) * np.einsum("vln,n->vl", M, ws)
    return tail + (1.0 - w_inf)


def coverage_pair(T: float, params: NetworkParams,
                  spec: QuadratureSpec = DEFAULT_SPEC,
                  cone_density_scale: float = CONE_DENSITY_SCALE):
    """(P_D, P_R) at linear threshold T."""
    if T <= 0.0:
        p_d, p_r = association_probabilities(params, spec, cone_density_scale)
        return p_d, p_r

    lam, beta = params.lambda_bs, derive_beta(params)
    lam_r = params.lambda_reflector
    alpha, n0 = params.alpha, params.noise_over_ptx

    if lam_r <= 0.0:
        return _coverage_direct_only(T, params, spec), 0.0

    lam_cone = cone_density_scale * lam
    xs, ws = leggauss_01(spec.grid_nodes)
    ls, wl = _length_nodes(params.L1, params.L2, spec.length_nodes)
    atom_rd = prob_no_direct(lam, beta)
    u_cap = 1.0 - atom_rd
    atom_d = prob_no_reflector(lam_r, beta)
    v_cap = 1.0 - atom_d

    # --- P_D ------------------------------------------------------------
    u = u_cap * xs
    rd = _quantile_visible_law(u, lam, beta)                         # (nu,)
    L_rd = laplace_direct_interference(rd, T, lam, beta, alpha, spec)
    noise = np.exp(-n0 * T * rd ** alpha)

    inner = np.empty_like(rd)
    for i, x in enumerate(rd):
        # split the reflector-distance axis at d = x (kink of max(x, d))
        vstar = min(1.0 - float(ccdf_nearest_reflector(x, lam_r, beta)), v_cap)
        pieces = 0.0
        for lo_v, wid in ((0.0, vstar), (vstar, v_cap - vstar)):
            if wid <= 0.0:
                continue
            v = lo_v + wid * xs
            d = _quantile_visible_law(v, lam_r, beta)                # (nv,)
            td = theta_d(ls[None, :], d[:, None])                    # (nv, nl)
            w_inf = -np.expm1(-lam_cone * td * k_infinity(d, beta)[:, None])
            tail = _reflected_tail_weight(float(x), d[:, None], td, w_inf,
                                          lam_cone, beta, T, alpha,
                                          spec.tail_nodes)
            pieces += wid * float(np.einsum("vl,v,l->", tail, ws, wl))
        inner[i] = atom_d + pieces

    p_direct = u_cap * float(np.sum(L_rd * noise * inner * ws))

    # --- P_R ------------------------------------------------------------
    v = v_cap * xs
    d = _quantile_visible_law(v, lam_r, beta)                        # (nv,)
    td = theta_d(ls[None, :], d[:, None])                            # (nv, nl)
    w_inf = -np.expm1(-lam_cone * td * k_infinity(d, beta)[:, None])
    xw, ww = leggauss_01(spec.tail_nodes)
    w = w_inf[..., None] * xw                                        # (nv, nl, nw)
    k = -np.log1p(-w) / (lam_cone * td[..., None])
    r = _k_inverse(k, d[:, None, None], beta)                        # (nv, nl, nw)
    G = ccdf_direct_distance(r, lam, beta)
    L_rr = laplace_direct_interference(r, T, lam, beta, alpha, spec)
    noise_r = np.exp(-n0 * T * r ** alpha)
    body = w_inf * np.einsum("vln,n->vl", G * L_rr * noise_r, ww)
    p_reflected = v_cap * float(np.einsum("vl,v,l->", body, ws, wl))

    return p_direct, p_reflected


def coverage_direct(T: float, params: NetworkParams,
                    spec: QuadratureSpec = DEFAULT_SPEC,
                    cone_density_scale: float = CONE_DENSITY_SCALE) -> float:
    """P_D(T): coverage through the direct path."""
    return coverage_pair(T, params, spec, cone_density_scale)[0]


def coverage_reflected(T: float, params: NetworkParams,
                       spec: QuadratureSpec = DEFAULT_SPEC,
                       cone_density_scale: float = CONE_DENSITY_SCALE) -> float:
    """P_R(T): coverage through the reflected path."""
    return coverage_pair(T, params, spec, cone_density_scale)[1]


def coverage_total(T: float, params: NetworkParams,
                   spec: QuadratureSpec = DEFAULT_SPEC,
                   cone_density_scale: float = CONE_DENSITY_SCALE) -> float:
    """P_C(T) = P_D(T) + P_R(T)."""
    pd, pr = coverage_pair(T, params, spec, cone_density_scale)
    return pd + pr
