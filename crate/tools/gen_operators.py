#!/usr/bin/env python3
"""Generate the first-derivative operator coefficient files in crates/core/data/.

Interior stencils are computed exactly (sympy rationals). Boundary closures of
the central part are found by solving the linear accuracy/SBP constraints for
the skew block and the norm weights; leftover free parameters are fixed by a
small least-squares problem on the leading boundary truncation error. The
dissipative part is R = -eps * Dm^T Dm with the undivided m-th difference Dm,
which is symmetric negative semi-definite by construction and annihilates
polynomials below degree m.

The Rust loader re-validates every invariant, so this script only needs to be
run when the data files are regenerated:

    python3 tools/gen_operators.py crates/core/data
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import sympy as sp
from scipy.optimize import minimize


# --------------------------------------------------------------------------
# interior stencils

def max_order_stencil(a, b):
    """Unique stencil on offsets [-a, b] that differentiates degree <= a+b exactly."""
    ks = list(range(-a, b + 1))
    n = len(ks)
    m = sp.Matrix(n, n, lambda r, c: sp.Integer(ks[c]) ** r)
    rhs = sp.Matrix([1 if r == 1 else 0 for r in range(n)])
    d = m.LUsolve(rhs)
    return {k: sp.nsimplify(d[i]) for i, k in enumerate(ks)}


def central_stencil(order):
    half = order // 2
    return max_order_stencil(half, half)


def split(d):
    """Split a stencil into antisymmetric (central) and symmetric parts."""
    w = max(abs(k) for k in d)
    c = {k: (d.get(k, 0) - d.get(-k, 0)) / 2 for k in range(1, w + 1)}
    s = {k: (d.get(k, 0) + d.get(-k, 0)) / 2 for k in range(0, w + 1)}
    return c, s


def diff_weights(m):
    """Undivided m-th difference stencil (-1)^(m-j) C(m, j), j = 0..m."""
    return [sp.Integer((-1) ** (m - j) * sp.binomial(m, j)) for j in range(m + 1)]


def dissipation_scale(s):
    """For symmetric part s of half-width m, return (m, eps) with s = -eps*(Dm^T Dm) row."""
    m = max(k for k in s if s[k] != 0)
    dw = diff_weights(m)
    # (Dm^T Dm) interior row at offset k = sum_j dw[j] dw[j+k]
    row = {k: sum(dw[j] * dw[j + k] for j in range(m + 1 - k)) for k in range(0, m + 1)}
    eps = -s[m] / row[m]
    for k in range(m + 1):
        assert sp.simplify(s.get(k, 0) + eps * row[k]) == 0, "symmetric part is not a pure difference"
    assert eps > 0
    return m, eps


def drp_central(order, half_width, theta_max):
    """Central stencil of the given order and half width, free coefficients chosen to
    minimise the L2 dispersion error of its symbol on (0, theta_max)."""
    ks = list(range(1, half_width + 1))
    n_eq = order // 2
    # constraints: sum_k 2 c_k k^(2r-1) = [r == 1], r = 1..n_eq
    a = np.array([[2.0 * k ** (2 * r - 1) for k in ks] for r in range(1, n_eq + 1)])
    rhs = np.array([1.0 if r == 1 else 0.0 for r in range(1, n_eq + 1)])
    part = np.linalg.lstsq(a, rhs, rcond=None)[0]
    null = null_space(a)
    th = np.linspace(0.0, theta_max, 4001)
    basis = np.array([2.0 * np.sin(k * th) for k in ks]).T

    def cost(z):
        c = part + null @ z
        err = basis @ c - th
        return np.trapezoid(err ** 2, th)

    z0 = np.zeros(null.shape[1])
    res = minimize(cost, z0, method="BFGS", options={"gtol": 1e-14})
    c = part + null @ res.x
    return {k: float(c[i]) for i, k in enumerate(ks)}


def null_space(a, tol=1e-11):
    u, s, vt = np.linalg.svd(a)
    rank = int((s > tol * s[0]).sum())
    return vt[rank:].T


# --------------------------------------------------------------------------
# boundary closure of the central part: Q = Qc + B/2 with Qc skew

def closure(c, gamma, nb, extra_order=2, pmin=0.15, fixed_z=None):
    """c: dict k -> c_k (k = 1..w) floats. Returns (p[nb], Q block nb x (nb+w))."""
    w = max(c)
    ncol = nb + w
    pairs = [(i, j) for i in range(nb) for j in range(i + 1, nb)]
    nunk = len(pairs) + nb
    x = np.arange(ncol, dtype=float)

    def row_system(degrees):
        rows, rhs = [], []
        for i in range(nb):
            for r in degrees:
                coef = np.zeros(nunk)
                const = 0.0
                xr = x ** r if r > 0 else np.ones(ncol)
                for idx, (a, b) in enumerate(pairs):
                    if a == i:
                        coef[idx] += xr[b]
                    if b == i:
                        coef[idx] -= xr[a]
                if i == 0:
                    const += -0.5 * xr[0]
                for j in range(nb, ncol):
                    k = j - i
                    if 1 <= k <= w:
                        const += c[k] * xr[j]
                # - r p_i x_i^(r-1)
                if r > 0:
                    coef[len(pairs) + i] -= r * (x[i] ** (r - 1) if r > 1 else 1.0)
                rows.append(coef)
                rhs.append(-const)
        return np.array(rows), np.array(rhs)

    a, rhs = row_system(range(gamma + 1))
    sol = np.linalg.lstsq(a, rhs, rcond=None)[0]
    resid = np.abs(a @ sol - rhs).max()
    if resid > 1e-10:
        return None
    null = null_space(a)
    at, bt = row_system(range(gamma + 1, gamma + 1 + extra_order))

    def unpack(v):
        q = np.zeros((nb, ncol))
        for idx, (i, j) in enumerate(pairs):
            q[i, j] = v[idx]
            q[j, i] = -v[idx]
        q[0, 0] = -0.5
        for i in range(nb):
            for j in range(nb, ncol):
                k = j - i
                if 1 <= k <= w:
                    q[i, j] = c[k]
        return v[len(pairs):].copy(), q

    if fixed_z is not None:
        return unpack(sol + null @ np.asarray(fixed_z, dtype=float))
    if null.shape[1] == 0:
        p, q = unpack(sol)
        return (p, q) if p.min() > 0 else None

    def cost(z):
        v = sol + null @ z
        p = v[len(pairs):]
        t = at @ v - bt
        # weight truncation errors by 1/p (they enter D = P^{-1} Q)
        pw = np.repeat(p, extra_order)
        return float(np.sum((t / np.maximum(pw, 1e-3)) ** 2)) + 1e-6 * float(np.sum(v ** 2))

    cons = [{"type": "ineq", "fun": (lambda z, i=i: (sol + null @ z)[len(pairs) + i] - pmin)}
            for i in range(nb)]
    best = None
    rng = np.random.default_rng(1)
    for trial in range(40):
        z0 = rng.normal(scale=0.5, size=null.shape[1]) if trial else np.zeros(null.shape[1])
        res = minimize(cost, z0, method="SLSQP", constraints=cons,
                       options={"ftol": 1e-16, "maxiter": 2000})
        v = sol + null @ res.x
        if v[len(pairs):].min() <= 0:
            continue
        if best is None or res.fun < best[0]:
            best = (res.fun, v)
    if best is None:
        return None
    return unpack(best[1])


# --------------------------------------------------------------------------
# assembly and checks (dense, for validation only)

def dense_pair(spec, n):
    """Assemble dense D+, D-, P on n+1 points with dx = 1."""
    npts = n + 1
    p = np.ones(npts)
    nb = len(spec["p"])
    p[:nb] = spec["p"]
    p[npts - nb:] = spec["p"][::-1]
    dp = np.zeros((npts, npts))
    dm = np.zeros((npts, npts))
    off = spec["offset"]
    st = spec["stencil"]
    stm = [-v for v in st[::-1]]
    offm = -(off + len(st) - 1)
    for i in range(npts):
        for k, v in enumerate(st):
            j = i + off + k
            if 0 <= j < npts:
                dp[i, j] = v
        for k, v in enumerate(stm):
            j = i + offm + k
            if 0 <= j < npts:
                dm[i, j] = v
    bp, bm = spec["bplus"], spec["bminus"]
    for i, row in enumerate(bp):
        dp[i, :] = 0
        dp[i, :len(row)] = row
        dp[npts - 1 - i, :] = 0
        dp[npts - 1 - i, npts - len(bm[i]):] = -np.array(bm[i])[::-1]
    for i, row in enumerate(bm):
        dm[i, :] = 0
        dm[i, :len(row)] = row
        dm[npts - 1 - i, :] = 0
        dm[npts - 1 - i, npts - len(bp[i]):] = -np.array(bp[i])[::-1]
    return dp, dm, p


def check(spec, n=60):
    dp, dm, p = dense_pair(spec, n)
    P = np.diag(p)
    B = np.zeros_like(P)
    B[0, 0] = -1
    B[-1, -1] = 1
    qp, qm = P @ dp, P @ dm
    sbp = np.abs(qp + qm.T - B).max()
    ap = qp - B / 2
    am = qm - B / 2
    sp_ = np.linalg.eigvalsh(ap + ap.T).max()
    sm = np.linalg.eigvalsh(am + am.T).min()
    x = np.arange(n + 1, dtype=float)
    acc = 0.0
    g = spec["gamma"]
    for r in range(g + 1):
        exact = r * x ** (r - 1) if r > 0 else np.zeros_like(x)
        for d in (dp, dm):
            acc = max(acc, np.abs(d @ x ** r - exact).max() / max(1.0, n ** r))
    q = spec["order"]
    interior = slice(12, n - 12)
    iacc = 0.0
    for r in range(q + 1):
        exact = r * x ** (r - 1) if r > 0 else np.zeros_like(x)
        for d in (dp, dm):
            iacc = max(iacc, np.abs((d @ x ** r - exact)[interior]).max() / max(1.0, n ** r))
    rho = max(np.abs(np.linalg.eigvals(dp)).max(), np.abs(np.linalg.eigvals(dm)).max())
    eig_re = max(np.linalg.eigvals(dp).real.max(), (-np.linalg.eigvals(dm)).real.max())
    return dict(sbp=sbp, smax=sp_, smin=sm, acc=acc, iacc=iacc, rho=rho, eig_re=eig_re, pmin=p.min())


# --------------------------------------------------------------------------

def dissipation_block(m, eps, rows, width):
    """Left boundary rows of R = -eps Dm^T Dm on a long grid."""
    n = width + 2 * m + 4
    dm_ = np.zeros((n - m, n))
    dw = [float(v) for v in diff_weights(m)]
    for i in range(n - m):
        dm_[i, i:i + m + 1] = dw
    r = -float(eps) * dm_.T @ dm_
    return r[:rows, :width]


def build_bounded(name, family, order, gamma, d_interior, c_central, m, eps, nb):
    w = max(c_central)
    res = closure(c_central, gamma, nb)
    if res is None:
        raise SystemExit(f"{name}: no closure with nb={nb}")
    p, qblk = res
    width = nb + max(w, m) + 1
    nrows = max(nb, m)
    # rows beyond nb but < nrows still need the truncated dissipation; they use interior Qc
    qfull = np.zeros((nrows, width))
    qfull[:nb, :qblk.shape[1]] = qblk
    for i in range(nb, nrows):
        for k in range(1, w + 1):
            if i + k < width:
                qfull[i, i + k] = c_central[k]
            if i - k >= 0:
                qfull[i, i - k] = -c_central[k]
    rblk = dissipation_block(m, eps, nrows, width)
    pfull = np.ones(nrows)
    pfull[:nb] = p
    bplus = (qfull + rblk) / pfull[:, None]
    bminus = (qfull - rblk) / pfull[:, None]
    return finish(name, family, order, gamma, d_interior, pfull, bplus, bminus)


def finish(name, family, order, gamma, d_interior, p, bplus, bminus):
    ks = sorted(d_interior)
    off = ks[0]
    stencil = [float(d_interior.get(k, 0)) for k in range(ks[0], ks[-1] + 1)]

    def trim(rows):
        out = []
        for r in rows:
            r = list(r)
            while r and abs(r[-1]) < 1e-15:
                r.pop()
            out.append([float(v) for v in r])
        return out

    spec = dict(name=name, family=family, order=order, gamma=gamma, offset=off,
                stencil=stencil, p=[float(v) for v in p],
                bplus=trim(bplus), bminus=trim(bminus))
    return spec


def sbp4_traditional():
    p = [17 / 48, 59 / 48, 43 / 48, 49 / 48]
    q = [[-24 / 17, 59 / 34, -4 / 17, -3 / 34, 0, 0],
         [-1 / 2, 0, 1 / 2, 0, 0, 0],
         [4 / 43, -59 / 86, 0, 59 / 86, -4 / 43, 0],
         [3 / 98, 0, -59 / 98, 0, 32 / 49, -4 / 49]]
    d = central_stencil(4)
    return finish("sbp4", "Traditional", 4, 2, d, p, q, q)


def sbp6_literature():
    p = [13649 / 43200, 12013 / 8640, 2711 / 4320, 5359 / 4320, 7877 / 8640, 43801 / 43200]
    q = [[-21600 / 13649, 104009 / 54596, 30443 / 81894, -33311 / 27298, 16863 / 27298, -15025 / 163788, 0, 0, 0],
         [-104009 / 240260, 0, -311 / 72078, 20229 / 24026, -24337 / 48052, 36661 / 360390, 0, 0, 0],
         [-30443 / 162660, 311 / 32532, 0, -11155 / 16266, 41287 / 32532, -21999 / 54220, 0, 0, 0],
         [33311 / 107180, -20229 / 21436, 485 / 1398, 0, 4147 / 21436, 25427 / 321540, 72 / 5359, 0, 0],
         [-16863 / 78770, 24337 / 31508, -41287 / 47262, -4147 / 15754, 0, 342523 / 472620, -1296 / 7877, 144 / 7877, 0],
         [15025 / 525612, -36661 / 262806, 21999 / 87602, -25427 / 262806, -342523 / 525612, 0, 32400 / 43801, -6480 / 43801, 720 / 43801]]
    d = central_stencil(6)
    return finish("sbp6", "Traditional", 6, 3, d, p, q, q)


def dp4_literature():
    p = [49 / 144, 61 / 48, 41 / 48, 149 / 144]
    blk = [[-72 / 49, 187 / 98, -20 / 49, -3 / 98, 0, 0, 0],
           [-187 / 366, 0, 69 / 122, -16 / 183, 2 / 61, 0, 0],
           [20 / 123, -69 / 82, 0, 227 / 246, -12 / 41, 2 / 41, 0],
           [3 / 298, 16 / 149, -227 / 298, 0, 126 / 149, -36 / 149, 6 / 149]]
    diss = [[-3 / 49, 9 / 49, -9 / 49, 3 / 49, 0, 0, 0],
            [3 / 61, -11 / 61, 15 / 61, -9 / 61, 2 / 61, 0, 0],
            [-3 / 41, 15 / 41, -29 / 41, 27 / 41, -12 / 41, 2 / 41, 0],
            [3 / 149, -27 / 149, 81 / 149, -117 / 149, 90 / 149, -36 / 149, 6 / 149]]
    bp = np.array(blk) + np.array(diss)
    bm = np.array(blk) - np.array(diss)
    d = max_order_stencil(1, 3)
    return finish("dp4", "DP", 4, 2, d, p, bp, bm)


def fmt_frac(v):
    return str(v)


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else None
    specs = []
    specs.append(sbp4_traditional())
    specs.append(sbp6_literature())
    specs.append(dp4_literature())
    for name, order, gamma, (a, b), nb in [("dp5", 5, 2, (2, 3), 6), ("dp6", 6, 3, (2, 4), 7)]:
        d = max_order_stencil(a, b)
        cc, s = split(d)
        m, eps = dissipation_scale(s)
        specs.append(build_bounded(name, "DP", order, gamma, d,
                                   {k: float(v) for k, v in cc.items()}, m, eps, nb))
    theta_max = 0.5 * np.pi
    for name, order, gamma, (a, b), hw, nb in [("drp4", 4, 2, (1, 3), 3, 5),
                                               ("drp5", 5, 2, (2, 3), 4, 5),
                                               ("drp6", 6, 3, (2, 4), 4, 7)]:
        d = max_order_stencil(a, b)
        _, s = split(d)
        m, eps = dissipation_scale(s)
        corder = order if order % 2 == 0 else order + 1
        cc = drp_central(corder, hw, theta_max)
        dd = {0: float(s[0])}
        for k in range(1, max(hw, m) + 1):
            ck = cc.get(k, 0.0)
            sk = float(s.get(k, 0))
            dd[k] = ck + sk
            dd[-k] = -ck + sk
        specs.append(build_bounded(name, "DRP", order, gamma, dd, cc, m, eps, nb))
    for spec in specs:
        r = check(spec)
        print(spec["name"], {k: f"{v:.3e}" for k, v in r.items()}, "p=", np.round(spec["p"], 4))
    if out:
        out.mkdir(parents=True, exist_ok=True)
        for spec in specs:
            write_files(out, spec)


NOTES = {
    "Traditional": "central interior stencil; D+ = D-",
    "DP": "upwind interior stencil of maximal order on its biased support",
    "DRP": "upwind interior stencil whose central part has one free coefficient "
           "fixed by minimising the dispersion error on (0, pi/2)",
}


def write_files(out, spec):
    fam = spec["family"]
    interior = {"offset": spec["offset"], "coefficients": spec["stencil"]}
    bounded = {
        "family": fam,
        "order": spec["order"],
        "boundary_order": spec["gamma"],
        "periodic": False,
        "note": NOTES[fam],
        "interior": interior,
        "quadrature": spec["p"],
        "boundary_plus": spec["bplus"],
    }
    if fam != "Traditional":
        bounded["boundary_minus"] = spec["bminus"]
    periodic = {
        "family": fam,
        "order": spec["order"],
        "boundary_order": spec["order"],
        "periodic": True,
        "note": NOTES[fam],
        "interior": interior,
    }
    (out / f"{spec['name']}.json").write_text(dump(bounded))
    (out / f"{spec['name']}_periodic.json").write_text(dump(periodic))


def dump(obj):
    """JSON with one line per coefficient row."""
    def fmt(v, ind):
        pad = "  " * ind
        if isinstance(v, dict):
            items = [f'{pad}  "{k}": {fmt(x, ind + 1)}' for k, x in v.items()]
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        if isinstance(v, list) and v and isinstance(v[0], list):
            rows = [pad + "  " + fmt(r, ind + 1) for r in v]
            return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
        return json.dumps(v)
    return fmt(obj, 0) + "\n"

if __name__ == "__main__":
    main()
