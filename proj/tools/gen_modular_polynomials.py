#!/usr/bin/env python3
"""Regenerate data/modular_polynomials/phi_<l>.txt.

Solves for the coefficients of the classical modular polynomial Phi_l(X, Y)
from the q-expansion identity Phi_l(j(q), j(q^l)) = 0 using exact rational
linear algebra. The system is overdetermined; every extra equation is
checked, so a successful run certifies the table.
"""
import sys
from fractions import Fraction
from pathlib import Path

PREC = 120  # number of q-expansion terms kept beyond the pole


def sigma3(n):
    return sum(d ** 3 for d in range(1, n + 1) if n % d == 0)


def series_mul(a, b, n):
    out = [0] * n
    for i, ai in enumerate(a[:n]):
        if ai:
            for k, bk in enumerate(b[: n - i]):
                out[i + k] += ai * bk
    return out


def j_coefficients(n):
    """Coefficients c_k of j(q) = sum_{k >= -1} c_k q^k, returned as list indexed k+1."""
    e4 = [1] + [240 * sigma3(k) for k in range(1, n + 2)]
    # Delta / q = prod (1 - q^m)^24
    eta = [1] + [0] * (n + 1)
    for m in range(1, n + 2):
        for _ in range(24):
            for k in range(n + 1, m - 1, -1):
                eta[k] -= eta[k - m]
    e4_cubed = series_mul(series_mul(e4, e4, n + 2), e4, n + 2)
    # invert eta series
    inv = [0] * (n + 2)
    inv[0] = 1
    for k in range(1, n + 2):
        inv[k] = -sum(eta[i] * inv[k - i] for i in range(1, k + 1))
    return series_mul(e4_cubed, inv, n + 2)  # q * j(q)


class Laurent:
    def __init__(self, val, coeffs):
        self.val, self.coeffs = val, coeffs

    def mul(self, other, top):
        n = top - (self.val + other.val) + 1
        return Laurent(self.val + other.val, series_mul(self.coeffs, other.coeffs, max(n, 0)))

    def coeff(self, k):
        i = k - self.val
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0


def modular_polynomial(ell):
    top = 12
    work = top + 2 * (ell + 1) * (ell + 1)  # products need headroom past top
    jq = j_coefficients(PREC + ell * ell + 2 * ell)
    x = Laurent(-1, jq)
    y_coeffs = [0] * (len(jq) * ell)
    for k, c in enumerate(jq):
        y_coeffs[k * ell] = c
    y = Laurent(-ell, y_coeffs)
    xp = [Laurent(0, [1] * 1 + [0] * 4000)]
    yp = [Laurent(0, [1] * 1 + [0] * 4000)]
    for _ in range(ell + 1):
        xp.append(xp[-1].mul(x, work))
        yp.append(yp[-1].mul(y, work))
    unknowns = [(i, j) for i in range(ell + 1) for j in range(i + 1) if (i, j) != (ell, ell)]
    fixed = {(ell + 1, 0): 1, (ell, ell): -1}

    def mono(i, j):
        m = xp[i].mul(yp[j], work)
        if i != j:
            m2 = xp[j].mul(yp[i], work)
            return lambda k: m.coeff(k) + m2.coeff(k)
        return m.coeff

    cols = [mono(i, j) for (i, j) in unknowns]
    rhs_monos = [(c, mono(i, j)) for (i, j), c in fixed.items()]
    low = -(ell + 1) * ell
    rows = []
    for k in range(low, top + 1):
        row = [Fraction(f(k)) for f in cols]
        rhs = -sum(c * f(k) for c, f in rhs_monos)
        rows.append(row + [Fraction(rhs)])
    # Gaussian elimination
    n = len(unknowns)
    r = 0
    pivots = []
    for col in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            raise SystemExit(f"singular system for ell={ell}")
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][col]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    for extra in rows[r:]:
        if extra[-1] != 0:
            raise SystemExit(f"inconsistent system for ell={ell}")
    coeffs = dict(fixed)
    for idx, (i, j) in enumerate(unknowns):
        v = rows[idx][-1]
        if v.denominator != 1:
            raise SystemExit(f"non-integral coefficient for ell={ell}")
        if v != 0:
            coeffs[(i, j)] = int(v)
    return coeffs


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "modular_polynomials"
    out_dir.mkdir(parents=True, exist_ok=True)
    for ell in (2, 3, 5, 7):
        coeffs = modular_polynomial(ell)
        lines = [f"ell {ell}"]
        for (i, j) in sorted(coeffs, key=lambda t: (-t[0], -t[1])):
            lines.append(f"{i} {j} {coeffs[(i, j)]}")
        (out_dir / f"phi_{ell}.txt").write_text("\n".join(lines) + "\n")
        print(f"ell={ell}: {len(coeffs)} monomials")


if __name__ == "__main__":
    main()
