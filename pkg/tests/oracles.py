"""Independent reference implementations used only by the tests.

The Clifford product here works on explicit generator words and sorts them by
adjacent swaps, so it shares nothing with the bitmask sign table of the
package.  Coefficients can be floats or sympy expressions.
"""

import itertools

import numpy as np
import sympy as sp


def word_of_mask(mask):
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def mask_of_word(word):
    out = 0
    for g in word:
        out |= 1 << g
    return out


def reduce_word(word):
    """Sort a generator word with e_i e_j = -e_j e_i, e_i e_i = -1; return (sign, word)."""
    word = list(word)
    sign = 1
    changed = True
    while changed:
        changed = False
        for k in range(len(word) - 1):
            if word[k] > word[k + 1]:
                word[k], word[k + 1] = word[k + 1], word[k]
                sign = -sign
                changed = True
            elif word[k] == word[k + 1]:
                del word[k : k + 2]
                sign = -sign
                changed = True
                break
    return sign, word


def naive_product(a, b, m):
    n = 1 << m
    out = [0] * n
    for i in range(n):
        if a[i] == 0:
            continue
        for j in range(n):
            if b[j] == 0:
                continue
            s, w = reduce_word(word_of_mask(i) + word_of_mask(j))
            out[mask_of_word(w)] += s * a[i] * b[j]
    return out


def grade(mask):
    return bin(mask).count("1")


def naive_reverse(a, m):
    return [c * (-1) ** (grade(i) * (grade(i) - 1) // 2) for i, c in enumerate(a)]


def naive_conjugate(a, m):
    return [c * (-1) ** (grade(i) * (grade(i) + 1) // 2) for i, c in enumerate(a)]


# ---------------------------------------------------------------- symbolic calculus


def symbols(n):
    return sp.symbols(f"x1:{n + 1}", real=True)


def symbolic_polynomial(coeffs, alphas, xs):
    """Blade-wise sympy expressions of sum_g coeffs[g] x^alpha_g."""
    nb = coeffs.shape[-1]
    out = []
    for b in range(nb):
        expr = 0
        for g, a in enumerate(alphas):
            c = coeffs[g, b]
            if c != 0:
                expr += sp.Rational(c) * sp.Mul(*[x ** int(e) for x, e in zip(xs, a)])
        out.append(sp.expand(expr))
    return out


def unit(m, axis):
    u = [0] * (1 << m)
    u[1 << (axis - 1)] = 1
    return u


def sym_G(f, xs, p, m):
    """D_{x_p} f + (x_q/|x_q|^2) E_{x_q} f, symbolic, as blade-wise expressions."""
    out = [0] * (1 << m)
    for i in range(1, p + 1):
        d = [sp.diff(c, xs[i - 1]) for c in f]
        out = [o + t for o, t in zip(out, naive_product(unit(m, i), d, m))]
    euler = [sum(xs[j - 1] * sp.diff(c, xs[j - 1]) for j in range(p + 1, m + 1)) for c in f]
    nq = sum(xs[j - 1] ** 2 for j in range(p + 1, m + 1))
    xq = [0] * (1 << m)
    for j in range(p + 1, m + 1):
        xq[1 << (j - 1)] = xs[j - 1] / nq
    return [sp.together(o + t) for o, t in zip(out, naive_product(xq, euler, m))]


def evaluate(exprs, xs, point):
    subs = dict(zip(xs, [sp.nsimplify(v) for v in point]))
    return np.array([float(sp.N(e.subs(subs), 30)) if e != 0 else 0.0 for e in exprs])


def all_blades(m):
    return list(itertools.product([0, 1], repeat=m))
