"""Independent reference computations used to check the package.

Nothing here imports the package's solvers; each oracle is written from
the recurrences directly, by a different route where one exists.
"""

import itertools
import math

import numpy as np

EPS = 1e-12


def poly_roots(kind, p, x):
    """Roots in x' of the recurrence as a polynomial, via numpy's companion-matrix solver."""
    if kind == "recursive":
        coeffs = [1.0, -p * x * (1 - x)]
    elif kind == "incursive":
        # x' (1 + p x) - p x = 0
        coeffs = [1.0 + p * x, -p * x]
    elif kind == "hyperincursive":
        # p y^2 - p y + x = 0
        coeffs = [p, -p, x]
    elif kind == "interaction":
        # p (1 - y)^2 - x = p y^2 - 2p y + p - x
        coeffs = [p, -2 * p, p - x]
    elif kind == "self-organization":
        # p (1 - y)^3 - x = -p y^3 + 3p y^2 - 3p y + p - x
        coeffs = [-p, 3 * p, -3 * p, p - x]
    elif kind == "organization":
        q = p * (1 - x)
        coeffs = [q, -2 * q, q - x]
    else:
        raise ValueError(kind)
    return sorted(np.roots(coeffs), key=lambda r: (r.real, r.imag))


def naive_lower_lifetime_org(d, x0, cap):
    """Lifetime of the organization map under always-lower, by plain iteration."""
    x = x0
    for n in range(cap):
        if abs(1 - x) <= EPS:
            return n
        h = x / (d * (1 - x))
        if h < 0:
            return n
        y = 1 - math.sqrt(h)
        if not (-EPS <= y <= 1 + EPS):
            return n
        x = y
    return None


def iterate(f, x0, n):
    x = x0
    for _ in range(n):
        x = f(x)
    return x


def hyper_paths(a, x0, depth):
    """Every depth-``depth`` endpoint of the hyperincursive root tree, by path enumeration."""
    ends = []
    for path in itertools.product((0, 1), repeat=depth):
        x = x0
        for choice in path:
            disc = 1 - 4 * x / a
            if disc < 0:
                break
            r = (0.5 - 0.5 * math.sqrt(disc), 0.5 + 0.5 * math.sqrt(disc))[choice]
            if not (-EPS <= r <= 1 + EPS):
                break
            x = r
        else:
            ends.append(x)
    return ends


def entropy_bits(counts):
    n = sum(counts)
    return -sum(c / n * math.log2(c / n) for c in counts if c)
