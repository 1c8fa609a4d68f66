"""Independent brute-force reference implementations used by the tests.

Plain Python loops only; nothing here calls into the package.
"""

import itertools
import math


def matmul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[sum(A[i][p] * B[p][j] for p in range(k)) for j in range(m)] for i in range(n)]


def covariance(X):
    m, T = len(X), len(X[0])
    return [[sum(X[i][k] * X[j][k] for k in range(T)) / T for j in range(m)] for i in range(m)]


def lagged_covariance(Z, tau):
    n, T = len(Z), len(Z[0])
    out = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            total = 0.0
            for k in range(tau, T):
                total += Z[i][k] * Z[j][k - tau]
            out[i][j] = total / (T - tau)
    return out


def pearson(x, y):
    mx, my = sum(x) / len(x), sum(y) / len(y)
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def best_permutation(truth, estimate):
    """Brute force over all assignments; returns true index per estimate."""
    n = len(truth)
    C = [[abs(pearson(truth[i], estimate[j])) for j in range(n)] for i in range(n)]
    best, arg = -1.0, None
    for perm in itertools.permutations(range(n)):
        score = sum(C[perm[j]][j] for j in range(n))
        if score > best:
            best, arg = score, perm
    return list(arg)


def amari(G):
    """Amari index of a square gain matrix, written out term by term."""
    n = len(G)
    a = [[abs(v) for v in row] for row in G]
    row_terms = 0.0
    for i in range(n):
        row_terms += sum(a[i]) / max(a[i]) - 1.0
    col_terms = 0.0
    for j in range(n):
        col = [a[i][j] for i in range(n)]
        col_terms += sum(col) / max(col) - 1.0
    return (row_terms + col_terms) / (2.0 * n * (n - 1))
