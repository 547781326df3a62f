"""Norms, trace-logarithms and branch-continuous argument lifts."""

import math

import numpy as np

from .errors import DomainError, InvalidInput, RefinementRequired

LIFT_JUMP = math.pi / 2


def operator_norm(a):
    """Largest singular value; batches over leading axes."""
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise InvalidInput("matrix has non-finite entries")
    if a.ndim == 2:
        return float(np.linalg.norm(a, 2))
    return np.linalg.norm(a, 2, axis=(-2, -1))


def _check_contraction(z):
    norms = operator_norm(z)
    if np.any(np.asarray(norms) >= 1.0):
        raise DomainError(f"trace-log needs ||Z|| < 1, got {np.max(norms):.6g}")


def tr_log_one_plus(z, check=True):
    """``tr ln(1 + Z) = sum_j ln(1 + lambda_j(Z))`` with the principal scalar log.

    For ``||Z|| < 1`` every ``1 + lambda_j`` has positive real part, so the
    imaginary part of each term lies in (-pi/2, pi/2).  Accepts a batch of
    shape (..., n, n) and returns an array of shape (...).
    """
    z = np.asarray(z, dtype=complex)
    if check:
        _check_contraction(z)
    if z.shape[-1] == 1:
        out = np.log1p(z[..., 0, 0])
    else:
        out = np.log1p(np.linalg.eigvals(z)).sum(axis=-1)
    return complex(out) if out.ndim == 0 else out


def tr_log_series(z, tol=1e-14):
    """Trace of the Mercator series ``sum_k (-1)^(k+1) Z^k / k``.

    Summation stops once the tail bound ``||Z||^k / k`` drops below ``tol``.
    Independent of :func:`tr_log_one_plus` (no eigenvalues involved).
    """
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    z = np.asarray(z, dtype=complex)
    norm = operator_norm(z)
    if norm >= 1.0:
        raise DomainError(f"series needs ||Z|| < 1, got {norm:.6g}")
    total = 0j
    power = np.eye(z.shape[0], dtype=complex)
    k = 1
    while True:
        power = power @ z
        total += (-1) ** (k + 1) * np.trace(power) / k
        if norm ** k / k < tol or not power.any():
            break
        k += 1
    return complex(total)


def _arg_increments(samples):
    samples = np.asarray(samples, dtype=complex)
    if np.any(samples == 0):
        raise InvalidInput("argument path passes through zero")
    return np.angle(samples[..., 1:] / samples[..., :-1])


def continuous_arg_lift(path, start_value=0.0):
    """Endpoint of the continuous lift of ``arg`` along sampled nonzero values.

    ``start_value`` must agree with ``arg(path[0])`` modulo 2 pi.  Each step
    must turn by less than pi/2, otherwise :class:`RefinementRequired` is
    raised and the caller has to sample the path more finely.  Increments are
    accumulated left to right, so lifting a path in two pieces gives exactly
    the lift of the concatenation.
    """
    path = np.asarray(path, dtype=complex).ravel()
    if path.size == 0:
        raise InvalidInput("empty path")
    off = np.angle(path[0]) - start_value
    if abs(math.remainder(off, 2 * math.pi)) > 1e-6:
        raise InvalidInput("start_value is not a lift of arg(path[0])")
    inc = _arg_increments(path)
    bad = np.flatnonzero(np.abs(inc) >= LIFT_JUMP)
    if bad.size:
        raise RefinementRequired(f"argument jump {inc[bad[0]]:.3f} at step {bad[0]}")
    value = float(start_value)
    for d in inc:
        value += float(d)
    return value


def lift_batch(paths, start=None):
    """Lifted endpoints for many paths at once; ``paths`` has shape (m, k).

    Returns ``(endpoints, max_jump)``.  The caller decides whether
    ``max_jump`` is small enough; :func:`lift_batch_checked` enforces it.
    """
    paths = np.asarray(paths, dtype=complex)
    inc = _arg_increments(paths)
    if start is None:
        start = np.angle(paths[..., 0])
    jump = float(np.max(np.abs(inc))) if inc.size else 0.0
    return start + inc.sum(axis=-1), jump


def lift_batch_checked(paths, start=None):
    values, jump = lift_batch(paths, start)
    if jump >= LIFT_JUMP:
        raise RefinementRequired(f"argument jump {jump:.3f} >= pi/2")
    return values


def principal_power(w, alpha, branch="principal"):
    """``w^(-alpha) = |w|^(-alpha) exp(-i alpha arg w)``.

    ``branch='upper-half-plane'`` takes ``arg`` in (0, pi) and requires
    ``Im w > 0``; ``branch='principal'`` takes ``arg`` in (-pi, pi].
    """
    w = complex(w)
    if w == 0:
        raise DomainError("w = 0 has no power")
    if branch == "upper-half-plane":
        if not w.imag > 0:
            raise DomainError("upper-half-plane branch needs Im w > 0")
    elif branch != "principal":
        raise InvalidInput(f"unknown branch {branch!r}")
    arg = math.atan2(w.imag, w.real)
    if arg == -math.pi:
        arg = math.pi
    return abs(w) ** (-alpha) * complex(math.cos(alpha * arg), -math.sin(alpha * arg))
