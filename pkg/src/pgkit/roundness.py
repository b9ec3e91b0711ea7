"""Weak roundness and the golden-ratio dense restriction."""

from __future__ import annotations

from .matroid import DEFAULT_FLAT_CAP, Matroid, elements_of, flat_masks_by_rank, point_masks
from .verdict import AnalysisVerdict


def fib_lucas(n: int) -> tuple[int, int]:
    """(F_n, L_n) for n >= 0, so that phi^n = (L_n + F_n sqrt5) / 2."""
    f0, f1 = 0, 1
    for _ in range(n):
        f0, f1 = f1, f0 + f1
    return f0, 2 * f1 - f0


def _sign_a_plus_b_sqrt5(a: int, b: int) -> int:
    """Sign of a + b*sqrt(5), exactly."""
    if a >= 0 and b >= 0:
        return 0 if a == 0 and b == 0 else 1
    if a <= 0 and b <= 0:
        return -1
    # Opposite signs: compare a^2 with 5 b^2.
    diff = a * a - 5 * b * b
    if diff == 0:
        return 0  # pragma: no cover - sqrt5 is irrational
    return (1 if a > 0 else -1) if diff > 0 else (1 if b > 0 else -1)


def phi_scaled_at_least(a: int, s: int, b: int) -> bool:
    """Exact test of ``a * phi**s >= b`` for integers a, b and s >= 0."""
    if s < 0:
        raise ValueError("s must be >= 0")
    F, L = fib_lucas(s)
    # a (L + F sqrt5)/2 >= b  <=>  (a L - 2b) + a F sqrt5 >= 0
    return _sign_a_plus_b_sqrt5(a * L - 2 * b, a * F) >= 0


def _hyperplanes(M: Matroid, cap: int) -> list[int]:
    return flat_masks_by_rank(M, M.r - 1, cap)[M.r - 1]


def weakly_round(M: Matroid, *, cap: int = DEFAULT_FLAT_CAP) -> AnalysisVerdict:
    """No cover E = A u B with r(A) <= r-2 and r(B) <= r-1.

    A cover exists iff some hyperplane B has r(E - B) <= r - 2 (growing B to a
    hyperplane only shrinks its complement), so only hyperplanes are searched.
    A refutation carries the witness pair (A = E - B, B).
    """
    r = M.r
    if r <= 2:
        return AnalysisVerdict("bound-holds", {"reason": "rank <= 2"})
    E = M.ground_mask
    for B in _hyperplanes(M, cap):
        A = E & ~B
        if M._r(A) <= r - 2:
            return AnalysisVerdict("refuted", {"A": elements_of(A), "B": elements_of(B)})
    return AnalysisVerdict("bound-holds", {"reason": "no cover"})


def weakly_round_bruteforce(M: Matroid) -> bool:
    """Double loop over all subsets A with B = E - A; independent of the flat machinery."""
    r = M.r
    if r <= 2:
        return True
    bits = M.bits
    n = len(bits)
    E = M.ground_mask
    for sub in range(1 << n):
        A = 0
        for i in range(n):
            if sub >> i & 1:
                A |= bits[i]
        if M._r(A) <= r - 2 and M._r(E & ~A) <= r - 1:
            return False
    return True


def exact_cover(M: Matroid, A: int, B: int) -> tuple[int, int]:
    """Pad A with elements of B (smallest first) until r(A) = r - 2; B is a hyperplane."""
    target = M.r - 2
    for b in M.bits:
        if M._r(A) >= target:
            break
        if b & B and not b & A and M._r(A | b) > M._r(A):
            A |= b
    return A, B


def dense_round_restriction(M: Matroid, *, cap: int = DEFAULT_FLAT_CAP) -> tuple[Matroid, list[dict]]:
    """Weakly round restriction N with eps(N) * phi^(r(M)-r(N)) >= eps(M).

    Follows the recursion: split along a cover (A, B) with r(A) = r-2 and
    r(B) = r-1, keep A when eps(M|A) * phi^2 >= eps(M), otherwise keep B.
    Returns N and the trace of cover choices.
    """
    trace = []
    current = M
    while True:
        v = weakly_round(current, cap=cap)
        if v.kind != "refuted":
            return current, trace
        A, B = exact_cover(current, current.mask(v.witness["A"]), current.mask(v.witness["B"]))
        eps = len(point_masks(current))
        eps_a = len(point_masks(current, elements_of(A)))
        keep_a = phi_scaled_at_least(eps_a, 2, eps)
        chosen = A if keep_a else B
        trace.append(
            {
                "A": elements_of(A),
                "B": elements_of(B),
                "eps": eps,
                "eps_A": eps_a,
                "kept": "A" if keep_a else "B",
            }
        )
        current = current.restrict(elements_of(chosen))


def phi_bound_holds(M: Matroid, N: Matroid) -> bool:
    """eps(N) >= phi^(r(N) - r(M)) eps(M), compared exactly."""
    return phi_scaled_at_least(len(point_masks(N)), M.r - N.r, len(point_masks(M)))
