"""Integer-vector majorization and Robin Hood transfers.

Ordering convention: ``majorizes(a, b)`` holds when every tail sum of the
sorted ``a`` is at most the matching tail sum of the sorted ``b`` and the
totals agree.  Read it as "``a`` fits inside ``b``": ``majorizes(d, p)`` is
the statement that demand ``d`` is exactly served by supply ``p``.  This is
the reverse of the usual textbook direction.

Vectors are plain tuples of Python ints; indices in the public API are
0-based.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

from .errors import InputError


def as_vector(values: Sequence[int], length: int | None = None) -> tuple[int, ...]:
    """Validate and freeze a nonnegative integer vector."""
    out = []
    for v in values:
        if isinstance(v, bool) or int(v) != v:
            raise InputError(f"non-integer entry {v!r}")
        v = int(v)
        if v < 0:
            raise InputError(f"negative entry {v}")
        out.append(v)
    if length is not None and len(out) != length:
        raise InputError(f"expected length {length}, got {len(out)}")
    return tuple(out)


def _check_lengths(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise InputError(f"length mismatch: {len(a)} vs {len(b)}")


def sort_nonincreasing(v: Sequence[int]) -> tuple[int, ...]:
    # sorted() is stable, so equal entries keep their original order
    return tuple(sorted(v, key=lambda x: -x))


def tail_sums(v: Sequence[int]) -> list[int]:
    """``out[t] = sum(v[t:])`` for t = 0..len(v)-1."""
    out = [0] * len(v)
    acc = 0
    for t in range(len(v) - 1, -1, -1):
        acc += v[t]
        out[t] = acc
    return out


def weakly_majorizes(a: Sequence[int], b: Sequence[int]) -> bool:
    _check_lengths(a, b)
    ta = tail_sums(sort_nonincreasing(a))
    tb = tail_sums(sort_nonincreasing(b))
    return all(x <= y for x, y in zip(ta, tb))


def majorizes(a: Sequence[int], b: Sequence[int]) -> bool:
    _check_lengths(a, b)
    return sum(a) == sum(b) and weakly_majorizes(a, b)


class RHTransfer(NamedTuple):
    """One unit moved from ``from_index`` to ``to_index`` of the sorted vector."""

    from_index: int
    to_index: int


def apply_rh_transfer(a: Sequence[int], transfer: RHTransfer) -> tuple[int, ...]:
    """Move one unit between positions of a nonincreasing vector and re-sort.

    Raises ``InputError`` unless the source entry strictly exceeds the
    destination entry.
    """
    a = list(a)
    if any(a[i] < a[i + 1] for i in range(len(a) - 1)):
        raise InputError("vector must be sorted nonincreasing")
    i, j = transfer
    if not (0 <= i < len(a) and 0 <= j < len(a)):
        raise InputError(f"transfer {transfer} out of range")
    if a[i] <= a[j]:
        raise InputError(
            f"invalid transfer {i}->{j}: {a[i]} is not greater than {a[j]}"
        )
    a[i] -= 1
    a[j] += 1
    return sort_nonincreasing(a)


def rh_transfer_sequence(a: Sequence[int], b: Sequence[int]) -> list[RHTransfer]:
    """Robin Hood transfers carrying ``sort(a)`` to ``sort(b)``.

    Each step takes the first position ``t`` where the current vector differs
    from the target, and the first later position ``s`` with a gap larger
    than one, then moves a unit from ``t`` to ``s``.  Requires
    ``majorizes(a, b)``.
    """
    if not majorizes(a, b):
        raise InputError("first vector does not majorize the second")
    cur = sort_nonincreasing(a)
    target = sort_nonincreasing(b)
    seq: list[RHTransfer] = []
    while cur != target:
        t = next(i for i in range(len(cur)) if cur[i] != target[i])
        s = next(
            (k for k in range(t + 1, len(cur)) if cur[t] - cur[k] > 1), None
        )
        if s is None:
            # cannot happen when the precondition holds
            raise AssertionError(f"no transfer target from {cur} toward {target}")
        step = RHTransfer(t, s)
        seq.append(step)
        cur = apply_rh_transfer(cur, step)
    return seq
