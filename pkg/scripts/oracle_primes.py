#!/usr/bin/env python3
"""Independent oracle for the frozen prime-sequence values in the tests.

Uses deterministic Miller-Rabin (exact for n < 3.3e24 with the fixed base
set below) — a different algorithm than the package's wheel trial division,
so the two routes corroborate each other.  Run directly to print the values
frozen into tests/test_curves.py and tests/test_acceptance.py.
"""

# deterministic witness set for n < 3,317,044,064,679,887,385,961,981
_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def mr_is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _BASES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime_above(bound: int) -> int:
    n = bound + 1
    while not mr_is_prime(n):
        n += 1
    return n


def main() -> None:
    q0 = 5
    b1 = (4 * (q0 - 1) * (q0 - 2)) ** 2
    q1 = next_prime_above(b1)
    print(f"bound after {q0}: {b1}")
    print(f"q1 = {q1}")
    b2 = (4 * (q1 - 1) * (q1 - 2)) ** 2
    q2 = next_prime_above(b2)
    print(f"bound after {q1}: {b2}")
    print(f"q2 = {q2}")
    toy = []
    n = 5
    while len(toy) < 10:
        if mr_is_prime(n):
            toy.append(n)
        n += 2
    print(f"toy primes: {toy}")


if __name__ == "__main__":
    main()
