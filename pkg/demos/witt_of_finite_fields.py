"""Print W(F_p) for small odd primes and compare with p mod 4."""

from chowwitt.scalars import GF, is_prime
from chowwitt.wittring import group_structure

for p in (p for p in range(3, 60) if is_prime(p)):
    print(f"p = {p:2d}  p mod 4 = {p % 4}  W(F_p) = {group_structure(GF(p)).render()}")
