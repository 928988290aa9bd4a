"""
Quotient orbifolds, loops and the period homomorphism
=====================================================

The flat torus with a finite affine action presents a 2-orbifold.  Loops
through the quotient alternate torus paths with group arrows; integrating a
closed 1-form over the generating loops gives the period homomorphism, whose
Q-rank controls the whole leaf classification.
"""

from fractions import Fraction

from foliage import (
    ClosedForm,
    SymbolTable,
    TorusPoint,
    fundamental_generators,
    isotropy_order,
    orbit,
    periods,
    pillowcase_presentation,
    rank_of_class,
    torus_presentation,
)

table = SymbolTable([
    ("p", "3.14159265358979323846264338327950288420"),
    ("q", "1.41421356237309504880168872420969807857"),
])

# the half-turn quotient: sphere with four cone points
Q = pillowcase_presentation()
for pt in [(0, 0), (Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 4), Fraction(1, 3))]:
    x = TorusPoint(*pt)
    print(f"point {pt}: orbit size {len(orbit(x, Q))}, isotropy {isotropy_order(x, Q)}")

# generating loops: the two torus cycles plus one per group element
print("generators:", [g.gen_id for g in fundamental_generators(Q)])

# periods of p*dtheta + q*dphi on the plain torus
T = torus_presentation()
w = ClosedForm((table.symbol("p"), table.symbol("q")), T)
for gen_id, value in periods(w):
    print(f"period over {gen_id}: {value.render()}")
print("rank of the class:", rank_of_class(w))

# a rational form has rank 1 -- every leaf closes up
w_rational = ClosedForm((table.rational(2), table.rational(3)), T)
print("rank of 2 dtheta + 3 dphi:", rank_of_class(w_rational))
