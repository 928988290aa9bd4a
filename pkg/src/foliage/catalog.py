"""Built-in scenarios: the four tube-surgery showcases and supporting models.

Each entry is a parseable scenario text; the EXAMPLES table also carries the
expected verdicts the `examples` command checks against.
"""

from __future__ import annotations

_PQ = """[symbols]
p = 3.14159265358979323846264338327950288420
q = 1.41421356237309504880168872420969807857
"""

SCENARIOS: dict[str, str] = {}

SCENARIOS["torus-rational"] = """[symbols]

[orbifold T]
builtin = torus

[form w]
on = T
dtheta = 2
dphi = 3
"""

SCENARIOS["torus-dtheta"] = """[symbols]

[orbifold T]
builtin = torus

[form w]
on = T
dtheta = 1
dphi = 0
"""

SCENARIOS["torus-dense"] = _PQ + """
[orbifold T]
builtin = torus

[form w]
on = T
dtheta = 1*p
dphi = 1*q
"""

SCENARIOS["pillowcase-dtheta"] = """[symbols]

[orbifold Q]
builtin = pillowcase

[form w]
on = Q
dtheta = 1
dphi = 0
basic_override = true
"""

SCENARIOS["pillowcase-dense"] = _PQ + """
[orbifold Q]
builtin = pillowcase

[form w]
on = Q
dtheta = 1*p
dphi = 1*q
basic_override = true
"""

SCENARIOS["shifted-dtheta"] = """[symbols]

[orbifold S]
builtin = shifted_torus

[form w]
on = S
dtheta = 1
dphi = 0
"""

SCENARIOS["sum-b-compact"] = """[symbols]

[orbifold QL]
builtin = pillowcase

[orbifold TR]
builtin = torus

[form wL]
on = QL
dtheta = 1
dphi = 0
basic_override = true

[form wR]
on = TR
dtheta = 2
dphi = 3

[surgery bsum]
kind = B
left = wL
right = wR
left_window = 1/8 : 3/8
right_window = 5/8 : 7/8
tube = 3/4 : 1/4
"""

SCENARIOS["pillowcase-ex1"] = _PQ + """
[orbifold QL]
builtin = pillowcase

[orbifold QR]
builtin = pillowcase

[form wL]
on = QL
dtheta = 1
dphi = 0
basic_override = true

[form wR]
on = QR
dtheta = 1*p
dphi = 1*q
basic_override = true

[surgery ex1]
kind = A
left = wL
right = wR
left_window = 1/8 : 3/8
right_window = 1/8 : 3/8
tube = 3/16 : 5/16
"""

SCENARIOS["pillowcase-ex2"] = _PQ + """
[orbifold QL]
builtin = pillowcase

[orbifold QR]
builtin = pillowcase

[form wL]
on = QL
dtheta = 1*p
dphi = 1*q
basic_override = true

[form wR]
on = QR
dtheta = 1*p
dphi = 1*q
basic_override = true

[surgery ex2]
kind = C
left = wL
right = wR
left_window = 1/8 : 3/8
right_window = 1/8 : 3/8
tube = 1/4 : 1/4
"""

SCENARIOS["pillowcase-ex3"] = """[symbols]
p1 = 3.14159265358979323846264338327950288420
q1 = 1.41421356237309504880168872420969807857
p2 = 1.73205080756887729352744634150587236694
q2 = 2.23606797749978969640917366873127623544

[orbifold QL]
builtin = pillowcase

[orbifold QR]
builtin = pillowcase

[form wL]
on = QL
dtheta = 1*p1
dphi = 1*q1
basic_override = true

[form wR]
on = QR
dtheta = 1*p2
dphi = 1*q2
basic_override = true

[surgery ex3]
kind = B
left = wL
right = wR
left_window = 1/8 : 3/8
right_window = 5/8 : 7/8
tube = 3/4 : 1/4
"""

SCENARIOS["pillowcase-ex4"] = """[symbols]
a = 1.41421356237309504880168872420969807857

[orbifold QL]
builtin = pillowcase

[orbifold QR]
builtin = pillowcase

[form wL]
on = QL
dtheta = 2
dphi = 3
basic_override = true

[form wR]
on = QR
dtheta = 2*a
dphi = 3*a
basic_override = true

[surgery ex4]
kind = A
left = wL
right = wR
left_window = -1/8 : 3
right_window = -1/8 : 3
tube = 0 : 23/8
"""

# expected verdicts for the `examples` command: (transitive, has compact
# leaves, has noncompact leaves, boundary component count or None, harmonic)
EXAMPLES: list[tuple[str, dict]] = [
    (
        "pillowcase-ex1",
        {
            "transitive": True,
            "has_compact_leaf": True,
            "has_noncompact_leaf": True,
            "compact_singular_components": None,
            "harmonic": "IntrinsicallyHarmonic",
        },
    ),
    (
        "pillowcase-ex2",
        {
            "transitive": False,
            "has_compact_leaf": False,
            "has_noncompact_leaf": True,
            "compact_singular_components": 1,
            "harmonic": "NotIntrinsicallyHarmonic",
        },
    ),
    (
        "pillowcase-ex3",
        {
            "transitive": False,
            "has_compact_leaf": True,
            "has_noncompact_leaf": True,
            "compact_singular_components": None,
            "harmonic": "NotIntrinsicallyHarmonic",
        },
    ),
    (
        "pillowcase-ex4",
        {
            "transitive": True,
            "has_compact_leaf": False,
            "has_noncompact_leaf": True,
            "compact_singular_components": None,
            "harmonic": "IntrinsicallyHarmonic",
        },
    ),
]
