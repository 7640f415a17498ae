"""Expected values fixed before the engine was run.

Every entry is recomputed by an independent route in ``test_oracles.py``
(sympy or direct linear algebra), so these literals are not taken from the
package under test.
"""

# one division step of x^2*y + 1 by x*y - 1, lex x > y
DIVISION = {"f": "x^2*y + 1", "divisor": "x*y - 1", "quotient": "x", "remainder": "x + 1"}

# reduced lex basis of (x^2 - 1, x*y - 1)
LEX_GB = {"generators": ["x^2 - 1", "x*y - 1"], "basis": ["x - y", "y^2 - 1"]}

NF_X2 = "1"

# kernel of QQ[u, v] -> QQ[t], u -> t^2, v -> t^3
TWISTED_CUBIC_KERNEL = "u^3 - v^2"

# trace forms on the basis {1, x}: (relation, Gram matrix, determinant)
TRACE_FORMS = [
    ("x^2 + 1", [[2, 0], [0, -2]], -4),
    ("x^2 - x", [[2, 1], [1, 1]], 1),
    ("x^2", [[2, 0], [0, 0]], 0),
]

# separability idempotent of QQ[x]/(x^2 - x) in QQ[x1, x2]/(x1^2 - x1, x2^2 - x2)
SECTION_IDEMPOTENT = "x1*x2 + (1 - x1)*(1 - x2)"

# Koszul complex ranks of (x, y) and of (x, y, z)
KOSZUL_RANKS = {2: [1, 2, 1], 3: [1, 3, 3, 1]}
