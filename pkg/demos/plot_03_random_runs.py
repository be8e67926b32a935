"""
Random reductions
-----------------

The random variant flips a weighted coin for each match.  Different seeds
take different paths, but for succ 2 they all land on Church 3.
"""

from collections import Counter

from chemlambda import compile, parse_lambda
from chemlambda.analysis import random_survival
from chemlambda.lambdacalc import church, format_term

m = compile(parse_lambda(r"(\n.\f.\x.f (n f x)) (\f.\x.f (f x))"))
cycles = random_survival(m, range(200), max_cycles=1000)

hist = Counter(cycles.values())
for c in sorted(hist, key=lambda v: (v is None, v)):
    print(f"{c!s:>5} {'#' * hist[c]}")
print("expected:", format_term(church(3)))

# lower BETA weight, longer runs
slow = random_survival(m, range(200), weights={"BETA": 0.1})
print(sum(slow.values()) / len(slow), "mean cycles at weight 0.1")
