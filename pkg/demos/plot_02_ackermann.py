"""
Ackermann(2, 2)
---------------

Compile the Church-encoded term, reduce it with the deterministic
algorithm and read the result back.  It should be Church 7.
"""

import time

from chemlambda import AlgorithmConfig, compile, decompile, parse_lambda, reduce
from chemlambda.analysis import stats
from chemlambda.lambdacalc import alpha_eq, church, format_term

ack = r"(\m.m (\g.\n.n g (g (\f.\x.f x))) (\n.\f.\x.f (n f x)))"
two = r"(\f.\x.f (f x))"
term = parse_lambda(f"{ack} {two} {two}")

m = compile(term)
print("start:", stats(m)["nodes"])

t0 = time.perf_counter()
trace = reduce(m, AlgorithmConfig())
print(f"{trace.cycles} cycles, {trace.moves_applied()} moves, "
      f"{time.perf_counter() - t0:.2f}s")

result = decompile(trace.final)
print(format_term(result), alpha_eq(result, church(7)))
