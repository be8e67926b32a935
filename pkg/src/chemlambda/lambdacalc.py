"""Untyped lambda terms: parsing, compilation to molecules, decompilation,
and a term-level normal-order reducer used as an independent oracle."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .molgraph import Editor, Molecule, NodeKind
from .rewrites import comb_cycle

__all__ = [
    "Variable", "Abstraction", "Application", "LambdaTerm", "LambdaSyntaxError",
    "NotLambda", "FuelExhausted", "parse_lambda", "format_term", "compile",
    "compile_with_map", "decompile", "beta_normalize", "alpha_eq", "church",
    "free_variables", "load_corpus", "term_size",
]


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True)
class Abstraction:
    param: str
    body: "LambdaTerm"

    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True)
class Application:
    fn: "LambdaTerm"
    arg: "LambdaTerm"

    def __str__(self) -> str:
        return format_term(self)


LambdaTerm = Union[Variable, Abstraction, Application]


class LambdaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class NotLambda(ValueError):
    """The molecule does not encode a lambda term."""


class FuelExhausted(RuntimeError):
    def __init__(self, term: LambdaTerm, steps: int):
        self.term = term
        self.steps = steps
        super().__init__(f"no normal form within {steps} beta steps")


# -- syntax -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<sym>[\\λ.()])|(?P<name>[^\Wλ]+))")


def _tokens(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mo = _TOKEN.match(text, pos)
        if mo is None:
            raise LambdaSyntaxError(f"unexpected character {text[pos:].lstrip()[0]!r}",
                                    len(text) - len(text[pos:].lstrip()))
        if mo.group("name"):
            out.append(("name", mo.group("name"), mo.start("name")))
        else:
            sym = mo.group("sym")
            out.append(("lam" if sym in "\\λ" else sym, sym, mo.start("sym")))
        pos = mo.end()
    out.append(("end", "", len(text)))
    return out


def parse_lambda(text: str) -> LambdaTerm:
    """Parse ``\\x.M`` / ``λx.M`` abstractions and left-associative application."""
    toks = _tokens(text)
    pos = 0

    def peek():
        return toks[pos]

    def expect(kind):
        nonlocal pos
        tok = toks[pos]
        if tok[0] != kind:
            want = {"name": "a variable", ".": "'.'", ")": "')'"}.get(kind, kind)
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            raise LambdaSyntaxError(f"expected {want}, got {got}", tok[2])
        pos += 1
        return tok

    def term():
        if peek()[0] == "lam":
            expect("lam")
            param = expect("name")[1]
            expect(".")
            return Abstraction(param, term())
        head = atom()
        while peek()[0] in ("name", "(", "lam"):
            if peek()[0] == "lam":
                head = Application(head, term())
                break
            head = Application(head, atom())
        return head

    def atom():
        nonlocal pos
        tok = peek()
        if tok[0] == "name":
            pos += 1
            return Variable(tok[1])
        if tok[0] == "(":
            pos += 1
            inner = term()
            expect(")")
            return inner
        got = "end of input" if tok[0] == "end" else repr(tok[1])
        raise LambdaSyntaxError(f"expected a term, got {got}", tok[2])

    result = term()
    if peek()[0] != "end":
        raise LambdaSyntaxError(f"unexpected {peek()[1]!r}", peek()[2])
    return result


def format_term(t: LambdaTerm) -> str:
    """Print with backslash lambdas and minimal parentheses."""
    if isinstance(t, Variable):
        return t.name
    if isinstance(t, Abstraction):
        return f"\\{t.param}.{format_term(t.body)}"
    fn = format_term(t.fn)
    if isinstance(t.fn, Abstraction):
        fn = f"({fn})"
    arg = format_term(t.arg)
    if not isinstance(t.arg, Variable):
        arg = f"({arg})"
    return f"{fn} {arg}"


def church(n: int) -> LambdaTerm:
    if n < 0:
        raise ValueError("Church numerals are non-negative")
    body: LambdaTerm = Variable("x")
    for _ in range(n):
        body = Application(Variable("f"), body)
    return Abstraction("f", Abstraction("x", body))


def free_variables(t: LambdaTerm) -> set[str]:
    if isinstance(t, Variable):
        return {t.name}
    if isinstance(t, Abstraction):
        return free_variables(t.body) - {t.param}
    return free_variables(t.fn) | free_variables(t.arg)


def term_size(t: LambdaTerm) -> int:
    if isinstance(t, Variable):
        return 1
    if isinstance(t, Abstraction):
        return 1 + term_size(t.body)
    return 1 + term_size(t.fn) + term_size(t.arg)


def load_corpus(text: str) -> list[tuple[str, LambdaTerm]]:
    """Corpus records are ``name<TAB>term``; ``#`` lines are comments."""
    out = []
    for raw in text.splitlines():
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        name, term = raw.split("\t", 1)
        out.append((name.strip(), parse_lambda(term)))
    return out


# -- compiler ---------------------------------------------------------------

class _Compiler:
    """Two passes: lay out A/L nodes while recording where each variable is
    consumed, then wire every binder to its consumers (T, direct, or an FO
    chain).  Consumers are ``(ports, index)`` slots of not-yet-numbered nodes."""

    def __init__(self, t: LambdaTerm):
        reserved = free_variables(t)
        self._names = (f"w{i}" for i in _count() if f"w{i}" not in reserved)
        self.nodes: list[tuple[NodeKind, list]] = []
        self.positions: dict[tuple[int, ...], int] = {}
        self.uses: dict[object, list[tuple[list, int]]] = {}
        self.bound: list[tuple[object, str]] = []
        self.free: list[str] = []

    def wire(self) -> str:
        return next(self._names)

    def emit(self, kind: NodeKind, ports: list) -> list:
        self.nodes.append((kind, ports))
        return ports

    def term(self, t: LambdaTerm, env: dict, path: tuple[int, ...], slot: tuple[list, int]):
        ports, index = slot
        if isinstance(t, Variable):
            key = env.get(t.name)
            if key is None:
                key = ("free", t.name)
                if key not in self.uses:
                    self.uses[key] = []
                    self.free.append(t.name)
            self.uses[key].append(slot)
            return
        out = self.wire()
        ports[index] = out
        if isinstance(t, Abstraction):
            node = self.emit(NodeKind.L, [None, self.wire(), out])
            self.positions[path] = len(self.nodes) - 1
            key = ("bound", len(self.nodes) - 1)
            self.uses[key] = []
            self.bound.append((key, node[1]))
            self.term(t.body, {**env, t.param: key}, path + (0,), (node, 0))
            return
        node = self.emit(NodeKind.A, [None, None, out])
        self.positions[path] = len(self.nodes) - 1
        self.term(t.fn, env, path + (0,), (node, 0))
        self.term(t.arg, env, path + (1,), (node, 1))

    def share(self, source: str, consumers: list[tuple[list, int]]) -> None:
        if not consumers:
            self.emit(NodeKind.T, [source])
            return
        wire = source
        for ports, index in consumers[:-1]:
            left, right = self.wire(), self.wire()
            self.emit(NodeKind.FO, [wire, left, right])
            ports[index] = left
            wire = right
        ports, index = consumers[-1]
        ports[index] = wire


def _count() -> Iterator[int]:
    i = 0
    while True:
        yield i
        i += 1


def compile_with_map(t: LambdaTerm) -> tuple[Molecule, dict[tuple[int, ...], int]]:
    """Compile ``t``; also return a map from tree positions (paths of 0/1
    child indices) to the ids of the A and L nodes."""
    c = _Compiler(t)
    root = [None]
    c.term(t, {}, (), (root, 0))
    for key, wire in c.bound:
        c.share(wire, c.uses[key])
    for name in c.free:
        c.emit(NodeKind.FRIN, [name])
        c.share(name, c.uses[("free", name)])
    c.emit(NodeKind.FROUT, root)
    ed = Editor(Molecule())
    for kind, ports in c.nodes:
        ed.add(kind, ports)
    return ed.freeze(), dict(c.positions)


def compile(t: LambdaTerm) -> Molecule:
    return compile_with_map(t)[0]


# -- decompiler -------------------------------------------------------------

_FANOUT = (NodeKind.FO, NodeKind.FOE)


def decompile(m: Molecule) -> LambdaTerm:
    """Read a lambda term back from a molecule.

    Arrows are first removed with a COMB cycle.  FRIN nodes feeding only a
    T are inert leftovers of discarded arguments and are ignored.  Raises
    :class:`NotLambda` when the graph is not a term graph.
    """
    m = comb_cycle(m)
    census = m.census()
    for kind in (NodeKind.FI, NodeKind.ARROW):
        if census[kind]:
            raise NotLambda(f"{kind} node present")
    frouts = m.nodes_of(NodeKind.FROUT)
    if len(frouts) != 1:
        raise NotLambda(f"expected exactly one FROUT, found {len(frouts)}")

    visited: set[int] = set()
    names: dict[int, str] = {}
    taken = {n.ports[0] for n in m.nodes_of(NodeKind.FRIN)}
    counter = _count()

    def fresh() -> str:
        while True:
            name = f"x{next(counter)}"
            if name not in taken:
                taken.add(name)
                return name

    def source(var: str):
        src = m.producer(var)
        if src is None:
            raise NotLambda(f"wire {var!r} has no source")
        return m.node(src[0]), src[1]

    def variable_root(node, port, scope):
        # climb a fan-out tree to the binder or free input it shares
        seen = set()
        while node.kind in _FANOUT:
            if node.id in seen:
                raise NotLambda("cyclic fan-out tree")
            seen.add(node.id)
            visited.add(node.id)
            node, port = source(node.ports[0])
        if node.kind is NodeKind.FRIN:
            visited.add(node.id)
            return Variable(node.ports[0])
        if node.kind is NodeKind.L and port == 1:
            if node.id not in scope:
                raise NotLambda(f"binder of L node {node.id} used outside its body")
            return Variable(names[node.id])
        raise NotLambda(f"fan-out not anchored to a binder or free input ({node.kind})")

    # explicit stack: term graphs from reductions can be deep
    def build(var: str, scope: frozenset) -> LambdaTerm:
        node, port = source(var)
        if node.kind is NodeKind.A and port == 2:
            if node.id in visited:
                raise NotLambda(f"A node {node.id} shared or cyclic")
            visited.add(node.id)
            return Application(build(node.ports[0], scope), build(node.ports[1], scope))
        if node.kind is NodeKind.L and port == 2:
            if node.id in visited:
                raise NotLambda(f"L node {node.id} shared or cyclic")
            visited.add(node.id)
            names[node.id] = fresh()
            body = build(node.ports[0], scope | {node.id})
            return Abstraction(names[node.id], body)
        if node.kind in _FANOUT or node.kind is NodeKind.FRIN or (
                node.kind is NodeKind.L and port == 1):
            return variable_root(node, port, scope)
        raise NotLambda(f"unexpected {node.kind} output feeding the term")

    (root,) = frouts
    visited.add(root.id)
    term = build(root.ports[0], frozenset())
    for node in m.nodes:
        if node.id in visited:
            continue
        if node.kind is NodeKind.T:
            src, port = source(node.ports[0])
            if src.kind is NodeKind.L and port == 1 and src.id in visited:
                continue
            if src.kind is NodeKind.FRIN:
                visited.add(src.id)
                continue
            raise NotLambda(f"T node {node.id} not attached to a binder")
    for node in m.nodes:
        if node.id not in visited and node.kind is not NodeKind.T:
            raise NotLambda(f"{node.kind} node {node.id} is not part of the term")
    return term


# -- oracle -----------------------------------------------------------------
# De Bruijn terms: ("v", index) | ("f", name) | ("l", hint, body) | ("a", fn, arg)

def _to_db(t: LambdaTerm, env: tuple[str, ...] = ()):
    if isinstance(t, Variable):
        for i, name in enumerate(env):
            if name == t.name:
                return ("v", i)
        return ("f", t.name)
    if isinstance(t, Abstraction):
        return ("l", t.param, _to_db(t.body, (t.param,) + env))
    return ("a", _to_db(t.fn, env), _to_db(t.arg, env))


def _from_db(d, env: tuple[str, ...] = (), free: frozenset = frozenset()) -> LambdaTerm:
    tag = d[0]
    if tag == "v":
        return Variable(env[d[1]])
    if tag == "f":
        return Variable(d[1])
    if tag == "l":
        name = d[1]
        while name in env or name in free:
            name += "'"
        return Abstraction(name, _from_db(d[2], (name,) + env, free))
    return Application(_from_db(d[1], env, free), _from_db(d[2], env, free))


def _shift(d, by: int, cutoff: int = 0):
    tag = d[0]
    if tag == "v":
        return ("v", d[1] + by) if d[1] >= cutoff else d
    if tag == "f":
        return d
    if tag == "l":
        return ("l", d[1], _shift(d[2], by, cutoff + 1))
    return ("a", _shift(d[1], by, cutoff), _shift(d[2], by, cutoff))


def _subst(d, value, depth: int = 0):
    tag = d[0]
    if tag == "v":
        if d[1] == depth:
            return _shift(value, depth)
        return ("v", d[1] - 1) if d[1] > depth else d
    if tag == "f":
        return d
    if tag == "l":
        return ("l", d[1], _subst(d[2], value, depth + 1))
    return ("a", _subst(d[1], value, depth), _subst(d[2], value, depth))


def _step(d):
    """Contract the leftmost-outermost redex; None if ``d`` is normal."""
    tag = d[0]
    if tag == "a":
        fn = d[1]
        if fn[0] == "l":
            return _subst(fn[2], d[2])
        reduced = _step(fn)
        if reduced is not None:
            return ("a", reduced, d[2])
        reduced = _step(d[2])
        return None if reduced is None else ("a", fn, reduced)
    if tag == "l":
        reduced = _step(d[2])
        return None if reduced is None else ("l", d[1], reduced)
    return None


def beta_normalize(t: LambdaTerm, fuel: int = 100000) -> LambdaTerm:
    """Normal-order beta reduction; raises :class:`FuelExhausted` after ``fuel`` steps."""
    if fuel < 1:
        raise ValueError("fuel must be positive")
    free = frozenset(free_variables(t))
    d = _to_db(t)
    for _ in range(fuel):
        nxt = _step(d)
        if nxt is None:
            return _from_db(d, (), free)
        d = nxt
    if _step(d) is None:
        return _from_db(d, (), free)
    raise FuelExhausted(_from_db(d, (), free), fuel)


def _strip(d):
    tag = d[0]
    if tag == "l":
        return ("l", _strip(d[2]))
    if tag == "a":
        return ("a", _strip(d[1]), _strip(d[2]))
    return d


def alpha_eq(a: LambdaTerm, b: LambdaTerm) -> bool:
    return _strip(_to_db(a)) == _strip(_to_db(b))
