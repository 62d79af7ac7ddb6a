"""Boolean function descriptions and query-counted oracle access.

A :class:`FunctionSpec` is an immutable tree.  Leaves are builtin functions
(constant, dictator, parity, majority, threshold, dnf, truth table) and
internal nodes combine them (or, truncate, permute).  Specs compile to a
scalar evaluator for oracle sessions and to a numpy evaluator for whole
truth tables.

Text form
---------
The canonical text form is compact JSON with sorted keys::

    {"n":20,"root":{"kind":"threshold","t":10}}

Node kinds and their fields:

    constant    value: 0|1
    dictator    i: coordinate
    parity
    majority    (1 iff level > n/2)
    threshold   t: 1 iff level > t
    dnf         clauses: list of coordinate lists
    table       hex: 2^n bits, point index order, packed little-endian
    or          children: list of nodes
    truncate    t, child: forced to 1 when level > t
    permute     sigma: permutation of range(n), child: evaluates child(y)
                with y_i = x_sigma[i]

``.fn`` fixture files hold one spec; lines starting with ``#`` are
comments and an optional ``family: {...}`` line carries lower-bound family
metadata.
"""
from __future__ import annotations

import json
import math
import random
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from . import hypercube as hc

MAX_TABLE_N = 30


class SpecError(ValueError):
    """Malformed function description.  ``where`` locates the problem."""

    def __init__(self, where: str, reason: str):
        super().__init__(f"{where}: {reason}")
        self.where = where
        self.reason = reason


class DimensionError(ValueError):
    pass


# -- node types ----------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    value: int


@dataclass(frozen=True)
class Dictator:
    i: int


@dataclass(frozen=True)
class Parity:
    pass


@dataclass(frozen=True)
class Majority:
    pass


@dataclass(frozen=True)
class Threshold:
    t: int


@dataclass(frozen=True)
class Dnf:
    clauses: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Table:
    bits: bytes  # one byte per point, values 0/1

    def __repr__(self):
        return f"Table(<{len(self.bits)} points>)"


@dataclass(frozen=True)
class Or:
    children: tuple


@dataclass(frozen=True)
class Truncate:
    t: int
    child: object


@dataclass(frozen=True)
class Permute:
    sigma: tuple[int, ...]
    child: object


Node = Union[Constant, Dictator, Parity, Majority, Threshold, Dnf, Table, Or, Truncate, Permute]


@dataclass(frozen=True)
class FunctionSpec:
    n: int
    root: Node
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise SpecError("n", f"dimension must be >= 1, got {self.n}")
        _validate(self.root, self.n, "root")

    def to_text(self) -> str:
        return serialize(self)

    @property
    def monotone_by_construction(self) -> bool:
        return _monotone_node(self.root)


def _validate(node, n: int, where: str) -> None:
    if isinstance(node, Constant):
        if node.value not in (0, 1):
            raise SpecError(where, f"constant must be 0 or 1, got {node.value}")
    elif isinstance(node, Dictator):
        if not 0 <= node.i < n:
            raise SpecError(where, f"dictator coordinate {node.i} outside [0, {n})")
    elif isinstance(node, (Parity, Majority)):
        pass
    elif isinstance(node, (Threshold, Truncate)):
        if not isinstance(node.t, int):
            raise SpecError(where, "threshold must be an integer")
        if isinstance(node, Truncate):
            _validate(node.child, n, where + ".child")
    elif isinstance(node, Dnf):
        for k, c in enumerate(node.clauses):
            if len(set(c)) != len(c):
                raise SpecError(f"{where}.clauses[{k}]", "repeated coordinate in clause")
            if any(not 0 <= i < n for i in c):
                raise SpecError(f"{where}.clauses[{k}]", f"coordinate outside [0, {n})")
    elif isinstance(node, Table):
        if len(node.bits) != 1 << n:
            raise SpecError(where, f"table has {len(node.bits)} entries, expected {1 << n}")
    elif isinstance(node, Or):
        for k, c in enumerate(node.children):
            _validate(c, n, f"{where}.children[{k}]")
    elif isinstance(node, Permute):
        if sorted(node.sigma) != list(range(n)):
            raise SpecError(where, "sigma is not a permutation of range(n)")
        _validate(node.child, n, where + ".child")
    else:
        raise SpecError(where, f"unknown node {node!r}")


def _monotone_node(node) -> bool:
    if isinstance(node, (Constant, Dictator, Majority, Threshold, Dnf)):
        return True
    if isinstance(node, Or):
        return all(_monotone_node(c) for c in node.children)
    if isinstance(node, (Truncate, Permute)):
        return _monotone_node(node.child)
    return False  # parity, or a table we have not checked


# -- constructors ----------------------------------------------------------

def constant(n: int, value: int) -> FunctionSpec:
    return FunctionSpec(n, Constant(int(value)), name=f"const{value}")


def dictator(n: int, i: int = 0) -> FunctionSpec:
    return FunctionSpec(n, Dictator(i), name=f"dict{i}")


def parity(n: int) -> FunctionSpec:
    return FunctionSpec(n, Parity(), name="parity")


def majority(n: int) -> FunctionSpec:
    return FunctionSpec(n, Majority(), name="maj")


def threshold(n: int, t: int) -> FunctionSpec:
    return FunctionSpec(n, Threshold(t), name=f"thr{t}")


def dnf(n: int, clauses: Sequence[Sequence[int]]) -> FunctionSpec:
    return FunctionSpec(n, Dnf(tuple(tuple(sorted(c)) for c in clauses)), name="dnf")


def table(n: int, bits) -> FunctionSpec:
    arr = np.asarray(bits, dtype=np.uint8)
    return FunctionSpec(n, Table(arr.tobytes()), name="table")


def or_(*specs: FunctionSpec) -> FunctionSpec:
    n = specs[0].n
    if any(s.n != n for s in specs):
        raise DimensionError("or of specs with different dimensions")
    return FunctionSpec(n, Or(tuple(s.root for s in specs)), name="or")


def truncate(spec: FunctionSpec, t: int) -> FunctionSpec:
    return FunctionSpec(spec.n, Truncate(t, spec.root), name=f"trunc{t}")


def permute(spec: FunctionSpec, sigma: Sequence[int]) -> FunctionSpec:
    return FunctionSpec(spec.n, Permute(tuple(sigma), spec.root), name="perm")


def random_permutation(n: int, rng: random.Random) -> tuple[int, ...]:
    s = list(range(n))
    rng.shuffle(s)
    return tuple(s)


def binomial_tail(n: int, t: int) -> float:
    """Pr[level(x) > t] for uniform x, exact up to float rounding."""
    return sum(math.comb(n, l) for l in range(max(t + 1, 0), n + 1)) / 2 ** n


def f0_threshold(n: int, C1: float) -> int:
    """Smallest integer t > n/2 with Pr[level > t] <= n^-C1."""
    target = n ** (-C1)
    t = n // 2 + 1
    while t <= n:
        if binomial_tail(n, t) <= target:
            return t
        t += 1
    raise ValueError(f"no threshold above n/2 reaches tail n^-{C1} for n={n}")


def make_f0(n: int, C1: float) -> FunctionSpec:
    return FunctionSpec(n, Threshold(f0_threshold(n, C1)), name="f0")


def make_random_dnf(n: int, num_clauses: int, clause_width: int,
                    rng: random.Random) -> FunctionSpec:
    if not 0 <= clause_width <= n:
        raise ValueError("clause_width must be in [0, n]")
    clauses = [tuple(sorted(rng.sample(range(n), clause_width))) for _ in range(num_clauses)]
    return FunctionSpec(n, Dnf(tuple(clauses)), name="dnf")


def paper_shape(n: int, C2: float) -> tuple[int, int]:
    """(num_clauses, clause_width) = (ceil(2^sqrt(n) / n^C2), ceil(sqrt(n)))."""
    if n > 36:
        raise ValueError("preset DNF shape is only materializable for n <= 36")
    r = math.sqrt(n)
    return math.ceil(2 ** r / n ** C2), math.ceil(r)


# -- scalar evaluation -------------------------------------------------------

def compile_spec(spec: FunctionSpec) -> Callable[[int], int]:
    """Return a fast ``point -> bit`` evaluator (no dimension checks)."""
    return _compile(spec.root, spec.n)


def _compile(node, n: int) -> Callable[[int], int]:
    if isinstance(node, Constant):
        v = node.value
        return lambda x: v
    if isinstance(node, Dictator):
        i = node.i
        return lambda x: (x >> i) & 1
    if isinstance(node, Parity):
        return lambda x: x.bit_count() & 1
    if isinstance(node, Majority):
        half = n / 2
        return lambda x: int(x.bit_count() > half)
    if isinstance(node, Threshold):
        t = node.t
        return lambda x: int(x.bit_count() > t)
    if isinstance(node, Dnf):
        masks = tuple(sum(1 << i for i in c) for c in node.clauses)

        def f(x):
            for m in masks:
                if x & m == m:
                    return 1
            return 0
        return f
    if isinstance(node, Table):
        bits = node.bits
        return lambda x: bits[x]
    if isinstance(node, Or):
        kids = tuple(_compile(c, n) for c in node.children)

        def f(x):
            for g in kids:
                if g(x):
                    return 1
            return 0
        return f
    if isinstance(node, Truncate):
        t = node.t
        g = _compile(node.child, n)
        return lambda x: 1 if x.bit_count() > t else g(x)
    if isinstance(node, Permute):
        g = _compile(node.child, n)
        pairs = tuple(enumerate(node.sigma))

        def f(x):
            y = 0
            for i, s in pairs:
                if (x >> s) & 1:
                    y |= 1 << i
            return g(y)
        return f
    raise SpecError("node", f"cannot compile {node!r}")


# -- vectorized evaluation -------------------------------------------------

def evaluate_batch(spec: FunctionSpec, xs: np.ndarray) -> np.ndarray:
    """Evaluate on an array of point indices; returns uint8 0/1."""
    xs = np.asarray(xs, dtype=np.uint64)
    return _batch(spec.root, spec.n, xs)


def _batch(node, n: int, xs: np.ndarray) -> np.ndarray:
    if isinstance(node, Constant):
        return np.full(xs.shape, node.value, dtype=np.uint8)
    if isinstance(node, Dictator):
        return ((xs >> np.uint64(node.i)) & np.uint64(1)).astype(np.uint8)
    if isinstance(node, Parity):
        return (np.bitwise_count(xs) & 1).astype(np.uint8)
    if isinstance(node, Majority):
        return (np.bitwise_count(xs) * 2 > n).astype(np.uint8)
    if isinstance(node, Threshold):
        return (np.bitwise_count(xs).astype(np.int64) > node.t).astype(np.uint8)
    if isinstance(node, Dnf):
        out = np.zeros(xs.shape, dtype=bool)
        for c in node.clauses:
            m = np.uint64(sum(1 << i for i in c))
            out |= (xs & m) == m
        return out.astype(np.uint8)
    if isinstance(node, Table):
        tab = np.frombuffer(node.bits, dtype=np.uint8)
        return tab[xs.astype(np.int64)]
    if isinstance(node, Or):
        out = np.zeros(xs.shape, dtype=np.uint8)
        for c in node.children:
            out |= _batch(c, n, xs)
        return out
    if isinstance(node, Truncate):
        hi = np.bitwise_count(xs).astype(np.int64) > node.t
        return np.where(hi, np.uint8(1), _batch(node.child, n, xs)).astype(np.uint8)
    if isinstance(node, Permute):
        ys = np.zeros_like(xs)
        for i, s in enumerate(node.sigma):
            ys |= ((xs >> np.uint64(s)) & np.uint64(1)) << np.uint64(i)
        return _batch(node.child, n, ys)
    raise SpecError("node", f"cannot evaluate {node!r}")


def truth_table(spec: FunctionSpec) -> np.ndarray:
    """All 2^n values, indexed by the point's integer encoding."""
    if spec.n > MAX_TABLE_N:
        raise DimensionError(f"n={spec.n} exceeds the truth-table ceiling {MAX_TABLE_N}")
    if isinstance(spec.root, Table):
        return np.frombuffer(spec.root.bits, dtype=np.uint8).copy()
    out = np.empty(1 << spec.n, dtype=np.uint8)
    chunk = 1 << 20
    for lo in range(0, 1 << spec.n, chunk):
        xs = np.arange(lo, min(lo + chunk, 1 << spec.n), dtype=np.uint64)
        out[lo:lo + len(xs)] = evaluate_batch(spec, xs)
    return out


def table_is_monotone(tab: np.ndarray, n: int) -> bool:
    for i in range(n):
        v = tab.reshape(-1, 2, 1 << i)
        if np.any(v[:, 0, :] > v[:, 1, :]):
            return False
    return True


def monotonicity_check(spec: FunctionSpec) -> bool:
    """Exhaustive scan of all n 2^(n-1) edges."""
    if spec.n > 20:
        raise DimensionError("exhaustive monotonicity check is limited to n <= 20")
    return table_is_monotone(truth_table(spec), spec.n)


# -- oracle sessions -------------------------------------------------------

class OracleSession:
    """Query-counted access to a function.

    Thread-safe: the counter and the memo table are guarded by one lock, so
    counts stay exact when several threads share a session.  With
    ``memoize=False`` every call costs one query; with ``memoize=True`` only
    distinct points cost.
    """

    def __init__(self, spec: FunctionSpec, memoize: bool = False):
        self.spec = spec
        self.n = spec.n
        self.memoize = memoize
        self.query_count = 0
        self._f = compile_spec(spec)
        self._memo: dict[int, int] = {}
        self._lock = threading.Lock()

    def __call__(self, x) -> int:
        return self.evaluate(x)

    def evaluate(self, x) -> int:
        if not isinstance(x, (int, np.integer)):
            if len(x) != self.n:
                raise DimensionError(f"point has {len(x)} coordinates, function has {self.n}")
            x = hc.from_bits(x)
        x = int(x)
        if x < 0 or x >> self.n:
            raise DimensionError(f"point {x:#x} does not fit in {self.n} coordinates")
        return self._query(x)

    def _query(self, x: int) -> int:
        # unchecked fast path used by the estimators
        if self.memoize:
            with self._lock:
                v = self._memo.get(x)
                if v is None:
                    v = self._memo[x] = self._f(x)
                    self.query_count += 1
                return v
        with self._lock:
            self.query_count += 1
        return self._f(x)

    def reset(self) -> None:
        with self._lock:
            self.query_count = 0
            self._memo.clear()


# -- serialization ---------------------------------------------------------

def _node_to_obj(node) -> dict:
    if isinstance(node, Constant):
        return {"kind": "constant", "value": node.value}
    if isinstance(node, Dictator):
        return {"kind": "dictator", "i": node.i}
    if isinstance(node, Parity):
        return {"kind": "parity"}
    if isinstance(node, Majority):
        return {"kind": "majority"}
    if isinstance(node, Threshold):
        return {"kind": "threshold", "t": node.t}
    if isinstance(node, Dnf):
        return {"kind": "dnf", "clauses": [list(c) for c in node.clauses]}
    if isinstance(node, Table):
        packed = np.packbits(np.frombuffer(node.bits, dtype=np.uint8), bitorder="little")
        return {"kind": "table", "hex": packed.tobytes().hex()}
    if isinstance(node, Or):
        return {"kind": "or", "children": [_node_to_obj(c) for c in node.children]}
    if isinstance(node, Truncate):
        return {"kind": "truncate", "t": node.t, "child": _node_to_obj(node.child)}
    if isinstance(node, Permute):
        return {"kind": "permute", "sigma": list(node.sigma), "child": _node_to_obj(node.child)}
    raise SpecError("node", f"cannot serialize {node!r}")


def to_obj(spec: FunctionSpec) -> dict:
    return {"n": spec.n, "root": _node_to_obj(spec.root)}


def serialize(spec: FunctionSpec) -> str:
    return json.dumps(to_obj(spec), sort_keys=True, separators=(",", ":"))


_FIELDS = {
    "constant": {"value"}, "dictator": {"i"}, "parity": set(), "majority": set(),
    "threshold": {"t"}, "dnf": {"clauses"}, "table": {"hex"}, "or": {"children"},
    "truncate": {"t", "child"}, "permute": {"sigma", "child"},
}


def _int(v, where):
    if isinstance(v, bool) or not isinstance(v, int):
        raise SpecError(where, f"expected integer, got {v!r}")
    return v


def _obj_to_node(obj, n: int, where: str):
    if not isinstance(obj, dict):
        raise SpecError(where, "node must be an object")
    kind = obj.get("kind")
    if kind not in _FIELDS:
        raise SpecError(where, f"unknown node kind {kind!r}")
    extra = set(obj) - _FIELDS[kind] - {"kind"}
    missing = _FIELDS[kind] - set(obj)
    if extra:
        raise SpecError(where, f"unexpected field(s) {sorted(extra)} for {kind}")
    if missing:
        raise SpecError(where, f"missing field(s) {sorted(missing)} for {kind}")
    if kind == "constant":
        return Constant(_int(obj["value"], where + ".value"))
    if kind == "dictator":
        return Dictator(_int(obj["i"], where + ".i"))
    if kind == "parity":
        return Parity()
    if kind == "majority":
        return Majority()
    if kind == "threshold":
        return Threshold(_int(obj["t"], where + ".t"))
    if kind == "dnf":
        cl = obj["clauses"]
        if not isinstance(cl, list):
            raise SpecError(where + ".clauses", "expected a list")
        return Dnf(tuple(tuple(_int(i, f"{where}.clauses[{k}]") for i in c)
                         for k, c in enumerate(cl)))
    if kind == "table":
        try:
            raw = bytes.fromhex(obj["hex"])
        except (TypeError, ValueError) as e:
            raise SpecError(where + ".hex", f"bad hex: {e}") from None
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        if len(bits) < 1 << n:
            raise SpecError(where + ".hex", f"table too short for n={n}")
        return Table(bits[: 1 << n].astype(np.uint8).tobytes())
    if kind == "or":
        ch = obj["children"]
        if not isinstance(ch, list):
            raise SpecError(where + ".children", "expected a list")
        return Or(tuple(_obj_to_node(c, n, f"{where}.children[{k}]") for k, c in enumerate(ch)))
    if kind == "truncate":
        return Truncate(_int(obj["t"], where + ".t"), _obj_to_node(obj["child"], n, where + ".child"))
    sigma = obj["sigma"]
    if not isinstance(sigma, list):
        raise SpecError(where + ".sigma", "expected a list")
    return Permute(tuple(_int(i, where + ".sigma") for i in sigma),
                   _obj_to_node(obj["child"], n, where + ".child"))


def from_obj(obj) -> FunctionSpec:
    if not isinstance(obj, dict):
        raise SpecError("$", "spec must be an object")
    if set(obj) != {"n", "root"}:
        raise SpecError("$", f"expected fields ['n', 'root'], got {sorted(obj)}")
    n = _int(obj["n"], "n")
    if n < 1:
        raise SpecError("n", "dimension must be >= 1")
    return FunctionSpec(n, _obj_to_node(obj["root"], n, "root"))


def deserialize(text: str) -> FunctionSpec:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"line {e.lineno} column {e.colno}", e.msg) from None
    return from_obj(obj)


def parse_fn_file(text: str) -> tuple[FunctionSpec, dict | None]:
    """Parse ``.fn`` text: comments, optional ``family:`` header, then the spec."""
    family = None
    body = []
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("#"):
            body.append("")
            continue
        if s.startswith("family:"):
            try:
                family = json.loads(s[len("family:"):])
            except json.JSONDecodeError as e:
                raise SpecError("family header", e.msg) from None
            body.append("")
            continue
        body.append(line)
    return deserialize("\n".join(body)), family


def format_fn_file(spec: FunctionSpec, family: dict | None = None) -> str:
    lines = []
    if family is not None:
        lines.append("family: " + json.dumps(family, sort_keys=True, separators=(",", ":")))
    lines.append(serialize(spec))
    return "\n".join(lines) + "\n"
