"""Signatures, structural functions, valuations and single-model interventions.

Valuations are stored as tuples of range indices aligned with the signature's
canonical variable order (exogenous variables first, then endogenous ones, in
declaration order).  All value names cross into index space at the boundary.
"""

from __future__ import annotations

import itertools
import json
from typing import Iterable, Mapping, Optional, Sequence

from .errors import BudgetExceededError, ModelValidationError
from .syntax import And, Assignment, Atom, Formula, Intervene, or_list

Valuation = tuple[int, ...]


class Signature:
    """Named variables split exogenous/endogenous with finite value ranges."""

    def __init__(
        self,
        exogenous: Sequence[str],
        endogenous: Sequence[str],
        ranges: Mapping[str, Sequence[str]],
        observables: Iterable[str] = (),
    ):
        self.exogenous = tuple(exogenous)
        self.endogenous = tuple(endogenous)
        if set(self.exogenous) & set(self.endogenous):
            raise ModelValidationError("exogenous and endogenous sets must be disjoint")
        self.order = self.exogenous + self.endogenous
        if len(set(self.order)) != len(self.order):
            raise ModelValidationError("duplicate variable name")
        self.ranges: dict[str, tuple[str, ...]] = {}
        for var in self.order:
            if var not in ranges:
                raise ModelValidationError(f"missing range for variable {var!r}")
            rng = tuple(str(v) for v in ranges[var])
            if not rng:
                raise ModelValidationError(f"empty range for variable {var!r}")
            if len(set(rng)) != len(rng):
                raise ModelValidationError(f"duplicate value in range of {var!r}")
            self.ranges[var] = rng
        self.positions: dict[str, int] = {v: i for i, v in enumerate(self.order)}
        self.value_index: dict[str, dict[str, int]] = {
            var: {val: i for i, val in enumerate(self.ranges[var])} for var in self.order
        }
        obs = tuple(str(o) for o in observables)
        for o in obs:
            if o not in self.positions:
                raise ModelValidationError(f"observable {o!r} is not a variable")
        if len(set(obs)) != len(obs):
            raise ModelValidationError("duplicate observable")
        self.observables = tuple(sorted(obs, key=self.positions.__getitem__))
        self._key = (self.exogenous, self.endogenous,
                     tuple(self.ranges[v] for v in self.order), self.observables)

    def __eq__(self, other) -> bool:
        return isinstance(other, Signature) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"Signature(exo={self.exogenous}, endo={self.endogenous})"

    def is_exogenous(self, var: str) -> bool:
        return self.positions[var] < len(self.exogenous)

    def without_observables(self) -> "Signature":
        return Signature(self.exogenous, self.endogenous, self.ranges, ())

    def with_observables(self, observables: Iterable[str]) -> "Signature":
        return Signature(self.exogenous, self.endogenous, self.ranges, observables)

    def sort_assignment(self, asg: Assignment) -> Assignment:
        return Assignment(tuple(sorted(asg.pairs, key=lambda p: self.positions[p[0]])))

    def assignment_indices(self, asg: Assignment) -> tuple[tuple[int, int], ...]:
        return tuple(
            (self.positions[var], self.value_index[var][val]) for var, val in asg.pairs
        )

    def valuation_of(self, mapping: Mapping[str, str]) -> Valuation:
        extra = set(mapping) - set(self.order)
        if extra:
            raise ModelValidationError(f"unknown variables in valuation: {sorted(extra)}")
        out = []
        for var in self.order:
            if var not in mapping:
                raise ModelValidationError(f"valuation misses variable {var!r}")
            val = str(mapping[var])
            if val not in self.value_index[var]:
                raise ModelValidationError(f"value {val!r} not in range of {var!r}")
            out.append(self.value_index[var][val])
        return tuple(out)

    def valuation_to_dict(self, valuation: Valuation) -> dict[str, str]:
        return {var: self.ranges[var][valuation[i]] for i, var in enumerate(self.order)}

    def all_exogenous_choices(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*(range(len(self.ranges[u])) for u in self.exogenous))


class FunctionSet:
    """One structural function per endogenous variable.

    A function is stored as a declared parent tuple (canonical order) plus a
    total lookup table from parent value-index tuples to a value index.  The
    function is constant in every undeclared variable, which recovers the
    all-other-variables domain without materializing it.
    """

    def __init__(
        self,
        signature: Signature,
        functions: Mapping[str, tuple[tuple[str, ...], Mapping[tuple[int, ...], int]]],
        *,
        _trusted: bool = False,
    ):
        self.signature = signature
        self.parents: dict[str, tuple[str, ...]] = {}
        self.tables: dict[str, dict[tuple[int, ...], int]] = {}
        if _trusted:
            for var in signature.endogenous:
                parents, table = functions[var]
                self.parents[var] = parents
                self.tables[var] = table  # shared, never mutated
        else:
            for var in signature.endogenous:
                if var not in functions:
                    raise ModelValidationError(f"missing structural function for {var!r}")
                parents, table = functions[var]
                parents = tuple(sorted(parents, key=signature.positions.__getitem__))
                if var in parents:
                    raise ModelValidationError(f"{var!r} cannot be its own parent")
                domain = list(
                    itertools.product(*(range(len(signature.ranges[p])) for p in parents))
                )
                missing = [key for key in domain if key not in table]
                if missing or len(table) != len(domain):
                    raise ModelValidationError(
                        f"table for {var!r} is not total over its parent domain"
                    )
                nvals = len(signature.ranges[var])
                if any(not (0 <= out < nvals) for out in table.values()):
                    raise ModelValidationError(f"table for {var!r} maps outside its range")
                self.parents[var] = parents
                self.tables[var] = dict(table)
            extra = set(functions) - set(signature.endogenous)
            if extra:
                raise ModelValidationError(
                    f"functions declared for non-endogenous: {sorted(extra)}"
                )
        self._parent_pos = {
            var: tuple(signature.positions[p] for p in self.parents[var])
            for var in signature.endogenous
        }
        self._key = tuple(
            (var, self.parents[var], tuple(sorted(self.tables[var].items())))
            for var in signature.endogenous
        )
        self._hash = hash(self._key)
        self._graph: Optional[CausalGraph] = None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FunctionSet)
            and self.signature == other.signature
            and self._key == other._key
        )

    def __hash__(self) -> int:
        return self._hash

    def apply(self, var: str, valuation: Valuation) -> int:
        key = tuple(valuation[p] for p in self._parent_pos[var])
        return self.tables[var][key]

    def complies(self, valuation: Valuation) -> bool:
        sig = self.signature
        return all(
            valuation[sig.positions[v]] == self.apply(v, valuation)
            for v in sig.endogenous
        )

    def graph(self) -> "CausalGraph":
        if self._graph is None:
            self._graph = causal_graph(self)
        return self._graph


class CausalGraph:
    """Semantic direct-cause edges over the signature plus their closure."""

    def __init__(self, signature: Signature, edges: Iterable[tuple[str, str]]):
        self.signature = signature
        self.edges = frozenset(edges)
        endo = set(signature.endogenous)
        for src, dst in self.edges:
            if dst not in endo:
                raise ModelValidationError(f"edge targets non-endogenous {dst!r}")
            if src not in signature.positions:
                raise ModelValidationError(f"edge from unknown variable {src!r}")
        adjacency: dict[str, set[str]] = {}
        for src, dst in self.edges:
            adjacency.setdefault(src, set()).add(dst)
        closure = set()
        for start in adjacency:
            stack = list(adjacency[start])
            seen: set[str] = set()
            while stack:
                node = stack.pop()
                if node in seen:
                    continue
                seen.add(node)
                closure.add((start, node))
                stack.extend(adjacency.get(node, ()))
        self.closure = frozenset(closure)
        self._topo: Optional[list[str]] = None

    def is_acyclic(self) -> bool:
        return all(v != w for v, w in self.closure)

    def closure_is_strict_partial_order(self) -> bool:
        irreflexive = all(v != w for v, w in self.closure)
        transitive = all(
            (a, d) in self.closure
            for (a, b) in self.closure
            for (c, d) in self.closure
            if b == c
        )
        return irreflexive and transitive

    def topological_endogenous(self) -> list[str]:
        """Endogenous variables ordered so every semantic parent precedes its child."""
        if self._topo is not None:
            return self._topo
        sig = self.signature
        incoming: dict[str, set[str]] = {v: set() for v in sig.endogenous}
        for src, dst in self.edges:
            incoming[dst].add(src)
        placed = set(sig.exogenous)
        order: list[str] = []
        pending = list(sig.endogenous)
        while pending:
            progress = False
            rest = []
            for v in pending:
                if incoming[v] <= placed:
                    order.append(v)
                    placed.add(v)
                    progress = True
                else:
                    rest.append(v)
            if not progress:
                raise ModelValidationError("cyclic structural dependencies")
            pending = rest
        self._topo = order
        return order


def direct_cause(functions: FunctionSet, x: str, v: str) -> bool:
    """True iff some setting of the other variables makes F_v react to x."""
    sig = functions.signature
    if v not in set(sig.endogenous):
        raise ModelValidationError(f"{v!r} is not endogenous")
    if x == v:
        raise ModelValidationError("a variable cannot directly cause itself")
    parents = functions.parents[v]
    if x not in parents:
        return False
    table = functions.tables[v]
    xi = parents.index(x)
    others = [range(len(sig.ranges[p])) for i, p in enumerate(parents) if i != xi]
    xvals = range(len(sig.ranges[x]))
    for rest in itertools.product(*others):
        seen = set()
        for xv in xvals:
            key = rest[:xi] + (xv,) + rest[xi:]
            seen.add(table[key])
            if len(seen) > 1:
                return True
    return False


def causal_graph(functions: FunctionSet) -> CausalGraph:
    sig = functions.signature
    edges = [
        (x, v)
        for v in sig.endogenous
        for x in sig.order
        if x != v and direct_cause(functions, x, v)
    ]
    return CausalGraph(sig, edges)


def is_recursive(functions: FunctionSet) -> bool:
    return functions.graph().is_acyclic()


def solve(functions: FunctionSet, exogenous_values: Mapping[str, str] | Valuation) -> Valuation:
    """The unique compliant valuation extending the given exogenous values."""
    sig = functions.signature
    graph = functions.graph()
    if not graph.is_acyclic():
        raise ModelValidationError("cannot solve a non-recursive function set")
    values: list[Optional[int]] = [None] * len(sig.order)
    if isinstance(exogenous_values, tuple):
        exo = exogenous_values
        if len(exo) != len(sig.exogenous):
            raise ModelValidationError("wrong number of exogenous values")
        for i, val in enumerate(exo):
            values[i] = val
    else:
        for u in sig.exogenous:
            if u not in exogenous_values:
                raise ModelValidationError(f"missing exogenous value for {u!r}")
            values[sig.positions[u]] = sig.value_index[u][str(exogenous_values[u])]
    return _solve_endogenous(functions, graph, values)


def _solve_endogenous(
    functions: FunctionSet, graph: CausalGraph, values: list[Optional[int]]
) -> Valuation:
    """Fill endogenous slots along a topological order.

    Declared parents that are not semantic parents are vacuous, so any value
    in their range yields the same lookup result; slot 0 is used when such a
    parent is not yet determined.
    """
    sig = functions.signature
    for v in graph.topological_endogenous():
        pos = sig.positions[v]
        if values[pos] is not None:
            continue
        key = []
        for p in functions.parents[v]:
            ppos = sig.positions[p]
            if (p, v) in graph.edges:
                key.append(values[ppos])
            else:
                key.append(values[ppos] if values[ppos] is not None else 0)
        values[pos] = functions.tables[v][tuple(key)]
    assert all(x is not None for x in values)
    return tuple(values)  # type: ignore[arg-type]


def intervened_functions(functions: FunctionSet, asg: Assignment) -> FunctionSet:
    """Replace the functions of intervened endogenous variables by constants."""
    sig = functions.signature
    new = {}
    forced = {var: val for var, val in asg.pairs}
    for v in sig.endogenous:
        if v in forced:
            out = sig.value_index[v][forced[v]]
            new[v] = ((), {(): out})
        else:
            new[v] = (functions.parents[v], functions.tables[v])
    return FunctionSet(sig, new, _trusted=True)


def apply_intervention(
    new_functions: FunctionSet,
    graph: CausalGraph,
    valuation: Valuation,
    idx_pairs: tuple[tuple[int, int], ...],
) -> Valuation:
    """Intervened valuation given the already-intervened function set; lets
    team updates reuse one function set across all members."""
    sig = new_functions.signature
    values: list[Optional[int]] = [None] * len(sig.order)
    forced_pos = {pos for pos, _ in idx_pairs}
    for pos, val in idx_pairs:
        values[pos] = val
    for i, _ in enumerate(sig.exogenous):
        if i not in forced_pos:
            values[i] = valuation[i]
    return _solve_endogenous(new_functions, graph, values)


def intervene_causal(
    functions: FunctionSet, valuation: Valuation, asg: Assignment
) -> tuple[FunctionSet, Valuation]:
    """Def-of-intervention on a single causal model: (F, A) to (F_asg, A^F_asg)."""
    sig = functions.signature
    new_functions = intervened_functions(functions, asg)
    graph = new_functions.graph()
    pairs = sig.assignment_indices(asg)
    return new_functions, apply_intervention(new_functions, graph, valuation, pairs)


# ---------------------------------------------------------------------------
# the syntactic direct-cause formula


def direct_cause_formula(
    signature: Signature, x: str, v: str, max_nodes: int = 200_000
) -> Formula:
    """The disjunction expressing that x directly causally affects v.

    Disjuncts are enumerated in lexicographic order of (z-vector, x1, x2,
    v1, v2) over declared range order; each is a conjunction of two boxed
    atoms that force v to react to x under a full setting of the other
    variables.
    """
    if v not in set(signature.endogenous):
        raise ModelValidationError(f"{v!r} is not endogenous")
    if x == v:
        raise ModelValidationError("direct-cause formula needs two distinct variables")
    zvars = [w for w in signature.order if w not in (x, v)]
    xr = signature.ranges[x]
    vr = signature.ranges[v]
    n_z = 1
    for z in zvars:
        n_z *= len(signature.ranges[z])
    n_disjuncts = n_z * len(xr) * (len(xr) - 1) * len(vr) * (len(vr) - 1)
    if n_disjuncts == 0:
        raise ModelValidationError(
            f"direct-cause formula needs at least two values for {x!r} and {v!r}"
        )
    approx_nodes = n_disjuncts * (len(zvars) * 2 + 8)
    if approx_nodes > max_nodes:
        raise BudgetExceededError(
            f"direct-cause disjunction needs about {approx_nodes} nodes (cap {max_nodes})"
        )
    disjuncts = []
    for zvals in itertools.product(*(signature.ranges[z] for z in zvars)):
        zpairs = tuple(zip(zvars, zvals))
        for x1, x2 in itertools.product(xr, xr):
            if x1 == x2:
                continue
            for v1, v2 in itertools.product(vr, vr):
                if v1 == v2:
                    continue
                left = Intervene(
                    signature.sort_assignment(Assignment(zpairs + ((x, x1),))), Atom(v, v1)
                )
                right = Intervene(
                    signature.sort_assignment(Assignment(zpairs + ((x, x2),))), Atom(v, v2)
                )
                disjuncts.append(And(left, right))
    return or_list(disjuncts)


# ---------------------------------------------------------------------------
# model documents (JSON-compatible structured text)


def load_model_document(doc: dict):
    """Build (signature, functions, team, actual) from a model document.

    Validates ranges, table totality, compliance of every team member,
    duplicates, actual membership and observable-constancy (when observables
    are declared).  ``"team": "all"`` expands to one solved valuation per
    exogenous combination.
    """
    from .epistemic import EpistemicModel, PointedModel

    if not isinstance(doc, dict):
        raise ModelValidationError("model document must be an object")
    for key in ("exogenous", "endogenous"):
        if key not in doc or not isinstance(doc[key], list):
            raise ModelValidationError(f"model document needs a {key!r} list")
    exo_names = [str(e["name"]) for e in doc["exogenous"]]
    endo_names = [str(e["name"]) for e in doc["endogenous"]]
    ranges = {}
    for entry in doc["exogenous"] + doc["endogenous"]:
        if "range" not in entry:
            raise ModelValidationError(f"variable {entry.get('name')!r} has no range")
        ranges[str(entry["name"])] = [str(v) for v in entry["range"]]
    signature = Signature(exo_names, endo_names, ranges, doc.get("observables", ()))

    functions = {}
    for entry in doc["endogenous"]:
        name = str(entry["name"])
        parents = [str(p) for p in entry.get("parents", [])]
        for p in parents:
            if p not in signature.positions:
                raise ModelValidationError(f"unknown parent {p!r} of {name!r}")
        table: dict[tuple[int, ...], int] = {}
        parents_sorted = tuple(sorted(parents, key=signature.positions.__getitem__))
        for row in entry.get("table", []):
            cond = {str(k): str(v) for k, v in row.get("if", {}).items()}
            if set(cond) != set(parents):
                raise ModelValidationError(
                    f"table row for {name!r} must assign exactly its parents"
                )
            key = tuple(signature.value_index[p][cond[p]] for p in parents_sorted)
            if key in table:
                raise ModelValidationError(f"duplicate table row for {name!r}")
            out = str(row["then"])
            if out not in signature.value_index[name]:
                raise ModelValidationError(f"value {out!r} not in range of {name!r}")
            table[key] = signature.value_index[name][out]
        functions[name] = (parents_sorted, table)
    function_set = FunctionSet(signature, functions)
    if not is_recursive(function_set):
        raise ModelValidationError("structural functions are not recursive")

    team_doc = doc.get("team", "all")
    if team_doc == "all":
        team = [solve(function_set, exo) for exo in signature.all_exogenous_choices()]
    else:
        team = []
        for entry in team_doc:
            member = signature.valuation_of(entry)
            if not function_set.complies(member):
                raise ModelValidationError(
                    f"team member {entry} does not comply with the structural functions"
                )
            if member in team:
                raise ModelValidationError(f"duplicate team member {entry}")
            team.append(member)
    model = EpistemicModel(signature, function_set, team)
    if signature.observables and not model.is_observable_constant():
        raise ModelValidationError("team members disagree on an observable")

    actual_doc = doc.get("actual")
    if actual_doc is None:
        actual = model.team[0]
    else:
        actual = signature.valuation_of(actual_doc)
        if actual not in model.team:
            raise ModelValidationError("actual valuation is not in the team")
    return PointedModel(model, actual)


def load_model_file(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ModelValidationError(f"model file is not valid JSON: {exc}") from exc
    return load_model_document(doc)


def dump_model_document(pointed) -> dict:
    """Serialize a pointed model back to the document format."""
    model = pointed.model
    sig = model.signature
    doc: dict = {
        "exogenous": [{"name": u, "range": list(sig.ranges[u])} for u in sig.exogenous],
        "endogenous": [],
        "observables": list(sig.observables),
        "team": [sig.valuation_to_dict(member) for member in model.team],
        "actual": sig.valuation_to_dict(pointed.actual),
    }
    for v in sig.endogenous:
        parents = model.functions.parents[v]
        rows = []
        for key in sorted(model.functions.tables[v]):
            rows.append(
                {
                    "if": {p: sig.ranges[p][key[i]] for i, p in enumerate(parents)},
                    "then": sig.ranges[v][model.functions.tables[v][key]],
                }
            )
        doc["endogenous"].append(
            {"name": v, "range": list(sig.ranges[v]), "parents": list(parents), "table": rows}
        )
    return doc


def graph_to_dot(functions: FunctionSet) -> str:
    """Semantic causal graph in DOT, deterministic node and edge order."""
    sig = functions.signature
    graph = functions.graph()
    lines = ["digraph causal {"]
    for var in sig.order:
        shape = "box" if sig.is_exogenous(var) else "ellipse"
        lines.append(f'  "{var}" [shape={shape}];')
    for src, dst in sorted(graph.edges, key=lambda e: (sig.positions[e[0]], sig.positions[e[1]])):
        lines.append(f'  "{src}" -> "{dst}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
