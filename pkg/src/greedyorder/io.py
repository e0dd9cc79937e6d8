"""Canonical JSON documents for graphs, orders, covers, and results.

Writers always emit the canonical form: keys sorted, two-space indent,
edges sorted lexicographically, one trailing newline.  Readers accept
any schema-valid document and normalize, so write(read(x)) is the
identity on canonical files.  Shape problems raise SchemaError naming
the file and field; semantic problems (say, an edge list that is not a
valid graph) surface through the usual construction errors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Optional, Sequence

from .adversary import DEFAULT_BUDGET, AdversaryResult
from .analysis import BadSetReport, ExponentReport, IterativeTrace, MonteCarloSummary, SafetyResult
from .certify import CONSTRUCTIONS, BoundCertificate
from .core import BipartiteGraph, Permutation
from .errors import SchemaError
from .families import FAMILIES, FamilySpec
from .spoil import PathCover

__all__ = [
    "AdversarySettings",
    "ExperimentConfig",
    "canonical_dumps",
    "graph_to_doc",
    "graph_from_doc",
    "write_graph",
    "read_graph",
    "perm_to_doc",
    "perm_from_doc",
    "write_perm",
    "read_perm",
    "read_config",
    "cover_to_doc",
    "certificate_to_doc",
    "adversary_result_to_doc",
    "exponent_report_to_doc",
    "badset_report_to_doc",
    "safety_result_to_doc",
    "monte_carlo_to_doc",
    "iterative_trace_to_doc",
    "write_doc",
]


def canonical_dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_doc(path: str, doc: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(doc))


def _load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError("%s:%d:%d: %s" % (path, exc.lineno, exc.colno, exc.msg)) from exc
    except OSError as exc:
        raise SchemaError("%s: %s" % (path, exc.strerror or exc)) from exc


def _fail(where: str, message: str) -> SchemaError:
    return SchemaError("%s: %s" % (where, message))


def _get_int(doc: Mapping[str, Any], key: str, where: str) -> int:
    value = doc.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise _fail(where, "field %r must be an integer, got %r" % (key, value))
    return value


def _pair_list(value: Any, n: int, key: str, where: str) -> list[tuple[int, int]]:
    if not isinstance(value, list):
        raise _fail(where, "field %r must be a list of [u, v] pairs" % key)
    out = []
    for idx, item in enumerate(value):
        if (
            not isinstance(item, (list, tuple))
            or len(item) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in item)
        ):
            raise _fail(where, "field %r entry %d is not an [u, v] integer pair" % (key, idx))
        u, v = item
        if not (0 <= u < n and 0 <= v < n):
            raise _fail(where, "field %r entry %d out of range for n=%d" % (key, idx, n))
        out.append((u, v))
    return out


# --- graphs ---------------------------------------------------------------


def graph_to_doc(
    g: BipartiteGraph, matching: Optional[Sequence[tuple[int, int]]] = None
) -> dict:
    doc: dict[str, Any] = {"n": g.n, "edges": [[u, v] for u, v in g.edges]}
    if matching is not None:
        doc["matching"] = [[u, v] for u, v in sorted(matching)]
    if g.family is not None:
        doc["family"] = g.family
    if g.params:
        doc["params"] = json.loads(json.dumps(g.params))
    return doc


def graph_from_doc(
    doc: Any, where: str = "graph"
) -> tuple[BipartiteGraph, Optional[list[tuple[int, int]]]]:
    if not isinstance(doc, dict):
        raise _fail(where, "document must be an object")
    n = _get_int(doc, "n", where)
    if n < 1:
        raise _fail(where, "field 'n' must be positive")
    edges = _pair_list(doc.get("edges"), n, "edges", where)
    family = doc.get("family")
    if family is not None and not isinstance(family, str):
        raise _fail(where, "field 'family' must be a string")
    params = doc.get("params")
    if params is not None and not isinstance(params, dict):
        raise _fail(where, "field 'params' must be an object")
    matching = None
    if "matching" in doc:
        matching = _pair_list(doc["matching"], n, "matching", where)
        if sorted(u for u, _ in matching) != list(range(n)) or sorted(
            v for _, v in matching
        ) != list(range(n)):
            raise _fail(where, "field 'matching' is not a perfect matching on both sides")
    g = BipartiteGraph.from_edges(n, sorted(edges), family=family, params=params)
    return g, matching


def write_graph(
    path: str, g: BipartiteGraph, matching: Optional[Sequence[tuple[int, int]]] = None
) -> None:
    write_doc(path, graph_to_doc(g, matching))


def read_graph(path: str) -> tuple[BipartiteGraph, Optional[list[tuple[int, int]]]]:
    return graph_from_doc(_load_json(path), where=path)


# --- permutations ---------------------------------------------------------


def perm_to_doc(p: Permutation) -> list[int]:
    return list(p.order)


def perm_from_doc(doc: Any, n: Optional[int] = None, where: str = "permutation") -> Permutation:
    if not isinstance(doc, list) or not all(
        isinstance(x, int) and not isinstance(x, bool) for x in doc
    ):
        raise _fail(where, "document must be a list of vertex indices")
    if sorted(doc) != list(range(len(doc))):
        raise _fail(where, "indices must be a permutation of 0..%d" % (len(doc) - 1))
    if n is not None and len(doc) != n:
        raise _fail(where, "expected %d entries, got %d" % (n, len(doc)))
    return Permutation.from_order(doc)


def write_perm(path: str, p: Permutation) -> None:
    write_doc(path, perm_to_doc(p))


def read_perm(path: str, n: Optional[int] = None) -> Permutation:
    return perm_from_doc(_load_json(path), n=n, where=path)


# --- experiment configuration ----------------------------------------------


@dataclass(frozen=True)
class AdversarySettings:
    """How experiment rows attack a certified order.

    mode "exact" searches to optimality within the node budget;
    "heuristic" runs the local search for iters iterations; "sampled"
    takes the minimum over `trials` random arrival orders.
    """

    mode: str = "exact"
    budget: int = DEFAULT_BUDGET
    iters: int = 4000


@dataclass(frozen=True)
class ExperimentConfig:
    instances: tuple[FamilySpec, ...]
    methods: tuple[str, ...]
    adversary: AdversarySettings = field(default_factory=AdversarySettings)
    trials: int = 100
    seed: int = 0
    output_path: Optional[str] = None


def _spec_from_doc(doc: Any, idx: int, default_seed: int, where: str) -> FamilySpec:
    slot = "instances[%d]" % idx
    if not isinstance(doc, dict):
        raise _fail(where, "%s must be an object" % slot)
    family = doc.get("family")
    if family not in FAMILIES:
        raise _fail(where, "%s: unknown family %r" % (slot, family))
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise _fail(where, "%s: field 'params' must be an object" % slot)
    seed = doc.get("seed", default_seed * 1_000_003 + idx)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise _fail(where, "%s: field 'seed' must be an integer" % slot)
    return FamilySpec(family=family, params=params, seed=seed)


def config_from_doc(doc: Any, where: str = "config") -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise _fail(where, "document must be an object")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise _fail(where, "field 'seed' must be an integer")
    raw_instances = doc.get("instances")
    if not isinstance(raw_instances, list):
        raise _fail(where, "field 'instances' must be a list")
    instances = tuple(
        _spec_from_doc(item, i, seed, where) for i, item in enumerate(raw_instances)
    )
    raw_methods = doc.get("methods")
    if not isinstance(raw_methods, list) or not raw_methods:
        raise _fail(where, "field 'methods' must be a non-empty list")
    for m in raw_methods:
        if m not in CONSTRUCTIONS:
            raise _fail(where, "unknown method %r" % (m,))
    adv_doc = doc.get("adversary", {})
    if not isinstance(adv_doc, dict):
        raise _fail(where, "field 'adversary' must be an object")
    mode = adv_doc.get("mode", "exact")
    if mode not in ("exact", "heuristic", "sampled"):
        raise _fail(where, "unknown adversary mode %r" % (mode,))
    budget = adv_doc.get("budget", DEFAULT_BUDGET)
    iters = adv_doc.get("iters", 4000)
    for label, value in (("budget", budget), ("iters", iters)):
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise _fail(where, "adversary field %r must be a positive integer" % label)
    trials = doc.get("trials", 100)
    if not isinstance(trials, int) or isinstance(trials, bool) or trials < 1:
        raise _fail(where, "field 'trials' must be a positive integer")
    output_path = doc.get("output_path")
    if output_path is not None and not isinstance(output_path, str):
        raise _fail(where, "field 'output_path' must be a string")
    return ExperimentConfig(
        instances=instances,
        methods=tuple(raw_methods),
        adversary=AdversarySettings(mode=mode, budget=budget, iters=iters),
        trials=trials,
        seed=seed,
        output_path=output_path,
    )


def read_config(path: str) -> ExperimentConfig:
    return config_from_doc(_load_json(path), where=path)


# --- result documents -------------------------------------------------------


def _frac(x: Fraction) -> str:
    return "%d/%d" % (x.numerator, x.denominator)


def cover_to_doc(cover: PathCover) -> dict:
    return {"paths": [list(p) for p in cover.paths]}


def certificate_to_doc(cert: BoundCertificate) -> dict:
    return {
        "construction": cert.construction,
        "guaranteed_count": cert.guaranteed_count,
        "fraction": _frac(cert.guaranteed_fraction),
        "eps": {
            "e1": _frac(cert.eps.eps1),
            "e2": _frac(cert.eps.eps2),
            "e3": _frac(cert.eps.eps3),
        },
        "pi": list(cert.pi.order),
    }


def adversary_result_to_doc(res: AdversaryResult) -> dict:
    return {
        "sigma": list(res.sigma.order),
        "size": res.size,
        "exact": res.exact,
        "nodes_expanded": res.nodes_expanded,
    }


def exponent_report_to_doc(report: ExponentReport) -> dict:
    p = report.params
    return {
        "params": {"eps": _frac(p.eps), "alpha": _frac(p.alpha), "beta": _frac(p.beta)},
        "badset_exp": report.badset_exp,
        "order_exp": report.order_exp,
        "expansion_exp_literal": report.expansion_exp_literal,
        "expansion_exp_rescaled": report.expansion_exp_rescaled,
        "combined_order": report.combined_order,
        "combined_expansion": report.combined_expansion,
        "flags": list(report.flags),
    }


def safety_result_to_doc(res: SafetyResult) -> dict:
    return {
        "safe": res.safe,
        "witness": None if res.witness is None else list(res.witness.order),
    }


def badset_report_to_doc(report: BadSetReport) -> dict:
    return {
        "set_size": report.set_size,
        "search_mode": report.search_mode,
        "bad_sets": [list(s) for s in report.bad_sets],
        "witnesses": {
            ",".join(map(str, s)): {"pi": list(pi.order), "sigma": list(sigma.order)}
            for s, (pi, sigma) in report.witnesses.items()
        },
    }


def monte_carlo_to_doc(summary: MonteCarloSummary) -> dict:
    return {
        "trials": summary.trials,
        "mean_size": summary.mean_size,
        "min_size": summary.min_size,
        "mean_fraction": summary.mean_fraction,
        "min_fraction": summary.min_fraction,
        "stddev_fraction": summary.stddev_fraction,
        "upper_bound_only": summary.upper_bound_only,
    }


def iterative_trace_to_doc(trace: IterativeTrace) -> dict:
    return {
        "iterations_used": trace.iterations_used,
        "cap_reached": trace.cap_reached,
        "records": [
            {
                "pi": list(r.pi.order),
                "sigma": list(r.sigma.order),
                "size": r.size,
                "losers": list(r.losers),
            }
            for r in trace.records
        ],
    }
