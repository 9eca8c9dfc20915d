"""Object-centric directly-follows graphs and their complexity measures."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

from .ocel import OCEL, all_traces, flatten

__all__ = [
    "START",
    "END",
    "OCDFG",
    "discover_ocdfg",
    "typed_pairs",
    "model_size",
    "model_density",
    "size_improvement",
    "density_improvement",
    "fitness_proxy",
    "export_dot",
    "ModelRow",
    "model_row",
    "ComplexityReport",
    "complexity_report",
]

START = "▷"
END = "□"

TypedEdge = tuple[str, str, str]

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


@dataclass(frozen=True)
class OCDFG:
    activities: frozenset[str]
    object_types: frozenset[str]
    node_freq: dict[str, int] = field(default_factory=dict)
    edge_freq: dict[TypedEdge, int] = field(default_factory=dict)

    @property
    def edges(self) -> frozenset[TypedEdge]:
        return frozenset(self.edge_freq)

    @property
    def n_nodes(self) -> int:
        return len(self.activities)

    @property
    def n_edges(self) -> int:
        return len(self.edge_freq)


def _traces_by_type(log: OCEL) -> Iterator[tuple[str, tuple[str, ...]]]:
    for ot in sorted(log.object_types):
        for trace in all_traces(flatten(log, ot)).values():
            yield ot, trace.activities


def typed_pairs(log: OCEL, markers: bool = False) -> Iterator[TypedEdge]:
    """Every per-object directly-follows pair of ``log``, typed by object type."""
    for ot, acts in _traces_by_type(log):
        seq = (START, *acts, END) if markers else acts
        for a, b in zip(seq, seq[1:]):
            yield a, b, ot


def discover_ocdfg(log: OCEL) -> OCDFG:
    """Discover the OC-DFG of ``log``.

    Each object contributes its start and end marker edges and its
    consecutive activity pairs, typed by the object's type. An empty log
    yields an empty model.
    """
    node_freq = Counter(ev.activity for ev in log.events.values())
    edge_freq = Counter(typed_pairs(log, markers=True))
    return OCDFG(
        activities=frozenset(node_freq),
        object_types=frozenset(log.object_types),
        node_freq=dict(sorted(node_freq.items())),
        edge_freq=dict(sorted(edge_freq.items())),
    )


def model_size(m: OCDFG) -> int:
    return m.n_nodes * m.n_edges


def model_density(m: OCDFG) -> float:
    """Typed edges per activity node."""
    if m.n_nodes == 0:
        raise ValueError("density is undefined for a model without activities")
    return m.n_edges / m.n_nodes


def _weighted_mean(pairs: Sequence[tuple[int, float]]) -> float:
    if not pairs:
        raise ValueError("need at least one cluster")
    if any(count <= 0 for count, _ in pairs):
        raise ValueError("every cluster must contain at least one object")
    total = sum(count for count, _ in pairs)
    return sum(count * value for count, value in pairs) / total


def size_improvement(main: OCDFG, clusters: Sequence[tuple[int, OCDFG]]) -> float:
    """Main model size over the object-count-weighted mean cluster model size."""
    denom = _weighted_mean([(count, model_size(m)) for count, m in clusters])
    if denom == 0:
        raise ValueError("all cluster models are empty; size improvement undefined")
    return model_size(main) / denom


def density_improvement(main: OCDFG, clusters: Sequence[tuple[int, OCDFG]]) -> float:
    """Main model density over the object-count-weighted mean cluster density.

    A cluster whose sub-log has no events contributes density 0.
    """
    denom = _weighted_mean([(count, model_density(m) if m.n_nodes else 0.0) for count, m in clusters])
    if denom == 0:
        raise ValueError("all cluster models are empty; density improvement undefined")
    return model_density(main) / denom


def fitness_proxy(m: OCDFG, log: OCEL) -> float:
    """Share of ``log``'s per-object activity pairs whose typed edge is in ``m``.

    An edge-coverage stand-in for replay fitness. Marker edges are not
    counted; a log without any pair scores 1.0.
    """
    pairs = list(typed_pairs(log))
    if not pairs:
        return 1.0
    return sum(p in m.edge_freq for p in pairs) / len(pairs)


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(m: OCDFG, name: str = "ocdfg", comment: str | None = None) -> str:
    """Graphviz text of ``m``: one color per object type, edges labelled by frequency."""
    colors = {ot: PALETTE[i % len(PALETTE)] for i, ot in enumerate(sorted(m.object_types))}
    lines = []
    if comment:
        lines.append(f"// {comment}")
    lines.append(f"digraph {_q(name)} {{")
    lines.append("  rankdir=LR;")
    lines.append('  node [fontname="Helvetica"];')
    for a in sorted(m.activities):
        lines.append(f'  {_q("act:" + a)} [shape=box, style=rounded, label={_q(f"{a} ({m.node_freq.get(a, 0)})")}];')
    used_types = sorted({ot for _, _, ot in m.edge_freq})
    for ot in used_types:
        c = colors[ot]
        lines.append(f'  {_q("start:" + ot)} [shape=circle, style=filled, fillcolor="{c}", label={_q(ot)}];')
        lines.append(f'  {_q("end:" + ot)} [shape=doublecircle, style=filled, fillcolor="{c}", label=""];')
    for (src, tgt, ot), freq in sorted(m.edge_freq.items()):
        s = "start:" + ot if src == START else "act:" + src
        t = "end:" + ot if tgt == END else "act:" + tgt
        lines.append(f'  {_q(s)} -> {_q(t)} [color="{colors[ot]}", fontcolor="{colors[ot]}", label="{freq}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ModelRow:
    name: str
    n_objects: int
    n_events: int
    n_nodes: int
    n_edges: int
    fitness: float
    size: int
    density: float | None


def _fmt(x: float | None) -> str:
    return "-" if x is None else f"{x:.2f}"


def _or_none(fn, *args) -> float | None:
    try:
        return fn(*args)
    except ValueError:
        return None


@dataclass(frozen=True)
class ComplexityReport:
    main: ModelRow
    clusters: tuple[ModelRow, ...]
    avg_fitness: float
    csi: float | None
    cdi: float | None
    approach: str = ""
    otype: str = ""
    orphan_events: int = 0

    def to_json(self) -> dict[str, Any]:
        def row(r: ModelRow) -> dict[str, Any]:
            return dict(r.__dict__)

        return {
            "otype": self.otype,
            "approach": self.approach,
            "main": row(self.main),
            "clusters": [row(r) for r in self.clusters],
            "avg_fitness": self.avg_fitness,
            "csi": self.csi,
            "cdi": self.cdi,
            "orphan_events": self.orphan_events,
        }

    def to_text(self) -> str:
        """Aligned table; floats rendered to two decimals."""
        head = ["Model", "No. of Nodes", "No. of Edges", "Fitness", "Size", "Density", "Avg. Fitness", "CsI", "CdI"]

        blank = ["", "", ""]
        summary = [f"{self.avg_fitness:.2f}", _fmt(self.csi), _fmt(self.cdi)]

        def cells(r: ModelRow, extra: list[str]) -> list[str]:
            return [r.name, str(r.n_nodes), str(r.n_edges), f"{r.fitness:.2f}", str(r.size), _fmt(r.density), *extra]

        rows = [head, cells(self.main, blank)]
        rows += [cells(r, summary if i == 0 else blank) for i, r in enumerate(self.clusters)]
        widths = [max(len(row[i]) for row in rows) for i in range(len(head))]
        out = [" | ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
        out.insert(1, "-+-".join("-" * w for w in widths))
        if self.approach:
            out.append(f"approach: {self.approach}, object type: {self.otype}, orphan events: {self.orphan_events}")
        return "\n".join(out) + "\n"


def model_row(name: str, m: OCDFG, log: OCEL, n_objects: int) -> ModelRow:
    return ModelRow(
        name=name,
        n_objects=n_objects,
        n_events=len(log.events),
        n_nodes=m.n_nodes,
        n_edges=m.n_edges,
        fitness=fitness_proxy(m, log),
        size=model_size(m),
        density=model_density(m) if m.n_nodes else None,
    )


def complexity_report(
    main_log: OCEL,
    sublogs: Sequence[OCEL],
    cluster_sizes: Sequence[int],
    approach: str = "",
    otype: str = "",
    orphan_events: int = 0,
    main_model: OCDFG | None = None,
    models: Sequence[OCDFG] | None = None,
) -> ComplexityReport:
    """Compare each cluster's model against the main model.

    Fitness of every model is measured against the log it was discovered
    from; ``avg_fitness`` is the plain mean over cluster models. CsI and CdI
    are ``None`` when every cluster model is empty.

    With ``otype`` set, the main model is discovered from the events holding
    at least one ``otype`` object, since no other event can reach a cluster.
    """
    if not sublogs:
        raise ValueError("cannot report on an empty cluster list")
    if len(sublogs) != len(cluster_sizes):
        raise ValueError("one cluster size per sub-log is required")
    if otype:
        main_log = main_log.restrict(ev.id for ev in flatten(main_log, otype).events)
    main_model = main_model or discover_ocdfg(main_log)
    models = list(models) if models is not None else [discover_ocdfg(s) for s in sublogs]
    n_main = len(main_log.objects_of_type(otype)) if otype else len(main_log.objects)
    main_row = model_row("main", main_model, main_log, n_main)
    rows = tuple(model_row(f"cluster_{i}", m, s, n) for i, (m, s, n) in enumerate(zip(models, sublogs, cluster_sizes)))
    pairs = list(zip(cluster_sizes, models))
    return ComplexityReport(
        main=main_row,
        clusters=rows,
        avg_fitness=sum(r.fitness for r in rows) / len(rows),
        csi=_or_none(size_improvement, main_model, pairs),
        cdi=_or_none(density_improvement, main_model, pairs),
        approach=approach,
        otype=otype,
        orphan_events=orphan_events,
    )
