"""Assigning events to object clusters and cutting per-cluster sub-logs.

Two assignment rules are supported. *existence* gives an event to every
cluster holding at least one of its clustered-type objects, so events that
straddle clusters are duplicated. *all* gives an event to a cluster only if
the cluster holds every clustered-type object of the event; straddling
events then belong to no cluster and are reported as orphans.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Literal

from .clustering import Clustering
from .ocel import OCEL, UnknownObjectTypeError

__all__ = ["Approach", "SubLogBundle", "existence_events", "all_events", "existence_sublog", "all_sublog", "build_bundle"]

Approach = Literal["existence", "all"]


def _check_cluster(cluster: Collection[str]) -> frozenset[str]:
    if not cluster:
        raise ValueError("cluster must contain at least one object")
    return frozenset(cluster)


def existence_events(log: OCEL, cluster: Collection[str]) -> list[str]:
    members = _check_cluster(cluster)
    return [eid for eid, ev in log.events.items() if ev.omap & members]


def all_events(log: OCEL, cluster: Collection[str], otype: str) -> list[str]:
    """Events whose ``otype`` objects, of which there is at least one, all lie in ``cluster``.

    Objects of other types in the event do not matter.
    """
    members = _check_cluster(cluster)
    if otype not in log.object_types:
        raise UnknownObjectTypeError(otype, log.object_types)
    out = []
    for eid, ev in log.events.items():
        typed = {o for o in ev.omap if log.objects[o].otype == otype}
        if typed and typed <= members:
            out.append(eid)
    return out


def existence_sublog(log: OCEL, cluster: Collection[str]) -> OCEL:
    return log.restrict(existence_events(log, cluster))


def all_sublog(log: OCEL, cluster: Collection[str], otype: str) -> OCEL:
    return log.restrict(all_events(log, cluster, otype))


@dataclass(frozen=True)
class SubLogBundle:
    approach: str
    otype: str
    clusters: tuple[tuple[str, ...], ...]
    sublogs: tuple[OCEL, ...]
    orphan_events: tuple[str, ...] = ()

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.clusters]


def build_bundle(log: OCEL, clustering: Clustering, approach: Approach) -> SubLogBundle:
    clustering.check()
    otype = clustering.otype
    if approach == "existence":
        sublogs = tuple(existence_sublog(log, c) for c in clustering.clusters)
        orphans: tuple[str, ...] = ()
    elif approach == "all":
        sublogs = tuple(all_sublog(log, c, otype) for c in clustering.clusters)
        assigned = set().union(*(s.events for s in sublogs))
        orphans = tuple(
            eid
            for eid, ev in log.events.items()
            if eid not in assigned and any(log.objects[o].otype == otype for o in ev.omap)
        )
    else:
        raise ValueError(f"unknown approach {approach!r}; expected 'existence' or 'all'")
    return SubLogBundle(approach, otype, clustering.clusters, sublogs, orphans)
