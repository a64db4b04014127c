from __future__ import annotations

from dataclasses import dataclass, field

CSV_HEADER = "src,dst,protocol,recovery,cost,hops,dead_ends,delivered"


@dataclass
class RouteTrace:
    source: int
    target: int
    path: list[int] = field(default_factory=list)
    cost: float = 0.0
    # indices into ``path`` where greedy forwarding got stuck
    dead_end_positions: list[int] = field(default_factory=list)
    delivered: bool = False
    # one entry per hop: "greedy", "recovery" or "hbr"
    modes: list[str] = field(default_factory=list)
    protocol: str = ""
    recovery: str = ""

    @property
    def hops(self) -> int:
        return max(len(self.path) - 1, 0)

    @property
    def dead_ends(self) -> list[int]:
        return [self.path[i] for i in self.dead_end_positions]

    @property
    def hit_dead_end(self) -> bool:
        return bool(self.dead_end_positions)

    def csv_row(self) -> str:
        return (
            f"{self.source},{self.target},{self.protocol},{self.recovery or '-'},"
            f"{self.cost:.6f},{self.hops},{len(self.dead_end_positions)},{int(self.delivered)}"
        )
