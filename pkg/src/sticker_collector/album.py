"""Problem instance and packet sampling models."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import Decimal


class PacketModel(enum.Enum):
    """How the ``n`` stickers inside one packet are drawn.

    ``DISTINCT``: each packet is a uniform ``n``-subset of the ``N`` types
    (no repeats inside a packet). ``IID``: ``n`` independent uniform draws
    with replacement, so a packet may repeat a sticker.
    """

    DISTINCT = "distinct"
    IID = "iid"

    @classmethod
    def parse(cls, value: "PacketModel | str") -> "PacketModel":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown packet model {value!r}; expected 'distinct' or 'iid'") from None


@dataclass(frozen=True)
class AlbumSpec:
    """An album of ``total_stickers`` types sold in packets of ``packet_size``."""

    total_stickers: int = 670
    packet_size: int = 5
    packet_price: Decimal = Decimal("4")

    def __post_init__(self):
        if isinstance(self.total_stickers, bool) or not isinstance(self.total_stickers, int):
            raise TypeError("total_stickers must be an int")
        if isinstance(self.packet_size, bool) or not isinstance(self.packet_size, int):
            raise TypeError("packet_size must be an int")
        if self.total_stickers < 1:
            raise ValueError("total_stickers must be >= 1")
        if not 1 <= self.packet_size <= self.total_stickers:
            raise ValueError("packet_size must satisfy 1 <= packet_size <= total_stickers")
        price = self.packet_price
        if not isinstance(price, Decimal):
            # str() keeps 4.1 as 4.1 rather than its binary expansion
            price = Decimal(str(price))
            object.__setattr__(self, "packet_price", price)
        if not price.is_finite() or price < 0:
            raise ValueError("packet_price must be a finite non-negative number")

    @property
    def min_packets(self) -> int:
        """Fewest packets that can possibly complete the album, ceil(N/n)."""
        return -(-self.total_stickers // self.packet_size)


PAPER_ALBUM = AlbumSpec(670, 5, Decimal("4"))
