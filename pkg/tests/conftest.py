import pytest
import sys
import os

# Add src to sys.path for testing
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../src")))

from cda_abm.config.models import SimConfig
from cda_abm.core.book import OrderBook
from cda_abm.core.types import Order, Side


def make_order(oid, side, price, size=1, owner=0, placed_at=0, expires_at=None) -> Order:
    return Order(id=oid, side=side, price=price, size=size, owner=owner, placed_at=placed_at, expires_at=expires_at)


# Small enough to run in well under a second; the narrow spread and loud noise make
# orders cross soon after warm-up.
TINY = dict(n=20, t_e=2000, t_c=200, tau_max=100, ta=300, price_spread=100, sigma_eps=0.3)


@pytest.fixture
def make_config():
    def _make(**overrides) -> SimConfig:
        params = dict(TINY, seed=3)
        params.update(overrides)
        return SimConfig.from_profile("scaled", **params)
    return _make


@pytest.fixture
def tiny_config(make_config):
    return make_config()


@pytest.fixture
def book_with_asks():
    """Asks 10000x1 (owner 1) and 10002x1 (owner 2)."""
    book = OrderBook()
    book.submit_limit(make_order(1, Side.SELL, 10000, owner=1))
    book.submit_limit(make_order(2, Side.SELL, 10002, owner=2))
    return book
