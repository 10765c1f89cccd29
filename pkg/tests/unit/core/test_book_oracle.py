import dataclasses

from hypothesis import given, settings, strategies as st

from cda_abm.core.book import OrderBook
from cda_abm.core.types import Order, Side
from cda_abm.validation.reference import ReferenceMatcher, random_order_stream


def test_random_stream_matches_reference():
    book, oracle = OrderBook(), ReferenceMatcher()
    book_log, oracle_log = [], []
    for order in random_order_stream(seed=11, count=10_000):
        assert book.expire_orders(order.placed_at) == oracle.expire(order.placed_at)
        oracle_log.extend(oracle.submit_limit(dataclasses.replace(order)))
        book_log.extend(book.submit_limit(dataclasses.replace(order)))
        assert book.best_bid() == oracle.best_bid()
        assert book.best_ask() == oracle.best_ask()

    assert book_log == oracle_log
    assert len(book_log) > 0
    assert len(book) == len(oracle)


_event = st.tuples(
    st.sampled_from([Side.BUY, Side.SELL]),
    st.integers(95, 105),   # price
    st.integers(1, 3),      # size
    st.integers(1, 20),     # lifetime
    st.booleans(),          # marketable
)


@settings(max_examples=150, deadline=None)
@given(st.lists(_event, max_size=120))
def test_arbitrary_streams_match_reference(events):
    book, oracle = OrderBook(), ReferenceMatcher()
    for t, (side, price, size, life, marketable) in enumerate(events):
        assert book.expire_orders(t) == oracle.expire(t)
        owner = t % 5
        if marketable:
            got = book.submit_marketable(side, size, owner, t)
            want = oracle.submit_marketable(side, size, owner, t)
        else:
            order = Order(id=t + 1, side=side, price=price, size=size, owner=owner, placed_at=t, expires_at=t + life)
            want = oracle.submit_limit(dataclasses.replace(order))
            got = book.submit_limit(order)
        assert got == want
        assert (book.best_bid(), book.best_ask()) == (oracle.best_bid(), oracle.best_ask())
        assert len(book) == len(oracle)
        bid, ask = book.best_bid(), book.best_ask()
        assert bid is None or ask is None or bid < ask
