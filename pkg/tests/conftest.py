import numpy as np
import pytest

from ldpc_ids import ChannelConfig, build_graph, construct_regular, systematize, transmit


class SmallCode:
    def __init__(self, n, dv=3, dc=6, seed=1):
        self.h = construct_regular(n, dv, dc, seed=seed)
        self.gen, self.hp = systematize(self.h)
        self.graph = build_graph(self.hp)
        self.dense = self.hp.to_dense()
        self.n, self.k = self.gen.n, self.gen.k

    def noisy_llr(self, ebn0_db, rng, zero=False):
        from ldpc_ids import encode

        msg = np.zeros(self.k, dtype=np.uint8) if zero else rng.integers(0, 2, self.k, dtype=np.uint8)
        c = encode(self.gen, msg)
        rx = transmit(2.0 * c - 1.0, ChannelConfig(ebn0_db, self.k / self.n), seed=rng)
        return c, rx.llr


@pytest.fixture(scope="session")
def code48():
    return SmallCode(48)


@pytest.fixture(scope="session")
def code96():
    return SmallCode(96)


@pytest.fixture(scope="session")
def code512():
    return SmallCode(512)


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def report():
    """Record one acceptance verdict; the table is printed at session end."""

    def _report(criterion: int, ok: bool, detail: str) -> bool:
        _ACCEPTANCE[criterion] = (bool(ok), detail)
        print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[cid]
        terminalreporter.write_line(f"criterion {cid}: {'PASS' if ok else 'FAIL'}  {detail}")
