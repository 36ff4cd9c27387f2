import contextlib
import random

import hypothesis
import pytest

from zkcustody import crypto, relation
from zkcustody.field import P, genesis_id, hash1, random_nonce
from zkcustody.ledger import make_record
from zkcustody.relation import Witness

hypothesis.settings.register_profile("default", deadline=None, max_examples=100)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=10)
hypothesis.settings.load_profile("default")


@pytest.fixture(scope="session")
def circuit():
    return relation.build_relation()


@pytest.fixture(scope="session")
def keys(circuit):
    # seeded setup: test-grade trust only
    return relation.setup(circuit, random.Random(20240131))


@pytest.fixture(scope="session")
def pk(keys):
    return keys[0]


@pytest.fixture(scope="session")
def vk(keys):
    return keys[1]


@pytest.fixture(scope="session")
def other_vk(circuit):
    return relation.setup(circuit, random.Random(7))[1]


@pytest.fixture(scope="session")
def alice():
    return crypto.keygen(random.Random(1))


@pytest.fixture(scope="session")
def bob():
    return crypto.keygen(random.Random(2))


@pytest.fixture
def rng(request):
    return random.Random(request.node.name)


def new_record(pk, keys, p_id, p_nonce, rng=None):
    """Prove and sign one transition; returns (record, child nonce)."""
    nonce = random_nonce(rng)
    proof, io = relation.prove(pk, p_id, Witness(p_nonce, nonce), rng)
    return make_record(keys, proof, io), nonce


@pytest.fixture(scope="session")
def world(pk, alice, bob):
    """tree1 -> (log1, log2), tree2, plus an orphan whose parent is never registered."""
    r = random.Random(555)
    tree1, n_tree1 = new_record(pk, alice, genesis_id(), 0, r)
    log1, n_log1 = new_record(pk, bob, tree1.w_id, n_tree1, r)
    log2, n_log2 = new_record(pk, bob, tree1.w_id, n_tree1, r)
    tree2, n_tree2 = new_record(pk, alice, genesis_id(), 0, r)
    ghost = r.randrange(1, P)
    orphan, n_orphan = new_record(pk, bob, hash1(ghost), ghost, r)
    return {
        "records": {"tree1": tree1, "log1": log1, "log2": log2, "tree2": tree2, "orphan": orphan},
        "nonces": [n_tree1, n_log1, n_log2, n_tree2, n_orphan, ghost],
    }


@pytest.fixture(scope="session")
def prove_record(pk):
    def make(keys, p_id, p_nonce, rng=None):
        return new_record(pk, keys, p_id, p_nonce, rng)

    return make


_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


class _Verdict:
    detail = ""


@pytest.fixture
def criterion(request):
    """Context manager that prints one PASS/FAIL line for an acceptance criterion."""

    @contextlib.contextmanager
    def judge(number, title):
        verdict = _Verdict()
        try:
            yield verdict
        except BaseException as exc:
            line = f"criterion {number} ({title}): FAIL  {verdict.detail} {type(exc).__name__}: {exc}".rstrip()
            raise
        else:
            line = f"criterion {number} ({title}): PASS  {verdict.detail}".rstrip()
        finally:
            print(line.splitlines()[0])
            request.config.stash[_VERDICTS].append(line.splitlines()[0])

    return judge
