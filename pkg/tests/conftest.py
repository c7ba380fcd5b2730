import logging
import random

import pytest

from fuzztree.benchgen import random_fault_tree
from fuzztree.ft_model import FaultTreeBuilder, NodeKind


PUMP_TEXT = """\
// pump and two redundant valves
toplevel "System";
"System" and "Pump" "Valves";
"Valves" or "V1" "V2";
"Pump" prob=0.8;
"V1" prob=0.1;
"V2" prob=0.4;
"""


############ Fault trees
@pytest.fixture
def pump_tree():
    """System = AND(u, OR(v, w)); basic events u, v, w in that order"""
    b = FaultTreeBuilder()
    b.add_basic_event('u')
    b.add_basic_event('v')
    b.add_basic_event('w')
    b.add_gate('Valves', NodeKind.OR, ['v', 'w'])
    b.add_gate('System', NodeKind.AND, ['u', 'Valves'])
    return b.build('System')


@pytest.fixture
def pump_probs():
    return (0.8, 0.1, 0.4)


@pytest.fixture
def pump_text():
    return PUMP_TEXT


@pytest.fixture
def shared_dag():
    """OR(AND(a, b), AND(b, c)) with b shared"""
    b = FaultTreeBuilder()
    for name in ('a', 'b', 'c'):
        b.add_basic_event(name)
    b.add_gate('G1', NodeKind.AND, ['a', 'b'])
    b.add_gate('G2', NodeKind.AND, ['b', 'c'])
    b.add_gate('Top', NodeKind.OR, ['G1', 'G2'])
    return b.build('Top')


@pytest.fixture
def random_trees():
    """Factory: `count` seeded random fault trees with 1..max_events basic events"""
    def make(count, max_events=12, sharing=0.0, seed=0):
        rng = random.Random(seed)
        return [random_fault_tree(rng, rng.randint(1, max_events), sharing) for _ in range(count)]
    return make


@pytest.fixture(autouse=True)
def reset_package_logger():
    """main() installs its own handler; give caplog the propagating logger back"""
    yield
    logger = logging.getLogger("fuzztree")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.propagate = True
    logger.setLevel(logging.NOTSET)
