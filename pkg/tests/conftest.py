import numpy as np
import pytest

from qcoremap import bundled_profile, parse_program
from qcoremap.fabric import OpCost, QecProfile


@pytest.fixture(scope="session")
def steane():
    return bundled_profile("steane")


@pytest.fixture(scope="session")
def bacon_shor():
    return bundled_profile("bacon_shor")


@pytest.fixture
def uniform_profile():
    """All ops cost the same: keeps graph-shape tests independent of Table-1
    numbers."""
    rows = {k: OpCost(10, 10.0, True) for k in ("H", "S", "T", "Tdg", "X", "Y", "Z")}
    rows["CNOT"] = OpCost(10, 10.0, True)
    return QecProfile("uniform", 7, rows)


def single_kernel(text: str):
    """Parse text and return (program, its only kernel)."""
    program = parse_program(text)
    assert len(program.kernels) == 1
    return program, next(iter(program.kernels.values()))


def random_ops(rng: np.random.Generator, n_ops: int, n_qubits: int, p_cnot=0.35):
    """Random (kind, operand tuple) list over qubit indices."""
    kinds = ("H", "S", "T", "Tdg", "X", "Y", "Z")
    ops = []
    for _ in range(n_ops):
        if n_qubits >= 2 and rng.random() < p_cnot:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            ops.append(("CNOT", (int(a), int(b))))
        else:
            ops.append((kinds[rng.integers(len(kinds))], (int(rng.integers(n_qubits)),)))
    return ops


def ops_to_netlist(ops, n_qubits: int) -> str:
    lines = [f"qubit q{i}" for i in range(n_qubits)]
    for kind, qs in ops:
        lines.append(f"{kind} " + ",".join(f"q{q}" for q in qs))
    return "\n".join(lines) + "\n"
