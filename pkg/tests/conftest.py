import warnings

import numpy as np
import pytest

from radial_inls.functionals import RadialGrid


@pytest.fixture(scope="session")
def grid():
    return RadialGrid(3000, 30.0)


@pytest.fixture(scope="session")
def box():
    return RadialGrid(3000, 30.0, far_field=False)


@pytest.fixture(autouse=True)
def _quiet_step_guard():
    # the default dt sits above h^2/2 on the reference grid; that warning is
    # exercised explicitly in test_evolution
    from radial_inls.errors import StepSizeWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StepSizeWarning)
        yield


def gaussian(grid, amp=1.0, width=1.0, phase=0.0):
    return grid.sample(lambda r: amp * np.exp(-((r / width) ** 2)) * np.exp(1j * phase * r * r))


# one verdict line per acceptance criterion, echoed in the terminal summary
CRITERIA: dict = {}


@pytest.fixture
def criterion():
    def record(key, ok, detail):
        line = f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}"
        CRITERIA[key] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA, key=lambda k: (int(str(k).split(".")[0]), str(k))):
        terminalreporter.write_line(CRITERIA[key])
