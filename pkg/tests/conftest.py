import math

import pytest

from railnoise import CrossSection, InterferometerSpec, Material, RailSpec, SuspensionSpec
from railnoise.config import load_config


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for report in terminalreporter.stats.get(outcome, []):
            if report.when != "call":
                continue
            for key, value in report.user_properties:
                if key == "criterion":
                    lines.append((value[0], f"criterion {value[0]:>2}: {outcome.upper():6} {value[1]}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def rail():
    """Aluminium rail of the lithium interferometer, as designed."""
    return RailSpec(Material(72.4e9, 2790.0), CrossSection(1.49e-2, 3.3e-5), 0.7)


@pytest.fixture(scope="session")
def tuned_rail(rail):
    return rail.with_first_bending_frequency(460.4)


@pytest.fixture(scope="session")
def tuned_suspension(tuned_rail):
    return SuspensionSpec.from_pendular(tuned_rail, 40.0, 16.0, mass_override=58.0)


@pytest.fixture(scope="session")
def interferometer():
    return InterferometerSpec(4 * math.pi / 671e-9, 0.605, 1065.0, optical_grating_wavevector=3.14e5)


@pytest.fixture(scope="session")
def noise_config():
    return load_config(profile="lithium_noise")


@pytest.fixture(scope="session")
def design_config():
    return load_config(profile="lithium")
