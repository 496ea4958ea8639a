import pytest

from magedge import DEFAULT_H_LIST, DiskTemplate, default_table, disk_spectrum


@pytest.fixture(scope="session")
def mu1_table():
    """Shared band table on [-6, 6]; expensive, built once per session."""
    return default_table()


@pytest.fixture(scope="session")
def disk_template():
    return DiskTemplate(R=1.0, b=1.0)


@pytest.fixture(scope="session")
def disk_sweep_bh(disk_template):
    """Disk spectra below b*h for the default h list, shared by criteria."""
    return {h: disk_spectrum(disk_template.at(h), threshold=disk_template.b * h)
            for h in DEFAULT_H_LIST}
