"""Shared fixtures: domains from the shipped configs and cached workspaces.

Workspace construction factorizes the boundary integral operators, which is
the expensive part of every test; session scope lets the whole suite reuse
one workspace per (domain, resolution).
"""

import json
from pathlib import Path

import pytest

import hejhal_lab as hl

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def load_config(name):
    return json.loads((CONFIG_DIR / f"{name}.json").read_text())


def load_domain(name):
    return hl.domain_from_config(load_config(name))


@pytest.fixture(scope="session")
def dom_disk():
    return load_domain("disk")


@pytest.fixture(scope="session")
def dom_annulus():
    return load_domain("annulus")


@pytest.fixture(scope="session")
def dom_blob3():
    return load_domain("blob3")


@pytest.fixture(scope="session")
def dom_sym3():
    return load_domain("sym3")


@pytest.fixture(scope="session")
def dom_fourconn():
    return load_domain("fourconn")


@pytest.fixture(scope="session")
def ws_disk(dom_disk):
    return hl.Workspace(dom_disk, N=128)


@pytest.fixture(scope="session")
def ws_annulus(dom_annulus):
    return hl.Workspace(dom_annulus, N=256)


@pytest.fixture(scope="session")
def ws_annulus_small(dom_annulus):
    return hl.Workspace(dom_annulus, N=64)


@pytest.fixture(scope="session")
def ws_blob3(dom_blob3):
    return hl.Workspace(dom_blob3, N=256)


@pytest.fixture(scope="session")
def ws_fourconn(dom_fourconn):
    return hl.Workspace(dom_fourconn, N=256)
