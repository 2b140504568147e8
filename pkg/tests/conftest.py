"""Shared fixtures: one geometry and one map sequence for the default
parameters, built once per session since both are immutable."""

from __future__ import annotations

import pytest

from horseshoe import HenonParams, build_geometry, henon_sequence


@pytest.fixture(scope="session")
def geom():
    return build_geometry()


@pytest.fixture(scope="session")
def seq(geom):
    return geom.seq


@pytest.fixture(scope="session")
def params():
    return HenonParams()


@pytest.fixture()
def fresh_seq():
    """Sequence not shared with other tests, for mutation-free paranoia."""
    return henon_sequence()
