"""Shared fixtures: the demo project in fresh temp directories."""

from __future__ import annotations

import pytest

from elicit.fixtures import (
    build_demo_session,
    demo_cases,
    demo_network,
    demo_schema,
    demo_templates,
    write_demo_project,
)


@pytest.fixture(scope="session")
def schema():
    return demo_schema()


@pytest.fixture(scope="session")
def templates():
    return demo_templates()


@pytest.fixture(scope="session")
def plan(schema, templates):
    from elicit.plan import build_plan

    return build_plan(schema, templates)


@pytest.fixture(scope="session")
def network():
    return demo_network()


@pytest.fixture(scope="session")
def cases(network):
    return demo_cases(network)


@pytest.fixture()
def session():
    s = build_demo_session()
    yield s
    s.close()


@pytest.fixture(scope="session")
def project_dir(tmp_path_factory):
    """Demo project files written once per test run."""
    directory = tmp_path_factory.mktemp("project")
    write_demo_project(directory)
    return directory
