import pytest

from sales_assist import kb as kb_mod
from sales_assist.providers import MockDelays, MockLlmClient, ProviderConfig
from sales_assist.synth import generate_synthetic_dataset


@pytest.fixture(scope="session")
def canonical_dataset():
    return generate_synthetic_dataset(0)


@pytest.fixture(scope="session")
def seeded_kb(tmp_path_factory, canonical_dataset):
    """Canonical store (seed 0), shared read-only across the suite."""
    path = tmp_path_factory.mktemp("kb") / "canonical.db"
    handle = kb_mod.init_schema(path)
    handle.seed(canonical_dataset)
    yield handle
    handle.close()


@pytest.fixture
def fresh_kb(tmp_path):
    handle = kb_mod.init_schema(tmp_path / "fresh.db")
    yield handle
    handle.close()


@pytest.fixture
def mock_config():
    return ProviderConfig()


@pytest.fixture
def mock_llm():
    return MockLlmClient(MockDelays())
