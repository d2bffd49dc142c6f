import pytest

from diffkit.monad import set_oracle_mode


@pytest.fixture(autouse=True)
def full_kleisli_oracle():
    # test builds always cross-check the closed-form Kleisli composition
    set_oracle_mode("full")
    yield
    set_oracle_mode("sampled")
