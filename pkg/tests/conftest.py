import pytest

from dycknf import classify_pairs, dyck_grammar_from_cfg, extend_grammar
from dycknf.pipeline import run_pipeline

from helpers import load


@pytest.fixture(scope="session")
def expr_cfg():
    return load("expr.cfg")


@pytest.fixture(scope="session")
def expr_dnf():
    return dyck_grammar_from_cfg(load("expr_dnf.cfg"))


@pytest.fixture(scope="session")
def lin():
    return dyck_grammar_from_cfg(load("lin.cfg"))


@pytest.fixture(scope="session")
def cf():
    return dyck_grammar_from_cfg(load("cf.cfg"))


@pytest.fixture(scope="session")
def lin_cls(lin):
    return classify_pairs(lin)


@pytest.fixture(scope="session")
def cf_cls(cf):
    return classify_pairs(cf)


@pytest.fixture(scope="session")
def lin_ext(lin):
    return extend_grammar(lin)


@pytest.fixture(scope="session")
def cf_ext(cf):
    return extend_grammar(cf)


@pytest.fixture(scope="session")
def lin_pipe(lin):
    return run_pipeline(lin)


@pytest.fixture(scope="session")
def cf_pipe(cf):
    return run_pipeline(cf)
