import pytest

from parsonkit.model import builtin_corpus_dir, load_corpus


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(builtin_corpus_dir())


@pytest.fixture(scope="session")
def locate(corpus):
    return corpus["locate"]


@pytest.fixture(scope="session")
def middle(corpus):
    return corpus["middle"]


@pytest.fixture(scope="session")
def count_vowels(corpus):
    return corpus["count_vowels"]


@pytest.fixture(scope="session")
def twice(corpus):
    return corpus["twice"]
