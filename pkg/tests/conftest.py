import itertools

import pytest


def all_vectors(T, top):
    return itertools.product(range(top + 1), repeat=T)


@pytest.fixture
def tmp_files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write
