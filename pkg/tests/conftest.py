import numpy as np
import pytest

from htg_eval.data_model import DatasetManifest, FeatureMatrix, SampleEntry, VocabTag


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_manifest():
    return DatasetManifest(
        "unit",
        [
            SampleEntry("s0", "move", 0, vocab_tag=VocabTag.IV),
            SampleEntry("s1", "the", 0, vocab_tag=VocabTag.IV),
            SampleEntry("s2", "sabotage", 1, vocab_tag=VocabTag.OOV),
            SampleEntry("s3", "word", 1, vocab_tag=VocabTag.IV),
        ],
    )


def feature_matrix(rng, n, d, prefix="s"):
    return FeatureMatrix([f"{prefix}{i}" for i in range(n)], rng.normal(size=(n, d)))


@pytest.fixture
def make_features(rng):
    def _make(n, d, prefix="s"):
        return feature_matrix(rng, n, d, prefix)

    return _make
