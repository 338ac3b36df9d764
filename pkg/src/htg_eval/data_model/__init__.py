"""Domain types, ingestion, lexicon partitioning, splits, and fixtures."""

from .fixtures import FixtureDataset, generate_fixture_dataset, write_fixture_dataset
from .htgf import (
    load_feature_matrix,
    load_layer_maps,
    load_logits,
    load_tensor,
    write_feature_matrix,
    write_htgf,
    write_logits,
)
from .images import load_image, save_gray_png
from .manifest import (
    load_id_list,
    load_manifest,
    load_style_predictions,
    load_transcriptions,
    make_style_split,
    partition_lexicon,
    save_id_list,
    save_manifest,
    save_style_predictions,
    save_transcriptions,
)
from .types import (
    DatasetManifest,
    FeatureMatrix,
    GrayImage,
    LayerFeatureMap,
    LayerFeatureMapSet,
    LogitMatrix,
    SampleEntry,
    StylePredictionRecord,
    TranscriptionRecord,
    VocabTag,
)

__all__ = [
    "DatasetManifest",
    "FeatureMatrix",
    "FixtureDataset",
    "GrayImage",
    "LayerFeatureMap",
    "LayerFeatureMapSet",
    "LogitMatrix",
    "SampleEntry",
    "StylePredictionRecord",
    "TranscriptionRecord",
    "VocabTag",
    "generate_fixture_dataset",
    "load_feature_matrix",
    "load_id_list",
    "load_image",
    "load_layer_maps",
    "load_logits",
    "load_manifest",
    "load_style_predictions",
    "load_tensor",
    "load_transcriptions",
    "make_style_split",
    "partition_lexicon",
    "save_gray_png",
    "save_id_list",
    "save_manifest",
    "save_style_predictions",
    "save_transcriptions",
    "write_feature_matrix",
    "write_fixture_dataset",
    "write_htgf",
    "write_logits",
]
