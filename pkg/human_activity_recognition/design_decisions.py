"""
Registry of the interpretation choices the pipeline makes where the published method is silent
or ambiguous. Every report carries the full registry in its provenance block.
"""
from dataclasses import dataclass
from typing import Dict, List


@dataclass(frozen=True)
class DesignDecision:
    key: str
    module: str
    text: str


DESIGN_DECISIONS: List[DesignDecision] = [
    DesignDecision("smoothing_after_windowing", "preprocess",
                   "Moving-average smoothing is applied per segment after windowing, so no smoothing crosses segment boundaries."),
    DesignDecision("normalization_fit", "preprocess",
                   "Per-channel min-max statistics are fitted on the training split only and applied to every split, clipped to [0, 1]."),
    DesignDecision("segment_stratified_leakage", "preprocess",
                   "The default segment-stratified split lets overlapping windows of one recording land in different splits; the by_user split avoids this."),
    DesignDecision("wisdm_record_count", "dataset",
                   "WISDM v1.1 segmented with S=150 and 70% overlap yields far more segments than the 7,498 records stated for DS1; both counts are reported."),
    DesignDecision("cwt_scales", "features",
                   "The scalogram uses integer scales 1..50 of a Morlet wavelet with center frequency 6 and |W| magnitudes."),
    DesignDecision("classical_hyperparameters", "models",
                   "Unstated classical hyperparameters are fixed: CART trees unlimited depth, AdaBoost 50 SAMME stumps, gradient boosting 100 rounds of depth-3 trees with shrinkage 0.1, MLP hidden layers 128 and 64."),
    DesignDecision("linear_standardization", "models",
                   "SVM, softmax regression and the MLP standardize statistical features with training-split means and deviations; the other classical models use them as is."),
    DesignDecision("transformer_internals", "models",
                   "Transformer width 64, feed-forward width 128, learned positional embeddings, post-norm layers and mean pooling over time."),
    DesignDecision("resnet_block", "models",
                   "A residual block is two 3x3 convolutions plus a skip connection, projected by a strided 1x1 convolution when the shape changes; stages of 16, 32, 64 and 128 channels."),
    DesignDecision("lstm_attention_variant", "models",
                   "LSTM-Attention pools all output steps of its second LSTM layer with additive attention."),
    DesignDecision("mrnet_stand_in", "models",
                   "MRNet is a stand-in of the named sub-network families: LSTM(64) on temporal, a 64-unit dense layer on statistical and two stride-2 convolutions (16, 32) on spectral features."),
    DesignDecision("cnn1d_pooling", "models",
                   "CNN1D max-pools by 2 after its two convolutions and flattens before the head."),
    DesignDecision("iterations_as_epochs", "training",
                   "Training iterations are read as epochs: 50 cross-entropy epochs and 10 pretraining epochs."),
    DesignDecision("supcon_denominator", "training",
                   "Supervised contrastive loss uses the canonical denominator over all other batch items with class-balanced batches."),
    DesignDecision("triplet_margin", "training",
                   "Triplet loss uses Euclidean distance on unnormalized embeddings with margin 1.0."),
    DesignDecision("no_projection_head", "training",
                   "Pretraining uses the 128-unit penultimate layer directly; embeddings are L2-normalized for the contrastive loss only."),
    DesignDecision("end_to_end_finetuning", "training",
                   "After pretraining the whole network, encoder included, is trained with cross-entropy."),
    DesignDecision("batch_size", "training",
                   "Mini-batches hold 64 segments."),
    DesignDecision("validation_selection", "harness",
                   "The model snapshot with the best validation accuracy is kept; the test split is scored once per model."),
    DesignDecision("fraction_tables", "harness",
                   "Tables print accuracies as fractions in [0, 1]."),
    DesignDecision("seed_sweeps", "harness",
                   "Repeated seeds are summarized as mean and half-range."),
]

DESIGN_DECISIONS_BY_KEY: Dict[str, DesignDecision] = {decision.key: decision for decision in DESIGN_DECISIONS}


def provenance_block() -> List[dict]:
    return [{"key": decision.key, "module": decision.module, "text": decision.text} for decision in DESIGN_DECISIONS]


def check_provenance(report: dict) -> List[str]:
    """
    Keys of registered decisions whose text does not appear verbatim in the report's provenance block.
    An empty list means the report is complete.
    """
    recorded = {entry.get("key"): entry.get("text") for entry in report.get("provenance", [])}

    return [decision.key for decision in DESIGN_DECISIONS if recorded.get(decision.key) != decision.text]
