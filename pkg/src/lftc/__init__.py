"""Parameter-free text classification from compression distances.

Per-class lists of dictionary compressors shortlist two candidate classes
by compressed size; normalized compression distance KNN over the candidate
classes' training texts makes the final call.
"""

from .compression import (
    CompressionError,
    DeflateBackend,
    DictCompressor,
    ReferenceLzBackend,
    SourceSpan,
    TrainedDictionary,
    UnsupportedBackendError,
    ZstdBackend,
    compressed_size,
    dict_compressed_size,
    make_backend,
    ncd,
    ref_compress_size,
    ref_entropy_coded_size,
    ref_longest_match,
    train_dictionary,
)
from .corpus import (
    Corpus,
    DatasetError,
    FewShotSpec,
    LabeledText,
    concat_class_text,
    few_shot_sample,
    load_csv,
    save_csv,
)
from .cr import (
    EmptyGoldError,
    GoldData,
    KnnConfig,
    NcdNeighbor,
    centralized_reason,
    extract_gold,
    knn_decide,
    ncd_distances,
)
from .mcc import (
    CandidatePair,
    ClassCompressorList,
    ClassScore,
    DegenerateCorpusError,
    SegmentPlan,
    build_all_lists,
    build_class_list,
    score_query,
    segment_count,
    select_candidates,
)
from .classifier import (
    Pipeline,
    PipelineConfig,
    Prediction,
    evaluate,
    evaluate_fewshot,
    predict_ablation_cr,
    predict_ablation_mcc,
    predict_baseline_ncd,
    predict_lftc,
)
from .report import EvalReport, confidence_interval

__version__ = "0.1.0"
