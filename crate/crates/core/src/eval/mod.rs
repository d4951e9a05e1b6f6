//! Downstream evaluation: classifier, clustering, agreement scores and the
//! streaming experiment protocol.

pub mod experiment;
pub mod kmeans;
pub mod logreg;
pub mod metrics;

pub use experiment::{
    evaluate_run, run_retrain_baseline, run_streaming_experiment, stream_embedding, EvalReport,
    ExperimentConfig, LabeledDataset, SplitProtocol, StreamingRun, KMEANS_REPEATS,
};
pub use kmeans::{kmeans, KMeansRun};
pub use logreg::{train_logreg_ovr, BinaryModel, OvrClassifier};
pub use metrics::{completeness, f1_scores, nmi};
