//! Prediction, metrics, reference learners and experiment protocols.

mod learners;
mod metrics;
mod protocols;

pub use learners::{
    argmax_columns, kmeans, predict_labels, softmax_classifier, softmax_loss_and_gradient,
    KMeansResult, SoftmaxConfig, Standardizer,
};
pub use metrics::{
    classification_metrics, clustering_metrics, ClassificationMetrics, ClusteringMetrics,
    ConfusionCounts,
};
pub use protocols::{
    compare_with_report, latent_vs_raw, noise_sweep, unlabeled_accuracy, Arm, ComparisonRow,
    ComparisonTable, EvalMode, EvalOptions, SweepRow, SweepSummary, SweepTable, KMEANS_RESTARTS,
};
