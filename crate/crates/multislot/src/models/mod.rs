//! Slot-response models: feature extraction, the logistic predictor,
//! maximum-likelihood training, AUC evaluation, score combination, and
//! action-value label generation.

pub mod auc;
pub mod combine;
pub mod features;
pub mod labels;
pub mod response;
pub mod train;

pub use auc::compute_auc;
pub use combine::{combine_scores, CombinationConfig};
pub use features::{
    extract_features, CurrentSlotFeatures, FeatureConfig, FeatureGroup, FeatureSchema,
    InteractionFeatures, SlotContext, SprFeatures,
};
pub use labels::action_value_labels;
pub use response::ResponseModel;
pub use train::{train, TrainConfig, TrainReport};
