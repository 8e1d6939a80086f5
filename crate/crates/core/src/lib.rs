//! Tabular machine-learning toolkit for binary landslide-susceptibility
//! classification.
//!
//! The crate covers the full modelling workflow:
//!
//! * [`dataset`] — CSV ingestion, schema validation, stratified splitting,
//!   and quantile discretization.
//! * [`stats`] — Shapiro-Wilk normality testing and chi-square independence
//!   screening of conditioning factors.
//! * [`gbt`] — gradient-boosted decision trees for logistic loss, built from
//!   scratch with similarity-score splitting, gamma pruning, and shrinkage.
//! * [`baselines`] — k-nearest neighbours, L2-regularized logistic
//!   regression, an SMO-trained support vector machine, and AdaBoost over
//!   decision stumps.
//! * [`modelsel`] — stratified k-fold cross-validation and exhaustive grid
//!   search.
//! * [`metrics`] — confusion-matrix scores, ROC/AUC, and learning curves.
//! * [`explain`] — exact TreeSHAP attributions, a brute-force Shapley
//!   oracle, and SHAP-ranked feature reduction.
//! * [`synthetic`] — a seeded surrogate dataset with planted signal, used
//!   for end-to-end exercises when no real survey data is at hand.
//!
//! Every randomized step takes an explicit seed and derives per-component
//! substreams from it (see [`seed`]), so identical inputs always reproduce
//! identical models, splits, and reports.

pub mod baselines;
pub mod dataset;
pub mod explain;
pub mod gbt;
pub mod metrics;
pub mod model;
pub mod modelsel;
pub mod numeric;
pub mod seed;
pub mod stats;
pub mod synthetic;
