pub mod benchgen;
pub mod classmodel;
pub mod cli;
pub mod groundtruth;
pub mod inventory;
pub mod jario;
pub mod metrics;
pub mod shrinker;
