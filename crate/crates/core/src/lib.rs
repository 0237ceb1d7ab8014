//! Topic-based evaluation of open-domain conversational agents: DAN and
//! attentional DAN topic classifiers, topic segmentation of conversations,
//! depth/breadth/keyword metrics and rank correlation against ratings.

pub mod classifiers;
pub mod cli;
pub mod dialog;
pub mod error;
pub mod io;
pub mod metrics;
pub mod netcore;
pub mod synth;
pub mod text;

pub use error::{Error, Result};
