pub mod clustering;
pub mod connectivity;
pub mod cover;
pub mod driver;
pub mod embed;
pub mod error;
pub mod generators;
pub mod graph;
pub mod matcher;
pub mod oracle;
pub mod treedecomp;

pub use embed::{planar_embed, RotationEmbedding};
pub use error::{Error, Result};
pub use graph::{parse_graph, Graph};
