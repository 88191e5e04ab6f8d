//! Task instance complexity for visuospatial graph tasks on 3-D layouts.
//!
//! The crate covers the full pipeline around two node-pair tasks, counting
//! common neighbors (CN) and finding the shortest-path length (SP):
//!
//! * [`graph`]: undirected graphs, topology queries, local properties, ingestion.
//! * [`layout`]: 3-D stress majorization and normalization into the view cube.
//! * [`geometry`]: node angles, minimum-volume enclosing ellipsoids, region tests.
//! * [`complexity`]: fill ratio and the signal/noise instance complexity measures.
//! * [`instances`]: candidate enumeration, outlier filtering and session planning.
//! * [`evaluation`]: accuracy, group harmonization, bootstrap and permutation tests.
//! * [`scene`]: a JSON scene description for external renderers.
//! * [`synth`]: synthetic spatial graphs resembling sparse social contact networks.

pub mod complexity;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod graph;
pub mod instances;
pub mod layout;
pub mod rng;
pub mod scene;
pub mod synth;

pub use error::{Error, Result};

/// Position in meters. The scene convention is Y-up.
pub type Point3 = nalgebra::Vector3<f64>;

/// Order-preserving parallel map (sequential without the `parallel` feature).
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
