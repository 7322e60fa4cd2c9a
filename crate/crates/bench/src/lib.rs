//! Shared fixtures for the criterion benchmarks.

use morphorad::phantom::{make_phantom, PhantomSpec, Shape, Texture};
use morphorad::volume::{ScalarVolume, VoiMask};

/// Blob-textured ball on a cubic grid of side `n`.
pub fn textured_ball(n: usize) -> (ScalarVolume, VoiMask) {
    make_phantom(&PhantomSpec {
        dims: [n; 3],
        shape: Shape::Ball { r: n as f64 * 0.4 },
        texture: Texture::Blobs { density: 0.01, radius: 2.0 },
        ..PhantomSpec::default()
    })
    .expect("valid phantom spec")
}
