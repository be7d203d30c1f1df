use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random 16x16 case: smooth-ish intensities plus noise inside an
/// irregular ROI with holes.
pub fn random_case(seed: u64) -> (Vec<f64>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cx, cy) = (rng.random_range(5.0..11.0), rng.random_range(5.0..11.0));
    let (rx, ry) = (rng.random_range(3.0..8.0), rng.random_range(3.0..8.0));
    let amp = rng.random_range(0.5..3.0);
    let mut values = Vec::with_capacity(256);
    let mut mask = Vec::with_capacity(256);
    for y in 0..16 {
        for x in 0..16 {
            let (dx, dy) = ((x as f64 - cx) / rx, (y as f64 - cy) / ry);
            let inside = dx * dx + dy * dy <= 1.0 && rng.random::<f64>() > 0.1;
            mask.push(inside as u8);
            values.push(amp * (x as f64 * 0.3).sin() + rng.random_range(-1.0..1.0));
        }
    }
    (values, mask)
}
