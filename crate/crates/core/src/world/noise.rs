use crate::seed::splitmix64;

/// Lattice value noise: pseudo-random values at integer corners, blended
/// with a quintic fade. Output lies in `[-1, 1]`.
#[derive(Clone, Copy, Debug)]
pub struct ValueNoise {
    seed: u64,
}

impl ValueNoise {
    pub fn new(seed: u64) -> Self {
        ValueNoise { seed }
    }

    #[inline]
    fn corner(&self, ix: i64, iy: i64) -> f64 {
        let h = splitmix64(self.seed ^ splitmix64((ix as u64) << 32 ^ (iy as u64 & 0xffff_ffff)));
        (h >> 11) as f64 * (2.0 / (1u64 << 53) as f64) - 1.0
    }

    #[inline]
    fn fade(t: f64) -> f64 {
        t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
    }

    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let (x0, y0) = (x.floor(), y.floor());
        let (tx, ty) = (Self::fade(x - x0), Self::fade(y - y0));
        let (ix, iy) = (x0 as i64, y0 as i64);
        let a = self.corner(ix, iy);
        let b = self.corner(ix + 1, iy);
        let c = self.corner(ix, iy + 1);
        let d = self.corner(ix + 1, iy + 1);
        let top = a + (b - a) * tx;
        let bottom = c + (d - c) * tx;
        top + (bottom - top) * ty
    }

    /// Weighted sum of octaves given as `(feature size, weight)` pairs,
    /// normalized by the total weight. Each octave gets its own lattice.
    pub fn octaves(&self, x: f64, y: f64, octaves: &[(f64, f64)]) -> f64 {
        let mut total = 0.0;
        let mut weight = 0.0;
        for (i, &(size, w)) in octaves.iter().enumerate() {
            let layer = ValueNoise::new(self.seed.wrapping_add(0x632b_e59b_d9b4_e019 * (i as u64 + 1)));
            total += w * layer.sample(x / size, y / size);
            weight += w;
        }
        total / weight
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_and_deterministic() {
        let n = ValueNoise::new(9);
        for i in 0..500 {
            let (x, y) = (i as f64 * 0.37, i as f64 * 1.13 - 40.0);
            let v = n.sample(x, y);
            assert!((-1.0..=1.0).contains(&v));
            assert_eq!(v, ValueNoise::new(9).sample(x, y));
        }
    }

    #[test]
    fn interpolates_lattice_values() {
        let n = ValueNoise::new(1);
        assert_eq!(n.sample(3.0, 4.0), n.corner(3, 4));
    }
}
