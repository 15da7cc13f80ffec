//! Exact nearest-neighbor queries over a uniform spatial hash grid.
//!
//! Cells are scanned in expanding Chebyshev rings around the query; the scan
//! stops once no unscanned ring can contain a closer point, so results match
//! the brute-force minimum exactly.

use crate::Point3;

pub struct NnIndex {
    points: Vec<Point3>,
    lo: Point3,
    cell: f64,
    dims: [i64; 3],
    buckets: Vec<Vec<u32>>,
}

impl NnIndex {
    pub fn build(points: &[Point3]) -> NnIndex {
        assert!(!points.is_empty(), "cannot index an empty cloud");
        let mut lo = points[0];
        let mut hi = points[0];
        for p in points {
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let longest = (hi - lo).max();
        // Aim for roughly cbrt(n) cells per axis.
        let per_axis = (points.len() as f64).cbrt().ceil().max(1.0);
        let cell = if longest > 0.0 { longest / per_axis } else { 1.0 };
        let dims: [i64; 3] =
            std::array::from_fn(|a| ((hi[a] - lo[a]) / cell).floor() as i64 + 1);
        let mut buckets = vec![Vec::new(); (dims[0] * dims[1] * dims[2]) as usize];
        for (i, p) in points.iter().enumerate() {
            let c: [i64; 3] = std::array::from_fn(|a| {
                (((p[a] - lo[a]) / cell).floor() as i64).clamp(0, dims[a] - 1)
            });
            buckets[(c[0] + dims[0] * (c[1] + dims[1] * c[2])) as usize].push(i as u32);
        }
        NnIndex {
            points: points.to_vec(),
            lo,
            cell,
            dims,
            buckets,
        }
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    fn cell_of(&self, p: &Point3) -> [i64; 3] {
        std::array::from_fn(|a| {
            (((p[a] - self.lo[a]) / self.cell).floor() as i64).clamp(0, self.dims[a] - 1)
        })
    }

    fn flat(&self, c: [i64; 3]) -> usize {
        (c[0] + self.dims[0] * (c[1] + self.dims[1] * c[2])) as usize
    }

    /// Squared distance to the nearest indexed point.
    pub fn nearest_sq(&self, q: &Point3) -> f64 {
        let qc = self.cell_of(q);
        let max_ring = (0..3)
            .map(|a| qc[a].max(self.dims[a] - 1 - qc[a]))
            .max()
            .unwrap();
        let mut best = f64::INFINITY;
        for r in 0..=max_ring {
            for dx in -r..=r {
                let x = qc[0] + dx;
                if x < 0 || x >= self.dims[0] {
                    continue;
                }
                for dy in -r..=r {
                    let y = qc[1] + dy;
                    if y < 0 || y >= self.dims[1] {
                        continue;
                    }
                    for dz in -r..=r {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != r {
                            continue;
                        }
                        let z = qc[2] + dz;
                        if z < 0 || z >= self.dims[2] {
                            continue;
                        }
                        for &i in &self.buckets[self.flat([x, y, z])] {
                            let d = (self.points[i as usize] - q).norm_squared();
                            if d < best {
                                best = d;
                            }
                        }
                    }
                }
            }
            // Any point in ring r+1 or beyond lies outside the box of cells
            // within Chebyshev distance r, so its distance is at least the
            // query's margin to that box.
            if best.is_finite() {
                let mut margin = f64::INFINITY;
                for a in 0..3 {
                    let box_lo = self.lo[a] + (qc[a] - r) as f64 * self.cell;
                    let box_hi = self.lo[a] + (qc[a] + r + 1) as f64 * self.cell;
                    margin = margin.min(q[a] - box_lo).min(box_hi - q[a]);
                }
                if margin > 0.0 && best <= margin * margin {
                    return best;
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_nearest_sq(points: &[Point3], q: &Point3) -> f64 {
        points
            .iter()
            .map(|p| (p - q).norm_squared())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn matches_brute_force_on_random_clouds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..20 {
            let n = 50 + round * 37;
            let pts: Vec<Point3> = (0..n)
                .map(|_| Point3::new(rng.gen(), rng.gen(), rng.gen()))
                .collect();
            let index = NnIndex::build(&pts);
            for _ in 0..200 {
                // Queries both inside and outside the cloud's bounding box.
                let q = Point3::new(
                    rng.gen::<f64>() * 3.0 - 1.0,
                    rng.gen::<f64>() * 3.0 - 1.0,
                    rng.gen::<f64>() * 3.0 - 1.0,
                );
                let fast = index.nearest_sq(&q);
                let brute = brute_nearest_sq(&pts, &q);
                assert!(
                    (fast - brute).abs() <= 1e-12,
                    "fast {fast} vs brute {brute}"
                );
            }
        }
    }

    #[test]
    fn coincident_cloud_works() {
        let pts = vec![Point3::new(0.5, 0.5, 0.5); 8];
        let index = NnIndex::build(&pts);
        assert_eq!(index.nearest_sq(&Point3::new(0.5, 0.5, 0.5)), 0.0);
        assert!((index.nearest_sq(&Point3::new(1.5, 0.5, 0.5)) - 1.0).abs() < 1e-15);
    }
}
