use super::PlotSpec;
use crate::ca::{AsyncRun, SyncOrbit};
use crate::semiring::Scalar;

/// 8-bit grayscale raster with header comments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pixmap {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
    pub comments: Vec<String>,
}

impl Pixmap {
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Binary PGM (`P5`).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = b"P5\n".to_vec();
        for c in &self.comments {
            out.extend_from_slice(format!("# {}\n", c.replace('\n', " ")).as_bytes());
        }
        out.extend_from_slice(format!("{} {}\n255\n", self.width, self.height).as_bytes());
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Raster of the memory blocks. Pixel row `r` shows the states at time
/// `t0 + r / time_scale`, where `t0` is the earliest initial update.
pub fn spacetime_async_pgm<T: Scalar>(run: &AsyncRun<T>, spec: &PlotSpec) -> Pixmap {
    let n = run.cells();
    let k_max = run.k_max();
    let t0 = (0..n)
        .map(|i| run.time(i, 0).to_f64())
        .fold(f64::INFINITY, f64::min);
    let t1 = (0..n)
        .map(|i| run.time(i, k_max).to_f64())
        .fold(f64::NEG_INFINITY, f64::max);
    let cw = spec.cell_width as usize;
    let width = n * cw;
    let height = ((t1 - t0) * spec.time_scale).ceil().max(0.0) as usize;
    let mut pixels = vec![spec.gray_background; width * height];
    for cell in 0..n {
        let times: Vec<f64> = (0..=k_max).map(|k| run.time(cell, k).to_f64()).collect();
        for r in 0..height {
            let t = t0 + r as f64 / spec.time_scale;
            let after = times.partition_point(|&x| x <= t);
            if after == 0 || after > k_max {
                continue;
            }
            let g = spec.gray(run.contour_state(after - 1).get(cell));
            pixels[r * width + cell * cw..r * width + (cell + 1) * cw].fill(g);
        }
    }
    let mut comments = spec.meta_lines();
    comments.push(format!("origin={t0}"));
    Pixmap {
        width,
        height,
        pixels,
        comments,
    }
}

/// Raster of `s(0), ..., s(steps - 1)`, one band of `row_height` per step.
pub fn spacetime_sync_pgm(orbit: &SyncOrbit, steps: usize, spec: &PlotSpec) -> Pixmap {
    let n = orbit.states.first().map_or(0, |s| s.len());
    let cw = spec.cell_width as usize;
    let rh = spec.row_height as usize;
    let width = n * cw;
    let height = steps * rh;
    let mut pixels = vec![spec.gray_background; width * height];
    for k in 0..steps {
        let s = orbit.state(k);
        for y in k * rh..(k + 1) * rh {
            for i in 0..n {
                pixels[y * width + i * cw..y * width + (i + 1) * cw].fill(spec.gray(s.get(i)));
            }
        }
    }
    Pixmap {
        width,
        height,
        pixels,
        comments: spec.meta_lines(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca::{sync_orbit, CARule, CAState};
    use crate::network::NetworkSpec;

    #[test]
    fn pgm_header() {
        let p = Pixmap {
            width: 2,
            height: 1,
            pixels: vec![0, 255],
            comments: vec!["seed=1".into()],
        };
        assert_eq!(p.to_pgm(), b"P5\n# seed=1\n2 1\n255\n\x00\xff".to_vec());
    }

    #[test]
    fn symmetric_seed_gives_mirror_image() {
        let spec = NetworkSpec::regular_ring(20, 3).unwrap();
        let orbit = sync_orbit(
            CARule::EcaTable(150),
            &spec,
            &CAState::single(20, 9),
            10_000,
        )
        .unwrap();
        let ps = PlotSpec {
            cell_width: 1,
            row_height: 1,
            ..PlotSpec::default()
        };
        let img = spacetime_sync_pgm(&orbit, 30, &ps);
        // reflection about cell 10 (index 9) maps i to 18 - i on the ring
        for y in 0..30 {
            for x in 0..20 {
                assert_eq!(
                    img.get(x, y),
                    img.get((18 + 20 - x) % 20, y),
                    "row {y} col {x}"
                );
            }
        }
    }

    #[test]
    fn periodic_rows_repeat() {
        let spec = NetworkSpec::regular_ring(10, 3).unwrap();
        let orbit =
            sync_orbit(CARule::EcaTable(90), &spec, &CAState::single(10, 2), 10_000).unwrap();
        let ps = PlotSpec {
            cell_width: 1,
            row_height: 1,
            ..PlotSpec::default()
        };
        let steps = orbit.entry + 3 * orbit.period;
        let img = spacetime_sync_pgm(&orbit, steps, &ps);
        for k in orbit.entry..steps - orbit.period {
            for x in 0..10 {
                assert_eq!(img.get(x, k), img.get(x, k + orbit.period));
            }
        }
    }
}
