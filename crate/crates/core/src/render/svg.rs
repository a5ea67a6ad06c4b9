use std::fmt::Write;

use super::{fmt_num, PlotSpec};
use crate::ca::{AsyncRun, CAState, SyncOrbit};
use crate::semiring::Scalar;
use crate::trajectory::Trajectory;

/// The three construction stages of an asynchronous space-time plot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsyncLayer {
    /// Contours, with each cell's state marked where it updates.
    ContoursWithStates,
    /// Memory blocks between contours, contours drawn on top.
    MemoryWithContours,
    /// Memory blocks only.
    Final,
}

fn header(spec: &PlotSpec, width: f64, height: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = fmt_num(width),
        h = fmt_num(height)
    );
    for line in spec.meta_lines() {
        let _ = writeln!(out, "<!-- {} -->", line.replace("--", "- -"));
    }
    out
}

fn time_range<T: Scalar>(traj: &Trajectory<T>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in traj.states() {
        for v in x.entries().iter().filter_map(|e| e.finite()) {
            lo = lo.min(v.to_f64());
            hi = hi.max(v.to_f64());
        }
    }
    if lo > hi {
        (0.0, 0.0)
    } else {
        (lo, hi)
    }
}

fn contour_points<T: Scalar>(traj: &Trajectory<T>, k: usize, spec: &PlotSpec, t0: f64) -> String {
    let w = spec.cell_width as f64;
    let n = traj.dim();
    let mut pts = Vec::new();
    for (i, v) in traj.x(k).entries().iter().enumerate() {
        if let Some(t) = v.finite() {
            let y = (t.to_f64() - t0) * spec.time_scale;
            if n == 1 {
                pts.push(format!("0,{}", fmt_num(y)));
                pts.push(format!("{},{}", fmt_num(w), fmt_num(y)));
            } else {
                pts.push(format!("{},{}", fmt_num((i as f64 + 0.5) * w), fmt_num(y)));
            }
        }
    }
    pts.join(" ")
}

fn contour_lines<T: Scalar>(out: &mut String, traj: &Trajectory<T>, spec: &PlotSpec, t0: f64) {
    for k in 0..=traj.k_max() {
        let _ = writeln!(
            out,
            r#"<polyline class="contour" data-k="{k}" points="{}" fill="none" stroke="{}" stroke-width="1"/>"#,
            contour_points(traj, k, spec, t0),
            spec.contour_color
        );
    }
}

/// One polyline per contour `k` through the points `(i, x_i(k))`.
pub fn contour_plot<T: Scalar>(traj: &Trajectory<T>, spec: &PlotSpec) -> String {
    let (t0, t1) = time_range(traj);
    let width = (traj.dim() as u32 * spec.cell_width) as f64;
    let height = (t1 - t0) * spec.time_scale;
    let mut out = header(spec, width, height);
    contour_lines(&mut out, traj, spec, t0);
    out.push_str("</svg>\n");
    out
}

fn hold_rects<T: Scalar>(out: &mut String, run: &AsyncRun<T>, spec: &PlotSpec, t0: f64) {
    let w = spec.cell_width as f64;
    for iv in run.memory() {
        let y0 = (iv.start.to_f64() - t0) * spec.time_scale;
        let y1 = (iv.end.to_f64() - t0) * spec.time_scale;
        let _ = writeln!(
            out,
            r#"<rect class="hold" data-cell="{}" data-k="{}" x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
            iv.cell,
            iv.k,
            fmt_num(iv.cell as f64 * w),
            fmt_num(y0),
            fmt_num(w),
            fmt_num(y1 - y0),
            spec.color(iv.state)
        );
    }
}

/// Asynchronous space-time plot at one of its construction stages.
pub fn spacetime_async<T: Scalar>(run: &AsyncRun<T>, spec: &PlotSpec, layer: AsyncLayer) -> String {
    let traj = run.trajectory();
    let (t0, t1) = time_range(traj);
    let w = spec.cell_width as f64;
    let width = run.cells() as f64 * w;
    let height = (t1 - t0) * spec.time_scale;
    let mut out = header(spec, width, height);
    match layer {
        AsyncLayer::ContoursWithStates => {
            contour_lines(&mut out, traj, spec, t0);
            let r = (w / 4.0).max(1.0);
            for k in 0..=run.k_max() {
                let s = run.contour_state(k);
                for i in 0..run.cells() {
                    let y = (run.time(i, k).to_f64() - t0) * spec.time_scale;
                    let _ = writeln!(
                        out,
                        r#"<circle class="state" data-cell="{i}" data-k="{k}" cx="{}" cy="{}" r="{}" fill="{}" stroke="{}"/>"#,
                        fmt_num((i as f64 + 0.5) * w),
                        fmt_num(y),
                        fmt_num(r),
                        spec.color(s.get(i)),
                        spec.contour_color
                    );
                }
            }
        }
        AsyncLayer::MemoryWithContours => {
            hold_rects(&mut out, run, spec, t0);
            contour_lines(&mut out, traj, spec, t0);
        }
        AsyncLayer::Final => hold_rects(&mut out, run, spec, t0),
    }
    out.push_str("</svg>\n");
    out
}

/// Classical synchronous plot: row `k` shows `s(k)` for `k < steps`.
pub fn spacetime_sync(orbit: &SyncOrbit, steps: usize, spec: &PlotSpec) -> String {
    let rows: Vec<&CAState> = (0..steps).map(|k| orbit.state(k)).collect();
    let n = rows.first().map_or(0, |s| s.len());
    let w = spec.cell_width as f64;
    let h = spec.row_height as f64;
    let mut out = header(spec, n as f64 * w, steps as f64 * h);
    for (k, s) in rows.iter().enumerate() {
        for i in 0..n {
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                fmt_num(i as f64 * w),
                fmt_num(k as f64 * h),
                fmt_num(w),
                fmt_num(h),
                spec.color(s.get(i))
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// A hold block read back from a rendered SVG.
#[derive(Clone, Debug, PartialEq)]
pub struct SvgRect {
    pub cell: usize,
    pub y: f64,
    pub height: f64,
    pub fill: String,
}

/// Recover the `class="hold"` rectangles of an asynchronous plot.
pub fn parse_hold_rects(svg: &str) -> Vec<SvgRect> {
    fn attr<'a>(line: &'a str, name: &str) -> Option<&'a str> {
        let key = format!(" {name}=\"");
        let start = line.find(&key)? + key.len();
        let len = line[start..].find('"')?;
        Some(&line[start..start + len])
    }
    svg.lines()
        .filter(|l| l.starts_with("<rect class=\"hold\""))
        .filter_map(|l| {
            Some(SvgRect {
                cell: attr(l, "data-cell")?.parse().ok()?,
                y: attr(l, "y")?.parse().ok()?,
                height: attr(l, "height")?.parse().ok()?,
                fill: attr(l, "fill")?.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca::{async_run, sync_orbit, CARule};
    use crate::network::{build_p, NetworkSpec, TimingParameters};
    use crate::semiring::{Ext, MaxPlusMatrix, MaxPlusVector};
    use crate::trajectory::iterate;

    fn polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
        svg.lines()
            .filter(|l| l.starts_with("<polyline"))
            .map(|l| {
                let start = l.find("points=\"").unwrap() + 8;
                let end = start + l[start..].find('"').unwrap();
                l[start..end]
                    .split(' ')
                    .map(|p| {
                        let (x, y) = p.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn uniform_contours_are_evenly_spaced_horizontals() {
        let spec = NetworkSpec::regular_ring(6, 3).unwrap();
        let p = build_p(&spec, &TimingParameters::uniform(&spec, 5i64, 2)).unwrap();
        let t = iterate(&p, &MaxPlusVector::unit(6), 4).unwrap();
        let svg = contour_plot(&t, &PlotSpec::default());
        let lines = polylines(&svg);
        assert_eq!(lines.len(), 5);
        for (k, line) in lines.iter().enumerate() {
            assert!(line.iter().all(|&(_, y)| y == 14.0 * k as f64));
        }
    }

    #[test]
    fn single_node_contours_are_short_segments() {
        let p = MaxPlusMatrix::from_rows(vec![vec![Ext::Fin(3i64)]]).unwrap();
        let t = iterate(&p, &MaxPlusVector::unit(1), 3).unwrap();
        let lines = polylines(&contour_plot(&t, &PlotSpec::default()));
        assert_eq!(lines.len(), 4);
        for (k, line) in lines.iter().enumerate() {
            assert_eq!(line, &vec![(0.0, 6.0 * k as f64), (10.0, 6.0 * k as f64)]);
        }
    }

    #[test]
    fn metadata_is_embedded() {
        let p = MaxPlusMatrix::from_rows(vec![vec![Ext::Fin(3i64)]]).unwrap();
        let t = iterate(&p, &MaxPlusVector::unit(1), 1).unwrap();
        let svg = contour_plot(&t, &PlotSpec::default().with_meta("seed", 17));
        assert!(svg.contains("<!-- seed=17 -->"));
        assert!(svg.contains("time_scale=2 px per time unit"));
    }

    #[test]
    fn layers_differ_in_content() {
        let spec = NetworkSpec::regular_ring(5, 3).unwrap();
        let params = TimingParameters::uniform(&spec, 3i64, 1);
        let run = async_run(
            CARule::Parity,
            &spec,
            &params,
            &CAState::single(5, 2),
            &MaxPlusVector::unit(5),
            3,
        )
        .unwrap();
        let ps = PlotSpec::default();
        let a = spacetime_async(&run, &ps, AsyncLayer::ContoursWithStates);
        let b = spacetime_async(&run, &ps, AsyncLayer::MemoryWithContours);
        let c = spacetime_async(&run, &ps, AsyncLayer::Final);
        assert!(a.contains("<circle") && !a.contains("<rect"));
        assert!(b.contains("<rect") && b.contains("<polyline"));
        assert!(c.contains("<rect") && !c.contains("<polyline"));
        assert_eq!(parse_hold_rects(&c).len(), 15);
    }

    #[test]
    fn all_zero_orbit_is_one_colour() {
        let spec = NetworkSpec::regular_ring(5, 3).unwrap();
        let orbit = sync_orbit(CARule::EcaTable(150), &spec, &CAState::zeros(5), 4).unwrap();
        let ps = PlotSpec::default();
        let svg = spacetime_sync(&orbit, 6, &ps);
        assert_eq!(svg.matches("<rect").count(), 30);
        assert!(!svg.contains(&ps.color1));
    }
}
