//! SVG, PGM and DOT output for trajectories, CA runs and graphs.
//!
//! Time runs down the page and cells run left to right by index. Every
//! renderer is a pure function of its inputs and the [`PlotSpec`].

mod dot;
mod pixmap;
mod svg;

use std::collections::BTreeMap;

pub use dot::{critical_dot, event_dag, stg_dot};
pub use pixmap::{spacetime_async_pgm, spacetime_sync_pgm, Pixmap};
pub use svg::{
    contour_plot, parse_hold_rects, spacetime_async, spacetime_sync, AsyncLayer, SvgRect,
};

/// Geometry and colours shared by all plots.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotSpec {
    /// Pixels per cell column.
    pub cell_width: u32,
    /// Pixels per row of a synchronous plot.
    pub row_height: u32,
    /// Pixels per time unit in asynchronous plots.
    pub time_scale: f64,
    pub color0: String,
    pub color1: String,
    pub contour_color: String,
    pub gray0: u8,
    pub gray1: u8,
    pub gray_background: u8,
    /// Extra `key=value` pairs written into every file.
    pub metadata: BTreeMap<String, String>,
}

impl Default for PlotSpec {
    fn default() -> Self {
        PlotSpec {
            cell_width: 10,
            row_height: 10,
            time_scale: 2.0,
            color0: "#2b2b2b".into(),
            color1: "#e8e8e8".into(),
            contour_color: "#c0392b".into(),
            gray0: 43,
            gray1: 232,
            gray_background: 128,
            metadata: BTreeMap::new(),
        }
    }
}

impl PlotSpec {
    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    fn meta_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("generator=tropical-ca {}", env!("CARGO_PKG_VERSION")),
            format!("time_scale={} px per time unit", fmt_num(self.time_scale)),
        ];
        lines.extend(self.metadata.iter().map(|(k, v)| format!("{k}={v}")));
        lines
    }

    fn color(&self, state: bool) -> &str {
        if state {
            &self.color1
        } else {
            &self.color0
        }
    }

    fn gray(&self, state: bool) -> u8 {
        if state {
            self.gray1
        } else {
            self.gray0
        }
    }
}

/// Shortest decimal form, no trailing zeros.
pub(crate) fn fmt_num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}
