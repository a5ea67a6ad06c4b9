use std::fmt::Write;
use std::ops::RangeInclusive;

use super::PlotSpec;
use crate::ca::{AsyncRun, StateTransitionGraph};
use crate::error::{Error, Result};
use crate::semiring::{Field, Scalar};
use crate::spectral::SpectralSummary;

fn comments(out: &mut String, spec: &PlotSpec) {
    for line in spec.meta_lines() {
        let _ = writeln!(out, "// {line}");
    }
}

/// STG with binary-string labels; attractor states and arcs drawn bold.
pub fn stg_dot(stg: &StateTransitionGraph, spec: &PlotSpec) -> String {
    let mut out = String::new();
    comments(&mut out, spec);
    out.push_str("digraph stg {\n  node [shape=box, fontname=\"monospace\"];\n");
    for s in 0..stg.state_count() as u32 {
        let style = if stg.is_on_attractor(s) {
            ", class=\"attractor\", style=\"filled,bold\", fillcolor=\"#f4d03f\""
        } else {
            ""
        };
        let _ = writeln!(out, "  s{s} [label=\"{}\"{style}];", stg.label(s));
    }
    for s in 0..stg.state_count() as u32 {
        let t = stg.successor(s);
        let style = if stg.is_on_attractor(s) {
            " [penwidth=2]"
        } else {
            ""
        };
        let _ = writeln!(out, "  s{s} -> s{t}{style};");
    }
    out.push_str("}\n");
    out
}

/// Critical graph of a spectral summary, 1-based node labels.
pub fn critical_dot<F: Field>(summary: &SpectralSummary<F>, spec: &PlotSpec) -> String {
    let mut out = String::new();
    comments(&mut out, spec);
    let _ = writeln!(
        out,
        "digraph critical {{\n  label=\"lambda = {}, sigma = {}\";",
        summary.lambda, summary.sigma
    );
    for &i in &summary.critical.nodes {
        let _ = writeln!(out, "  n{} [label=\"{}\"];", i + 1, i + 1);
    }
    for &(j, i) in &summary.critical.arcs {
        let _ = writeln!(out, "  n{} -> n{};", j + 1, i + 1);
    }
    out.push_str("}\n");
    out
}

/// Happened-before diagram of updates `k` in `epochs`.
///
/// `send_i_k` is the completion of update `k` of cell `i` at `x_i(k)`;
/// `recv_i_k` is the moment all messages for update `k` have arrived,
/// `x_i(k) - xi_i`. Arcs run from each send to the receives it feeds and from
/// each receive to the send it produces.
pub fn event_dag<T: Scalar>(
    run: &AsyncRun<T>,
    epochs: RangeInclusive<usize>,
    spec: &PlotSpec,
) -> Result<String> {
    let (a, b) = (*epochs.start(), *epochs.end());
    if a > b || b > run.k_max() {
        return Err(Error::InvalidParameter(format!(
            "epoch range {a}..={b} is outside 0..={}",
            run.k_max()
        )));
    }
    let n = run.cells();
    let net = run.spec();
    let xi = &run.params().xi;
    let recv_time = |i: usize, k: usize| -> Result<T> {
        run.time(i, k)
            .checked_sub(xi[i])
            .ok_or(Error::Overflow("event_dag"))
    };
    let mut out = String::new();
    comments(&mut out, spec);
    out.push_str("digraph events {\n  rankdir=TB;\n  node [shape=ellipse, fontsize=10];\n");
    for k in a..=b {
        if k > a {
            let _ = write!(out, "  {{ rank=same;");
            for i in 0..n {
                let _ = write!(
                    out,
                    " recv_{i}_{k} [label=\"r{}({k}) = {}\", time=\"{}\"];",
                    i + 1,
                    recv_time(i, k)?,
                    recv_time(i, k)?
                );
            }
            out.push_str(" }\n");
        }
        let _ = write!(out, "  {{ rank=same;");
        for i in 0..n {
            let _ = write!(
                out,
                " send_{i}_{k} [label=\"x{}({k}) = {}\", shape=box, time=\"{}\"];",
                i + 1,
                run.time(i, k),
                run.time(i, k)
            );
        }
        out.push_str(" }\n");
    }
    for k in a..b {
        for i in 0..n {
            for &j in net.predecessors(i) {
                let _ = writeln!(out, "  send_{j}_{k} -> recv_{i}_{};", k + 1);
            }
            let _ = writeln!(out, "  recv_{i}_{next} -> send_{i}_{next};", next = k + 1);
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca::{async_run, build_stg, CARule, CAState};
    use crate::network::{random_parameters, NetworkSpec, TimingParameters};
    use crate::semiring::MaxPlusVector;
    use std::collections::HashMap;

    fn arcs(dot: &str) -> Vec<(String, String)> {
        dot.lines()
            .filter_map(|l| {
                let l = l.trim().trim_end_matches(';');
                let (a, b) = l.split_once(" -> ")?;
                let b = b.split(' ').next()?;
                Some((a.to_string(), b.to_string()))
            })
            .collect()
    }

    #[test]
    fn two_state_stg() {
        let spec = NetworkSpec::regular_ring(1, 1).unwrap();
        let g = build_stg(CARule::Parity, &spec).unwrap();
        let dot = stg_dot(&g, &PlotSpec::default());
        assert_eq!(arcs(&dot).len(), 2);
        assert!(dot.contains("label=\"0\"") && dot.contains("label=\"1\""));
    }

    #[test]
    fn stg_out_degree_and_styling() {
        let spec = NetworkSpec::regular_ring(6, 3).unwrap();
        let g = build_stg(CARule::EcaTable(30), &spec).unwrap();
        let dot = stg_dot(&g, &PlotSpec::default());
        let mut out_deg: HashMap<String, usize> = HashMap::new();
        for (a, _) in arcs(&dot) {
            *out_deg.entry(a).or_default() += 1;
        }
        assert_eq!(out_deg.len(), 64);
        assert!(out_deg.values().all(|&d| d == 1));
        assert_eq!(
            dot.matches("class=\"attractor\"").count(),
            g.attractor_state_count()
        );
    }

    #[test]
    fn single_node_events_form_a_chain() {
        let spec = NetworkSpec::regular_ring(1, 1).unwrap();
        let params = TimingParameters::uniform(&spec, 4i64, 2);
        let run = async_run(
            CARule::Parity,
            &spec,
            &params,
            &CAState::single(1, 0),
            &MaxPlusVector::unit(1),
            3,
        )
        .unwrap();
        let dot = event_dag(&run, 0..=3, &PlotSpec::default()).unwrap();
        let a = arcs(&dot);
        assert_eq!(a.len(), 6);
        for w in a.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
    }

    #[test]
    fn ring_receives_have_three_parents_and_respect_time() {
        let spec = NetworkSpec::regular_ring(7, 3).unwrap();
        let params = random_parameters(&spec, 12, (1, 30), (1, 10)).unwrap();
        let run = async_run(
            CARule::EcaTable(150),
            &spec,
            &params,
            &CAState::single(7, 3),
            &MaxPlusVector::unit(7),
            6,
        )
        .unwrap();
        let dot = event_dag(&run, 1..=5, &PlotSpec::default()).unwrap();
        let mut time: HashMap<String, i64> = HashMap::new();
        for l in dot.lines() {
            for decl in l.split(';') {
                let decl = decl.trim().trim_start_matches("{ rank=same").trim();
                if let (Some(name), Some(pos)) = (decl.split(' ').next(), decl.find("time=\"")) {
                    let rest = &decl[pos + 6..];
                    time.insert(
                        name.to_string(),
                        rest[..rest.find('"').unwrap()].parse().unwrap(),
                    );
                }
            }
        }
        let mut in_deg: HashMap<String, usize> = HashMap::new();
        for (a, b) in arcs(&dot) {
            assert!(time[&a] <= time[&b], "{a} -> {b}");
            *in_deg.entry(b).or_default() += 1;
        }
        for (node, d) in in_deg {
            if node.starts_with("recv") {
                assert_eq!(d, 3, "{node}");
            } else {
                assert_eq!(d, 1, "{node}");
            }
        }
        assert!(event_dag(&run, 4..=9, &PlotSpec::default()).is_err());
    }
}
