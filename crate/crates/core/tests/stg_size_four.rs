use tropical_ca::ca::{build_stg, CARule};
use tropical_ca::network::{build_p, load_network, NetworkSpec, TimingParameters};
use tropical_ca::spectral::is_irreducible;

const FIXTURE: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../configs/size4_network.json"
);

fn census_matches(spec: &NetworkSpec) -> bool {
    let c = build_stg(CARule::Parity, spec).unwrap().census();
    c.fixed_points == ["0000", "1001"]
        && c.cycles.len() == 2
        && c.cycles.iter().all(|cy| cy.period == 3)
}

#[test]
fn fixture_network_has_the_expected_attractors() {
    let (spec, params): (NetworkSpec, TimingParameters<i64>) = load_network(FIXTURE).unwrap();
    assert_eq!(spec.arcs().len(), 10);
    let g = build_stg(CARule::Parity, &spec).unwrap();
    let c = g.census();
    assert_eq!(c.fixed_points, ["0000", "1001"]);
    assert_eq!(c.cycles.len(), 2);
    assert!(c.cycles.iter().all(|cy| cy.period == 3));
    assert_eq!(g.attractor_state_count(), 8);
    assert_eq!(g.transient_count(), 8);
    assert!(is_irreducible(&build_p(&spec, &params).unwrap()).unwrap());
}

#[test]
fn fixture_is_a_smallest_self_looped_candidate() {
    let off_diag: Vec<(usize, usize)> = (0..4)
        .flat_map(|j| (0..4).map(move |i| (j, i)))
        .filter(|(j, i)| j != i)
        .collect();
    let mut found = Vec::new();
    for mask in 0u32..1 << off_diag.len() {
        let mut arcs: Vec<(usize, usize)> = (0..4).map(|i| (i, i)).collect();
        arcs.extend(
            off_diag
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &a)| a),
        );
        let spec = NetworkSpec::from_arcs(4, &arcs).unwrap();
        let p = build_p(&spec, &TimingParameters::uniform(&spec, 1i64, 0)).unwrap();
        if is_irreducible(&p).unwrap() && census_matches(&spec) {
            found.push(spec);
        }
    }
    assert_eq!(found.len(), 16);
    let fewest = found.iter().map(|s| s.arcs().len()).min().unwrap();
    assert_eq!(fewest, 10);
    let (fixture, _): (NetworkSpec, TimingParameters<i64>) = load_network(FIXTURE).unwrap();
    assert!(found.iter().any(|s| s.arcs() == fixture.arcs()));
}
