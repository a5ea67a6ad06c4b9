//! Cell networks, timing parameters and the timing dependency matrix `P`.
//!
//! Internally nodes are 0-based. Files use 1-based node numbers.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semiring::{Ext, MaxPlusMatrix, RawScalar, Scalar};

/// How the arcs of a network were specified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Topology {
    /// Ring with symmetric neighbourhoods of odd size `n`, self included.
    Regular { n: usize },
    /// Explicit arcs `(from, to)`.
    Arcs(Vec<(usize, usize)>),
}

/// A network of `size` cells. Node `i` listens to its predecessors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkSpec {
    size: usize,
    topology: Topology,
    preds: Vec<Vec<usize>>,
}

impl NetworkSpec {
    /// Regular `n`-neighbourhood ring on `size` cells.
    ///
    /// Predecessors of `i` are listed left to right: `i-r, ..., i, ..., i+r`
    /// (mod `size`) with `r = (n-1)/2`.
    pub fn regular_ring(size: usize, n: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidNetwork(
                "network size must be positive".into(),
            ));
        }
        if n % 2 == 0 {
            return Err(Error::InvalidNetwork(format!(
                "neighbourhood size must be odd, got {n}"
            )));
        }
        if n > size {
            return Err(Error::InvalidNetwork(format!(
                "neighbourhood size {n} exceeds network size {size}"
            )));
        }
        let r = (n / 2) as isize;
        let preds = (0..size)
            .map(|i| {
                (-r..=r)
                    .map(|d| (i as isize + d).rem_euclid(size as isize) as usize)
                    .collect()
            })
            .collect();
        Ok(NetworkSpec {
            size,
            topology: Topology::Regular { n },
            preds,
        })
    }

    /// Network from explicit arcs `(from, to)`, 0-based.
    pub fn from_arcs(size: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidNetwork(
                "network size must be positive".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for (idx, &(j, i)) in arcs.iter().enumerate() {
            if i >= size || j >= size {
                return Err(Error::InvalidNetwork(format!(
                    "arc #{idx} ({} -> {}) refers to a node outside 1..={size}",
                    j + 1,
                    i + 1
                )));
            }
            if !seen.insert((j, i)) {
                return Err(Error::InvalidNetwork(format!(
                    "arc {} -> {} listed twice",
                    j + 1,
                    i + 1
                )));
            }
        }
        let mut preds = vec![Vec::new(); size];
        for &(j, i) in &seen {
            preds[i].push(j);
        }
        for p in &mut preds {
            p.sort_unstable();
        }
        Ok(NetworkSpec {
            size,
            topology: Topology::Arcs(seen.into_iter().collect()),
            preds,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Predecessors of `i` in rule-input order.
    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.preds[i]
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.preds[to].contains(&from)
    }

    /// All arcs `(from, to)`, sorted by `(to, from)`.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs: Vec<(usize, usize)> = self
            .preds
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.iter().map(move |&j| (j, i)))
            .collect();
        arcs.sort_unstable_by_key(|&(j, i)| (i, j));
        arcs
    }

    /// Every node has exactly the predecessors `{i-1, i, i+1}` (mod N), with `N >= 3`.
    pub fn is_eca_lattice(&self) -> bool {
        let n = self.size;
        n >= 3
            && self.preds.iter().enumerate().all(|(i, p)| {
                let left = (i + n - 1) % n;
                let right = (i + 1) % n;
                let mut want = [left, i, right];
                let mut got: Vec<usize> = p.clone();
                want.sort_unstable();
                got.sort_unstable();
                got == want
            })
    }

    /// The 0/1 adjacency pattern as a max-plus matrix with `e` on arcs.
    pub fn adjacency<T: Scalar>(&self) -> MaxPlusMatrix<T> {
        let mut a = MaxPlusMatrix::eps(self.size, self.size);
        for (j, i) in self.arcs() {
            a.set(i, j, Ext::e());
        }
        a
    }
}

/// Processing times `xi[i]` and transmission times `tau[(i, j)]` for arcs `j -> i`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimingParameters<T> {
    pub xi: Vec<T>,
    pub tau: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> TimingParameters<T> {
    /// Same `xi` on every node and `tau` on every arc.
    pub fn uniform(spec: &NetworkSpec, xi: T, tau: T) -> Self {
        TimingParameters {
            xi: vec![xi; spec.size()],
            tau: spec
                .arcs()
                .into_iter()
                .map(|(j, i)| ((i, j), tau))
                .collect(),
        }
    }

    /// Check that `xi > 0` everywhere and `tau >= 0` is given exactly on the arcs.
    pub fn validate(&self, spec: &NetworkSpec) -> Result<()> {
        if self.xi.len() != spec.size() {
            return Err(Error::InvalidParameter(format!(
                "expected {} processing times, got {}",
                spec.size(),
                self.xi.len()
            )));
        }
        for (i, &x) in self.xi.iter().enumerate() {
            if !(x > T::zero()) {
                return Err(Error::InvalidParameter(format!(
                    "processing time of node {} must be positive, got {x}",
                    i + 1
                )));
            }
        }
        for (&(i, j), &t) in &self.tau {
            if i >= spec.size() || j >= spec.size() || !spec.has_arc(j, i) {
                return Err(Error::InvalidParameter(format!(
                    "transmission time given for {} -> {}, which is not an arc",
                    j + 1,
                    i + 1
                )));
            }
            if t < T::zero() {
                return Err(Error::InvalidParameter(format!(
                    "transmission time on {} -> {} must be nonnegative, got {t}",
                    j + 1,
                    i + 1
                )));
            }
        }
        for (j, i) in spec.arcs() {
            if !self.tau.contains_key(&(i, j)) {
                return Err(Error::InvalidParameter(format!(
                    "missing transmission time for arc {} -> {}",
                    j + 1,
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn tau(&self, i: usize, j: usize) -> Option<T> {
        self.tau.get(&(i, j)).copied()
    }
}

impl TimingParameters<i64> {
    /// Convert integer parameters to another scalar type.
    pub fn cast<U: Scalar>(&self) -> TimingParameters<U> {
        TimingParameters {
            xi: self.xi.iter().map(|&v| U::from_i64(v)).collect(),
            tau: self
                .tau
                .iter()
                .map(|(&k, &v)| (k, U::from_i64(v)))
                .collect(),
        }
    }
}

/// `A_xi`: diagonal `xi_i`, `eps` elsewhere.
pub fn processing_matrix<T: Scalar>(params: &TimingParameters<T>) -> MaxPlusMatrix<T> {
    let n = params.xi.len();
    let mut a = MaxPlusMatrix::eps(n, n);
    for (i, &x) in params.xi.iter().enumerate() {
        a.set(i, i, Ext::Fin(x));
    }
    a
}

/// `T`: `tau_ij` on arcs `j -> i`, `eps` elsewhere.
pub fn transmission_matrix<T: Scalar>(
    spec: &NetworkSpec,
    params: &TimingParameters<T>,
) -> MaxPlusMatrix<T> {
    let mut t = MaxPlusMatrix::eps(spec.size(), spec.size());
    for (&(i, j), &v) in &params.tau {
        t.set(i, j, Ext::Fin(v));
    }
    t
}

/// `P` with `P_ij = xi_i + tau_ij` on arcs `j -> i`.
pub fn build_p<T: Scalar>(
    spec: &NetworkSpec,
    params: &TimingParameters<T>,
) -> Result<MaxPlusMatrix<T>> {
    params.validate(spec)?;
    let n = spec.size();
    let mut p = MaxPlusMatrix::eps(n, n);
    for (j, i) in spec.arcs() {
        let tau = params.tau[&(i, j)];
        let v = params.xi[i]
            .checked_add(tau)
            .ok_or(Error::Overflow("build_p"))?;
        p.set(i, j, Ext::Fin(v));
    }
    Ok(p)
}

/// Uniform integer draws from closed ranges, seeded ChaCha8.
///
/// Draw order is fixed: `xi` by node, then `tau` by `(i, j)` ascending.
pub fn random_parameters(
    spec: &NetworkSpec,
    seed: u64,
    xi_range: (i64, i64),
    tau_range: (i64, i64),
) -> Result<TimingParameters<i64>> {
    let closed = |(lo, hi): (i64, i64), what: &str| {
        Uniform::new_inclusive(lo, hi)
            .map_err(|_| Error::InvalidParameter(format!("{what} range [{lo}, {hi}] is empty")))
    };
    if xi_range.0 < 1 {
        return Err(Error::InvalidParameter(format!(
            "processing times must be positive, range starts at {}",
            xi_range.0
        )));
    }
    if tau_range.0 < 0 {
        return Err(Error::InvalidParameter(format!(
            "transmission times must be nonnegative, range starts at {}",
            tau_range.0
        )));
    }
    let xi_dist = closed(xi_range, "xi")?;
    let tau_dist = closed(tau_range, "tau")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi = (0..spec.size()).map(|_| xi_dist.sample(&mut rng)).collect();
    let mut keys: Vec<(usize, usize)> = spec.arcs().into_iter().map(|(j, i)| (i, j)).collect();
    keys.sort_unstable();
    let tau = keys
        .into_iter()
        .map(|k| (k, tau_dist.sample(&mut rng)))
        .collect();
    Ok(TimingParameters { xi, tau })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum TopologyFile {
    Regular { n: usize },
    Arcs(Vec<[usize; 2]>),
}

/// On-disk network description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    #[serde(rename = "N")]
    size: usize,
    topology: TopologyFile,
    xi: Vec<RawScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<Vec<(usize, usize, RawScalar)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau_matrix: Option<serde_json::Value>,
}

impl NetworkFile {
    pub fn from_parts<T: Scalar>(spec: &NetworkSpec, params: &TimingParameters<T>) -> Self {
        let topology = match spec.topology() {
            Topology::Regular { n } => TopologyFile::Regular { n: *n },
            Topology::Arcs(arcs) => {
                TopologyFile::Arcs(arcs.iter().map(|&(j, i)| [j + 1, i + 1]).collect())
            }
        };
        NetworkFile {
            size: spec.size(),
            topology,
            xi: params.xi.iter().map(|v| v.to_raw()).collect(),
            tau: Some(
                params
                    .tau
                    .iter()
                    .map(|(&(i, j), v)| (j + 1, i + 1, v.to_raw()))
                    .collect(),
            ),
            tau_matrix: None,
        }
    }

    pub fn into_parts<T: Scalar>(self) -> Result<(NetworkSpec, TimingParameters<T>)> {
        let spec = match &self.topology {
            TopologyFile::Regular { n } => NetworkSpec::regular_ring(self.size, *n)?,
            TopologyFile::Arcs(arcs) => {
                let mut zero_based = Vec::with_capacity(arcs.len());
                for (idx, &[j, i]) in arcs.iter().enumerate() {
                    if i == 0 || j == 0 {
                        return Err(Error::InvalidNetwork(format!(
                            "topology.arcs[{idx}]: node numbers start at 1"
                        )));
                    }
                    zero_based.push((j - 1, i - 1));
                }
                NetworkSpec::from_arcs(self.size, &zero_based)?
            }
        };
        let xi = self
            .xi
            .iter()
            .enumerate()
            .map(|(idx, raw)| {
                T::from_raw(raw).map_err(|e| Error::InvalidParameter(format!("xi[{idx}]: {e}")))
            })
            .collect::<Result<Vec<T>>>()?;
        let mut tau = BTreeMap::new();
        match (self.tau, self.tau_matrix) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidParameter(
                    "give either \"tau\" or \"tau_matrix\", not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidParameter("missing \"tau\"".into()));
            }
            (Some(list), None) => {
                for (idx, (j, i, raw)) in list.into_iter().enumerate() {
                    if i == 0 || j == 0 || i > spec.size() || j > spec.size() {
                        return Err(Error::InvalidParameter(format!(
                            "tau[{idx}]: node numbers must lie in 1..={}",
                            spec.size()
                        )));
                    }
                    let v = T::from_raw(&raw)
                        .map_err(|e| Error::InvalidParameter(format!("tau[{idx}]: {e}")))?;
                    if tau.insert((i - 1, j - 1), v).is_some() {
                        return Err(Error::InvalidParameter(format!(
                            "tau[{idx}]: arc {j} -> {i} given twice"
                        )));
                    }
                }
            }
            (None, Some(value)) => {
                let m: MaxPlusMatrix<T> = serde_json::from_value(value)?;
                if m.dims() != (spec.size(), spec.size()) {
                    return Err(Error::InvalidParameter(format!(
                        "tau_matrix is {}x{}, expected {n}x{n}",
                        m.rows(),
                        m.cols(),
                        n = spec.size()
                    )));
                }
                for i in 0..spec.size() {
                    for j in 0..spec.size() {
                        if let Ext::Fin(v) = m.get(i, j) {
                            tau.insert((i, j), v);
                        }
                    }
                }
            }
        }
        let params = TimingParameters { xi, tau };
        params.validate(&spec)?;
        Ok((spec, params))
    }
}

pub fn network_from_json<T: Scalar>(text: &str) -> Result<(NetworkSpec, TimingParameters<T>)> {
    serde_json::from_str::<NetworkFile>(text)?.into_parts()
}

pub fn network_to_json<T: Scalar>(
    spec: &NetworkSpec,
    params: &TimingParameters<T>,
) -> Result<String> {
    Ok(serde_json::to_string_pretty(&NetworkFile::from_parts(
        spec, params,
    ))?)
}

pub fn load_network<T: Scalar>(
    path: impl AsRef<Path>,
) -> Result<(NetworkSpec, TimingParameters<T>)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    network_from_json(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn save_network<T: Scalar>(
    path: impl AsRef<Path>,
    spec: &NetworkSpec,
    params: &TimingParameters<T>,
) -> Result<()> {
    params.validate(spec)?;
    std::fs::write(path, network_to_json(spec, params)?)?;
    Ok(())
}
