//! Experiment orchestration: configuration, target selection, runs over
//! several algorithms and targets, and CSV output.

use std::fmt;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::{betweenness_edges, random_edges, spanning_edges, Rescoring};
use crate::error::{Error, Result};
use crate::exact::{brute_force, exact_sm, resistance_diameter, BruteForce, PseudoinverseState, DEFAULT_SUBSET_BUDGET};
use crate::fast::{fast_icm, FastConfig, SumEstimatorParams};
use crate::generators::{generate_ba, generate_ws};
use crate::graph::{largest_connected_component, load_edge_list, Graph, NodeId, NodeLabelMap};
use crate::schur::approxi_sc;
use crate::selection::{Selection, Status, Step};
use crate::walks::{derive_seed, Lambda, SamplingConfig, DEFAULT_MAX_LEN_CAP};

pub const CSV_SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "algorithm,seed,target,iteration,edge_u,edge_v,info_centrality,exact_flag,elapsed_ms";
/// Largest graph for which exact centralities are recomputed per step.
pub const DEFAULT_RECOMPUTE_CAP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Exact,
    Brute,
    Approx,
    Fast,
    Random,
    Betweenness,
    Spanning,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Exact,
        Algorithm::Brute,
        Algorithm::Approx,
        Algorithm::Fast,
        Algorithm::Random,
        Algorithm::Betweenness,
        Algorithm::Spanning,
    ];

    /// The algorithms of a default comparison (everything but brute force).
    pub const COMPARE: [Algorithm; 6] = [
        Algorithm::Exact,
        Algorithm::Approx,
        Algorithm::Fast,
        Algorithm::Random,
        Algorithm::Betweenness,
        Algorithm::Spanning,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::Brute => "brute",
            Algorithm::Approx => "approx",
            Algorithm::Fast => "fast",
            Algorithm::Random => "random",
            Algorithm::Betweenness => "betweenness",
            Algorithm::Spanning => "spanning",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm '{s}'")))
    }
}

/// Where the input graph comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Ba { n: usize, m0: usize, seed: u64 },
    Ws { n: usize, k_ring: usize, p: f64, seed: u64 },
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSource::File(p) => write!(f, "{}", p.display()),
            GraphSource::Ba { n, m0, seed } => write!(f, "ba:{n},{m0},{seed}"),
            GraphSource::Ws { n, k_ring, p, seed } => write!(f, "ws:{n},{k_ring},{p},{seed}"),
        }
    }
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("cannot parse {what} from '{s}'")))
}

impl FromStr for GraphSource {
    type Err = Error;

    /// `ba:n,m0[,seed]`, `ws:n,k_ring,p[,seed]`, or a file path.
    fn from_str(s: &str) -> Result<Self> {
        let parts = |rest: &str| rest.split(',').map(str::to_owned).collect::<Vec<_>>();
        if let Some(rest) = s.strip_prefix("ba:") {
            let f = parts(rest);
            if !(2..=3).contains(&f.len()) {
                return Err(Error::InvalidParameter(format!("expected ba:n,m0[,seed], got '{s}'")));
            }
            return Ok(GraphSource::Ba {
                n: parse_num(&f[0], "n")?,
                m0: parse_num(&f[1], "m0")?,
                seed: f.get(2).map_or(Ok(0), |x| parse_num(x, "seed"))?,
            });
        }
        if let Some(rest) = s.strip_prefix("ws:") {
            let f = parts(rest);
            if !(3..=4).contains(&f.len()) {
                return Err(Error::InvalidParameter(format!("expected ws:n,k,p[,seed], got '{s}'")));
            }
            return Ok(GraphSource::Ws {
                n: parse_num(&f[0], "n")?,
                k_ring: parse_num(&f[1], "k_ring")?,
                p: parse_num(&f[2], "p")?,
                seed: f.get(3).map_or(Ok(0), |x| parse_num(x, "seed"))?,
            });
        }
        if s.trim().is_empty() {
            return Err(Error::InvalidParameter("empty graph source".into()));
        }
        Ok(GraphSource::File(PathBuf::from(s)))
    }
}

/// Which target nodes to run on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetSpec {
    /// Node labels as they appear in the input.
    Explicit(Vec<String>),
    /// This many nodes drawn uniformly among nodes of degree at least two.
    Random(usize),
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSpec::Explicit(labels) => f.write_str(&labels.join(",")),
            TargetSpec::Random(c) => write!(f, "random:{c}"),
        }
    }
}

impl FromStr for TargetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(c) = s.strip_prefix("random:") {
            return Ok(TargetSpec::Random(parse_num(c, "target count")?));
        }
        let labels: Vec<String> = s.split(',').map(|x| x.trim().to_owned()).filter(|x| !x.is_empty()).collect();
        if labels.is_empty() {
            return Err(Error::InvalidParameter("no targets given".into()));
        }
        Ok(TargetSpec::Explicit(labels))
    }
}

/// Bound on the effective resistance diameter used by FastICM.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PhiBound {
    /// Hop diameter, which bounds every resistance distance.
    #[default]
    Diameter,
    /// Exact resistance diameter; dense, so only for small graphs.
    Resistance,
    Fixed(f64),
}

impl PhiBound {
    pub fn resolve(self, g: &Graph) -> Result<f64> {
        let phi = match self {
            PhiBound::Diameter => g.diameter()? as f64,
            PhiBound::Resistance => resistance_diameter(g)?,
            PhiBound::Fixed(x) => x,
        };
        Ok(phi.max(1.0))
    }
}

impl fmt::Display for PhiBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiBound::Diameter => f.write_str("diameter"),
            PhiBound::Resistance => f.write_str("resistance"),
            PhiBound::Fixed(x) => write!(f, "{x:?}"),
        }
    }
}

impl FromStr for PhiBound {
    type Err = Error;

    /// `diameter`, `resistance`, or a number of at least one.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "diameter" => Ok(PhiBound::Diameter),
            "resistance" => Ok(PhiBound::Resistance),
            x => {
                let phi: f64 = parse_num(x, "phi")?;
                if !(phi >= 1.0 && phi.is_finite()) {
                    return Err(Error::InvalidParameter(format!("phi = {phi} must be at least 1")));
                }
                Ok(PhiBound::Fixed(phi))
            }
        }
    }
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: GraphSource,
    pub algorithms: Vec<Algorithm>,
    pub k: usize,
    pub targets: TargetSpec,
    pub epsilon: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub lambda: Lambda,
    pub rho_constant: f64,
    pub phi: PhiBound,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub recompute_cap: usize,
    pub rescoring: Rescoring,
    pub brute_budget: u128,
    pub max_len_cap: usize,
    pub resample_every: Option<usize>,
    /// When false, elapsed times are written as zero so output is byte-stable.
    pub timings: bool,
}

impl ExperimentConfig {
    /// Small-accuracy profile used by the test suites (`epsilon = 0.1`,
    /// `alpha = 0.2`).
    pub fn desk(source: GraphSource) -> Self {
        Self {
            source,
            algorithms: vec![Algorithm::Exact],
            k: 5,
            targets: TargetSpec::Random(10),
            epsilon: 0.1,
            alpha: 0.2,
            gamma: 1e-3,
            lambda: Lambda::default(),
            rho_constant: SamplingConfig::default().rho_constant,
            phi: PhiBound::Diameter,
            seed: 0,
            output: None,
            recompute_cap: DEFAULT_RECOMPUTE_CAP,
            rescoring: Rescoring::Sequential,
            brute_budget: DEFAULT_SUBSET_BUDGET,
            max_len_cap: DEFAULT_MAX_LEN_CAP,
            resample_every: None,
            timings: true,
        }
    }

    /// Published accuracy settings (`epsilon = 0.005`, `alpha = 0.05`).
    pub fn paper(source: GraphSource) -> Self {
        Self {
            epsilon: 0.005,
            alpha: 0.05,
            ..Self::desk(source)
        }
    }

    pub fn sampling(&self) -> SamplingConfig {
        SamplingConfig {
            epsilon: self.epsilon,
            gamma: self.gamma,
            lambda: self.lambda,
            rho_constant: self.rho_constant,
            max_len_cap: self.max_len_cap,
        }
    }

    pub fn fast_config(&self, g: &Graph) -> Result<FastConfig> {
        let phi = self.phi.resolve(g)?;
        Ok(FastConfig {
            estimator: SumEstimatorParams::new(self.alpha, phi)?,
            sampling: self.sampling(),
            resample_every: self.resample_every,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::InvalidParameter("no algorithm selected".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter("epsilon must lie in (0, 1)".into()));
        }
        let phi = match self.phi {
            PhiBound::Fixed(x) => x,
            _ => 1.0,
        };
        SumEstimatorParams::new(self.alpha, phi)?;
        if !(self.gamma > 0.0 && self.gamma < 1.0) || matches!(self.lambda, Lambda::Fixed(x) if !(x > 0.0 && x < 1.0)) {
            return Err(Error::InvalidParameter("gamma and lambda must lie in (0, 1)".into()));
        }
        if !(self.rho_constant > 0.0) || self.max_len_cap == 0 {
            return Err(Error::InvalidParameter("rho constant and length cap must be positive".into()));
        }
        Ok(())
    }

    /// `key=value` lines; [`ExperimentConfig::from_kv`] reads them back.
    pub fn to_kv(&self) -> String {
        let mut lines = vec![
            format!("input={}", self.source),
            format!(
                "algorithm={}",
                self.algorithms.iter().map(|a| a.as_str()).collect::<Vec<_>>().join(",")
            ),
            format!("k={}", self.k),
            format!("targets={}", self.targets),
            format!("epsilon={:?}", self.epsilon),
            format!("alpha={:?}", self.alpha),
            format!("gamma={:?}", self.gamma),
            format!("lambda={}", self.lambda),
            format!("rho_constant={:?}", self.rho_constant),
            format!("seed={}", self.seed),
            format!("recompute_cap={}", self.recompute_cap),
            format!(
                "rescoring={}",
                match self.rescoring {
                    Rescoring::Sequential => "sequential",
                    Rescoring::Static => "static",
                }
            ),
            format!("brute_budget={}", self.brute_budget),
            format!("max_len_cap={}", self.max_len_cap),
            format!("timings={}", self.timings),
            format!("phi={}", self.phi),
        ];
        if let Some(out) = &self.output {
            lines.push(format!("output={}", out.display()));
        }
        if let Some(r) = self.resample_every {
            lines.push(format!("resample_every={r}"));
        }
        lines.join("\n") + "\n"
    }

    /// Parses `key=value` lines. Blank lines and `#` comments are skipped;
    /// unset keys keep their desk-profile defaults, except `input`, which is
    /// required.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut source = None;
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key=value, got '{line}'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key == "input" {
                source = Some(value.parse::<GraphSource>()?);
            } else {
                pairs.push((i + 1, key.to_owned(), value.to_owned()));
            }
        }
        let source = source.ok_or_else(|| Error::InvalidParameter("config lacks 'input'".into()))?;
        let mut cfg = Self::desk(source);
        for (line, key, value) in pairs {
            cfg.set(&key, &value).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "input" => self.source = value.parse()?,
            "algorithm" | "algorithms" => {
                self.algorithms = value.split(',').map(str::parse).collect::<Result<_>>()?;
            }
            "k" => self.k = parse_num(value, key)?,
            "targets" => self.targets = value.parse()?,
            "epsilon" => self.epsilon = parse_num(value, key)?,
            "alpha" => self.alpha = parse_num(value, key)?,
            "gamma" => self.gamma = parse_num(value, key)?,
            "lambda" => self.lambda = value.parse()?,
            "rho_constant" | "c" => self.rho_constant = parse_num(value, key)?,
            "phi" => self.phi = value.parse()?,
            "seed" => self.seed = parse_num(value, key)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "recompute_cap" => self.recompute_cap = parse_num(value, key)?,
            "rescoring" => {
                self.rescoring = match value {
                    "sequential" => Rescoring::Sequential,
                    "static" => Rescoring::Static,
                    _ => return Err(Error::InvalidParameter(format!("unknown rescoring '{value}'"))),
                }
            }
            "brute_budget" => self.brute_budget = parse_num(value, key)?,
            "max_len_cap" => self.max_len_cap = parse_num(value, key)?,
            "resample_every" => self.resample_every = Some(parse_num(value, key)?),
            "timings" => self.timings = parse_num(value, key)?,
            _ => return Err(Error::InvalidParameter(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_kv(&fs::read_to_string(path)?)
    }
}

/// Loads or generates the input graph, keeping only its largest connected
/// component.
pub fn load_graph(source: &GraphSource) -> Result<(Graph, NodeLabelMap)> {
    let (g, labels) = match source {
        GraphSource::File(path) => load_edge_list(BufReader::new(fs::File::open(path)?))?,
        GraphSource::Ba { n, m0, seed } => (generate_ba(*n, *m0, *seed)?, NodeLabelMap::identity(*n)),
        GraphSource::Ws { n, k_ring, p, seed } => {
            let g = generate_ws(*n, *k_ring, *p, *seed)?;
            let labels = NodeLabelMap::identity(g.node_count());
            (g, labels)
        }
    };
    if g.is_connected() {
        return Ok((g, labels));
    }
    let sub = largest_connected_component(&g)?;
    log::warn!(
        "input is disconnected; keeping the largest component ({} of {} nodes)",
        sub.graph.node_count(),
        g.node_count()
    );
    let labels = labels.restrict(&sub.original);
    Ok((sub.graph, labels))
}

/// Resolves targets. Random targets are drawn without replacement among
/// nodes of degree at least two.
pub fn select_targets(g: &Graph, labels: &NodeLabelMap, spec: &TargetSpec, seed: u64) -> Result<Vec<NodeId>> {
    match spec {
        TargetSpec::Explicit(names) => names
            .iter()
            .map(|name| {
                labels
                    .id(name)
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown target label '{name}'")))
            })
            .collect(),
        TargetSpec::Random(count) => {
            let mut pool: Vec<NodeId> = (0..g.node_count()).filter(|&u| g.degree(u) >= 2).collect();
            if pool.len() < *count {
                log::warn!("only {} nodes have degree >= 2; using all of them", pool.len());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            pool.shuffle(&mut rng);
            pool.truncate(*count);
            Ok(pool)
        }
    }
}

/// Runs one algorithm for one target.
pub fn run_algorithm(
    g: &Graph,
    algorithm: Algorithm,
    v: NodeId,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<Selection> {
    let k = cfg.k;
    match algorithm {
        Algorithm::Exact => exact_sm(g, v, k),
        Algorithm::Brute => {
            let start = Instant::now();
            match brute_force(g, v, k, cfg.brute_budget)? {
                BruteForce::Optimal { edges, .. } => {
                    let elapsed = start.elapsed();
                    let steps = edges
                        .iter()
                        .enumerate()
                        .map(|(i, &edge)| Step {
                            iteration: i + 1,
                            edge,
                            endpoints: g.endpoints(edge),
                            estimate: None,
                            elapsed,
                        })
                        .collect();
                    Ok(Selection {
                        edges,
                        steps,
                        status: Status::Complete,
                    })
                }
                BruteForce::Infeasible => Ok(Selection {
                    edges: Vec::new(),
                    steps: Vec::new(),
                    status: Status::NoRemovableEdge,
                }),
            }
        }
        Algorithm::Approx => approxi_sc(g, v, k, &cfg.sampling(), seed),
        Algorithm::Fast => fast_icm(g, v, k, &cfg.fast_config(g)?, seed),
        Algorithm::Random => random_edges(g, k, seed),
        Algorithm::Betweenness => betweenness_edges(g, v, k, cfg.rescoring),
        Algorithm::Spanning => spanning_edges(g, k, cfg.rescoring),
    }
}

/// Row position within a run.
#[derive(Debug, Clone, PartialEq)]
pub enum RowKind {
    /// Centrality before any removal.
    Initial,
    Step(usize),
    /// Summary row carrying the run's final centrality and status.
    Final(String),
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowKind::Initial => f.write_str("0"),
            RowKind::Step(i) => write!(f, "{i}"),
            RowKind::Final(status) => write!(f, "final-{}", status.replace(' ', "-")),
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algorithm: String,
    pub seed: u64,
    pub target: String,
    pub row: RowKind,
    pub edge: Option<(String, String)>,
    pub info_centrality: Option<f64>,
    pub exact: bool,
    pub elapsed_ms: f64,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

impl RunRecord {
    pub fn to_csv(&self) -> String {
        let (u, w) = self.edge.clone().unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{:.3}",
            csv_field(&self.algorithm),
            self.seed,
            csv_field(&self.target),
            self.row,
            csv_field(&u),
            csv_field(&w),
            self.info_centrality.map_or(String::new(), |x| format!("{x:.12}")),
            u8::from(self.exact),
            self.elapsed_ms
        )
    }

    pub fn is_final(&self) -> bool {
        matches!(self.row, RowKind::Final(_))
    }
}

/// Exact centrality of `v` before and after each step, or `None` above the cap.
pub fn exact_trajectory(g: &Graph, v: NodeId, selection: &Selection, cap: usize) -> Result<Option<Vec<f64>>> {
    if g.node_count() > cap {
        return Ok(None);
    }
    let mut h = g.clone();
    let mut state = PseudoinverseState::new(&h)?;
    let mut values = vec![state.information_centrality(v)];
    for &e in &selection.edges {
        h.remove_edge(e)?;
        state.remove_edge(&h, e)?;
        values.push(state.information_centrality(v));
    }
    Ok(Some(values))
}

/// Outcome of one (algorithm, target) run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub algorithm: String,
    pub target: NodeId,
    pub seed: u64,
    pub selection: Option<Selection>,
    pub error: Option<String>,
    /// Exact centralities before and after each step, when recomputed.
    pub exact: Option<Vec<f64>>,
    pub elapsed: Duration,
    /// Whether the final graph passed the connectivity check.
    pub connected: bool,
}

impl RunOutcome {
    pub fn final_exact(&self) -> Option<f64> {
        self.exact.as_ref().and_then(|v| v.last().copied())
    }

    pub fn succeeded(&self) -> bool {
        self.error.is_none() && self.selection.as_ref().is_some_and(|s| s.status == Status::Complete)
    }

    pub fn records(&self, g: &Graph, labels: &NodeLabelMap, timings: bool) -> Vec<RunRecord> {
        let ms = |d: Duration| if timings { d.as_secs_f64() * 1e3 } else { 0.0 };
        let base = RunRecord {
            algorithm: self.algorithm.clone(),
            seed: self.seed,
            target: labels.label(self.target).to_owned(),
            row: RowKind::Initial,
            edge: None,
            info_centrality: None,
            exact: false,
            elapsed_ms: 0.0,
        };
        let mut rows = Vec::new();
        let Some(sel) = &self.selection else {
            rows.push(RunRecord {
                row: RowKind::Final(format!("error: {}", self.error.as_deref().unwrap_or("unknown"))),
                elapsed_ms: ms(self.elapsed),
                ..base
            });
            return rows;
        };
        if let Some(ex) = &self.exact {
            rows.push(RunRecord {
                info_centrality: Some(ex[0]),
                exact: true,
                ..base.clone()
            });
        }
        for (i, step) in sel.steps.iter().enumerate() {
            let (a, b) = g.endpoints(step.edge);
            let (value, exact) = match &self.exact {
                Some(ex) => (Some(ex[i + 1]), true),
                None => (step.estimate, false),
            };
            rows.push(RunRecord {
                row: RowKind::Step(step.iteration),
                edge: Some((labels.label(a).to_owned(), labels.label(b).to_owned())),
                info_centrality: value,
                exact,
                elapsed_ms: ms(step.elapsed),
                ..base.clone()
            });
        }
        let (value, exact) = rows.last().map_or((None, false), |r| (r.info_centrality, r.exact));
        rows.push(RunRecord {
            row: RowKind::Final(sel.status.as_str().to_owned()),
            info_centrality: value,
            exact,
            elapsed_ms: ms(self.elapsed),
            ..base
        });
        rows
    }
}

/// Runs `algorithm` on `v`, verifying connectivity and recomputing exact
/// centralities when the graph is small enough.
pub fn run_one(
    g: &Graph,
    algorithm: Algorithm,
    label: String,
    v: NodeId,
    cfg: &ExperimentConfig,
    seed: u64,
) -> RunOutcome {
    let start = Instant::now();
    let result = run_algorithm(g, algorithm, v, cfg, seed);
    let elapsed = start.elapsed();
    let mut outcome = RunOutcome {
        algorithm: label,
        target: v,
        seed,
        selection: None,
        error: None,
        exact: None,
        elapsed,
        connected: true,
    };
    match result {
        Ok(sel) => {
            outcome.connected = g.without_edges(&sel.edges).is_ok_and(|h| h.is_connected());
            assert!(outcome.connected, "{} returned a disconnected graph", algorithm);
            match exact_trajectory(g, v, &sel, cfg.recompute_cap) {
                Ok(ex) => outcome.exact = ex,
                Err(e) => outcome.error = Some(e.to_string()),
            }
            outcome.selection = Some(sel);
        }
        Err(e) => outcome.error = Some(e.to_string()),
    }
    outcome
}

/// All outcomes of an experiment plus the graph they refer to.
#[derive(Debug)]
pub struct Report {
    pub graph: Graph,
    pub labels: NodeLabelMap,
    pub targets: Vec<NodeId>,
    pub outcomes: Vec<RunOutcome>,
    pub timings: bool,
}

impl Report {
    pub fn records(&self) -> Vec<RunRecord> {
        self.outcomes
            .iter()
            .flat_map(|o| o.records(&self.graph, &self.labels, self.timings))
            .collect()
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.succeeded()).count()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# schema={CSV_SCHEMA_VERSION}")?;
        writeln!(out, "{CSV_HEADER}")?;
        for r in self.records() {
            writeln!(out, "{}", r.to_csv())?;
        }
        Ok(())
    }

    pub fn csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

/// Per-target seed shared by every algorithm.
pub fn target_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, index as u64 + 1)
}

/// Runs every configured algorithm on every target. Targets run in
/// parallel; outcomes are ordered by algorithm, then target.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let (graph, labels) = load_graph(&cfg.source)?;
    let targets = select_targets(&graph, &labels, &cfg.targets, cfg.seed)?;
    let jobs: Vec<(Algorithm, usize, NodeId)> = cfg
        .algorithms
        .iter()
        .flat_map(|&a| targets.iter().enumerate().map(move |(i, &v)| (a, i, v)))
        .collect();
    let outcomes = jobs
        .into_par_iter()
        .map(|(a, i, v)| run_one(&graph, a, a.as_str().to_owned(), v, cfg, target_seed(cfg.seed, i)))
        .collect();
    Ok(Report {
        graph,
        labels,
        targets,
        outcomes,
        timings: cfg.timings,
    })
}

/// Accuracy sweep: exact once per target, then ApproxiSC for every epsilon
/// and FastICM for every alpha.
pub fn sweep(cfg: &ExperimentConfig, epsilons: &[f64], alphas: &[f64]) -> Result<Report> {
    cfg.validate()?;
    let (graph, labels) = load_graph(&cfg.source)?;
    let targets = select_targets(&graph, &labels, &cfg.targets, cfg.seed)?;
    let mut jobs: Vec<(ExperimentConfig, Algorithm, String)> = vec![(cfg.clone(), Algorithm::Exact, "exact".into())];
    for &eps in epsilons {
        let mut c = cfg.clone();
        c.epsilon = eps;
        c.validate()?;
        jobs.push((c, Algorithm::Approx, format!("approx@epsilon={eps}")));
    }
    for &alpha in alphas {
        let mut c = cfg.clone();
        c.alpha = alpha;
        c.validate()?;
        jobs.push((c, Algorithm::Fast, format!("fast@alpha={alpha}")));
    }
    let work: Vec<(usize, usize, NodeId)> = (0..jobs.len())
        .flat_map(|j| targets.iter().enumerate().map(move |(i, &v)| (j, i, v)))
        .collect();
    let outcomes = work
        .into_par_iter()
        .map(|(j, i, v)| {
            let (c, a, label) = &jobs[j];
            run_one(&graph, *a, label.clone(), v, c, target_seed(cfg.seed, i))
        })
        .collect();
    Ok(Report {
        graph,
        labels,
        targets,
        outcomes,
        timings: cfg.timings,
    })
}
