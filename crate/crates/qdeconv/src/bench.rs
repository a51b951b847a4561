//! Experiment runner: circuit metrics, QCV and JS distance per method, plus
//! the depth-scaling sweep.

use std::io::Write;

use qdeconv_core::deconv::opt::DeconvError;
use qdeconv_core::deconv::poly::PolyError;
use qdeconv_core::pmf::{convolve_all, discretize, js_cost_padded, PmfError};
use qdeconv_core::prep::{build_gr, build_pipeline, PrepError};
use qdeconv_core::sim::{self, SimError};
use qdeconv_core::{
    Circuit, DeconvProblem, DistributionSpec, EmpiricalPmf, GateBasis, McryMode, OptimizerConfig, Pmf,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parallel::{factorize_parallel, trust_region_parallel};

/// Default shot count, matching the reference runs.
pub const DEFAULT_SHOTS: u64 = 2048;
/// Default restarts for the trust-region split.
pub const DEFAULT_TRUST_RESTARTS: usize = 10;
/// Default restarts for polynomial factorization.
pub const DEFAULT_POLY_RESTARTS: usize = 1000;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{method:?} deconvolution failed: {reason}")]
    Deconvolution { method: Method, reason: String },
    #[error(transparent)]
    Pmf(#[from] PmfError),
    #[error(transparent)]
    Prep(#[from] PrepError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Deconvolution,
    #[serde(rename = "GR")]
    Gr,
    #[serde(rename = "GRVChain")]
    GrVChain,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Deconvolution, Method::Gr, Method::GrVChain];

    pub fn label(self) -> &'static str {
        match self {
            Method::Deconvolution => "Deconvolution",
            Method::Gr => "GR",
            Method::GrVChain => "GRVChain",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DeconvPath {
    #[default]
    TrustRegion,
    Polynomial,
}

fn default_shots() -> u64 {
    DEFAULT_SHOTS
}

fn default_basis() -> GateBasis {
    GateBasis::Hardware
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: DistributionSpec,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub deconv_path: DeconvPath,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_basis")]
    pub basis: GateBasis,
    /// Use the exact marginal in place of sampled shots.
    #[serde(default)]
    pub exact: bool,
    /// Deconvolution restarts; the path's default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    /// Also report the square root of the JS distance.
    #[serde(default)]
    pub js_sqrt: bool,
}

impl ExperimentConfig {
    pub fn new(distribution: DistributionSpec) -> Self {
        ExperimentConfig {
            distribution,
            methods: default_methods(),
            deconv_path: DeconvPath::default(),
            shots: DEFAULT_SHOTS,
            seed: 0,
            basis: default_basis(),
            exact: false,
            restarts: None,
            js_sqrt: false,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        self.distribution.validate()?;
        if self.methods.is_empty() {
            return Err(BenchError::Config("methods must not be empty".into()));
        }
        if self.shots == 0 {
            return Err(BenchError::Config("shots must be at least 1".into()));
        }
        if self.restarts == Some(0) {
            return Err(BenchError::Config("restarts must be at least 1".into()));
        }
        Ok(())
    }

    fn restarts(&self) -> usize {
        self.restarts.unwrap_or(match self.deconv_path {
            DeconvPath::TrustRegion => DEFAULT_TRUST_RESTARTS,
            DeconvPath::Polynomial => DEFAULT_POLY_RESTARTS,
        })
    }
}

/// Quantum circuit volume: active qubits times depth.
pub fn qcv(qubits: usize, depth: usize) -> usize {
    qubits * depth
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodReport {
    pub method: Method,
    pub js_distance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub js_distance_sqrt: Option<f64>,
    /// JS distance of the exact measured marginal: the method's own error.
    pub exact_js_distance: f64,
    pub circuit_depth: usize,
    pub active_qubits: usize,
    pub qcv: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor_lengths: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deconvolution_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricsReport {
    pub distribution: DistributionSpec,
    pub basis: GateBasis,
    pub shots: u64,
    pub seed: u64,
    pub exact: bool,
    pub methods: Vec<MethodReport>,
}

impl MetricsReport {
    pub fn method(&self, m: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|r| r.method == m)
    }

    /// One row per method: `method,jsDistance,circuitDepth,activeQubits,qcv`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let sqrt = self.methods.iter().any(|r| r.js_distance_sqrt.is_some());
        let mut header = vec!["method", "jsDistance"];
        if sqrt {
            header.push("jsDistanceSqrt");
        }
        header.extend(["circuitDepth", "activeQubits", "qcv"]);
        w.write_record(&header)?;
        for r in &self.methods {
            let mut row = vec![r.method.label().to_string(), r.js_distance.to_string()];
            if sqrt {
                row.push(r.js_distance_sqrt.map(|x| x.to_string()).unwrap_or_default());
            }
            row.extend([r.circuit_depth, r.active_qubits, r.qcv].map(|x| x.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A method's circuit before lowering, with the factors it loads.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub circuit: Circuit,
    pub factors: Option<Vec<Pmf>>,
    /// JS distance between the target and the factors' convolution.
    pub residual: Option<f64>,
}

fn deconv_failure(reason: impl ToString) -> BenchError {
    BenchError::Deconvolution {
        method: Method::Deconvolution,
        reason: reason.to_string(),
    }
}

/// Splits `target` along `path`.
pub fn deconvolve(target: &Pmf, path: DeconvPath, restarts: usize, seed: u64) -> Result<Vec<Pmf>, BenchError> {
    match path {
        DeconvPath::TrustRegion => {
            let problem = DeconvProblem::split(target.clone());
            let config = OptimizerConfig {
                seed,
                ..OptimizerConfig::default()
            };
            let result = trust_region_parallel(&problem, &config, restarts)
                .map_err(|e: DeconvError| deconv_failure(e))?;
            Ok(result.factors)
        }
        DeconvPath::Polynomial => {
            let result = factorize_parallel(target, restarts, seed).map_err(|e: PolyError| deconv_failure(e))?;
            Ok(result.factors)
        }
    }
}

/// Builds the circuit of `method` for `target`. Deconvolution loads each
/// factor with VChain preparations.
pub fn prepare(method: Method, target: &Pmf, cfg: &ExperimentConfig) -> Result<Prepared, BenchError> {
    Ok(match method {
        Method::Gr | Method::GrVChain => {
            let mode = if method == Method::Gr { McryMode::NoAncilla } else { McryMode::VChain };
            Prepared {
                circuit: build_gr(target, mode),
                factors: None,
                residual: None,
            }
        }
        Method::Deconvolution => {
            let factors = deconvolve(target, cfg.deconv_path, cfg.restarts(), cfg.seed)?;
            let product = convolve_all(&factors).expect("at least one factor");
            let residual = js_cost_padded(target, &product);
            Prepared {
                circuit: build_pipeline(&factors, McryMode::VChain)?,
                factors: Some(factors),
                residual: Some(residual),
            }
        }
    })
}

fn run_method(method: Method, target: &Pmf, cfg: &ExperimentConfig) -> Result<MethodReport, BenchError> {
    let prepared = prepare(method, target, cfg)?;
    let circuit = &prepared.circuit;
    let depth = circuit.transpiled_depth(cfg.basis);
    let active = circuit.active_qubits();

    let state = sim::run(circuit)?;
    let exact = state.marginal(circuit.measured())?;
    let exact_js = js_cost_padded(target, &exact);
    let js = if cfg.exact {
        exact_js
    } else {
        // each method samples on its own stream of the seed
        let stream = Method::ALL.iter().position(|&m| m == method).expect("listed") as u64;
        let outcomes = state.sample_outcomes_on(circuit.measured(), cfg.shots as usize, cfg.seed, stream)?;
        let empirical = EmpiricalPmf::from_outcomes(1 << circuit.measured().len(), &outcomes);
        js_cost_padded(target, &empirical.as_pmf())
    };
    Ok(MethodReport {
        method,
        js_distance: js,
        js_distance_sqrt: cfg.js_sqrt.then(|| js.sqrt()),
        exact_js_distance: exact_js,
        circuit_depth: depth,
        active_qubits: active,
        qcv: qcv(active, depth),
        factor_lengths: prepared.factors.map(|f| f.iter().map(|p| p.len()).collect()),
        deconvolution_residual: prepared.residual,
    })
}

/// Runs every configured method; cells run in parallel and report in config order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<MetricsReport, BenchError> {
    cfg.validate()?;
    let target = discretize(&cfg.distribution)?;
    let methods = cfg
        .methods
        .par_iter()
        .map(|&m| run_method(m, &target, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MetricsReport {
        distribution: cfg.distribution,
        basis: cfg.basis,
        shots: cfg.shots,
        seed: cfg.seed,
        exact: cfg.exact,
        methods,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub method: String,
    pub depth: usize,
}

/// Register widths the sweep accepts.
pub const SWEEP_RANGE: std::ops::RangeInclusive<usize> = 2..=12;

/// Circuits compared by the sweep at `n` qubits: direct preparation of a
/// `2^n - 1` point Gaussian, and the pipeline of its analytic split into two
/// `2^(n-1)` point Gaussians of scale `σ/√2` on the same grid spacing.
pub fn sweep_circuits(n: usize) -> Result<Vec<(&'static str, Circuit)>, BenchError> {
    if !SWEEP_RANGE.contains(&n) {
        return Err(BenchError::Config(format!("n = {n} outside {SWEEP_RANGE:?}")));
    }
    let target = discretize(&DistributionSpec::gaussian(0.0, 1.0, (1 << n) - 1))?;
    let half = 1usize << (n - 1);
    // factor grid spacing equals the target's: 6σ / (2^n - 2)
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let half_width = 3.0 * (half - 1) as f64 / ((1 << n) - 2) as f64 / scale;
    let factor = discretize(&DistributionSpec::gaussian(0.0, scale, half).with_half_width(half_width))?;
    let factors = [factor.clone(), factor];
    Ok(vec![
        ("gr", build_gr(&target, McryMode::NoAncilla)),
        ("deconv-gr", build_pipeline(&factors, McryMode::NoAncilla)?),
        ("gr-vchain", build_gr(&target, McryMode::VChain)),
        ("deconv-gr-vchain", build_pipeline(&factors, McryMode::VChain)?),
    ])
}

/// Depth of direct and deconvolved preparations for each `n`.
pub fn depth_scaling_sweep(ns: &[usize], basis: GateBasis) -> Result<Vec<SweepRow>, BenchError> {
    let per_n = ns
        .par_iter()
        .map(|&n| {
            Ok(sweep_circuits(n)?
                .into_iter()
                .map(|(method, c)| SweepRow {
                    n,
                    method: method.to_string(),
                    depth: c.transpiled_depth(basis),
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, BenchError>>()?;
    Ok(per_n.into_iter().flatten().collect())
}

/// CSV with columns `n,method,depth`.
pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
