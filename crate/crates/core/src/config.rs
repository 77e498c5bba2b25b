//! Run configuration in a small `key = value` format with optional sections.
//!
//! ```text
//! [problem]
//! benchmark = fsi2
//! refine_level = 1
//! [time]
//! theta = shifted_cn
//! dt = 0.005
//! ```

use std::collections::HashMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::linalg::{BlockSolverConfig, FluidStrategy, GmresConfig, InnerSolverKind, SolidStrategy};
use crate::partition::PartitionStrategy;
use crate::physics::{Benchmark, MaterialParams};
use crate::time::{LinearMethod, LinearSolverConfig, NewtonConfig, ThetaScheme, ThetaVariant};

/// Environment variable that replaces the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "FSI_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolidChoice {
    Direct,
    Schur,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluidChoice {
    Direct,
    Uzawa,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub benchmark: Benchmark,
    pub refine_level: usize,
    pub order: usize,
    /// Mean inflow velocity; `None` uses the benchmark value.
    pub mean_velocity: Option<f64>,
    pub material: MaterialParams,
    pub theta: ThetaVariant,
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub gmres_reduction: f64,
    pub gmres_max_iter: usize,
    pub gmres_restart: usize,
    pub newton_tolerance: f64,
    pub newton_max_iter: usize,
    pub quasi_newton_factor: f64,
    pub full_newton: bool,
    pub linear_solver: LinearMethod,
    pub mesh_solver: InnerSolverKind,
    pub solid_solver: SolidChoice,
    pub solid_inner: InnerSolverKind,
    pub fluid_solver: FluidChoice,
    pub fluid_inner: InnerSolverKind,
    pub uzawa_reduction: f64,
    pub threads: usize,
    pub partition: PartitionStrategy,
    pub output_dir: PathBuf,
    pub output_prefix: Option<String>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            benchmark: Benchmark::Fsi2,
            refine_level: 1,
            order: 2,
            mean_velocity: None,
            material: MaterialParams::default(),
            theta: ThetaVariant::ShiftedCrankNicolson,
            dt: 0.005,
            t_start: 0.0,
            t_end: 0.5,
            gmres_reduction: 1e3,
            gmres_max_iter: 1000,
            gmres_restart: 100,
            newton_tolerance: 1e-6,
            newton_max_iter: 30,
            quasi_newton_factor: 0.1,
            full_newton: false,
            linear_solver: LinearMethod::GmresBlockLdu,
            mesh_solver: InnerSolverKind::SparseDirect,
            solid_solver: SolidChoice::Schur,
            solid_inner: InnerSolverKind::SparseDirect,
            fluid_solver: FluidChoice::Direct,
            fluid_inner: InnerSolverKind::SparseDirect,
            uzawa_reduction: 1e2,
            threads: 1,
            partition: PartitionStrategy::Shared,
            output_dir: PathBuf::from("output"),
            output_prefix: None,
        }
    }
}

impl SolverConfig {
    pub fn scheme(&self) -> Result<ThetaScheme> {
        ThetaScheme::new(self.theta, self.dt)
    }

    pub fn theta_value(&self) -> f64 {
        self.scheme().map(|s| s.theta()).unwrap_or(f64::NAN)
    }

    pub fn mean_velocity(&self) -> f64 {
        self.mean_velocity.unwrap_or_else(|| self.benchmark.default_mean_velocity())
    }

    pub fn n_steps(&self) -> usize {
        ((self.t_end - self.t_start) / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    pub fn newton(&self) -> NewtonConfig {
        NewtonConfig {
            tolerance: self.newton_tolerance,
            max_iterations: self.newton_max_iter,
            reassembly_factor: self.quasi_newton_factor,
            always_reassemble: self.full_newton,
        }
    }

    pub fn linear(&self) -> LinearSolverConfig {
        LinearSolverConfig {
            method: self.linear_solver,
            gmres: GmresConfig {
                reduction: self.gmres_reduction,
                max_iter: self.gmres_max_iter,
                restart: self.gmres_restart,
            },
            blocks: BlockSolverConfig {
                mesh: self.mesh_solver,
                solid: match self.solid_solver {
                    SolidChoice::Direct => SolidStrategy::Direct(self.solid_inner),
                    SolidChoice::Schur => SolidStrategy::Schur {
                        dt_theta: 0.0,
                        kind: self.solid_inner,
                    },
                },
                fluid: match self.fluid_solver {
                    FluidChoice::Direct => FluidStrategy::Direct(self.fluid_inner),
                    FluidChoice::Uzawa => FluidStrategy::Uzawa {
                        velocity: self.fluid_inner,
                        inner: GmresConfig {
                            reduction: self.uzawa_reduction,
                            max_iter: 500,
                            restart: 100,
                        },
                    },
                },
            },
        }
    }

    pub fn prefix(&self) -> String {
        self.output_prefix
            .clone()
            .unwrap_or_else(|| self.benchmark.name().to_string())
    }

    /// Applies [`OUTPUT_DIR_ENV`] when set.
    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            if !dir.is_empty() {
                self.output_dir = PathBuf::from(dir);
            }
        }
    }
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("problem", &["benchmark", "refine_level", "order", "mean_velocity"]),
    ("material", &["rho_f", "nu_f", "rho_s", "lambda", "mu"]),
    ("time", &["theta", "dt", "t_start", "t_end"]),
    (
        "solver",
        &[
            "gmres_reduction",
            "gmres_max_iter",
            "gmres_restart",
            "newton_tolerance",
            "newton_max_iter",
            "quasi_newton_factor",
            "full_newton",
            "linear_solver",
            "mesh_solver",
            "solid_solver",
            "solid_inner",
            "fluid_solver",
            "fluid_inner",
            "uzawa_reduction",
        ],
    ),
    ("parallel", &["threads", "partition"]),
    ("output", &["dir", "prefix"]),
];

fn section_of(key: &str) -> Option<&'static str> {
    SECTIONS
        .iter()
        .find(|(_, keys)| keys.contains(&key))
        .map(|(s, _)| *s)
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::ConfigParse { line, msg: msg.into() }
}

fn range_err(key: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::ConfigRange {
        key: key.to_string(),
        line,
        msg: msg.into(),
    }
}

fn float(key: &str, v: &str, line: usize) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| parse_err(line, format!("{key}: expected a number, got '{v}'")))
}

fn positive(key: &str, v: &str, line: usize) -> Result<f64> {
    let x = float(key, v, line)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(range_err(key, line, format!("must be positive, got {x}")))
    }
}

fn count(key: &str, v: &str, line: usize) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| parse_err(line, format!("{key}: expected a non-negative integer, got '{v}'")))
}

fn boolean(key: &str, v: &str, line: usize) -> Result<bool> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(parse_err(line, format!("{key}: expected true or false, got '{v}'"))),
    }
}

fn inner_kind(key: &str, v: &str, line: usize) -> Result<InnerSolverKind> {
    match v {
        "direct" => Ok(InnerSolverKind::SparseDirect),
        "ilu_gmres" => Ok(InnerSolverKind::IluGmres {
            reduction: 1e2,
            max_iter: 500,
        }),
        "jacobi" => Ok(InnerSolverKind::Jacobi),
        _ => Err(parse_err(line, format!("{key}: unknown inner solver '{v}'"))),
    }
}

/// Parses a configuration; absent keys keep their defaults.
pub fn parse_config(text: &str) -> Result<SolverConfig> {
    let mut cfg = SolverConfig::default();
    let mut section: Option<String> = None;
    let mut lines: HashMap<&'static str, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        if let Some(rest) = s.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line, "unterminated section header"))?
                .trim();
            if !SECTIONS.iter().any(|(n, _)| *n == name) {
                return Err(parse_err(line, format!("unknown section '{name}'")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected 'key = value', got '{s}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let home = section_of(key).ok_or_else(|| parse_err(line, format!("unknown key '{key}'")))?;
        if let Some(sec) = &section {
            if sec != home {
                return Err(parse_err(line, format!("key '{key}' belongs to section [{home}], not [{sec}]")));
            }
        }
        let static_key = SECTIONS
            .iter()
            .flat_map(|(_, keys)| keys.iter())
            .find(|k| **k == key)
            .copied()
            .expect("known key");
        if lines.insert(static_key, line).is_some() {
            return Err(parse_err(line, format!("duplicate key '{key}'")));
        }
        match key {
            "benchmark" => {
                cfg.benchmark = match value {
                    "fsi2" => Benchmark::Fsi2,
                    "box3d" => Benchmark::Box3d,
                    _ => return Err(parse_err(line, format!("unknown benchmark '{value}'"))),
                }
            }
            "refine_level" => cfg.refine_level = count(key, value, line)?,
            "order" => {
                cfg.order = count(key, value, line)?;
                if !(1..=2).contains(&cfg.order) {
                    return Err(range_err(key, line, "element order must be 1 or 2"));
                }
            }
            "mean_velocity" => {
                let v = float(key, value, line)?;
                if v < 0.0 {
                    return Err(range_err(key, line, "must not be negative"));
                }
                cfg.mean_velocity = Some(v);
            }
            "rho_f" => cfg.material.rho_f = positive(key, value, line)?,
            "nu_f" => cfg.material.nu_f = positive(key, value, line)?,
            "rho_s" => cfg.material.rho_s = positive(key, value, line)?,
            "lambda" => cfg.material.lambda = positive(key, value, line)?,
            "mu" => cfg.material.mu = positive(key, value, line)?,
            "theta" => {
                cfg.theta = match value {
                    "implicit" => ThetaVariant::Implicit,
                    "cn" | "crank_nicolson" => ThetaVariant::CrankNicolson,
                    "shifted_cn" => ThetaVariant::ShiftedCrankNicolson,
                    other => {
                        let t = float(key, other, line)?;
                        if !(0.0..=1.0).contains(&t) {
                            return Err(range_err(key, line, format!("must lie in [0, 1], got {t}")));
                        }
                        ThetaVariant::Custom(t)
                    }
                }
            }
            "dt" => cfg.dt = positive(key, value, line)?,
            "t_start" => {
                cfg.t_start = float(key, value, line)?;
                if cfg.t_start < 0.0 {
                    return Err(range_err(key, line, "must not be negative"));
                }
            }
            "t_end" => cfg.t_end = positive(key, value, line)?,
            "gmres_reduction" => {
                cfg.gmres_reduction = positive(key, value, line)?;
                if cfg.gmres_reduction <= 1.0 {
                    return Err(range_err(key, line, "must exceed 1"));
                }
            }
            "gmres_max_iter" => cfg.gmres_max_iter = count(key, value, line)?,
            "gmres_restart" => cfg.gmres_restart = count(key, value, line)?,
            "newton_tolerance" => cfg.newton_tolerance = positive(key, value, line)?,
            "newton_max_iter" => cfg.newton_max_iter = count(key, value, line)?,
            "quasi_newton_factor" => cfg.quasi_newton_factor = positive(key, value, line)?,
            "full_newton" => cfg.full_newton = boolean(key, value, line)?,
            "linear_solver" => {
                cfg.linear_solver = match value {
                    "direct" => LinearMethod::Direct,
                    "gmres" => LinearMethod::Gmres,
                    "block_ldu" => LinearMethod::GmresBlockLdu,
                    _ => return Err(parse_err(line, format!("unknown linear solver '{value}'"))),
                }
            }
            "mesh_solver" => cfg.mesh_solver = inner_kind(key, value, line)?,
            "solid_solver" => {
                cfg.solid_solver = match value {
                    "direct" => SolidChoice::Direct,
                    "schur" => SolidChoice::Schur,
                    _ => return Err(parse_err(line, format!("unknown solid strategy '{value}'"))),
                }
            }
            "solid_inner" => cfg.solid_inner = inner_kind(key, value, line)?,
            "fluid_solver" => {
                cfg.fluid_solver = match value {
                    "direct" => FluidChoice::Direct,
                    "uzawa" => FluidChoice::Uzawa,
                    _ => return Err(parse_err(line, format!("unknown fluid strategy '{value}'"))),
                }
            }
            "fluid_inner" => cfg.fluid_inner = inner_kind(key, value, line)?,
            "uzawa_reduction" => cfg.uzawa_reduction = positive(key, value, line)?,
            "threads" => cfg.threads = count(key, value, line)?,
            "partition" => {
                cfg.partition = PartitionStrategy::from_name(value)
                    .ok_or_else(|| parse_err(line, format!("unknown partition strategy '{value}'")))?
            }
            "dir" => cfg.output_dir = PathBuf::from(value),
            "prefix" => cfg.output_prefix = Some(value.to_string()),
            _ => unreachable!("key table and match arms agree"),
        }
    }
    let at = |k: &str| lines.get(k).copied().unwrap_or(0);
    for key in ["gmres_max_iter", "gmres_restart", "newton_max_iter", "threads"] {
        let v = match key {
            "gmres_max_iter" => cfg.gmres_max_iter,
            "gmres_restart" => cfg.gmres_restart,
            "newton_max_iter" => cfg.newton_max_iter,
            _ => cfg.threads,
        };
        if v == 0 {
            return Err(range_err(key, at(key), "must be at least 1"));
        }
    }
    if cfg.quasi_newton_factor >= 1.0 {
        return Err(range_err("quasi_newton_factor", at("quasi_newton_factor"), "must be below 1"));
    }
    if cfg.t_end < cfg.t_start + cfg.dt * (1.0 - 1e-9) {
        let key = if lines.contains_key("t_end") { "t_end" } else { "dt" };
        return Err(range_err(key, at(key), "the run must contain at least one step (t_end ≥ t_start + dt)"));
    }
    let theta = cfg.theta_value();
    if !(0.0..=1.0).contains(&theta) {
        return Err(range_err("theta", at("theta"), format!("effective theta {theta} lies outside [0, 1]")));
    }
    Ok(cfg)
}

/// Serializes a configuration so that [`parse_config`] restores it.
pub fn write_config(cfg: &SolverConfig) -> String {
    let inner = |k: &InnerSolverKind| k.name();
    let mut s = String::new();
    s += "[problem]\n";
    s += &format!("benchmark = {}\n", cfg.benchmark.name());
    s += &format!("refine_level = {}\n", cfg.refine_level);
    s += &format!("order = {}\n", cfg.order);
    if let Some(v) = cfg.mean_velocity {
        s += &format!("mean_velocity = {v:e}\n");
    }
    let m = &cfg.material;
    s += "[material]\n";
    s += &format!(
        "rho_f = {:e}\nnu_f = {:e}\nrho_s = {:e}\nlambda = {:e}\nmu = {:e}\n",
        m.rho_f, m.nu_f, m.rho_s, m.lambda, m.mu
    );
    s += "[time]\n";
    s += &format!("theta = {}\n", cfg.theta.name());
    s += &format!("dt = {:e}\nt_start = {:e}\nt_end = {:e}\n", cfg.dt, cfg.t_start, cfg.t_end);
    s += "[solver]\n";
    s += &format!(
        "gmres_reduction = {:e}\ngmres_max_iter = {}\ngmres_restart = {}\n",
        cfg.gmres_reduction, cfg.gmres_max_iter, cfg.gmres_restart
    );
    s += &format!(
        "newton_tolerance = {:e}\nnewton_max_iter = {}\nquasi_newton_factor = {:e}\nfull_newton = {}\n",
        cfg.newton_tolerance, cfg.newton_max_iter, cfg.quasi_newton_factor, cfg.full_newton
    );
    s += &format!(
        "linear_solver = {}\n",
        match cfg.linear_solver {
            LinearMethod::Direct => "direct",
            LinearMethod::Gmres => "gmres",
            LinearMethod::GmresBlockLdu => "block_ldu",
        }
    );
    s += &format!("mesh_solver = {}\n", inner(&cfg.mesh_solver));
    s += &format!(
        "solid_solver = {}\nsolid_inner = {}\n",
        match cfg.solid_solver {
            SolidChoice::Direct => "direct",
            SolidChoice::Schur => "schur",
        },
        inner(&cfg.solid_inner)
    );
    s += &format!(
        "fluid_solver = {}\nfluid_inner = {}\nuzawa_reduction = {:e}\n",
        match cfg.fluid_solver {
            FluidChoice::Direct => "direct",
            FluidChoice::Uzawa => "uzawa",
        },
        inner(&cfg.fluid_inner),
        cfg.uzawa_reduction
    );
    s += "[parallel]\n";
    s += &format!("threads = {}\npartition = {}\n", cfg.threads, cfg.partition.name());
    s += "[output]\n";
    s += &format!("dir = {}\n", cfg.output_dir.display());
    if let Some(p) = &cfg.output_prefix {
        s += &format!("prefix = {p}\n");
    }
    s
}
