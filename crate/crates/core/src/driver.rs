//! Benchmark runs, time-series output and the thread-scaling harness.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::fem::{distribute_dofs, DofMap, ElementPair};
use crate::linalg::{extract_blocks, gmres, BlockLdu};
use crate::mesh::{build_box3d_mesh, build_fsi2_mesh, Box3dGeometry, Fsi2Geometry, Mesh};
use crate::partition::partition_mesh;
use crate::physics::{evaluate_drag_lift, evaluate_point, inflow_profile, Assembler, Benchmark, FsiState};
use crate::tensor::Vec3;
use crate::time::{advance, LinearSolverConfig, NewtonConfig, NewtonStats, ThetaScheme};

/// Mesh, dofs and evaluation points of a configured benchmark.
pub struct Problem {
    pub cfg: SolverConfig,
    pub mesh: Mesh,
    pub dofmap: DofMap,
    pub eval_points: Vec<Vec3>,
}

impl Problem {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.material.validate()?;
        let (mesh, eval_points) = match cfg.benchmark {
            Benchmark::Fsi2 => (build_fsi2_mesh(cfg.refine_level)?, vec![Fsi2Geometry::REFERENCE_POINT]),
            Benchmark::Box3d => (build_box3d_mesh(cfg.refine_level)?, Box3dGeometry::EVAL_POINTS.to_vec()),
        };
        let dofmap = distribute_dofs(&mesh, ElementPair::new(cfg.order, mesh.dim()))?;
        Ok(Problem {
            cfg,
            mesh,
            dofmap,
            eval_points,
        })
    }

    pub fn assembler(&self) -> Result<Assembler<'_>> {
        let asm = Assembler::new(&self.mesh, &self.dofmap, self.cfg.material);
        if self.cfg.threads > 1 {
            let part = partition_mesh(&self.mesh, self.cfg.threads, self.cfg.partition)?;
            asm.with_threads(self.cfg.threads)
                .map(|a| a.with_partition(&part.owner, part.n_parts))
        } else {
            asm.with_threads(1)
        }
    }

    pub fn inflow(&self, t: f64, x: &Vec3) -> Vec3 {
        inflow_profile(t, x, self.cfg.benchmark, self.cfg.mean_velocity())
    }
}

/// One output row: functionals after an accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRow {
    pub t: f64,
    /// Displacement at every evaluation point.
    pub displacements: Vec<Vec3>,
    /// Drag, lift and (3D) spanwise force.
    pub force: Vec3,
    pub newton_iters: usize,
    pub avg_gmres_iters: f64,
}

/// Time loop over a [`Problem`].
pub struct Simulation<'p> {
    pub problem: &'p Problem,
    pub asm: Assembler<'p>,
    pub scheme: ThetaScheme,
    pub linear: LinearSolverConfig,
    pub newton: NewtonConfig,
    pub state: FsiState,
}

impl<'p> Simulation<'p> {
    pub fn new(problem: &'p Problem) -> Result<Self> {
        let cfg = &problem.cfg;
        Ok(Simulation {
            asm: problem.assembler()?,
            scheme: cfg.scheme()?,
            linear: cfg.linear(),
            newton: cfg.newton(),
            state: FsiState::zeros(&problem.dofmap, cfg.t_start),
            problem,
        })
    }

    /// Advances one step and returns the Newton record.
    pub fn step(&mut self) -> Result<NewtonStats> {
        let t_new = self.state.t + self.scheme.dt();
        let p = self.problem;
        let (next, stats) = advance(
            &self.asm,
            &self.state,
            t_new,
            &self.scheme,
            self.linear,
            &self.newton,
            &|t, x| p.inflow(t, x),
        )?;
        self.state = next;
        Ok(stats)
    }

    pub fn functionals(&self, stats: &NewtonStats) -> Result<TimeSeriesRow> {
        let p = self.problem;
        let displacements = p
            .eval_points
            .iter()
            .map(|x| evaluate_point(&p.mesh, &p.dofmap, &self.state.values, x))
            .collect::<Result<Vec<_>>>()?;
        let force = evaluate_drag_lift(&p.mesh, &p.dofmap, &p.cfg.material, &self.state.values)?;
        Ok(TimeSeriesRow {
            t: self.state.t,
            displacements,
            force,
            newton_iters: stats.iterations,
            avg_gmres_iters: stats.mean_gmres_iterations(),
        })
    }
}

pub fn csv_columns(benchmark: Benchmark) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    match benchmark {
        Benchmark::Fsi2 => {
            cols.extend(["ux", "uy", "drag", "lift"].map(String::from));
        }
        Benchmark::Box3d => {
            for p in 1..=4 {
                for c in ["ux", "uy", "uz"] {
                    cols.push(format!("p{p}_{c}"));
                }
            }
            cols.extend(["drag", "lift", "side_force"].map(String::from));
        }
    }
    cols.extend(["newton_iters", "avg_gmres_iters"].map(String::from));
    cols
}

/// `#`-prefixed header: run metadata, then the column names.
pub fn csv_header(cfg: &SolverConfig) -> String {
    let m = &cfg.material;
    format!(
        "# benchmark={} refine_level={} order={} theta={} dt={} t_start={} t_end={} v_mean={}\n\
         # rho_f={} nu_f={} rho_s={} lambda={} mu={}\n# {}\n",
        cfg.benchmark.name(),
        cfg.refine_level,
        cfg.order,
        cfg.theta_value(),
        cfg.dt,
        cfg.t_start,
        cfg.t_end,
        cfg.mean_velocity(),
        m.rho_f,
        m.nu_f,
        m.rho_s,
        m.lambda,
        m.mu,
        csv_columns(cfg.benchmark).join(",")
    )
}

pub fn csv_row(row: &TimeSeriesRow, dim: usize) -> String {
    let mut f: Vec<String> = vec![format!("{:.6}", row.t)];
    for u in &row.displacements {
        f.extend(u[..dim].iter().map(|x| format!("{x:.9e}")));
    }
    f.extend(row.force[..dim].iter().map(|x| format!("{x:.9e}")));
    f.push(row.newton_iters.to_string());
    f.push(format!("{:.3}", row.avg_gmres_iters));
    f.join(",")
}

/// Parsed time-series file.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub meta: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn read_time_series(text: &str) -> Result<TimeSeries> {
    let mut meta = BTreeMap::new();
    let mut columns = Vec::new();
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let s = line.trim();
        if s.is_empty() {
            continue;
        }
        if let Some(c) = s.strip_prefix('#') {
            let c = c.trim();
            if c.contains('=') {
                for kv in c.split_whitespace() {
                    if let Some((k, v)) = kv.split_once('=') {
                        meta.insert(k.to_string(), v.to_string());
                    }
                }
            } else {
                columns = c.split(',').map(|x| x.trim().to_string()).collect();
            }
            continue;
        }
        let vals = s
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Csv {
                line: i + 1,
                msg: e.to_string(),
            })?;
        if vals.len() != columns.len() {
            return Err(Error::Csv {
                line: i + 1,
                msg: format!("expected {} fields, found {}", columns.len(), vals.len()),
            });
        }
        if let Some(last) = rows.last().map(|r: &Vec<f64>| r[0]) {
            if vals[0] <= last {
                return Err(Error::Csv {
                    line: i + 1,
                    msg: "time column must increase".into(),
                });
            }
        }
        rows.push(vals);
    }
    Ok(TimeSeries { meta, columns, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub csv_path: PathBuf,
    pub rows: Vec<TimeSeriesRow>,
    pub min_jacobian: f64,
}

/// Runs the configured time loop, writing one CSV row per step.
///
/// Rows are flushed as they are produced, so a failed run leaves the
/// completed steps on disk. The error is returned together with the path.
pub fn run(cfg: &SolverConfig) -> std::result::Result<RunSummary, (Error, Option<PathBuf>)> {
    let problem = Problem::new(cfg.clone()).map_err(|e| (e, None))?;
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| (e.into(), None))?;
    let path = cfg.output_dir.join(format!("{}.csv", cfg.prefix()));
    let with_path = |e: Error| (e, Some(path.clone()));
    let mut out = BufWriter::new(File::create(&path).map_err(|e| with_path(e.into()))?);
    out.write_all(csv_header(cfg).as_bytes()).map_err(|e| with_path(e.into()))?;
    out.flush().map_err(|e| with_path(e.into()))?;
    let mut sim = Simulation::new(&problem).map_err(with_path)?;
    let mut rows = Vec::new();
    let mut min_jacobian = f64::INFINITY;
    for _ in 0..cfg.n_steps() {
        let stats = sim.step().map_err(with_path)?;
        min_jacobian = min_jacobian.min(stats.min_jacobian);
        let row = sim.functionals(&stats).map_err(with_path)?;
        writeln!(out, "{}", csv_row(&row, problem.mesh.dim())).map_err(|e| with_path(e.into()))?;
        out.flush().map_err(|e| with_path(e.into()))?;
        rows.push(row);
    }
    Ok(RunSummary {
        csv_path: path,
        rows,
        min_jacobian,
    })
}

/// Timings of one assembly and one preconditioned solve at a thread count.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub threads: usize,
    pub n_dofs: usize,
    pub t_assemble: f64,
    pub t_solve: f64,
    pub t_fluid: f64,
    pub t_solid: f64,
    pub t_mesh: f64,
    pub gmres_iters: usize,
}

pub const SCALING_COLUMNS: &str = "threads,n_dofs,t_assemble_s,t_solve_s,t_fluid_s,t_solid_s,t_mesh_s,gmres_iters";

/// Measures Jacobian assembly and one block-preconditioned GMRES solve for
/// each thread count. The linearization point is the first step of a run
/// started at `t_start` with the inflow fully developed.
///
/// Assembly time is the best of `repeats` runs.
pub fn scaling_run(cfg: &SolverConfig, thread_counts: &[usize], repeats: usize) -> Result<Vec<ScalingRow>> {
    let problem = Problem::new(cfg.clone())?;
    let scheme = cfg.scheme()?;
    let step = scheme.step_params();
    let prev = FsiState::zeros(&problem.dofmap, cfg.t_start);
    let mut x = prev.clone();
    let t = cfg.t_start + cfg.dt;
    x.inject_dirichlet(&problem.dofmap, &|p| inflow_profile(2.0_f64.max(t), p, cfg.benchmark, cfg.mean_velocity()));
    let layout = problem.dofmap.block_layout();
    let linear = cfg.linear();
    let mut rows = Vec::new();
    for &threads in thread_counts {
        let part = partition_mesh(&problem.mesh, threads, cfg.partition)?;
        let asm = Assembler::new(&problem.mesh, &problem.dofmap, cfg.material)
            .with_threads(threads)?
            .with_partition(&part.owner, part.n_parts);
        let mut t_assemble = f64::INFINITY;
        let mut jac = None;
        for _ in 0..repeats.max(1) {
            let t0 = Instant::now();
            let (a, r) = asm.jacobian(&x.values, &prev.values, step)?;
            t_assemble = t_assemble.min(t0.elapsed().as_secs_f64());
            jac = Some((a, r));
        }
        let (a, r) = jac.expect("at least one assembly");
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        let t0 = Instant::now();
        let (iters, timings) = pool.install(|| -> Result<_> {
            let sys = extract_blocks(&a, &layout);
            let ldu = BlockLdu::new(sys, &linear.blocks_for(step.dt * step.theta), layout.fluid_velocity)?;
            let b = layout.to_block_order(&r);
            let out = gmres(ldu.system(), &ldu, &b, linear.gmres)?;
            Ok((out.iterations, ldu.timings()))
        })?;
        rows.push(ScalingRow {
            threads,
            n_dofs: problem.dofmap.n_dofs(),
            t_assemble,
            t_solve: t0.elapsed().as_secs_f64(),
            t_fluid: timings.fluid.as_secs_f64(),
            t_solid: timings.solid.as_secs_f64(),
            t_mesh: timings.mesh.as_secs_f64(),
            gmres_iters: iters,
        });
    }
    Ok(rows)
}

pub fn write_scaling_csv(path: &Path, rows: &[ScalingRow]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{SCALING_COLUMNS}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{}",
            r.threads, r.n_dofs, r.t_assemble, r.t_solve, r.t_fluid, r.t_solid, r.t_mesh, r.gmres_iters
        )?;
    }
    out.flush()?;
    Ok(())
}
