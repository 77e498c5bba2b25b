use std::sync::Arc;

use rayon::prelude::*;
use rayon::ThreadPool;

use super::kinematics::{deformation_state, shape_derivatives, KinematicState};
use super::material::{stvk_stress, stvk_tangent, MaterialParams};
use crate::error::{Error, Result};
use crate::fem::{dirichlet, facet_values, DofMap, FacetValues, FeCache};
use crate::linalg::{extract_blocks, BlockSystem, CsrMatrix};
use crate::mesh::{BoundaryTag, Mesh, Subdomain};
use crate::tensor::{Tensor, Vec3};

/// Time-step size and θ of the one-step-θ scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub dt: f64,
    pub theta: f64,
}

const CHUNK: usize = 64;

/// Residual and Jacobian assembly of the monolithic ALE system.
///
/// The residual of the velocity equations is scaled so that the pressure
/// unknown is the physical pressure: the pressure term carries a factor `Δt`.
pub struct Assembler<'a> {
    mesh: &'a Mesh,
    dofmap: &'a DofMap,
    params: MaterialParams,
    cache: FeCache,
    outflow: Vec<Vec<FacetValues>>,
    mesh_rows: Vec<Vec<bool>>,
    cell_dofs: Vec<Vec<usize>>,
    pattern: CsrMatrix,
    pool: Option<Arc<ThreadPool>>,
    groups: Option<Vec<Vec<usize>>>,
}

struct Local {
    r: Vec<f64>,
    a: Vec<f64>,
}

impl<'a> Assembler<'a> {
    pub fn new(mesh: &'a Mesh, dofmap: &'a DofMap, params: MaterialParams) -> Self {
        let cache = FeCache::new(mesh, dofmap);
        let mut outflow = vec![Vec::new(); mesh.n_cells()];
        for (c, list) in outflow.iter_mut().enumerate() {
            if mesh.subdomain(c) != Subdomain::Fluid {
                continue;
            }
            for f in 0..mesh.facets_per_cell() {
                if mesh.facet_tag(&mesh.cell_facet_key(c, f)) == Some(BoundaryTag::Outflow) {
                    list.push(facet_values(mesh, dofmap, c, f));
                }
            }
        }
        let mesh_rows = (0..mesh.n_cells())
            .map(|c| {
                dofmap
                    .cell_nodes(c)
                    .iter()
                    .map(|&n| mesh.subdomain(c) == Subdomain::Fluid && !dofmap.node_touches(n, Subdomain::Solid))
                    .collect()
            })
            .collect::<Vec<Vec<bool>>>();
        let cell_dofs: Vec<Vec<usize>> = (0..mesh.n_cells()).map(|c| dofmap.cell_dofs(c)).collect();
        let pattern = sparsity_pattern(mesh, dofmap, &cell_dofs, &mesh_rows);
        Assembler {
            mesh,
            dofmap,
            params,
            cache,
            outflow,
            mesh_rows,
            cell_dofs,
            pattern,
            pool: None,
            groups: None,
        }
    }

    /// Runs cell kernels on a dedicated pool of `threads` workers.
    pub fn with_threads(mut self, threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        self.pool = Some(Arc::new(pool));
        Ok(self)
    }

    /// Gives every worker the cells of one rank. Merging happens in a fixed
    /// (round, rank) order, so results do not depend on scheduling.
    pub fn with_partition(mut self, owner: &[usize], n_parts: usize) -> Self {
        let mut groups = vec![Vec::new(); n_parts];
        for (c, &r) in owner.iter().enumerate() {
            groups[r].push(c);
        }
        self.groups = Some(groups);
        self
    }

    pub fn threads(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.current_num_threads())
    }

    pub fn mesh(&self) -> &Mesh {
        self.mesh
    }

    pub fn dofmap(&self) -> &DofMap {
        self.dofmap
    }

    pub fn params(&self) -> &MaterialParams {
        &self.params
    }

    pub fn pattern(&self) -> &CsrMatrix {
        &self.pattern
    }

    /// Residual with constrained rows zeroed.
    pub fn residual(&self, x: &[f64], x_old: &[f64], step: StepParams) -> Result<Vec<f64>> {
        let mut r = vec![0.0; self.dofmap.n_dofs()];
        self.run(x, x_old, step, false, |c, loc| {
            for (k, &g) in self.cell_dofs[c].iter().enumerate() {
                r[g] += loc.r[k];
            }
        })?;
        dirichlet::zero_constrained(&mut r, self.dofmap);
        Ok(r)
    }

    /// Residual without Dirichlet treatment.
    pub fn raw_residual(&self, x: &[f64], x_old: &[f64], step: StepParams) -> Result<Vec<f64>> {
        let mut r = vec![0.0; self.dofmap.n_dofs()];
        self.run(x, x_old, step, false, |c, loc| {
            for (k, &g) in self.cell_dofs[c].iter().enumerate() {
                r[g] += loc.r[k];
            }
        })?;
        Ok(r)
    }

    /// Analytic Jacobian and residual; constrained rows become identity rows.
    pub fn jacobian(&self, x: &[f64], x_old: &[f64], step: StepParams) -> Result<(CsrMatrix, Vec<f64>)> {
        let (mut a, mut r) = self.raw_jacobian(x, x_old, step)?;
        dirichlet::apply_dirichlet(&mut a, Some(&mut r), self.dofmap);
        Ok((a, r))
    }

    /// Jacobian without Dirichlet treatment.
    pub fn raw_jacobian(&self, x: &[f64], x_old: &[f64], step: StepParams) -> Result<(CsrMatrix, Vec<f64>)> {
        let mut a = self.pattern.clone();
        let mut r = vec![0.0; self.dofmap.n_dofs()];
        self.run(x, x_old, step, true, |c, loc| {
            let dofs = &self.cell_dofs[c];
            let n = dofs.len();
            for (li, &gi) in dofs.iter().enumerate() {
                r[gi] += loc.r[li];
                for (lj, &gj) in dofs.iter().enumerate() {
                    let v = loc.a[li * n + lj];
                    match a.find(gi, gj) {
                        Some(p) => a.values_mut()[p] += v,
                        None => debug_assert!(v == 0.0, "entry ({gi}, {gj}) outside pattern"),
                    }
                }
            }
        })?;
        Ok((a, r))
    }

    pub fn block_jacobian(&self, x: &[f64], x_old: &[f64], step: StepParams) -> Result<BlockSystem> {
        let (a, _) = self.jacobian(x, x_old, step)?;
        Ok(extract_blocks(&a, &self.dofmap.block_layout()))
    }

    /// Smallest `det F` over all quadrature points.
    pub fn min_jacobian(&self, x: &[f64]) -> f64 {
        let d = self.mesh.dim();
        let mut jmin = f64::INFINITY;
        for c in 0..self.mesh.n_cells() {
            let xl: Vec<f64> = self.cell_dofs[c].iter().map(|&g| x[g]).collect();
            let nb = self.cache.values[0].len();
            for grads in &self.cache.cells[c].grads {
                let gu = gradient(&xl, 0, d, nb, grads);
                jmin = jmin.min((Tensor::identity(d) + gu).det());
            }
        }
        jmin
    }

    fn run(
        &self,
        x: &[f64],
        x_old: &[f64],
        step: StepParams,
        jac: bool,
        mut scatter: impl FnMut(usize, &Local),
    ) -> Result<()> {
        if let Some(groups) = &self.groups {
            let rounds = groups.iter().map(|g| g.len().div_ceil(CHUNK)).max().unwrap_or(0);
            for k in 0..rounds {
                let compute = || -> Result<Vec<Vec<(usize, Local)>>> {
                    groups
                        .par_iter()
                        .map(|g| {
                            let lo = (k * CHUNK).min(g.len());
                            let hi = ((k + 1) * CHUNK).min(g.len());
                            g[lo..hi]
                                .iter()
                                .map(|&c| Ok((c, self.cell_kernel(c, x, x_old, step, jac)?)))
                                .collect()
                        })
                        .collect()
                };
                let parts = match &self.pool {
                    Some(p) => p.install(compute)?,
                    None => compute()?,
                };
                for (c, loc) in parts.iter().flatten() {
                    scatter(*c, loc);
                }
            }
            return Ok(());
        }
        let n = self.mesh.n_cells();
        let width = CHUNK * self.threads();
        let mut start = 0;
        while start < n {
            let end = (start + width).min(n);
            let compute = || -> Result<Vec<Local>> {
                (start..end)
                    .into_par_iter()
                    .map(|c| self.cell_kernel(c, x, x_old, step, jac))
                    .collect()
            };
            let locals = match &self.pool {
                Some(p) => p.install(compute)?,
                None => compute()?,
            };
            for (k, loc) in locals.iter().enumerate() {
                scatter(start + k, loc);
            }
            start = end;
        }
        Ok(())
    }

    fn cell_kernel(&self, c: usize, x: &[f64], x_old: &[f64], step: StepParams, jac: bool) -> Result<Local> {
        let dofs = &self.cell_dofs[c];
        let xl: Vec<f64> = dofs.iter().map(|&g| x[g]).collect();
        let xo: Vec<f64> = dofs.iter().map(|&g| x_old[g]).collect();
        let n = dofs.len();
        let mut loc = Local {
            r: vec![0.0; n],
            a: if jac { vec![0.0; n * n] } else { Vec::new() },
        };
        match self.mesh.subdomain(c) {
            Subdomain::Fluid => {
                self.fluid_cell(c, &xl, &xo, step, &mut loc)?;
                for fv in &self.outflow[c] {
                    self.outflow_facet(c, fv, &xl, &xo, step, &mut loc)?;
                }
            }
            Subdomain::Solid => self.solid_cell(c, &xl, &xo, step, &mut loc)?,
        }
        Ok(loc)
    }

    fn degenerate(&self, c: usize, q: usize, det: f64) -> Error {
        let x = self.mesh.map_point(c, &self.cache.quad.points[q]);
        Error::MeshDegeneration {
            cell: c,
            det,
            x: x[0],
            y: x[1],
            z: x[2],
        }
    }

    fn kinematics(&self, c: usize, q: usize, gu: &Tensor) -> Result<KinematicState> {
        deformation_state(gu).map_err(|e| match e {
            Error::MeshDegeneration { det, .. } => self.degenerate(c, q, det),
            e => e,
        })
    }

    fn fluid_cell(&self, c: usize, xl: &[f64], xo: &[f64], step: StepParams, loc: &mut Local) -> Result<()> {
        let d = self.mesh.dim();
        let nb = self.cache.values[0].len();
        let np = self.cache.pvalues[0].len();
        let nl = xl.len();
        let (dt, th) = (step.dt, step.theta);
        let rho = self.params.rho_f;
        let rn = rho * self.params.nu_f;
        let mesh_rows = &self.mesh_rows[c];
        let cv = &self.cache.cells[c];
        let pofs = 2 * d * nb;
        for q in 0..self.cache.quad.len() {
            let nv = &self.cache.values[q];
            let psi = &self.cache.pvalues[q];
            let g = &cv.grads[q];
            let w = cv.jxw[q];

            let gu = gradient(xl, 0, d, nb, g);
            let gv = gradient(xl, d, d, nb, g);
            let guo = gradient(xo, 0, d, nb, g);
            let gvo = gradient(xo, d, d, nb, g);
            let u = value(xl, 0, d, nb, nv);
            let v = value(xl, d, d, nb, nv);
            let uo = value(xo, 0, d, nb, nv);
            let vo = value(xo, d, d, nb, nv);
            let p: f64 = (0..np).map(|k| xl[pofs + k] * psi[k]).sum();

            let k = self.kinematics(c, q, &gu)?;
            let ko = self.kinematics(c, q, &guo)?;
            let fit = k.f_inv_t();
            let lv = gv * k.f_inv;
            let lvo = gvo * ko.f_inv;
            let jt = th * k.j + (1.0 - th) * ko.j;
            let du = sub(&u, &uo);
            let dv = sub(&v, &vo);
            let lv_du = lv.apply(&du);
            let lv_v = lv.apply(&v);
            let lvo_vo = lvo.apply(&vo);

            let mut f = [0.0; 3];
            for a in 0..d {
                f[a] = rho * jt * dv[a] - rho * k.j * lv_du[a]
                    + dt * th * rho * k.j * lv_v[a]
                    + dt * (1.0 - th) * rho * ko.j * lvo_vo[a];
            }
            let sym = lv + lv.transpose();
            let symo = lvo + lvo.transpose();
            let pk = (sym * fit).scale(dt * th * k.j * rn) - fit.scale(dt * k.j * p)
                + (symo * ko.f_inv_t()).scale(dt * (1.0 - th) * ko.j * rn);
            let cont = k.j * lv.trace();
            let pm = gu.scale(1.0 / k.j);

            for a in 0..d {
                for i in 0..nb {
                    loc.r[(d + a) * nb + i] += w * (f[a] * nv[i] + row_dot(&pk, a, &g[i], d));
                    if mesh_rows[i] {
                        loc.r[a * nb + i] += w * row_dot(&pm, a, &g[i], d);
                    }
                }
            }
            for kk in 0..np {
                loc.r[pofs + kk] += w * cont * psi[kk];
            }
            if loc.a.is_empty() {
                continue;
            }

            let mut add_column = |col: usize, df: &Vec3, dp: &Tensor, dcont: f64, dpm: Option<&Tensor>| {
                for a in 0..d {
                    for i in 0..nb {
                        let row = (d + a) * nb + i;
                        loc.a[row * nl + col] += w * (df[a] * nv[i] + row_dot(dp, a, &g[i], d));
                        if let Some(dpm) = dpm {
                            if mesh_rows[i] {
                                loc.a[(a * nb + i) * nl + col] += w * row_dot(dpm, a, &g[i], d);
                            }
                        }
                    }
                }
                if dcont != 0.0 {
                    for kk in 0..np {
                        loc.a[(pofs + kk) * nl + col] += w * dcont * psi[kk];
                    }
                }
            };

            for cc in 0..d {
                for j in 0..nb {
                    // displacement direction
                    let dg = Tensor::unit_row(d, cc, &g[j]);
                    let sd = shape_derivatives(&k, &dg);
                    let dlv = gv * sd.df_inv;
                    let dj = sd.dj;
                    let dlv_tot = lv.scale(dj) + dlv.scale(k.j);
                    let a1 = dlv_tot.apply(&du);
                    let a2 = dlv_tot.apply(&v);
                    let mut df = [0.0; 3];
                    for a in 0..d {
                        df[a] = rho * th * dj * dv[a] - rho * a1[a] + dt * th * rho * a2[a];
                    }
                    for a in 0..d {
                        df[a] -= rho * k.j * lv.m[a][cc] * nv[j];
                    }
                    let dsym = dlv + dlv.transpose();
                    let dp = ((sym * fit).scale(dj) + (dsym * fit).scale(k.j) + (sym * sd.df_inv_t).scale(k.j))
                        .scale(dt * th * rn)
                        - (fit.scale(dj) + sd.df_inv_t.scale(k.j)).scale(dt * p);
                    let dcont = dj * lv.trace() + k.j * dlv.trace();
                    let dpm = gu.scale(-dj / (k.j * k.j)) + dg.scale(1.0 / k.j);
                    add_column(cc * nb + j, &df, &dp, dcont, Some(&dpm));

                    // velocity direction
                    let dlv = Tensor::unit_row(d, cc, &g[j]) * k.f_inv;
                    let b1 = dlv.apply(&du);
                    let b2 = dlv.apply(&v);
                    let mut df = [0.0; 3];
                    for a in 0..d {
                        df[a] = -rho * k.j * b1[a] + dt * th * rho * k.j * (b2[a] + lv.m[a][cc] * nv[j]);
                    }
                    df[cc] += rho * jt * nv[j];
                    let dp = ((dlv + dlv.transpose()) * fit).scale(dt * th * k.j * rn);
                    let dcont = k.j * dlv.trace();
                    add_column((d + cc) * nb + j, &df, &dp, dcont, None);
                }
            }
            for kk in 0..np {
                let dp = fit.scale(-dt * k.j * psi[kk]);
                add_column(pofs + kk, &[0.0; 3], &dp, 0.0, None);
            }
        }
        Ok(())
    }

    fn outflow_facet(
        &self,
        c: usize,
        fv: &FacetValues,
        xl: &[f64],
        xo: &[f64],
        step: StepParams,
        loc: &mut Local,
    ) -> Result<()> {
        let d = self.mesh.dim();
        let nb = fv.values[0].len();
        let nl = xl.len();
        let (dt, th) = (step.dt, step.theta);
        let rn = self.params.rho_f * self.params.nu_f;
        for q in 0..fv.points.len() {
            let nv = &fv.values[q];
            let g = &fv.grads[q];
            let nds = &fv.normal_ds[q];
            let gu = gradient(xl, 0, d, nb, g);
            let gv = gradient(xl, d, d, nb, g);
            let guo = gradient(xo, 0, d, nb, g);
            let gvo = gradient(xo, d, d, nb, g);
            let to_err = |e: Error| match e {
                Error::MeshDegeneration { det, .. } => {
                    let x = fv.points[q];
                    Error::MeshDegeneration {
                        cell: c,
                        det,
                        x: x[0],
                        y: x[1],
                        z: x[2],
                    }
                }
                e => e,
            };
            let k = deformation_state(&gu).map_err(to_err)?;
            let ko = deformation_state(&guo).map_err(to_err)?;
            let fit = k.f_inv_t();
            let lv = gv * k.f_inv;
            let lvo = gvo * ko.f_inv;
            let gn = (lv.transpose() * fit).apply(nds);
            let gno = (lvo.transpose() * ko.f_inv_t()).apply(nds);
            for a in 0..d {
                let t = dt * th * rn * k.j * gn[a] + dt * (1.0 - th) * rn * ko.j * gno[a];
                for i in 0..nb {
                    loc.r[(d + a) * nb + i] -= t * nv[i];
                }
            }
            if loc.a.is_empty() {
                continue;
            }
            for cc in 0..d {
                for j in 0..nb {
                    let dg = Tensor::unit_row(d, cc, &g[j]);
                    let sd = shape_derivatives(&k, &dg);
                    let dlv = gv * sd.df_inv;
                    let dgu = ((lv.transpose() * fit).scale(sd.dj)
                        + (dlv.transpose() * fit).scale(k.j)
                        + (lv.transpose() * sd.df_inv_t).scale(k.j))
                    .apply(nds);
                    let dlv = Tensor::unit_row(d, cc, &g[j]) * k.f_inv;
                    let dgv = (dlv.transpose() * fit).scale(k.j).apply(nds);
                    for a in 0..d {
                        for i in 0..nb {
                            let row = ((d + a) * nb + i) * nl;
                            loc.a[row + cc * nb + j] -= dt * th * rn * dgu[a] * nv[i];
                            loc.a[row + (d + cc) * nb + j] -= dt * th * rn * dgv[a] * nv[i];
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn solid_cell(&self, c: usize, xl: &[f64], xo: &[f64], step: StepParams, loc: &mut Local) -> Result<()> {
        let d = self.mesh.dim();
        let nb = self.cache.values[0].len();
        let nl = xl.len();
        let (dt, th) = (step.dt, step.theta);
        let rho = self.params.rho_s;
        let cv = &self.cache.cells[c];
        for q in 0..self.cache.quad.len() {
            let nv = &self.cache.values[q];
            let g = &cv.grads[q];
            let w = cv.jxw[q];
            let gu = gradient(xl, 0, d, nb, g);
            let guo = gradient(xo, 0, d, nb, g);
            let u = value(xl, 0, d, nb, nv);
            let v = value(xl, d, d, nb, nv);
            let uo = value(xo, 0, d, nb, nv);
            let vo = value(xo, d, d, nb, nv);
            let k = self.kinematics(c, q, &gu)?;
            let ko = self.kinematics(c, q, &guo)?;
            let sigma = stvk_stress(&k.e, &self.params);
            let sigma_o = stvk_stress(&ko.e, &self.params);
            let pk = (k.f * sigma).scale(dt * th) + (ko.f * sigma_o).scale(dt * (1.0 - th));
            for a in 0..d {
                let fu = u[a] - uo[a] - dt * th * v[a] - dt * (1.0 - th) * vo[a];
                let fv = rho * (v[a] - vo[a]);
                for i in 0..nb {
                    loc.r[a * nb + i] += w * fu * nv[i];
                    loc.r[(d + a) * nb + i] += w * (fv * nv[i] + row_dot(&pk, a, &g[i], d));
                }
            }
            if loc.a.is_empty() {
                continue;
            }
            for cc in 0..d {
                for j in 0..nb {
                    let dg = Tensor::unit_row(d, cc, &g[j]);
                    let sd = shape_derivatives(&k, &dg);
                    let dp = (dg * sigma + k.f * stvk_tangent(&sd.de, &self.params)).scale(dt * th);
                    let ucol = cc * nb + j;
                    let vcol = (d + cc) * nb + j;
                    for i in 0..nb {
                        let m = w * nv[j] * nv[i];
                        loc.a[(cc * nb + i) * nl + ucol] += m;
                        loc.a[(cc * nb + i) * nl + vcol] -= dt * th * m;
                        loc.a[((d + cc) * nb + i) * nl + vcol] += rho * m;
                        for a in 0..d {
                            loc.a[((d + a) * nb + i) * nl + ucol] += w * row_dot(&dp, a, &g[i], d);
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn gradient(xl: &[f64], field: usize, d: usize, nb: usize, g: &[Vec3]) -> Tensor {
    let mut t = Tensor::zeros(d);
    for a in 0..d {
        let base = (field + a) * nb;
        for (i, gi) in g.iter().enumerate() {
            let x = xl[base + i];
            for b in 0..d {
                t.m[a][b] += x * gi[b];
            }
        }
    }
    t
}

fn value(xl: &[f64], field: usize, d: usize, nb: usize, nv: &[f64]) -> Vec3 {
    let mut out = [0.0; 3];
    for (a, o) in out.iter_mut().enumerate().take(d) {
        let base = (field + a) * nb;
        *o = nv.iter().enumerate().map(|(i, n)| xl[base + i] * n).sum();
    }
    out
}

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn row_dot(t: &Tensor, a: usize, g: &Vec3, d: usize) -> f64 {
    (0..d).map(|b| t.m[a][b] * g[b]).sum()
}

fn sparsity_pattern(mesh: &Mesh, dofmap: &DofMap, cell_dofs: &[Vec<usize>], mesh_rows: &[Vec<bool>]) -> CsrMatrix {
    let n = dofmap.n_dofs();
    let d = mesh.dim();
    let mut rows: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for (c, dofs) in cell_dofs.iter().enumerate() {
        let nb = dofmap.cell_nodes(c).len();
        let nodal = &dofs[..2 * d * nb];
        let u = &dofs[..d * nb];
        match mesh.subdomain(c) {
            Subdomain::Fluid => {
                for &r in &dofs[d * nb..2 * d * nb] {
                    rows[r].extend_from_slice(dofs);
                }
                for &r in &dofs[2 * d * nb..] {
                    rows[r].extend_from_slice(nodal);
                }
                for a in 0..d {
                    for (i, &m) in mesh_rows[c].iter().enumerate() {
                        if m {
                            rows[dofs[a * nb + i]].extend_from_slice(u);
                        }
                    }
                }
            }
            Subdomain::Solid => {
                for &r in nodal {
                    rows[r].extend_from_slice(nodal);
                }
            }
        }
    }
    for r in rows.iter_mut() {
        r.sort_unstable();
        r.dedup();
    }
    CsrMatrix::from_pattern(n, &rows)
}

/// Residual of the θ-discretized system for `state` given the previous step.
pub fn assemble_residual(
    mesh: &Mesh,
    dofmap: &DofMap,
    params: &MaterialParams,
    state: &[f64],
    prev: &[f64],
    step: StepParams,
) -> Result<Vec<f64>> {
    Assembler::new(mesh, dofmap, *params).residual(state, prev, step)
}

/// Jacobian of [`assemble_residual`] split into mesh, solid and fluid blocks.
pub fn assemble_jacobian(
    mesh: &Mesh,
    dofmap: &DofMap,
    params: &MaterialParams,
    state: &[f64],
    prev: &[f64],
    step: StepParams,
) -> Result<BlockSystem> {
    Assembler::new(mesh, dofmap, *params).block_jacobian(state, prev, step)
}
