//! Single-case pipeline: configuration in, normalized quantities and CSV
//! artifacts out.

use std::path::{Path, PathBuf};

use crate::assembly::{
    assemble_geometric, assemble_load, assemble_mass, assemble_stiffness,
    assemble_transverse_mass, DofMap, GlobalSystem,
};
use crate::boundary::{build_constraints, reduce_system, rigid_inplane_gauge, ConstraintSet};
use crate::config::{Analysis, CaseConfig};
use crate::error::{Error, Result};
use crate::laminate::{inertia_matrix, section_matrices, InterfaceSide, Layup, ShearModel};
use crate::nurbs::NurbsPatch;
use crate::postproc::{
    displacement_at, modeline, sign_changes, stress_at, thickness_profile, transverse_fraction,
    write_csv_records, write_modeline, write_profile, Scales,
};
use crate::solvers::{solve_buckling, solve_modal, solve_static};

/// Modes whose transverse kinetic energy share is below this are treated as
/// in-plane and skipped when reporting frequencies.
pub const FLEXURAL_FRACTION: f64 = 0.5;

const SHEAR_GRID: usize = 21;

pub const RESULTS_HEADER: [&str; 3] = ["case_id", "quantity", "value"];

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub id: String,
    pub analysis: Analysis,
    /// Normalized quantities in output order.
    pub quantities: Vec<(String, f64)>,
    pub artifacts: Vec<PathBuf>,
}

impl CaseResult {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.quantities.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }
}

/// Discretized plate built from a configuration: patch, unknowns, supports.
#[derive(Debug, Clone)]
pub struct Plate {
    pub patch: NurbsPatch,
    pub dofs: DofMap,
    pub layup: Layup,
    pub model: ShearModel,
    pub constraints: ConstraintSet,
    pub scales: Scales,
}

impl Plate {
    pub fn from_config(cfg: &CaseConfig) -> Result<Self> {
        cfg.validate()?;
        let dims = cfg.dimensions()?;
        let material = cfg.material()?;
        let patch = NurbsPatch::rectangle(dims.a, dims.b, cfg.degree, cfg.mesh, cfg.mesh)?;
        let dofs = DofMap::for_patch(&patch);
        let constraints = build_constraints(&patch, &dofs, &cfg.edge_condition()?)?;
        Ok(Plate {
            patch,
            dofs,
            layup: cfg.layup()?,
            model: cfg.shear_model,
            constraints,
            scales: Scales {
                a: dims.a,
                h: dims.h,
                e2: material.e2,
                rho: material.rho,
                q0: cfg.load_magnitude,
            },
        })
    }

    fn stiffness_system(&self) -> Result<GlobalSystem> {
        let section = section_matrices(&self.layup, self.model)?;
        Ok(GlobalSystem::new(self.dofs, assemble_stiffness(&self.patch, &self.dofs, &section)?))
    }

    /// Supports plus one pin per in-plane rigid motion they leave free.
    fn gauged_constraints(&self) -> ConstraintSet {
        let mut cs = self.constraints.clone();
        for dof in rigid_inplane_gauge(&self.patch, &self.dofs, &self.constraints) {
            cs.fix(dof);
        }
        cs
    }
}

/// Run one configuration. Files go to `out` (or the configured output
/// directory); with neither, only the in-memory result is produced.
pub fn run_case(cfg: &CaseConfig, out: Option<&Path>) -> Result<CaseResult> {
    cfg.validate()?;
    let out = out.or(cfg.output.as_deref());
    run_validated(cfg, out).map_err(|e| e.in_case(&cfg.id))
}

fn run_validated(cfg: &CaseConfig, out: Option<&Path>) -> Result<CaseResult> {
    let plate = Plate::from_config(cfg)?;
    let mut result = CaseResult {
        id: cfg.id.clone(),
        analysis: cfg.analysis,
        quantities: Vec::new(),
        artifacts: Vec::new(),
    };
    match cfg.analysis {
        Analysis::Static => run_static(cfg, &plate, out, &mut result)?,
        Analysis::Modal => run_modal(cfg, &plate, out, &mut result)?,
        Analysis::Buckling => run_buckling(cfg, &plate, out, &mut result)?,
    }
    if let Some(dir) = out {
        let path = dir.join("results.csv");
        let rows: Vec<Vec<String>> = result
            .quantities
            .iter()
            .map(|(name, v)| vec![result.id.clone(), name.clone(), crate::postproc::fmt_f64(*v)])
            .collect();
        write_csv_records(&path, &RESULTS_HEADER, &rows)?;
        result.artifacts.insert(0, path);
    }
    Ok(result)
}

fn run_static(cfg: &CaseConfig, plate: &Plate, out: Option<&Path>, res: &mut CaseResult) -> Result<()> {
    let load = cfg
        .transverse_load()
        .ok_or_else(|| Error::Config("static analysis needs a transverse load".into()))?;
    let f = assemble_load(&plate.patch, &plate.dofs, &load)?;
    let sys = plate.stiffness_system()?.with_load(f);
    let reduced = reduce_system(&sys, &plate.gauged_constraints())?;
    let q = solve_static(&reduced)?;

    let (patch, dofs, layup, model, s) = (&plate.patch, &plate.dofs, &plate.layup, plate.model, &plate.scales);
    let (a, b, h) = (s.a, load.b, s.h);
    let (xc, yc) = (a / 2.0, b / 2.0);
    let side = InterfaceSide::default();
    let w = displacement_at(patch, dofs, &q, xc, yc)?.w;
    let bottom = stress_at(patch, dofs, &q, layup, model, xc, yc, -h / 2.0, side)?;
    let top = stress_at(patch, dofs, &q, layup, model, xc, yc, h / 2.0, side)?;
    let corner = stress_at(patch, dofs, &q, layup, model, 0.0, 0.0, h / 2.0, side)?;
    let edge = stress_at(patch, dofs, &q, layup, model, xc, 0.0, 0.0, InterfaceSide::Above)?;
    res.quantities.extend([
        ("w_bar".to_string(), s.deflection(w)),
        ("sigma_x_bar".to_string(), s.stress(bottom.sigma_xx)),
        ("sigma_y_bar".to_string(), s.stress(top.sigma_yy)),
        ("tau_xy_bar".to_string(), s.stress(corner.tau_xy)),
        ("tau_yz_bar".to_string(), s.shear(edge.tau_yz)),
    ]);

    if let Some(dir) = out {
        if cfg.profile_points > 0 {
            let rows = thickness_profile(patch, dofs, &q, layup, model, s, xc, yc, cfg.profile_points)?;
            let path = dir.join("profile_center.csv");
            write_profile(&path, &rows)?;
            res.artifacts.push(path);
        }
        let line = modeline(patch, dofs, &q, cfg.mode_line)?;
        let path = dir.join(format!("profile_deflection_{}.csv", cfg.mode_line.name()));
        write_modeline(&path, &line)?;
        res.artifacts.push(path);
    }
    Ok(())
}

fn run_modal(cfg: &CaseConfig, plate: &Plate, out: Option<&Path>, res: &mut CaseResult) -> Result<()> {
    let inertia = inertia_matrix(&plate.layup, plate.model);
    let m = assemble_mass(&plate.patch, &plate.dofs, &inertia)?;
    let m_w = assemble_transverse_mass(&plate.patch, &plate.dofs, &inertia)?;
    let sys = plate.stiffness_system()?.with_mass(m.clone());
    // rigid in-plane motions stay in and come out as zero frequencies
    let reduced = reduce_system(&sys, &plate.constraints)?;

    let mut request = (4 * cfg.modes + 16).min(reduced.len());
    let flexural = loop {
        let modal = solve_modal(&reduced, request)?;
        let picked: Vec<(f64, Vec<f64>)> = modal
            .frequencies
            .into_iter()
            .zip(modal.modes)
            .filter(|(_, q)| transverse_fraction(&m, &m_w, q) >= FLEXURAL_FRACTION)
            .take(cfg.modes)
            .collect();
        if picked.len() == cfg.modes || request == reduced.len() {
            break picked;
        }
        request = reduced.len();
    };
    if flexural.len() < cfg.modes {
        return Err(Error::Eigen(format!(
            "only {} flexural modes found, {} requested",
            flexural.len(),
            cfg.modes
        )));
    }

    for (k, (omega, q)) in flexural.iter().enumerate() {
        res.quantities.push((format!("omega_bar_{}", k + 1), plate.scales.frequency(*omega)));
        if let Some(dir) = out {
            let path = dir.join(format!("mode_{}_{}.csv", k + 1, cfg.mode_line.name()));
            write_modeline(&path, &modeline(&plate.patch, &plate.dofs, q, cfg.mode_line)?)?;
            res.artifacts.push(path);
        }
    }
    Ok(())
}

fn run_buckling(cfg: &CaseConfig, plate: &Plate, out: Option<&Path>, res: &mut CaseResult) -> Result<()> {
    let load = cfg
        .prebuckling_load()
        .ok_or_else(|| Error::Config("buckling analysis needs an in-plane load".into()))?;
    let kg = assemble_geometric(&plate.patch, &plate.dofs, &load)?;
    let sys = plate.stiffness_system()?.with_geometric(kg);
    let reduced = reduce_system(&sys, &plate.gauged_constraints())?;
    let buckling = solve_buckling(&reduced, cfg.modes)?;

    for (k, (factor, q)) in buckling.critical_loads.iter().zip(&buckling.modes).enumerate() {
        let n = k + 1;
        let line = modeline(&plate.patch, &plate.dofs, q, cfg.mode_line)?;
        let w: Vec<f64> = line.iter().map(|(_, d)| d.w).collect();
        let (ws_max, w_max) = grid_maxima(plate, q)?;
        res.quantities.extend([
            (format!("lambda_bar_{n}"), plate.scales.buckling(factor * cfg.load_magnitude)),
            (format!("half_waves_{n}"), half_waves(&w, w_max) as f64),
            (format!("shear_fraction_{n}"), ws_max / w_max),
        ]);
        if let Some(dir) = out {
            let path = dir.join(format!("mode_{n}_{}.csv", cfg.mode_line.name()));
            write_modeline(&path, &line)?;
            res.artifacts.push(path);
        }
    }
    Ok(())
}

/// Half-waves of `w` along a sampled line. Values below `1e-6` of the
/// plate maximum count as zero; a line with nothing above that is nodal and
/// has no half-waves.
pub fn half_waves(line_w: &[f64], plate_w_max: f64) -> usize {
    let floor = 1e-6 * plate_w_max;
    let kept: Vec<f64> = line_w.iter().map(|&v| if v.abs() <= floor { 0.0 } else { v }).collect();
    if kept.iter().all(|&v| v == 0.0) {
        0
    } else {
        sign_changes(&kept) + 1
    }
}

/// `(max|w_s|, max|w|)` over a uniform grid of the plate.
pub fn grid_maxima(plate: &Plate, q: &[f64]) -> Result<(f64, f64)> {
    let rect = plate
        .patch
        .affine_rect()
        .ok_or_else(|| Error::Geometry("grid sampling needs a rectangular patch".into()))?;
    let n = SHEAR_GRID - 1;
    let (mut ws_max, mut w_max) = (0.0f64, 0.0f64);
    for i in 0..=n {
        for j in 0..=n {
            let x = rect.x0 + rect.width() * i as f64 / n as f64;
            let y = rect.y0 + rect.height() * j as f64 / n as f64;
            let d = displacement_at(&plate.patch, &plate.dofs, q, x, y)?;
            ws_max = ws_max.max(d.ws.abs());
            w_max = w_max.max(d.w.abs());
        }
    }
    if w_max == 0.0 {
        return Err(Error::Degenerate("mode has no transverse deflection".into()));
    }
    Ok((ws_max, w_max))
}
