//! Benchmark cases with their published reference values.
//!
//! Each table id expands into concrete case configurations; every case
//! carries the quantities it is compared on. Values are the isogeometric
//! refined-plate results, listed per shear model in the order of
//! [`ShearModel::ALL`].

use crate::boundary::LayupKind;
use crate::config::{Analysis, CaseConfig, LoadType, MaterialKind};
use crate::error::{Error, Result};
use crate::laminate::ShearModel;
use crate::postproc::AxisLine;

pub const TABLE_IDS: [&str; 9] = [
    "table2", "table3", "table4", "table5", "table6", "table7", "table8", "table9", "table10",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceEntry {
    pub case_id: String,
    pub quantity: String,
    pub value: f64,
    /// Table and row the value comes from.
    pub source: String,
    /// Relative tolerance.
    pub tolerance: f64,
    /// Compare absolute values (the published value drops the sign).
    pub magnitude_only: bool,
}

impl ReferenceEntry {
    pub fn relative_error(&self, computed: f64) -> f64 {
        let (c, r) = if self.magnitude_only {
            (computed.abs(), self.value.abs())
        } else {
            (computed, self.value)
        };
        ((c - r) / r).abs()
    }

    pub fn passes(&self, computed: f64) -> bool {
        self.relative_error(computed) <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCase {
    pub config: CaseConfig,
    pub references: Vec<ReferenceEntry>,
}

/// Cases for one table id, or for every table with `"all"`.
pub fn table_cases(id: &str) -> Result<Vec<BenchCase>> {
    let key = id.trim().to_ascii_lowercase();
    let cases = match key.as_str() {
        "all" => TABLE_IDS.iter().flat_map(|t| table_cases(t).unwrap()).collect(),
        "table2" => table2(),
        "table3" => table3(),
        "table4" => table4(),
        "table5" => table5(),
        "table6" => table6(),
        "table7" => table7(),
        "table8" => table8(),
        "table9" => table9(),
        "table10" => table10(),
        _ => {
            return Err(Error::Config(format!(
                "unknown table id `{}`; valid ids: {}, all",
                id.trim(),
                TABLE_IDS.join(", ")
            )))
        }
    };
    Ok(cases)
}

fn base(id: String, analysis: Analysis, model: ShearModel) -> CaseConfig {
    CaseConfig {
        id,
        analysis,
        material: MaterialKind::MaterialI,
        e1_over_e2: None,
        layup: vec![0.0, 90.0],
        fractions: None,
        layup_kind: LayupKind::CrossPly,
        a_over_h: Some(10.0),
        a: None,
        b: None,
        h: None,
        bc: "SSSS".into(),
        shear_model: model,
        degree: 3,
        mesh: 11,
        load: match analysis {
            Analysis::Static => Some(LoadType::Sinusoidal),
            Analysis::Modal => None,
            Analysis::Buckling => Some(LoadType::Uniaxial),
        },
        load_magnitude: 1.0,
        modes: 1,
        mode_line: AxisLine::MidY,
        profile_points: 11,
        output: None,
    }
}

fn material_ii(mut cfg: CaseConfig, ratio: f64) -> CaseConfig {
    cfg.material = MaterialKind::MaterialIi;
    cfg.e1_over_e2 = Some(ratio);
    cfg
}

fn cross_ply(pairs: usize) -> Vec<f64> {
    (0..2 * pairs).map(|i| if i % 2 == 0 { 0.0 } else { 90.0 }).collect()
}

fn entry(case_id: &str, quantity: &str, value: f64, source: String, tolerance: f64) -> ReferenceEntry {
    ReferenceEntry {
        case_id: case_id.to_string(),
        quantity: quantity.to_string(),
        value,
        source,
        tolerance,
        magnitude_only: false,
    }
}

fn models() -> impl Iterator<Item = (usize, ShearModel)> {
    ShearModel::ALL.into_iter().enumerate()
}

fn table2() -> Vec<BenchCase> {
    // [mesh index][model]
    const W: [[f64; 5]; 3] = [
        [1.2159, 1.2159, 1.2129, 1.2093, 1.2041],
        [1.2161, 1.2161, 1.2131, 1.2096, 1.2043],
        [1.2161, 1.2161, 1.2131, 1.2096, 1.2043],
    ];
    const SX: [[f64; 5]; 3] = [
        [-0.7351, -0.7351, -0.7366, -0.7379, -0.7397],
        [-0.7421, -0.7421, -0.7436, -0.7449, -0.7467],
        [-0.7443, -0.7443, -0.7458, -0.7471, -0.7489],
    ];
    let mut out = Vec::new();
    for (k, mesh) in [7, 11, 15].into_iter().enumerate() {
        for (i, m) in models() {
            let id = format!("t2-m{mesh}-{}", m.name());
            let mut cfg = base(id.clone(), Analysis::Static, m);
            cfg.mesh = mesh;
            let src = format!("table2 {mesh}x{mesh} {}", m.name());
            out.push(BenchCase {
                references: vec![
                    entry(&id, "w_bar", W[k][i], src.clone(), 0.002),
                    entry(&id, "sigma_x_bar", SX[k][i], src, 0.003),
                ],
                config: cfg,
            });
        }
    }
    out
}

fn table3() -> Vec<BenchCase> {
    // w, sigma_x, sigma_y, tau_xy, tau_yz per model
    const SSSS: [[f64; 5]; 5] = [
        [1.2161, -0.7421, 0.7421, 0.053, 0.3181],
        [1.2161, -0.7421, 0.7421, 0.053, 0.3181],
        [1.2131, -0.7436, 0.7436, 0.053, 0.3252],
        [1.2096, -0.7449, 0.7449, 0.0531, 0.3319],
        [1.2043, -0.7467, 0.7467, 0.0531, 0.3369],
    ];
    const SFSF: [[f64; 5]; 5] = [
        [1.990, 0.25472, 1.2192, 0.0121, 0.4507],
        [1.990, 0.25472, 1.2192, 0.0121, 0.4507],
        [1.9851, 0.2555, 1.221, 0.0121, 0.46],
        [1.9794, 0.2562, 1.2225, 0.0122, 0.4686],
        [1.9712, 0.2572, 1.2247, 0.0122, 0.4744],
    ];
    const QUANTITIES: [&str; 5] = ["w_bar", "sigma_x_bar", "sigma_y_bar", "tau_xy_bar", "tau_yz_bar"];
    let mut out = Vec::new();
    for (bc, rows) in [("SSSS", SSSS), ("SFSF", SFSF)] {
        for (i, m) in models() {
            let id = format!("t3-{}-{}", bc.to_ascii_lowercase(), m.name());
            let mut cfg = base(id.clone(), Analysis::Static, m);
            cfg.bc = bc.into();
            let src = format!("table3 {bc} {}", m.name());
            let references = QUANTITIES
                .iter()
                .zip(rows[i])
                .map(|(q, v)| {
                    let mut e = entry(&id, q, v, src.clone(), 0.005);
                    e.magnitude_only = *q == "tau_xy_bar" || (bc == "SFSF" && *q == "sigma_x_bar");
                    e
                })
                .collect();
            out.push(BenchCase { config: cfg, references });
        }
    }
    out
}

fn table4() -> Vec<BenchCase> {
    const W: [[f64; 4]; 5] = [
        [1.6669, 1.2161, 1.1018, 1.0651],
        [1.6669, 1.2161, 1.1018, 1.0651],
        [1.6538, 1.2131, 1.1011, 1.065],
        [1.6382, 1.2096, 1.1002, 1.065],
        [1.6154, 1.2043, 1.0989, 1.065],
    ];
    let mut out = Vec::new();
    for (i, m) in models() {
        for (k, ah) in [5.0, 10.0, 20.0, 100.0].into_iter().enumerate() {
            let id = format!("t4-ah{ah}-{}", m.name());
            let mut cfg = base(id.clone(), Analysis::Static, m);
            cfg.a_over_h = Some(ah);
            let src = format!("table4 a/h={ah} {}", m.name());
            out.push(BenchCase {
                references: vec![entry(&id, "w_bar", W[i][k], src, 0.002)],
                config: cfg,
            });
        }
    }
    out
}

fn table5() -> Vec<BenchCase> {
    const RATIOS: [f64; 5] = [3.0, 10.0, 20.0, 30.0, 40.0];
    // [N][model][ratio]
    const OMEGA: [(usize, [[f64; 5]; 5]); 4] = [
        (
            1,
            [
                [6.2169, 6.9887, 7.8211, 8.5051, 9.0872],
                [6.2169, 6.9887, 7.8211, 8.5051, 9.0872],
                [6.2189, 6.9965, 7.838, 8.5317, 9.1237],
                [6.2224, 7.0066, 7.8585, 8.563, 9.1662],
                [6.2296, 7.0231, 7.8892, 8.6089, 9.2275],
            ],
        ),
        (
            2,
            [
                [6.5008, 8.1954, 9.6265, 10.5348, 11.1716],
                [6.5008, 8.1954, 9.6265, 10.5348, 11.1716],
                [6.5012, 8.193, 9.6205, 10.5268, 11.1628],
                [6.5034, 8.1939, 9.6201, 10.5261, 11.1629],
                [6.5094, 8.2021, 9.6316, 10.5418, 11.1832],
            ],
        ),
        (
            3,
            [
                [6.5558, 8.4052, 9.9181, 10.8547, 11.5012],
                [6.5558, 8.4052, 9.9181, 10.8547, 11.5012],
                [6.5567, 8.4066, 9.9211, 10.8604, 11.5103],
                [6.5596, 8.4122, 9.9313, 10.8758, 11.5314],
                [6.5663, 8.4259, 9.9555, 10.9106, 11.5768],
            ],
        ),
        (
            5,
            [
                [6.5842, 8.5126, 10.0674, 11.0197, 11.673],
                [6.5842, 8.5126, 10.0674, 11.0197, 11.673],
                [6.5854, 8.5156, 10.0741, 11.031, 11.6894],
                [6.5885, 8.5229, 10.0882, 11.0523, 11.7182],
                [6.5957, 8.5394, 10.1185, 11.0964, 11.7757],
            ],
        ),
    ];
    let mut out = Vec::new();
    for (n, rows) in OMEGA {
        for (i, m) in models() {
            for (k, ratio) in RATIOS.into_iter().enumerate() {
                let id = format!("t5-n{n}-e{ratio}-{}", m.name());
                let mut cfg = material_ii(base(id.clone(), Analysis::Modal, m), ratio);
                cfg.layup = cross_ply(n);
                cfg.a_over_h = Some(5.0);
                let src = format!("table5 N={n} E1/E2={ratio} {}", m.name());
                out.push(BenchCase {
                    references: vec![entry(&id, "omega_bar_1", rows[i][k], src, 0.003)],
                    config: cfg,
                });
            }
        }
    }
    out
}

fn table6() -> Vec<BenchCase> {
    const OMEGA: [[f64; 5]; 5] = [
        [8.3547, 10.5681, 11.1053, 11.2752, 11.3003],
        [8.3547, 10.5681, 11.1053, 11.2752, 11.3003],
        [8.4018, 10.5812, 11.109, 11.2758, 11.3004],
        [8.4564, 10.5965, 11.1133, 11.2758, 11.3006],
        [8.5355, 10.6186, 11.1196, 11.2776, 11.3009],
    ];
    let mut out = Vec::new();
    for (i, m) in models() {
        for (k, ah) in [4.0, 10.0, 20.0, 50.0, 100.0].into_iter().enumerate() {
            let id = format!("t6-ah{ah}-{}", m.name());
            let mut cfg = material_ii(base(id.clone(), Analysis::Modal, m), 40.0);
            cfg.a_over_h = Some(ah);
            let src = format!("table6 a/h={ah} {}", m.name());
            out.push(BenchCase {
                references: vec![entry(&id, "omega_bar_1", OMEGA[i][k], src, 0.003)],
                config: cfg,
            });
        }
    }
    out
}

/// Boundary conditions of the frequency sweep, in increasing stiffness.
pub const TABLE7_BCS: [&str; 6] = ["SFSF", "SFSC", "SSSS", "SSSC", "SCSC", "CCCC"];

fn table7() -> Vec<BenchCase> {
    const OMEGA: [[f64; 6]; 5] = [
        [8.1554, 9.0832, 11.673, 13.0041, 14.1566, 15.2991],
        [8.1554, 9.0832, 11.673, 13.0041, 14.1566, 15.2991],
        [8.1661, 9.0971, 11.6894, 13.0463, 14.2418, 15.4558],
        [8.1853, 9.1201, 11.7182, 13.1062, 14.3513, 15.6438],
        [8.2238, 9.1646, 11.7757, 13.2122, 14.5318, 15.9367],
    ];
    let mut out = Vec::new();
    for (i, m) in models() {
        for (k, bc) in TABLE7_BCS.into_iter().enumerate() {
            let id = format!("t7-{}-{}", bc.to_ascii_lowercase(), m.name());
            let mut cfg = material_ii(base(id.clone(), Analysis::Modal, m), 40.0);
            cfg.layup = cross_ply(5);
            cfg.a_over_h = Some(5.0);
            cfg.bc = bc.into();
            let src = format!("table7 {bc} {}", m.name());
            out.push(BenchCase {
                references: vec![entry(&id, "omega_bar_1", OMEGA[i][k], src, 0.005)],
                config: cfg,
            });
        }
    }
    out
}

fn table8() -> Vec<BenchCase> {
    // (a/h, theta, per-model values)
    const LAMBDA: [(f64, f64, [f64; 5]); 6] = [
        (4.0, 30.0, [9.3522, 9.3522, 9.6731, 9.9211, 10.2046]),
        (4.0, 45.0, [8.3966, 8.3966, 8.6472, 8.9414, 9.3869]),
        (10.0, 30.0, [17.2797, 17.2797, 17.3495, 17.4311, 17.5489]),
        (10.0, 45.0, [18.1545, 18.1545, 18.2383, 18.3354, 18.4737]),
        (100.0, 30.0, [20.5042, 20.5042, 20.5052, 20.5063, 20.5078]),
        (100.0, 45.0, [21.6664, 21.6664, 21.6676, 21.6689, 21.6707]),
    ];
    let mut out = Vec::new();
    for (ah, theta, values) in LAMBDA {
        for (i, m) in models() {
            let id = format!("t8-ah{ah}-th{theta}-{}", m.name());
            let mut cfg = material_ii(base(id.clone(), Analysis::Buckling, m), 40.0);
            cfg.layup = vec![theta, -theta];
            cfg.layup_kind = LayupKind::AnglePly;
            cfg.a_over_h = Some(ah);
                    let src = format!("table8 a/h={ah} theta={theta} {}", m.name());
            let mut references = vec![entry(&id, "lambda_bar_1", values[i], src, 0.005)];
            if theta == 45.0 {
                let waves = if ah == 4.0 { 2.0 } else { 1.0 };
                let src = format!("table8 mode shape a/h={ah} theta=45");
                references.push(entry(&id, "half_waves_1", waves, src, 1e-12));
            }
            out.push(BenchCase { config: cfg, references });
        }
    }
    out
}

fn biaxial(id: String, m: ShearModel, ratio: f64, ah: f64) -> CaseConfig {
    let mut cfg = material_ii(base(id, Analysis::Buckling, m), ratio);
    cfg.layup = vec![0.0, 90.0, 0.0];
    cfg.a_over_h = Some(ah);
    cfg.load = Some(LoadType::Biaxial);
    cfg.mode_line = AxisLine::MidX;
    cfg
}

fn table9() -> Vec<BenchCase> {
    const LAMBDA: [[f64; 3]; 5] = [
        [5.1067, 7.8382, 10.8825],
        [5.1067, 7.8382, 10.8825],
        [5.1077, 7.8288, 10.8549],
        [5.1105, 7.8228, 10.8336],
        [5.1171, 7.8238, 10.8247],
    ];
    let mut out = Vec::new();
    for (i, m) in models() {
        for (k, ratio) in [10.0, 20.0, 40.0].into_iter().enumerate() {
            let id = format!("t9-e{ratio}-{}", m.name());
            let src = format!("table9 E1/E2={ratio} {}", m.name());
            out.push(BenchCase {
                references: vec![entry(&id, "lambda_bar_1", LAMBDA[i][k], src, 0.005)],
                config: biaxial(id, m, ratio, 10.0),
            });
        }
    }
    out
}

fn table10() -> Vec<BenchCase> {
    const LAMBDA: [[f64; 4]; 5] = [
        [6.1752, 10.8825, 12.714, 13.5135],
        [6.1752, 10.8825, 12.714, 13.5135],
        [6.1571, 10.8549, 12.6957, 13.5014],
        [6.150, 10.8336, 12.6808, 13.4916],
        [6.166, 10.8247, 12.6728, 13.4858],
    ];
    let mut out = Vec::new();
    for (i, m) in models() {
        for (k, ah) in [5.0, 10.0, 15.0, 20.0].into_iter().enumerate() {
            let id = format!("t10-ah{ah}-{}", m.name());
            let src = format!("table10 a/h={ah} {}", m.name());
            out.push(BenchCase {
                references: vec![entry(&id, "lambda_bar_1", LAMBDA[i][k], src, 0.005)],
                config: biaxial(id, m, 40.0, ah),
            });
        }
    }
    out
}
