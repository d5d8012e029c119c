//! Benchmark structures, built programmatically so meshes can be refined.

use std::f64::consts::PI;

use mixed_rod::model::{Component, Material, Model, ModelBuilder, ModelError};
use mixed_rod::so3::{align_first_axis, exp_so3};
use mixed_rod::Vec3;

/// What a case is checked against.
#[derive(Debug, Clone, PartialEq)]
pub enum Oracle {
    None,
    /// Straight cantilever rolled up by an end moment about `z`.
    Rolling {
        moment: f64,
        ei: f64,
    },
    /// Circle of the given circumference unrolled into a straight segment.
    Unrolling {
        length: f64,
    },
    /// Transverse tip load on a straight cantilever; `load` is the final load.
    Elastica {
        ei: f64,
        length: f64,
        load: f64,
    },
    /// Tabulated tip data at given load levels.
    Reference {
        quantity: Quantity,
        rows: Vec<(f64, [f64; 3])>,
        rel_tol: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    TipPosition,
    TipDisplacement,
}

#[derive(Debug, Clone)]
pub struct Case {
    pub name: String,
    pub model: Model,
    /// Node reported in `path.csv`.
    pub monitor: usize,
    /// Arc-length parameter per node for centerline output, in node order.
    pub params: Vec<f64>,
    pub oracle: Oracle,
    /// Load carried by the load program at full scale (load control).
    pub full_load: f64,
}

pub const CASE_NAMES: [&str; 12] = [
    "frame_indifference",
    "rolling",
    "unrolling",
    "elastica",
    "bent_cantilever",
    "bent_cantilever_stated",
    "l_frame",
    "l_frame_torsion",
    "arch",
    "spiral",
    "williams",
    "star_dome",
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CaseError {
    #[error("unknown case `{0}` (known: {known})", known = CASE_NAMES.join(", "))]
    Unknown(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Builds a case by name; `mesh` overrides the element count of the case's
/// principal subdivision.
pub fn case(name: &str, mesh: Option<usize>) -> Result<Case, CaseError> {
    match name {
        "frame_indifference" => frame_indifference(mesh.unwrap_or(8), 8),
        "rolling" => rolling(mesh.unwrap_or(10)),
        "unrolling" => unrolling(mesh.unwrap_or(10)),
        "elastica" => elastica(mesh.unwrap_or(20)),
        "bent_cantilever" => bent_cantilever(mesh.unwrap_or(16)),
        "bent_cantilever_stated" => bent_cantilever_stated(mesh.unwrap_or(16)),
        "l_frame" => l_frame(mesh.unwrap_or(8)),
        "l_frame_torsion" => l_frame_torsion(mesh.unwrap_or(8)),
        "arch" => arch(mesh.unwrap_or(100)),
        "spiral" => spiral(mesh.unwrap_or(100)),
        "williams" => williams(mesh.unwrap_or(10)),
        "star_dome" => star_dome(mesh.unwrap_or(2)),
        other => Err(CaseError::Unknown(other.to_string())),
    }
}

/// A case read from a model file: no oracle, the controlled node (or the
/// last node) is monitored.
pub fn case_from_file(path: &std::path::Path) -> Result<Case, CaseError> {
    let model = mixed_rod::model::load_model(path)?;
    let monitor = match model.program.control {
        mixed_rod::model::Control::Displacement { node, .. } => node,
        mixed_rod::model::Control::Load => model.nodes.len() - 1,
    };
    Ok(Case {
        name: path.file_stem().map_or("model".into(), |s| s.to_string_lossy().into_owned()),
        params: chord_params(&model),
        model,
        monitor,
        oracle: Oracle::None,
        full_load: 0.0,
    })
}

/// Model file text of a case, as shipped in `cases/`.
pub fn case_file_text(c: &Case) -> String {
    format!("# {} benchmark, written by `rod export`\n{}", c.name, c.model.to_text())
}

/// Cumulative chord length along node order.
fn chord_params(model: &Model) -> Vec<f64> {
    let mut s = vec![0.0];
    for w in model.nodes.windows(2) {
        let last = *s.last().unwrap();
        s.push(last + (w[1].position - w[0].position).norm());
    }
    s
}

fn straight_cantilever(b: &mut ModelBuilder, length: f64, n: usize, material: Material) -> (usize, usize) {
    b.material(0, material);
    let root = b.node(Vec3::zeros());
    let ids = b.line(root, Vec3::new(length, 0.0, 0.0), n, 0);
    b.clamp(root);
    (root, *ids.last().unwrap())
}

/// Two members of length 10 meeting at a right angle at the origin: the
/// fixed end on the `y` axis, the free end on the `x` axis.
fn l_frame_builder(per_member: usize) -> (ModelBuilder, usize, usize, usize) {
    let mut b = ModelBuilder::new();
    b.material(0, Material::new(1e6, 1e3, 1e3, 1e3));
    let root = b.node(Vec3::new(0.0, 10.0, 0.0));
    let corner = *b.line(root, Vec3::zeros(), per_member, 0).last().unwrap();
    let tip = *b.line(corner, Vec3::new(10.0, 0.0, 0.0), per_member, 0).last().unwrap();
    b.joint(corner);
    (b, root, corner, tip)
}

pub fn frame_indifference(per_member: usize, steps: usize) -> Result<Case, CaseError> {
    let (mut b, root, _, tip) = l_frame_builder(per_member);
    b.fix_displacement(root).prescribe_rotation(root, Vec3::new(2.0 * PI, 0.0, 0.0)).steps(steps);
    let model = b.build()?;
    Ok(Case {
        name: "frame_indifference".into(),
        params: chord_params(&model),
        model,
        monitor: tip,
        oracle: Oracle::None,
        full_load: 0.0,
    })
}

pub fn l_frame(per_member: usize) -> Result<Case, CaseError> {
    let (mut b, root, _, tip) = l_frame_builder(per_member);
    b.clamp(root).force(tip, Vec3::new(0.0, 0.0, -5.0)).steps(10);
    let model = b.build()?;
    Ok(Case {
        name: "l_frame".into(),
        params: chord_params(&model),
        model,
        monitor: tip,
        oracle: Oracle::Reference {
            quantity: Quantity::TipDisplacement,
            rows: vec![(5.0, [-1.7482, 0.4253, -6.7611])],
            rel_tol: 0.01,
        },
        full_load: 5.0,
    })
}

pub fn l_frame_torsion(per_member: usize) -> Result<Case, CaseError> {
    let (mut b, root, _, tip) = l_frame_builder(per_member);
    b.clamp(root).moment(tip, Vec3::new(200.0, 0.0, 0.0)).steps(20);
    let model = b.build()?;
    Ok(Case {
        name: "l_frame_torsion".into(),
        params: chord_params(&model),
        model,
        monitor: tip,
        oracle: Oracle::None,
        full_load: 200.0,
    })
}

pub fn rolling(n: usize) -> Result<Case, CaseError> {
    let (moment, ei) = (4.0 * PI, 2.0);
    let mut b = ModelBuilder::new();
    let (_, tip) = straight_cantilever(&mut b, 1.0, n, Material::new(10.0, ei, ei, ei));
    // The half circle is a double bifurcation point of the planar path
    // under a dead end moment; an odd step count steps over it.
    b.moment(tip, Vec3::new(0.0, 0.0, moment)).steps(5);
    let model = b.build()?;
    Ok(Case {
        name: "rolling".into(),
        params: chord_params(&model),
        model,
        monitor: tip,
        oracle: Oracle::Rolling { moment, ei },
        full_load: moment,
    })
}

pub fn unrolling(n: usize) -> Result<Case, CaseError> {
    let (length, ei) = (1.0, 2.0);
    let kappa = 2.0 * PI / length;
    let mut b = ModelBuilder::new();
    b.material(0, Material::new(10.0, ei, ei, ei));
    let mut params = Vec::with_capacity(n + 1);
    let mut ids = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let s = length * i as f64 / n as f64;
        let id = b.node(crate::oracles::unrolling_reference(length, s));
        b.frame(id, exp_so3(&Vec3::new(0.0, 0.0, kappa * s)));
        if i > 0 {
            b.element(ids[i - 1], id, 0);
        }
        params.push(s);
        ids.push(id);
    }
    let tip = ids[n];
    b.clamp(ids[0]).moment(tip, Vec3::new(0.0, 0.0, -ei * kappa)).steps(4);
    Ok(Case {
        name: "unrolling".into(),
        model: b.build()?,
        monitor: tip,
        params,
        oracle: Oracle::Unrolling { length },
        full_load: ei * kappa,
    })
}

pub fn elastica(n: usize) -> Result<Case, CaseError> {
    let (length, ei) = (100.0, 1000.0);
    let load = 10.0 * ei / (length * length);
    let mut b = ModelBuilder::new();
    let (_, tip) = straight_cantilever(&mut b, length, n, Material::new(1e7, ei, ei, ei));
    b.force(tip, Vec3::new(0.0, -load, 0.0)).steps(10);
    let model = b.build()?;
    Ok(Case {
        name: "elastica".into(),
        params: chord_params(&model),
        model,
        monitor: tip,
        oracle: Oracle::Elastica { ei, length, load },
        full_load: load,
    })
}

/// One eighth of a circle of radius 100 in the `xy` plane, tip load along
/// `z`, with the section constants the tabulated tip data were computed for.
pub fn bent_cantilever(n: usize) -> Result<Case, CaseError> {
    let ei = 1e7 / 12.0;
    bent_cantilever_with(n, Material::new(1e7, ei, ei, ei))
}

/// The same geometry with `D = diag(1e6)` and `AE = 1e3`. These constants
/// do not reproduce the tabulated tip data; the case is kept to show that.
pub fn bent_cantilever_stated(n: usize) -> Result<Case, CaseError> {
    let mut c = bent_cantilever_with(n, Material::new(1e3, 1e6, 1e6, 1e6))?;
    c.name = "bent_cantilever_stated".into();
    Ok(c)
}

pub fn bent_cantilever_with(n: usize, material: Material) -> Result<Case, CaseError> {
    let radius = 100.0;
    let sweep = PI / 4.0;
    let mut b = ModelBuilder::new();
    b.material(0, material);
    let mut ids = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let phi = sweep * i as f64 / n as f64;
        let id = b.node(Vec3::new(radius * phi.sin(), radius * (1.0 - phi.cos()), 0.0));
        b.frame(id, exp_so3(&Vec3::new(0.0, 0.0, phi)));
        if i > 0 {
            b.element(ids[i - 1], id, 0);
        }
        ids.push(id);
    }
    let tip = ids[n];
    b.clamp(ids[0]).force(tip, Vec3::new(0.0, 0.0, 600.0)).steps(60);
    let model = b.build()?;
    Ok(Case {
        name: "bent_cantilever".into(),
        params: chord_params(&model),
        model,
        monitor: tip,
        oracle: Oracle::Reference {
            quantity: Quantity::TipPosition,
            rows: vec![(300.0, [58.80, 22.26, 40.19]), (600.0, [47.18, 15.70, 53.50])],
            rel_tol: 0.005,
        },
        full_load: 600.0,
    })
}

/// Circular arch of radius 100 spanning 215 degrees, clamped at the left
/// end, pinned at the right, driven down at the crown with a small
/// horizontal perturbation.
pub fn arch(n: usize) -> Result<Case, CaseError> {
    arch_with(n, 8.0, 120.0, 240)
}

pub fn arch_with(n: usize, perturbation: f64, depth: f64, steps: usize) -> Result<Case, CaseError> {
    assert!(n.is_multiple_of(2), "arch mesh must be even so a node sits at the crown");
    let radius = 100.0;
    let sweep = 215f64.to_radians();
    let start = PI / 2.0 + sweep / 2.0;
    let mut b = ModelBuilder::new();
    b.material(0, Material::new(1e8, 1e6, 1e6, 1e6));
    let mut ids = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let theta = start - sweep * i as f64 / n as f64;
        let id = b.node(Vec3::new(radius * theta.cos(), radius * theta.sin(), 0.0));
        b.frame(id, align_first_axis(&Vec3::new(theta.sin(), -theta.cos(), 0.0)));
        if i > 0 {
            b.element(ids[i - 1], id, 0);
        }
        ids.push(id);
    }
    let crown = ids[n / 2];
    b.clamp(ids[0]).fix_displacement(ids[n]);
    if perturbation != 0.0 {
        b.force(crown, Vec3::new(perturbation, 0.0, 0.0));
    }
    b.displacement_control(crown, Component::Y, -depth).steps(steps);
    let model = b.build()?;
    Ok(Case {
        name: "arch".into(),
        params: chord_params(&model),
        model,
        monitor: crown,
        oracle: Oracle::None,
        full_load: 0.0,
    })
}

/// Straight cantilever of length 1000 under end moments about `x` and `y`,
/// applied in a single step.
pub fn spiral(n: usize) -> Result<Case, CaseError> {
    let k = 8.333e2;
    let mut b = ModelBuilder::new();
    let (_, tip) = straight_cantilever(&mut b, 1000.0, n, Material::new(100.0, k, k, k));
    b.moment(tip, Vec3::new(10.0, 10.0, 0.0)).steps(1);
    let model = b.build()?;
    Ok(Case {
        name: "spiral".into(),
        params: chord_params(&model),
        model,
        monitor: tip,
        oracle: Oracle::None,
        full_load: 10.0,
    })
}

/// Section properties of a solid circular bar.
pub fn circular_section(d: f64, e: f64, nu: f64) -> Material {
    let a = PI * d * d / 4.0;
    let i = PI * d.powi(4) / 64.0;
    let g = e / (2.0 * (1.0 + nu));
    Material::new(e * a, e * i, e * i, g * 2.0 * i)
}

/// Shallow two-member toggle frame, both supports clamped, crown driven down.
pub fn williams(per_member: usize) -> Result<Case, CaseError> {
    let span = 65.715;
    let rise = 0.98;
    let mut b = ModelBuilder::new();
    b.material(0, circular_section(0.721, 199714.0, 0.3));
    let left = b.node(Vec3::zeros());
    let crown = *b.line(left, Vec3::new(span / 2.0, rise, 0.0), per_member, 0).last().unwrap();
    let right = *b.line(crown, Vec3::new(span, 0.0, 0.0), per_member, 0).last().unwrap();
    b.joint(crown).clamp(left).clamp(right);
    b.displacement_control(crown, Component::Y, -1.5).steps(60);
    let model = b.build()?;
    Ok(Case {
        name: "williams".into(),
        params: chord_params(&model),
        model,
        monitor: crown,
        oracle: Oracle::None,
        full_load: 0.0,
    })
}

/// Twenty-four member star dome, best-effort geometry: crown, an inner ring
/// of six nodes and an outer ring of six pinned supports.
pub fn star_dome(per_member: usize) -> Result<Case, CaseError> {
    let mut b = ModelBuilder::new();
    b.material(0, Material::new(9.6051e5, 2.5361e5, 2.5361e5, 1.5465e5));
    let crown = b.node(Vec3::new(0.0, 0.0, 8.216));
    let inner: Vec<usize> = (0..6)
        .map(|k| {
            let a = PI / 3.0 * k as f64;
            b.node(Vec3::new(25.0 * a.cos(), 25.0 * a.sin(), 6.216))
        })
        .collect();
    let outer: Vec<usize> = (0..6)
        .map(|k| {
            let a = PI / 3.0 * k as f64 + PI / 6.0;
            b.node(Vec3::new(50.0 * a.cos(), 50.0 * a.sin(), 0.0))
        })
        .collect();
    for k in 0..6 {
        b.connect(crown, inner[k], per_member, 0);
    }
    for k in 0..6 {
        b.connect(inner[k], inner[(k + 1) % 6], per_member, 0);
    }
    for k in 0..6 {
        b.connect(inner[k], outer[k], per_member, 0);
        b.connect(inner[(k + 1) % 6], outer[k], per_member, 0);
    }
    for &o in &outer {
        b.fix_displacement(o);
    }
    for &j in inner.iter().chain([&crown]) {
        b.joint(j);
    }
    b.displacement_control(crown, Component::Z, -12.0).steps(48);
    let model = b.build()?;
    Ok(Case {
        name: "star_dome".into(),
        params: (0..model.nodes.len()).map(|i| i as f64).collect(),
        model,
        monitor: crown,
        oracle: Oracle::None,
        full_load: 0.0,
    })
}
