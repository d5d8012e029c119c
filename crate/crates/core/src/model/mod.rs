//! Rod structures: nodes, elements, materials, supports, loads and the load program.

mod frames;
mod parse;

use std::collections::BTreeMap;

pub use frames::{build_reference_frames, ReferenceFrames, KINK_ANGLE};
pub use parse::{load_model, parse_model};

use crate::{Rotation, Vec3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid model: {0}")]
    Validation(String),
    #[error("cannot read model file: {0}")]
    Io(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError::Validation(msg.into()))
}

/// Section stiffnesses. Bending about frame direction 2 uses `ei1`, about
/// direction 3 uses `ei2`; twist is about direction 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub ae: f64,
    pub ei1: f64,
    pub ei2: f64,
    pub gj: f64,
}

impl Material {
    pub fn new(ae: f64, ei1: f64, ei2: f64, gj: f64) -> Self {
        Self { ae, ei1, ei2, gj }
    }

    /// Diagonal of the bending/twist stiffness `D = diag(GJ, EI1, EI2)`.
    pub fn bending_diag(&self) -> [f64; 3] {
        [self.gj, self.ei1, self.ei2]
    }

    fn check(&self, id: usize) -> Result<(), ModelError> {
        for (name, v) in [("AE", self.ae), ("EI1", self.ei1), ("EI2", self.ei2), ("GJ", self.gj)] {
            if !(v.is_finite() && v > 0.0) {
                return invalid(format!("material {id}: {name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

/// Displacement component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::X, Component::Y, Component::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["ux", "uy", "uz"][self.index()]
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ux" => Some(Self::X),
            "uy" => Some(Self::Y),
            "uz" => Some(Self::Z),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: usize,
    pub position: Vec3,
    /// Reference frame at the node (columns are the directors).
    pub frame: Rotation,
    /// Whether the frame was given explicitly rather than built.
    pub explicit_frame: bool,
    /// Rigid joint: every incident element keeps its own chord-aligned frame.
    pub joint: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: usize,
    /// Node indices (positions in `Model::nodes`).
    pub nodes: [usize; 2],
    /// Material id.
    pub material: usize,
    /// Chord length between the reference nodal positions.
    pub length: f64,
    /// Reference frames at the two element ends.
    pub frames: [Rotation; 2],
}

/// Supports, prescribed motions and nodal loads. Node fields are indices.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition {
    Fix {
        node: usize,
        component: Component,
    },
    FixRotation {
        node: usize,
    },
    Prescribe {
        node: usize,
        component: Component,
        value: f64,
    },
    /// Final rotation given as a rotation vector; step `k` of `N` uses `exp(k/N v)`.
    PrescribeRotation {
        node: usize,
        rotation: Vec3,
    },
    Force {
        node: usize,
        force: Vec3,
    },
    Moment {
        node: usize,
        moment: Vec3,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Control {
    /// Loads and prescribed values grow linearly with the step.
    Load,
    /// One displacement component is driven to `target`; nodal loads stay
    /// constant and the reaction at the driven component is the load ordinate.
    Displacement { node: usize, component: Component, target: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadProgram {
    pub steps: usize,
    pub control: Control,
}

impl Default for LoadProgram {
    fn default() -> Self {
        Self { steps: 1, control: Control::Load }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub nodes: Vec<Node>,
    pub elements: Vec<Element>,
    pub materials: BTreeMap<usize, Material>,
    pub conditions: Vec<BoundaryCondition>,
    pub program: LoadProgram,
}

/// Global numbering: all nodal `u`, all nodal `lambda`, all element `n`, all element `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofMap {
    pub nodes: usize,
    pub elements: usize,
}

impl DofMap {
    pub fn u(&self, node: usize, c: usize) -> usize {
        3 * node + c
    }
    pub fn lambda(&self, node: usize, c: usize) -> usize {
        3 * self.nodes + 3 * node + c
    }
    pub fn n(&self, element: usize, c: usize) -> usize {
        6 * self.nodes + 3 * element + c
    }
    pub fn eta(&self, element: usize) -> usize {
        6 * self.nodes + 3 * self.elements + element
    }
    pub fn len(&self) -> usize {
        6 * self.nodes + 4 * self.elements
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Global indices of one element's 16 unknowns in element order
    /// `(eta | n1 n2 n3 | u_a | u_b | lambda_a | lambda_b)`.
    pub fn element_dofs(&self, element: usize, nodes: [usize; 2]) -> [usize; 16] {
        let mut d = [0; 16];
        d[0] = self.eta(element);
        for c in 0..3 {
            d[1 + c] = self.n(element, c);
            d[4 + c] = self.u(nodes[0], c);
            d[7 + c] = self.u(nodes[1], c);
            d[10 + c] = self.lambda(nodes[0], c);
            d[13 + c] = self.lambda(nodes[1], c);
        }
        d
    }
}

impl Model {
    pub fn dof_map(&self) -> DofMap {
        DofMap { nodes: self.nodes.len(), elements: self.elements.len() }
    }

    pub fn material(&self, element: &Element) -> Material {
        self.materials[&element.material]
    }

    /// Index of the node with the given id.
    pub fn node_index(&self, id: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Nodal loads scaled by `factor`: forces and moments per node.
    pub fn nodal_loads(&self, factor: f64) -> (Vec<Vec3>, Vec<Vec3>) {
        let mut f = vec![Vec3::zeros(); self.nodes.len()];
        let mut m = vec![Vec3::zeros(); self.nodes.len()];
        for bc in &self.conditions {
            match bc {
                BoundaryCondition::Force { node, force } => f[*node] += force.scale(factor),
                BoundaryCondition::Moment { node, moment } => m[*node] += moment.scale(factor),
                _ => {}
            }
        }
        (f, m)
    }
}

/// Programmatic construction of a [`Model`]; ids follow insertion order from 0.
#[derive(Debug, Clone, Default)]
pub struct ModelBuilder {
    nodes: Vec<(usize, Vec3)>,
    frames: Vec<(usize, Rotation)>,
    joints: Vec<usize>,
    elements: Vec<(usize, usize, usize, usize)>,
    materials: Vec<(usize, Material)>,
    conditions: Vec<RawCondition>,
    steps: Option<usize>,
    control: Option<RawControl>,
}

/// A boundary condition keyed by node id, before validation.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum RawCondition {
    Fix(usize, Option<Component>),
    Prescribe(usize, Component, f64),
    PrescribeRotation(usize, Vec3),
    Force(usize, Vec3),
    Moment(usize, Vec3),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum RawControl {
    Load,
    Displacement(usize, Component, f64),
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn material(&mut self, id: usize, m: Material) -> &mut Self {
        self.materials.push((id, m));
        self
    }

    /// Adds a node and returns its id.
    pub fn node(&mut self, x: Vec3) -> usize {
        let id = self.nodes.len();
        self.nodes.push((id, x));
        id
    }

    pub(crate) fn node_with_id(&mut self, id: usize, x: Vec3) {
        self.nodes.push((id, x));
    }

    pub fn frame(&mut self, node: usize, r: Rotation) -> &mut Self {
        self.frames.push((node, r));
        self
    }

    pub fn joint(&mut self, node: usize) -> &mut Self {
        self.joints.push(node);
        self
    }

    /// Adds an element and returns its id.
    pub fn element(&mut self, a: usize, b: usize, material: usize) -> usize {
        let id = self.elements.len();
        self.elements.push((id, a, b, material));
        id
    }

    pub(crate) fn element_with_id(&mut self, id: usize, a: usize, b: usize, material: usize) {
        self.elements.push((id, a, b, material));
    }

    /// Adds a chain of `count` equal elements from node `a` to a new end
    /// point; returns the node ids along the chain including `a`.
    pub fn line(&mut self, a: usize, to: Vec3, count: usize, material: usize) -> Vec<usize> {
        let from = self.nodes.iter().find(|(id, _)| *id == a).expect("start node").1;
        let mut ids = vec![a];
        for k in 1..=count {
            let t = k as f64 / count as f64;
            let x = from + (to - from).scale(t);
            let id = self.node(x);
            self.element(ids[k - 1], id, material);
            ids.push(id);
        }
        ids
    }

    /// Adds a chain of `count` equal elements between two existing nodes;
    /// returns the node ids along the chain including both ends.
    pub fn connect(&mut self, a: usize, b: usize, count: usize, material: usize) -> Vec<usize> {
        let (from, to) = (self.position(a), self.position(b));
        let mut ids = vec![a];
        for k in 1..count {
            let id = self.node(from + (to - from).scale(k as f64 / count as f64));
            self.element(ids[k - 1], id, material);
            ids.push(id);
        }
        self.element(ids[count - 1], b, material);
        ids.push(b);
        ids
    }

    /// Position of a node added earlier.
    pub fn position(&self, id: usize) -> Vec3 {
        self.nodes.iter().find(|(n, _)| *n == id).expect("unknown node").1
    }

    pub fn fix(&mut self, node: usize, c: Component) -> &mut Self {
        self.conditions.push(RawCondition::Fix(node, Some(c)));
        self
    }

    pub fn fix_displacement(&mut self, node: usize) -> &mut Self {
        for c in Component::ALL {
            self.fix(node, c);
        }
        self
    }

    pub fn fix_rotation(&mut self, node: usize) -> &mut Self {
        self.conditions.push(RawCondition::Fix(node, None));
        self
    }

    pub fn clamp(&mut self, node: usize) -> &mut Self {
        self.fix_displacement(node).fix_rotation(node)
    }

    pub fn prescribe(&mut self, node: usize, c: Component, value: f64) -> &mut Self {
        self.conditions.push(RawCondition::Prescribe(node, c, value));
        self
    }

    pub fn prescribe_rotation(&mut self, node: usize, v: Vec3) -> &mut Self {
        self.conditions.push(RawCondition::PrescribeRotation(node, v));
        self
    }

    pub fn force(&mut self, node: usize, f: Vec3) -> &mut Self {
        self.conditions.push(RawCondition::Force(node, f));
        self
    }

    pub fn moment(&mut self, node: usize, m: Vec3) -> &mut Self {
        self.conditions.push(RawCondition::Moment(node, m));
        self
    }

    pub fn steps(&mut self, n: usize) -> &mut Self {
        self.steps = Some(n);
        self
    }

    pub fn load_control(&mut self) -> &mut Self {
        self.control = Some(RawControl::Load);
        self
    }

    pub fn displacement_control(&mut self, node: usize, c: Component, target: f64) -> &mut Self {
        self.control = Some(RawControl::Displacement(node, c, target));
        self
    }

    /// Validates and assembles the model, building reference frames.
    pub fn build(&self) -> Result<Model, ModelError> {
        let mut nodes: Vec<(usize, Vec3)> = self.nodes.clone();
        nodes.sort_by_key(|(id, _)| *id);
        check_contiguous(nodes.iter().map(|(id, _)| *id), "node")?;
        for (id, x) in &nodes {
            if !x.0.iter().all(|v| v.is_finite()) {
                return invalid(format!("node {id}: non-finite coordinate"));
            }
        }
        let base = nodes.first().map_or(0, |n| n.0);
        let index = |id: usize| -> Result<usize, ModelError> {
            if id >= base && id - base < nodes.len() {
                Ok(id - base)
            } else {
                invalid(format!("unknown node {id}"))
            }
        };

        let mut materials = BTreeMap::new();
        for (id, m) in &self.materials {
            m.check(*id)?;
            if materials.insert(*id, *m).is_some() {
                return invalid(format!("duplicate material {id}"));
            }
        }

        let mut elements = self.elements.clone();
        elements.sort_by_key(|e| e.0);
        check_contiguous(elements.iter().map(|e| e.0), "element")?;
        let mut connectivity = Vec::with_capacity(elements.len());
        for &(id, a, b, mat) in &elements {
            let (ia, ib) = (index(a)?, index(b)?);
            if ia == ib {
                return invalid(format!("element {id}: both ends on node {a}"));
            }
            if !materials.contains_key(&mat) {
                return invalid(format!("element {id}: unknown material {mat}"));
            }
            let len = (nodes[ib].1 - nodes[ia].1).norm();
            if len <= 1e-12 {
                return invalid(format!("element {id}: zero length"));
            }
            connectivity.push([ia, ib]);
        }
        let mut used = vec![false; nodes.len()];
        for c in &connectivity {
            used[c[0]] = true;
            used[c[1]] = true;
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return invalid(format!("node {} is not connected to any element", nodes[i].0));
        }

        let mut explicit = vec![None; nodes.len()];
        for (id, r) in &self.frames {
            let i = index(*id)?;
            if explicit[i].is_some() {
                return invalid(format!("node {id}: frame given twice"));
            }
            explicit[i] = Some(*r);
        }
        let mut joint = vec![false; nodes.len()];
        for id in &self.joints {
            joint[index(*id)?] = true;
        }

        let positions: Vec<Vec3> = nodes.iter().map(|n| n.1).collect();
        let frames = build_reference_frames(&positions, &connectivity, &explicit, &joint);

        let model_nodes = nodes
            .iter()
            .enumerate()
            .map(|(i, (id, x))| Node {
                id: *id,
                position: *x,
                frame: frames.nodes[i],
                explicit_frame: explicit[i].is_some(),
                joint: joint[i],
            })
            .collect();
        let model_elements = elements
            .iter()
            .zip(&connectivity)
            .enumerate()
            .map(|(e, (&(id, _, _, mat), &c))| Element {
                id,
                nodes: c,
                material: mat,
                length: (positions[c[1]] - positions[c[0]]).norm(),
                frames: frames.element_ends[e],
            })
            .collect();

        let conditions = self.resolve_conditions(&index)?;
        let steps = self.steps.unwrap_or(1);
        if steps == 0 {
            return invalid("steps must be at least 1");
        }
        let control = match self.control.unwrap_or(RawControl::Load) {
            RawControl::Load => Control::Load,
            RawControl::Displacement(id, c, target) => {
                let node = index(id)?;
                for bc in &conditions {
                    match bc {
                        BoundaryCondition::Fix { node: n, component } if *n == node && *component == c => {
                            return invalid(format!("control dof {} of node {id} is fixed", c.name()));
                        }
                        BoundaryCondition::Prescribe { node: n, component, .. } if *n == node && *component == c => {
                            return invalid(format!("control dof {} of node {id} is also prescribed", c.name()));
                        }
                        _ => {}
                    }
                }
                if !target.is_finite() {
                    return invalid("control target must be finite");
                }
                Control::Displacement { node, component: c, target }
            }
        };

        Ok(Model {
            nodes: model_nodes,
            elements: model_elements,
            materials,
            conditions,
            program: LoadProgram { steps, control },
        })
    }

    fn resolve_conditions(
        &self,
        index: &dyn Fn(usize) -> Result<usize, ModelError>,
    ) -> Result<Vec<BoundaryCondition>, ModelError> {
        const TOL: f64 = 1e-12;
        let mut out: Vec<BoundaryCondition> = Vec::new();
        let mut disp: BTreeMap<(usize, Component), Option<f64>> = BTreeMap::new();
        let mut rot: BTreeMap<usize, Option<Vec3>> = BTreeMap::new();
        for raw in &self.conditions {
            match *raw {
                RawCondition::Fix(id, Some(c)) => {
                    let node = index(id)?;
                    match disp.get(&(node, c)) {
                        Some(Some(v)) if v.abs() > TOL => {
                            return invalid(format!("node {id}: {} both fixed and prescribed", c.name()))
                        }
                        Some(_) => continue,
                        None => {}
                    }
                    disp.insert((node, c), None);
                    out.push(BoundaryCondition::Fix { node, component: c });
                }
                RawCondition::Fix(id, None) => {
                    let node = index(id)?;
                    match rot.get(&node) {
                        Some(Some(v)) if v.max_abs() > TOL => {
                            return invalid(format!("node {id}: rotation both fixed and prescribed"))
                        }
                        Some(_) => continue,
                        None => {}
                    }
                    rot.insert(node, None);
                    out.push(BoundaryCondition::FixRotation { node });
                }
                RawCondition::Prescribe(id, c, value) => {
                    let node = index(id)?;
                    if !value.is_finite() {
                        return invalid(format!("node {id}: non-finite prescribed value"));
                    }
                    match disp.get(&(node, c)) {
                        Some(None) if value.abs() > TOL => {
                            return invalid(format!("node {id}: {} both fixed and prescribed", c.name()))
                        }
                        Some(Some(v)) if (v - value).abs() > TOL => {
                            return invalid(format!("node {id}: {} prescribed twice", c.name()))
                        }
                        Some(_) => continue,
                        None => {}
                    }
                    disp.insert((node, c), Some(value));
                    out.push(BoundaryCondition::Prescribe { node, component: c, value });
                }
                RawCondition::PrescribeRotation(id, v) => {
                    let node = index(id)?;
                    match rot.get(&node) {
                        Some(None) if v.max_abs() > TOL => {
                            return invalid(format!("node {id}: rotation both fixed and prescribed"))
                        }
                        Some(Some(w)) if (*w - v).max_abs() > TOL => {
                            return invalid(format!("node {id}: rotation prescribed twice"))
                        }
                        Some(_) => continue,
                        None => {}
                    }
                    rot.insert(node, Some(v));
                    out.push(BoundaryCondition::PrescribeRotation { node, rotation: v });
                }
                RawCondition::Force(id, f) => {
                    out.push(BoundaryCondition::Force { node: index(id)?, force: f });
                }
                RawCondition::Moment(id, m) => {
                    out.push(BoundaryCondition::Moment { node: index(id)?, moment: m });
                }
            }
        }
        Ok(out)
    }
}

fn check_contiguous(ids: impl Iterator<Item = usize>, what: &str) -> Result<(), ModelError> {
    let mut prev: Option<usize> = None;
    for id in ids {
        if let Some(p) = prev {
            if id == p {
                return invalid(format!("duplicate {what} id {id}"));
            }
            if id != p + 1 {
                return invalid(format!("{what} ids are not contiguous ({p} then {id})"));
            }
        }
        prev = Some(id);
    }
    if prev.is_none() {
        return invalid(format!("model has no {what}s"));
    }
    Ok(())
}
