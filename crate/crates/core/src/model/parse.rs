//! Line-oriented model file format.
//!
//! ```text
//! # comment
//! material <id> <AE> <EI1> <EI2> <GJ>
//! node <id> <x> <y> <z>
//! frame <node> <r11 r12 r13 r21 r22 r23 r31 r32 r33>
//! joint <node>
//! element <id> <node-a> <node-b> <material>
//! fix <node> ux|uy|uz|rot
//! prescribe <node> ux|uy|uz <value>
//! prescribe <node> rot <vx> <vy> <vz>
//! force <node> <fx> <fy> <fz>
//! moment <node> <mx> <my> <mz>
//! steps <N>
//! control load
//! control displacement <node> ux|uy|uz <target>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{
    BoundaryCondition, Component, Control, Material, Model, ModelBuilder, ModelError, RawCondition, RawControl,
};
use crate::so3::{orthogonality_defect, orthonormalize};
use crate::{Mat3, Rotation, Vec3};

/// Largest orthogonality defect repaired silently for explicit frames.
const FRAME_REPAIR_TOL: f64 = 1e-6;

pub fn load_model(path: impl AsRef<Path>) -> Result<Model, ModelError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| ModelError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_model(&text)
}

struct Line<'a> {
    no: usize,
    words: Vec<&'a str>,
}

impl<'a> Line<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ModelError> {
        Err(ModelError::Parse { line: self.no, message: message.into() })
    }

    fn arity(&self, n: usize) -> Result<(), ModelError> {
        if self.words.len() != n {
            return self.err(format!("`{}` expects {} fields, found {}", self.words[0], n - 1, self.words.len() - 1));
        }
        Ok(())
    }

    fn int(&self, i: usize) -> Result<usize, ModelError> {
        self.words[i]
            .parse()
            .or_else(|_| self.err(format!("expected a non-negative integer, found `{}`", self.words[i])))
    }

    fn real(&self, i: usize) -> Result<f64, ModelError> {
        match self.words[i].parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => self.err(format!("expected a finite real, found `{}`", self.words[i])),
        }
    }

    fn vec3(&self, i: usize) -> Result<Vec3, ModelError> {
        Ok(Vec3::new(self.real(i)?, self.real(i + 1)?, self.real(i + 2)?))
    }

    fn component(&self, i: usize) -> Result<Component, ModelError> {
        Component::parse(self.words[i]).map_or_else(|| self.err(format!("unknown dof `{}`", self.words[i])), Ok)
    }
}

pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let mut b = ModelBuilder::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let l = Line { no: i + 1, words };
        match l.words[0] {
            "material" => {
                l.arity(6)?;
                b.material(l.int(1)?, Material::new(l.real(2)?, l.real(3)?, l.real(4)?, l.real(5)?));
            }
            "node" => {
                l.arity(5)?;
                b.node_with_id(l.int(1)?, l.vec3(2)?);
            }
            "frame" => {
                l.arity(11)?;
                let mut m = Mat3::zeros();
                for k in 0..9 {
                    m.0[k / 3][k % 3] = l.real(2 + k)?;
                }
                let r = match Rotation::from_matrix(m) {
                    Ok(r) => r,
                    Err(e) => {
                        let (defect, det) = orthogonality_defect(&m);
                        if defect < FRAME_REPAIR_TOL && det > 0.0 {
                            Rotation::from_matrix_unchecked(orthonormalize(&m))
                        } else {
                            return l.err(e.to_string());
                        }
                    }
                };
                b.frame(l.int(1)?, r);
            }
            "joint" => {
                l.arity(2)?;
                b.joint(l.int(1)?);
            }
            "element" => {
                l.arity(5)?;
                b.element_with_id(l.int(1)?, l.int(2)?, l.int(3)?, l.int(4)?);
            }
            "fix" => {
                l.arity(3)?;
                let node = l.int(1)?;
                if l.words[2] == "rot" {
                    b.conditions.push(RawCondition::Fix(node, None));
                } else {
                    b.conditions.push(RawCondition::Fix(node, Some(l.component(2)?)));
                }
            }
            "prescribe" => {
                if l.words.len() < 3 {
                    return l.err("`prescribe` expects a node and a dof");
                }
                let node = l.int(1)?;
                if l.words[2] == "rot" {
                    l.arity(6)?;
                    b.conditions.push(RawCondition::PrescribeRotation(node, l.vec3(3)?));
                } else {
                    l.arity(4)?;
                    b.conditions.push(RawCondition::Prescribe(node, l.component(2)?, l.real(3)?));
                }
            }
            "force" => {
                l.arity(5)?;
                b.conditions.push(RawCondition::Force(l.int(1)?, l.vec3(2)?));
            }
            "moment" => {
                l.arity(5)?;
                b.conditions.push(RawCondition::Moment(l.int(1)?, l.vec3(2)?));
            }
            "steps" => {
                l.arity(2)?;
                b.steps = Some(l.int(1)?);
            }
            "control" => match l.words.get(1).copied() {
                Some("load") => {
                    l.arity(2)?;
                    b.control = Some(RawControl::Load);
                }
                Some("displacement") => {
                    l.arity(5)?;
                    b.control = Some(RawControl::Displacement(l.int(2)?, l.component(3)?, l.real(4)?));
                }
                _ => return l.err("`control` expects `load` or `displacement <node> <dof> <target>`"),
            },
            other => return l.err(format!("unknown keyword `{other}`")),
        }
    }
    b.build()
}

fn vec3_text(v: &Vec3) -> String {
    format!("{:?} {:?} {:?}", v[0], v[1], v[2])
}

impl Model {
    /// Serializes to the model file format; parsing the result gives back an equal model.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let nid = |i: usize| self.nodes[i].id;
        for (id, m) in &self.materials {
            let _ = writeln!(s, "material {id} {:?} {:?} {:?} {:?}", m.ae, m.ei1, m.ei2, m.gj);
        }
        for n in &self.nodes {
            let _ = writeln!(s, "node {} {}", n.id, vec3_text(&n.position));
        }
        for n in &self.nodes {
            if n.explicit_frame {
                let m = n.frame.matrix();
                let _ = write!(s, "frame {}", n.id);
                for row in &m.0 {
                    for v in row {
                        let _ = write!(s, " {v:?}");
                    }
                }
                s.push('\n');
            }
            if n.joint {
                let _ = writeln!(s, "joint {}", n.id);
            }
        }
        for e in &self.elements {
            let _ = writeln!(s, "element {} {} {} {}", e.id, nid(e.nodes[0]), nid(e.nodes[1]), e.material);
        }
        for bc in &self.conditions {
            let _ = match bc {
                BoundaryCondition::Fix { node, component } => {
                    writeln!(s, "fix {} {}", nid(*node), component.name())
                }
                BoundaryCondition::FixRotation { node } => writeln!(s, "fix {} rot", nid(*node)),
                BoundaryCondition::Prescribe { node, component, value } => {
                    writeln!(s, "prescribe {} {} {value:?}", nid(*node), component.name())
                }
                BoundaryCondition::PrescribeRotation { node, rotation } => {
                    writeln!(s, "prescribe {} rot {}", nid(*node), vec3_text(rotation))
                }
                BoundaryCondition::Force { node, force } => {
                    writeln!(s, "force {} {}", nid(*node), vec3_text(force))
                }
                BoundaryCondition::Moment { node, moment } => {
                    writeln!(s, "moment {} {}", nid(*node), vec3_text(moment))
                }
            };
        }
        let _ = writeln!(s, "steps {}", self.program.steps);
        let _ = match self.program.control {
            Control::Load => writeln!(s, "control load"),
            Control::Displacement { node, component, target } => {
                writeln!(s, "control displacement {} {} {target:?}", nid(node), component.name())
            }
        };
        s
    }
}
