use crate::so3::align_first_axis;
use crate::{Rotation, Vec3};

/// Two incident elements meeting at more than this angle form a corner and
/// keep separate reference frames.
pub const KINK_ANGLE: f64 = core::f64::consts::FRAC_PI_4;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceFrames {
    /// One frame per node.
    pub nodes: Vec<Rotation>,
    /// Frames at the start and end of every element.
    pub element_ends: Vec<[Rotation; 2]>,
}

/// Builds reference frames with direction 1 along the rod.
///
/// A node where exactly two elements meet head to tail, at an angle below
/// [`KINK_ANGLE`], gets a single frame aligned with the mean of the two chord
/// directions. Explicit frames win over everything. Ends, junctions, corners
/// and nodes flagged as joints give each incident element its own
/// chord-aligned frame, so the joint is rigid but stress free.
pub fn build_reference_frames(
    positions: &[Vec3],
    elements: &[[usize; 2]],
    explicit: &[Option<Rotation>],
    joints: &[bool],
) -> ReferenceFrames {
    let chord = |e: usize| {
        let [a, b] = elements[e];
        let d = positions[b] - positions[a];
        d.scale(1.0 / d.norm())
    };
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); positions.len()];
    for (e, c) in elements.iter().enumerate() {
        incident[c[0]].push((e, 0));
        incident[c[1]].push((e, 1));
    }

    let mut shared: Vec<Option<Rotation>> = explicit.to_vec();
    let mut nodes = Vec::with_capacity(positions.len());
    for (i, inc) in incident.iter().enumerate() {
        if shared[i].is_none() && !joints[i] && inc.len() == 2 && inc[0].1 != inc[1].1 {
            let (t0, t1) = (chord(inc[0].0), chord(inc[1].0));
            if t0.dot(&t1).clamp(-1.0, 1.0).acos() <= KINK_ANGLE {
                shared[i] = Some(align_first_axis(&(t0 + t1)));
            }
        }
        let frame = match (&shared[i], inc.first()) {
            (Some(r), _) => *r,
            (None, Some(&(e, _))) => align_first_axis(&chord(e)),
            (None, None) => Rotation::identity(),
        };
        nodes.push(frame);
    }

    let element_ends = elements
        .iter()
        .enumerate()
        .map(|(e, c)| {
            let own = align_first_axis(&chord(e));
            [shared[c[0]].unwrap_or(own), shared[c[1]].unwrap_or(own)]
        })
        .collect();
    ReferenceFrames { nodes, element_ends }
}
