//! Binary hierarchy of oriented boxes over one contour.
//!
//! Nodes are stored level by level: node `(level, i)` lives at
//! `2^level - 1 + i`, so the children of node `k` are `2k + 1` and `2k + 2`
//! and the leaves (`level = n`) occupy the last `m` slots in segment order.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::contour::ClosedContour;
use crate::error::{Error, Result};
use crate::geom::RigidPose;
use crate::multires::{ContourPyramid, SegmentId};
use crate::obbfit::{
    fit_elementary_box, fit_superbox, superbox_axes_elementary, superbox_axes_multires, FitParams,
    OrientedBox,
};

/// How super-box axes are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Weighted covariance of descendant elementary-box centroids.
    Elementary,
    /// Samples of the corresponding coarse-contour segment.
    #[serde(rename = "multires")]
    Multiresolution,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Elementary, Method::Multiresolution];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Elementary => "elementary",
            Method::Multiresolution => "multires",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "elementary" | "elem" => Ok(Method::Elementary),
            "multires" | "multiresolution" => Ok(Method::Multiresolution),
            other => Err(Error::domain(format!("unknown method {other:?}"))),
        }
    }
}

/// Index of node `(level, i)`.
#[inline]
pub const fn node_index(level: u32, i: usize) -> usize {
    (1 << level) - 1 + i
}

/// `(level, i)` of node `k`.
#[inline]
pub fn node_segment(k: usize) -> SegmentId {
    let level = (k + 1).ilog2();
    SegmentId::new(level, k + 1 - (1 << level))
}

/// Complete binary tree of boxes in the object's body frame.
#[derive(Clone, Debug, Serialize)]
pub struct BoxTree {
    depth: u32,
    method: Method,
    nodes: Vec<OrientedBox>,
}

impl BoxTree {
    /// Builds the tree. `pyramid` is required for [`Method::Multiresolution`]
    /// and must have been built from `contour`.
    pub fn build(
        contour: &ClosedContour,
        pyramid: Option<&ContourPyramid>,
        method: Method,
        params: &FitParams,
    ) -> Result<BoxTree> {
        let pyramid = match (method, pyramid) {
            (Method::Multiresolution, None) => {
                return Err(Error::PyramidMismatch(
                    "multiresolution adaptation needs a pyramid".into(),
                ))
            }
            (Method::Multiresolution, Some(p)) if !p.matches(contour) => {
                return Err(Error::PyramidMismatch(
                    "finest pyramid level differs from the contour's control points".into(),
                ))
            }
            (Method::Multiresolution, Some(p)) => Some(p),
            (Method::Elementary, _) => None,
        };

        let depth = contour.level();
        let m = contour.segment_count();
        let mut nodes = Vec::with_capacity(2 * m - 1);
        // placeholder for internal nodes, filled bottom-up
        nodes.resize(
            m - 1,
            OrientedBox::axis_aligned(Default::default(), [0.0; 2]),
        );
        for segment in 0..m {
            nodes.push(fit_elementary_box(contour, segment, params)?);
        }

        let leaves = m - 1..2 * m - 1;
        for level in (0..depth).rev() {
            for i in 0..1usize << level {
                let id = SegmentId::new(level, i);
                let k = node_index(level, i);
                let axes = match pyramid {
                    Some(p) if level >= p.min_level() => {
                        superbox_axes_multires(p, id, params.orientation_samples)?
                    }
                    _ => {
                        let range = id.leaf_range(depth);
                        let under = &nodes[leaves.start + range.start..leaves.start + range.end];
                        superbox_axes_elementary(under)?
                    }
                };
                nodes[k] = fit_superbox(axes, &nodes[2 * k + 1..=2 * k + 2])?;
            }
        }

        Ok(BoxTree {
            depth,
            method,
            nodes,
        })
    }

    /// Builds the pyramid (when needed) and the tree in one step. The pyramid
    /// uses `params.analysis` and `params.min_level`.
    pub fn from_contour(
        contour: &ClosedContour,
        method: Method,
        params: &FitParams,
    ) -> Result<BoxTree> {
        match method {
            Method::Elementary => BoxTree::build(contour, None, method, params),
            Method::Multiresolution => {
                let min_level = params.min_level.min(contour.level());
                let pyramid = ContourPyramid::build_with(&params.analysis, contour, min_level)?;
                BoxTree::build(contour, Some(&pyramid), method, params)
            }
        }
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// `n` with `m = 2^n` leaves.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn leaf_count(&self) -> usize {
        1 << self.depth
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[OrientedBox] {
        &self.nodes
    }

    pub fn root(&self) -> &OrientedBox {
        &self.nodes[0]
    }

    pub fn node(&self, k: usize) -> Option<&OrientedBox> {
        self.nodes.get(k)
    }

    #[inline]
    pub fn is_leaf(&self, k: usize) -> bool {
        k >= self.leaf_count() - 1
    }

    #[inline]
    pub fn children(&self, k: usize) -> Option<(usize, usize)> {
        (!self.is_leaf(k)).then_some((2 * k + 1, 2 * k + 2))
    }

    /// Segment bounded by leaf node `k`.
    #[inline]
    pub fn leaf_segment(&self, k: usize) -> usize {
        k + 1 - self.leaf_count()
    }

    pub fn leaf(&self, segment: usize) -> &OrientedBox {
        &self.nodes[self.leaf_count() - 1 + segment]
    }

    /// Boxes of one level, in segment order.
    pub fn level(&self, level: u32) -> Result<&[OrientedBox]> {
        if level > self.depth {
            return Err(Error::domain(format!(
                "level {level} exceeds tree depth {}",
                self.depth
            )));
        }
        let start = node_index(level, 0);
        Ok(&self.nodes[start..start + (1 << level)])
    }

    /// Sum of box areas over one level, or over every node when `level` is
    /// `None`.
    pub fn total_box_area(&self, level: Option<u32>) -> Result<f64> {
        let boxes = match level {
            Some(l) => self.level(l)?,
            None => &self.nodes[..],
        };
        Ok(boxes.iter().map(OrientedBox::area).sum())
    }

    /// Area per level, root first.
    pub fn area_by_level(&self) -> Vec<f64> {
        (0..=self.depth)
            .map(|l| self.total_box_area(Some(l)).unwrap())
            .collect()
    }

    /// Node `k` placed in the world by `pose`.
    pub fn world_box(&self, k: usize, pose: &RigidPose) -> Result<OrientedBox> {
        self.nodes
            .get(k)
            .map(|b| b.transformed(pose))
            .ok_or_else(|| Error::domain(format!("node {k} out of range")))
    }

    pub fn to_json_string(&self) -> String {
        #[derive(Serialize)]
        struct NodeDump<'a> {
            index: usize,
            level: u32,
            position: usize,
            #[serde(flatten)]
            node: &'a OrientedBox,
        }
        #[derive(Serialize)]
        struct TreeDump<'a> {
            method: Method,
            leaves: usize,
            node_count: usize,
            nodes: Vec<NodeDump<'a>>,
        }
        let dump = TreeDump {
            method: self.method,
            leaves: self.leaf_count(),
            node_count: self.node_count(),
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(k, node)| {
                    let id = node_segment(k);
                    NodeDump {
                        index: k,
                        level: id.level,
                        position: id.index,
                        node,
                    }
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dump).expect("tree serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;

    fn octagon() -> ClosedContour {
        ClosedContour::smooth(
            (0..8)
                .map(|k| {
                    let a = std::f64::consts::TAU * k as f64 / 8.0;
                    Vec2::new(a.cos(), a.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn indexing_roundtrip() {
        for k in 0..63 {
            let id = node_segment(k);
            assert_eq!(node_index(id.level, id.index), k);
        }
        assert_eq!(node_segment(0), SegmentId::root());
        assert_eq!(node_segment(2), SegmentId::new(1, 1));
    }

    #[test]
    fn octagon_tree_shape() {
        let c = octagon();
        let t = BoxTree::from_contour(&c, Method::Elementary, &FitParams::default()).unwrap();
        assert_eq!(t.node_count(), 15);
        assert_eq!(t.root().leaf_range, (0, 8));
        for s in 0..8 {
            assert_eq!(t.leaf(s).leaf_range, (s, s + 1));
        }
        assert_eq!(t.children(0), Some((1, 2)));
        assert_eq!(t.children(7), None);
        assert_eq!(t.leaf_segment(7), 0);
    }

    #[test]
    fn multires_needs_matching_pyramid() {
        let c = octagon();
        let p = FitParams::default();
        assert!(matches!(
            BoxTree::build(&c, None, Method::Multiresolution, &p),
            Err(Error::PyramidMismatch(_))
        ));
        let other = c.transformed(&RigidPose::translation(Vec2::new(1.0, 0.0)));
        let pyr = ContourPyramid::build(&other, 2).unwrap();
        assert!(BoxTree::build(&c, Some(&pyr), Method::Multiresolution, &p).is_err());
    }

    #[test]
    fn leaves_do_not_depend_on_method() {
        let c = octagon();
        let p = FitParams::default();
        let a = BoxTree::from_contour(&c, Method::Elementary, &p).unwrap();
        let b = BoxTree::from_contour(&c, Method::Multiresolution, &p).unwrap();
        assert_eq!(a.level(3).unwrap(), b.level(3).unwrap());
        assert_eq!(
            a.total_box_area(Some(3)).unwrap(),
            b.total_box_area(Some(3)).unwrap()
        );
    }

    #[test]
    fn world_box_moves_center_and_axes() {
        let c = octagon();
        let t = BoxTree::from_contour(&c, Method::Elementary, &FitParams::default()).unwrap();
        let b = t.node(3).unwrap();
        assert_eq!(&t.world_box(3, &RigidPose::IDENTITY).unwrap(), b);
        let shifted = t
            .world_box(3, &RigidPose::translation(Vec2::new(5.0, -3.0)))
            .unwrap();
        assert!((shifted.center - b.center - Vec2::new(5.0, -3.0)).norm() < 1e-12);
        assert_eq!(shifted.axes, b.axes);
        assert!(t.world_box(99, &RigidPose::IDENTITY).is_err());

        let mut unit = OrientedBox::axis_aligned(Vec2::ZERO, [1.0, 0.5]);
        assert_eq!(unit.area(), 2.0);
        unit = unit.transformed(&RigidPose::rotation(std::f64::consts::FRAC_PI_2));
        assert!((unit.axes[0] - Vec2::Y).norm() < 1e-12);
    }

    #[test]
    fn method_parsing() {
        assert_eq!(
            "multires".parse::<Method>().unwrap(),
            Method::Multiresolution
        );
        assert_eq!("elementary".parse::<Method>().unwrap(), Method::Elementary);
        assert!("sphere".parse::<Method>().is_err());
    }
}
