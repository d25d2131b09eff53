//! Scene files: objects, initial poses and optional animation frames.
//!
//! ```json
//! {
//!   "name": "contact",
//!   "seed": 1,
//!   "objects": [
//!     { "contour": "blob.json", "pose": { "angle": 0.0, "translation": [0, 0] } },
//!     { "contour": { "kind": "gear", "m": 512, "seed": 2 },
//!       "pose": { "translation": [190, 0] } }
//!   ],
//!   "frames": [[{ "translation": [0, 0] }, { "translation": [185, 0] }]]
//! }
//! ```
//!
//! A `contour` is a path (relative to the scene file), a fixture spec, or an
//! inline contour. Each frame lists one absolute pose per object.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::contour::ClosedContour;
use crate::error::{Error, Result};
use crate::geom::RigidPose;
use crate::harness::fixture::FixtureSpec;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ContourSource {
    Path(PathBuf),
    Fixture(FixtureSpec),
    Inline(ClosedContour),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub contour: ContourSource,
    #[serde(default)]
    pub pose: RigidPose,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SceneFile {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub objects: Vec<ObjectSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frames: Vec<Vec<RigidPose>>,
}

/// A scene with every contour loaded and validated.
#[derive(Clone, Debug)]
pub struct Scene {
    pub name: String,
    pub seed: u64,
    pub contours: Vec<ClosedContour>,
    pub poses: Vec<RigidPose>,
    pub frames: Vec<Vec<RigidPose>>,
}

impl Scene {
    pub fn new(
        name: impl Into<String>,
        contours: Vec<ClosedContour>,
        poses: Vec<RigidPose>,
    ) -> Result<Self> {
        let scene = Scene {
            name: name.into(),
            seed: 0,
            contours,
            poses,
            frames: Vec::new(),
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn with_frames(mut self, frames: Vec<Vec<RigidPose>>) -> Result<Self> {
        self.frames = frames;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.contours.len() < 2 {
            return Err(Error::domain("a scene needs at least two objects"));
        }
        if self.poses.len() != self.contours.len() {
            return Err(Error::domain("one pose per object is required"));
        }
        if let Some((i, f)) = self
            .frames
            .iter()
            .enumerate()
            .find(|(_, f)| f.len() != self.contours.len())
        {
            return Err(Error::domain(format!(
                "frame {i} has {} poses for {} objects",
                f.len(),
                self.contours.len()
            )));
        }
        Ok(())
    }

    pub fn from_file(file: SceneFile, base_dir: &Path) -> Result<Self> {
        let contours = file
            .objects
            .iter()
            .map(|o| match &o.contour {
                ContourSource::Path(p) => ClosedContour::load(base_dir.join(p)),
                ContourSource::Fixture(spec) => spec.generate(),
                ContourSource::Inline(c) => Ok(c.clone()),
            })
            .collect::<Result<Vec<_>>>()?;
        let scene = Scene {
            name: file.name,
            seed: file.seed,
            poses: file.objects.iter().map(|o| o.pose).collect(),
            contours,
            frames: file.frames,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: SceneFile = serde_json::from_str(&text)?;
        Scene::from_file(file, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn object_count(&self) -> usize {
        self.contours.len()
    }

    /// `Σ (2 m_k − 1)` over all objects.
    pub fn boxes_total(&self) -> usize {
        self.contours
            .iter()
            .map(|c| 2 * c.segment_count() - 1)
            .sum()
    }

    pub fn max_segments(&self) -> usize {
        self.contours
            .iter()
            .map(ClosedContour::segment_count)
            .max()
            .unwrap_or(0)
    }
}
