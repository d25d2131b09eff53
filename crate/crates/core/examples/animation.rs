// Nine objects squeezed together and released over twelve frames.

use std::path::Path;

use obb2d::harness::{animate, Experiment};
use obb2d::{detect::DetectParams, FitParams, Method, Scene};

pub fn main() -> obb2d::Result<()> {
    let scene =
        Scene::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/animation_nine.json"))?;
    println!(
        "{} objects, {} boxes in total",
        scene.object_count(),
        scene.boxes_total()
    );
    let runs = Method::ALL
        .into_iter()
        .map(|m| {
            Experiment::build(
                scene.clone(),
                m,
                &FitParams::default(),
                DetectParams::from_env()?,
            )
            .map(|e| animate(&e))
        })
        .collect::<obb2d::Result<Vec<_>>>()?;
    println!("frame  tested(elem)  tested(multi)  contacts  pairs");
    for (e, m) in runs[0].iter().zip(&runs[1]) {
        println!(
            "{:5} {:13} {:14} {:9} {:6}",
            e.frame, e.boxes_tested, m.boxes_tested, m.contacts, m.interfering_pairs
        );
    }
    Ok(())
}
