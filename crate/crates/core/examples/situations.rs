// The three-object benchmark: separated, single contact, multiple contacts
// and deep interpenetration, each under both super-box methods.

use std::path::Path;

use obb2d::harness::{write_csv, Experiment, DEFAULT_REPEATS};
use obb2d::{detect::DetectParams, FitParams, Method, Scene};

pub fn main() -> obb2d::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut records = Vec::new();
    for name in [
        "situation_a_separated",
        "situation_b_contact",
        "situation_c_multi_contact",
        "deep_interpenetration",
    ] {
        let scene = Scene::load(dir.join(format!("{name}.json")))?;
        for method in Method::ALL {
            let exp = Experiment::build(
                scene.clone(),
                method,
                &FitParams::default(),
                DetectParams::from_env()?,
            )?;
            records.push(exp.measure(0, &scene.poses, DEFAULT_REPEATS));
        }
    }
    println!(
        "{:<28} {:<11} {:>6} {:>7} {:>9} {:>10}",
        "scene", "method", "boxes", "tested", "contacts", "time (ms)"
    );
    for r in &records {
        println!(
            "{:<28} {:<11} {:>6} {:>7} {:>9} {:>10.3}",
            r.scene,
            r.method,
            r.boxes_total,
            r.boxes_tested,
            r.contacts,
            r.wall_time_s * 1e3
        );
    }
    println!();
    write_csv(std::io::stdout().lock(), &records)
}
