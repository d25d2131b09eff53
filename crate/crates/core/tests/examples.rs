macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/examples/",
                stringify!($name),
                ".rs"
            ));
        }
    };
}

example!(contour_basics);
example!(pyramid);
example!(fit_boxes);
example!(box_tree);
example!(sat_overlap);
example!(interference);
example!(situations);
example!(animation);
example!(oracle_check);

#[test]
fn examples_run() {
    contour_basics::main().unwrap();
    pyramid::main().unwrap();
    fit_boxes::main().unwrap();
    box_tree::main().unwrap();
    sat_overlap::main().unwrap();
    interference::main().unwrap();
    situations::main().unwrap();
    animation::main().unwrap();
    oracle_check::main().unwrap();
}
