// quick pipeline smoke test via cargo script-style main
fn main() {
    let src = r#"/*@ requires fp_nice(a) && fp_nice(b); ensures !fp_nan(\result) && !fp_infinite(\result); @*/
method add(a: double, b: double): double { return a + b; }"#;
    let p = floatdv::minif::load_program(src).unwrap();
    let obs = floatdv::vcgen::generate_obligations(&p, "add", 1, &Default::default()).unwrap();
    for po in &obs {
        let doc = floatdv::smt::emit_smt(&po, &Default::default());
        std::fs::write(format!("/tmp/smoke_{}.smt2", po.name), &doc.text).unwrap();
        println!("== {}", po.name);
    }
}
