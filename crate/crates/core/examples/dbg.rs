use bispec_core::paradiff::*;
use bispec_core::symbols::{parse_symbol, builtin_symbol};
use std::collections::BTreeMap;

fn main() {
    let ratio = parse_symbol("l1/(l1+l2)").unwrap();
    let sinlog = builtin_symbol("sinlog", &BTreeMap::new()).unwrap();
    let b = 0.5;
    let nmax = 256usize;
    for (name, m) in [("ratio", &ratio), ("sinlog", &sinlog)] {
        let mut fits = Vec::new();
        for mode in [LocalizeMode::Diagonal, LocalizeMode::LowHigh] {
            let t = std::time::Instant::now();
            let piece = localize_and_expand(m, 0, mode, nmax, b).unwrap();
            let f = piece.axis2_decay_exponent(32);
            fits.push(f);
            println!("  {name} {mode:?}: fit32={f:+.3} ({:.1?})", t.elapsed());
        }
        println!("{name:7}: margin = {:+.3}", fits[1] - fits[0]);
    }
}
