//! Vertical and horizontal composition, and the interchange law.

use std::sync::Arc;

use algebroid_kit::homotopy::NaturalHomotopy;
use algebroid_kit::poly::parse_poly;
use algebroid_kit::tangentcase::{homotopy_from_map, tangent_algebroid};

fn main() -> algebroid_kit::Result<()> {
    let m = Arc::new(tangent_algebroid(1));
    let r = m.ring();
    let mk = |s: &str| homotopy_from_map(m.clone(), m.clone(), vec![parse_poly(s, r)?]);
    let h0 = mk("x1 + t")?;
    let h1 = mk("x1 + 1 + t*x1^2")?;
    let k0 = mk("(1 + t)*x1")?;
    let k1 = mk("2*x1 - t*x1")?;

    let v = h0.compose_vertical(&h1)?;
    for p in v.pieces() {
        println!("[{}, {}]: phi = {}", p.start(), p.end(), p.map().base_map()[0]);
    }
    print!("{}", v.check_homotopy());
    let hz = h0.compose_horizontal(&k0)?;
    println!("horizontal: phi = {}", hz.single()?.map().base_map()[0]);
    print!("{}", NaturalHomotopy::interchange_check(&h0, &h1, &k0, &k1)?);
    Ok(())
}
