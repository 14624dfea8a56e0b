#![allow(dead_code)]

use kmsurf::{class_from_i64, int, Contraction, QDivisor, SurfaceModel};

pub const CONTRACTED: [&str; 10] = ["C", "F1", "F2", "F3", "G1", "H1", "G2", "H2", "G3", "H3"];
pub const EXCEPTIONALS: [&str; 9] = ["G1", "H1", "E1", "G2", "H2", "E2", "G3", "H3", "E3"];

/// C of class (1, 3), three fibres, three infinitely-near blow-ups at each
/// tangency point.
pub fn char3_surface() -> SurfaceModel {
    let mut s = SurfaceModel::new_quadric();
    s.declare_curve("C", class_from_i64(&[1, 3])).unwrap();
    for i in 1..=3 {
        s.declare_curve(format!("F{i}"), class_from_i64(&[1, 0]))
            .unwrap();
    }
    for i in 1..=3 {
        let (f, g, h, e) = (
            format!("F{i}"),
            format!("G{i}"),
            format!("H{i}"),
            format!("E{i}"),
        );
        s.blow_up(&g, &[("C", 1), (&f, 1)]).unwrap();
        s.blow_up(&h, &[("C", 1), (&f, 1), (&g, 1)]).unwrap();
        s.blow_up(&e, &[("C", 1), (&f, 1), (&h, 1)]).unwrap();
    }
    s
}

pub fn char3_contraction() -> Contraction {
    Contraction::new(&char3_surface(), &CONTRACTED).unwrap()
}

pub fn divisor_a() -> QDivisor {
    QDivisor::from_terms([("E2", int(1)), ("E3", int(1)), ("E1", int(-1))])
}
