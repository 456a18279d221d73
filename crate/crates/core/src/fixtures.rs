//! The shipped cell-complex modules, embedded from the `fixtures/` directory.

use crate::modules::{parse_module, FdModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fixture {
    Sphere,
    X,
    Y,
    C,
    XPrime,
    YPrime,
    A,
}

/// A cell label and its dimension.
pub type Cell = (&'static str, i32);
/// `Sq^i` attaching `from` to `to`.
pub type Attachment = (u32, &'static str, &'static str);

impl std::fmt::Display for Fixture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Fixture::Sphere => "sphere",
            Fixture::X => "X",
            Fixture::Y => "Y",
            Fixture::C => "C",
            Fixture::XPrime => "X'",
            Fixture::YPrime => "Y'",
            Fixture::A => "A",
        })
    }
}

impl Fixture {
    pub const ALL: [Fixture; 7] = [
        Fixture::Sphere,
        Fixture::X,
        Fixture::Y,
        Fixture::C,
        Fixture::XPrime,
        Fixture::YPrime,
        Fixture::A,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            Fixture::Sphere => "sphere.fdmod",
            Fixture::X => "X.fdmod",
            Fixture::Y => "Y.fdmod",
            Fixture::C => "C.fdmod",
            Fixture::XPrime => "Xprime.fdmod",
            Fixture::YPrime => "Yprime.fdmod",
            Fixture::A => "A.fdmod",
        }
    }

    pub fn source(self) -> &'static str {
        match self {
            Fixture::Sphere => include_str!("../../../fixtures/sphere.fdmod"),
            Fixture::X => include_str!("../../../fixtures/X.fdmod"),
            Fixture::Y => include_str!("../../../fixtures/Y.fdmod"),
            Fixture::C => include_str!("../../../fixtures/C.fdmod"),
            Fixture::XPrime => include_str!("../../../fixtures/Xprime.fdmod"),
            Fixture::YPrime => include_str!("../../../fixtures/Yprime.fdmod"),
            Fixture::A => include_str!("../../../fixtures/A.fdmod"),
        }
    }

    /// The module in the degrees of the cell diagram.
    pub fn module(self) -> FdModule {
        parse_module(self.source()).expect("shipped fixture parses")
    }

    /// The module shifted so its bottom cell is in degree 0.
    pub fn normalized(self) -> FdModule {
        self.module().normalized()
    }

    /// Cells and attaching squares `(i, from, to)` as drawn in the cell
    /// diagrams; every other square between cells is zero or forced.
    pub fn cell_structure(self) -> (&'static [Cell], &'static [Attachment]) {
        match self {
            Fixture::Sphere => (&[("x0", 0)], &[]),
            Fixture::X => (&[("x13", 13), ("x15", 15), ("x16", 16)], &[(2, "x13", "x15"), (1, "x15", "x16")]),
            Fixture::Y => (
                &[("y9", 9), ("y13", 13), ("y15", 15), ("y16", 16)],
                &[(4, "y9", "y13"), (2, "y13", "y15"), (1, "y15", "y16")],
            ),
            Fixture::C => (
                &[("a9", 9), ("b13", 13), ("g15", 15), ("d16", 16), ("ab22", 22), ("ag24", 24), ("ad25", 25)],
                &[(4, "a9", "b13"), (2, "b13", "g15"), (1, "g15", "d16")],
            ),
            Fixture::XPrime => (&[("x7", 7), ("x8", 8)], &[(1, "x7", "x8")]),
            Fixture::YPrime => (&[("y5", 5), ("y7", 7), ("y8", 8)], &[(2, "y5", "y7"), (1, "y7", "y8")]),
            Fixture::A => (&[("a0", 0), ("a1", 1), ("a3", 3)], &[(1, "a0", "a1"), (2, "a1", "a3")]),
        }
    }

    /// Differences between `m` and the drawn cell structure.
    pub fn structure_mismatches(self, m: &FdModule) -> Vec<String> {
        let (cells, squares) = self.cell_structure();
        let mut out = Vec::new();
        let mut expected: Vec<(&str, i32)> = cells.to_vec();
        expected.sort();
        let mut found: Vec<(&str, i32)> = (0..m.dimension()).map(|b| (m.label(b), m.degree_of(b))).collect();
        found.sort();
        if expected != found {
            out.push(format!("cells {found:?}, expected {expected:?}"));
            return out;
        }
        for &(i, from, to) in squares {
            let image = m.element_labels(&m.act_sq(i, &m.element(from).expect("cell present")));
            if image != [to] {
                out.push(format!("Sq{i}({from}) = {image:?}, expected [{to}]"));
            }
        }
        out
    }
}

/// Checks the action on the product classes of `H^*(C)` against the Cartan
/// formula `Sq^n(a x) = sum_i Sq^i(a) Sq^{n-i}(x)`. A product of two classes
/// is nonzero only when one factor is `a9`. Returns one line per mismatch.
pub fn cartan_mismatches(c: &FdModule) -> Vec<String> {
    let (cells, _) = Fixture::C.cell_structure();
    if let Some((missing, _)) = cells.iter().find(|(l, _)| c.index_of(l).is_none()) {
        return vec![format!("missing class {missing}")];
    }
    let product = |u: &str, v: &str| -> Option<&'static str> {
        match (u, v) {
            ("a9", "b13") | ("b13", "a9") => Some("ab22"),
            ("a9", "g15") | ("g15", "a9") => Some("ag24"),
            ("a9", "d16") | ("d16", "a9") => Some("ad25"),
            _ => None,
        }
    };
    let sq_labels =
        |i: u32, label: &str| -> Vec<String> { c.element_labels(&c.act_sq(i, &c.element(label).expect("present"))) };
    let mut out = Vec::new();
    for (prod, right) in [("ab22", "b13"), ("ag24", "g15"), ("ad25", "d16")] {
        for n in 1..=c.span() {
            let mut expected: Vec<String> = Vec::new();
            for i in 0..=n {
                for l in sq_labels(i, "a9") {
                    for r in sq_labels(n - i, right) {
                        if let Some(p) = product(&l, &r) {
                            if let Some(pos) = expected.iter().position(|e| e == p) {
                                expected.remove(pos);
                            } else {
                                expected.push(p.to_string());
                            }
                        }
                    }
                }
            }
            expected.sort();
            let mut got = sq_labels(n, prod);
            got.sort();
            if got != expected {
                out.push(format!("Sq{n}({prod}) = {got:?}, Cartan gives {expected:?}"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steenrod::SteenrodElement;

    #[test]
    fn all_fixtures_validate() {
        for f in Fixture::ALL {
            let m = f.module();
            assert!(f.structure_mismatches(&m).is_empty(), "{f:?}");
            assert!(m.validate().is_empty(), "{f:?}: {:?}", m.validate());
            assert!(m.normalized().validate().is_empty());
            assert_eq!(m.normalized().min_degree(), Some(0));
        }
    }

    #[test]
    fn a_is_the_shifted_dual_of_x() {
        let a = Fixture::A.module();
        let dx = Fixture::X.module().dual().suspend(16);
        // Same degrees and actions once both are listed bottom-up.
        assert_eq!(a.dimension_table(), dx.dimension_table());
        for i in 1..=3u32 {
            for d in 0..=3 {
                let op = SteenrodElement::sq(i);
                assert_eq!(a.action_matrix(&op, d), dx.action_matrix(&op, d), "Sq{i} in degree {d}");
            }
        }
    }

    #[test]
    fn c_products_follow_cartan() {
        let c = Fixture::C.module();
        assert!(cartan_mismatches(&c).is_empty(), "{:?}", cartan_mismatches(&c));
        let sq_labels = |i: u32, label: &str| c.element_labels(&c.act_sq(i, &c.element(label).unwrap()));
        assert_eq!(sq_labels(4, "a9"), vec!["b13"]);
        assert_eq!(sq_labels(6, "a9"), vec!["g15"]);
        assert_eq!(sq_labels(7, "a9"), vec!["d16"]);
        assert_eq!(sq_labels(3, "ab22"), vec!["ad25"]);
    }
}

