//! Reference critical speeds reported to three digits for six one-parameter
//! families of `(reaction, a, b)`.

use serde::Serialize;

use crate::reaction::ReactionSpec;

/// How the family parameter enters `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    /// `a = 1`, `b = p`
    FieldStrength,
    /// `a = 1/p`, `b = 1`
    Gamma,
    /// `a = b = 1/ε` with `p = ε²`
    Singular,
}

impl Coupling {
    pub fn params(self, p: f64) -> (f64, f64) {
        match self {
            Coupling::FieldStrength => (1.0, p),
            Coupling::Gamma => (1.0 / p, 1.0),
            Coupling::Singular => {
                let a = 1.0 / p.sqrt();
                (a, a)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldenCell {
    pub row: &'static str,
    pub reaction: ReactionSpec,
    pub coupling: Coupling,
    pub parameter: f64,
    pub a: f64,
    pub b: f64,
    pub expected: f64,
}

impl GoldenCell {
    /// `max(0.01, 2% of the reference)`.
    pub fn tolerance(&self) -> f64 {
        (0.02 * self.expected.abs()).max(0.01)
    }

    pub fn accepts(&self, c: f64) -> bool {
        (c - self.expected).abs() <= self.tolerance()
    }
}

fn row(
    name: &'static str,
    reaction: ReactionSpec,
    coupling: Coupling,
    parameters: [f64; 5],
    expected: [f64; 5],
) -> impl Iterator<Item = GoldenCell> {
    parameters.into_iter().zip(expected).map(move |(p, e)| {
        let (a, b) = coupling.params(p);
        GoldenCell { row: name, reaction: reaction.clone(), coupling, parameter: p, a, b, expected: e }
    })
}

/// All reference cells, row by row.
pub fn appendix_table() -> Vec<GoldenCell> {
    let eps2 = [1e-1, 1e-2, 1e-3, 1e-4, 1e-6];
    row(
        "bistable-field",
        ReactionSpec::cubic_bistable(0.4),
        Coupling::FieldStrength,
        [1.0, 5.0, 10.0, 50.0, 100.0],
        [0.142, 0.167, 0.227, 0.874, 1.710],
    )
    .chain(row(
        "fisher-gamma",
        ReactionSpec::fisher(1.0),
        Coupling::Gamma,
        [1e-4, 1e-2, 1.0, 10.0, 100.0],
        [0.020, 0.201, 1.893, 5.919, 22.901],
    ))
    .chain(row(
        "fisher-singular",
        ReactionSpec::fisher(1.0),
        Coupling::Singular,
        eps2,
        [1.011, 0.569, 0.332, 0.229, 0.193],
    ))
    .chain(row(
        "nagylaki-singular",
        ReactionSpec::nagylaki(5.0),
        Coupling::Singular,
        eps2,
        [1.318, 0.875, 0.707, 0.652, 0.626],
    ))
    .chain(row(
        "combustion-singular",
        ReactionSpec::combustion(0.3),
        Coupling::Singular,
        eps2,
        [0.284, 0.167, 0.106, 0.078, 0.063],
    ))
    .chain(row(
        "bistable-singular",
        ReactionSpec::cubic_bistable(0.45),
        Coupling::Singular,
        eps2,
        [0.040, 0.024, 0.015, 0.011, 0.009],
    ))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape() {
        let t = appendix_table();
        assert_eq!(t.len(), 30);
        assert_eq!(t[7].a, 1.0);
        assert!((t[10].a - 1.0 / 0.1f64.sqrt()).abs() < 1e-12);
        assert_eq!(t[0].tolerance(), 0.01);
        assert!((t[9].tolerance() - 0.45802).abs() < 1e-12);
    }
}
