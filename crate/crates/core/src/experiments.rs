//! Reproducible experiments around the bundled counterexample: a pair of
//! observables on dimension 3 that is coexistent but not jointly measurable.

use num_complex::Complex64;

use crate::linalg::HermitianMatrix;
use crate::povm::{Povm, VALIDATION_TOL};

/// The bundled counterexample pair and its coexistence witness.
///
/// With `|ψ⟩ = (|0⟩+|1⟩+|2⟩)/√3`:
/// - `A` has effects `A_i = ½(1 - |i⟩⟨i|)`, i = 0,1,2;
/// - `B` has effects `B_0 = ½|ψ⟩⟨ψ|` and `B_1 = 1 - B_0`;
/// - `M` is the 5-outcome observable
///   `(½|0⟩⟨0|, ½|1⟩⟨1|, ½|2⟩⟨2|, B_0, ½·1 - B_0)` whose range contains
///   every effect of `A` and `B`.
#[derive(Debug, Clone)]
pub struct Counterexample {
    a: Povm,
    b: Povm,
    m: Povm,
    psi: Vec<Complex64>,
}

impl Counterexample {
    pub fn a(&self) -> &Povm {
        &self.a
    }

    pub fn b(&self) -> &Povm {
        &self.b
    }

    /// The 5-outcome coexistence witness.
    pub fn m(&self) -> &Povm {
        &self.m
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }
}

/// Build the counterexample pair; all three observables pass validation.
pub fn counterexample() -> Counterexample {
    let third = 3f64.sqrt().recip();
    let psi: Vec<Complex64> = (0..3).map(|_| Complex64::new(third, 0.0)).collect();

    let identity = HermitianMatrix::identity(3);
    let a_effects: Vec<HermitianMatrix> = (0..3)
        .map(|i| {
            let mut basis = vec![Complex64::ZERO; 3];
            basis[i] = Complex64::ONE;
            identity
                .sub(&HermitianMatrix::projector(&basis))
                .expect("same dim")
                .scale(0.5)
        })
        .collect();

    let b0 = HermitianMatrix::projector(&psi).scale(0.5);
    let b1 = identity.sub(&b0).expect("same dim");

    let mut m_effects: Vec<HermitianMatrix> = (0..3)
        .map(|i| {
            let mut basis = vec![Complex64::ZERO; 3];
            basis[i] = Complex64::ONE;
            HermitianMatrix::projector(&basis).scale(0.5)
        })
        .collect();
    m_effects.push(b0.clone());
    m_effects.push(identity.scale(0.5).sub(&b0).expect("same dim"));

    let a = Povm::new(a_effects, VALIDATION_TOL).expect("A is a valid POVM");
    let b = Povm::new(vec![b0, b1], VALIDATION_TOL).expect("B is a valid POVM");
    let m = Povm::new(m_effects, VALIDATION_TOL).expect("M is a valid POVM");

    Counterexample { a, b, m, psi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn counterexample_invariants() {
        let cx = counterexample();
        assert_eq!(cx.a().num_outcomes(), 3);
        assert_eq!(cx.b().num_outcomes(), 2);
        assert_eq!(cx.m().num_outcomes(), 5);

        // ⟨i|A_i|i⟩ = 0 and |⟨i|ψ⟩|² = 1/3
        for i in 0..3 {
            let mut basis = vec![Complex64::ZERO; 3];
            basis[i] = Complex64::ONE;
            assert_relative_eq!(
                cx.a().effect(i).expectation(&basis).unwrap(),
                0.0,
                epsilon = 1e-12
            );
            assert_relative_eq!(cx.psi()[i].norm_sqr(), 1.0 / 3.0, epsilon = 1e-12);
        }

        assert_relative_eq!(cx.b().effect(0).trace(), 0.5, epsilon = 1e-12);

        let sum = cx
            .m()
            .effects()
            .iter()
            .fold(HermitianMatrix::zeros(3), |acc, e| {
                acc.add(e.matrix()).unwrap()
            });
        assert!(
            sum.sub(&HermitianMatrix::identity(3))
                .unwrap()
                .frobenius_norm()
                < 1e-12
        );
    }
}
