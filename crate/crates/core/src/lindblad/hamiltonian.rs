use num_complex::Complex64;

use super::{Basis, BasisState, CMatrix, DissipatorKind};
use crate::qed::CoupledSystem;

fn operator_from_map(basis: &Basis, map: impl Fn(BasisState) -> Option<(BasisState, f64)>) -> CMatrix {
    let n = basis.len();
    let mut op = CMatrix::zeros(n, n);
    for (col, &s) in basis.states().iter().enumerate() {
        if let Some((target, amp)) = map(s) {
            if let Some(row) = basis.index_of(target) {
                op[(row, col)] = Complex64::new(amp, 0.0);
            }
        }
    }
    op
}

/// Emitter lowering operator |g⟩⟨e| ⊗ 1.
pub fn lowering_operator(basis: &Basis) -> CMatrix {
    operator_from_map(basis, |s| {
        s.excited()
            .then(|| BasisState::from_parts(false, s.photons()).map(|t| (t, 1.0)))
            .flatten()
    })
}

/// Cavity annihilation operator 1 ⊗ a, truncated to the basis.
pub fn annihilation_operator(basis: &Basis) -> CMatrix {
    operator_from_map(basis, |s| {
        let n = s.photons();
        (n > 0)
            .then(|| BasisState::from_parts(s.excited(), n - 1).map(|t| (t, (n as f64).sqrt())))
            .flatten()
    })
}

pub(crate) fn excited_projector(basis: &Basis) -> CMatrix {
    operator_from_map(basis, |s| s.excited().then_some((s, 1.0)))
}

pub(crate) fn jump_operator(basis: &Basis, kind: DissipatorKind) -> CMatrix {
    match kind {
        DissipatorKind::EmitterDecay => lowering_operator(basis),
        DissipatorKind::PureDephasing => excited_projector(basis),
        DissipatorKind::CavityLoss => annihilation_operator(basis),
    }
}

/// H/ħ = δ a†a − g(a†σ + aσ†) in the interaction picture.
pub fn build_hamiltonian(system: &CoupledSystem, basis: &Basis) -> CMatrix {
    let a = annihilation_operator(basis);
    let sigma = lowering_operator(basis);
    let ad = a.adjoint();
    let number = &ad * &a;
    // a†σ never leaves the single-excitation space; its adjoint written as
    // a·σ† would pass through the truncated |e,1⟩.
    let raise = &ad * &sigma;
    let exchange = &raise + raise.adjoint();
    number * Complex64::new(system.delta(), 0.0) - exchange * Complex64::new(system.g(), 0.0)
}
