//! Dense state-vector engine for the many-body circuit form of the lattice
//! gas: 2^Q complex amplitudes over Q = 2L qubits, two-qubit gates applied
//! as index-pair scatters, the collide-then-shift step built from swap
//! chains, and number-sector extraction.
//!
//! Qubit alpha (1-based) owns bit alpha - 1 of the state index, so the
//! basis ket with only qubit alpha occupied is |2^(alpha-1)>. Site l of the
//! lattice owns qubits 2l + 1 (spin up) and 2l + 2 (spin down). Hopping
//! entries of a gate applied across non-adjacent qubits pick up the
//! Jordan-Wigner parity of the occupied qubits in between.

use crate::error::{Error, Result};
use crate::evolution::CollideParams;
use crate::gates::chiral_collide_gate;
use crate::numerics::{Mat4, Spinor2, SpinorField, C64};

/// Largest supported register; Q = 16 covers an L = 8 site lattice.
pub const MAX_QUBITS: usize = 16;

/// Dense complex state over `qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
    qubits: usize,
}

impl StateVector {
    pub fn vacuum(qubits: usize) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::Domain(format!(
                "qubit count {qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << qubits];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { amps, qubits })
    }

    pub fn from_amplitudes(amps: Vec<C64>, qubits: usize) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::Domain(format!(
                "qubit count {qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        if amps.len() != 1 << qubits {
            return Err(Error::SizeMismatch(format!(
                "need 2^{qubits} amplitudes, got {}",
                amps.len()
            )));
        }
        Ok(Self { amps, qubits })
    }

    /// Embed a one-body 2-spinor field: the amplitude at site l with spin
    /// sigma becomes the coefficient of |2^(2l + sigma)>.
    pub fn from_one_body(field: &SpinorField) -> Result<Self> {
        let l = field.len();
        let qubits = 2 * l;
        if qubits > MAX_QUBITS {
            return Err(Error::Domain(format!(
                "{l} sites need {qubits} qubits, above {MAX_QUBITS}"
            )));
        }
        let mut state = Self::vacuum(qubits)?;
        state.amps[0] = C64::new(0.0, 0.0);
        for (site, s) in field.sites().iter().enumerate() {
            state.amps[1 << (2 * site)] = s.up;
            state.amps[1 << (2 * site + 1)] = s.down;
        }
        Ok(state)
    }

    /// Extract the one-body sector back onto a 2-spinor lattice field.
    pub fn to_one_body(&self, ell: f64, tau: f64) -> Result<SpinorField> {
        let sites = self.qubits / 2;
        let spinors = (0..sites)
            .map(|l| Spinor2::new(self.amps[1 << (2 * l)], self.amps[1 << (2 * l + 1)]))
            .collect();
        SpinorField::new(spinors, ell, tau)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Expectation of the total number operator.
    pub fn total_number(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| (i.count_ones() as f64) * a.norm_sqr())
            .sum()
    }

    /// Probability weight in each fixed-particle-number sector.
    pub fn sector_populations(&self) -> Vec<f64> {
        let mut pops = vec![0.0; self.qubits + 1];
        for (i, a) in self.amps.iter().enumerate() {
            pops[i.count_ones() as usize] += a.norm_sqr();
        }
        pops
    }

    /// Apply a number-conserving two-qubit gate on qubit bits `qa` and `qb`
    /// (0-based bit positions, qa != qb). The gate matrix is read in the
    /// local basis (|00>, |qa occupied>, |qb occupied>, |both>); its
    /// hopping entries are multiplied by the Jordan-Wigner parity of the
    /// occupied bits strictly between the two.
    pub fn apply_conservative_gate(&mut self, gate: &Mat4, qa: usize, qb: usize) -> Result<()> {
        if qa == qb || qa >= self.qubits || qb >= self.qubits {
            return Err(Error::Domain(format!(
                "gate qubits ({qa}, {qb}) invalid for a {}-qubit register",
                self.qubits
            )));
        }
        for i in 0..4 {
            for j in 0..4 {
                let allowed = matches!((i, j), (0, 0) | (1, 1) | (1, 2) | (2, 1) | (2, 2) | (3, 3));
                if !allowed && gate.0[i][j].norm() > 1e-14 {
                    return Err(Error::ConstraintViolated(
                        "engine gates must be block diagonal over number sectors".into(),
                    ));
                }
            }
        }
        let (lo, hi) = (qa.min(qb), qa.max(qb));
        let between: usize = ((1usize << hi) - 1) & !((1 << (lo + 1)) - 1);
        let bit_a = 1usize << qa;
        let bit_b = 1usize << qb;
        let dim = self.amps.len();
        let g = &gate.0;
        for base in 0..dim {
            if base & (bit_a | bit_b) != 0 {
                continue;
            }
            let ia = base | bit_a;
            let ib = base | bit_b;
            let iab = base | bit_a | bit_b;
            let parity = if (base & between).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            let sign = C64::new(parity, 0.0);
            let (va, vb) = (self.amps[ia], self.amps[ib]);
            self.amps[base] *= g[0][0];
            self.amps[ia] = g[1][1] * va + g[1][2] * sign * vb;
            self.amps[ib] = g[2][1] * sign * va + g[2][2] * vb;
            self.amps[iab] *= g[3][3];
        }
        Ok(())
    }
}

/// Fermionic swap: exchanges single occupancies and flips the sign of the
/// doubly occupied state.
pub fn fermionic_swap() -> Mat4 {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    Mat4::new([
        [one, zero, zero, zero],
        [zero, zero, one, zero],
        [zero, one, zero, zero],
        [zero, zero, zero, -one],
    ])
}

/// One full many-body lattice-gas step: the chiral collide gate on each
/// site's qubit pair, then the right-shift swap chain over the spin-up
/// qubits, then the inverse (left-shift) chain over the spin-down qubits.
/// Norm and total particle number are conserved.
pub fn many_body_step(state: &mut StateVector, params: &CollideParams) -> Result<()> {
    let sites = params.len();
    if state.qubits() != 2 * sites {
        return Err(Error::SizeMismatch(format!(
            "{} qubits cannot host {sites} two-qubit sites",
            state.qubits()
        )));
    }
    for site in 0..sites {
        let gate = chiral_collide_gate(params, site)?;
        state.apply_conservative_gate(&gate, 2 * site, 2 * site + 1)?;
    }
    let chi = fermionic_swap();
    // right shift of up qubits: swaps run from the far end down
    for site in (0..sites.saturating_sub(1)).rev() {
        state.apply_conservative_gate(&chi, 2 * site, 2 * site + 2)?;
    }
    // left shift of down qubits: the transposed chain runs upward
    for site in 0..sites.saturating_sub(1) {
        state.apply_conservative_gate(&chi, 2 * site + 1, 2 * site + 3)?;
    }
    Ok(())
}

/// Amplitudes of the fixed-number sector keyed by their 1-based occupied
/// qubit index tuples in ascending order.
pub fn sector_project(state: &StateVector, bodies: usize) -> Result<Vec<(Vec<usize>, C64)>> {
    if !(1..=3).contains(&bodies) {
        return Err(Error::Domain(format!(
            "sector extraction supports 1..=3 bodies, got {bodies}"
        )));
    }
    let mut entries = Vec::new();
    for (index, amp) in state.amps.iter().enumerate() {
        if index.count_ones() as usize != bodies {
            continue;
        }
        let occupied: Vec<usize> = (0..state.qubits)
            .filter(|bit| index & (1 << bit) != 0)
            .map(|bit| bit + 1)
            .collect();
        entries.push((occupied, *amp));
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{step, CollideParams};
    use crate::experiments::random_normalized_field;

    #[test]
    fn vacuum_is_fixed_by_the_step() {
        let params = CollideParams::uniform(0.3, 1.2, 1.0, 1.0, 4).unwrap();
        let mut state = StateVector::vacuum(8).unwrap();
        many_body_step(&mut state, &params).unwrap();
        assert!((state.amplitude(0) - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((state.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn one_body_round_trip() {
        let field = random_normalized_field(4, 1.0, 1.0, 5).unwrap();
        let state = StateVector::from_one_body(&field).unwrap();
        let back = state.to_one_body(1.0, 1.0).unwrap();
        for (a, b) in back.sites().iter().zip(field.sites()) {
            assert!((a.up - b.up).norm() < 1e-15);
            assert!((a.down - b.down).norm() < 1e-15);
        }
        assert!((state.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn circuit_matches_lattice_step_one_body() {
        let sites = 4;
        let m = 0.3f64.asin(); // eps = 0.3 with gamma = 1, ell = 1
        let params = CollideParams::uniform(m, 1.0, 1.0, 1.0, sites).unwrap();
        let field = random_normalized_field(sites, 1.0, 1.0, 99).unwrap();
        let mut state = StateVector::from_one_body(&field).unwrap();
        let mut reference = field;
        for _ in 0..25 {
            many_body_step(&mut state, &params).unwrap();
            reference = step(&reference, &params).unwrap();
        }
        let circuit = state.to_one_body(1.0, 1.0).unwrap();
        let mut worst = 0.0f64;
        for (a, b) in circuit.sites().iter().zip(reference.sites()) {
            worst = worst.max((a.up - b.up).norm());
            worst = worst.max((a.down - b.down).norm());
        }
        assert!(worst < 1e-13, "cross-engine deviation {worst:e}");
    }

    #[test]
    fn circuit_matches_lattice_with_position_dependent_mass() {
        let sites = 4;
        let mass = vec![0.1, 0.4, 0.0, 0.7];
        let gamma = vec![1.0, 1.5, 1.0, 1.1];
        let params = CollideParams::new(mass, gamma, 0.8, 1.0).unwrap();
        let field = random_normalized_field(sites, 0.8, 1.0, 123).unwrap();
        let mut state = StateVector::from_one_body(&field).unwrap();
        let mut reference = field;
        for _ in 0..10 {
            many_body_step(&mut state, &params).unwrap();
            reference = step(&reference, &params).unwrap();
        }
        let circuit = state.to_one_body(0.8, 1.0).unwrap();
        for (a, b) in circuit.sites().iter().zip(reference.sites()) {
            assert!((a.up - b.up).norm() < 1e-13);
            assert!((a.down - b.down).norm() < 1e-13);
        }
    }

    #[test]
    fn two_body_norm_and_number_conserved() {
        let sites = 3;
        let params = CollideParams::uniform(0.35, 1.0, 1.0, 1.0, sites).unwrap();
        // antisymmetric-style two-body superposition over a few pairs
        let mut amps = vec![C64::new(0.0, 0.0); 64];
        amps[0b000011] = C64::new(0.5, 0.0);
        amps[0b000101] = C64::new(0.0, 0.5);
        amps[0b100100] = C64::new(-0.5, 0.0);
        amps[0b010010] = C64::new(0.0, -0.5);
        let mut state = StateVector::from_amplitudes(amps, 6).unwrap();
        assert!((state.norm() - 1.0).abs() < 1e-14);
        for _ in 0..100 {
            many_body_step(&mut state, &params).unwrap();
        }
        assert!((state.norm() - 1.0).abs() < 1e-12);
        assert!((state.total_number() - 2.0).abs() < 1e-12);
        let pops = state.sector_populations();
        assert!((pops[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sector_projection_single_excitation() {
        let mut amps = vec![C64::new(0.0, 0.0); 16];
        amps[0b0100] = C64::new(1.0, 0.0); // qubit 3 occupied
        let state = StateVector::from_amplitudes(amps, 4).unwrap();
        let one = sector_project(&state, 1).unwrap();
        let nonzero: Vec<_> = one.iter().filter(|(_, a)| a.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].0, vec![3]);
    }

    #[test]
    fn sector_projection_two_body_basis_ket() {
        let mut amps = vec![C64::new(0.0, 0.0); 16];
        amps[0b1001] = C64::new(0.0, 1.0); // qubits 1 and 4
        let state = StateVector::from_amplitudes(amps, 4).unwrap();
        let two = sector_project(&state, 2).unwrap();
        let nonzero: Vec<_> = two.iter().filter(|(_, a)| a.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].0, vec![1, 4]);
        assert!((nonzero[0].1.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sector_populations_preserved_by_step() {
        let sites = 3;
        let params = CollideParams::uniform(0.5, 1.2, 0.7, 1.0, sites).unwrap();
        let rngfield = random_normalized_field(sites, 0.7, 1.0, 31).unwrap();
        // superpose one- and two-body content
        let mut amps = vec![C64::new(0.0, 0.0); 64];
        for (l, s) in rngfield.sites().iter().enumerate() {
            amps[1 << (2 * l)] = s.up * C64::new(0.6, 0.0);
            amps[1 << (2 * l + 1)] = s.down * C64::new(0.6, 0.0);
        }
        amps[0b011000] = C64::new(0.8, 0.0);
        let raw = StateVector::from_amplitudes(amps, 6).unwrap();
        let norm = raw.norm();
        let amps: Vec<C64> = raw.amplitudes().iter().map(|a| a / norm).collect();
        let mut state = StateVector::from_amplitudes(amps, 6).unwrap();
        let before = state.sector_populations();
        for _ in 0..20 {
            many_body_step(&mut state, &params).unwrap();
        }
        let after = state.sector_populations();
        for (b, a) in before.iter().zip(&after) {
            assert!((b - a).abs() < 1e-12);
        }
    }

    #[test]
    fn gate_rejects_non_conservative_matrix() {
        let mut bad = Mat4::identity();
        bad.0[0][3] = C64::new(0.5, 0.0);
        let mut state = StateVector::vacuum(4).unwrap();
        assert!(matches!(
            state.apply_conservative_gate(&bad, 0, 1),
            Err(Error::ConstraintViolated(_))
        ));
    }
}
