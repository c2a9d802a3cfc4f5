//! Qubit algebra: representation conversions and Bloch rotations, the
//! Jordan-Wigner ladder operators, the conservative two-qubit gate family
//! and its Hamiltonian generators, and the chiral collide gate whose central
//! block is exactly the lattice collide unitary.
//!
//! Dense 4 x 4 gates are written in the two-qubit number basis ordered
//! (|00>, |01>, |10>, |11>) with the first-listed qubit on the most
//! significant slot. Jordan-Wigner matrices put qubit 1 on the leftmost
//! (most significant) tensor factor, so the Q = 2 ladder matrices come out
//! in their familiar explicit 4 x 4 form.

use crate::error::{Error, Result};
use crate::evolution::{build_collide, CollideParams};
use crate::numerics::{DenseMat, Mat2, Mat4, C64};

/// A pure qubit state by its Euler angles on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub theta: f64,
    pub phi: f64,
}

impl QubitState {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::Domain(format!("theta = {theta} outside [0, pi]")));
        }
        if !(0.0..std::f64::consts::TAU).contains(&phi) {
            return Err(Error::Domain(format!("phi = {phi} outside [0, 2 pi)")));
        }
        Ok(Self { theta, phi })
    }
}

/// The three equivalent faces of one qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitRepresentations {
    /// cos(theta/2)|0> + sin(theta/2) e^{i phi}|1>.
    pub hilbert: [C64; 2],
    /// Unit vector (sin t cos p, sin t sin p, cos t).
    pub bloch: [f64; 3],
    /// M_q = q . sigma, Hermitian, traceless, squaring to one.
    pub su2: Mat2,
}

pub fn qubit_representations(q: &QubitState) -> QubitRepresentations {
    let (t, p) = (q.theta, q.phi);
    let hilbert = [
        C64::new((t / 2.0).cos(), 0.0),
        C64::from_polar((t / 2.0).sin(), p),
    ];
    let bloch = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
    let su2 = Mat2::new([
        [C64::new(t.cos(), 0.0), C64::from_polar(t.sin(), -p)],
        [C64::from_polar(t.sin(), p), C64::new(-t.cos(), 0.0)],
    ]);
    QubitRepresentations {
        hilbert,
        bloch,
        su2,
    }
}

fn check_axis(axis: [f64; 3]) -> Result<()> {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::BadAxis { norm });
    }
    Ok(())
}

/// Rotate a Bloch vector about a unit axis by the Rodrigues formula
/// q' = cos(t) q + (1 - cos t) n (n . q) + sin(t) n x q.
pub fn rotate_bloch(q: [f64; 3], axis: [f64; 3], angle: f64) -> Result<[f64; 3]> {
    check_axis(axis)?;
    let (c, s) = (angle.cos(), angle.sin());
    let dot = axis[0] * q[0] + axis[1] * q[1] + axis[2] * q[2];
    let cross = [
        axis[1] * q[2] - axis[2] * q[1],
        axis[2] * q[0] - axis[0] * q[2],
        axis[0] * q[1] - axis[1] * q[0],
    ];
    Ok([
        c * q[0] + (1.0 - c) * dot * axis[0] + s * cross[0],
        c * q[1] + (1.0 - c) * dot * axis[1] + s * cross[1],
        c * q[2] + (1.0 - c) * dot * axis[2] + s * cross[2],
    ])
}

/// The same rotation through the SU(2) similarity transform
/// q' . sigma = U (q . sigma) U^dag with U = e^{-i (angle/2) axis . sigma}.
pub fn rotate_bloch_su2(q: [f64; 3], axis: [f64; 3], angle: f64) -> Result<[f64; 3]> {
    check_axis(axis)?;
    let half = angle / 2.0;
    let (c, s) = (half.cos(), half.sin());
    let u = Mat2::new([
        [
            C64::new(c, -s * axis[2]),
            C64::new(-s * axis[1], -s * axis[0]),
        ],
        [
            C64::new(s * axis[1], -s * axis[0]),
            C64::new(c, s * axis[2]),
        ],
    ]);
    let m = Mat2::new([
        [C64::new(q[2], 0.0), C64::new(q[0], -q[1])],
        [C64::new(q[0], q[1]), C64::new(-q[2], 0.0)],
    ]);
    let rotated = u.mul(&m).mul(&u.adjoint());
    Ok([rotated.0[1][0].re, rotated.0[1][0].im, rotated.0[0][0].re])
}

/// Maximum qubit count for dense ladder matrices; above this the engine's
/// scatter representation is the only supported route.
pub const MAX_DENSE_QUBITS: usize = 8;

/// Jordan-Wigner annihilation operator for qubit `i` (1-based) in a
/// register of `q` qubits: sigma_z on the i-1 qubits before it, the
/// singleton lowering operator at slot i, identity after.
pub fn jw_annihilation(i: usize, q: usize) -> DenseMat {
    assert!(
        i >= 1 && i <= q && q <= MAX_DENSE_QUBITS,
        "need 1 <= i <= q <= {MAX_DENSE_QUBITS}, got i = {i}, q = {q}"
    );
    let sz = DenseMat::from_mat2(&crate::numerics::sigma_z());
    let mut lower = DenseMat::zeros(2);
    lower.set(0, 1, C64::new(1.0, 0.0));
    let eye = DenseMat::identity(2);
    let mut acc = DenseMat::identity(1);
    for slot in 1..=q {
        let factor = if slot < i {
            &sz
        } else if slot == i {
            &lower
        } else {
            &eye
        };
        acc = acc.kron(factor);
    }
    acc
}

/// The (annihilation, creation) pair for qubit `i`; the creation operator
/// is the transpose since all entries are real.
pub fn jw_ladder(i: usize, q: usize) -> (DenseMat, DenseMat) {
    let a = jw_annihilation(i, q);
    let adag = a.transpose();
    (a, adag)
}

/// Unfolded number operator 1 x ... x n x ... x 1 with n at slot `i`.
pub fn number_operator(i: usize, q: usize) -> DenseMat {
    assert!(
        i >= 1 && i <= q && q <= MAX_DENSE_QUBITS,
        "need 1 <= i <= q <= {MAX_DENSE_QUBITS}, got i = {i}, q = {q}"
    );
    let mut n = DenseMat::zeros(2);
    n.set(1, 1, C64::new(1.0, 0.0));
    let eye = DenseMat::identity(2);
    let mut acc = DenseMat::identity(1);
    for slot in 1..=q {
        acc = acc.kron(if slot == i { &n } else { &eye });
    }
    acc
}

/// Which algebraic identity the gate Hamiltonian satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateFamily {
    /// H^2 = H; the gate is 1 + (e^z - 1) H.
    Idempotent,
    /// H^3 = H with H^2 neither H nor 1; the gate is
    /// 1 + sinh(z) H + (cosh(z) - 1) H^2.
    TriIdempotent,
}

/// Sign branch of the diagonal Hamiltonian entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

/// Parameterization of the conservative-gate family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSpec {
    /// Gate parameter z in Upsilon(z) = e^{z H}.
    pub z: C64,
    /// Phase angle carried by the named constructors' couplings.
    pub xi: f64,
    /// Bottom-right occupancy flag; 0 or 1 by unitarity.
    pub delta: u8,
    /// Coupling B on the entangling off-diagonal.
    pub coupling: C64,
    pub family: GateFamily,
    pub branch: Branch,
}

impl GateSpec {
    pub fn new(
        z: C64,
        xi: f64,
        delta: u8,
        coupling: C64,
        family: GateFamily,
        branch: Branch,
    ) -> Result<Self> {
        if delta > 1 {
            return Err(Error::ConstraintViolated(format!(
                "delta must be 0 or 1, got {delta}"
            )));
        }
        let limit = match family {
            GateFamily::Idempotent => 0.5,
            GateFamily::TriIdempotent => 1.0,
        };
        if coupling.norm() > limit + 1e-12 {
            return Err(Error::ConstraintViolated(format!(
                "|B| = {} exceeds {limit} for {family:?}",
                coupling.norm()
            )));
        }
        Ok(Self {
            z,
            xi,
            delta,
            coupling,
            family,
            branch,
        })
    }

    /// The swap gate: idempotent family at z = i pi with B = -e^{-i xi}/2.
    pub fn swap(xi: f64, delta: u8) -> Result<Self> {
        Self::new(
            C64::new(0.0, std::f64::consts::PI),
            xi,
            delta,
            C64::from_polar(0.5, -xi + std::f64::consts::PI),
            GateFamily::Idempotent,
            Branch::Plus,
        )
    }

    /// The entangling square root of swap: same Hamiltonian at z = i pi/2.
    pub fn sqrt_swap(xi: f64, delta: u8) -> Result<Self> {
        Self::new(
            C64::new(0.0, std::f64::consts::FRAC_PI_2),
            xi,
            delta,
            C64::from_polar(0.5, -xi + std::f64::consts::PI),
            GateFamily::Idempotent,
            Branch::Plus,
        )
    }

    /// The antisymmetric swap: tri-idempotent family at z = i pi/2 with
    /// B = i e^{-i xi}.
    pub fn aswap(xi: f64, delta: u8) -> Result<Self> {
        Self::new(
            C64::new(0.0, std::f64::consts::FRAC_PI_2),
            xi,
            delta,
            C64::from_polar(1.0, std::f64::consts::FRAC_PI_2 - xi),
            GateFamily::TriIdempotent,
            Branch::Plus,
        )
    }

    /// The entangling square root of the antisymmetric swap, z = i pi/4.
    pub fn sqrt_aswap(xi: f64, delta: u8) -> Result<Self> {
        Self::new(
            C64::new(0.0, std::f64::consts::FRAC_PI_4),
            xi,
            delta,
            C64::from_polar(1.0, std::f64::consts::FRAC_PI_2 - xi),
            GateFamily::TriIdempotent,
            Branch::Plus,
        )
    }
}

/// The Hamiltonian generator of a conservative gate: zero on the vacuum,
/// an SU(2)-like block on the one-particle pair, delta on double occupancy.
pub fn gate_hamiltonian(spec: &GateSpec) -> Result<Mat4> {
    let b = spec.coupling;
    // a discriminant within rounding of zero is the maximally-coupled
    // degenerate point; taking its square root would amplify 1e-16 noise
    // to 1e-8, so snap it
    let snapped_root = |disc: f64| {
        if disc.abs() <= 1e-14 {
            0.0
        } else {
            disc.max(0.0).sqrt()
        }
    };
    let (a_diag, d_diag) = match spec.family {
        GateFamily::Idempotent => {
            let disc = 1.0 - 4.0 * b.norm_sqr();
            if disc < -1e-12 {
                return Err(Error::ConstraintViolated(format!(
                    "idempotent family needs |B| <= 1/2, got {}",
                    b.norm()
                )));
            }
            let root = snapped_root(disc);
            match spec.branch {
                Branch::Plus => (0.5 * (1.0 + root), 0.5 * (1.0 - root)),
                Branch::Minus => (0.5 * (1.0 - root), 0.5 * (1.0 + root)),
            }
        }
        GateFamily::TriIdempotent => {
            let disc = 1.0 - b.norm_sqr();
            if disc < -1e-12 {
                return Err(Error::ConstraintViolated(format!(
                    "tri-idempotent family needs |B| <= 1, got {}",
                    b.norm()
                )));
            }
            let root = snapped_root(disc);
            match spec.branch {
                Branch::Plus => (root, -root),
                Branch::Minus => (-root, root),
            }
        }
    };
    let zero = C64::new(0.0, 0.0);
    let h = Mat4::new([
        [zero, zero, zero, zero],
        [zero, C64::new(a_diag, 0.0), b, zero],
        [zero, b.conj(), C64::new(d_diag, 0.0), zero],
        [zero, zero, zero, C64::new(spec.delta as f64, 0.0)],
    ]);
    verify_family_identity(&h, spec.family)?;
    Ok(h)
}

fn verify_family_identity(h: &Mat4, family: GateFamily) -> Result<()> {
    let h2 = h.mul(h);
    match family {
        GateFamily::Idempotent => {
            let dev = h2.max_abs_diff(h);
            if dev > 1e-12 {
                return Err(Error::ConstraintViolated(format!(
                    "H^2 = H fails by {dev:.3e}"
                )));
            }
        }
        GateFamily::TriIdempotent => {
            let h3 = h2.mul(h);
            let dev = h3.max_abs_diff(h);
            if dev > 1e-12 {
                return Err(Error::ConstraintViolated(format!(
                    "H^3 = H fails by {dev:.3e}"
                )));
            }
        }
    }
    Ok(())
}

/// Conservative two-qubit gate Upsilon(z) = e^{z H}, evaluated in closed
/// form through the family identity. Block diagonal over the particle
/// number sectors {|00>, span(|01>, |10>), |11>}.
pub fn conservative_gate(spec: &GateSpec) -> Result<Mat4> {
    let h = gate_hamiltonian(spec)?;
    let gate = match spec.family {
        GateFamily::Idempotent => {
            let w = spec.z.exp() - C64::new(1.0, 0.0);
            Mat4::identity().add(&h.scaled(w))
        }
        GateFamily::TriIdempotent => {
            let sinh = spec.z.sinh();
            let coshm1 = spec.z.cosh() - C64::new(1.0, 0.0);
            Mat4::identity()
                .add(&h.scaled(sinh))
                .add(&h.mul(&h).scaled(coshm1))
        }
    };
    Ok(gate)
}

/// Mixing amplitude, phase, and corner phase of the chiral collide gate at
/// one site.
fn chiral_site_parameters(params: &CollideParams, site: usize) -> Result<(f64, f64, C64)> {
    let eps = params.eps(site);
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!(
            "chiral mixing amplitude {eps} at site {site} outside [0, 1]; keep gamma m ell within [0, pi]"
        )));
    }
    let theta = eps.asin();
    Ok((eps, params.xi(site), C64::from_polar(1.0, -theta)))
}

/// The two-qubit entangling gate that scatters the spin-up and spin-down
/// occupancies at one point: unit on the vacuum, the collide unitary on the
/// one-particle block, the phase e^{-i arccos sqrt(1 - eps^2)} on double
/// occupancy.
pub fn chiral_collide_gate(params: &CollideParams, site: usize) -> Result<Mat4> {
    let (_, _, corner) = chiral_site_parameters(params, site)?;
    let u = build_collide(params, site)?;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    Ok(Mat4::new([
        [one, zero, zero, zero],
        [zero, u.0[0][0], u.0[0][1], zero],
        [zero, u.0[1][0], u.0[1][1], zero],
        [zero, zero, zero, corner],
    ]))
}

/// The tri-idempotent generator N of the chiral collide gate: couplings
/// B = e^{-i xi} on the one-particle block and unit double occupancy.
pub fn chiral_collide_generator(params: &CollideParams, site: usize) -> Result<Mat4> {
    let (_, xi, _) = chiral_site_parameters(params, site)?;
    let b = C64::from_polar(1.0, -xi);
    let zero = C64::new(0.0, 0.0);
    Ok(Mat4::new([
        [zero, zero, zero, zero],
        [zero, zero, b, zero],
        [zero, b.conj(), zero, zero],
        [zero, zero, zero, C64::new(1.0, 0.0)],
    ]))
}

/// The same gate assembled from the ladder-operator expression at
/// z = -i arcsin(eps), with qubit a holding the spin-up occupancy and
/// qubit b the spin-down one:
/// `1 - n_a - n_b + n_a n_b + sinh(z)(B adag_a a_b + Bdag adag_b a_a) +
/// cosh(z)(n_a + n_b - 2 n_a n_b) + e^z n_a n_b`.
pub fn chiral_collide_gate_from_ladder(params: &CollideParams, site: usize) -> Result<Mat4> {
    let (eps, xi, corner) = chiral_site_parameters(params, site)?;
    let b = C64::from_polar(1.0, -xi);
    // local two-qubit ladder matrices in the (00, up, down, updown) basis
    // with |updown> = a_up^dag a_dn^dag |00>
    let mut a_up_dag = DenseMat::zeros(4);
    a_up_dag.set(1, 0, C64::new(1.0, 0.0));
    a_up_dag.set(3, 2, C64::new(1.0, 0.0));
    let mut a_dn_dag = DenseMat::zeros(4);
    a_dn_dag.set(2, 0, C64::new(1.0, 0.0));
    a_dn_dag.set(3, 1, C64::new(-1.0, 0.0));
    let a_up = a_up_dag.transpose();
    let a_dn = a_dn_dag.transpose();
    let n_up = a_up_dag.mul(&a_up);
    let n_dn = a_dn_dag.mul(&a_dn);
    let n_both = n_up.mul(&n_dn);

    let cosh_z = C64::new((1.0 - eps * eps).sqrt(), 0.0);
    let sinh_z = C64::new(0.0, -eps);

    let hop = a_up_dag
        .mul(&a_dn)
        .scaled(b)
        .add(&a_dn_dag.mul(&a_up).scaled(b.conj()));
    let sum = DenseMat::identity(4)
        .sub(&n_up)
        .sub(&n_dn)
        .add(&n_both)
        .add(&hop.scaled(sinh_z))
        .add(
            &n_up
                .add(&n_dn)
                .sub(&n_both.scaled(C64::new(2.0, 0.0)))
                .scaled(cosh_z),
        )
        .add(&n_both.scaled(corner));

    let mut out = Mat4::zero();
    for i in 0..4 {
        for j in 0..4 {
            out.0[i][j] = sum.get(i, j);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::SplitMix64;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn representations_north_pole() {
        let r = qubit_representations(&QubitState::new(0.0, 0.0).unwrap());
        assert!((r.hilbert[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(r.hilbert[1].norm() < 1e-15);
        assert_eq!(r.bloch, [0.0, 0.0, 1.0]);
        assert!(r.su2.max_abs_diff(&crate::numerics::sigma_z()) < 1e-15);
    }

    #[test]
    fn representations_equator() {
        let r = qubit_representations(&QubitState::new(FRAC_PI_2, 0.0).unwrap());
        assert!((r.bloch[0] - 1.0).abs() < 1e-15);
        assert!(r.bloch[1].abs() < 1e-15);
        assert!(r.bloch[2].abs() < 1e-16);
        assert!(r.su2.max_abs_diff(&crate::numerics::sigma_x()) < 1e-15);
    }

    #[test]
    fn representation_su2_eigenvalues_are_unit() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..50 {
            let q = QubitState::new(
                rng.in_range(0.0, PI),
                rng.in_range(0.0, std::f64::consts::TAU),
            )
            .unwrap();
            let r = qubit_representations(&q);
            let (l1, l2) = r.su2.eigenvalues();
            let mut got = [l1.re, l2.re];
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!((got[0] + 1.0).abs() < 1e-12 && (got[1] - 1.0).abs() < 1e-12);
            assert!(l1.im.abs() < 1e-12 && l2.im.abs() < 1e-12);
            // bloch vector is unit
            let n: f64 = r.bloch.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-13);
            // M_q squares to one
            assert!(r.su2.mul(&r.su2).max_abs_diff(&Mat2::identity()) < 1e-13);
        }
    }

    #[test]
    fn rotation_about_parallel_axis_is_identity() {
        let q = [0.0, 0.0, 1.0];
        let out = rotate_bloch(q, [0.0, 0.0, 1.0], 1.2345).unwrap();
        for i in 0..3 {
            assert!((out[i] - q[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn rotation_about_perpendicular_axis_quarter_turn() {
        let q = [0.0, 0.0, 1.0];
        let out = rotate_bloch(q, [1.0, 0.0, 0.0], FRAC_PI_2).unwrap();
        // n x q = (0, -1, 0) wait: x cross z = -y... compute: (1,0,0)x(0,0,1) = (0*1-0*0, 0*0-1*1, 0) = (0,-1,0)
        assert!(out[0].abs() < 1e-15);
        assert!((out[1] + 1.0).abs() < 1e-15);
        assert!(out[2].abs() < 1e-15);
    }

    #[test]
    fn rotation_rejects_non_unit_axis() {
        assert!(matches!(
            rotate_bloch([0.0, 0.0, 1.0], [0.0, 0.0, 2.0], 0.3),
            Err(Error::BadAxis { .. })
        ));
    }

    #[test]
    fn su2_and_rodrigues_paths_agree() {
        let mut rng = SplitMix64::new(99);
        for _ in 0..100 {
            // random unit q and axis
            let unit = |rng: &mut SplitMix64| {
                let v = [
                    rng.in_range(-1.0, 1.0),
                    rng.in_range(-1.0, 1.0),
                    rng.in_range(-1.0, 1.0),
                ];
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                [v[0] / n, v[1] / n, v[2] / n]
            };
            let q = unit(&mut rng);
            let axis = unit(&mut rng);
            let angle = rng.in_range(-6.3, 6.3);
            let a = rotate_bloch(q, axis, angle).unwrap();
            let b = rotate_bloch_su2(q, axis, angle).unwrap();
            for i in 0..3 {
                assert!((a[i] - b[i]).abs() < 1e-12, "{a:?} vs {b:?}");
            }
            let n: f64 = a.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn jw_two_qubit_matrices_have_explicit_forms() {
        // a1 = a x 1, a2 = sigma_z x a and their transposes.
        let (a1, a1d) = jw_ladder(1, 2);
        let (a2, a2d) = jw_ladder(2, 2);
        let expect = |entries: [[f64; 4]; 4]| {
            let mut m = DenseMat::zeros(4);
            for (i, row) in entries.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    m.set(i, j, c(*v, 0.0));
                }
            }
            m
        };
        let want_a1d = expect([
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ]);
        let want_a2d = expect([
            [0.0, 0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 0.0],
        ]);
        assert_eq!(a1d.max_abs_diff(&want_a1d), 0.0);
        assert_eq!(a2d.max_abs_diff(&want_a2d), 0.0);
        assert_eq!(a1.max_abs_diff(&want_a1d.transpose()), 0.0);
        assert_eq!(a2.max_abs_diff(&want_a2d.transpose()), 0.0);
    }

    #[test]
    fn jw_anticommutators_q4() {
        let q = 4;
        let dim = 1 << q;
        for i in 1..=q {
            for j in 1..=q {
                let (ai, aid) = jw_ladder(i, q);
                let (aj, ajd) = jw_ladder(j, q);
                let want = if i == j {
                    DenseMat::identity(dim)
                } else {
                    DenseMat::zeros(dim)
                };
                assert!(ai.anticommutator(&ajd).max_abs_diff(&want) < 1e-14);
                assert!(ai.anticommutator(&aj).max_abs() < 1e-14);
                assert!(aid.anticommutator(&ajd).max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn jw_number_operator_unfolds() {
        for q in [2usize, 3, 5] {
            for i in 1..=q {
                let (a, adag) = jw_ladder(i, q);
                let n = adag.mul(&a);
                assert!(n.max_abs_diff(&number_operator(i, q)) < 1e-15);
            }
        }
    }

    #[test]
    fn swap_gate_matches_displayed_form() {
        for &xi in &[0.0, 0.37] {
            for delta in [0u8, 1] {
                let gate = conservative_gate(&GateSpec::swap(xi, delta).unwrap()).unwrap();
                let corner = if delta == 0 { 1.0 } else { -1.0 };
                let zero = c(0.0, 0.0);
                let want = Mat4::new([
                    [c(1.0, 0.0), zero, zero, zero],
                    [zero, zero, C64::from_polar(1.0, -xi), zero],
                    [zero, C64::from_polar(1.0, xi), zero, zero],
                    [zero, zero, zero, c(corner, 0.0)],
                ]);
                assert!(gate.max_abs_diff(&want) < 1e-14);
            }
        }
    }

    #[test]
    fn sqrt_swap_gate_matches_displayed_form() {
        let xi = 0.0;
        for delta in [0u8, 1] {
            let gate = conservative_gate(&GateSpec::sqrt_swap(xi, delta).unwrap()).unwrap();
            let zero = c(0.0, 0.0);
            let corner = c(1.0, 0.0) + c(-1.0, 1.0) * c(delta as f64, 0.0);
            let want = Mat4::new([
                [c(1.0, 0.0), zero, zero, zero],
                [zero, c(0.5, 0.5), c(0.5, -0.5), zero],
                [zero, c(0.5, -0.5), c(0.5, 0.5), zero],
                [zero, zero, zero, corner],
            ]);
            assert!(gate.max_abs_diff(&want) < 1e-14);
            // squaring recovers the full swap
            let squared = gate.mul(&gate);
            let swap = conservative_gate(&GateSpec::swap(xi, delta).unwrap()).unwrap();
            assert!(squared.max_abs_diff(&swap) < 1e-14);
        }
    }

    #[test]
    fn aswap_gate_matches_displayed_form() {
        for &xi in &[0.0, 1.1] {
            for delta in [0u8, 1] {
                let gate = conservative_gate(&GateSpec::aswap(xi, delta).unwrap()).unwrap();
                let zero = c(0.0, 0.0);
                let corner = c(1.0, 0.0) + c(-1.0, 1.0) * c(delta as f64, 0.0);
                let want = Mat4::new([
                    [c(1.0, 0.0), zero, zero, zero],
                    [zero, zero, -C64::from_polar(1.0, -xi), zero],
                    [zero, C64::from_polar(1.0, xi), zero, zero],
                    [zero, zero, zero, corner],
                ]);
                assert!(gate.max_abs_diff(&want) < 1e-14, "xi={xi} delta={delta}");
            }
        }
    }

    #[test]
    fn sqrt_aswap_gate_matches_displayed_form() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for &xi in &[0.0, 0.8] {
            for delta in [0u8, 1] {
                let gate = conservative_gate(&GateSpec::sqrt_aswap(xi, delta).unwrap()).unwrap();
                let zero = c(0.0, 0.0);
                let corner = c(1.0, 0.0)
                    + (C64::from_polar(1.0, std::f64::consts::FRAC_PI_4) - c(1.0, 0.0))
                        * c(delta as f64, 0.0);
                let want = Mat4::new([
                    [c(1.0, 0.0), zero, zero, zero],
                    [zero, c(s, 0.0), -C64::from_polar(s, -xi), zero],
                    [zero, C64::from_polar(s, xi), c(s, 0.0), zero],
                    [zero, zero, zero, corner],
                ]);
                assert!(gate.max_abs_diff(&want) < 1e-14);
            }
        }
    }

    #[test]
    fn gate_family_identities_hold() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..30 {
            let b = C64::from_polar(
                rng.in_range(0.05, 0.45),
                rng.in_range(0.0, std::f64::consts::TAU),
            );
            let spec = GateSpec::new(
                c(0.0, rng.in_range(-3.0, 3.0)),
                0.0,
                (rng.next_u64() % 2) as u8,
                b,
                GateFamily::Idempotent,
                Branch::Plus,
            )
            .unwrap();
            let h = gate_hamiltonian(&spec).unwrap();
            assert!(h.mul(&h).max_abs_diff(&h) < 1e-12);

            let b3 = C64::from_polar(
                rng.in_range(0.1, 0.9),
                rng.in_range(0.0, std::f64::consts::TAU),
            );
            let spec3 = GateSpec::new(
                c(0.0, rng.in_range(-3.0, 3.0)),
                0.0,
                (rng.next_u64() % 2) as u8,
                b3,
                GateFamily::TriIdempotent,
                Branch::Plus,
            )
            .unwrap();
            let h3 = gate_hamiltonian(&spec3).unwrap();
            let h3sq = h3.mul(&h3);
            assert!(h3sq.mul(&h3).max_abs_diff(&h3) < 1e-12);
            // generically not idempotent
            assert!(h3sq.max_abs_diff(&h3) > 0.1);
        }
    }

    #[test]
    fn gate_inverse_pairs_multiply_to_identity() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..20 {
            let angle = rng.in_range(-3.0, 3.0);
            let b = C64::from_polar(
                rng.in_range(0.05, 0.45),
                rng.in_range(0.0, std::f64::consts::TAU),
            );
            for family in [GateFamily::Idempotent, GateFamily::TriIdempotent] {
                let bb = if family == GateFamily::TriIdempotent {
                    b * c(1.8, 0.0)
                } else {
                    b
                };
                let fwd = conservative_gate(
                    &GateSpec::new(c(0.0, angle), 0.0, 1, bb, family, Branch::Plus).unwrap(),
                )
                .unwrap();
                let bwd = conservative_gate(
                    &GateSpec::new(c(0.0, -angle), 0.0, 1, bb, family, Branch::Plus).unwrap(),
                )
                .unwrap();
                assert!(fwd.mul(&bwd).max_abs_diff(&Mat4::identity()) < 1e-12);
                assert!(fwd.unitarity_error() < 1e-12);
            }
        }
    }

    #[test]
    fn gate_conserves_number_blocks() {
        let gate = conservative_gate(&GateSpec::sqrt_aswap(0.3, 1).unwrap()).unwrap();
        // entries outside the conserving pattern vanish
        for (i, row) in gate.0.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                let allowed = matches!((i, j), (0, 0) | (1, 1) | (1, 2) | (2, 1) | (2, 2) | (3, 3));
                if !allowed {
                    assert!(entry.norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn gate_spec_rejects_out_of_range_parameters() {
        let b_too_big = C64::new(0.9, 0.0);
        assert!(GateSpec::new(
            c(0.0, 1.0),
            0.0,
            0,
            b_too_big,
            GateFamily::Idempotent,
            Branch::Plus
        )
        .is_err());
        assert!(GateSpec::new(
            c(0.0, 1.0),
            0.0,
            2,
            c(0.1, 0.0),
            GateFamily::Idempotent,
            Branch::Plus
        )
        .is_err());
        assert!(QubitState::new(4.0, 0.0).is_err());
    }

    #[test]
    fn chiral_gate_massless_is_identity() {
        let params = CollideParams::free(4, 1.0, 1.0).unwrap();
        let gate = chiral_collide_gate(&params, 0).unwrap();
        assert!(gate.max_abs_diff(&Mat4::identity()) < 1e-15);
    }

    #[test]
    fn chiral_gate_central_block_is_collide_unitary() {
        let mut rng = SplitMix64::new(2026);
        for _ in 0..25 {
            let m = rng.in_range(0.05, 0.95);
            let g = rng.in_range(1.0, 3.0);
            // keep gamma m ell below pi/2 so the mixing stays in [0, 1]
            let ell = rng.in_range(0.1, 1.5) / g;
            let params = CollideParams::uniform(m, g, ell, 1.0f64.min(0.999 / m), 4).unwrap();
            let gate = chiral_collide_gate(&params, 0).unwrap();
            let u = build_collide(&params, 0).unwrap();
            assert!((gate.0[1][1] - u.0[0][0]).norm() < 1e-13);
            assert!((gate.0[1][2] - u.0[0][1]).norm() < 1e-13);
            assert!((gate.0[2][1] - u.0[1][0]).norm() < 1e-13);
            assert!((gate.0[2][2] - u.0[1][1]).norm() < 1e-13);
            assert!(gate.unitarity_error() < 1e-12);
            // corner carries e^{-i arcsin(eps)}
            let eps = params.eps(0);
            assert!((gate.0[3][3] - C64::from_polar(1.0, -eps.asin())).norm() < 1e-13);
        }
    }

    #[test]
    fn chiral_gate_ladder_construction_agrees() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..25 {
            let m = rng.in_range(0.05, 0.95);
            let g = rng.in_range(1.0, 2.5);
            let ell = rng.in_range(0.1, 1.5) / g;
            let params = CollideParams::uniform(m, g, ell, 1.0f64.min(0.999 / m), 4).unwrap();
            let direct = chiral_collide_gate(&params, 0).unwrap();
            let ladder = chiral_collide_gate_from_ladder(&params, 0).unwrap();
            assert!(direct.max_abs_diff(&ladder) < 1e-13);
        }
    }

    #[test]
    fn chiral_generator_is_tri_idempotent() {
        let params = CollideParams::uniform(0.4, 1.3, 0.9, 1.0, 4).unwrap();
        let n = chiral_collide_generator(&params, 0).unwrap();
        let n2 = n.mul(&n);
        let n3 = n2.mul(&n);
        assert!(n3.max_abs_diff(&n) < 1e-14);
        assert!(n2.max_abs_diff(&n) > 0.5);
        assert!(n2.max_abs_diff(&Mat4::identity()) > 0.5);
    }
}
