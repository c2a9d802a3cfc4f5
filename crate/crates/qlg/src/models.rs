//! Closed-form reference solutions for the bound-state runs: the MIT-bag
//! square well eigenstate with its transcendental wave number, and the
//! Hermite-function oscillator states with the mass and Lorentz-factor
//! profiles that drive the lattice evolution.

use crate::error::{Error, Result};
use crate::numerics::{Spinor2, SpinorField, C64};

/// Square well of width `well_length` where the particle has mass
/// `inner_mass`, embedded in barriers of mass `barrier_mass`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareWellSpec {
    pub well_length: f64,
    pub inner_mass: f64,
    pub barrier_mass: f64,
    pub grid_points: usize,
}

impl SquareWellSpec {
    pub fn new(
        well_length: f64,
        inner_mass: f64,
        barrier_mass: f64,
        grid_points: usize,
    ) -> Result<Self> {
        if !(well_length > 0.0 && well_length.is_finite()) {
            return Err(Error::Domain(format!(
                "well length must be > 0: {well_length}"
            )));
        }
        if !(inner_mass > 0.0 && inner_mass.is_finite()) {
            return Err(Error::Domain(format!(
                "inner mass must be > 0: {inner_mass}"
            )));
        }
        if barrier_mass <= inner_mass {
            return Err(Error::Domain(format!(
                "barrier mass {barrier_mass} must exceed inner mass {inner_mass}"
            )));
        }
        if grid_points < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 grid points: {grid_points}"
            )));
        }
        Ok(Self {
            well_length,
            inner_mass,
            barrier_mass,
            grid_points,
        })
    }

    /// Spinor component ratio P = k/(2m), the wall-matching ratio with the
    /// energy taken at its rest value. This is the form whose first
    /// crossing reproduces the published wave numbers; see
    /// [`SquareWellSpec::p_ratio_relativistic`] for the dispersive form.
    pub fn p_ratio(&self, k: f64) -> f64 {
        k / (2.0 * self.inner_mass)
    }

    /// Component ratio with the full energy, P = k/(sqrt(k^2 + m^2) + m).
    /// Coincides with [`SquareWellSpec::p_ratio`] when k << m.
    pub fn p_ratio_relativistic(&self, k: f64) -> f64 {
        let m = self.inner_mass;
        let e = (k * k + m * m).sqrt();
        k / (e + m)
    }

    /// Bound-state energy for a solved wave number.
    pub fn energy(&self, k: f64) -> f64 {
        (k * k + self.inner_mass * self.inner_mass).sqrt()
    }
}

/// Residual of the wall-matching condition cot(k L / 2) - P(k); the solved
/// wave number drives this below 1e-10.
pub fn well_residual(spec: &SquareWellSpec, k: f64) -> f64 {
    let half = 0.5 * k * spec.well_length;
    1.0 / half.tan() - spec.p_ratio(k)
}

fn well_residual_relativistic(spec: &SquareWellSpec, k: f64) -> f64 {
    let half = 0.5 * k * spec.well_length;
    1.0 / half.tan() - spec.p_ratio_relativistic(k)
}

/// Smallest positive wave number satisfying cot(k L / 2) = P(k) with
/// P = k/(2m).
///
/// The left side falls from +infinity at k = 0+ and the right side is small
/// and positive, so the first crossing sits below pi/L. A coarse scan at
/// step pi/(50 L) brackets it away from the cotangent poles, then bisection
/// tightens the bracket to 1e-12.
pub fn solve_well_wavenumber(spec: &SquareWellSpec) -> Result<f64> {
    solve_first_crossing(spec, well_residual)
}

/// Same bracketing solve but against the fully dispersive ratio
/// P = k/(sqrt(k^2 + m^2) + m). Differs from [`solve_well_wavenumber`]
/// only when the solution has k comparable to m.
pub fn solve_well_wavenumber_relativistic(spec: &SquareWellSpec) -> Result<f64> {
    solve_first_crossing(spec, well_residual_relativistic)
}

fn solve_first_crossing(
    spec: &SquareWellSpec,
    residual: fn(&SquareWellSpec, f64) -> f64,
) -> Result<f64> {
    let l = spec.well_length;
    let step = std::f64::consts::PI / (50.0 * l);
    let upper = 2.0 * std::f64::consts::PI / l;
    let mut k_prev = step;
    let mut f_prev = residual(spec, k_prev);
    let mut k = k_prev + step;
    while k <= upper + 0.5 * step {
        // skip across the cotangent pole at k L / 2 = pi
        let half = 0.5 * k * l;
        if half.sin().abs() > 1e-12 {
            let f = residual(spec, k);
            if f_prev.is_finite() && f.is_finite() && f_prev.signum() != f.signum() {
                let root = bisect(|x| residual(spec, x), k_prev, k, 1e-12, 200);
                if residual(spec, root).abs() < 1e-10 {
                    return Ok(root);
                }
            }
            k_prev = k;
            f_prev = f;
        }
        k += step;
    }
    Err(Error::NoRoot { lo: 0.0, hi: upper })
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> f64 {
    let mut flo = f(lo);
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo < tol {
            return mid;
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if flo.signum() == fmid.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The interior (region II) standing-wave mode: coefficients of the
/// right- and left-moving plane waves plus the component ratio P.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellMode {
    pub k: f64,
    pub p: f64,
    /// C/B, the unit-modulus reflection coefficient (iP - 1)/(iP + 1).
    pub c_over_b: C64,
}

impl WellMode {
    pub fn new(spec: &SquareWellSpec, k: f64) -> Self {
        let p = spec.p_ratio(k);
        let ip = C64::new(0.0, p);
        let one = C64::new(1.0, 0.0);
        Self {
            k,
            p,
            c_over_b: (ip - one) / (ip + one),
        }
    }

    /// Evaluate the unnormalized 2-spinor (psi_R, psi_L) at position z in
    /// [0, L], with B = 1:
    /// psi_R = e^{ikz} + C e^{-ikz}, psi_L = (e^{ikz} - C e^{-ikz}) P.
    pub fn eval(&self, z: f64) -> Spinor2 {
        let plus = C64::from_polar(1.0, self.k * z);
        let minus = self.c_over_b * C64::from_polar(1.0, -self.k * z);
        Spinor2::new(plus + minus, (plus - minus).scale(self.p))
    }
}

/// Region II profile sampled on `grid_points` sites spanning [0, L] with
/// both walls on the grid, normalized to unit L2 norm.
pub fn well_eigenstate(spec: &SquareWellSpec, k: f64) -> Result<SpinorField> {
    let mode = WellMode::new(spec, k);
    let g = spec.grid_points;
    let dz = spec.well_length / (g - 1) as f64;
    let sites = (0..g).map(|j| mode.eval(j as f64 * dz)).collect();
    SpinorField::new(sites, dz, dz)?.normalized()
}

/// Harmonic-potential run parameters: a particle of `base_mass` in a
/// parabolic mass profile of stiffness `kappa`, prepared in Hermite level
/// `level` on a grid of `grid_points` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpec {
    pub base_mass: f64,
    pub stiffness: f64,
    pub grid_points: usize,
    pub level: usize,
}

impl HarmonicSpec {
    pub fn new(base_mass: f64, stiffness: f64, grid_points: usize, level: usize) -> Result<Self> {
        if !(base_mass > 0.0 && base_mass.is_finite()) {
            return Err(Error::Domain(format!("base mass must be > 0: {base_mass}")));
        }
        if !(stiffness > 0.0 && stiffness.is_finite()) {
            return Err(Error::Domain(format!("stiffness must be > 0: {stiffness}")));
        }
        if grid_points < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 grid points: {grid_points}"
            )));
        }
        if level > 10 {
            return Err(Error::Domain(format!(
                "Hermite levels above 10 are not supported: {level}"
            )));
        }
        Ok(Self {
            base_mass,
            stiffness,
            grid_points,
            level,
        })
    }

    /// Gaussian width parameter b = sqrt(m kappa / 4).
    pub fn b(&self) -> f64 {
        (self.base_mass * self.stiffness / 4.0).sqrt()
    }

    /// Hermite argument scale varsigma = (m kappa)^(1/4).
    pub fn varsigma(&self) -> f64 {
        (self.base_mass * self.stiffness).powf(0.25)
    }

    /// Position-dependent mass m(z) = m + kappa (z - L/2)^2 / 2.
    pub fn mass_at(&self, z: f64) -> f64 {
        let u = z - 0.5 * self.grid_points as f64;
        self.base_mass + 0.5 * self.stiffness * u * u
    }

    /// |k(z)| from the ground-state consistency condition, evaluated in
    /// complex arithmetic since the inner root is generally negative.
    pub fn wavenumber_at(&self, z: f64) -> f64 {
        let u = z - 0.5 * self.grid_points as f64;
        if u == 0.0 {
            return 0.0;
        }
        let b = self.b();
        let m = self.mass_at(z);
        let u2 = u * u;
        let inner = C64::new(4.0 * u2 * u2 - m * m * u2 / (b * b), 0.0).sqrt();
        let outer = (C64::new(-2.0 * u2, 0.0) + inner).sqrt();
        2.0 * b * outer.norm()
    }
}

/// Physicists' Hermite polynomial by the three-term recurrence
/// H_{n+1}(x) = 2 x H_n(x) - 2 n H_{n-1}(x).
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut h_prev = 1.0;
    if n == 0 {
        return h_prev;
    }
    let mut h = 2.0 * x;
    for j in 1..n {
        let h_next = 2.0 * x * h - 2.0 * j as f64 * h_prev;
        h_prev = h;
        h = h_next;
    }
    h
}

/// Normalized oscillator eigenfunction placed in the upper spinor component:
/// phi(z) = H_n(varsigma (z - L/2)) e^{-b (z - L/2)^2}, lower component zero.
pub fn hermite_state(spec: &HarmonicSpec) -> Result<SpinorField> {
    let g = spec.grid_points;
    let b = spec.b();
    let vs = spec.varsigma();
    let center = 0.5 * g as f64;
    let sites = (0..g)
        .map(|j| {
            let u = j as f64 - center;
            let phi = hermite(spec.level, vs * u) * (-b * u * u).exp();
            Spinor2::new(C64::new(phi, 0.0), C64::new(0.0, 0.0))
        })
        .collect();
    SpinorField::new(sites, 1.0, 1.0)?.normalized()
}

/// Site-sampled mass and Lorentz-factor profiles for the oscillator run:
/// m(z) = m + kappa (z - L/2)^2 / 2 and gamma(z) = sqrt(|k(z)|^2 + m(z)^2)/m(z).
pub fn harmonic_profiles(spec: &HarmonicSpec) -> (Vec<f64>, Vec<f64>) {
    let g = spec.grid_points;
    let mut mass = Vec::with_capacity(g);
    let mut gamma = Vec::with_capacity(g);
    for j in 0..g {
        let z = j as f64;
        let m = spec.mass_at(z);
        let k = spec.wavenumber_at(z);
        mass.push(m);
        gamma.push((k * k + m * m).sqrt() / m);
    }
    (mass, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::observables;

    #[test]
    fn well_wavenumber_published_crossing() {
        // L = 2, m = 1/2: first crossing at k = 0.860334.
        let spec = SquareWellSpec::new(2.0, 0.5, 5.0, 64).unwrap();
        let k = solve_well_wavenumber(&spec).unwrap();
        assert!((k - 0.860334).abs() < 5e-6, "k = {k}");
        assert!(well_residual(&spec, k).abs() < 1e-10);
    }

    #[test]
    fn well_wavenumber_dispersive_ratio_sits_higher() {
        // With the full energy in the denominator the ratio is smaller, so
        // the crossing moves up; the two solvers agree once k << m.
        let spec = SquareWellSpec::new(2.0, 0.5, 5.0, 64).unwrap();
        let k = solve_well_wavenumber_relativistic(&spec).unwrap();
        assert!(k > solve_well_wavenumber(&spec).unwrap());
        assert!(well_residual_relativistic(&spec, k).abs() < 1e-10);

        let heavy = SquareWellSpec::new(2.0, 2000.0, 20000.0, 64).unwrap();
        let ka = solve_well_wavenumber(&heavy).unwrap();
        let kb = solve_well_wavenumber_relativistic(&heavy).unwrap();
        assert!((ka - kb).abs() < 1e-9);
    }

    #[test]
    fn well_wavenumber_nonrelativistic_case() {
        // L = 2, m = 2000: k = 1.5704, just beneath pi/2.
        let spec = SquareWellSpec::new(2.0, 2000.0, 20000.0, 64).unwrap();
        let k = solve_well_wavenumber(&spec).unwrap();
        assert!((k - 1.5704).abs() < 5e-4, "k = {k}");
        assert!(k < std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn well_wavenumber_heavy_mass_limit() {
        // k -> pi/L from below as m grows.
        let target = std::f64::consts::PI / 2.0;
        let mut last_gap = f64::INFINITY;
        for &m in &[10.0, 100.0, 1000.0, 10000.0] {
            let spec = SquareWellSpec::new(2.0, m, 10.0 * m, 16).unwrap();
            let k = solve_well_wavenumber(&spec).unwrap();
            let gap = (target - k).abs();
            assert!(gap < last_gap, "gap should shrink with m");
            last_gap = gap;
        }
        assert!(last_gap < 1e-4);
    }

    #[test]
    fn well_eigenstate_boundary_identities() {
        let spec = SquareWellSpec::new(2.0, 0.5, 5.0, 257).unwrap();
        let k = solve_well_wavenumber(&spec).unwrap();
        let field = well_eigenstate(&spec, k).unwrap();
        let first = field.site(0);
        let last = field.site(field.len() - 1);
        // psi_L(0) = -i psi_R(0) and psi_L(L) = +i psi_R(L)
        let i = C64::new(0.0, 1.0);
        assert!((first.down + i * first.up).norm() < 1e-10);
        assert!((last.down - i * last.up).norm() < 1e-10);
    }

    #[test]
    fn well_eigenstate_flux_vanishes_at_walls() {
        let spec = SquareWellSpec::new(2.0, 0.5, 5.0, 257).unwrap();
        let k = solve_well_wavenumber(&spec).unwrap();
        let field = well_eigenstate(&spec, k).unwrap();
        let obs = observables(&field);
        assert!(obs.flux0[0].abs() < 1e-10);
        assert!(obs.flux0[field.len() - 1].abs() < 1e-10);
        // relativistic case: density does not vanish at the walls
        assert!(obs.density[0] > 1e-4);
    }

    #[test]
    fn well_reflection_coefficient_is_unit_modulus() {
        let spec = SquareWellSpec::new(2.0, 0.5, 5.0, 16).unwrap();
        for &k in &[0.1, 0.5, 0.860334, 1.2] {
            let mode = WellMode::new(&spec, k);
            assert!((mode.c_over_b.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn well_phase_relation_theta_equals_kl() {
        // At the solved wave number, C/B = e^{i k L}.
        let spec = SquareWellSpec::new(2.0, 0.5, 5.0, 16).unwrap();
        let k = solve_well_wavenumber(&spec).unwrap();
        let mode = WellMode::new(&spec, k);
        let want = C64::from_polar(1.0, k * spec.well_length);
        assert!((mode.c_over_b - want).norm() < 1e-9);
    }

    #[test]
    fn well_lower_component_vanishes_nonrelativistically() {
        // Fraction of the norm in the lower component falls monotonically
        // with mass.
        let mut last = f64::INFINITY;
        for &m in &[1.0, 10.0, 100.0, 1000.0] {
            let spec = SquareWellSpec::new(2.0, m, 10.0 * m, 129).unwrap();
            let k = solve_well_wavenumber(&spec).unwrap();
            let field = well_eigenstate(&spec, k).unwrap();
            let lower: f64 = field.sites().iter().map(|s| s.down.norm_sqr()).sum();
            assert!(lower < last, "lower fraction should shrink with m");
            last = lower;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn hermite_polynomial_values() {
        assert_eq!(hermite(0, 0.3), 1.0);
        assert_eq!(hermite(1, 0.3), 0.6);
        assert!((hermite(2, 0.3) - (4.0 * 0.09 - 2.0)).abs() < 1e-14);
        assert!((hermite(3, 0.5) - (8.0 * 0.125 - 12.0 * 0.5)).abs() < 1e-14);
    }

    #[test]
    fn hermite_state_ground_level_is_nodeless_gaussian() {
        let spec = HarmonicSpec::new(0.5, 0.01 / (256.0 * 256.0), 256, 0).unwrap();
        let field = hermite_state(&spec).unwrap();
        assert!(field.sites().iter().all(|s| s.up.re > 0.0));
        assert!(field.sites().iter().all(|s| s.down.norm_sqr() == 0.0));
    }

    #[test]
    fn hermite_state_first_level_has_center_node() {
        let g = 256;
        let spec = HarmonicSpec::new(0.5, 0.01 / (g as f64 * g as f64), g, 1).unwrap();
        let field = hermite_state(&spec).unwrap();
        // odd about the center: H_1 changes sign exactly once
        let signs: Vec<f64> = field.sites().iter().map(|s| s.up.re.signum()).collect();
        let flips = signs.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(flips, 1);
        assert!(field.site(g / 2).up.re.abs() < 1e-3);
    }

    #[test]
    fn hermite_state_parity_matches_level() {
        let g = 512;
        let spec_even = HarmonicSpec::new(0.5, 0.01 / (g as f64 * g as f64), g, 2).unwrap();
        let spec_odd = HarmonicSpec::new(0.5, 0.01 / (g as f64 * g as f64), g, 3).unwrap();
        let even = hermite_state(&spec_even).unwrap();
        let odd = hermite_state(&spec_odd).unwrap();
        for j in 1..g / 2 {
            let (a, b) = (even.site(g / 2 + j).up.re, even.site(g / 2 - j).up.re);
            assert!((a - b).abs() < 1e-12 * (a.abs() + b.abs() + 1e-30));
            let (a, b) = (odd.site(g / 2 + j).up.re, odd.site(g / 2 - j).up.re);
            assert!((a + b).abs() < 1e-12 * (a.abs() + b.abs() + 1e-30));
        }
    }

    #[test]
    fn hermite_state_level_five_has_five_interior_nodes() {
        let g = 1024;
        let spec = HarmonicSpec::new(0.5, 0.01 / (g as f64 * g as f64), g, 5).unwrap();
        let field = hermite_state(&spec).unwrap();
        let flips = field
            .sites()
            .windows(2)
            .filter(|w| w[0].up.re.signum() != w[1].up.re.signum() && w[0].up.re != 0.0)
            .count();
        assert_eq!(flips, 5);
    }

    #[test]
    fn hermite_states_are_grid_orthogonal() {
        // kappa chosen so the Gaussian support sits well inside the grid;
        // all pairwise overlaps are then far below 1e-6.
        let g = 1024;
        let kappa = 0.1 / (g as f64 * g as f64);
        let fields: Vec<_> = (0..=4)
            .map(|n| hermite_state(&HarmonicSpec::new(0.5, kappa, g, n).unwrap()).unwrap())
            .collect();
        for a in 0..=4usize {
            for b in 0..a {
                let overlap = fields[a].inner(&fields[b]).norm();
                assert!(overlap < 1e-6, "levels {a},{b}: overlap {overlap:e}");
            }
        }
    }

    #[test]
    fn hermite_overlap_at_wide_gaussian_is_edge_limited() {
        // At kappa = 0.01/L^2 the level-4 tail still touches the grid edge;
        // the worst pairwise overlap is set by that truncation, near 1e-5.
        let g = 1024;
        let kappa = 0.01 / (g as f64 * g as f64);
        let f2 = hermite_state(&HarmonicSpec::new(0.5, kappa, g, 2).unwrap()).unwrap();
        let f4 = hermite_state(&HarmonicSpec::new(0.5, kappa, g, 4).unwrap()).unwrap();
        let overlap = f4.inner(&f2).norm();
        assert!(overlap < 1e-4, "overlap {overlap:e}");
    }

    #[test]
    fn harmonic_profiles_center_and_edge() {
        let g = 1024;
        let kappa = 0.01 / (g as f64 * g as f64);
        let spec = HarmonicSpec::new(0.5, kappa, g, 0).unwrap();
        let (mass, gamma) = harmonic_profiles(&spec);
        // center: k = 0, gamma = 1
        assert!((gamma[g / 2] - 1.0).abs() < 1e-12);
        assert!((mass[g / 2] - 0.5).abs() < 1e-12);
        // edge mass: m + kappa (L/2)^2 / 2
        let edge = 0.5 + 0.5 * kappa * (g as f64 / 2.0).powi(2);
        assert!((mass[0] - edge).abs() < 1e-12);
        assert!(gamma.iter().all(|&x| x >= 1.0));
    }

    #[test]
    fn harmonic_wavenumber_profile_shape() {
        // zero at center, rising away from it over the inner region
        let g = 1024;
        let kappa = 0.01 / (g as f64 * g as f64);
        let spec = HarmonicSpec::new(0.5, kappa, g, 0).unwrap();
        assert_eq!(spec.wavenumber_at(g as f64 / 2.0), 0.0);
        let near = spec.wavenumber_at(g as f64 / 2.0 + 20.0);
        let far = spec.wavenumber_at(g as f64 / 2.0 + 200.0);
        assert!(near > 0.0);
        assert!(far > near);
    }

    #[test]
    fn spec_validation_errors() {
        assert!(SquareWellSpec::new(2.0, 0.5, 0.4, 16).is_err());
        assert!(SquareWellSpec::new(-1.0, 0.5, 5.0, 16).is_err());
        assert!(HarmonicSpec::new(0.5, 0.0, 16, 0).is_err());
        assert!(HarmonicSpec::new(0.5, 1.0, 16, 11).is_err());
    }
}
