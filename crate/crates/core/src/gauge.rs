//! Magnetic-field gradients as programmable gauge potentials.
//!
//! The Zeeman coupling of a linear gradient, x · ∇(B·J), becomes −p · ∇(B·J)
//! after the canonical exchange x/x₀ → −p/p₀, p/p₀ → x/x₀. The gradient matrix
//! G[i][j] = ∂_i B_j therefore fixes a position-independent potential
//! A_i ∝ Σ_j G[i][j] J_j whose components are non-commuting spin operators.
//!
//! Everything here is unit conversion; no Hilbert space is involved.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Result, SimError, C64};

pub type Mat3 = [[f64; 3]; 3];
pub type Vec3 = [f64; 3];

/// 1 T/m expressed in Gauss/mm.
pub const GAUSS_PER_MM_PER_TESLA_PER_M: f64 = 10.0;

/// Atomic mass of ⁸⁷Rb in kg.
pub const RB87_MASS: f64 = 1.443_160_648e-25;

const AXES: [char; 3] = ['x', 'y', 'z'];

/// CODATA 2018 defaults; replaceable for unit-system experiments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    /// J·s
    pub hbar: f64,
    /// Bohr magneton, J/T
    pub mu_b: f64,
    /// Elementary charge, C
    pub e: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            hbar: 1.054_571_817e-34,
            mu_b: 9.274_010_078_3e-24,
            e: 1.602_176_634e-19,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// kg
    pub mass: f64,
    /// Isotropic trap frequency, rad/s
    pub omega: f64,
    pub g_factor: f64,
    #[serde(default)]
    pub constants: PhysicalConstants,
}

impl PhysicalParams {
    pub fn new(mass: f64, omega: f64, g_factor: f64) -> Result<Self> {
        Self::with_constants(mass, omega, g_factor, PhysicalConstants::default())
    }

    pub fn with_constants(
        mass: f64,
        omega: f64,
        g_factor: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        let p = PhysicalParams {
            mass,
            omega,
            g_factor,
            constants,
        };
        p.validate()?;
        Ok(p)
    }

    /// ⁸⁷Rb with g_J = 2 in an isotropic trap of angular frequency `omega`.
    pub fn rubidium87(omega: f64) -> Self {
        PhysicalParams {
            mass: RB87_MASS,
            omega,
            g_factor: 2.0,
            constants: PhysicalConstants::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SimError::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive(self.mass, "mass")?;
        positive(self.omega, "omega")?;
        positive(self.constants.hbar, "hbar")?;
        positive(self.constants.mu_b, "mu_b")?;
        positive(self.constants.e, "e")?;
        if !self.g_factor.is_finite() {
            return Err(SimError::Config("g_factor must be finite".into()));
        }
        Ok(())
    }

    /// Oscillator length √(ħ/(mω)), m.
    pub fn x0(&self) -> f64 {
        (self.constants.hbar / (self.mass * self.omega)).sqrt()
    }

    /// Oscillator momentum √(ħmω), kg·m/s.
    pub fn p0(&self) -> f64 {
        (self.constants.hbar * self.mass * self.omega).sqrt()
    }
}

/// Linear field about the trap centre: B(x) = B(0) + Σ_i x_i ∂_i B.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldConfiguration {
    /// gradient[i][j] = ∂_i B_j at the origin, T/m.
    pub gradient: Mat3,
    /// B(0), T.
    #[serde(default)]
    pub uniform: Vec3,
}

impl FieldConfiguration {
    pub fn from_gradient(gradient: Mat3) -> Self {
        FieldConfiguration {
            gradient,
            uniform: [0.0; 3],
        }
    }

    pub fn with_uniform(mut self, uniform: Vec3) -> Self {
        self.uniform = uniform;
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        FieldConfiguration {
            gradient: self.gradient.map(|row| row.map(|g| g * s)),
            uniform: self.uniform,
        }
    }

    fn max_abs(&self) -> f64 {
        self.gradient
            .iter()
            .flatten()
            .fold(0.0, |acc: f64, g| acc.max(g.abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldValidation {
    /// trace(G) = div B, T/m.
    pub divergence: f64,
    /// ∇ × B, T/m.
    pub curl: Vec3,
    pub admissible: bool,
}

/// Maxwell check of the gradient; a report, never an error.
pub fn validate_field(cfg: &FieldConfiguration) -> FieldValidation {
    let g = &cfg.gradient;
    let divergence = g[0][0] + g[1][1] + g[2][2];
    // curl_k = ε_kij ∂_i B_j
    let curl = [g[1][2] - g[2][1], g[2][0] - g[0][2], g[0][1] - g[1][0]];
    let scale = cfg.max_abs();
    let admissible = scale == 0.0 || divergence.abs() <= 1e-12 * scale;
    FieldValidation {
        divergence,
        curl,
        admissible,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// A_y ∝ J_z, A_z ∝ −J_y: coupling ∝ p_y σ_z − p_z σ_y.
    Rashba,
    /// A_y ∝ J_y, A_z ∝ −J_z.
    Dresselhaus,
    /// A_y ∝ J_y, A_z ∝ J_z; div B = 0 forces an extra ∂_x B_x = −2B′.
    Dirac,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Rashba, Preset::Dresselhaus, Preset::Dirac];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Rashba => "rashba",
            Preset::Dresselhaus => "dresselhaus",
            Preset::Dirac => "dirac",
        }
    }

    pub fn field(self, b_prime: f64) -> Result<FieldConfiguration> {
        if !b_prime.is_finite() {
            return Err(SimError::Config(format!("gradient B' must be finite, got {b_prime}")));
        }
        let mut g = [[0.0; 3]; 3];
        match self {
            Preset::Rashba => {
                g[1][2] = b_prime;
                g[2][1] = -b_prime;
            }
            Preset::Dresselhaus => {
                g[1][1] = b_prime;
                g[2][2] = -b_prime;
            }
            Preset::Dirac => {
                g[1][1] = b_prime;
                g[2][2] = b_prime;
                g[0][0] = -2.0 * b_prime;
            }
        }
        Ok(FieldConfiguration::from_gradient(g))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rashba" => Ok(Preset::Rashba),
            "dresselhaus" => Ok(Preset::Dresselhaus),
            "dirac" | "graphene" => Ok(Preset::Dirac),
            other => Err(SimError::Config(format!(
                "unknown preset '{other}' (expected rashba, dresselhaus or dirac)"
            ))),
        }
    }
}

pub fn preset(name: &str, b_prime: f64) -> Result<FieldConfiguration> {
    name.parse::<Preset>()?.field(b_prime)
}

/// A_i = Σ_j coeff[i][j] J_j.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaugePotential {
    /// SI coefficients μ_B g_J G / (eħω).
    pub coeff: Mat3,
    /// Coefficient of σ_j in e·A_i/p₀ (with J = ħσ/2); dimensionless.
    pub momentum_scale: Mat3,
}

pub fn gauge_potential(cfg: &FieldConfiguration, params: &PhysicalParams) -> GaugePotential {
    let c = &params.constants;
    let si = c.mu_b * params.g_factor / (c.e * c.hbar * params.omega);
    let mom = si * c.e * c.hbar / (2.0 * params.p0());
    GaugePotential {
        coeff: scale_mat(&cfg.gradient, si),
        momentum_scale: scale_mat(&cfg.gradient, mom),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnisotropyTensor {
    /// (I⁻¹)_ij = μ_B² g_J² /(m ħ² ω²) ∇B_i · ∇B_j, in 1/(kg·m²).
    pub inv_inertia: Mat3,
    /// φ = −½ Jᵗ I⁻¹ J for J = ħσ/2, in J, as a 2×2 spin matrix.
    pub phi_matrix: [[C64; 2]; 2],
}

pub fn anisotropy(cfg: &FieldConfiguration, params: &PhysicalParams) -> AnisotropyTensor {
    let c = &params.constants;
    let kappa = (c.mu_b * params.g_factor).powi(2)
        / (params.mass * (c.hbar * params.omega).powi(2));
    // ∇B_i is the column i of G (∂_k B_i for k = x, y, z).
    let g = &cfg.gradient;
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = kappa * (0..3).map(|k| g[k][i] * g[k][j]).sum::<f64>();
        }
    }

    let sigma = pauli2();
    let quarter_hbar2 = 0.25 * c.hbar * c.hbar;
    let mut phi = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..3 {
        for j in 0..3 {
            if inv[i][j] == 0.0 {
                continue;
            }
            let prod = mat2_mul(&sigma[i], &sigma[j]);
            for r in 0..2 {
                for s in 0..2 {
                    phi[r][s] += prod[r][s] * (-0.5 * inv[i][j] * quarter_hbar2);
                }
            }
        }
    }
    // Hermitian part.
    let phi = [
        [C64::new(phi[0][0].re, 0.0), (phi[0][1] + phi[1][0].conj()) * 0.5],
        [(phi[1][0] + phi[0][1].conj()) * 0.5, C64::new(phi[1][1].re, 0.0)],
    ];
    AnisotropyTensor {
        inv_inertia: inv,
        phi_matrix: phi,
    }
}

/// Dimensionless couplings of H/ħω.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeCoupling {
    /// b[i][j] = g_J μ_B G[i][j] / (2√(ħmω³)); couples p̃_i to σ_j.
    pub b_matrix: Mat3,
    /// b₀ = μ_B g_J B(0) / (2ħω).
    pub b0: Vec3,
}

impl GaugeCoupling {
    /// First nonzero entry of the y and z rows in row-major order, i.e. the
    /// single gradient strength b₁ of the presets. Zero if there is none.
    pub fn b1(&self) -> f64 {
        self.b_matrix[1..]
            .iter()
            .flatten()
            .copied()
            .find(|v| *v != 0.0)
            .unwrap_or(0.0)
    }

    /// Whether any p̃_x coupling is present (not representable by the
    /// two-oscillator engine).
    pub fn has_x_row(&self) -> bool {
        self.b_matrix[0].iter().any(|v| *v != 0.0)
    }

    /// Human-readable list of the p̃_x σ_j terms the engine drops.
    pub fn x_row_terms(&self) -> Vec<String> {
        self.b_matrix[0]
            .iter()
            .zip(AXES)
            .filter(|(v, _)| **v != 0.0)
            .map(|(v, ax)| format!("{:+} p_x sigma_{ax}", -v))
            .collect()
    }
}

pub fn couplings(cfg: &FieldConfiguration, params: &PhysicalParams) -> GaugeCoupling {
    let c = &params.constants;
    let grad = c.mu_b * params.g_factor
        / (2.0 * (c.hbar * params.mass * params.omega.powi(3)).sqrt());
    let zeeman = c.mu_b * params.g_factor / (2.0 * c.hbar * params.omega);
    GaugeCoupling {
        b_matrix: scale_mat(&cfg.gradient, grad),
        b0: cfg.uniform.map(|b| b * zeeman),
    }
}

/// Gradient at which the gauge term is comparable to the oscillator momentum
/// scale: √(ħm) ω^{3/2} / μ_B, T/m. No g-factor enters.
pub fn required_gradient(params: &PhysicalParams) -> f64 {
    let c = &params.constants;
    (c.hbar * params.mass).sqrt() * params.omega.powf(1.5) / c.mu_b
}

/// Gradient giving b₁ = 1 exactly: 2√(ħmω³) / (g_J μ_B), T/m.
pub fn unit_coupling_gradient(params: &PhysicalParams) -> f64 {
    let c = &params.constants;
    2.0 * (c.hbar * params.mass * params.omega.powi(3)).sqrt() / (params.g_factor * c.mu_b)
}

fn scale_mat(m: &Mat3, s: f64) -> Mat3 {
    m.map(|row| row.map(|v| v * s))
}

fn pauli2() -> [[[C64; 2]; 2]; 3] {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [[[o, one], [one, o]], [[o, -i], [i, o]], [[one, o], [o, -one]]]
}

fn mat2_mul(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for s in 0..2 {
            out[r][s] = a[r][0] * b[0][s] + a[r][1] * b[1][s];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn rb_khz() -> PhysicalParams {
        PhysicalParams::rubidium87(2.0 * PI * 1e3)
    }

    fn nonzero(g: &Mat3) -> usize {
        g.iter().flatten().filter(|v| **v != 0.0).count()
    }

    #[test]
    fn preset_shapes() {
        let bp = 0.37;
        let r = preset("rashba", bp).unwrap();
        assert_eq!(nonzero(&r.gradient), 2);
        assert_eq!(r.gradient[1][2], bp);
        assert_eq!(r.gradient[2][1], -bp);

        let d = preset("dresselhaus", bp).unwrap();
        assert_eq!([d.gradient[0][0], d.gradient[1][1], d.gradient[2][2]], [0.0, bp, -bp]);
        assert_eq!(nonzero(&d.gradient), 2);

        let g = preset("dirac", bp).unwrap();
        assert_eq!(g.gradient[0][0], -2.0 * bp);
        assert_eq!(nonzero(&g.gradient), 3);

        for p in Preset::ALL {
            let v = validate_field(&p.field(bp).unwrap());
            assert_eq!(v.divergence, 0.0);
            assert!(v.admissible);
        }
        assert!(matches!(preset("weyl", 1.0), Err(SimError::Config(_))));
        assert!(preset("rashba", f64::NAN).is_err());
    }

    #[test]
    fn rashba_curl() {
        let bp = 1.5;
        let v = validate_field(&preset("rashba", bp).unwrap());
        assert_eq!(v.curl, [2.0 * bp, 0.0, 0.0]);
        assert_eq!(validate_field(&preset("dresselhaus", bp).unwrap()).curl, [0.0; 3]);
    }

    #[test]
    fn zero_and_monopole_fields() {
        let zero = validate_field(&FieldConfiguration::default());
        assert_eq!((zero.divergence, zero.curl, zero.admissible), (0.0, [0.0; 3], true));
        let bp = 0.2;
        let mono = FieldConfiguration::from_gradient([[bp, 0.0, 0.0], [0.0, bp, 0.0], [0.0, 0.0, bp]]);
        let v = validate_field(&mono);
        assert!((v.divergence - 3.0 * bp).abs() < 1e-15);
        assert!(!v.admissible);
    }

    #[test]
    fn dirac_keeps_x_row() {
        let c = couplings(&preset("dirac", 0.1).unwrap(), &rb_khz());
        assert!(c.has_x_row());
        assert_eq!(c.x_row_terms().len(), 1);
        assert!(c.x_row_terms()[0].contains("sigma_x"));
        assert_eq!(c.b_matrix[0][0], -2.0 * c.b_matrix[1][1]);
        assert!(!couplings(&preset("rashba", 0.1).unwrap(), &rb_khz()).has_x_row());
    }

    #[test]
    fn rashba_potential_components() {
        let gp = gauge_potential(&preset("rashba", 0.3).unwrap(), &rb_khz());
        assert_eq!(gp.coeff[0], [0.0; 3]);
        assert!(gp.coeff[1][2] > 0.0 && gp.coeff[1][0] == 0.0 && gp.coeff[1][1] == 0.0);
        assert!(gp.coeff[2][1] < 0.0 && gp.coeff[2][0] == 0.0 && gp.coeff[2][2] == 0.0);
        let zero = gauge_potential(&FieldConfiguration::default(), &rb_khz());
        assert_eq!(zero.coeff, [[0.0; 3]; 3]);
    }

    #[test]
    fn momentum_scale_potential_equals_couplings() {
        let cfg = preset("dresselhaus", 0.13).unwrap();
        let gp = gauge_potential(&cfg, &rb_khz());
        let c = couplings(&cfg, &rb_khz());
        for i in 0..3 {
            for j in 0..3 {
                assert!((gp.momentum_scale[i][j] - c.b_matrix[i][j]).abs() <= 1e-14 * c.b_matrix[1][1].abs());
            }
        }
    }

    #[test]
    fn rashba_and_dresselhaus_anisotropy() {
        let params = rb_khz();
        let bp = 0.21;
        let kappa = (params.constants.mu_b * 2.0).powi(2)
            / (params.mass * (params.constants.hbar * params.omega).powi(2));
        let r = anisotropy(&preset("rashba", bp).unwrap(), &params);
        let d = anisotropy(&preset("dresselhaus", bp).unwrap(), &params);
        let want = [[0.0, 0.0, 0.0], [0.0, kappa * bp * bp, 0.0], [0.0, 0.0, kappa * bp * bp]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((r.inv_inertia[i][j] - want[i][j]).abs() <= 1e-12 * want[1][1]);
                assert_eq!(r.inv_inertia[i][j], d.inv_inertia[i][j]);
            }
        }
        assert_eq!(r.phi_matrix, d.phi_matrix);
        // proportional to the identity
        assert_eq!(r.phi_matrix[0][1], C64::new(0.0, 0.0));
        assert_eq!(r.phi_matrix[0][0], r.phi_matrix[1][1]);
        assert!(r.phi_matrix[0][0].re < 0.0);
        let z = anisotropy(&FieldConfiguration::default(), &params);
        assert_eq!(z.inv_inertia, [[0.0; 3]; 3]);
        assert_eq!(z.phi_matrix, [[C64::new(0.0, 0.0); 2]; 2]);
    }

    #[test]
    fn rubidium_gradient_scale() {
        let params = rb_khz();
        let bp = required_gradient(&params);
        assert!((bp * GAUSS_PER_MM_PER_TESLA_PER_M - 2.1).abs() <= 0.05 * 2.1, "{bp}");
        let b1 = couplings(&preset("rashba", 0.21).unwrap(), &params).b1();
        assert!((b1 - 1.0).abs() <= 0.05, "{b1}");
        let unit = unit_coupling_gradient(&params);
        let b1_unit = couplings(&preset("rashba", unit).unwrap(), &params).b1();
        assert!((b1_unit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn required_gradient_scaling() {
        let p = rb_khz();
        let mut p4 = p;
        p4.omega *= 4.0;
        assert!((required_gradient(&p4) / required_gradient(&p) - 8.0).abs() < 1e-12);
        let mut heavy = p;
        heavy.mass *= 4.0;
        assert!((required_gradient(&heavy) / required_gradient(&p) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coupling_scaling_and_zeeman() {
        let p = rb_khz();
        let cfg = preset("rashba", 0.1).unwrap();
        let c1 = couplings(&cfg, &p);
        assert_eq!(c1.b0, [0.0; 3]);
        let c2 = couplings(&cfg.scaled(2.0), &p);
        assert!((c2.b1() - 2.0 * c1.b1()).abs() < 1e-14);
        let mut p4 = p;
        p4.omega *= 4.0;
        assert!((couplings(&cfg, &p4).b1() / c1.b1() - 0.125).abs() < 1e-12);
        let direct = p.g_factor * p.constants.mu_b * 0.1
            / (2.0 * (p.constants.hbar * p.mass * p.omega.powi(3)).sqrt());
        assert!((c1.b_matrix[1][2] - direct).abs() < 1e-14 * direct);
        assert_eq!(c1.b_matrix[2][1], -c1.b_matrix[1][2]);

        let zee = couplings(&cfg.with_uniform([0.0, 0.0, 1e-7]), &p);
        let want = p.constants.mu_b * 2.0 * 1e-7 / (2.0 * p.constants.hbar * p.omega);
        assert!((zee.b0[2] - want).abs() < 1e-14 * want);
    }

    #[test]
    fn params_validation() {
        assert!(PhysicalParams::new(-1.0, 1.0, 2.0).is_err());
        assert!(PhysicalParams::new(1.0, 0.0, 2.0).is_err());
        let p = PhysicalParams::new(RB87_MASS, 1e3, 2.0).unwrap();
        assert!((p.x0() * p.p0() - p.constants.hbar).abs() < 1e-12 * p.constants.hbar);
    }

    fn mat3() -> impl Strategy<Value = Mat3> {
        proptest::array::uniform3(proptest::array::uniform3(-1.0f64..1.0))
    }

    proptest! {
        #[test]
        fn homogeneity_in_gradient(g in mat3(), s in -3.0f64..3.0) {
            let p = rb_khz();
            let cfg = FieldConfiguration::from_gradient(g);
            let scaled = cfg.scaled(s);
            let (a1, a2) = (gauge_potential(&cfg, &p), gauge_potential(&scaled, &p));
            let (i1, i2) = (anisotropy(&cfg, &p), anisotropy(&scaled, &p));
            let (c1, c2) = (couplings(&cfg, &p), couplings(&scaled, &p));
            let close = |x: f64, y: f64, mag: f64| (x - y).abs() <= 1e-12 * mag.max(f64::MIN_POSITIVE);
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!(close(a2.coeff[i][j], s * a1.coeff[i][j], a1.coeff[i][j].abs() * 3.0 + 1e-300));
                    prop_assert!(close(c2.b_matrix[i][j], s * c1.b_matrix[i][j], c1.b_matrix[i][j].abs() * 3.0 + 1e-300));
                    let scale = i1.inv_inertia.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())) * 9.0;
                    prop_assert!(close(i2.inv_inertia[i][j], s * s * i1.inv_inertia[i][j], scale + 1e-300));
                }
            }
        }

        #[test]
        fn inverse_inertia_is_symmetric_psd(g in mat3(), v in proptest::array::uniform3(-1.0f64..1.0)) {
            let t = anisotropy(&FieldConfiguration::from_gradient(g), &rb_khz()).inv_inertia;
            let scale = t.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
            for (i, row) in t.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    prop_assert_eq!(*v, t[j][i]);
                }
            }
            let q: f64 = (0..3).map(|i| (0..3).map(|j| v[i] * t[i][j] * v[j]).sum::<f64>()).sum();
            prop_assert!(q >= -1e-12 * scale);
        }
    }
}
