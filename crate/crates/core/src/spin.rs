//! XY spin chain with z-axis Dzyaloshinskii-Moriya coupling and a uniform
//! field, its dissipative jump operators, initial states and bath spectrum.
//!
//! Basis convention: for an `n`-site chain the computational-basis index is an
//! `n`-bit integer, site 1 is the most significant bit, and a set bit means the
//! spin is excited (`sigma_z = +1`). `sigma_minus` clears the bit. With this
//! ordering the single-site matrices are the textbook Pauli matrices written in
//! the reversed basis `(|0>, |1>)`, so `sigma_z = diag(-1, +1)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, kron, ComplexMatrix, I, ONE, ZERO};
use crate::tolerance;

/// Dense representation limit (2^10 = 1024 dimensional operators).
pub const MAX_SITES: usize = 10;

/// Number of sites the pseudo-pure reference state is defined for.
pub const PSEUDO_PURE_SITES: usize = 4;

pub mod pauli {
    //! Single-site operators in the chain's basis convention.
    use super::*;

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_rows([[ZERO, I], [-I, ZERO]])
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[-1.0, 1.0])
    }

    /// `(sigma_x - i sigma_y) / 2`, maps `|1>` to `|0>`.
    pub fn sigma_minus() -> ComplexMatrix {
        ComplexMatrix::from_rows([[ZERO, ONE], [ZERO, ZERO]])
    }

    pub fn sigma_plus() -> ComplexMatrix {
        ComplexMatrix::from_rows([[ZERO, ZERO], [ONE, ZERO]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "open" => Ok(Boundary::Open),
            other => Err(Error::invalid(format!(
                "boundary must be 'periodic' or 'open', got '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Periodic => "periodic",
            Boundary::Open => "open",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub j_coupling: f64,
    pub dm_strength: f64,
    pub field_strength: f64,
    pub boundary: Boundary,
}

impl Default for ChainSpec {
    fn default() -> Self {
        Self {
            n_sites: 4,
            j_coupling: 1.0,
            dm_strength: 0.0,
            field_strength: 0.0,
            boundary: Boundary::Periodic,
        }
    }
}

impl ChainSpec {
    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// Hard errors for impossible values; returns advisory warnings for values
    /// outside the antiferromagnetic, `0 <= D_z <= 1` regime.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.n_sites < 2 {
            return Err(Error::invalid("n_sites must be >= 2"));
        }
        if self.n_sites > MAX_SITES {
            return Err(Error::invalid(format!(
                "n_sites must be <= {MAX_SITES} for dense operators"
            )));
        }
        for (name, v) in [
            ("j_coupling", self.j_coupling),
            ("d_z", self.dm_strength),
            ("b_z", self.field_strength),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        let mut warnings = Vec::new();
        if self.j_coupling <= 0.0 {
            warnings.push(format!(
                "j_coupling = {} is outside the antiferromagnetic regime J > 0",
                self.j_coupling
            ));
        }
        if !(0.0..=1.0).contains(&self.dm_strength) {
            warnings.push(format!(
                "d_z = {} is outside 0 <= D_z <= 1",
                self.dm_strength
            ));
        }
        Ok(warnings)
    }

    /// Nearest-neighbour bonds as 1-based site pairs. For two periodic sites
    /// this yields both (1,2) and (2,1).
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_sites;
        match self.boundary {
            Boundary::Periodic => (1..=n).map(|j| (j, j % n + 1)).collect(),
            Boundary::Open => (1..n).map(|j| (j, j + 1)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    /// Gamma, overall noise strength.
    pub coupling_strength: f64,
    /// gamma, inverse memory time.
    pub memory_rate: f64,
    /// T_b with k_B = 1.
    pub bath_temperature: f64,
}

impl BathSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.coupling_strength.is_finite() && self.coupling_strength >= 0.0) {
            return Err(Error::invalid("coupling_strength must be >= 0"));
        }
        if !(self.memory_rate.is_finite() && self.memory_rate > 0.0) {
            return Err(Error::invalid("memory_rate must be > 0"));
        }
        if !(self.bath_temperature.is_finite() && self.bath_temperature >= 0.0) {
            return Err(Error::invalid("bath_temperature must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    #[default]
    PseudoPure,
    HighTempLinear,
    Gibbs,
}

impl std::str::FromStr for InitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pseudo_pure" => Ok(InitMode::PseudoPure),
            "high_temp_linear" => Ok(InitMode::HighTempLinear),
            "gibbs" => Ok(InitMode::Gibbs),
            other => Err(Error::invalid(format!(
                "init_mode must be one of pseudo_pure, high_temp_linear, gibbs; got '{other}'"
            ))),
        }
    }
}

/// Sign of the pseudo-pure mixing weight `epsilon = sign * 3 / T_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EpsilonSign {
    /// `epsilon = -3 / T_s`
    #[default]
    Paper,
    /// `epsilon = +3 / T_s`
    Positive,
}

impl std::str::FromStr for EpsilonSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "negative" => Ok(EpsilonSign::Paper),
            "positive" => Ok(EpsilonSign::Positive),
            other => Err(Error::invalid(format!(
                "epsilon_sign must be 'paper' or 'positive', got '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitSpec {
    pub system_temperature: f64,
    pub mode: InitMode,
    pub epsilon_sign: EpsilonSign,
}

impl InitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.system_temperature.is_finite() && self.system_temperature > 0.0) {
            return Err(Error::invalid("system_temperature must be > 0"));
        }
        Ok(())
    }
}

/// `I (x) ... (x) p (x) ... (x) I` with `p` on 1-based site `j`.
pub fn site_operator(n: usize, j: usize, p: &ComplexMatrix) -> Result<ComplexMatrix> {
    product_operator(n, &[(j, p)])
}

/// Tensor product with the given single-site factors and identities elsewhere.
pub fn product_operator(n: usize, factors: &[(usize, &ComplexMatrix)]) -> Result<ComplexMatrix> {
    if n == 0 || n > MAX_SITES {
        return Err(Error::usage(format!(
            "site count {n} outside 1..={MAX_SITES}"
        )));
    }
    for &(j, p) in factors {
        if j == 0 || j > n {
            return Err(Error::usage(format!("site index {j} outside 1..={n}")));
        }
        if p.dim() != 2 {
            return Err(Error::usage("single-site operator must be 2x2"));
        }
    }
    let id = pauli::identity();
    let factor_at = |site: usize| -> ComplexMatrix {
        let mut m = id.clone();
        for (_, p) in factors.iter().filter(|(j, _)| *j == site) {
            m = m.matmul(p);
        }
        m
    };
    let mut out = factor_at(1);
    for site in 2..=n {
        out = kron(&out, &factor_at(site));
    }
    Ok(out)
}

/// `H = J sum (X_j X_{j+1} + Y_j Y_{j+1}) + D_z sum (X_j Y_{j+1} - Y_j X_{j+1})
///      + B_z sum Z_j`
pub fn build_hamiltonian(c: &ChainSpec) -> Result<ComplexMatrix> {
    c.validate()?;
    let n = c.n_sites;
    let (sx, sy, sz) = (pauli::sigma_x(), pauli::sigma_y(), pauli::sigma_z());
    let mut h = ComplexMatrix::zeros(c.dim());

    for (j, k) in c.bonds() {
        if c.j_coupling != 0.0 {
            h.axpy_real(c.j_coupling, &product_operator(n, &[(j, &sx), (k, &sx)])?);
            h.axpy_real(c.j_coupling, &product_operator(n, &[(j, &sy), (k, &sy)])?);
        }
        if c.dm_strength != 0.0 {
            h.axpy_real(c.dm_strength, &product_operator(n, &[(j, &sx), (k, &sy)])?);
            h.axpy_real(-c.dm_strength, &product_operator(n, &[(j, &sy), (k, &sx)])?);
        }
    }
    if c.field_strength != 0.0 {
        for j in 1..=n {
            h.axpy_real(c.field_strength, &site_operator(n, j, &sz)?);
        }
    }
    Ok(h)
}

/// `L_j = sigma_j^-` for every site.
pub fn build_lindblads(c: &ChainSpec) -> Result<Vec<ComplexMatrix>> {
    c.validate()?;
    lowering_operators(c.n_sites)
}

pub fn lowering_operators(n: usize) -> Result<Vec<ComplexMatrix>> {
    let sm = pauli::sigma_minus();
    (1..=n).map(|j| site_operator(n, j, &sm)).collect()
}

/// `sigma_j^-` acting by index manipulation instead of dense products.
///
/// Every method is an exact rearrangement of entries, equal to the dense
/// product with [`SiteLowering::to_dense`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteLowering {
    n_sites: usize,
    site: usize,
    mask: usize,
}

impl SiteLowering {
    pub fn new(n_sites: usize, site: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES || site == 0 || site > n_sites {
            return Err(Error::usage(format!(
                "site {site} is not a valid site of a {n_sites}-site chain"
            )));
        }
        Ok(Self {
            n_sites,
            site,
            mask: 1 << (n_sites - site),
        })
    }

    pub fn all(n_sites: usize) -> Result<Vec<Self>> {
        (1..=n_sites).map(|j| Self::new(n_sites, j)).collect()
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let dim = 1 << self.n_sites;
        ComplexMatrix::from_fn(dim, |r, c| {
            if c & self.mask != 0 && r == c ^ self.mask {
                ONE
            } else {
                ZERO
            }
        })
    }

    /// `L x`
    pub fn left_mul(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.map_rows(x, false)
    }

    /// `L^dagger x`
    pub fn dag_left_mul(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.map_rows(x, true)
    }

    /// `x L`
    pub fn right_mul(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.map_cols(x, true)
    }

    /// `x L^dagger`
    pub fn dag_right_mul(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.map_cols(x, false)
    }

    /// `[L, x]`
    pub fn commutator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.left_mul(x);
        out -= &self.right_mul(x);
        out
    }

    /// `[L^dagger, x]`
    pub fn dag_commutator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.dag_left_mul(x);
        out -= &self.dag_right_mul(x);
        out
    }

    // Row r of the result is row r ^ mask of x when bit `mask` of r equals
    // `keep_set`, and zero otherwise.
    fn map_rows(&self, x: &ComplexMatrix, keep_set: bool) -> ComplexMatrix {
        let dim = x.dim();
        assert_eq!(dim, 1 << self.n_sites, "operator dimension mismatch");
        let mut out = ComplexMatrix::zeros(dim);
        let src = x.as_slice();
        let dst = out.as_mut_slice();
        for r in 0..dim {
            if (r & self.mask != 0) == keep_set {
                let s = r ^ self.mask;
                dst[r * dim..(r + 1) * dim].copy_from_slice(&src[s * dim..(s + 1) * dim]);
            }
        }
        out
    }

    fn map_cols(&self, x: &ComplexMatrix, keep_set: bool) -> ComplexMatrix {
        let dim = x.dim();
        assert_eq!(dim, 1 << self.n_sites, "operator dimension mismatch");
        let mut out = ComplexMatrix::zeros(dim);
        let src = x.as_slice();
        let dst = out.as_mut_slice();
        for r in 0..dim {
            for c in 0..dim {
                if (c & self.mask != 0) == keep_set {
                    dst[r * dim + c] = src[r * dim + (c ^ self.mask)];
                }
            }
        }
        out
    }
}

/// `(|1000> + |0100> + |0010> + |0001>) / 2`
pub fn reference_single_excitation() -> Vec<C64> {
    let mut v = vec![ZERO; 1 << PSEUDO_PURE_SITES];
    for site in 1..=PSEUDO_PURE_SITES {
        v[1 << (PSEUDO_PURE_SITES - site)] = C64::new(0.5, 0.0);
    }
    v
}

/// Mixing weight of the pseudo-pure state at system temperature `t_s`.
pub fn pseudo_pure_epsilon(t_s: f64, sign: EpsilonSign) -> f64 {
    match sign {
        EpsilonSign::Paper => -3.0 / t_s,
        EpsilonSign::Positive => 3.0 / t_s,
    }
}

#[derive(Debug, Clone)]
pub struct PseudoPureState {
    pub rho: ComplexMatrix,
    pub epsilon: f64,
    /// Smallest eigenvalue is `>= -PSD_FLOOR`.
    pub psd: bool,
}

/// `(1 - eps)/2^N I + eps |phi0><phi0|` with `eps = -3 / T_s`.
pub fn pseudo_pure_state(c: &ChainSpec, t_s: f64) -> Result<PseudoPureState> {
    pseudo_pure_state_signed(c, t_s, EpsilonSign::Paper)
}

pub fn pseudo_pure_state_signed(
    c: &ChainSpec,
    t_s: f64,
    sign: EpsilonSign,
) -> Result<PseudoPureState> {
    check_temperature(t_s)?;
    if c.n_sites != PSEUDO_PURE_SITES {
        return Err(Error::Unsupported(format!(
            "pseudo_pure initial state is defined for n_sites = {PSEUDO_PURE_SITES} only (got {})",
            c.n_sites
        )));
    }
    let dim = c.dim();
    let eps = pseudo_pure_epsilon(t_s, sign);
    let phi = reference_single_excitation();
    let mut rho = ComplexMatrix::identity(dim).scale_real((1.0 - eps) / dim as f64);
    rho.axpy_real(eps, &ComplexMatrix::outer(&phi, &phi));
    let min_eig = linalg::hermitian_eigenvalues(&rho)?[0];
    Ok(PseudoPureState {
        rho,
        epsilon: eps,
        psd: min_eig >= -tolerance::PSD_FLOOR,
    })
}

/// `(I - H / T_s) / 2^N`
pub fn high_temp_state(c: &ChainSpec, t_s: f64) -> Result<ComplexMatrix> {
    check_temperature(t_s)?;
    let h = build_hamiltonian(c)?;
    let dim = c.dim();
    let mut rho = ComplexMatrix::identity(dim);
    rho.axpy_real(-1.0 / t_s, &h);
    Ok(rho.scale_real(1.0 / dim as f64))
}

/// `exp(-H / T_s) / Tr exp(-H / T_s)`
pub fn gibbs_state(c: &ChainSpec, t_s: f64) -> Result<ComplexMatrix> {
    check_temperature(t_s)?;
    let h = build_hamiltonian(c)?;
    let eig = linalg::hermitian_eig(&h)?;
    // Shift by the ground energy so the largest Boltzmann weight is 1.
    let e0 = eig.values[0];
    let z: f64 = eig.values.iter().map(|&e| (-(e - e0) / t_s).exp()).sum();
    Ok(eig.reconstruct_with(|e| C64::new((-(e - e0) / t_s).exp() / z, 0.0)))
}

/// `||H|| / T_s` with the spectral norm; the linear high-temperature state is
/// trustworthy when this is small.
pub fn validity_ratio(c: &ChainSpec, t_s: f64) -> Result<f64> {
    check_temperature(t_s)?;
    Ok(linalg::spectral_norm(&build_hamiltonian(c)?) / t_s)
}

/// Lorentzian spectral density `(Gamma / pi) omega / (1 + (omega / gamma)^2)`.
pub fn spectral_density(omega: f64, bath: &BathSpec) -> f64 {
    let x = omega / bath.memory_rate;
    bath.coupling_strength / PI * omega / (1.0 + x * x)
}

#[derive(Debug, Clone)]
pub struct InitialState {
    pub rho: ComplexMatrix,
    pub psd: bool,
    pub warnings: Vec<String>,
}

/// Builds the configured initial density matrix, collecting advisory warnings
/// (non-PSD pseudo-pure state, high-temperature expansion out of range).
pub fn initial_state(c: &ChainSpec, init: &InitSpec) -> Result<InitialState> {
    init.validate()?;
    let mut warnings = c.validate()?;
    let t_s = init.system_temperature;
    let (rho, psd) = match init.mode {
        InitMode::PseudoPure => {
            let s = pseudo_pure_state_signed(c, t_s, init.epsilon_sign)?;
            if !s.psd {
                warnings.push(format!(
                    "pseudo-pure initial state with epsilon = {:.4} is not positive semidefinite",
                    s.epsilon
                ));
            }
            (s.rho, s.psd)
        }
        InitMode::HighTempLinear => {
            let ratio = validity_ratio(c, t_s)?;
            if ratio > tolerance::HIGH_TEMP_VALIDITY {
                warnings.push(format!(
                    "||H||/T_s = {ratio:.3} exceeds {}; linear high-temperature state is inaccurate",
                    tolerance::HIGH_TEMP_VALIDITY
                ));
            }
            let rho = high_temp_state(c, t_s)?;
            let psd = linalg::hermitian_eigenvalues(&rho)?[0] >= -tolerance::PSD_FLOOR;
            if !psd {
                warnings.push("high-temperature initial state is not positive semidefinite".into());
            }
            (rho, psd)
        }
        InitMode::Gibbs => (gibbs_state(c, t_s)?, true),
    };
    Ok(InitialState { rho, psd, warnings })
}

fn check_temperature(t_s: f64) -> Result<()> {
    if t_s.is_nan() || t_s <= 0.0 {
        return Err(Error::invalid("system_temperature must be > 0"));
    }
    Ok(())
}
