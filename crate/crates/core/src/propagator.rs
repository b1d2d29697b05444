//! Weak-noise master equation for rho coupled to the per-site O-operators,
//! integrated as one ODE system with classical RK4.
//!
//! ```text
//! d rho/dt = -i[H, rho] + sum_j { [L_j, rho Oz_j^+] - [L_j^+, Oz_j rho]
//!                               + [L_j^+, rho Ow_j^+] - [L_j, Ow_j rho] }
//! d Oz_j/dt = (G T g / 2 - i G g^2 / 2) L_j   - g Oz_j + [M, Oz_j]
//! d Ow_j/dt = (G T g / 2)               L_j^+ - g Ow_j + [M, Ow_j]
//! M = -iH - sum_k (L_k^+ Oz_k + L_k Ow_k)
//! ```
//!
//! with `G`, `g`, `T` the coupling strength, memory rate and temperature of
//! site `j`'s bath. All O-operators start at zero.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{commutator_unchecked, ComplexMatrix, I};
use crate::observables::{fill_energy_current_fd, TrajectoryRecord};
use crate::spin::{self, BathSpec, ChainSpec, SiteLowering};
use crate::tolerance;

/// Everything the right-hand side needs: H, the jump operators and one bath
/// per site.
#[derive(Debug, Clone)]
pub struct Model {
    hamiltonian: ComplexMatrix,
    lowering: Vec<SiteLowering>,
    lowering_dense: Vec<ComplexMatrix>,
    raising_dense: Vec<ComplexMatrix>,
    baths: Vec<BathSpec>,
}

impl Model {
    /// Chain with every site coupled to an identical bath.
    pub fn new(chain: &ChainSpec, bath: BathSpec) -> Result<Self> {
        Self::with_baths(chain, vec![bath; chain.n_sites])
    }

    pub fn with_baths(chain: &ChainSpec, baths: Vec<BathSpec>) -> Result<Self> {
        let hamiltonian = spin::build_hamiltonian(chain)?;
        Self::from_parts(hamiltonian, chain.n_sites, baths)
    }

    /// Model with an arbitrary Hermitian `hamiltonian` on `n_sites` spins.
    pub fn from_parts(
        hamiltonian: ComplexMatrix,
        n_sites: usize,
        baths: Vec<BathSpec>,
    ) -> Result<Self> {
        if hamiltonian.dim() != 1usize.checked_shl(n_sites as u32).unwrap_or(0) {
            return Err(Error::usage(
                "Hamiltonian dimension does not match 2^n_sites",
            ));
        }
        if !hamiltonian.is_hermitian(tolerance::STRUCTURAL * hamiltonian.max_abs().max(1.0)) {
            return Err(Error::usage("Hamiltonian is not Hermitian"));
        }
        if baths.len() != n_sites {
            return Err(Error::usage(format!(
                "{} baths given for {n_sites} sites",
                baths.len()
            )));
        }
        for b in &baths {
            b.validate()?;
        }
        let lowering = SiteLowering::all(n_sites)?;
        let lowering_dense: Vec<_> = lowering.iter().map(SiteLowering::to_dense).collect();
        let raising_dense = lowering_dense.iter().map(ComplexMatrix::adjoint).collect();
        Ok(Self {
            hamiltonian,
            lowering,
            lowering_dense,
            raising_dense,
            baths,
        })
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn n_sites(&self) -> usize {
        self.lowering.len()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn baths(&self) -> &[BathSpec] {
        &self.baths
    }

    pub fn lindblads(&self) -> &[ComplexMatrix] {
        &self.lowering_dense
    }

    /// `(G T g / 2 - i G g^2 / 2, G T g / 2)` for site index `j` (0-based).
    pub fn source_coefficients(&self, j: usize) -> (C64, C64) {
        let b = &self.baths[j];
        let thermal = b.coupling_strength * b.bath_temperature * b.memory_rate / 2.0;
        let quantum = b.coupling_strength * b.memory_rate * b.memory_rate / 2.0;
        (C64::new(thermal, -quantum), C64::new(thermal, 0.0))
    }
}

/// Time plus the density matrix and both O-operator families.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub rho: ComplexMatrix,
    pub o_z: Vec<ComplexMatrix>,
    pub o_w: Vec<ComplexMatrix>,
}

impl SimState {
    /// `t = 0` with all O-operators zero.
    pub fn initial(model: &Model, rho: ComplexMatrix) -> Self {
        let zero = ComplexMatrix::zeros(model.dim());
        Self {
            t: 0.0,
            rho,
            o_z: vec![zero.clone(); model.n_sites()],
            o_w: vec![zero; model.n_sites()],
        }
    }

    fn first_non_finite(&self) -> Option<String> {
        if !self.rho.is_finite() {
            return Some("rho".into());
        }
        for (j, o) in self.o_z.iter().enumerate() {
            if !o.is_finite() {
                return Some(format!("O_z[{}]", j + 1));
            }
        }
        for (j, o) in self.o_w.iter().enumerate() {
            if !o.is_finite() {
                return Some(format!("O_w[{}]", j + 1));
            }
        }
        None
    }

    /// `self + h * d` with `t` left unchanged.
    fn offset(&self, d: &Derivative, h: f64) -> Self {
        let mut out = self.clone();
        out.rho.axpy_real(h, &d.rho);
        for (o, dz) in out.o_z.iter_mut().zip(&d.o_z) {
            o.axpy_real(h, dz);
        }
        for (o, dw) in out.o_w.iter_mut().zip(&d.o_w) {
            o.axpy_real(h, dw);
        }
        out
    }
}

/// Time derivative of every component of a [`SimState`].
#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub rho: ComplexMatrix,
    pub o_z: Vec<ComplexMatrix>,
    pub o_w: Vec<ComplexMatrix>,
}

impl Derivative {
    fn add_scaled(&mut self, other: &Derivative, s: f64) {
        self.rho.axpy_real(s, &other.rho);
        for (a, b) in self.o_z.iter_mut().zip(&other.o_z) {
            a.axpy_real(s, b);
        }
        for (a, b) in self.o_w.iter_mut().zip(&other.o_w) {
            a.axpy_real(s, b);
        }
    }
}

/// `M = -iH - sum_j (L_j^+ Oz_j + L_j Ow_j)`, shared by every O-operator
/// equation.
pub fn drift_operator(s: &SimState, model: &Model) -> ComplexMatrix {
    let mut m = model.hamiltonian.scale(-I);
    for ((l, oz), ow) in model.lowering.iter().zip(&s.o_z).zip(&s.o_w) {
        m -= &l.dag_left_mul(oz);
        m -= &l.left_mul(ow);
    }
    m
}

/// Right-hand sides of the O-operator equations.
pub fn o_rhs(s: &SimState, model: &Model) -> (Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
    let m = drift_operator(s, model);
    o_rhs_with_drift(s, model, &m)
}

fn o_rhs_with_drift(
    s: &SimState,
    model: &Model,
    m: &ComplexMatrix,
) -> (Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
    let n = model.n_sites();
    let mut dz = Vec::with_capacity(n);
    let mut dw = Vec::with_capacity(n);
    for j in 0..n {
        let rate = model.baths[j].memory_rate;
        let (cz, cw) = model.source_coefficients(j);

        let mut z = commutator_unchecked(m, &s.o_z[j]);
        z.axpy_real(-rate, &s.o_z[j]);
        z.axpy(cz, &model.lowering_dense[j]);
        dz.push(z);

        let mut w = commutator_unchecked(m, &s.o_w[j]);
        w.axpy_real(-rate, &s.o_w[j]);
        w.axpy(cw, &model.raising_dense[j]);
        dw.push(w);
    }
    (dz, dw)
}

/// Right-hand side of the master equation for `rho`.
pub fn rho_rhs(s: &SimState, model: &Model) -> ComplexMatrix {
    let rho = &s.rho;
    let mut out = commutator_unchecked(&model.hamiltonian, rho).scale(-I);

    // For an exactly Hermitian rho, rho O^+ = (O rho)^+ and the four
    // commutators of site j collapse to C + C^+ with C = [L, (Oz rho)^+ - Ow rho].
    let hermitian = rho.hermitian_residual() == 0.0;
    for ((l, oz), ow) in model.lowering.iter().zip(&s.o_z).zip(&s.o_w) {
        let oz_rho = oz.matmul(rho);
        let ow_rho = ow.matmul(rho);
        if hermitian {
            let mut x = oz_rho.adjoint();
            x -= &ow_rho;
            let c = l.commutator(&x);
            // Summing C + C^+ before accumulating keeps `out` bitwise Hermitian.
            let mut sym = c.adjoint();
            sym += &c;
            out += &sym;
        } else {
            let rho_oz_dag = rho.matmul(&oz.adjoint());
            let rho_ow_dag = rho.matmul(&ow.adjoint());
            out += &l.commutator(&rho_oz_dag);
            out -= &l.dag_commutator(&oz_rho);
            out += &l.dag_commutator(&rho_ow_dag);
            out -= &l.commutator(&ow_rho);
        }
    }
    out
}

/// Full right-hand side, evaluating the drift operator once.
pub fn derivative(s: &SimState, model: &Model) -> Derivative {
    let m = drift_operator(s, model);
    let (o_z, o_w) = o_rhs_with_drift(s, model, &m);
    Derivative {
        rho: rho_rhs(s, model),
        o_z,
        o_w,
    }
}

/// One classical RK4 step of size `dt`.
pub fn step_rk4(s: &SimState, model: &Model, dt: f64) -> Result<SimState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::usage(format!("step size must be > 0, got {dt}")));
    }
    let k1 = derivative(s, model);
    let mut next = rk4_from(s, &k1, model, dt);
    next.t = s.t + dt;
    check_finite(&next)?;
    Ok(next)
}

fn rk4_from(s: &SimState, k1: &Derivative, model: &Model, dt: f64) -> SimState {
    let k2 = derivative(&s.offset(k1, 0.5 * dt), model);
    let k3 = derivative(&s.offset(&k2, 0.5 * dt), model);
    let k4 = derivative(&s.offset(&k3, dt), model);

    let mut sum = k1.clone();
    sum.add_scaled(&k2, 2.0);
    sum.add_scaled(&k3, 2.0);
    sum.add_scaled(&k4, 1.0);
    s.offset(&sum, dt / 6.0)
}

fn check_finite(s: &SimState) -> Result<()> {
    match s.first_non_finite() {
        Some(component) => Err(Error::Diverged { t: s.t, component }),
        None => Ok(()),
    }
}

/// Integration grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSpec {
    pub dt: f64,
    pub t_max: f64,
    pub record_stride: usize,
}

impl Default for StepSpec {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_max: 15.0,
            record_stride: 10,
        }
    }
}

impl StepSpec {
    /// `t_max = 0` is accepted and yields a single record at `t = 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt must be > 0"));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(Error::invalid("t_max must be >= 0"));
        }
        if self.record_stride == 0 {
            return Err(Error::invalid("record_stride must be >= 1"));
        }
        if self.t_max > 0.0 && self.dt * self.record_stride as f64 > self.t_max * (1.0 + 1e-12) {
            return Err(Error::invalid("dt * record_stride must be <= t_max"));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    /// Spacing between consecutive records.
    pub fn record_interval(&self) -> f64 {
        self.dt * self.record_stride as f64
    }
}

/// Integrates from `init` over `spec`, recording every `record_stride` steps.
///
/// `observer` sees each recorded state together with the right-hand side of
/// the master equation at that state, which is also the first RK4 stage of
/// the following step and the derivative the energy current is measured from.
pub fn propagate(
    model: &Model,
    init: &ComplexMatrix,
    spec: &StepSpec,
    mut observer: impl FnMut(&SimState, &ComplexMatrix),
) -> Result<Vec<TrajectoryRecord>> {
    spec.validate()?;
    if init.dim() != model.dim() {
        return Err(Error::usage(
            "initial state dimension does not match the model",
        ));
    }
    if (init.trace() - 1.0).norm() > tolerance::STRUCTURAL {
        return Err(Error::usage("initial state must have unit trace"));
    }
    if !init.is_hermitian(tolerance::STRUCTURAL) {
        return Err(Error::usage("initial state must be Hermitian"));
    }

    let n_steps = spec.n_steps();
    let mut records = Vec::with_capacity(n_steps / spec.record_stride + 1);
    let mut state = SimState::initial(model, init.clone());
    for step in 0..=n_steps {
        let k1 = derivative(&state, model);
        if step % spec.record_stride == 0 {
            observer(&state, &k1.rho);
            let o_ops: Vec<&ComplexMatrix> = state.o_z.iter().chain(&state.o_w).collect();
            records.push(TrajectoryRecord::measure(
                state.t,
                &state.rho,
                &k1.rho,
                model.hamiltonian(),
                &o_ops,
            )?);
        }
        if step == n_steps {
            break;
        }
        state = rk4_from(&state, &k1, model, spec.dt);
        state.t = (step + 1) as f64 * spec.dt;
        check_finite(&state)?;
    }
    fill_energy_current_fd(&mut records)?;
    Ok(records)
}

/// Final state only, without recording.
pub fn evolve_to(model: &Model, init: &ComplexMatrix, dt: f64, n_steps: usize) -> Result<SimState> {
    let mut state = SimState::initial(model, init.clone());
    for _ in 0..n_steps {
        state = step_rk4(&state, model, dt)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::commutator;
    use crate::spin::{pauli, Boundary};
    use crate::tolerance;

    fn bath(coupling: f64, rate: f64, temp: f64) -> BathSpec {
        BathSpec {
            coupling_strength: coupling,
            memory_rate: rate,
            bath_temperature: temp,
        }
    }

    fn fig2b_model() -> Model {
        Model::new(&ChainSpec::default(), bath(0.003, 5.0, 80.0)).unwrap()
    }

    fn pseudo_pure(t_s: f64) -> ComplexMatrix {
        spin::pseudo_pure_state(&ChainSpec::default(), t_s)
            .unwrap()
            .rho
    }

    // Deterministic pseudo-random fill, no RNG dependency in unit tests.
    fn scrambled(dim: usize, seed: u64) -> ComplexMatrix {
        let mut x = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        ComplexMatrix::from_fn(dim, |_, _| C64::new(next(), next()))
    }

    /// Literal master equation with dense products only.
    fn rho_rhs_literal(s: &SimState, model: &Model) -> ComplexMatrix {
        let h = model.hamiltonian();
        let mut out = commutator(h, &s.rho).unwrap().scale(-I);
        for j in 0..model.n_sites() {
            let l = &model.lindblads()[j];
            let ld = l.adjoint();
            let (oz, ow) = (&s.o_z[j], &s.o_w[j]);
            out += &commutator(l, &s.rho.matmul(&oz.adjoint())).unwrap();
            out -= &commutator(&ld, &oz.matmul(&s.rho)).unwrap();
            out += &commutator(&ld, &s.rho.matmul(&ow.adjoint())).unwrap();
            out -= &commutator(l, &ow.matmul(&s.rho)).unwrap();
        }
        out
    }

    fn random_state(model: &Model, seed: u64, hermitian: bool) -> SimState {
        let n = model.n_sites();
        let dim = model.dim();
        let rho = if hermitian {
            scrambled(dim, seed).hermitian_part()
        } else {
            scrambled(dim, seed)
        };
        SimState {
            t: 0.3,
            rho,
            o_z: (0..n)
                .map(|j| scrambled(dim, seed + 10 + j as u64))
                .collect(),
            o_w: (0..n)
                .map(|j| scrambled(dim, seed + 50 + j as u64))
                .collect(),
        }
    }

    #[test]
    fn drift_operator_examples() {
        let model = fig2b_model();
        let s = SimState::initial(&model, pseudo_pure(10.0));
        assert_eq!(drift_operator(&s, &model), model.hamiltonian().scale(-I));

        // Single site: o_z = c sigma^-, o_w = 0 gives M = -iH - c sigma^+ sigma^-.
        let h = pauli::sigma_z().scale_real(0.4);
        let one = Model::from_parts(h.clone(), 1, vec![bath(0.1, 1.0, 1.0)]).unwrap();
        let c = C64::new(0.2, -0.7);
        let s1 = SimState {
            t: 0.0,
            rho: ComplexMatrix::identity(2).scale_real(0.5),
            o_z: vec![pauli::sigma_minus().scale(c)],
            o_w: vec![ComplexMatrix::zeros(2)],
        };
        let mut want = h.scale(-I);
        want.axpy(-c, &pauli::sigma_plus().matmul(&pauli::sigma_minus()));
        assert!(drift_operator(&s1, &one).max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn drift_matches_dense_sum() {
        let model = fig2b_model();
        let s = random_state(&model, 3, true);
        let mut want = model.hamiltonian().scale(-I);
        for j in 0..4 {
            let l = &model.lindblads()[j];
            want -= &l.adjoint().matmul(&s.o_z[j]);
            want -= &l.matmul(&s.o_w[j]);
        }
        assert!(drift_operator(&s, &model).max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn o_rhs_at_zero_is_the_source() {
        let model = fig2b_model();
        let s = SimState::initial(&model, pseudo_pure(10.0));
        let (dz, dw) = o_rhs(&s, &model);
        let (g, rate, temp) = (0.003, 5.0, 80.0);
        let cz = C64::new(g * temp * rate / 2.0, -g * rate * rate / 2.0);
        let cw = C64::new(g * temp * rate / 2.0, 0.0);
        for j in 0..4 {
            let l = &model.lindblads()[j];
            assert!(dz[j].max_abs_diff(&l.scale(cz)) < 1e-15);
            assert!(dw[j].max_abs_diff(&l.adjoint().scale(cw)) < 1e-15);
        }
    }

    #[test]
    fn o_rhs_zero_coupling_is_fixed_point() {
        let model = Model::new(&ChainSpec::default(), bath(0.0, 5.0, 80.0)).unwrap();
        let s = SimState::initial(&model, pseudo_pure(10.0));
        let (dz, dw) = o_rhs(&s, &model);
        assert!(dz.iter().chain(&dw).all(|d| d.max_abs() == 0.0));
        let later = evolve_to(&model, &s.rho, 0.01, 50).unwrap();
        assert!(later
            .o_z
            .iter()
            .chain(&later.o_w)
            .all(|o| o.max_abs() == 0.0));
        assert_eq!(
            drift_operator(&later, &model),
            model.hamiltonian().scale(-I)
        );
    }

    #[test]
    fn o_rhs_zero_temperature() {
        let model = Model::new(&ChainSpec::default(), bath(0.01, 2.0, 0.0)).unwrap();
        let s = SimState::initial(&model, pseudo_pure(10.0));
        let (dz, dw) = o_rhs(&s, &model);
        assert!(dw.iter().all(|d| d.max_abs() == 0.0));
        let want = model.lindblads()[0].scale(C64::new(0.0, -0.01 * 4.0 / 2.0));
        assert!(dz[0].max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn o_rhs_matches_dense_formula() {
        let model = Model::new(
            &ChainSpec {
                dm_strength: 0.3,
                field_strength: 0.5,
                ..Default::default()
            },
            bath(0.005, 2.0, 20.0),
        )
        .unwrap();
        let s = random_state(&model, 9, true);
        let m = drift_operator(&s, &model);
        let (dz, dw) = o_rhs(&s, &model);
        for j in 0..4 {
            let (cz, cw) = model.source_coefficients(j);
            let l = &model.lindblads()[j];
            let mut z = l.scale(cz);
            z.axpy_real(-2.0, &s.o_z[j]);
            z += &commutator(&m, &s.o_z[j]).unwrap();
            assert!(dz[j].max_abs_diff(&z) < 1e-13);
            let mut w = l.adjoint().scale(cw);
            w.axpy_real(-2.0, &s.o_w[j]);
            w += &commutator(&m, &s.o_w[j]).unwrap();
            assert!(dw[j].max_abs_diff(&w) < 1e-13);
        }
    }

    #[test]
    fn rho_rhs_without_memory_is_unitary() {
        let model = fig2b_model();
        let rho = pseudo_pure(10.0);
        let s = SimState::initial(&model, rho.clone());
        let want = commutator(model.hamiltonian(), &rho).unwrap().scale(-I);
        assert!(rho_rhs(&s, &model).max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn rho_rhs_matches_literal_formula() {
        let model = fig2b_model();
        for (seed, hermitian) in [(1, true), (2, true), (3, false), (4, false)] {
            let s = random_state(&model, seed, hermitian);
            let fast = rho_rhs(&s, &model);
            let literal = rho_rhs_literal(&s, &model);
            assert!(fast.max_abs_diff(&literal) < 1e-13, "seed {seed}");
            assert!(fast.trace().norm() < tolerance::ROUNDING);
            if hermitian {
                assert!(fast.hermitian_residual() < tolerance::ROUNDING);
                assert!(literal.hermitian_residual() < tolerance::ROUNDING);
            }
        }
    }

    #[test]
    fn step_requires_positive_dt() {
        let model = fig2b_model();
        let s = SimState::initial(&model, pseudo_pure(10.0));
        assert!(matches!(step_rk4(&s, &model, 0.0), Err(Error::Usage(_))));
        assert!(step_rk4(&s, &model, -1e-3).is_err());
    }

    #[test]
    fn stationary_state_is_unchanged() {
        let chain = ChainSpec {
            j_coupling: 0.0,
            field_strength: 0.8,
            ..Default::default()
        };
        let model = Model::new(&chain, bath(0.0, 1.0, 1.0)).unwrap();
        let rho = ComplexMatrix::from_real_diagonal(
            &(0..16)
                .map(|k| (k as f64 + 1.0) / 136.0)
                .collect::<Vec<_>>(),
        );
        let s = SimState::initial(&model, rho.clone());
        let next = step_rk4(&s, &model, 0.05).unwrap();
        assert_eq!(next.rho, rho);
        assert_eq!(next.t, 0.05);
    }

    #[test]
    fn divergence_is_reported_with_time() {
        let model = fig2b_model();
        let mut s = SimState::initial(&model, pseudo_pure(10.0));
        s.o_w[2][(0, 1)] = C64::new(f64::INFINITY, 0.0);
        s.t = 1.25;
        match step_rk4(&s, &model, 1e-3) {
            Err(Error::Diverged { t, .. }) => assert!((t - 1.251).abs() < 1e-12),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn bitwise_reproducible() {
        let model = fig2b_model();
        let rho = pseudo_pure(10.0);
        let a = evolve_to(&model, &rho, 1e-2, 20).unwrap();
        let b = evolve_to(&model, &rho, 1e-2, 20).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn propagate_boundary_cases() {
        let model = fig2b_model();
        let rho = pseudo_pure(10.0);
        let single = StepSpec {
            dt: 1e-3,
            t_max: 0.0,
            record_stride: 10,
        };
        let recs = propagate(&model, &rho, &single, |_, _| {}).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].t, 0.0);
        assert!(recs[0].energy_current.abs() < tolerance::IMAG_RESIDUAL);

        let short = StepSpec {
            dt: 1e-2,
            t_max: 0.5,
            record_stride: 5,
        };
        let mut seen = 0;
        let recs = propagate(&model, &rho, &short, |s, rhs| {
            seen += 1;
            assert_eq!(rhs, &rho_rhs(s, &model));
        })
        .unwrap();
        assert_eq!(recs.len(), 11);
        assert_eq!(seen, 11);
        assert!((recs.last().unwrap().t - 0.5).abs() < 1e-12);
        assert!(recs[0].energy_current_fd.is_none() && recs[5].energy_current_fd.is_some());
    }

    #[test]
    fn propagate_rejects_bad_input() {
        let model = fig2b_model();
        let spec = StepSpec {
            dt: 1e-2,
            t_max: 0.1,
            record_stride: 1,
        };
        let unnormalised = ComplexMatrix::identity(16);
        assert!(propagate(&model, &unnormalised, &spec, |_, _| {}).is_err());
        let bad_spec = StepSpec {
            dt: 0.1,
            t_max: 0.5,
            record_stride: 10,
        };
        assert!(propagate(&model, &pseudo_pure(10.0), &bad_spec, |_, _| {}).is_err());
    }

    #[test]
    fn model_rejects_mismatched_parts() {
        let h = ComplexMatrix::identity(8);
        assert!(Model::from_parts(h.clone(), 2, vec![bath(0.1, 1.0, 1.0); 2]).is_err());
        assert!(Model::from_parts(h, 3, vec![bath(0.1, 1.0, 1.0); 2]).is_err());
        let open = ChainSpec {
            boundary: Boundary::Open,
            ..Default::default()
        };
        assert!(Model::new(&open, bath(0.1, -1.0, 1.0)).is_err());
    }
}
