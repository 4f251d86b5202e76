//! Physical model of the single-ion engine: working-medium Hamiltonians, the
//! linear field ramp, and the Lindblad generator for the hot-bath contact.
//!
//! Working units set hbar = k_B = 1; energies are in units of the vibrational
//! quantum omega.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qcore::matrix::{ops, tensor_product, ComplexMatrix};

/// Model parameters.
///
/// The electronic qubit sees `H_S(t) = g sigma_x + B(t) sigma_z`; the
/// vibrational mode contributes `omega a^dag a`; the exchange coupling is
/// `k (sigma_- a^dag + sigma_+ a)`.  The hot bath acts on the qubit with rate
/// `gamma` and occupation `n_th`.
#[derive(Clone, Debug, PartialEq)]
pub struct EngineParams {
    /// Transverse coupling of the qubit.
    pub g: f64,
    /// Qubit-mode exchange coupling.
    pub k: f64,
    /// Vibrational quantum.
    pub omega: f64,
    /// Hot-bath coupling rate.
    pub gamma: f64,
    /// Hot-bath occupation driving the absorption/emission balance.
    pub n_th: f64,
    /// Hot-bath temperature used for thermal reference states.
    pub t_hot: f64,
    /// Field at the hot end of the cycle.
    pub b_high: f64,
    /// Field at the cold end of the cycle.
    pub b_low: f64,
    /// Initial phonon occupation; 0 starts the mode in its ground state.
    pub n_vib0: f64,
    /// Phonon occupation defining the effective cold temperature that prices
    /// the measurement reset.
    pub n_meas: f64,
    /// Keep the bath coupling active during the field ramps.  The default
    /// treats the ramps as unitary; see `RampSchedule`.
    pub ramp_dissipator: bool,
}

impl Default for EngineParams {
    fn default() -> Self {
        Self {
            g: 0.2,
            k: 0.1,
            omega: 1.0,
            gamma: 0.085,
            n_th: 0.1,
            t_hot: 10.0,
            b_high: 10.0,
            b_low: 5.0,
            n_vib0: 0.0,
            n_meas: 0.02,
            ramp_dissipator: false,
        }
    }
}

impl EngineParams {
    /// Checks the parameter ranges the engine protocol relies on.
    pub fn validate(&self) -> Result<()> {
        if !(self.g >= 0.0) {
            return Err(Error::InvalidArgument("g must be >= 0".into()));
        }
        if !(self.k >= 0.0) {
            return Err(Error::InvalidArgument("k must be >= 0".into()));
        }
        if !(self.omega > 0.0) {
            return Err(Error::InvalidArgument("omega must be > 0".into()));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::InvalidArgument("gamma must be >= 0".into()));
        }
        if !(self.n_th >= 0.0) {
            return Err(Error::InvalidArgument("n_th must be >= 0".into()));
        }
        if !(self.t_hot > 0.0) {
            return Err(Error::InvalidArgument("T_hot must be > 0".into()));
        }
        if !(self.b_high > 0.0) {
            return Err(Error::InvalidArgument("B_high must be > 0".into()));
        }
        if !(self.b_low > 0.0) {
            return Err(Error::InvalidArgument("B_low must be > 0".into()));
        }
        if !(self.b_low < self.b_high) {
            return Err(Error::InvalidArgument(format!(
                "B_low must be < B_high (got B_low={}, B_high={})",
                self.b_low, self.b_high
            )));
        }
        if !(self.n_vib0 >= 0.0 && self.n_vib0 <= 1.0) {
            return Err(Error::InvalidArgument(
                "n_vib0 must lie in [0, 1] (occupation of the upper vibrational level)".into(),
            ));
        }
        if !(self.n_meas >= 0.0) {
            return Err(Error::InvalidArgument("n_meas must be >= 0".into()));
        }
        Ok(())
    }
}

/// Linear field sweep `B(t) = b_start + (b_end - b_start) t / duration`.
#[derive(Clone, Debug, PartialEq)]
pub struct RampSchedule {
    pub b_start: f64,
    pub b_end: f64,
    pub duration: f64,
}

impl RampSchedule {
    pub fn new(b_start: f64, b_end: f64, duration: f64) -> Result<Self> {
        if !(duration > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ramp duration must be > 0, got {duration}"
            )));
        }
        Ok(Self {
            b_start,
            b_end,
            duration,
        })
    }

    /// Field value at `t` in `[0, duration]`; exact at both endpoints.
    pub fn b_field(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t > self.duration {
            return Err(Error::InvalidArgument(format!(
                "time {t} outside ramp interval [0, {}]",
                self.duration
            )));
        }
        Ok(self.b_start + (self.b_end - self.b_start) * (t / self.duration))
    }
}

/// Electronic Hamiltonian `g sigma_x + b sigma_z` (2x2).
pub fn h_system(b: f64, params: &EngineParams) -> ComplexMatrix {
    &ops::sigma_x().scale_re(params.g) + &ops::sigma_z().scale_re(b)
}

/// Full Hamiltonian on the joint space at field `b`:
/// `H_S (x) I + omega I (x) a^dag a + k (sigma_- (x) a^dag + sigma_+ (x) a)`.
pub fn h_full(b: f64, params: &EngineParams) -> ComplexMatrix {
    let id2 = ComplexMatrix::identity(2);
    let hs = tensor_product(&h_system(b, params), &id2).expect("2x2 factors");
    let hph = tensor_product(&id2, &ops::number().scale_re(params.omega)).expect("2x2 factors");
    let exchange = &tensor_product(&ops::sigma_minus(), &ops::creation()).expect("2x2 factors")
        + &tensor_product(&ops::sigma_plus(), &ops::annihilation()).expect("2x2 factors");
    &(&hs + &hph) + &exchange.scale_re(params.k)
}

/// Field profile a generator evolves under.
#[derive(Clone, Debug)]
pub enum FieldProfile {
    Fixed(f64),
    Ramp(RampSchedule),
}

impl FieldProfile {
    pub fn b_at(&self, t: f64) -> Result<f64> {
        match self {
            FieldProfile::Fixed(b) => Ok(*b),
            FieldProfile::Ramp(schedule) => schedule.b_field(t),
        }
    }
}

/// Right-hand side of the master equation
///
/// ```text
/// d rho/dt = -i [H(t), rho]
///          + (n_th + 1) (gamma/2) (2 s- rho s+ - s+ s- rho - rho s+ s-)
///          +  n_th      (gamma/2) (2 s+ rho s- - s- s+ rho - rho s- s+)
/// ```
///
/// with `s± = sigma_± (x) I` acting on the electronic factor only.  The
/// dissipator can be disabled to evolve the commutator alone.
pub struct LindbladGenerator {
    params: EngineParams,
    field: FieldProfile,
    dissipator_on: bool,
    /// Field-independent part of the Hamiltonian:
    /// `g sigma_x (x) I + omega I (x) n + k (exchange)`.
    h_const: ComplexMatrix,
    /// Coefficient of the field: `sigma_z (x) I`.
    sz_joint: ComplexMatrix,
    s_minus: ComplexMatrix,
    s_plus: ComplexMatrix,
    /// `s+ s-` and `s- s+`, precomputed.
    sp_sm: ComplexMatrix,
    sm_sp: ComplexMatrix,
}

impl LindbladGenerator {
    pub fn new(params: &EngineParams, field: FieldProfile, dissipator_on: bool) -> Self {
        let id2 = ComplexMatrix::identity(2);
        // The field enters linearly, so h_full(0) is the constant part.
        let h_const = h_full(0.0, params);
        let sz_joint = tensor_product(&ops::sigma_z(), &id2).expect("2x2 factors");
        let s_minus = tensor_product(&ops::sigma_minus(), &id2).expect("2x2 factors");
        let s_plus = tensor_product(&ops::sigma_plus(), &id2).expect("2x2 factors");
        let sp_sm = s_plus.matmul(&s_minus);
        let sm_sp = s_minus.matmul(&s_plus);
        Self {
            params: params.clone(),
            field,
            dissipator_on,
            h_const,
            sz_joint,
            s_minus,
            s_plus,
            sp_sm,
            sm_sp,
        }
    }

    pub fn field(&self) -> &FieldProfile {
        &self.field
    }

    /// Evaluates the generator at time `t` (relative to the profile origin).
    pub fn rhs(&self, t: f64, rho: &ComplexMatrix) -> ComplexMatrix {
        let b = self.field.b_at(t).expect("time within profile");
        let mut h = self.h_const.clone();
        h.axpy(b, &self.sz_joint);

        // -i [H, rho]
        let comm = h.commutator(rho);
        let mut out = comm.scale(C64::new(0.0, -1.0));

        if self.dissipator_on && self.params.gamma > 0.0 {
            let down = (self.params.n_th + 1.0) * self.params.gamma * 0.5;
            let up = self.params.n_th * self.params.gamma * 0.5;

            if down > 0.0 {
                let hop = self.s_minus.matmul(rho).matmul(&self.s_plus);
                let anti = self.sp_sm.anticommutator(rho);
                out.axpy(2.0 * down, &hop);
                out.axpy(-down, &anti);
            }
            if up > 0.0 {
                let hop = self.s_plus.matmul(rho).matmul(&self.s_minus);
                let anti = self.sm_sp.anticommutator(rho);
                out.axpy(2.0 * up, &hop);
                out.axpy(-up, &anti);
            }
        }
        out
    }
}

/// Lower bound on the ramp duration for adiabatic following of the qubit,
/// `(g/8) |1/B_low^2 - 1/B_high^2|`.
pub fn adiabatic_time_bound(params: &EngineParams) -> Result<f64> {
    if params.b_low == 0.0 || params.b_high == 0.0 {
        return Err(Error::InvalidArgument(
            "adiabatic bound undefined for zero field".into(),
        ));
    }
    Ok((params.g / 8.0) * (1.0 / (params.b_low * params.b_low)
        - 1.0 / (params.b_high * params.b_high))
        .abs())
}

/// Temperature at which a mode of quantum `omega` has mean occupation
/// `n_bar`: `T = omega / ln(1/n_bar + 1)`.
pub fn effective_temperature(n_bar: f64, omega: f64) -> Result<f64> {
    if !(n_bar > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "occupation must be > 0, got {n_bar}"
        )));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mode quantum must be > 0, got {omega}"
        )));
    }
    Ok(omega / (1.0 / n_bar + 1.0).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::density::{DensityMatrix, StateLabel};
    use crate::qcore::eig::eigvalsh4;
    use approx::assert_relative_eq;

    #[test]
    fn default_params_validate() {
        EngineParams::default().validate().unwrap();
    }

    #[test]
    fn validation_rejects_inverted_fields() {
        let params = EngineParams {
            b_low: 12.0,
            ..EngineParams::default()
        };
        let err = params.validate().unwrap_err();
        assert!(err.to_string().contains("B_low"));
    }

    #[test]
    fn ramp_hits_endpoints_exactly_and_midpoint() {
        let ramp = RampSchedule::new(10.0, 5.0, 256.0).unwrap();
        assert_eq!(ramp.b_field(0.0).unwrap(), 10.0);
        assert_eq!(ramp.b_field(256.0).unwrap(), 5.0);
        assert_relative_eq!(ramp.b_field(128.0).unwrap(), 7.5, max_relative = 1e-15);
        assert!(ramp.b_field(-1.0).is_err());
        assert!(ramp.b_field(257.0).is_err());
    }

    #[test]
    fn ramp_rejects_nonpositive_duration() {
        assert!(RampSchedule::new(10.0, 5.0, 0.0).is_err());
        assert!(RampSchedule::new(10.0, 5.0, -3.0).is_err());
    }

    #[test]
    fn h_system_matches_closed_form() {
        let params = EngineParams::default();
        let h = h_system(10.0, &params);
        assert_relative_eq!(h.get(0, 0).re, -10.0, max_relative = 1e-15);
        assert_relative_eq!(h.get(1, 1).re, 10.0, max_relative = 1e-15);
        assert_relative_eq!(h.get(0, 1).re, 0.2, max_relative = 1e-15);
    }

    #[test]
    fn h_full_diagonal_part_without_couplings() {
        let params = EngineParams {
            g: 0.0,
            k: 0.0,
            ..EngineParams::default()
        };
        let h = h_full(10.0, &params);
        let expected = ComplexMatrix::diagonal(&[-10.0, -9.0, 10.0, 11.0]);
        assert!(h.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn exchange_couples_the_expected_pair() {
        let params = EngineParams::default();
        let h = h_full(10.0, &params);
        // <-,1| H |+,0> = k: row index 1, column index 2.
        assert_relative_eq!(h.get(1, 2).re, params.k, max_relative = 1e-15);
        assert!(h.is_hermitian(1e-14));
    }

    #[test]
    fn h_full_spectrum_against_jacobi() {
        // With g = 0 the exchange block diagonalizes in closed form:
        // the |-,1>, |+,0> pair mixes with gap sqrt((2B - omega)^2 + 4 k^2).
        let params = EngineParams {
            g: 0.0,
            ..EngineParams::default()
        };
        let b = 10.0;
        let h = h_full(b, &params);
        let values = eigvalsh4(&h).unwrap();
        let delta = 2.0 * b - params.omega;
        let split = (delta * delta + 4.0 * params.k * params.k).sqrt();
        let mid = 0.5 * (-b + params.omega + b);
        let mut expected = vec![
            -b,
            b + params.omega,
            mid - 0.5 * split,
            mid + 0.5 * split,
        ];
        expected.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (e, v) in expected.iter().zip(values.iter()) {
            assert_relative_eq!(*e, *v, max_relative = 1e-12);
        }
    }

    #[test]
    fn rhs_is_traceless_and_hermiticity_preserving() {
        let params = EngineParams::default();
        let gen = LindbladGenerator::new(&params, FieldProfile::Fixed(params.b_high), true);
        let psi = [
            C64::new(0.3, 0.1),
            C64::new(0.4, -0.2),
            C64::new(0.5, 0.0),
            C64::new(0.1, 0.6),
        ];
        let rho = DensityMatrix::from_pure(&psi, StateLabel::Joint).unwrap();
        let d = gen.rhs(0.0, rho.matrix());
        assert!(d.trace().norm() < 1e-14);
        assert!(d.is_hermitian(1e-14));
    }

    #[test]
    fn dissipator_balance_fixes_the_detailed_ratio() {
        // With g = k = 0 the electronic state with populations in the ratio
        // n_th/(n_th + 1) is stationary.
        let params = EngineParams {
            g: 0.0,
            k: 0.0,
            ..EngineParams::default()
        };
        let p_plus = params.n_th / (2.0 * params.n_th + 1.0);
        let e = DensityMatrix::from_populations(&[1.0 - p_plus, p_plus], StateLabel::Electronic)
            .unwrap();
        let v = DensityMatrix::from_populations(&[1.0, 0.0], StateLabel::Vibrational).unwrap();
        let rho = DensityMatrix::product(&e, &v).unwrap();
        let gen = LindbladGenerator::new(&params, FieldProfile::Fixed(params.b_high), true);
        let d = gen.rhs(0.0, rho.matrix());
        assert!(d.max_abs() < 1e-14);
    }

    #[test]
    fn gamma_zero_reduces_to_commutator() {
        let params = EngineParams {
            gamma: 0.0,
            ..EngineParams::default()
        };
        let gen = LindbladGenerator::new(&params, FieldProfile::Fixed(7.0), true);
        let rho = DensityMatrix::maximally_mixed(StateLabel::Joint);
        // I/4 commutes with everything: rhs must vanish identically.
        let d = gen.rhs(0.0, rho.matrix());
        assert!(d.max_abs() < 1e-15);
    }

    #[test]
    fn adiabatic_bound_values() {
        let params = EngineParams::default();
        let bound = adiabatic_time_bound(&params).unwrap();
        assert_relative_eq!(bound, 7.5e-4, max_relative = 1e-12);

        let equal = EngineParams {
            b_low: 10.0,
            ..EngineParams::default()
        };
        assert_relative_eq!(adiabatic_time_bound(&equal).unwrap(), 0.0, epsilon = 1e-15);

        let zero_field = EngineParams {
            b_low: 0.0,
            ..EngineParams::default()
        };
        assert!(adiabatic_time_bound(&zero_field).is_err());
    }

    #[test]
    fn effective_temperature_values() {
        assert_relative_eq!(
            effective_temperature(0.02, 1.0).unwrap(),
            1.0 / 51.0f64.ln(),
            max_relative = 1e-12
        );
        // n_bar = 1/(e - 1) gives T = omega exactly.
        let n = 1.0 / (std::f64::consts::E - 1.0);
        assert_relative_eq!(effective_temperature(n, 1.0).unwrap(), 1.0, max_relative = 1e-12);
        assert!(effective_temperature(0.0, 1.0).is_err());
        assert!(effective_temperature(-0.1, 1.0).is_err());
    }

    #[test]
    fn effective_temperature_increases_with_occupation() {
        let t1 = effective_temperature(0.01, 1.0).unwrap();
        let t2 = effective_temperature(0.02, 1.0).unwrap();
        let t3 = effective_temperature(0.5, 1.0).unwrap();
        assert!(t1 < t2 && t2 < t3);
    }
}
