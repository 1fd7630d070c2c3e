//! Distance from complete positivity and the minimal completely positive lift.
//!
//! For a Hermitian map `Φ` with Choi matrix `C`, the distance is
//! `d(Φ) = max(0, -lambda_min(C))`: the smallest `k >= 0` for which
//! `Φ + k tr(.) I` becomes completely positive, equivalently the operator norm
//! of the negative part of `C`. It vanishes exactly on completely positive maps.

use rand::Rng;

use crate::linalg::{
    random_hermitian_contraction, random_unitary, tensor_product, ComplexMatrix, HermitianMatrix,
};
use crate::map::{trial_rng, HermitianMap};
use crate::{tol, Error, Result};

/// Distance from complete positivity: `max(0, -lambda_min(C))`, unclamped by
/// any tolerance so that exact zeros are reported only for genuinely PSD spectra.
pub fn cp_distance(phi: &HermitianMap) -> Result<f64> {
    Ok((-phi.choi().lambda_min()?).max(0.0))
}

/// Minimal completely positive lift of a Hermitian map.
#[derive(Clone, Debug)]
pub struct LiftResult {
    /// Smallest `k >= 0` such that `Φ + k tr(.) I` is completely positive.
    pub shift: f64,
    /// The lifted map; its Choi matrix is `C + shift * I`.
    pub lifted: HermitianMap,
    /// Smallest Choi eigenvalue of the original map.
    pub lambda_min: f64,
}

/// Shifts the map by `d(Φ) * tr(.) I`, the least trace-multiple that reaches
/// complete positivity; the lifted Choi matrix has smallest eigenvalue zero
/// (up to arithmetic rounding) whenever the input was not completely positive.
pub fn cp_lift(phi: &HermitianMap) -> Result<LiftResult> {
    let lambda_min = phi.choi().lambda_min()?;
    let shift = (-lambda_min).max(0.0);
    let lifted_choi = phi.choi().add_scaled_identity(shift);
    let lifted = HermitianMap::from_choi(phi.input_dim(), phi.output_dim(), lifted_choi)?;
    Ok(LiftResult {
        shift,
        lifted,
        lambda_min,
    })
}

/// Certifies minimality of the lift: for `0 < epsilon < d(Φ)` the smaller shift
/// `d - epsilon` must fail, and the returned `lambda_min(C + (d - epsilon) I)`,
/// equal to `-epsilon` up to rounding, exhibits the failure.
pub fn lift_minimality_witness(phi: &HermitianMap, epsilon: f64) -> Result<f64> {
    if phi.is_cp()? {
        return Err(Error::CompletelyPositive(
            "minimality witness requires a map that is not completely positive".into(),
        ));
    }
    let d = cp_distance(phi)?;
    if !(epsilon > 0.0 && epsilon < d) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie strictly between 0 and the distance {d:.6e}"
        )));
    }
    phi.choi().add_scaled_identity(d - epsilon).lambda_min()
}

/// Completely bounded distance between a map and its minimal lift.
#[derive(Clone, Debug)]
pub struct DiamondBound {
    /// `input_dim * d(Φ)`: the completely bounded norm of `Φ - lift(Φ)`.
    pub bound: f64,
    /// Identity on the doubled input space `C^m ⊗ C^m`, which attains the bound.
    pub achieving_input: ComplexMatrix,
}

/// The difference between `Φ` and its minimal lift is `-d(Φ) tr(.) I`, whose
/// completely bounded norm is exactly `m * d(Φ)`, attained at the identity.
pub fn diamond_bound(phi: &HermitianMap) -> Result<DiamondBound> {
    let m = phi.input_dim();
    Ok(DiamondBound {
        bound: m as f64 * cp_distance(phi)?,
        achieving_input: ComplexMatrix::identity(m * m),
    })
}

/// Monte-Carlo lower bound on the completely bounded distance to the minimal
/// lift: evaluates `||(id_m ⊗ (Φ - lift))(X)||` over a sample set of operator-norm
/// contractions that always contains the identity, so the exact bound is attained.
pub fn sampled_diamond_lower(phi: &HermitianMap, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "diamond sampling needs at least one trial".into(),
        ));
    }
    let m = phi.input_dim();
    let theta = phi.sub(&cp_lift(phi)?.lifted)?;
    let mut best: f64 = 0.0;
    for t in 0..trials {
        let x = if t == 0 {
            ComplexMatrix::identity(m * m)
        } else {
            random_hermitian_contraction(m * m, &mut trial_rng(seed, t as u64)).into_matrix()
        };
        best = best.max(theta.apply_extended(m, &x)?.operator_norm()?);
    }
    Ok(best)
}

/// Structural properties of the distance checked by randomized verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapProperty {
    /// `d(Φ + Ψ) <= d(Φ) + d(Ψ)`.
    Subadditivity,
    /// `d(alpha Φ) = alpha d(Φ)` for `alpha >= 0`.
    Homogeneity,
    /// `d(t Φ + (1-t) Ψ) <= t d(Φ) + (1-t) d(Ψ)` for `t in [0,1]`.
    Convexity,
    /// `d(U Φ(.) U*) = d(Φ)` for unitary `U` on the output space.
    UnitaryInvariance,
}

impl MapProperty {
    pub fn label(&self) -> &'static str {
        match self {
            MapProperty::Subadditivity => "SUBADDITIVITY",
            MapProperty::Homogeneity => "HOMOGENEITY",
            MapProperty::Convexity => "CONVEXITY",
            MapProperty::UnitaryInvariance => "UNITARY_INVARIANCE",
        }
    }
}

/// Worst observed violation of a distance property over randomized trials.
#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub property: MapProperty,
    pub input_dim: usize,
    pub output_dim: usize,
    pub trials: usize,
    pub max_violation: f64,
    pub pass: bool,
}

/// Conjugates the output of a map by a unitary; the Choi matrix transforms as
/// `(I ⊗ U) C (I ⊗ U)*`, so the spectrum (hence the distance) is unchanged.
pub fn conjugate_output(phi: &HermitianMap, u: &ComplexMatrix) -> Result<HermitianMap> {
    if u.rows() != phi.output_dim() || u.cols() != phi.output_dim() {
        return Err(Error::DimensionMismatch {
            context: "output conjugation",
            expected: phi.output_dim(),
            got: u.rows().max(u.cols()),
        });
    }
    let w = tensor_product(&ComplexMatrix::identity(phi.input_dim()), u);
    let rotated = &(&w * phi.choi().matrix()) * &w.adjoint();
    HermitianMap::from_choi(
        phi.input_dim(),
        phi.output_dim(),
        HermitianMatrix::new(rotated)?,
    )
}

/// Samples random Hermitian maps and measures the largest violation of the
/// requested property; equalities are checked two-sided, inequalities one-sided.
pub fn verify_property(
    property: MapProperty,
    input_dim: usize,
    output_dim: usize,
    trials: usize,
    seed: u64,
) -> Result<PropertyReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "property verification needs at least one trial".into(),
        ));
    }
    let mut max_violation: f64 = 0.0;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let phi = HermitianMap::random_hermitian_with(input_dim, output_dim, &mut rng)?;
        let violation = match property {
            MapProperty::Subadditivity => {
                let psi = HermitianMap::random_hermitian_with(input_dim, output_dim, &mut rng)?;
                cp_distance(&phi.add(&psi)?)? - cp_distance(&phi)? - cp_distance(&psi)?
            }
            MapProperty::Homogeneity => {
                let alpha: f64 = rng.random_range(0.0..=4.0);
                (cp_distance(&phi.scale(alpha))? - alpha * cp_distance(&phi)?).abs()
            }
            MapProperty::Convexity => {
                let psi = HermitianMap::random_hermitian_with(input_dim, output_dim, &mut rng)?;
                let t_mix: f64 = rng.random_range(0.0..=1.0);
                let mixed = phi.scale(t_mix).add(&psi.scale(1.0 - t_mix))?;
                cp_distance(&mixed)?
                    - t_mix * cp_distance(&phi)?
                    - (1.0 - t_mix) * cp_distance(&psi)?
            }
            MapProperty::UnitaryInvariance => {
                let u = random_unitary(output_dim, &mut rng);
                (cp_distance(&conjugate_output(&phi, &u)?)? - cp_distance(&phi)?).abs()
            }
        };
        max_violation = max_violation.max(violation.max(0.0));
    }
    Ok(PropertyReport {
        property,
        input_dim,
        output_dim,
        trials,
        max_violation,
        pass: max_violation <= tol::PROPERTY_PASS_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn transpose_distance_and_lift() {
        let t = HermitianMap::transpose(2).unwrap();
        let d = cp_distance(&t).unwrap();
        assert!((d - 1.0).abs() < 1e-12);

        let lift = cp_lift(&t).unwrap();
        assert!((lift.shift - 1.0).abs() < 1e-12);
        assert!((lift.lambda_min - (-1.0)).abs() < 1e-12);
        assert!(lift.lifted.choi().lambda_min().unwrap().abs() < 1e-12);
        assert!(lift.lifted.is_cp().unwrap());
    }

    #[test]
    fn lift_shifts_the_choi_matrix_by_a_scaled_identity() {
        let phi = HermitianMap::random_hermitian(2, 3, 12).unwrap();
        let lift = cp_lift(&phi).unwrap();
        let diff = lift.lifted.choi().matrix() - phi.choi().matrix();
        let expected = ComplexMatrix::identity(6).scale(lift.shift);
        assert!((&diff - &expected).frobenius_norm() < 1e-12 * lift.shift.max(1.0));
        assert!(lift.lifted.choi().lambda_min().unwrap() >= -lift.lifted.psd_slack().unwrap());
    }

    #[test]
    fn minimality_witness_reports_minus_epsilon() {
        let t = HermitianMap::transpose(2).unwrap();
        let witnessed = lift_minimality_witness(&t, 0.25).unwrap();
        assert!((witnessed - (-0.25)).abs() < 1e-12);

        assert!(matches!(
            lift_minimality_witness(&t, 0.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            lift_minimality_witness(&t, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        let id = HermitianMap::identity(2).unwrap();
        assert!(matches!(
            lift_minimality_witness(&id, 0.1),
            Err(Error::CompletelyPositive(_))
        ));
    }

    #[test]
    fn depolarizing_distance_past_threshold() {
        let phi = HermitianMap::depolarizing(2, 1.5).unwrap();
        assert!((cp_distance(&phi).unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(cp_distance(&HermitianMap::depolarizing(2, 1.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn diamond_bound_of_transpose_is_the_dimension() {
        let t = HermitianMap::transpose(2).unwrap();
        let bound = diamond_bound(&t).unwrap();
        assert!((bound.bound - 2.0).abs() < 1e-12);
        assert_eq!(bound.achieving_input, ComplexMatrix::identity(4));

        // The identity sample attains the bound exactly.
        let sampled = sampled_diamond_lower(&t, 10, 3).unwrap();
        assert!((sampled - 2.0).abs() < 1e-10);
    }

    #[test]
    fn diamond_quantities_vanish_on_cp_maps() {
        let phi = HermitianMap::random_cp(2, 2, 5).unwrap();
        assert_eq!(diamond_bound(&phi).unwrap().bound, 0.0);
        assert!(sampled_diamond_lower(&phi, 5, 0).unwrap() < 1e-12);
    }

    #[test]
    fn distance_scales_linearly_under_nonnegative_scaling() {
        let t = HermitianMap::transpose(2).unwrap();
        assert!((cp_distance(&t.scale(2.0)).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(cp_distance(&t.scale(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn all_four_properties_verify_on_small_dimensions() {
        for property in [
            MapProperty::Subadditivity,
            MapProperty::Homogeneity,
            MapProperty::Convexity,
            MapProperty::UnitaryInvariance,
        ] {
            let report = verify_property(property, 2, 2, 100, 11).unwrap();
            assert!(
                report.pass,
                "{} violated by {:.3e}",
                property.label(),
                report.max_violation
            );
        }
    }

    #[test]
    fn output_conjugation_validates_unitary_dimensions() {
        let phi = HermitianMap::random_hermitian(2, 3, 2).unwrap();
        let wrong = ComplexMatrix::identity(2);
        assert!(conjugate_output(&phi, &wrong).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// The distance is nonnegative and vanishes exactly on CP maps.
        #[test]
        fn distance_is_nonnegative_and_detects_cp(seed in 0u64..500) {
            let phi = HermitianMap::random_hermitian(2, 2, seed).unwrap();
            let d = cp_distance(&phi).unwrap();
            prop_assert!(d >= 0.0);
            if d == 0.0 {
                prop_assert!(phi.is_cp().unwrap());
            }
            let cp = HermitianMap::random_cp(2, 2, seed).unwrap();
            prop_assert!(cp_distance(&cp).unwrap() <= cp.psd_slack().unwrap());
        }

        /// Lifting is idempotent in distance: the lifted map has distance ~ 0.
        #[test]
        fn lifted_maps_have_negligible_distance(seed in 0u64..500) {
            let phi = HermitianMap::random_hermitian(2, 3, seed).unwrap();
            let lift = cp_lift(&phi).unwrap();
            prop_assert!(cp_distance(&lift.lifted).unwrap() <= lift.lifted.psd_slack().unwrap());
        }
    }
}
