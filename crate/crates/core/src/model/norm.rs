use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::BlockLayout;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Two,
    Inf,
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two" | "2" => Ok(NormKind::Two),
            "inf" | "infinity" => Ok(NormKind::Inf),
            other => Err(Error::InvalidConfig(vec![format!("unknown norm `{other}` (use two|inf)")])),
        }
    }
}

/// How block weights `d_i` turn into per-entry scales.
///
/// `Matrix` uses `D_i = I / d_i^2` for both norms. `Expanded` reproduces the
/// per-block sums written out for the weighted norms: `1/d_i` inside the
/// 2-norm and `1/d_i^2` inside the infinity norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightConvention {
    #[default]
    Matrix,
    Expanded,
}

/// `||e||_{D,kind} = ||D e||_kind` with `D` block diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNorm<T: Scalar> {
    weights: Vec<T>,
    kind: NormKind,
    convention: WeightConvention,
    scale: DVector<T>,
}

impl<T: Scalar> WeightedNorm<T> {
    pub fn new(layout: &BlockLayout, weights: Vec<T>, kind: NormKind) -> Result<Self> {
        Self::with_convention(layout, weights, kind, WeightConvention::Matrix)
    }

    /// All weights equal to one.
    pub fn unweighted(layout: &BlockLayout, kind: NormKind) -> Self {
        Self::new(layout, vec![T::one(); layout.num_blocks()], kind).expect("unit weights are valid")
    }

    pub fn with_convention(
        layout: &BlockLayout,
        weights: Vec<T>,
        kind: NormKind,
        convention: WeightConvention,
    ) -> Result<Self> {
        if let Some(bad) = weights.iter().find(|&&d| !(d >= T::one())) {
            return Err(Error::InvalidConfig(vec![format!(
                "norm weights must satisfy d_i >= 1, got {bad}"
            )]));
        }
        let per_block: Vec<T> = weights
            .iter()
            .map(|&d| match (convention, kind) {
                (WeightConvention::Expanded, NormKind::Two) => T::one() / d,
                _ => T::one() / (d * d),
            })
            .collect();
        let scale = DVector::from_vec(layout.expand_blocks(&per_block)?);
        Ok(Self {
            weights,
            kind,
            convention,
            scale,
        })
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    pub fn convention(&self) -> WeightConvention {
        self.convention
    }

    /// Block weights `d_1, .., d_N, d_L`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Diagonal of `D`, one entry per coordinate of `q`.
    pub fn scale(&self) -> &DVector<T> {
        &self.scale
    }

    pub fn dim(&self) -> usize {
        self.scale.len()
    }

    /// Panics if `e` does not match the layout; see [`weighted_norm`] for the
    /// fallible variant.
    pub fn norm(&self, e: &DVector<T>) -> T {
        assert_eq!(e.len(), self.scale.len(), "vector length does not match norm layout");
        let scaled = e.zip_map(&self.scale, |x, s| x * s);
        match self.kind {
            NormKind::Two => scaled.norm(),
            NormKind::Inf => scaled.amax(),
        }
    }

    /// Operator norm induced by this vector norm: `||D M D^-1||_kind`.
    pub fn induced_norm(&self, mat: &DMatrix<T>) -> T {
        let (r, c) = mat.shape();
        assert!(r == self.dim() && c == self.dim(), "matrix shape does not match norm layout");
        let mut w = mat.clone();
        for i in 0..r {
            for j in 0..c {
                w[(i, j)] = w[(i, j)] * self.scale[i] / self.scale[j];
            }
        }
        match self.kind {
            NormKind::Inf => w
                .row_iter()
                .map(|row| row.iter().fold(T::zero(), |acc, x| acc + x.abs()))
                .fold(T::zero(), |acc, s| if s > acc { s } else { acc }),
            NormKind::Two => super::singular_value_range(&w).1,
        }
    }
}

pub fn weighted_norm<T: Scalar>(e: &DVector<T>, w: &WeightedNorm<T>) -> Result<T> {
    if e.len() != w.dim() {
        return Err(Error::dim(format!("vector has {} entries, norm expects {}", e.len(), w.dim())));
    }
    Ok(w.norm(e))
}

/// Open ball `{q : ||q - center||_{D,kind} < radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball<T: Scalar> {
    pub center: DVector<T>,
    pub radius: T,
    pub norm: WeightedNorm<T>,
}

impl<T: Scalar> Ball<T> {
    pub fn new(center: DVector<T>, radius: T, norm: WeightedNorm<T>) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::InvalidConfig(vec![format!("ball radius must be positive, got {radius}")]));
        }
        if center.len() != norm.dim() {
            return Err(Error::dim(format!(
                "ball center has {} entries, norm expects {}",
                center.len(),
                norm.dim()
            )));
        }
        Ok(Self { center, radius, norm })
    }

    pub fn error_norm(&self, q: &DVector<T>) -> T {
        self.norm.norm(&(q - &self.center))
    }

    pub fn contains(&self, q: &DVector<T>) -> bool {
        self.error_norm(q) < self.radius
    }

    /// Membership in the closed ball inflated by a relative tolerance.
    pub fn contains_within(&self, q: &DVector<T>, rel_tol: T) -> bool {
        self.error_norm(q) <= self.radius * (T::one() + rel_tol)
    }

    pub fn with_radius(&self, radius: T) -> Result<Self> {
        Self::new(self.center.clone(), radius, self.norm.clone())
    }

    /// Uniform sample of an offset `e` with `center + e` strictly inside the ball.
    pub fn sample_offset<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<T> {
        let m = self.center.len();
        let shrink = 1.0 - 1e-12;
        let unit: Vec<f64> = match self.norm.kind() {
            NormKind::Inf => (0..m).map(|_| shrink * (2.0 * rng.random::<f64>() - 1.0)).collect(),
            NormKind::Two => {
                let g: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
                let len = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                let r = shrink * rng.random::<f64>().powf(1.0 / m as f64);
                g.into_iter().map(|x| r * x / len).collect()
            }
        };
        DVector::from_iterator(
            m,
            unit.into_iter()
                .zip(self.norm.scale().iter())
                .map(|(u, &s)| T::lit(u) * self.radius / s),
        )
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<T> {
        &self.center + self.sample_offset(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn layout() -> BlockLayout {
        BlockLayout::new(vec![1, 2], 2, vec![2, 4]).unwrap()
    }

    #[test]
    fn zero_and_euclidean() {
        let l = BlockLayout::dense(3, 2).unwrap();
        let n = WeightedNorm::<f64>::unweighted(&l, NormKind::Two);
        assert_eq!(n.norm(&DVector::zeros(2)), 0.0);
        assert_relative_eq!(n.norm(&DVector::from_vec(vec![3.0, 4.0])), 5.0);
    }

    #[test]
    fn load_block_weight_inf() {
        let l = BlockLayout::new(vec![1], 1, vec![3]).unwrap();
        let n = WeightedNorm::new(&l, vec![1.0, 2.0], NormKind::Inf).unwrap();
        assert_relative_eq!(n.norm(&DVector::from_vec(vec![0.0, 4.0])), 1.0);
    }

    #[test]
    fn expanded_convention_uses_linear_weight_in_two_norm() {
        let l = BlockLayout::new(vec![1], 1, vec![3]).unwrap();
        let e = DVector::from_vec(vec![0.0, 4.0]);
        let two = WeightedNorm::with_convention(&l, vec![1.0, 2.0], NormKind::Two, WeightConvention::Expanded).unwrap();
        assert_relative_eq!(two.norm(&e), 2.0);
        let inf = WeightedNorm::with_convention(&l, vec![1.0, 2.0], NormKind::Inf, WeightConvention::Expanded).unwrap();
        assert_relative_eq!(inf.norm(&e), 1.0);
        let mat = WeightedNorm::new(&l, vec![1.0, 2.0], NormKind::Two).unwrap();
        assert_relative_eq!(mat.norm(&e), 1.0);
    }

    #[test]
    fn weights_below_one_rejected() {
        assert!(WeightedNorm::<f64>::new(&layout(), vec![1.0, 0.5, 1.0], NormKind::Two).is_err());
        assert!(WeightedNorm::<f64>::new(&layout(), vec![1.0, 1.0], NormKind::Two).is_err());
        assert!(weighted_norm(&DVector::zeros(3), &WeightedNorm::<f64>::unweighted(&layout(), NormKind::Inf)).is_err());
    }

    #[test]
    fn induced_norm_of_diagonal_ignores_weights() {
        let n = WeightedNorm::new(&layout(), vec![1.0, 3.0, 2.0], NormKind::Inf).unwrap();
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, -2.0, 1.0, 0.1, 0.0]));
        assert_relative_eq!(n.induced_norm(&d), 2.0);
        let n2 = WeightedNorm::new(&layout(), vec![1.0, 3.0, 2.0], NormKind::Two).unwrap();
        assert_relative_eq!(n2.induced_norm(&d), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn induced_norm_bounds_vector_ratio() {
        let n = WeightedNorm::new(&layout(), vec![1.0, 3.0, 2.0], NormKind::Inf).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DMatrix::from_fn(5, 5, |_, _| rng.random::<f64>() - 0.5);
        let bound = n.induced_norm(&a);
        for _ in 0..200 {
            let e = DVector::from_fn(5, |_, _| rng.random::<f64>() - 0.5);
            assert!(n.norm(&(&a * &e)) <= bound * n.norm(&e) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn ball_samples_are_inside() {
        for kind in [NormKind::Two, NormKind::Inf] {
            let n = WeightedNorm::new(&layout(), vec![1.0, 3.0, 2.0], kind).unwrap();
            let ball = Ball::new(DVector::from_element(5, 0.3), 0.2, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..500 {
                assert!(ball.contains(&ball.sample_point(&mut rng)));
            }
        }
    }

    #[test]
    fn ball_rejects_bad_radius() {
        let n = WeightedNorm::<f64>::unweighted(&layout(), NormKind::Two);
        assert!(Ball::new(DVector::zeros(5), 0.0, n.clone()).is_err());
        assert!(Ball::new(DVector::zeros(4), 1.0, n).is_err());
    }

    proptest! {
        #[test]
        fn norm_axioms(
            e in proptest::collection::vec(-10.0f64..10.0, 5),
            f in proptest::collection::vec(-10.0f64..10.0, 5),
            lambda in -5.0f64..5.0,
            w in proptest::collection::vec(1.0f64..4.0, 3),
            inf in any::<bool>(),
        ) {
            let kind = if inf { NormKind::Inf } else { NormKind::Two };
            let n = WeightedNorm::new(&layout(), w, kind).unwrap();
            let (e, f) = (DVector::from_vec(e), DVector::from_vec(f));
            let ne = n.norm(&e);
            prop_assert!((n.norm(&(&e * lambda)) - lambda.abs() * ne).abs() <= 1e-12 * (1.0 + ne));
            prop_assert!(n.norm(&(&e + &f)) <= ne + n.norm(&f) + 1e-12);
        }
    }
}
