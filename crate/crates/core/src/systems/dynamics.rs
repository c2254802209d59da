use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::KinematicSystem;
use crate::error::{Error, Result};
use crate::model::{singular_value_range, BlockLayout, RANK_TOLERANCE};
use crate::scalar::{fd_step, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoriolisMode {
    Zero,
    #[default]
    Christoffel,
}

/// Point-mass agents plus an inertia block on the load coordinates:
/// `M(q) = A_q^T Lambda A_q + S^T M_L S`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicParams<T: Scalar> {
    agent_masses: Vec<T>,
    load_inertia: DMatrix<T>,
    pub coriolis: CoriolisMode,
    lambda: DVector<T>,
}

impl<T: Scalar> DynamicParams<T> {
    /// `agent_masses` has one entry per agent; `load_inertia` is `m_L x m_L`,
    /// symmetric and positive semi-definite.
    pub fn new(
        layout: &BlockLayout,
        agent_masses: Vec<T>,
        load_inertia: DMatrix<T>,
        coriolis: CoriolisMode,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        if agent_masses.len() != layout.num_agents() {
            problems.push(format!(
                "expected {} agent masses, got {}",
                layout.num_agents(),
                agent_masses.len()
            ));
        }
        if agent_masses.iter().any(|&m| !(m > T::zero())) {
            problems.push("agent masses must be positive".into());
        }
        let ml = layout.load_dim();
        if load_inertia.shape() != (ml, ml) {
            problems.push(format!("load inertia must be {ml}x{ml}, got {:?}", load_inertia.shape()));
        } else {
            let asym = (&load_inertia - load_inertia.transpose()).amax();
            if asym > T::lit(1e-12) * (T::one() + load_inertia.amax()) {
                problems.push("load inertia must be symmetric".into());
            }
            if ml > 0 && load_inertia.symmetric_eigenvalues().min() < T::zero() {
                problems.push("load inertia must be positive semi-definite".into());
            }
        }
        if !problems.is_empty() {
            return Err(Error::InvalidConfig(problems));
        }
        let mut lambda = Vec::with_capacity(layout.n());
        for (i, &mass) in agent_masses.iter().enumerate() {
            lambda.extend(std::iter::repeat_n(mass, layout.agent_pos_dims()[i]));
        }
        Ok(Self {
            agent_masses,
            load_inertia,
            coriolis,
            lambda: DVector::from_vec(lambda),
        })
    }

    /// Equal agent masses and a diagonal load inertia.
    pub fn uniform(layout: &BlockLayout, agent_mass: T, load_diag: &[T], coriolis: CoriolisMode) -> Result<Self> {
        Self::new(
            layout,
            vec![agent_mass; layout.num_agents()],
            DMatrix::from_diagonal(&DVector::from_column_slice(load_diag)),
            coriolis,
        )
    }

    pub fn agent_masses(&self) -> &[T] {
        &self.agent_masses
    }

    pub fn load_inertia(&self) -> &DMatrix<T> {
        &self.load_inertia
    }

    /// Diagonal of `Lambda` (one entry per workspace coordinate).
    pub fn agent_mass_diagonal(&self) -> &DVector<T> {
        &self.lambda
    }

    fn assemble<S: KinematicSystem<T> + ?Sized>(&self, sys: &S, a: &DMatrix<T>) -> DMatrix<T> {
        let mut weighted = a.clone();
        for (r, &mass) in self.lambda.iter().enumerate() {
            weighted.row_mut(r).scale_mut(mass);
        }
        let mut m = a.transpose() * weighted;
        let load = sys.layout().load_range();
        let mut block = m.view_mut((load.start, load.start), (load.len(), load.len()));
        block += &self.load_inertia;
        m
    }

    fn inertia_unchecked<S: KinematicSystem<T> + ?Sized>(&self, sys: &S, q: &DVector<T>) -> Result<DMatrix<T>> {
        let a = sys.jacobian(q)?.into_dense();
        Ok(self.assemble(sys, &a))
    }
}

/// Joint-space inertia `M(q)`; fails if `A_q` loses column rank.
pub fn mass_matrix<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    params: &DynamicParams<T>,
    q: &DVector<T>,
) -> Result<DMatrix<T>> {
    let a = sys.jacobian(q)?.into_dense();
    let (lo, hi) = singular_value_range(&a);
    if !(lo >= T::lit(RANK_TOLERANCE) * hi) || hi == T::zero() {
        return Err(Error::Singular {
            sigma_min: lo.as_f64(),
            sigma_max: hi.as_f64(),
        });
    }
    Ok(params.assemble(sys, &a))
}

/// Coriolis/centripetal matrix from Christoffel symbols of `M`, with
/// `dM/dq_k` by central differences.
pub fn coriolis_matrix<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    params: &DynamicParams<T>,
    q: &DVector<T>,
    qdot: &DVector<T>,
) -> Result<DMatrix<T>> {
    let m = sys.layout().m();
    if params.coriolis == CoriolisMode::Zero {
        return Ok(DMatrix::zeros(m, m));
    }
    let mut partials = Vec::with_capacity(m);
    for k in 0..m {
        let h = fd_step(q[k]);
        let mut qp = q.clone();
        let mut qm = q.clone();
        qp[k] += h;
        qm[k] -= h;
        let dm = (params.inertia_unchecked(sys, &qp)? - params.inertia_unchecked(sys, &qm)?) / (h + h);
        partials.push(dm);
    }
    let half = T::lit(0.5);
    let mdot: DMatrix<T> = partials
        .iter()
        .zip(qdot.iter())
        .fold(DMatrix::zeros(m, m), |acc, (dm, &v)| acc + dm * v);
    let mut c = mdot * half;
    for i in 0..m {
        for j in 0..m {
            let mut s = T::zero();
            for k in 0..m {
                s += (partials[j][(i, k)] - partials[i][(j, k)]) * qdot[k];
            }
            c[(i, j)] += half * s;
        }
    }
    Ok(c)
}
