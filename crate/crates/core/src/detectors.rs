//! Detector bank for a target that may occupy only part of the pulse train.
//!
//! Two families share the per-pulse adaptive matched filter (AMF) statistics
//! `t_i = |z_i† S⁻¹ v|² / (v† S⁻¹ v)` with `S = R R†`:
//!
//! * the *two-step* GIC selector, `min −K Σ_{i∈Ω} t_i + (1+ρ)(h+1)`, and the
//!   one-stage detector obtained by maximizing its negation;
//! * the *joint* GIC selector built on the maximum-likelihood covariance
//!   `M̂_{l,h}` estimated from `[Z R]`, `min 2(N_p+K) log det M̂_{l,h} + (1+ρ)(2(h+1)+N_a²)`,
//!   and its one-stage counterpart.
//!
//! All argmin/argmax searches run over the `N_p(N_p+1)/2` supports in
//! lexicographic order and keep the first optimum, so ties resolve to the
//! smallest `l`, then the smallest `h`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, HermitianPd};
use crate::scalar::Real;
use crate::scenario::SupportHypothesis;

/// Per-pulse AMF statistics and their running sums.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStatistics<T> {
    t: Vec<T>,
    prefix: Vec<T>,
}

impl<T: Real> CellStatistics<T> {
    pub fn new(t: Vec<T>) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::InvalidData("need at least one pulse".into()));
        }
        if !t.iter().all(|x| *x >= T::zero() && x.is_finite()) {
            return Err(Error::InvalidData(
                "cell statistics must be finite and non-negative".into(),
            ));
        }
        let mut prefix = Vec::with_capacity(t.len() + 1);
        let mut acc = T::zero();
        prefix.push(acc);
        for &x in &t {
            acc += x;
            prefix.push(acc);
        }
        Ok(Self { t, prefix })
    }

    #[inline]
    pub fn n_pulses(&self) -> usize {
        self.t.len()
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.t
    }

    /// `prefix[i] = t_1 + … + t_i`, with `prefix[0] = 0`.
    #[inline]
    pub fn prefix(&self) -> &[T] {
        &self.prefix
    }

    /// `Σ_{i=l}^{l+h} t_i`
    #[inline]
    pub fn window_sum(&self, support: SupportHypothesis) -> T {
        self.prefix[support.l() + support.h()] - self.prefix[support.l() - 1]
    }

    #[inline]
    pub fn total(&self) -> T {
        self.prefix[self.t.len()]
    }
}

fn check_shapes<T: Real>(
    z: &ComplexMatrix<T>,
    r: Option<&ComplexMatrix<T>>,
    v: &ComplexVector<T>,
) -> Result<()> {
    let n_a = v.dim();
    if z.rows() != n_a {
        return Err(Error::DimensionMismatch {
            expected: n_a,
            found: z.rows(),
        });
    }
    if let Some(r) = r {
        if r.rows() != n_a {
            return Err(Error::DimensionMismatch {
                expected: n_a,
                found: r.rows(),
            });
        }
        if r.cols() < n_a {
            return Err(Error::InsufficientTraining {
                n_training: r.cols(),
                n_antennas: n_a,
            });
        }
    }
    if !(v.norm_sqr() > T::zero()) {
        return Err(Error::InvalidData("steering vector must be nonzero".into()));
    }
    Ok(())
}

/// `|z_i† W⁻¹ v|² / (v† W⁻¹ v)` for every column of `z`, for a given weighting matrix `W`.
pub fn matched_filter_statistics<T: Real>(
    weight: &HermitianPd<T>,
    z: &ComplexMatrix<T>,
    v: &ComplexVector<T>,
) -> Result<CellStatistics<T>> {
    check_shapes(z, None, v)?;
    let wv = weight.whiten(v)?;
    let denom = wv.norm_sqr();
    let mut col = vec![Complex::new(T::zero(), T::zero()); z.rows()];
    let t = (0..z.cols())
        .map(|j| {
            for (i, c) in col.iter_mut().enumerate() {
                *c = z[(i, j)];
            }
            weight.whiten_in_place(&mut col);
            let mut acc = Complex::new(T::zero(), T::zero());
            for (a, b) in col.iter().zip(wv.as_slice()) {
                acc += a.conj() * b;
            }
            acc.norm_sqr() / denom
        })
        .collect();
    CellStatistics::new(t)
}

/// AMF statistics with `S = R R†`, factored once.
pub fn amf_cell_statistics<T: Real>(
    z: &ComplexMatrix<T>,
    r: &ComplexMatrix<T>,
    v: &ComplexVector<T>,
) -> Result<CellStatistics<T>> {
    check_shapes(z, Some(r), v)?;
    let s = HermitianPd::new(r.gram())?;
    matched_filter_statistics(&s, z, v)
}

/// `p_1(h, ρ) = (1+ρ)(h+1)`
#[inline]
pub fn penalty_two_step<T: Real>(h: usize, rho: T) -> T {
    (T::one() + rho) * T::from_count(h + 1)
}

/// `p_2(h, ρ) = (1+ρ)(2(h+1) + N_a²)`
#[inline]
pub fn penalty_joint<T: Real>(h: usize, rho: T, n_antennas: usize) -> T {
    (T::one() + rho) * T::from_count(2 * (h + 1) + n_antennas * n_antennas)
}

/// Outcome of a model-order search.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult<T> {
    pub support: SupportHypothesis,
    pub objective: T,
    /// Objective of every candidate, in lexicographic order, when requested.
    pub per_candidate: Option<Vec<(SupportHypothesis, T)>>,
}

/// Statistic of one detector on one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorOutput<T> {
    pub statistic: T,
    pub support: Option<SupportHypothesis>,
    pub decision: Option<bool>,
}

impl<T: Real> DetectorOutput<T> {
    fn new(statistic: T, support: Option<SupportHypothesis>) -> Self {
        Self {
            statistic,
            support,
            decision: None,
        }
    }

    /// Declares a detection when the statistic exceeds `threshold`.
    pub fn with_threshold(mut self, threshold: T) -> Self {
        self.decision = Some(self.statistic > threshold);
        self
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Min,
    Max,
}

fn search<T: Real>(
    n_pulses: usize,
    goal: Goal,
    keep_table: bool,
    mut objective: impl FnMut(SupportHypothesis) -> Result<T>,
) -> Result<SelectionResult<T>> {
    let mut best: Option<(SupportHypothesis, T)> = None;
    let mut table = keep_table.then(|| Vec::with_capacity(n_pulses * (n_pulses + 1) / 2));
    for cand in SupportHypothesis::candidates(n_pulses) {
        let value = objective(cand)?;
        if !value.is_finite() {
            return Err(Error::InvalidData(format!(
                "non-finite objective at support {cand}"
            )));
        }
        let better = match best {
            None => true,
            Some((_, b)) => match goal {
                Goal::Min => value < b,
                Goal::Max => value > b,
            },
        };
        if better {
            best = Some((cand, value));
        }
        if let Some(t) = table.as_mut() {
            t.push((cand, value));
        }
    }
    let (support, objective) = best.expect("at least one candidate");
    Ok(SelectionResult {
        support,
        objective,
        per_candidate: table,
    })
}

/// Two-step GIC objective `−K Σ_{i∈Ω} t_i + p_1(h, ρ)` of one support.
#[inline]
pub fn gic_two_step_objective<T: Real>(
    stats: &CellStatistics<T>,
    n_training: usize,
    rho: T,
    support: SupportHypothesis,
) -> T {
    -T::from_count(n_training) * stats.window_sum(support) + penalty_two_step(support.h(), rho)
}

/// Two-step GIC selection over all supports, using prefix sums.
pub fn gic_two_step_select<T: Real>(
    stats: &CellStatistics<T>,
    n_training: usize,
    rho: T,
) -> SelectionResult<T> {
    search(stats.n_pulses(), Goal::Min, false, |s| {
        Ok(gic_two_step_objective(stats, n_training, rho, s))
    })
    .expect("finite statistics give finite objectives")
}

/// As [`gic_two_step_select`], also returning the full candidate table.
pub fn gic_two_step_table<T: Real>(
    stats: &CellStatistics<T>,
    n_training: usize,
    rho: T,
) -> SelectionResult<T> {
    search(stats.n_pulses(), Goal::Min, true, |s| {
        Ok(gic_two_step_objective(stats, n_training, rho, s))
    })
    .expect("finite statistics give finite objectives")
}

/// Second stage: `Σ_{i=l̂}^{l̂+ĥ} t_i` on the selected support.
pub fn two_stage_detect<T: Real>(
    stats: &CellStatistics<T>,
    selection: &SelectionResult<T>,
) -> DetectorOutput<T> {
    DetectorOutput::new(stats.window_sum(selection.support), Some(selection.support))
}

/// One-stage detector `max_{l,h} K Σ_{i∈Ω} t_i − p_1(h, ρ)`.
pub fn one_stage_gic_amf<T: Real>(
    stats: &CellStatistics<T>,
    n_training: usize,
    rho: T,
) -> DetectorOutput<T> {
    let sel = search(stats.n_pulses(), Goal::Max, false, |s| {
        Ok(-gic_two_step_objective(stats, n_training, rho, s))
    })
    .expect("finite statistics give finite objectives");
    DetectorOutput::new(sel.objective, Some(sel.support))
}

/// Generalized AMF: sum of the AMF statistics over every pulse.
pub fn gamf<T: Real>(stats: &CellStatistics<T>) -> DetectorOutput<T> {
    DetectorOutput::new(stats.total(), None)
}

/// Non-adaptive bound: matched filter with the true covariance on the true support.
pub fn clairvoyant<T: Real>(
    z: &ComplexMatrix<T>,
    covariance: &HermitianPd<T>,
    v: &ComplexVector<T>,
    truth: SupportHypothesis,
) -> Result<DetectorOutput<T>> {
    if truth.l() + truth.h() > z.cols() {
        return Err(Error::InvalidData(format!(
            "support {truth} exceeds {} pulses",
            z.cols()
        )));
    }
    let stats = matched_filter_statistics(covariance, z, v)?;
    Ok(DetectorOutput::new(stats.window_sum(truth), Some(truth)))
}

/// Shared precomputation for the joint-likelihood selector: `R R†` and prefix /
/// suffix sums of the snapshot outer products, so that
/// `S_{l,h} = R R† + Σ_{i∉Ω} z_i z_i†` is assembled without cancellation.
#[derive(Debug, Clone)]
pub struct JointGic<T> {
    columns: Vec<ComplexVector<T>>,
    steering: ComplexVector<T>,
    training_gram: ComplexMatrix<T>,
    before: Vec<ComplexMatrix<T>>,
    after: Vec<ComplexMatrix<T>>,
    n_training: usize,
}

impl<T: Real> JointGic<T> {
    pub fn new(z: &ComplexMatrix<T>, r: &ComplexMatrix<T>, v: &ComplexVector<T>) -> Result<Self> {
        check_shapes(z, Some(r), v)?;
        let n_a = v.dim();
        let n_p = z.cols();
        let columns = z.columns();
        let mut before = Vec::with_capacity(n_p + 1);
        let mut acc = ComplexMatrix::zeros(n_a, n_a);
        before.push(acc.clone());
        for c in &columns {
            acc.add_outer(c.as_slice(), T::one());
            before.push(acc.clone());
        }
        let mut after = vec![ComplexMatrix::zeros(n_a, n_a); n_p + 1];
        for i in (0..n_p).rev() {
            let mut m = after[i + 1].clone();
            m.add_outer(columns[i].as_slice(), T::one());
            after[i] = m;
        }
        Ok(Self {
            columns,
            steering: v.clone(),
            training_gram: r.gram(),
            before,
            after,
            n_training: r.cols(),
        })
    }

    #[inline]
    pub fn n_pulses(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn n_antennas(&self) -> usize {
        self.steering.dim()
    }

    /// `N_p + K`
    #[inline]
    pub fn n_total(&self) -> usize {
        self.n_pulses() + self.n_training
    }

    /// `S_{l,h} = R R† + Σ_{i∉Ω_{l,h}} z_i z_i†`
    pub fn complement_scatter(&self, support: SupportHypothesis) -> ComplexMatrix<T> {
        let idx = support.indices();
        let mut s = self.training_gram.clone();
        s.add_assign(&self.before[*idx.start()]);
        s.add_assign(&self.after[*idx.end() + 1]);
        s
    }

    /// Unnormalized MLE scatter `(N_p+K) M̂_{l,h} = S_{l,h} + Σ_{i∈Ω} (z_i − α̂_i v)(z_i − α̂_i v)†`
    /// together with the amplitude estimates `α̂_i = v† S_{l,h}⁻¹ z_i / v† S_{l,h}⁻¹ v`.
    pub fn mle_scatter(
        &self,
        support: SupportHypothesis,
    ) -> Result<(ComplexMatrix<T>, Vec<Complex<T>>)> {
        let s = HermitianPd::new(self.complement_scatter(support))?;
        let u = s.solve(&self.steering)?;
        let denom = self.steering.dot(&u).re;
        let mut scatter = s.matrix().clone();
        let mut alphas = Vec::with_capacity(support.len());
        let mut resid = ComplexVector::zeros(self.n_antennas());
        for i in support.indices() {
            let z = &self.columns[i];
            let alpha = u.dot(z) / denom;
            resid.as_mut_slice().copy_from_slice(z.as_slice());
            resid.axpy(-alpha, &self.steering);
            scatter.add_outer(resid.as_slice(), T::one());
            alphas.push(alpha);
        }
        Ok((scatter, alphas))
    }

    /// `log det M̂_{l,h}`
    pub fn log_det_mle(&self, support: SupportHypothesis) -> Result<T> {
        let (scatter, _) = self.mle_scatter(support)?;
        let ld = HermitianPd::new(scatter)?.logdet();
        Ok(ld - T::from_count(self.n_antennas()) * T::from_count(self.n_total()).ln())
    }

    /// `log det((R R† + Z Z†) / (N_p + K))`, the target-free covariance MLE.
    pub fn log_det_null(&self) -> Result<T> {
        let mut s = self.training_gram.clone();
        s.add_assign(&self.before[self.n_pulses()]);
        let ld = HermitianPd::new(s)?.logdet();
        Ok(ld - T::from_count(self.n_antennas()) * T::from_count(self.n_total()).ln())
    }

    /// `log det M̂_{l,h}` for every support, plus the null-hypothesis term.
    ///
    /// With `T = R R† + Z Z†`, whitening by `S_{l,h}` turns every residual into the
    /// projection of the whitened snapshot orthogonal to the whitened steering
    /// vector, which gives
    /// `log det M̂_{l,h} = log det(T/(N_p+K)) + log(v†T⁻¹v) − log(v†S_{l,h}⁻¹v)`.
    /// All `S_{l,h}` are reached from `R R†` by rank-one updates, so the table
    /// costs one factorization and `O(N_p² N_a²)` further work.
    pub fn log_dets(&self) -> Result<JointLogDets<T>> {
        let n_p = self.n_pulses();
        let v = &self.steering;
        let null = self.log_det_null()?;
        let mut total = HermitianPd::new(self.training_gram.clone())?;
        for c in &self.columns {
            total.rank_one_update(c)?;
        }
        let shift = null + total.inv_norm_sqr(v)?.ln();
        let mut entries = Vec::with_capacity(n_p * (n_p + 1) / 2);
        let mut work = vec![Complex::new(T::zero(), T::zero()); v.dim()];
        // `base` is R R† plus the snapshots before pulse `a`
        let mut base = HermitianPd::new(self.training_gram.clone())?;
        for a in 0..n_p {
            let first = entries.len();
            let h_max = n_p - 1 - a;
            for h in 0..=h_max {
                entries.push((SupportHypothesis::new(a + 1, h, n_p)?, T::zero()));
            }
            let mut s = base.clone();
            for h in (0..=h_max).rev() {
                work.copy_from_slice(v.as_slice());
                s.whiten_in_place(&mut work);
                let q: T = work.iter().map(|x| x.norm_sqr()).sum();
                entries[first + h].1 = shift - q.ln();
                if h > 0 {
                    s.rank_one_update(&self.columns[a + h])?;
                }
            }
            base.rank_one_update(&self.columns[a])?;
        }
        Ok(JointLogDets {
            entries,
            null,
            n_total: self.n_total(),
            n_antennas: self.n_antennas(),
        })
    }

    /// Same table as [`Self::log_dets`], refactoring every `M̂_{l,h}` from scratch.
    pub fn log_dets_direct(&self) -> Result<JointLogDets<T>> {
        let entries = SupportHypothesis::candidates(self.n_pulses())
            .map(|s| self.log_det_mle(s).map(|ld| (s, ld)))
            .collect::<Result<Vec<_>>>()?;
        Ok(JointLogDets {
            entries,
            null: self.log_det_null()?,
            n_total: self.n_total(),
            n_antennas: self.n_antennas(),
        })
    }
}

/// Table of `log det M̂_{l,h}` over all supports; both joint-likelihood
/// detectors are read off it.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLogDets<T> {
    pub entries: Vec<(SupportHypothesis, T)>,
    pub null: T,
    pub n_total: usize,
    pub n_antennas: usize,
}

impl<T: Real> JointLogDets<T> {
    fn n_pulses(&self) -> usize {
        self.entries.last().map(|(s, _)| s.l()).unwrap_or(0)
    }

    fn lookup(&self, support: SupportHypothesis) -> T {
        // candidates are stored in lexicographic order
        let n_p = self.n_pulses();
        let l = support.l();
        let offset = (l - 1) * (n_p + 1) - (l - 1) * l / 2;
        let (s, v) = self.entries[offset + support.h()];
        debug_assert_eq!(s, support);
        v
    }

    /// `2(N_p+K) log det M̂_{l,h} + p_2(h, ρ)`
    pub fn objective(&self, support: SupportHypothesis, rho: T) -> T {
        T::lit(2.0) * T::from_count(self.n_total) * self.lookup(support)
            + penalty_joint(support.h(), rho, self.n_antennas)
    }

    pub fn select(&self, rho: T, keep_table: bool) -> SelectionResult<T> {
        search(self.n_pulses(), Goal::Min, keep_table, |s| {
            Ok(self.objective(s, rho))
        })
        .expect("finite log-determinants give finite objectives")
    }

    /// `log det M̂_0 + max_{l,h} {−log det M̂_{l,h} − p_2(h, ρ) / (2(N_p+K))}`
    pub fn one_stage(&self, rho: T) -> DetectorOutput<T> {
        let scale = T::lit(2.0) * T::from_count(self.n_total);
        let inner = search(self.n_pulses(), Goal::Max, false, |s| {
            Ok(-self.lookup(s) - penalty_joint(s.h(), rho, self.n_antennas) / scale)
        })
        .expect("finite log-determinants give finite objectives");
        DetectorOutput::new(self.null + inner.objective, Some(inner.support))
    }
}

/// Joint-likelihood GIC selection.
pub fn gic_joint_select<T: Real>(
    z: &ComplexMatrix<T>,
    r: &ComplexMatrix<T>,
    v: &ComplexVector<T>,
    rho: T,
) -> Result<SelectionResult<T>> {
    Ok(JointGic::new(z, r, v)?.log_dets()?.select(rho, false))
}

/// One-stage joint-likelihood GIC detector.
pub fn one_stage_gic_joint<T: Real>(
    z: &ComplexMatrix<T>,
    r: &ComplexMatrix<T>,
    v: &ComplexVector<T>,
    rho: T,
) -> Result<DetectorOutput<T>> {
    Ok(JointGic::new(z, r, v)?.log_dets()?.one_stage(rho))
}
