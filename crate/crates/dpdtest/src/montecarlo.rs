//! Replication engine for level/power studies and the outlier-sweep
//! experiment.
//!
//! Replications are independent work units executed in parallel; every
//! replication derives its own random stream from the scenario's master
//! seed, the scenario name, the total sample size, and the replication
//! index, so a report is identical regardless of the number of worker
//! threads.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{bootstrap_test, classical_wald, lrt, z_test};
use crate::error::{Error, Result};
use crate::mdpd::Beta;
use crate::model::{
    sample_contaminated, sample_lognormal, ContaminationSpec, LognormalParams, Sample,
    TargetPopulation,
};
use crate::rng::RngSeed;
use crate::special::chi2_critical_1df;
use crate::wald::{wald_test, TestResult};

/// One test to run inside a scenario or sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodSpec {
    /// Divergence-based Wald-type test at the given tuning value.
    Dpd { beta: Beta },
    /// The classical Wald test (`beta = 0`).
    ClassicalWald,
    Z,
    Lrt,
    Bootstrap { resamples: usize },
}

impl MethodSpec {
    pub fn tag(&self) -> String {
        match self {
            MethodSpec::Dpd { beta } => format!("dpd({})", beta.value()),
            MethodSpec::ClassicalWald => "classical-wald".into(),
            MethodSpec::Z => "z".into(),
            MethodSpec::Lrt => "lrt".into(),
            MethodSpec::Bootstrap { .. } => "bootstrap".into(),
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match self {
            MethodSpec::Dpd { beta } => Some(beta.value()),
            MethodSpec::ClassicalWald => Some(0.0),
            _ => None,
        }
    }

    fn run(&self, s1: &Sample, s2: &Sample, seed: RngSeed) -> Result<TestResult> {
        match self {
            MethodSpec::Dpd { beta } => wald_test(s1, s2, *beta),
            MethodSpec::ClassicalWald => classical_wald(s1, s2),
            MethodSpec::Z => z_test(s1, s2),
            MethodSpec::Lrt => lrt(s1, s2),
            MethodSpec::Bootstrap { resamples } => bootstrap_test(s1, s2, *resamples, seed),
        }
    }
}

/// Full description of one simulation experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub pop1: LognormalParams,
    pub pop2: LognormalParams,
    pub contamination: Option<ContaminationSpec>,
    /// Total sample sizes; each `n` splits as
    /// `n1 = round(n * ratio / (1 + ratio))`, `n2 = n - n1`.
    pub size_grid: Vec<usize>,
    /// `n1 / n2`.
    pub ratio: f64,
    pub methods: Vec<MethodSpec>,
    pub alpha: f64,
    pub replications: usize,
    pub master_seed: RngSeed,
}

impl ScenarioConfig {
    pub fn split(&self, n: usize) -> (usize, usize) {
        let n1 = (n as f64 * self.ratio / (1.0 + self.ratio)).round() as usize;
        (n1, n - n1)
    }

    fn validate(&self) -> Result<()> {
        if self.ratio <= 0.0 || !self.ratio.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sample-size ratio must be positive, got {}",
                self.ratio
            )));
        }
        if self.replications < 100 {
            return Err(Error::InvalidArgument(format!(
                "at least 100 replications are needed, got {}",
                self.replications
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.size_grid.is_empty() {
            return Err(Error::InvalidArgument("size grid is empty".into()));
        }
        for &n in &self.size_grid {
            let (n1, n2) = self.split(n);
            if n1 < 2 || n2 < 2 {
                return Err(Error::InvalidArgument(format!(
                    "total size {n} splits into ({n1}, {n2}); both sides need at least 2"
                )));
            }
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("no methods configured".into()));
        }
        Ok(())
    }

    fn name_hash(&self) -> u64 {
        // FNV-1a over the scenario name
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.name.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }

    /// The seed for replication `rep` of total size `n`.
    pub fn replication_seed(&self, n: usize, rep: usize) -> RngSeed {
        self.master_seed
            .derive(&[self.name_hash(), n as u64, rep as u64])
    }
}

/// Aggregated outcome for one (method, total size) cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodSizeResult {
    pub method: String,
    pub beta: Option<f64>,
    pub n: usize,
    pub n1: usize,
    pub n2: usize,
    pub rejections: usize,
    /// Replications in which the method failed to produce a decision
    /// (counted as non-rejections so rates stay comparable).
    pub failures: usize,
    pub rejection_rate: f64,
    pub monte_carlo_se: f64,
}

/// Report of one scenario run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationReport {
    pub scenario: String,
    pub alpha: f64,
    pub replications: usize,
    pub rows: Vec<MethodSizeResult>,
    pub elapsed_seconds: f64,
}

impl SimulationReport {
    pub fn rate(&self, method_tag: &str, n: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method_tag && r.n == n)
            .map(|r| r.rejection_rate)
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("scenario,method,beta,n,n1,n2,rejection_rate,mc_se,failures\n");
        for r in &self.rows {
            let beta = r.beta.map_or(String::new(), |b| format!("{b}"));
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                self.scenario,
                r.method,
                beta,
                r.n,
                r.n1,
                r.n2,
                r.rejection_rate,
                r.monte_carlo_se,
                r.failures
            ));
        }
        out
    }
}

/// Run every configured method over every replication of every size.
///
/// All methods of a replication see the same pair of samples. A method
/// that errors inside a replication is counted in `failures` and scored
/// as a non-rejection. Rejection is decided against the method's own
/// reference distribution at level `alpha` (the fixed chi-squared or
/// normal critical value; the bootstrap compares its p-value to alpha).
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SimulationReport> {
    cfg.validate()?;
    let started = Instant::now();
    let chi_crit = chi2_critical_1df(cfg.alpha);
    let z_crit = chi_crit.sqrt();
    let mut rows = Vec::new();

    for &n in &cfg.size_grid {
        let (n1, n2) = cfg.split(n);
        let per_rep = |rep: usize| -> Vec<(bool, bool)> {
            let rep_seed = cfg.replication_seed(n, rep);
            let draw = |which: TargetPopulation,
                        params: &LognormalParams,
                        size: usize,
                        tag: u64|
             -> Result<Sample> {
                let seed = rep_seed.derive(&[tag]);
                match &cfg.contamination {
                    Some(spec) if spec.target_population == which => {
                        sample_contaminated(size, params, spec, seed)
                    }
                    _ => sample_lognormal(size, params, seed),
                }
            };
            let s1 = draw(TargetPopulation::First, &cfg.pop1, n1, 0).expect("n1 >= 2 validated");
            let s2 = draw(TargetPopulation::Second, &cfg.pop2, n2, 1).expect("n2 >= 2 validated");
            cfg.methods
                .iter()
                .enumerate()
                .map(|(idx, method)| {
                    let seed = rep_seed.derive(&[2, idx as u64]);
                    match method.run(&s1, &s2, seed) {
                        Ok(result) => {
                            let reject = match method {
                                MethodSpec::Z => result.statistic > z_crit,
                                MethodSpec::Bootstrap { .. } => result.p_value < cfg.alpha,
                                _ => result.statistic > chi_crit,
                            };
                            (reject, false)
                        }
                        Err(_) => (false, true),
                    }
                })
                .collect()
        };

        // element-wise count addition is associative and commutative,
        // so the parallel reduction is schedule-independent
        let counts: Vec<(usize, usize)> = (0..cfg.replications)
            .into_par_iter()
            .map(|rep| {
                per_rep(rep)
                    .into_iter()
                    .map(|(reject, fail)| (reject as usize, fail as usize))
                    .collect::<Vec<_>>()
            })
            .reduce(
                || vec![(0usize, 0usize); cfg.methods.len()],
                |mut acc, row| {
                    for (slot, (r, f)) in acc.iter_mut().zip(row) {
                        slot.0 += r;
                        slot.1 += f;
                    }
                    acc
                },
            );

        for (method, &(rejections, failures)) in cfg.methods.iter().zip(&counts) {
            let rate = rejections as f64 / cfg.replications as f64;
            rows.push(MethodSizeResult {
                method: method.tag(),
                beta: method.beta(),
                n,
                n1,
                n2,
                rejections,
                failures,
                rejection_rate: rate,
                monte_carlo_se: (rate * (1.0 - rate) / cfg.replications as f64).sqrt(),
            });
        }
    }

    Ok(SimulationReport {
        scenario: cfg.name.clone(),
        alpha: cfg.alpha,
        replications: cfg.replications,
        rows,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}

fn default_methods() -> Vec<MethodSpec> {
    vec![
        MethodSpec::Dpd {
            beta: Beta::zero(),
        },
        MethodSpec::Dpd {
            beta: Beta::new(0.1).expect("valid"),
        },
        MethodSpec::Dpd {
            beta: Beta::new(0.2).expect("valid"),
        },
        MethodSpec::Z,
        MethodSpec::Lrt,
        MethodSpec::Bootstrap { resamples: 500 },
    ]
}

/// The nine built-in experiment designs: equal-variance level/power
/// (spreads 0.4/0.4), their 5%-contaminated versions (contaminant
/// location 5 in population 2), the unequal-variance quartet (spreads
/// 0.4/0.2, null means 1.1/1.2, alternative mean 1.6), and a
/// unit-variance design contaminated far below the bulk (location -10).
pub fn preset_scenarios() -> Vec<ScenarioConfig> {
    let p = |mu: f64, var: f64| LognormalParams::from_variance(mu, var).expect("valid preset");
    let contam = |mu: f64, var: f64| {
        ContaminationSpec::new(0.05, p(mu, var), TargetPopulation::Second).expect("valid preset")
    };
    let base = |name: &str,
                pop1: LognormalParams,
                pop2: LognormalParams,
                contamination: Option<ContaminationSpec>| {
        ScenarioConfig {
            name: name.into(),
            pop1,
            pop2,
            contamination,
            size_grid: vec![40, 60, 100, 200],
            ratio: 1.5,
            methods: default_methods(),
            alpha: 0.05,
            replications: 1000,
            master_seed: RngSeed::new(0x0bed_f00d, 0),
        }
    };
    vec![
        base("equal-var-level", p(0.0, 0.4), p(0.0, 0.4), None),
        base("equal-var-power", p(0.8, 0.4), p(0.0, 0.4), None),
        base(
            "equal-var-level-contaminated",
            p(0.0, 0.4),
            p(0.0, 0.4),
            Some(contam(5.0, 0.4)),
        ),
        base(
            "equal-var-power-contaminated",
            p(0.8, 0.4),
            p(0.0, 0.4),
            Some(contam(5.0, 0.4)),
        ),
        base("unequal-var-level", p(1.1, 0.4), p(1.2, 0.2), None),
        base("unequal-var-power", p(1.6, 0.4), p(1.2, 0.2), None),
        base(
            "unequal-var-level-contaminated",
            p(1.1, 0.4),
            p(1.2, 0.2),
            Some(contam(5.0, 0.2)),
        ),
        base(
            "unequal-var-power-contaminated",
            p(1.6, 0.4),
            p(1.2, 0.2),
            Some(contam(5.0, 0.2)),
        ),
        base(
            "unit-var-level-contaminated",
            p(0.0, 1.0),
            p(0.0, 1.0),
            Some(contam(-10.0, 1.0)),
        ),
    ]
}

/// Look a preset up by name.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    preset_scenarios().into_iter().find(|s| s.name == name)
}

/// P-values of every method as one observation of the second sample
/// sweeps through `values`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub methods: Vec<String>,
    pub values: Vec<f64>,
    /// `p_values[i][j]` is the p-value of method `j` at replacement
    /// value `values[i]`.
    pub p_values: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn column(&self, method_tag: &str) -> Option<Vec<f64>> {
        let j = self.methods.iter().position(|m| m == method_tag)?;
        Some(self.p_values.iter().map(|row| row[j]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("value");
        for m in &self.methods {
            out.push(',');
            out.push_str(m);
        }
        out.push('\n');
        for (v, row) in self.values.iter().zip(&self.p_values) {
            out.push_str(&format!("{v}"));
            for p in row {
                out.push_str(&format!(",{p}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Replace the observation at `index` of `base2` with each candidate
/// value in turn and rerun every method. Bootstrap methods draw their
/// resampling stream from `seed` and the value's position, so the sweep
/// is deterministic.
pub fn outlier_sweep(
    base1: &Sample,
    base2: &Sample,
    index: usize,
    values: &[f64],
    methods: &[MethodSpec],
    seed: RngSeed,
) -> Result<SweepTable> {
    if index >= base2.len() {
        return Err(Error::InvalidArgument(format!(
            "index {index} out of range for a sample of size {}",
            base2.len()
        )));
    }
    let mut p_values = Vec::with_capacity(values.len());
    for (vi, &value) in values.iter().enumerate() {
        let replaced = base2.with_replaced(index, value)?;
        let mut row = Vec::with_capacity(methods.len());
        for (mi, method) in methods.iter().enumerate() {
            let method_seed = seed.derive(&[vi as u64, mi as u64]);
            row.push(method.run(base1, &replaced, method_seed)?.p_value);
        }
        p_values.push(row);
    }
    Ok(SweepTable {
        methods: methods.iter().map(MethodSpec::tag).collect(),
        values: values.to_vec(),
        p_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ScenarioConfig {
        ScenarioConfig {
            name: "tiny".into(),
            pop1: LognormalParams::from_variance(0.0, 0.4).unwrap(),
            pop2: LognormalParams::from_variance(0.0, 0.4).unwrap(),
            contamination: None,
            size_grid: vec![40],
            ratio: 1.5,
            methods: vec![
                MethodSpec::Dpd {
                    beta: Beta::new(0.1).unwrap(),
                },
                MethodSpec::Z,
            ],
            alpha: 0.05,
            replications: 120,
            master_seed: RngSeed::new(7, 0),
        }
    }

    #[test]
    fn preset_catalog_shape() {
        let presets = preset_scenarios();
        assert_eq!(presets.len(), 9);
        let power = preset("unequal-var-power").unwrap();
        assert_eq!(power.pop1.mu(), 1.6);
        assert_eq!(power.pop2.mu(), 1.2);
        for preset in &presets {
            if let Some(c) = &preset.contamination {
                assert_eq!(c.fraction, 0.05);
                assert_eq!(c.target_population, TargetPopulation::Second);
            }
        }
        assert!(preset("no-such-preset").is_none());
    }

    #[test]
    fn size_split_uses_the_ratio() {
        let cfg = tiny_config();
        assert_eq!(cfg.split(100), (60, 40));
        assert_eq!(cfg.split(40), (24, 16));
    }

    #[test]
    fn replication_seeds_never_collide() {
        let cfg = tiny_config();
        let mut seen = std::collections::HashSet::new();
        for n in [40usize, 60, 100] {
            for rep in 0..1000 {
                assert!(seen.insert(cfg.replication_seed(n, rep).stream_id));
            }
        }
    }

    #[test]
    fn report_is_deterministic_across_worker_counts() {
        let cfg = tiny_config();
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = pool1.install(|| run_scenario(&cfg)).unwrap();
        let b = pool4.install(|| run_scenario(&cfg)).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.rejections, rb.rejections);
            assert_eq!(ra.failures, rb.failures);
        }
    }

    #[test]
    fn rates_are_exact_count_ratios() {
        let report = run_scenario(&tiny_config()).unwrap();
        for row in &report.rows {
            assert_eq!(
                row.rejection_rate,
                row.rejections as f64 / report.replications as f64
            );
            let p = row.rejection_rate;
            assert_eq!(
                row.monte_carlo_se,
                (p * (1.0 - p) / report.replications as f64).sqrt()
            );
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = tiny_config();
        cfg.replications = 10;
        assert!(run_scenario(&cfg).is_err());
        let mut cfg = tiny_config();
        cfg.size_grid = vec![5];
        assert!(run_scenario(&cfg).is_err());
        let mut cfg = tiny_config();
        cfg.ratio = -1.0;
        assert!(run_scenario(&cfg).is_err());
    }

    #[test]
    fn csv_has_one_row_per_method_and_size() {
        let report = run_scenario(&tiny_config()).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 1 + 2); // header + 2 methods x 1 size
        assert!(lines[0].starts_with("scenario,method,beta,n,"));
        assert!(lines[1].starts_with("tiny,dpd(0.1),0.1,40,24,16,"));
    }

    #[test]
    fn sweep_identity_replacement_reproduces_base_p_values() {
        let s1 = Sample::new(vec![3.0, 4.0, 5.5, 2.0, 8.0, 4.4]).unwrap();
        let s2 = Sample::new(vec![1.0, 2.0, 3.0, 9.0]).unwrap();
        let methods = [
            MethodSpec::Dpd {
                beta: Beta::new(0.1).unwrap(),
            },
            MethodSpec::Z,
        ];
        let sweep = outlier_sweep(
            &s1,
            &s2,
            3,
            &[9.0, 100.0],
            &methods,
            RngSeed::new(0, 0),
        )
        .unwrap();
        let direct = wald_test(&s1, &s2, Beta::new(0.1).unwrap()).unwrap();
        assert_eq!(sweep.p_values[0][0], direct.p_value);
        assert!(sweep.p_values[1][0] != direct.p_value);
        assert!(outlier_sweep(&s1, &s2, 9, &[1.0], &methods, RngSeed::new(0, 0)).is_err());
        assert!(outlier_sweep(&s1, &s2, 0, &[-2.0], &methods, RngSeed::new(0, 0)).is_err());
    }
}
