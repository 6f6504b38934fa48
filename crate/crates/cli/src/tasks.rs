use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use schatten_core::datagen::{
    corrupt, make_spiked_covariance, random_lp_instance, random_sdp_instance, sample_dataset, CorruptedDataset,
    DistributionSpec,
};
use schatten_core::linalg::{schatten_norm, vector_pnorm};
use schatten_core::lp::{check_lp_certificate, solve_lp, LpPackingInstance};
use schatten_core::robust::{
    naive_top_direction, pca_filter, robust_pca_fast, FilterConfig, RobustPcaConfig,
};
use schatten_core::sdp::{
    boxed_schatten_optimize, check_boxed_solution, check_sdp_certificate, solve_sdp, OptimizeOptions,
    SchattenOptions, SdpPackingInstance,
};
use schatten_core::{potential_increases, Error, IterationRecord, SolveOutcome, Verdict};

use crate::config::{order_label, ExperimentConfig, GeneratorSpec, InstanceSource, Task};
use crate::results::{describe_report, fmt_float, ResultRow, Solution, Summary, PREPROCESSED_AWAY};

/// Relative slack allowed on a potential increase between iterations.
pub const POTENTIAL_TOLERANCE: f64 = 1e-9;

pub const INVARIANTS: [&str; 5] = [
    "potential_monotonicity",
    "iteration_cap",
    "filter_weight_monotonicity",
    "filter_removed_mass",
    "filter_bad_below_good",
];

/// Accumulates rows, check outcomes and invariant counts across runs.
pub struct Report {
    pub rows: Vec<ResultRow>,
    pub violations: BTreeMap<String, usize>,
    pub counts: BTreeMap<String, usize>,
    pub failures: Vec<String>,
}

impl Report {
    fn new() -> Self {
        Self {
            rows: Vec::new(),
            violations: INVARIANTS.iter().map(|k| (k.to_string(), 0)).collect(),
            counts: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    fn violate(&mut self, key: &str, by: usize) {
        *self.violations.entry(key.to_string()).or_default() += by;
    }

    fn count(&mut self, key: &str) {
        *self.counts.entry(key.to_string()).or_default() += 1;
    }

    pub fn summary(&self, cfg: &ExperimentConfig) -> Result<Summary> {
        let failed = self.rows.iter().filter(|r| !r.check).count();
        Ok(Summary {
            task: cfg.task.name().into(),
            config: serde_json::to_value(cfg)?,
            rows: self.rows.len(),
            certificate_checks: crate::results::CheckCounts {
                passed: self.rows.len() - failed,
                failed,
            },
            invariant_violations: self.violations.clone(),
            counts: self.counts.clone(),
            failures: self.failures.clone(),
            all_checks_passed: failed == 0,
        })
    }
}

/// Runs every `(eps, seed)` combination of the config and writes the
/// per-run artifacts under the output directory.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    for sub in ["instances", "solutions", "traces"] {
        std::fs::create_dir_all(cfg.output.join(sub))
            .with_context(|| format!("creating {}", cfg.output.join(sub).display()))?;
    }
    let mut report = Report::new();
    for &eps in &cfg.eps_grid {
        for seed in cfg.seed..cfg.seed + cfg.seeds as u64 {
            let ctx = RunContext { cfg, eps, seed };
            match cfg.inner_task() {
                Task::PackingLp => ctx.packing_lp(&mut report)?,
                Task::PackingSdp => ctx.packing_sdp(&mut report)?,
                Task::Boxed => ctx.boxed(&mut report)?,
                Task::FilterPca => ctx.filter_pca(&mut report)?,
                Task::FastPca => ctx.fast_pca(&mut report)?,
                Task::Sweep => unreachable!("validated"),
            }
        }
    }
    Ok(report)
}

struct RunContext<'a> {
    cfg: &'a ExperimentConfig,
    eps: f64,
    seed: u64,
}

impl RunContext<'_> {
    fn stem(&self, method: &str) -> String {
        let task = self.cfg.inner_task().name();
        if self.cfg.eps_grid.len() > 1 {
            format!("{task}_{method}_eps{}_seed{}", self.eps, self.seed)
        } else {
            format!("{task}_{method}_seed{}", self.seed)
        }
    }

    fn out(&self, rel: &str) -> PathBuf {
        self.cfg.output.join(rel)
    }

    fn user_file(&self) -> Option<(PathBuf, String)> {
        match &self.cfg.instance {
            InstanceSource::File(p) => {
                let abs = std::fs::canonicalize(p).unwrap_or_else(|_| p.clone());
                Some((p.clone(), abs.display().to_string()))
            }
            InstanceSource::Generator(_) => None,
        }
    }

    fn generator(&self) -> &GeneratorSpec {
        match &self.cfg.instance {
            InstanceSource::Generator(g) => g,
            InstanceSource::File(_) => unreachable!("checked by caller"),
        }
    }

    fn write_trace(&self, method: &str, traces: &[&[IterationRecord]]) -> Result<()> {
        if !self.cfg.trace {
            return Ok(());
        }
        let path = self.out(&format!("traces/{}.csv", self.stem(method)));
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(["call", "iteration", "potential", "weight_l1", "gradient_norm"])?;
        for (call, trace) in traces.iter().enumerate() {
            for (t, r) in trace.iter().enumerate() {
                w.write_record([
                    call.to_string(),
                    t.to_string(),
                    fmt_float(r.potential),
                    fmt_float(r.weight_l1),
                    fmt_float(r.gradient_norm),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    fn finish(&self, report: &mut Report, mut row: ResultRow, solution: &Solution, problems: Vec<String>) -> Result<()> {
        let rel = format!("solutions/{}.json", self.stem(&row.method));
        solution.save(&self.out(&rel))?;
        row.solution = rel;
        row.check = problems.is_empty();
        for p in problems {
            report.failures.push(format!("{} seed {} eps {}: {p}", row.task, row.seed, self.eps));
        }
        report.rows.push(row);
        Ok(())
    }

    fn solver_invariants(&self, report: &mut Report, outcome: &SolveOutcome) {
        report.violate("potential_monotonicity", potential_increases(&outcome.trace, POTENTIAL_TOLERANCE));
        if outcome.iterations > outcome.iteration_cap {
            report.violate("iteration_cap", 1);
        }
    }

    fn base_row(&self, method: &str, n: usize, d: usize, instance: String) -> ResultRow {
        ResultRow {
            task: self.cfg.inner_task().name().into(),
            method: method.into(),
            seed: self.seed,
            n,
            d,
            eps: self.eps,
            p: order_label(self.cfg.p),
            verdict: String::new(),
            score: f64::NAN,
            iterations: 0,
            iteration_cap: None,
            check: true,
            wall_time_s: 0.0,
            instance,
            solution: String::new(),
        }
    }

    fn lp_instance(&self) -> Result<(LpPackingInstance, String)> {
        if let Some((path, label)) = self.user_file() {
            return Ok((LpPackingInstance::load(&path)?, label));
        }
        let GeneratorSpec::RandomLp { n, d, scale } = *self.generator() else {
            unreachable!("validated")
        };
        let inst = random_lp_instance(n, d, scale, self.seed)?;
        let rel = format!("instances/{}.csv", self.stem("instance"));
        inst.save(&self.out(&rel))?;
        Ok((inst, rel))
    }

    fn sdp_instance(&self) -> Result<(SdpPackingInstance, String)> {
        if let Some((path, label)) = self.user_file() {
            return Ok((SdpPackingInstance::load_dir(&path)?, label));
        }
        let GeneratorSpec::RandomSdp { n, d, rank, scale } = *self.generator() else {
            unreachable!("validated")
        };
        let inst = random_sdp_instance(n, d, rank, scale, self.seed)?;
        let rel = format!("instances/{}", self.stem("instance"));
        inst.save_dir(&self.out(&rel))?;
        Ok((inst, rel))
    }

    /// The dataset, whether ground truth is known, and its path label.
    fn dataset(&self) -> Result<(CorruptedDataset, bool, String)> {
        if let Some((path, label)) = self.user_file() {
            if schatten_core::datagen::sidecar_path(&path).exists() {
                return Ok((CorruptedDataset::load(&path)?, true, label));
            }
            let samples = schatten_core::datagen::read_matrix_csv(&path)?;
            let d = samples.ncols();
            let unknown = CorruptedDataset {
                samples,
                eps: self.eps,
                seed: self.seed,
                bad_indices: Vec::new(),
                covariance: schatten_core::linalg::SymMatrix::identity(d),
                proxy_scale: 1.0,
            };
            return Ok((unknown, false, label));
        }
        let GeneratorSpec::Spiked {
            n,
            d,
            top,
            rest,
            rank,
            family,
            ref adversary,
        } = *self.generator()
        else {
            unreachable!("validated")
        };
        let spiked = make_spiked_covariance(d, top, rest, rank)?;
        let spec = DistributionSpec::new(spiked.covariance, family, spiked.proxy_scale)?;
        let clean = sample_dataset(&spec, n, self.seed)?;
        let data = corrupt(clean, &spec, self.eps, adversary, self.seed.wrapping_add(1))?;
        let rel = format!("instances/{}.csv", self.stem("data"));
        data.save(&self.out(&rel))?;
        Ok((data, true, rel))
    }

    /// Every item exceeded the preprocessing bound, so no solver run happens.
    fn preprocessed_away(&self, report: &mut Report, n: usize, d: usize, label: String, start: Instant) -> Result<()> {
        let method = match (self.cfg.inner_task(), self.cfg.sketched) {
            (Task::PackingLp, _) => "solver",
            (_, true) => "sketched",
            (_, false) => "exact",
        };
        let mut row = self.base_row(method, n, d, label);
        row.verdict = PREPROCESSED_AWAY.into();
        row.wall_time_s = start.elapsed().as_secs_f64();
        self.finish(report, row, &Solution::PreprocessedAway { eps: self.eps }, vec![])
    }

    fn packing_lp(&self, report: &mut Report) -> Result<()> {
        let (inst, label) = self.lp_instance()?;
        let p = self.cfg.p;
        let start = Instant::now();
        let outcome = match solve_lp(&inst, self.eps, p) {
            Err(Error::InfeasibleAfterPreprocessing) => {
                return self.preprocessed_away(report, inst.n(), inst.d(), label, start);
            }
            r => r?,
        };
        let elapsed = start.elapsed().as_secs_f64();
        self.solver_invariants(report, &outcome);
        self.write_trace("solver", &[&outcome.trace])?;
        let check = check_lp_certificate(&inst, &outcome.verdict, self.eps, p)?;
        let mut row = self.base_row("solver", inst.n(), inst.d(), label);
        row.verdict = outcome.verdict.label().into();
        row.score = match &outcome.verdict {
            Verdict::Primal(x) => vector_pnorm(&inst.apply(x.as_slice()), p),
            Verdict::DualVector(y) => inst.apply_transpose(y).into_iter().fold(f64::INFINITY, f64::min),
            _ => f64::NAN,
        };
        row.iterations = outcome.iterations;
        row.iteration_cap = Some(outcome.iteration_cap);
        row.wall_time_s = elapsed;
        let problems = if check.passed { vec![] } else { vec![describe_report(&check)] };
        let sol = Solution::PackingLp {
            eps: self.eps,
            p: order_label(p),
            verdict: outcome.verdict,
        };
        self.finish(report, row, &sol, problems)
    }

    fn packing_sdp(&self, report: &mut Report) -> Result<()> {
        let (inst, label) = self.sdp_instance()?;
        let p = self.cfg.p;
        let opts = if self.cfg.sketched {
            SchattenOptions::sketched(self.seed)
        } else {
            SchattenOptions::exact()
        };
        let start = Instant::now();
        let outcome = match solve_sdp(&inst, self.eps, p, &opts) {
            Err(Error::InfeasibleAfterPreprocessing) => {
                return self.preprocessed_away(report, inst.n(), inst.d(), label, start);
            }
            r => r?,
        };
        let elapsed = start.elapsed().as_secs_f64();
        self.solver_invariants(report, &outcome);
        self.write_trace("solver", &[&outcome.trace])?;
        let check = check_sdp_certificate(&inst, &outcome.verdict, self.eps, p)?;
        let mut row = self.base_row(if self.cfg.sketched { "sketched" } else { "exact" }, inst.n(), inst.d(), label);
        row.verdict = outcome.verdict.label().into();
        row.score = match &outcome.verdict {
            Verdict::Primal(x) => schatten_norm(&inst.combine(x.as_slice()), p)?,
            Verdict::DualMatrix(y) => inst.family().inner_all(y).into_iter().fold(f64::INFINITY, f64::min),
            _ => f64::NAN,
        };
        row.iterations = outcome.iterations;
        row.iteration_cap = Some(outcome.iteration_cap);
        row.wall_time_s = elapsed;
        let problems = if check.passed { vec![] } else { vec![describe_report(&check)] };
        let sol = Solution::PackingSdp {
            eps: self.eps,
            p: order_label(p),
            verdict: outcome.verdict,
        };
        self.finish(report, row, &sol, problems)
    }

    fn boxed(&self, report: &mut Report) -> Result<()> {
        let (inst, label) = self.sdp_instance()?;
        let (p, alpha) = (self.cfg.p, self.cfg.alpha);
        let opts = OptimizeOptions {
            c_box: self.cfg.constants.c_box,
            record_trace: self.cfg.trace,
            deadline: None,
        };
        let start = Instant::now();
        let opt = boxed_schatten_optimize(&inst, alpha, self.eps, p, &opts)?;
        let elapsed = start.elapsed().as_secs_f64();
        let traces: Vec<&[IterationRecord]> = opt.traces.iter().map(Vec::as_slice).collect();
        for t in &traces {
            report.violate("potential_monotonicity", potential_increases(t, POTENTIAL_TOLERANCE));
        }
        self.write_trace("solver", &traces)?;
        let check = check_boxed_solution(&inst, opt.x.as_slice(), alpha, self.eps, p, opt.certified_lower)?;
        let mut row = self.base_row("solver", inst.n(), inst.d(), label);
        row.verdict = "primal".into();
        row.score = opt.value;
        row.iterations = opt.total_iterations;
        row.wall_time_s = elapsed;
        let problems = if check.passed { vec![] } else { vec![describe_report(&check)] };
        let sol = Solution::Boxed {
            eps: self.eps,
            p: order_label(p),
            alpha,
            x: opt.x,
            value: opt.value,
            certified_lower: opt.certified_lower,
        };
        self.finish(report, row, &sol, problems)
    }

    fn naive(&self, report: &mut Report, data: &CorruptedDataset, truth: bool, label: &str) -> Result<()> {
        let start = Instant::now();
        let u = naive_top_direction(data.samples.view())?;
        let mut row = self.base_row("naive", data.n(), data.d(), label.to_string());
        row.p = String::new();
        row.wall_time_s = start.elapsed().as_secs_f64();
        row.verdict = "baseline".into();
        row.score = if truth { data.score(&u) } else { f64::NAN };
        self.finish(report, row, &Solution::Naive { direction: u }, vec![])
    }

    fn filter_pca(&self, report: &mut Report) -> Result<()> {
        let (data, truth, label) = self.dataset()?;
        let c = &self.cfg.constants;
        let fcfg = FilterConfig {
            c_filter: c.c_filter,
            c_tail: c.c_tail,
            c_iter: c.c_iter,
            seed: self.seed,
            ..FilterConfig::default()
        };
        let start = Instant::now();
        let out = pca_filter(data.samples.view(), self.eps, self.cfg.delta, &fcfg)?;
        let elapsed = start.elapsed().as_secs_f64();

        let mut problems = Vec::new();
        let monotone = out.is_weight_monotone();
        if !monotone {
            report.violate("filter_weight_monotonicity", 1);
            problems.push("filter weights increased".to_string());
        }
        let mass_cap = 2.0 * self.eps + 1.0 / data.n() as f64;
        if out.removed_mass() > mass_cap + 1e-12 {
            report.violate("filter_removed_mass", 1);
            problems.push(format!("removed mass {} exceeds {mass_cap}", out.removed_mass()));
        }
        if truth {
            let (mut bad, mut good) = (0.0, 0.0);
            for (b, g) in out.removal_split(&data.bad_mask()) {
                bad += b;
                good += g;
                if bad < good {
                    report.violate("filter_bad_below_good", 1);
                }
            }
        }
        if self.cfg.trace {
            let path = self.out(&format!("traces/{}.csv", self.stem("robust")));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["iteration", "weighted_variance", "robust_variance", "weight_l1", "suffix_mass"])?;
            for s in &out.trace {
                w.write_record([
                    s.iteration.to_string(),
                    fmt_float(s.weighted_variance),
                    fmt_float(s.robust_variance),
                    fmt_float(s.weights.l1()),
                    fmt_float(s.suffix_mass),
                ])?;
            }
            w.flush()?;
        }

        let mut row = self.base_row("robust", data.n(), data.d(), label.clone());
        row.p = String::new();
        row.verdict = if out.truncated { "truncated" } else { "terminated" }.into();
        row.score = if truth { data.score(&out.direction) } else { f64::NAN };
        row.iterations = out.iterations;
        row.iteration_cap = Some(fcfg.iteration_cap(data.n(), data.d(), self.cfg.delta));
        row.wall_time_s = elapsed;
        let sol = Solution::FilterPca {
            eps: self.eps,
            direction: out.direction,
            weights: out.weights,
            weight_monotone: monotone,
        };
        self.finish(report, row, &sol, problems)?;
        if self.cfg.naive_baseline {
            self.naive(report, &data, truth, &label)?;
        }
        Ok(())
    }

    fn fast_pca(&self, report: &mut Report) -> Result<()> {
        let (data, truth, label) = self.dataset()?;
        let c = &self.cfg.constants;
        let rcfg = RobustPcaConfig {
            c_prime: c.c_prime,
            c_star: c.c_star,
            record_trace: self.cfg.trace,
            ..RobustPcaConfig::new(self.eps, self.cfg.delta, self.cfg.t).with_seed(self.seed)
        };
        let start = Instant::now();
        let (u, diag) = robust_pca_fast(data.samples.view(), &rcfg)?;
        let elapsed = start.elapsed().as_secs_f64();

        let mut problems = Vec::new();
        let cap = (1.0 + self.eps).powi(2) / data.n() as f64;
        if !diag.weights.is_simplex() || diag.weights.max() > cap * (1.0 + 1e-9) {
            problems.push(format!("weights leave the box: max {} vs {cap}", diag.weights.max()));
        }
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            problems.push(format!("direction has norm {norm}"));
        }
        let score = if truth { data.score(&u) } else { f64::NAN };
        if truth && score >= 1.0 - diag.gamma {
            report.count("score_at_least_one_minus_gamma");
        }
        if diag.guarantee_vacuous {
            report.count("guarantee_vacuous");
        }

        let mut row = self.base_row("robust", data.n(), data.d(), label.clone());
        row.p = diag.order.to_string();
        row.verdict = format!("candidate-{}", diag.candidates.best);
        row.score = score;
        row.iterations = diag.solver_iterations;
        row.wall_time_s = elapsed;
        let sol = Solution::FastPca {
            eps: self.eps,
            order: diag.order,
            direction: u,
            weights: diag.weights,
        };
        self.finish(report, row, &sol, problems)?;
        if self.cfg.naive_baseline {
            self.naive(report, &data, truth, &label)?;
        }
        Ok(())
    }
}

/// Resolves a path stored in a results file against the file's directory.
pub fn resolve_stored(results_dir: &Path, stored: &str) -> PathBuf {
    let p = Path::new(stored);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        results_dir.join(p)
    }
}
