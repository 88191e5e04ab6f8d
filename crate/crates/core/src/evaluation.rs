//! Response scoring and paired resampling statistics.
//!
//! Group outcomes follow the usual pooling rules for dyads: a nominal pair
//! (two independent solvers) is as accurate as its best member and as slow
//! as its slowest; an ad hoc pair (one agreed answer) takes the slower
//! member's time.
//!
//! Multiple comparisons are not corrected here; apply Holm–Bonferroni to
//! the reported p-values if needed.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::{rng, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupType {
    Individual,
    AdHocPair,
    NominalPair,
}

impl GroupType {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupType::Individual => "individual",
            GroupType::AdHocPair => "ad_hoc_pair",
            GroupType::NominalPair => "nominal_pair",
        }
    }

    fn members(self) -> usize {
        match self {
            GroupType::Individual => 1,
            _ => 2,
        }
    }
}

impl std::str::FromStr for GroupType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "individual" => Ok(GroupType::Individual),
            "ad_hoc_pair" => Ok(GroupType::AdHocPair),
            "nominal_pair" => Ok(GroupType::NominalPair),
            _ => Err(Error::InvalidArgument(format!("unknown group type '{s}'"))),
        }
    }
}

/// `max(1 - |correct - actual| / correct, 0)`.
pub fn accuracy(correct: i64, actual: i64) -> Result<f64> {
    if correct <= 0 {
        return Err(Error::InvalidArgument(format!("correct answer must be positive, got {correct}")));
    }
    Ok((1.0 - (correct - actual).unsigned_abs() as f64 / correct as f64).max(0.0))
}

/// One line of the response CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResponseRow {
    pub unit_id: String,
    pub group_type: GroupType,
    pub instance_id: String,
    pub member: u32,
    pub answer: i64,
    pub time_s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberResponse {
    pub member: u32,
    pub answer: i64,
    pub time_s: f64,
}

/// All responses of one unit (a person or a pair).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub unit_id: String,
    pub group_type: GroupType,
    /// Member responses per instance id.
    pub responses: BTreeMap<String, Vec<MemberResponse>>,
}

impl SessionRecord {
    /// Groups rows by unit. Every unit must have a single group type.
    pub fn from_rows(rows: &[ResponseRow]) -> Result<Vec<SessionRecord>> {
        let mut units: BTreeMap<&str, SessionRecord> = BTreeMap::new();
        for r in rows {
            let rec = units.entry(&r.unit_id).or_insert_with(|| SessionRecord {
                unit_id: r.unit_id.clone(),
                group_type: r.group_type,
                responses: BTreeMap::new(),
            });
            if rec.group_type != r.group_type {
                return Err(Error::InvalidArgument(format!("unit {} has mixed group types", r.unit_id)));
            }
            rec.responses.entry(r.instance_id.clone()).or_default().push(MemberResponse {
                member: r.member,
                answer: r.answer,
                time_s: r.time_s,
            });
        }
        Ok(units.into_values().collect())
    }
}

/// Group-level result for one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub instance_id: String,
    pub accuracy: f64,
    pub time_s: f64,
}

/// Pools member responses into one group outcome.
pub fn harmonize_instance(group_type: GroupType, responses: &[MemberResponse], correct: i64) -> Result<(f64, f64)> {
    let members: BTreeSet<u32> = responses.iter().map(|r| r.member).collect();
    if members.len() != group_type.members() || responses.len() != group_type.members() {
        return Err(Error::InvalidArgument(format!(
            "{} needs {} distinct member responses, got {}",
            group_type.as_str(),
            group_type.members(),
            responses.len()
        )));
    }
    if let Some(r) = responses.iter().find(|r| !(r.time_s > 0.0 && r.time_s.is_finite())) {
        return Err(Error::InvalidArgument(format!("completion time must be positive, got {}", r.time_s)));
    }
    let time = responses.iter().map(|r| r.time_s).fold(0.0, f64::max);
    let acc = match group_type {
        GroupType::Individual => accuracy(correct, responses[0].answer)?,
        GroupType::NominalPair => {
            let a = accuracy(correct, responses[0].answer)?;
            let b = accuracy(correct, responses[1].answer)?;
            a.max(b)
        }
        GroupType::AdHocPair => {
            if responses[0].answer != responses[1].answer {
                return Err(Error::InvalidArgument(format!(
                    "ad hoc pair answers disagree ({} vs {})",
                    responses[0].answer, responses[1].answer
                )));
            }
            accuracy(correct, responses[0].answer)?
        }
    };
    Ok((acc, time))
}

/// Outcomes of every instance in `record`, in instance-id order.
pub fn harmonize(record: &SessionRecord, correct: &BTreeMap<String, i64>) -> Result<Vec<Outcome>> {
    record
        .responses
        .iter()
        .map(|(id, rs)| {
            let c = *correct
                .get(id)
                .ok_or_else(|| Error::InvalidArgument(format!("unit {}: unknown instance {id}", record.unit_id)))?;
            let (accuracy, time_s) = harmonize_instance(record.group_type, rs, c)
                .map_err(|e| Error::InvalidArgument(format!("unit {} instance {id}: {e}", record.unit_id)))?;
            Ok(Outcome { instance_id: id.clone(), accuracy, time_s })
        })
        .collect()
}

/// Individual record made of one randomly chosen member of a nominal pair.
pub fn nominal_member_as_individual(record: &SessionRecord, seed: u64) -> Result<SessionRecord> {
    if record.group_type != GroupType::NominalPair {
        return Err(Error::InvalidArgument(format!("unit {} is not a nominal pair", record.unit_id)));
    }
    let members: BTreeSet<u32> = record.responses.values().flatten().map(|r| r.member).collect();
    let members: Vec<u32> = members.into_iter().collect();
    if members.is_empty() {
        return Err(Error::InvalidArgument(format!("unit {} has no responses", record.unit_id)));
    }
    let salt = record.unit_id.bytes().fold(0u64, |h, b| rng::derive(h, b as u64));
    let pick = members[rng::stream(rng::derive(seed, salt), 0).random_range(0..members.len())];
    let responses = record
        .responses
        .iter()
        .map(|(id, rs)| (id.clone(), rs.iter().filter(|r| r.member == pick).copied().collect()))
        .collect();
    Ok(SessionRecord { unit_id: format!("{}/{pick}", record.unit_id), group_type: GroupType::Individual, responses })
}

/// Paired values `(x, y)` grouped by unit; the paired difference is `y - x`.
pub type PairedUnits = Vec<Vec<(f64, f64)>>;

/// Joins two units' outcomes on instance id, skipping `exclude`.
pub fn pair_outcomes(
    x: &[Outcome],
    y: &[Outcome],
    exclude: &BTreeSet<String>,
    value: impl Fn(&Outcome) -> f64,
) -> Vec<(f64, f64)> {
    let ys: BTreeMap<&str, &Outcome> = y.iter().map(|o| (o.instance_id.as_str(), o)).collect();
    x.iter()
        .filter(|o| !exclude.contains(&o.instance_id))
        .filter_map(|o| ys.get(o.instance_id.as_str()).map(|p| (value(o), value(p))))
        .collect()
}

fn check_units(units: &[Vec<(f64, f64)>], r: usize) -> Result<()> {
    if r < 1000 {
        return Err(Error::InvalidArgument(format!("at least 1000 resamples required, got {r}")));
    }
    if units.len() < 2 {
        return Err(Error::InvalidArgument(format!("at least 2 units required, got {}", units.len())));
    }
    if let Some(i) = units.iter().position(|u| u.is_empty()) {
        return Err(Error::InvalidArgument(format!("unit {i} has no paired values")));
    }
    Ok(())
}

fn pooled_mean_diff(units: &[Vec<(f64, f64)>]) -> f64 {
    let (sum, n) = units.iter().flatten().fold((0.0, 0usize), |(s, n), (x, y)| (s + (y - x), n + 1));
    sum / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub mean_diff: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub replicates: usize,
    pub seed: u64,
}

/// Percentile 95% CI of the pooled mean of `y - x`.
///
/// Each replicate resamples units with replacement and then, within each
/// drawn unit, its paired values with replacement.
pub fn stratified_bootstrap(units: &[Vec<(f64, f64)>], r: usize, seed: u64) -> Result<BootstrapResult> {
    check_units(units, r)?;
    let diffs: Vec<Vec<f64>> = units.iter().map(|u| u.iter().map(|(x, y)| y - x).collect()).collect();
    let reps: Vec<usize> = (0..r).collect();
    let mut stats = crate::par_map(&reps, |&i| {
        let mut rng = rng::stream(seed, i as u64 + 1);
        let (mut sum, mut n) = (0.0, 0usize);
        for _ in 0..diffs.len() {
            let d = &diffs[rng.random_range(0..diffs.len())];
            for _ in 0..d.len() {
                sum += d[rng.random_range(0..d.len())];
            }
            n += d.len();
        }
        sum / n as f64
    });
    stats.sort_by(f64::total_cmp);
    Ok(BootstrapResult {
        mean_diff: pooled_mean_diff(units),
        ci_low: quantile(&stats, 0.025),
        ci_high: quantile(&stats, 0.975),
        replicates: r,
        seed,
    })
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationResult {
    pub statistic: f64,
    pub p_value: f64,
    pub replicates: usize,
    pub seed: u64,
}

/// Two-sided sign-flip test of a zero pooled mean difference.
///
/// All differences of one unit flip sign together. The p-value is
/// `(1 + #{|T*| >= |T|}) / (R + 1)`; it is 1 when every difference is zero.
pub fn paired_permutation_test(units: &[Vec<(f64, f64)>], r: usize, seed: u64) -> Result<PermutationResult> {
    check_units(units, r)?;
    let sums: Vec<f64> = units.iter().map(|u| u.iter().map(|(x, y)| y - x).sum()).collect();
    let n: usize = units.iter().map(Vec::len).sum();
    let t = pooled_mean_diff(units);
    if units.iter().flatten().all(|(x, y)| y - x == 0.0) {
        return Ok(PermutationResult { statistic: 0.0, p_value: 1.0, replicates: r, seed });
    }
    // Relative slack so that exact ties are not lost to summation order.
    let threshold = t.abs() * (1.0 - 1e-12);
    let reps: Vec<usize> = (0..r).collect();
    let hits = crate::par_map(&reps, |&i| {
        let mut rng = rng::stream(seed, i as u64 + 1);
        let s: f64 = sums.iter().map(|&s| if rng.random::<bool>() { s } else { -s }).sum();
        ((s / n as f64).abs() >= threshold) as usize
    })
    .into_iter()
    .sum::<usize>();
    Ok(PermutationResult { statistic: t, p_value: (1 + hits) as f64 / (r + 1) as f64, replicates: r, seed })
}

/// Natural logarithms of completion times.
pub fn log_times(times: &[f64]) -> Result<Vec<f64>> {
    times
        .iter()
        .map(|&t| {
            if t > 0.0 && t.is_finite() {
                Ok(t.ln())
            } else {
                Err(Error::InvalidArgument(format!("completion time must be positive, got {t}")))
            }
        })
        .collect()
}

pub fn geometric_mean(times: &[f64]) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("geometric mean of no values".into()));
    }
    Ok((log_times(times)?.iter().sum::<f64>() / times.len() as f64).exp())
}

/// One paired comparison in an evaluation report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    /// `accuracy` or `log_time`.
    pub measure: String,
    pub units: usize,
    pub pairs: usize,
    pub bootstrap: BootstrapResult,
    pub permutation: PermutationResult,
    /// For log times, `exp(mean_diff)`: the geometric-mean time ratio `y / x`.
    pub ratio: Option<f64>,
}

impl Comparison {
    pub fn run(name: &str, measure: &str, units: &[Vec<(f64, f64)>], r: usize, seed: u64) -> Result<Self> {
        let bootstrap = stratified_bootstrap(units, r, seed)?;
        let permutation = paired_permutation_test(units, r, rng::derive(seed, 1))?;
        Ok(Comparison {
            name: name.into(),
            measure: measure.into(),
            units: units.len(),
            pairs: units.iter().map(Vec::len).sum(),
            bootstrap,
            permutation,
            ratio: (measure == "log_time").then(|| bootstrap.mean_diff.exp()),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub seed: u64,
    pub replicates: usize,
    pub config_hash: String,
    pub outcomes: BTreeMap<String, Vec<Outcome>>,
    pub comparisons: Vec<Comparison>,
}
