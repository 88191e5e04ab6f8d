//! Synthetic responses for exercising the evaluation stage.
//!
//! Times are log-normal and grow with the combined complexity of the
//! instance; answers are the correct answer plus rounded Gaussian error that
//! grows with the answer. Each unit has its own speed factor.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use tic_core::evaluation::{GroupType, ResponseRow};
use tic_core::instances::SessionPlan;
use tic_core::rng;

pub fn simulate_responses(plan: &SessionPlan, group_types: &[GroupType], seed: u64) -> anyhow::Result<Vec<ResponseRow>> {
    let unit_effect = Normal::new(0.0, 0.2)?;
    let time_noise = Normal::new(0.0, 0.35)?;
    let mut rows = Vec::new();
    for group in &plan.groups {
        for (pos, unit) in group.units.iter().enumerate() {
            let gt = *group_types
                .get(pos)
                .ok_or_else(|| anyhow::anyhow!("no group type configured for unit position {pos}"))?;
            let mut r = rng::stream(rng::derive(seed, (group.group * 64 + pos) as u64), 7);
            let speed = unit_effect.sample(&mut r);
            for inst in group.sequence() {
                let complexity = inst.combined.unwrap_or(inst.score.signal).clamp(-5.0, 10.0);
                let log_t = 3.0 + 0.15 * complexity + speed;
                let members = if gt == GroupType::Individual { 1 } else { 2 };
                let sd = 0.3 + 0.08 * inst.answer as f64;
                let answer = |r: &mut rng::Rng| {
                    let e: f64 = Normal::new(0.0, sd).expect("positive sd").sample(r);
                    (inst.answer as f64 + e).round().max(0.0) as i64
                };
                let agreed = answer(&mut r);
                for m in 1..=members {
                    let a = if gt == GroupType::AdHocPair { agreed } else if m == 1 { agreed } else { answer(&mut r) };
                    let t = (log_t + time_noise.sample(&mut r)).exp() + r.random::<f64>();
                    rows.push(ResponseRow {
                        unit_id: unit.clone(),
                        group_type: gt,
                        instance_id: inst.instance_id.clone(),
                        member: m as u32,
                        answer: a,
                        time_s: (t * 1000.0).round() / 1000.0,
                    });
                }
            }
        }
    }
    Ok(rows)
}
