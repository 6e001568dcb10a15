//! Schedule-scale checking of the Approximation, Correctness and Convergence
//! criteria of a ball map against a reference operator.

use alloc::vec::Vec;

use super::{BallMap, BallMapDescriptor, GeneratingSet, RationalBall};
use crate::error::Result;
use crate::lpspace::FiniteVector;
use crate::rigor::{pow2, rat, CRat, Enclosure, Rat};

/// The finite sample on which a ball map is checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    /// Ball centers, as coefficient lists over the source presentation.
    pub centers: Vec<Vec<CRat>>,
    pub radii: Vec<Rat>,
    /// Number of coordinate directions probed on each side of a center.
    pub probes_per_ball: usize,
    /// Convergence is demanded for every `eps = 2^-e` with `e` in this list.
    pub eps_grid: Vec<u32>,
    pub fuel: u32,
    /// Precision of the residual enclosures used to judge Correctness.
    pub verify_precision: u32,
}

impl Schedule {
    /// Radii `1/2, 1/4, 1/16`, two probe directions, `eps = 2^-1 .. 2^-12`.
    pub fn standard(centers: Vec<Vec<CRat>>) -> Self {
        Self {
            centers,
            radii: [rat(1, 2), rat(1, 4), rat(1, 16)].into(),
            probes_per_ball: 2,
            eps_grid: (1..=12).collect(),
            fuel: 40,
            verify_precision: 30,
        }
    }
}

/// A ball, a point of it, and a certificate that the image of the point
/// lies outside the output ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectnessWitness {
    pub input: RationalBall,
    pub output: RationalBall,
    pub probe: FiniteVector,
    /// Encloses `||T(probe) - center(output)||`; its lower end is at least
    /// the output radius.
    pub distance: Enclosure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceFailure {
    pub center: Vec<CRat>,
    pub eps_exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub map: BallMapDescriptor,
    pub schedule: Schedule,
    pub balls_tested: usize,
    pub probes_tested: usize,
    pub no_output: usize,
    /// Probes whose residual enclosure straddled the output radius.
    pub undetermined: usize,
    pub correctness_violations: Vec<CorrectnessWitness>,
    pub convergence_achieved: usize,
    pub convergence_failures: Vec<ConvergenceFailure>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.correctness_violations.is_empty() && self.convergence_failures.is_empty()
    }
}

fn probes(center: &FiniteVector, radius: &Rat, directions: usize) -> Vec<FiniteVector> {
    let half = CRat::real(radius / Rat::from_integer(2.into()));
    let mut out = Vec::with_capacity(1 + 2 * directions);
    out.push(center.clone());
    for n in 0..directions {
        let step = FiniteVector::basis(n).scale(&half);
        out.push(center.add(&step));
        out.push(center.sub(&step));
    }
    out
}

/// Runs the schedule. `reference` is the exact operator in standard
/// coordinates; `source` and `target` must be able to realize or residual
/// their combinations, otherwise every probe counts as undetermined.
pub fn check_ballmap<R>(
    map: &dyn BallMap,
    source: &dyn GeneratingSet,
    target: &dyn GeneratingSet,
    reference: R,
    schedule: &Schedule,
) -> Result<CheckReport>
where
    R: Fn(&FiniteVector) -> FiniteVector,
{
    let mut report = CheckReport {
        map: map.descriptor(),
        schedule: schedule.clone(),
        balls_tested: 0,
        probes_tested: 0,
        no_output: 0,
        undetermined: 0,
        correctness_violations: Vec::new(),
        convergence_achieved: 0,
        convergence_failures: Vec::new(),
    };
    for center in &schedule.centers {
        let Some(f) = source.realize(center) else {
            report.undetermined += 1;
            continue;
        };
        for radius in &schedule.radii {
            let input = RationalBall::new(center.clone(), radius.clone(), map.source());
            report.balls_tested += 1;
            let Some(output) = map.apply(&input, schedule.fuel)? else {
                report.no_output += 1;
                continue;
            };
            for probe in probes(&f, radius, schedule.probes_per_ball) {
                report.probes_tested += 1;
                let image = reference(&probe);
                let Some(distance) = target.residual_norm(&image, &output.center, schedule.verify_precision) else {
                    report.undetermined += 1;
                    continue;
                };
                let distance = distance?;
                if distance.hi() < &output.radius {
                    continue;
                }
                if distance.lo() >= &output.radius {
                    report.correctness_violations.push(CorrectnessWitness {
                        input: input.clone(),
                        output: output.clone(),
                        probe,
                        distance,
                    });
                } else {
                    report.undetermined += 1;
                }
            }
        }
        for &e in &schedule.eps_grid {
            let eps = pow2(-(e as i64));
            let mut achieved = false;
            for j in 1..=schedule.fuel {
                let input = RationalBall::new(center.clone(), pow2(-(j as i64)), map.source());
                if let Some(out) = map.apply(&input, schedule.fuel)? {
                    if out.radius < eps {
                        achieved = true;
                        break;
                    }
                }
            }
            if achieved {
                report.convergence_achieved += 1;
            } else {
                report.convergence_failures.push(ConvergenceFailure {
                    center: center.clone(),
                    eps_exponent: e,
                });
            }
        }
    }
    Ok(report)
}
