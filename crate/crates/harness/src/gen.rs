//! Seeded instance generation with construction witnesses.
//!
//! Every generated instance provably has its declared kind: feasible
//! problems ship the point that satisfies them, unbounded ones the
//! improving ray, infeasible ones the separating row combination, and
//! dual-feasible starts the `(y, s)` pair their costs were built from.
//! Generation is a pure function of the spec, so a stored seed reproduces
//! an instance exactly.

use lp_core::mat::{dot, norm_inf};
use lp_core::model::StandardLp;
use lp_core::network::{McfArc, McfProblem, OtProblem};
use lp_core::{Mat, Settings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Error;

/// Problem family a spec asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    /// `b = A x*` for a stored `x* >= 0`.
    Feasible,
    /// Column sums are negative while `b` is positive: summing the rows
    /// separates `Ax = b, x >= 0` from any solution.
    Infeasible,
    /// Feasible, with a stored ray `d >= 0`, `Ad = 0`, `c'd < 0`.
    Unbounded,
    /// Costs built as `c = A'y + s` with `s >= 0` for a stored pair.
    DualFeasibleStart,
    /// Balanced transport problem with integral data.
    Ot,
    /// Min-cost flow network with a planted routable path.
    Mcf,
    /// Feasible, with block lower triangular structure.
    BlockSeparable,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 7] = [
        InstanceKind::Feasible,
        InstanceKind::Infeasible,
        InstanceKind::Unbounded,
        InstanceKind::DualFeasibleStart,
        InstanceKind::Ot,
        InstanceKind::Mcf,
        InstanceKind::BlockSeparable,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            InstanceKind::Feasible => "feasible",
            InstanceKind::Infeasible => "infeasible",
            InstanceKind::Unbounded => "unbounded",
            InstanceKind::DualFeasibleStart => "dual_feasible_start",
            InstanceKind::Ot => "ot",
            InstanceKind::Mcf => "mcf",
            InstanceKind::BlockSeparable => "block_separable",
        }
    }

    pub fn parse(s: &str) -> Result<InstanceKind, Error> {
        InstanceKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownName(format!("instance kind '{}'", s)))
    }
}

/// Everything needed to regenerate an instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    /// Rows (suppliers for `ot`, nodes for `mcf`).
    pub m: usize,
    /// Columns (consumers for `ot`, arcs for `mcf`).
    pub n: usize,
    /// Fill probability per entry, in `(0, 1]`.
    pub density: f64,
    pub seed: u64,
    pub kind: InstanceKind,
}

/// The generated problem, in whichever family the kind dictates.
#[derive(Debug, Clone)]
pub enum Instance {
    Standard(StandardLp),
    Ot(OtProblem),
    Mcf(McfProblem),
}

/// Proof-by-construction that the instance has its declared kind.
#[derive(Debug, Clone)]
pub enum Witness {
    /// `x* >= 0` with `A x* = b`.
    FeasiblePoint(Vec<f64>),
    /// `y` with `A'y <= 0` elementwise and `b'y > 0`.
    SeparatingRow(Vec<f64>),
    /// `d >= 0`, `A d = 0`, `c'd < 0`.
    Ray(Vec<f64>),
    /// `(y, s >= 0)` with `c = A'y + s`.
    DualPair { y: Vec<f64>, s: Vec<f64> },
    /// Network kinds are certified by their own validation.
    None,
}

/// A spec together with its realized instance and witness.
#[derive(Debug, Clone)]
pub struct Generated {
    pub spec: InstanceSpec,
    pub instance: Instance,
    pub witness: Witness,
    /// True when the requested density could not reach full row rank and
    /// had to be raised.
    pub density_adjusted: bool,
}

impl Generated {
    /// The standard-form view of the instance, for callers that need one.
    pub fn to_standard(&self, settings: &Settings) -> Result<StandardLp, Error> {
        match &self.instance {
            Instance::Standard(lp) => Ok(lp.clone()),
            Instance::Ot(p) => Ok(lp_core::network::ot_to_standard(p, settings)?),
            Instance::Mcf(p) => Ok(lp_core::network::mcf_to_standard(p, settings)?.lp),
        }
    }
}

/// Derive instance seed `index` from a master bench seed. The split goes
/// through a counter-keyed stream so related masters do not produce
/// overlapping instance seeds.
pub fn split_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index.wrapping_add(1));
    rng.gen()
}

fn sample_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize, density: f64) -> Mat {
    let mut a = Mat::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            if rng.gen_bool(density) {
                a.set(i, j, rng.gen_range(-16..=16) as f64 / 8.0);
            }
        }
    }
    // A zero row can never reach full rank; give it one entry.
    for i in 0..m {
        if (0..n).all(|j| a.get(i, j) == 0.0) {
            let j = rng.gen_range(0..n);
            a.set(i, j, rng.gen_range(1..=16) as f64 / 8.0);
        }
    }
    a
}

fn sample_costs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-16..=16) as f64 / 8.0).collect()
}

fn sample_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut x: Vec<f64> =
        (0..n).map(|_| if rng.gen_bool(0.5) { rng.gen_range(1..=24) as f64 / 8.0 } else { 0.0 }).collect();
    if x.iter().all(|&v| v == 0.0) {
        x[rng.gen_range(0..n)] = rng.gen_range(1..=24) as f64 / 8.0;
    }
    x
}

/// Build the instance described by `spec`.
///
/// Standard kinds retry the random draw (raising the density after
/// repeated failures) until the matrix has full row rank; the adjustment
/// is reported on the result. The witness is verified before returning.
pub fn generate(spec: &InstanceSpec, settings: &Settings) -> Result<Generated, Error> {
    match spec.kind {
        InstanceKind::Ot => return gen_ot(spec),
        InstanceKind::Mcf => return gen_mcf(spec),
        _ => {}
    }
    if spec.m == 0 || spec.n <= spec.m {
        return Err(Error::BadSpec(format!(
            "standard kinds need 0 < m < n, got m={} n={}",
            spec.m, spec.n
        )));
    }
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(Error::BadSpec(format!("density {} is outside (0, 1]", spec.density)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut density = spec.density;
    let mut adjusted = false;
    for attempt in 0..40 {
        if attempt > 0 && attempt % 5 == 0 && density < 1.0 {
            density = (density + 0.15).min(1.0);
            adjusted = true;
        }
        let built = match spec.kind {
            InstanceKind::Feasible => build_feasible(&mut rng, spec, density, settings),
            InstanceKind::Infeasible => build_infeasible(&mut rng, spec, density, settings),
            InstanceKind::Unbounded => build_unbounded(&mut rng, spec, density, settings),
            InstanceKind::DualFeasibleStart => build_dual_start(&mut rng, spec, density, settings),
            InstanceKind::BlockSeparable => build_block(&mut rng, spec, density, settings),
            InstanceKind::Ot | InstanceKind::Mcf => unreachable!("handled above"),
        };
        if let Some((lp, witness)) = built {
            verify_witness(&lp, &witness)?;
            return Ok(Generated {
                spec: *spec,
                instance: Instance::Standard(lp),
                witness,
                density_adjusted: adjusted,
            });
        }
    }
    Err(Error::BadSpec(format!(
        "no full-rank draw for m={} n={} after raising density to {:.2}",
        spec.m, spec.n, density
    )))
}

fn build_feasible(
    rng: &mut ChaCha8Rng,
    spec: &InstanceSpec,
    density: f64,
    settings: &Settings,
) -> Option<(StandardLp, Witness)> {
    let a = sample_matrix(rng, spec.m, spec.n, density);
    let x = sample_point(rng, spec.n);
    let b = a.mul_vec(&x);
    let c = sample_costs(rng, spec.n);
    let lp = StandardLp::new(c, a, b, settings).ok()?;
    Some((lp, Witness::FeasiblePoint(x)))
}

fn build_infeasible(
    rng: &mut ChaCha8Rng,
    spec: &InstanceSpec,
    density: f64,
    settings: &Settings,
) -> Option<(StandardLp, Witness)> {
    let mut a = sample_matrix(rng, spec.m, spec.n, density);
    // Shift row 0 so every column sums negative: with y = 1 the rows
    // combine to an inequality no nonnegative x satisfies.
    for j in 0..spec.n {
        let sum: f64 = (0..spec.m).map(|i| a.get(i, j)).sum();
        a.set(0, j, a.get(0, j) - sum - 1.0);
    }
    let b: Vec<f64> = (0..spec.m).map(|_| rng.gen_range(4..=20) as f64 / 8.0).collect();
    let c = sample_costs(rng, spec.n);
    let lp = StandardLp::new(c, a, b, settings).ok()?;
    Some((lp, Witness::SeparatingRow(vec![1.0; spec.m])))
}

fn build_unbounded(
    rng: &mut ChaCha8Rng,
    spec: &InstanceSpec,
    density: f64,
    settings: &Settings,
) -> Option<(StandardLp, Witness)> {
    let mut a = sample_matrix(rng, spec.m, spec.n, density);
    let support: Vec<usize> = {
        let mut s: Vec<usize> = (0..spec.n).filter(|_| rng.gen_bool(0.5)).collect();
        while s.len() < 2 {
            let j = rng.gen_range(0..spec.n);
            if !s.contains(&j) {
                s.push(j);
            }
        }
        s.sort_unstable();
        s
    };
    let mut d = vec![0.0; spec.n];
    for &j in &support {
        d[j] = rng.gen_range(4..=16) as f64 / 8.0;
    }
    // The last support column closes the ray: A d = 0 by construction.
    let k = *support.last().expect("support has at least two columns");
    for i in 0..spec.m {
        let partial: f64 =
            support.iter().filter(|&&j| j != k).map(|&j| d[j] * a.get(i, j)).sum();
        a.set(i, k, -partial / d[k]);
    }
    let x = sample_point(rng, spec.n);
    let b = a.mul_vec(&x);
    let mut c = sample_costs(rng, spec.n);
    let partial: f64 = support.iter().filter(|&&j| j != k).map(|&j| c[j] * d[j]).sum();
    c[k] = (-1.0 - partial) / d[k];
    let lp = StandardLp::new(c, a, b, settings).ok()?;
    Some((lp, Witness::Ray(d)))
}

fn build_dual_start(
    rng: &mut ChaCha8Rng,
    spec: &InstanceSpec,
    density: f64,
    settings: &Settings,
) -> Option<(StandardLp, Witness)> {
    let mut a = sample_matrix(rng, spec.m, spec.n, density);
    let mut b: Vec<f64> = (0..spec.m).map(|_| rng.gen_range(-16..=16) as f64 / 8.0).collect();
    // Normalize signs up front so the constructor keeps our orientation
    // and the stored y matches the kept rows.
    for i in 0..spec.m {
        if b[i] < 0.0 {
            b[i] = -b[i];
            for j in 0..spec.n {
                let v = a.get(i, j);
                if v != 0.0 {
                    a.set(i, j, -v);
                }
            }
        }
    }
    let y: Vec<f64> = (0..spec.m).map(|_| rng.gen_range(-8..=8) as f64 / 8.0).collect();
    let s: Vec<f64> =
        (0..spec.n).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0..=16) as f64 / 8.0 }).collect();
    let c: Vec<f64> = (0..spec.n).map(|j| dot(a.col(j), &y) + s[j]).collect();
    let lp = StandardLp::new(c, a, b, settings).ok()?;
    Some((lp, Witness::DualPair { y, s }))
}

fn build_block(
    rng: &mut ChaCha8Rng,
    spec: &InstanceSpec,
    density: f64,
    settings: &Settings,
) -> Option<(StandardLp, Witness)> {
    let blocks = 2.max(spec.m / 2).min(spec.m).min(3);
    // Split rows and columns into contiguous chunks, one per block, with
    // every block keeping more columns than rows.
    let mut row_of_block = vec![spec.m / blocks; blocks];
    for i in 0..spec.m % blocks {
        row_of_block[i] += 1;
    }
    let mut col_of_block = vec![spec.n / blocks; blocks];
    for j in 0..spec.n % blocks {
        col_of_block[j] += 1;
    }
    let mut a = Mat::zeros(spec.m, spec.n);
    let (mut r0, mut c0) = (0, 0);
    for k in 0..blocks {
        let (mr, nc) = (row_of_block[k], col_of_block[k]);
        let block = sample_matrix(rng, mr, nc, density);
        for i in 0..mr {
            for j in 0..nc {
                a.set(r0 + i, c0 + j, block.get(i, j));
            }
        }
        // Sparse coupling below the diagonal keeps the block lower
        // triangular shape while tying stages together.
        for i in 0..mr {
            for j in 0..c0 {
                if rng.gen_bool((density * 0.25).min(1.0)) {
                    a.set(r0 + i, j, rng.gen_range(-16..=16) as f64 / 8.0);
                }
            }
        }
        r0 += mr;
        c0 += nc;
    }
    let x = sample_point(rng, spec.n);
    let b = a.mul_vec(&x);
    let c = sample_costs(rng, spec.n);
    let lp = StandardLp::new(c, a, b, settings).ok()?;
    Some((lp, Witness::FeasiblePoint(x)))
}

fn gen_ot(spec: &InstanceSpec) -> Result<Generated, Error> {
    if spec.m == 0 || spec.n == 0 {
        return Err(Error::BadSpec("a transport instance needs suppliers and consumers".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let supplies: Vec<f64> = (0..spec.m).map(|_| rng.gen_range(1..=10) as f64).collect();
    let total: f64 = supplies.iter().sum();
    let mut demands = vec![0.0; spec.n];
    for _ in 0..total as usize {
        demands[rng.gen_range(0..spec.n)] += 1.0;
    }
    let mut costs = Mat::zeros(spec.m, spec.n);
    for i in 0..spec.m {
        for j in 0..spec.n {
            costs.set(i, j, rng.gen_range(0..=9) as f64);
        }
    }
    let p = OtProblem::new(supplies, demands, costs)?;
    Ok(Generated {
        spec: *spec,
        instance: Instance::Ot(p),
        witness: Witness::None,
        density_adjusted: false,
    })
}

fn gen_mcf(spec: &InstanceSpec) -> Result<Generated, Error> {
    if spec.m < 2 || spec.n < spec.m - 1 {
        return Err(Error::BadSpec(format!(
            "a flow instance needs >= 2 nodes and >= nodes-1 arcs, got {} nodes {} arcs",
            spec.m, spec.n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let t = rng.gen_range(1..=5) as f64;
    let mut arcs = Vec::with_capacity(spec.n);
    // A planted path from node 0 to the last node keeps `t` units
    // routable whatever the random arcs do.
    for v in 0..spec.m - 1 {
        let cap = rng.gen_range(t as i64..=10) as f64;
        arcs.push(McfArc::new(v, v + 1, rng.gen_range(0..=9) as f64, cap));
    }
    while arcs.len() < spec.n {
        let from = rng.gen_range(0..spec.m);
        let to = rng.gen_range(0..spec.m);
        if from == to {
            continue;
        }
        arcs.push(McfArc::new(from, to, rng.gen_range(0..=9) as f64, rng.gen_range(1..=10) as f64));
    }
    let mut supplies = vec![0.0; spec.m];
    supplies[0] = t;
    supplies[spec.m - 1] = -t;
    let p = McfProblem::new(spec.m, arcs, supplies)?;
    Ok(Generated {
        spec: *spec,
        instance: Instance::Mcf(p),
        witness: Witness::None,
        density_adjusted: false,
    })
}

fn verify_witness(lp: &StandardLp, witness: &Witness) -> Result<(), Error> {
    let check = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::BadSpec(format!("generated witness failed its check: {}", what)))
        }
    };
    match witness {
        Witness::FeasiblePoint(x) => {
            check(x.iter().all(|&v| v >= 0.0), "x* >= 0")?;
            check(norm_inf(&lp.residual(x)) <= 1e-9 * (1.0 + norm_inf(&lp.b)), "A x* = b")
        }
        Witness::SeparatingRow(y) => {
            let at_y = lp.a.mul_vec_t(y);
            check(at_y.iter().all(|&v| v <= -0.5), "A'y < 0")?;
            check(dot(&lp.b, y) > 0.0, "b'y > 0")
        }
        Witness::Ray(d) => {
            check(d.iter().all(|&v| v >= 0.0), "d >= 0")?;
            check(norm_inf(&lp.a.mul_vec(d)) <= 1e-9 * (1.0 + lp.a.max_abs()), "A d = 0")?;
            check(dot(&lp.c, d) < -0.5, "c'd < 0")
        }
        Witness::DualPair { y, s } => {
            check(s.iter().all(|&v| v >= 0.0), "s >= 0")?;
            let residual: f64 = (0..lp.n())
                .map(|j| (lp.c[j] - dot(lp.a.col(j), y) - s[j]).abs())
                .fold(0.0, f64::max);
            check(residual <= 1e-9, "c = A'y + s")
        }
        Witness::None => Ok(()),
    }
}
