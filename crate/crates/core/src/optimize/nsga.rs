use std::cmp::Ordering;
use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::random::draw_genome;
use super::sort::{crowding_distance, non_dominated_sort};
use super::{
    check_size, select_final, Evaluation, LayoutEvaluator, ObjectiveVector, OptimizeError,
    ParetoSolution,
};
use crate::geometry::{ArrayLayout, PositionGrid, UvConfig};
use crate::par;

const MAX_INITIAL_REDRAWS: usize = 100;

/// Genetic algorithm settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub population: usize,
    pub generations: usize,
    pub crossover_fraction: f64,
    pub pareto_fraction: f64,
    /// Per-gene mutation probability; `None` means `2 / n_elements`.
    pub mutation_rate: Option<f64>,
    pub seed: u64,
}

impl GaParams {
    /// Population 200, 100 generations.
    pub fn desk(seed: u64) -> Self {
        Self {
            population: 200,
            generations: 100,
            crossover_fraction: 0.8,
            pareto_fraction: 0.6,
            mutation_rate: None,
            seed,
        }
    }

    /// Population 500, 200 generations.
    pub fn paper_scale(seed: u64) -> Self {
        Self {
            population: 500,
            generations: 200,
            ..Self::desk(seed)
        }
    }

    pub fn mutation_rate_for(&self, n_elements: usize) -> f64 {
        self.mutation_rate
            .unwrap_or(2.0 / n_elements.max(1) as f64)
    }

    pub fn validate(&self) -> Result<(), OptimizeError> {
        let bad = |m: String| Err(OptimizeError::InvalidParams(m));
        if self.population < 4 || !self.population.is_multiple_of(2) {
            return bad(format!(
                "population must be even and at least 4, got {}",
                self.population
            ));
        }
        if self.generations < 1 {
            return bad("generations must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.crossover_fraction) {
            return bad(format!("crossover fraction {}", self.crossover_fraction));
        }
        if !(self.pareto_fraction > 0.0 && self.pareto_fraction <= 1.0) {
            return bad(format!("pareto fraction {}", self.pareto_fraction));
        }
        if let Some(m) = self.mutation_rate {
            if !(0.0..=1.0).contains(&m) {
                return bad(format!("mutation rate {m}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Best unique count among feasible members.
    pub best_unique: usize,
    pub mean_unique: f64,
}

/// Everything a run produced, as written to the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub grid: String,
    pub n_elements: usize,
    pub params: GaParams,
    pub mutation_rate: f64,
    pub history: Vec<GenerationStats>,
    pub front: Vec<ParetoSolution>,
    pub selected: ParetoSolution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub front: Vec<ParetoSolution>,
    pub report: RunReport,
}

/// Resumable engine state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub grid: String,
    pub slots: usize,
    pub n_elements: usize,
    pub uv: UvConfig,
    pub params: GaParams,
    pub generation: usize,
    pub rng: ChaCha8Rng,
    pub population: Vec<Vec<u32>>,
    pub history: Vec<GenerationStats>,
}

impl Checkpoint {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, OptimizeError> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Debug, Clone)]
struct Individual {
    genome: Vec<u32>,
    eval: Evaluation,
}

/// Pareto rank and crowding distance per member. Infeasible members share
/// one rank after every feasible front, with zero crowding.
fn rank_members(members: &[Individual]) -> (Vec<usize>, Vec<f64>) {
    let feasible: Vec<usize> = (0..members.len())
        .filter(|&i| members[i].eval.is_feasible())
        .collect();
    let objs: Vec<ObjectiveVector> = feasible
        .iter()
        .map(|&i| members[i].eval.objectives.expect("feasible"))
        .collect();
    let fronts = non_dominated_sort(&objs);
    let mut rank = vec![fronts.len(); members.len()];
    let mut crowd = vec![0.0; members.len()];
    for (r, front) in fronts.iter().enumerate() {
        let d = crowding_distance(&objs, front);
        for (&k, dist) in front.iter().zip(d) {
            rank[feasible[k]] = r;
            crowd[feasible[k]] = dist;
        }
    }
    (rank, crowd)
}

/// Survivor order: rank, then crowding (descending), then more unique
/// samples, then genome.
fn survivor_order<'a>(
    members: &'a [Individual],
    rank: &[usize],
    crowd: &[f64],
) -> impl Fn(&usize, &usize) -> Ordering + 'a {
    let rank = rank.to_vec();
    let crowd = crowd.to_vec();
    move |&a, &b| {
        rank[a]
            .cmp(&rank[b])
            .then(crowd[b].total_cmp(&crowd[a]))
            .then(members[b].eval.unique.cmp(&members[a].eval.unique))
            .then_with(|| members[a].genome.cmp(&members[b].genome))
    }
}

/// NSGA-II over sets of slot ids.
///
/// Each generation draws `population` children by binary tournament on
/// (rank, crowding), uniform crossover with probability
/// `crossover_fraction` and per-gene mutation; duplicates created by either
/// operator are replaced by uniform draws from the unused slots. Parents and
/// children are pooled, duplicate genomes dropped, and the best `population`
/// survive. The loop is sequential on one ChaCha8 stream; only fitness
/// evaluation runs in parallel.
pub struct GaEngine<'g> {
    grid: &'g PositionGrid,
    eval: LayoutEvaluator,
    uv: UvConfig,
    n: usize,
    params: GaParams,
    rng: ChaCha8Rng,
    generation: usize,
    pop: Vec<Individual>,
    history: Vec<GenerationStats>,
}

impl<'g> GaEngine<'g> {
    pub fn new(
        grid: &'g PositionGrid,
        n_elements: usize,
        uv: UvConfig,
        params: GaParams,
    ) -> Result<Self, OptimizeError> {
        check_size(grid, n_elements)?;
        params.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let eval = LayoutEvaluator::new(grid, uv);
        let mut pop = Vec::new();
        for attempt in 0..=MAX_INITIAL_REDRAWS {
            let genomes: Vec<Vec<u32>> = (0..params.population)
                .map(|_| draw_genome(&mut rng, grid.len(), n_elements))
                .collect();
            pop = evaluate_all(&eval, genomes);
            if pop.iter().any(|m| m.eval.is_feasible()) {
                break;
            }
            if attempt == MAX_INITIAL_REDRAWS {
                return Err(OptimizeError::InfeasiblePopulation {
                    attempts: MAX_INITIAL_REDRAWS,
                    population: params.population,
                    detail: format!(
                        "every sampled {n_elements}-element layout on '{}' has an axis \
                         with no spread",
                        grid.name()
                    ),
                });
            }
        }
        let mut engine = Self {
            grid,
            eval,
            uv,
            n: n_elements,
            params,
            rng,
            generation: 0,
            pop,
            history: Vec::new(),
        };
        engine.record();
        Ok(engine)
    }

    pub fn resume(
        grid: &'g PositionGrid,
        checkpoint: Checkpoint,
    ) -> Result<Self, OptimizeError> {
        if checkpoint.grid != grid.name() || checkpoint.slots != grid.len() {
            return Err(OptimizeError::CheckpointMismatch(format!(
                "checkpoint is for '{}' ({} slots), grid is '{}' ({} slots)",
                checkpoint.grid,
                checkpoint.slots,
                grid.name(),
                grid.len()
            )));
        }
        check_size(grid, checkpoint.n_elements)?;
        checkpoint.params.validate()?;
        if checkpoint.population.len() != checkpoint.params.population {
            return Err(OptimizeError::CheckpointMismatch(
                "population size differs from params".into(),
            ));
        }
        for g in &checkpoint.population {
            let distinct: BTreeSet<u32> = g.iter().copied().collect();
            if g.len() != checkpoint.n_elements
                || distinct.len() != g.len()
                || g.iter().any(|&id| id == 0 || id as usize > grid.len())
                || !g.windows(2).all(|w| w[0] < w[1])
            {
                return Err(OptimizeError::CheckpointMismatch(format!(
                    "invalid genome {g:?}"
                )));
            }
        }
        let eval = LayoutEvaluator::new(grid, checkpoint.uv);
        let pop = evaluate_all(&eval, checkpoint.population);
        Ok(Self {
            grid,
            eval,
            uv: checkpoint.uv,
            n: checkpoint.n_elements,
            params: checkpoint.params,
            rng: checkpoint.rng,
            generation: checkpoint.generation,
            pop,
            history: checkpoint.history,
        })
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn is_done(&self) -> bool {
        self.generation >= self.params.generations
    }

    pub fn params(&self) -> &GaParams {
        &self.params
    }

    pub fn history(&self) -> &[GenerationStats] {
        &self.history
    }

    /// Current population genomes (sorted slot ids).
    pub fn population(&self) -> Vec<&[u32]> {
        self.pop.iter().map(|m| m.genome.as_slice()).collect()
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            grid: self.grid.name().to_string(),
            slots: self.grid.len(),
            n_elements: self.n,
            uv: self.uv,
            params: self.params,
            generation: self.generation,
            rng: self.rng.clone(),
            population: self.pop.iter().map(|m| m.genome.clone()).collect(),
            history: self.history.clone(),
        }
    }

    fn record(&mut self) {
        let best = self
            .pop
            .iter()
            .filter(|m| m.eval.is_feasible())
            .map(|m| m.eval.unique)
            .max()
            .unwrap_or(0);
        let mean =
            self.pop.iter().map(|m| m.eval.unique as f64).sum::<f64>() / self.pop.len() as f64;
        self.history.push(GenerationStats {
            generation: self.generation,
            best_unique: best,
            mean_unique: mean,
        });
    }

    fn tournament(&mut self, rank: &[usize], crowd: &[f64]) -> usize {
        let p = self.pop.len();
        let a = self.rng.random_range(0..p);
        let b = self.rng.random_range(0..p);
        let a_wins = rank[a]
            .cmp(&rank[b])
            .then(crowd[b].total_cmp(&crowd[a]))
            .then(a.cmp(&b))
            .is_le();
        if a_wins {
            a
        } else {
            b
        }
    }

    /// Replaces repeated ids (after the first occurrence) by uniform draws
    /// from the unused slots, then sorts.
    fn repair(&mut self, genome: &mut [u32]) {
        let slots = self.grid.len();
        let mut used = vec![false; slots + 1];
        let mut dup = Vec::new();
        for (k, &id) in genome.iter().enumerate() {
            if used[id as usize] {
                dup.push(k);
            } else {
                used[id as usize] = true;
            }
        }
        for k in dup {
            let free: Vec<u32> = (1..=slots as u32).filter(|&id| !used[id as usize]).collect();
            let id = free[self.rng.random_range(0..free.len())];
            used[id as usize] = true;
            genome[k] = id;
        }
        genome.sort_unstable();
    }

    fn mutate(&mut self, genome: &mut [u32], rate: f64) {
        let slots = self.grid.len();
        if rate <= 0.0 || genome.len() >= slots {
            return;
        }
        for k in 0..genome.len() {
            if self.rng.random_bool(rate) {
                let free: Vec<u32> = (1..=slots as u32)
                    .filter(|id| !genome.contains(id))
                    .collect();
                genome[k] = free[self.rng.random_range(0..free.len())];
            }
        }
        genome.sort_unstable();
    }

    /// Advances one generation.
    pub fn step(&mut self) {
        let (rank, crowd) = rank_members(&self.pop);
        let size = self.params.population;
        let rate = self.params.mutation_rate_for(self.n);
        let mut children = Vec::with_capacity(size);
        while children.len() < size {
            let a = self.tournament(&rank, &crowd);
            let b = self.tournament(&rank, &crowd);
            let mut c1 = self.pop[a].genome.clone();
            let mut c2 = self.pop[b].genome.clone();
            if self.rng.random_bool(self.params.crossover_fraction) {
                for k in 0..self.n {
                    if self.rng.random_bool(0.5) {
                        std::mem::swap(&mut c1[k], &mut c2[k]);
                    }
                }
                self.repair(&mut c1);
                self.repair(&mut c2);
            }
            self.mutate(&mut c1, rate);
            self.mutate(&mut c2, rate);
            children.push(c1);
            children.push(c2);
        }
        let children = evaluate_all(&self.eval, children);

        let mut seen = BTreeSet::new();
        let pool: Vec<Individual> = std::mem::take(&mut self.pop)
            .into_iter()
            .chain(children)
            .filter(|m| seen.insert(m.genome.clone()))
            .collect();
        let (rank, crowd) = rank_members(&pool);
        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.sort_by(survivor_order(&pool, &rank, &crowd));
        self.pop = order
            .iter()
            .cycle()
            .take(size)
            .map(|&i| pool[i].clone())
            .collect();
        self.generation += 1;
        self.record();
    }

    /// First feasible front of the current population, without duplicate
    /// genomes, cut to `ceil(pareto_fraction * population)` by crowding and
    /// listed best-unique first.
    pub fn front(&self) -> Vec<ParetoSolution> {
        let mut seen = BTreeSet::new();
        let distinct: Vec<Individual> = self
            .pop
            .iter()
            .filter(|m| seen.insert(m.genome.clone()))
            .cloned()
            .collect();
        let (rank, crowd) = rank_members(&distinct);
        let first: Vec<usize> = (0..distinct.len())
            .filter(|&i| rank[i] == 0 && distinct[i].eval.is_feasible())
            .collect();
        let limit = (self.params.pareto_fraction * self.params.population as f64).ceil() as usize;
        let mut keep = first;
        keep.sort_by(survivor_order(&distinct, &rank, &crowd));
        keep.truncate(limit);
        let mut front: Vec<ParetoSolution> = keep
            .into_iter()
            .map(|i| ParetoSolution {
                layout: ArrayLayout::new(self.grid.name(), distinct[i].genome.clone())
                    .expect("genomes are distinct"),
                objectives: distinct[i].eval.objectives.expect("feasible"),
            })
            .collect();
        front.sort_by(|a, b| {
            let (x, y) = (&a.objectives, &b.objectives);
            x.neg_unique
                .cmp(&y.neg_unique)
                .then(x.worst_res.total_cmp(&y.worst_res))
                .then(x.neg_worst_fov.total_cmp(&y.neg_worst_fov))
                .then_with(|| a.layout.indices().cmp(b.layout.indices()))
        });
        front
    }

    /// Runs the remaining generations and builds the outcome.
    pub fn run(mut self) -> Result<GaOutcome, OptimizeError> {
        while !self.is_done() {
            self.step();
        }
        self.finish()
    }

    pub fn finish(&self) -> Result<GaOutcome, OptimizeError> {
        let front = self.front();
        let selected = select_final(&front)?.clone();
        let report = RunReport {
            grid: self.grid.name().to_string(),
            n_elements: self.n,
            params: self.params,
            mutation_rate: self.params.mutation_rate_for(self.n),
            history: self.history.clone(),
            front: front.clone(),
            selected,
        };
        Ok(GaOutcome { front, report })
    }
}

fn evaluate_all(eval: &LayoutEvaluator, genomes: Vec<Vec<u32>>) -> Vec<Individual> {
    let evals = par::map(&genomes, |g| eval.evaluate(g));
    genomes
        .into_iter()
        .zip(evals)
        .map(|(genome, eval)| Individual { genome, eval })
        .collect()
}

/// Runs the genetic algorithm to completion.
pub fn ga_multiobjective(
    grid: &PositionGrid,
    n_elements: usize,
    uv: UvConfig,
    params: GaParams,
) -> Result<GaOutcome, OptimizeError> {
    GaEngine::new(grid, n_elements, uv, params)?.run()
}
