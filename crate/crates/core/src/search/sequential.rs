use std::collections::BTreeMap;

use super::candidates::{per_spin_candidates, Candidate};
use super::case::{case_order, Case};
use super::tolerances::{Scheme, SearchTolerances};
use crate::error::Result;
use crate::metrics::one_tangle_scaled;
use crate::spin::{compose_matrices, Register, SequenceBlock, SequencePlan, SequenceUnit};
use crate::su2::Mat2;

/// Subset sizes up to this are enumerated exhaustively; larger ones use a
/// beam over spins in register order.
pub const EXACT_SUBSET_LIMIT: usize = 5;

/// Single-block propagators of one candidate for every register spin,
/// indexed by the electron state at block start.
struct Block {
    spin: usize,
    t: f64,
    n: u64,
    duration: f64,
    flips: bool,
    mats: Vec<[Mat2; 2]>,
}

/// Per-spin branch products along a partial plan.
#[derive(Clone)]
struct Path {
    w: Vec<[Mat2; 2]>,
    electron: [usize; 2],
    time: f64,
}

impl Path {
    fn new(l: usize) -> Self {
        Path {
            w: vec![[Mat2::identity(); 2]; l],
            electron: [0, 1],
            time: 0.0,
        }
    }

    fn extend(&self, b: &Block) -> Path {
        let mut next = self.clone();
        for (w, m) in next.w.iter_mut().zip(&b.mats) {
            for j in 0..2 {
                w[j] = m[self.electron[j]] * w[j];
            }
        }
        if b.flips {
            next.electron = [1 - self.electron[0], 1 - self.electron[1]];
        }
        next.time += b.duration;
        next
    }

    fn one_tangle(&self, l: usize) -> f64 {
        let [a, b] = self.w[l];
        let x = 0.5 * (a * b.adjoint()).trace().re;
        one_tangle_scaled((x * x).min(1.0))
    }
}

#[derive(Clone, Debug)]
struct Leaf {
    ep: f64,
    time: f64,
    blocks: Vec<usize>,
}

struct Search<'a> {
    register: &'a Register,
    unit: &'a SequenceUnit,
    tol: &'a SearchTolerances,
    blocks: Vec<Block>,
    /// Block indices per candidate-bearing spin, in register order.
    by_spin: Vec<Vec<usize>>,
    k: usize,
}

impl Search<'_> {
    /// All-spin tolerance checks on a complete path; returns the scaled ep.
    fn score_leaf(&self, path: &Path, targets: &[usize]) -> Option<f64> {
        let mut ep = 1.0;
        for l in 0..self.register.len() {
            let ot = path.one_tangle(l);
            if targets.contains(&l) {
                if ot < self.tol.target_tol {
                    return None;
                }
                ep *= ot;
            } else if ot > self.tol.unwanted_tol {
                return None;
            }
        }
        Some(ep)
    }

    /// Beam pruning: spins that can no longer become targets (not in the
    /// candidate list, or skipped over) must already be within δ_u.
    fn spectators_ok(&self, path: &Path, chosen: &[usize], added: usize, pos: usize) -> bool {
        let targets: Vec<usize> = chosen.iter().chain(std::iter::once(&added)).map(|&b| self.blocks[b].spin).collect();
        (0..self.register.len()).all(|l| {
            if targets.contains(&l) {
                return true;
            }
            let open = self.by_spin[pos + 1..].iter().any(|v| self.blocks[v[0]].spin == l);
            open || path.one_tangle(l) <= self.tol.unwanted_tol
        })
    }

    fn targets_of(&self, blocks: &[usize]) -> Vec<usize> {
        blocks.iter().map(|&b| self.blocks[b].spin).collect()
    }

    fn dfs(&self, start: usize, chosen: &mut Vec<usize>, path: &Path, out: &mut BTreeMap<Vec<usize>, Vec<Leaf>>) {
        if chosen.len() == self.k {
            let targets = self.targets_of(chosen);
            if let Some(ep) = self.score_leaf(path, &targets) {
                out.entry(targets).or_default().push(Leaf {
                    ep,
                    time: path.time,
                    blocks: chosen.clone(),
                });
            }
            return;
        }
        let last = self.by_spin.len() + chosen.len() - self.k;
        for pos in start..=last {
            for &bi in &self.by_spin[pos] {
                let b = &self.blocks[bi];
                if path.time + b.duration > self.tol.t_max {
                    continue;
                }
                let next = path.extend(b);
                chosen.push(bi);
                self.dfs(pos + 1, chosen, &next, out);
                chosen.pop();
            }
        }
    }

    fn beam(&self) -> BTreeMap<Vec<usize>, Vec<Leaf>> {
        // (last spin position, chosen blocks, path)
        let mut level: Vec<(usize, Vec<usize>, Path)> = vec![(0, Vec::new(), Path::new(self.register.len()))];
        for depth in 0..self.k {
            let last = self.by_spin.len() + depth + 1 - self.k;
            // (parent, position, block, score, time)
            let mut moves: Vec<(usize, usize, usize, f64, f64)> = Vec::new();
            for (pi, (start, chosen, path)) in level.iter().enumerate() {
                for pos in *start..last.max(*start) {
                    for &bi in &self.by_spin[pos] {
                        let b = &self.blocks[bi];
                        let time = path.time + b.duration;
                        if time > self.tol.t_max {
                            continue;
                        }
                        let next = path.extend(b);
                        if !self.spectators_ok(&next, chosen, bi, pos) {
                            continue;
                        }
                        let score: f64 = chosen
                            .iter()
                            .chain(std::iter::once(&bi))
                            .map(|&c| next.one_tangle(self.blocks[c].spin))
                            .product();
                        moves.push((pi, pos, bi, score, time));
                    }
                }
            }
            moves.sort_by(|a, b| {
                b.3.total_cmp(&a.3).then(a.4.total_cmp(&b.4)).then_with(|| {
                    let pa = level[a.0].1.iter().chain(std::iter::once(&a.2));
                    let pb = level[b.0].1.iter().chain(std::iter::once(&b.2));
                    pa.cmp(pb)
                })
            });
            moves.truncate(self.tol.beam_width);
            level = moves
                .into_iter()
                .map(|(pi, pos, bi, _, _)| {
                    let (_, chosen, path) = &level[pi];
                    let mut c = chosen.clone();
                    c.push(bi);
                    (pos + 1, c, path.extend(&self.blocks[bi]))
                })
                .collect();
        }
        let mut out: BTreeMap<Vec<usize>, Vec<Leaf>> = BTreeMap::new();
        for (_, chosen, path) in level {
            let targets = self.targets_of(&chosen);
            if let Some(ep) = self.score_leaf(&path, &targets) {
                out.entry(targets).or_default().push(Leaf {
                    ep,
                    time: path.time,
                    blocks: chosen,
                });
            }
        }
        out
    }

    fn plan_of(&self, blocks: &[usize]) -> Result<SequencePlan> {
        let blocks = blocks
            .iter()
            .map(|&i| SequenceBlock::new(self.unit.clone(), self.blocks[i].t, self.blocks[i].n))
            .collect::<Result<Vec<_>>>()?;
        Ok(SequencePlan::new(blocks))
    }

    /// Best leaf of a subset that passes the full metric evaluation.
    fn select(&self, targets: &[usize], mut leaves: Vec<Leaf>) -> Result<Option<Case>> {
        leaves.sort_by(|a, b| {
            b.ep.total_cmp(&a.ep)
                .then(a.time.total_cmp(&b.time))
                .then(a.blocks.cmp(&b.blocks))
        });
        for leaf in leaves {
            let plan = self.plan_of(&leaf.blocks)?;
            if let Some(c) = Case::evaluate(self.register, Scheme::Sequential, targets, plan, self.tol)? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }
}

/// Up to `cap` candidates, alternating between the best one-tangle (the
/// list order) and the shortest duration so long blocks cannot crowd out
/// combinations that fit in T_max.
fn capped(list: &[Candidate], cap: usize) -> Vec<&Candidate> {
    if list.len() <= cap {
        return list.iter().collect();
    }
    let mut by_time: Vec<usize> = (0..list.len()).collect();
    by_time.sort_by(|&a, &b| list[a].duration().total_cmp(&list[b].duration()).then(a.cmp(&b)));
    let mut taken = vec![false; list.len()];
    let mut out = Vec::with_capacity(cap);
    let (mut i, mut j) = (0, 0);
    while out.len() < cap {
        let pick = if out.len() % 2 == 0 {
            while taken[i] {
                i += 1;
            }
            i
        } else {
            while taken[by_time[j]] {
                j += 1;
            }
            by_time[j]
        };
        taken[pick] = true;
        out.push(pick);
    }
    out.sort_unstable();
    out.into_iter().map(|p| &list[p]).collect()
}

fn build_blocks(
    register: &Register,
    unit: &SequenceUnit,
    cands: &BTreeMap<usize, Vec<Candidate>>,
    cap: usize,
) -> Result<(Vec<Block>, Vec<Vec<usize>>)> {
    let mut blocks = Vec::new();
    let mut by_spin = Vec::new();
    for list in cands.values() {
        let mut idx = Vec::new();
        for c in capped(list, cap) {
            let plan = SequencePlan::single(SequenceBlock::new(unit.clone(), c.t, c.n)?);
            let mats = register
                .spins()
                .iter()
                .map(|s| compose_matrices(s, register.omega_larmor(), &plan).map(|(a, b)| [a, b]))
                .collect::<Result<Vec<_>>>()?;
            idx.push(blocks.len());
            blocks.push(Block {
                spin: c.spin,
                t: c.t,
                n: c.n,
                duration: plan.total_time(),
                flips: unit.flips_electron() && c.n % 2 == 1,
                mats,
            });
        }
        by_spin.push(idx);
    }
    Ok((blocks, by_spin))
}

/// Sequential scheme: one block per target spin, blocks in register order.
/// Per target subset the combination with the largest entangling power that
/// meets every tolerance is kept.
pub fn search_sequential(register: &Register, unit: &SequenceUnit, tol: &SearchTolerances) -> Result<Vec<Case>> {
    let cands = per_spin_candidates(register, unit, tol)?;
    search_sequential_from(register, unit, tol, &cands)
}

/// As [`search_sequential`] with precomputed candidates.
pub fn search_sequential_from(
    register: &Register,
    unit: &SequenceUnit,
    tol: &SearchTolerances,
    cands: &BTreeMap<usize, Vec<Candidate>>,
) -> Result<Vec<Case>> {
    tol.validate()?;
    let k = tol.ghz_size - 1;
    if cands.len() < k {
        return Ok(Vec::new());
    }
    let (blocks, by_spin) = build_blocks(register, unit, cands, tol.per_spin_cap())?;
    let s = Search {
        register,
        unit,
        tol,
        blocks,
        by_spin,
        k,
    };
    let groups = if k <= EXACT_SUBSET_LIMIT {
        let mut out = BTreeMap::new();
        s.dfs(0, &mut Vec::new(), &Path::new(register.len()), &mut out);
        out
    } else {
        s.beam()
    };
    let mut cases = Vec::new();
    for (targets, leaves) in groups {
        if let Some(c) = s.select(&targets, leaves)? {
            cases.push(c);
        }
    }
    cases.sort_by(case_order);
    Ok(cases)
}
