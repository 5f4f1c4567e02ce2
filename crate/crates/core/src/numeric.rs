//! Seeded numeric spot checks on the solution manifold.
//!
//! A sample point assigns floats to jet coordinates: free coordinates are
//! drawn uniformly with magnitude in [0.5, 2], coordinates matched by a
//! rewrite rule are computed from the rule's prolonged right-hand side, and
//! every single-argument arbitrary function is realized once per run as a
//! fixed random polynomial so that its derivative atoms stay consistent.
//! Points that land too close to a pole of any denominator are resampled.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::expr::{eval_numeric, Atom, Expr, Sym};
use crate::manifold::Ranking;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_POINTS: usize = 100;

const DEN_GUARD: f64 = 1e-6;
const ATTEMPT_CAP: usize = 100;
const FUNC_DEGREE: usize = 5;

#[derive(Debug, Clone)]
pub struct NumericConfig {
    pub seed: u64,
    pub tol: f64,
    pub points: usize,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
            points: DEFAULT_POINTS,
        }
    }
}

/// Coefficients (low degree first) of the polynomial standing in for the
/// arbitrary function `name`. Depends only on the run seed and the name, so
/// f, f', f'' at one point are derivatives of a single function.
fn func_poly(seed: u64, name: &Sym) -> Vec<f64> {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in name.as_str().bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ h);
    (0..=FUNC_DEGREE).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn poly_deriv_at(coeffs: &[f64], order: usize, t: f64) -> f64 {
    let mut c: Vec<f64> = coeffs.to_vec();
    for _ in 0..order {
        if c.len() <= 1 {
            return 0.0;
        }
        c = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, v)| k as f64 * v)
            .collect();
    }
    c.iter().rev().fold(0.0, |acc, v| acc * t + v)
}

struct Sampler<'a> {
    ranking: &'a Ranking,
    rng: ChaCha8Rng,
    run_seed: u64,
    values: BTreeMap<Atom, f64>,
    busy: BTreeSet<Atom>,
}

impl<'a> Sampler<'a> {
    fn draw(&mut self) -> f64 {
        let mag = self.rng.gen_range(0.5..=2.0);
        if self.rng.gen_bool(0.5) {
            mag
        } else {
            -mag
        }
    }

    fn resolve(&mut self, a: &Atom) -> Result<f64> {
        if let Some(v) = self.values.get(a) {
            return Ok(*v);
        }
        // A cycle here means the ranking's rules feed into each other.
        if !self.busy.insert(a.clone()) {
            return Err(CoreError::ReductionDiverged(self.values.len()));
        }
        let v = if let Some((rule, k)) = self.ranking.match_atom(a) {
            let rhs = self.ranking.prolonged_rhs(rule, &k)?;
            self.eval(&rhs)?
        } else {
            match a {
                Atom::Func { name, args, index } if args.len() == 1 => {
                    let at = self.resolve(&Atom::indep(args[0].clone()))?;
                    poly_deriv_at(&func_poly(self.run_seed, name), index.order(), at)
                }
                _ => self.draw(),
            }
        };
        self.busy.remove(a);
        self.values.insert(a.clone(), v);
        Ok(v)
    }

    fn eval(&mut self, e: &Expr) -> Result<f64> {
        for a in e.atoms() {
            self.resolve(&a)?;
        }
        let den = eval_numeric(&Expr::from_poly(e.den().clone()), &self.values)?;
        if den.abs() < DEN_GUARD {
            return Err(CoreError::NumericSingularity);
        }
        let num = eval_numeric(&Expr::from_poly(e.num().clone()), &self.values)?;
        Ok(num / den)
    }
}

fn point_residual(ranking: &Ranking, terms: &[Expr], cfg: &NumericConfig, idx: usize) -> Result<f64> {
    for attempt in 0..ATTEMPT_CAP {
        let seed = cfg.seed
            ^ (idx as u64).wrapping_mul(0x9E3779B97F4A7C15)
            ^ (attempt as u64).wrapping_mul(0xD1B54A32D192ED03);
        let mut s = Sampler {
            ranking,
            rng: ChaCha8Rng::seed_from_u64(seed),
            run_seed: cfg.seed,
            values: BTreeMap::new(),
            busy: BTreeSet::new(),
        };
        let vals: Result<Vec<f64>> = terms.iter().map(|t| s.eval(t)).collect();
        match vals {
            Ok(vs) => {
                let total: f64 = vs.iter().sum();
                let scale = vs.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
                return Ok(total.abs() / scale);
            }
            Err(CoreError::NumericSingularity) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(CoreError::SamplingFailed(ATTEMPT_CAP))
}

/// Largest relative residual of sum(terms) over `cfg.points` sample points.
/// The scale is the sum of the terms' magnitudes (floored at 1), so a residual
/// near machine epsilon certifies cancellation rather than smallness.
pub fn max_residual(ranking: &Ranking, terms: &[Expr], cfg: &NumericConfig) -> Result<f64> {
    #[cfg(feature = "parallel")]
    {
        let collected: Result<Vec<f64>> = (0..cfg.points)
            .into_par_iter()
            .map(|idx| point_residual(ranking, terms, cfg, idx))
            .collect();
        Ok(collected?.into_iter().fold(0.0_f64, f64::max))
    }
    #[cfg(not(feature = "parallel"))]
    max_residual_sequential(ranking, terms, cfg)
}

/// Single-threaded scan over the same per-point seeds. Points are seeded
/// independently of scan order, so this agrees with `max_residual` exactly;
/// it stays compiled under every feature set so the two can be benchmarked
/// against each other.
pub fn max_residual_sequential(
    ranking: &Ranking,
    terms: &[Expr],
    cfg: &NumericConfig,
) -> Result<f64> {
    let collected: Result<Vec<f64>> =
        (0..cfg.points).map(|idx| point_residual(ranking, terms, cfg, idx)).collect();
    Ok(collected?.into_iter().fold(0.0_f64, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::MultiIndex;
    use crate::jet::{total_derivative, JetSpace};
    use crate::manifold::{solve_for_leading, Ranking};
    use crate::system::DiffSystem;

    fn sym(s: &str) -> Sym {
        Sym::new(s)
    }

    fn jet(dep: &str, idx: &[&str]) -> Expr {
        Expr::from_atom(Atom::jet(dep, MultiIndex::new(idx.iter().map(Sym::new).collect())))
    }

    fn dep(d: &str) -> Expr {
        Expr::from_atom(Atom::dep(d))
    }

    fn kdv() -> DiffSystem {
        let space = JetSpace::new(vec![sym("t"), sym("x")], vec![sym("u")], vec![]).unwrap();
        let f = &(&jet("u", &["t"]) - &(&dep("u") * &jet("u", &["x"]))) - &jet("u", &["x", "x", "x"]);
        DiffSystem::new(space, vec![(sym("F"), f, None)]).unwrap()
    }

    #[test]
    fn equations_vanish_at_sampled_points() {
        let sys = kdv();
        let ranking = solve_for_leading(&sys).unwrap();
        let terms = vec![sys.equations()[0].expr().clone()];
        let r = max_residual(&ranking, &terms, &NumericConfig::default()).unwrap();
        assert!(r < 1e-12, "residual {r}");
    }

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let sys = kdv();
        let ranking = solve_for_leading(&sys).unwrap();
        // A nonzero expression small enough that the scale floor is active,
        // so the residual varies continuously with the sample.
        let terms = vec![&Expr::rat(1, 8) * &dep("u")];
        let cfg = NumericConfig::default();
        let a = max_residual(&ranking, &terms, &cfg).unwrap();
        let b = max_residual(&ranking, &terms, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a > 0.0);
        let other = NumericConfig {
            seed: 7,
            ..NumericConfig::default()
        };
        let c = max_residual(&ranking, &terms, &other).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn scan_order_does_not_change_the_result() {
        let sys = kdv();
        let ranking = solve_for_leading(&sys).unwrap();
        let terms = vec![&Expr::rat(1, 8) * &dep("u"), jet("u", &["x"])];
        let cfg = NumericConfig::default();
        let par = max_residual(&ranking, &terms, &cfg).unwrap();
        let seq = max_residual_sequential(&ranking, &terms, &cfg).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn divergence_of_heat_flux_is_zero_numerically() {
        // C = (phi u, u phi_x - phi u_x) for u_t = u_xx and phi_t + phi_xx = 0.
        let t = sym("t");
        let x = sym("x");
        let space = JetSpace::new(
            vec![t.clone(), x.clone()],
            vec![sym("u")],
            vec![(sym("phi"), vec![t.clone(), x.clone()])],
        )
        .unwrap();
        let heat = &jet("u", &["t"]) - &jet("u", &["x", "x"]);
        let phi = |idx: &[&str]| {
            Expr::from_atom(Atom::func(
                "phi",
                vec![t.clone(), x.clone()],
                MultiIndex::new(idx.iter().map(Sym::new).collect()),
            ))
        };
        let constraint = &phi(&["t"]) + &phi(&["x", "x"]);
        let ranking = Ranking::build(
            &space,
            vec![
                (sym("F"), heat, Atom::jet("u", MultiIndex::single(t.clone()))),
                (
                    sym("G"),
                    constraint,
                    Atom::func("phi", vec![t.clone(), x.clone()], MultiIndex::single(t.clone())),
                ),
            ],
        )
        .unwrap();
        let c_t = &phi(&[]) * &dep("u");
        let c_x = &(&dep("u") * &phi(&["x"])) - &(&phi(&[]) * &jet("u", &["x"]));
        let terms = vec![
            total_derivative(&space, &c_t, &t).unwrap(),
            total_derivative(&space, &c_x, &x).unwrap(),
        ];
        let r = max_residual(&ranking, &terms, &NumericConfig::default()).unwrap();
        assert!(r < 1e-12, "residual {r}");
    }

    #[test]
    fn single_argument_functions_use_one_realization() {
        // d/dt of f(t)^2 equals 2 f f' only if f and f' come from one function.
        let t = sym("t");
        let space = JetSpace::new(
            vec![t.clone(), sym("x")],
            vec![sym("u")],
            vec![(sym("f"), vec![t.clone()])],
        )
        .unwrap();
        let heat = &jet("u", &["t"]) - &jet("u", &["x", "x"]);
        let sys = DiffSystem::new(space.clone(), vec![(sym("F"), heat, None)]).unwrap();
        let ranking = solve_for_leading(&sys).unwrap();
        let f = Expr::from_atom(Atom::func("f", vec![t.clone()], MultiIndex::empty()));
        let fp = Expr::from_atom(Atom::func("f", vec![t.clone()], MultiIndex::single(t.clone())));
        let sq = &f * &f;
        let lhs = total_derivative(&space, &sq, &t).unwrap();
        let terms = vec![lhs, -&(&(&Expr::int(2) * &f) * &fp)];
        let r = max_residual(&ranking, &terms, &NumericConfig::default()).unwrap();
        assert!(r < 1e-12, "residual {r}");
    }

    #[test]
    fn permanently_singular_rules_fail_with_diagnosis() {
        // Rule u_t -> u makes the denominator u_t - u vanish exactly.
        let space = JetSpace::new(vec![sym("t"), sym("x")], vec![sym("u")], vec![]).unwrap();
        let f = &jet("u", &["t"]) - &dep("u");
        let sys = DiffSystem::new(space, vec![(sym("F"), f.clone(), None)]).unwrap();
        let ranking = solve_for_leading(&sys).unwrap();
        let bad = Expr::one().try_div(&f).unwrap();
        let err = max_residual(&ranking, &[bad], &NumericConfig::default()).unwrap_err();
        assert!(matches!(err, CoreError::SamplingFailed(_)));
    }

    #[test]
    fn polynomial_derivative_evaluation() {
        // p = 1 + t + t^2: p'(3) = 7, p''(anything) = 2, p''''' = 0.
        let c = [1.0, 1.0, 1.0];
        assert_eq!(poly_deriv_at(&c, 0, 3.0), 13.0);
        assert_eq!(poly_deriv_at(&c, 1, 3.0), 7.0);
        assert_eq!(poly_deriv_at(&c, 2, 100.0), 2.0);
        assert_eq!(poly_deriv_at(&c, 5, 1.0), 0.0);
    }
}
