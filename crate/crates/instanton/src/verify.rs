//! Named verification suites over the library, with per-property residual
//! reports.  Every suite is seed-deterministic; exact (symbolic) properties
//! report a violation count against tolerance zero.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde_json::{json, Value};

use crate::autgrp::{self, Letter, Potential, TameGenerator};
use crate::error::{Error, Result};
use crate::gauss::GaussRat;
use crate::hat::{embed, from_hats, is_costable, is_regular, is_stable, to_hats, HatPair};
use crate::linalg::{self, Mat};
use crate::ncalg::{self, necklace_bracket, to_necklace, Arrow, Necklace, PathPoly};
use crate::rep::{self, points_equal};
use crate::sample::sample_on_shell;
use crate::{darboux, slice, C64};

pub const SUITES: &[&str] = &["necklace", "moment", "slice", "darboux", "flows", "autgrp"];

/// Seed, problem size, and tolerance overrides for a verification run.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub k: usize,
    pub tau: C64,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 1,
            k: 3,
            tau: Complex64::new(1.0, 0.0),
            tolerances: BTreeMap::new(),
        }
    }
}

impl VerifyConfig {
    fn tol(&self, name: &str, default: f64) -> f64 {
        *self.tolerances.get(name).unwrap_or(&default)
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.residual <= self.tol
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "pass": self.passed(),
            "max_residual": self.max_residual(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "residual": c.residual,
                "tol": c.tol,
                "pass": c.pass(),
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {}: {}",
            self.suite,
            if self.passed() { "pass" } else { "FAIL" }
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "  {:<40} residual {:>12.5e}  tol {:>9.1e}  {}",
                c.name,
                c.residual,
                c.tol,
                if c.pass() { "pass" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

/// Runs one suite by name, or every suite for `all`.
pub fn run(suite: &str, cfg: &VerifyConfig) -> Result<Vec<Report>> {
    match suite {
        "necklace" => Ok(vec![suite_necklace(cfg)?]),
        "moment" => Ok(vec![suite_moment(cfg)?]),
        "slice" => Ok(vec![suite_slice(cfg)?]),
        "darboux" => Ok(vec![suite_darboux(cfg)?]),
        "flows" => Ok(vec![suite_flows(cfg)?]),
        "autgrp" => Ok(vec![suite_autgrp(cfg)?]),
        "all" => SUITES.iter().map(|s| Ok(run(s, cfg)?.remove(0))).collect(),
        other => Err(Error::Invalid(format!("unknown suite {other:?}"))),
    }
}

fn c(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

fn cls(arrows: &[Arrow]) -> Necklace {
    to_necklace(&PathPoly::word(arrows))
}

fn suite_necklace(cfg: &VerifyConfig) -> Result<Report> {
    let mut checks = Vec::new();
    let basket = [
        cls(&[Arrow::A]),
        cls(&[Arrow::AStar]),
        cls(&[Arrow::A, Arrow::AStar]),
        cls(&[Arrow::X, Arrow::XStar]),
        cls(&[Arrow::X, Arrow::Y]),
        cls(&[Arrow::YStar, Arrow::Y]),
        cls(&[Arrow::A, Arrow::X, Arrow::Y]),
        cls(&[Arrow::X, Arrow::XStar, Arrow::A, Arrow::AStar]),
    ];

    let mut bad = 0usize;
    for f in &basket {
        for g in &basket {
            let fg = necklace_bracket(f, g)?;
            let gf = necklace_bracket(g, f)?;
            if !fg.add(&gf).is_zero() {
                bad += 1;
            }
        }
    }
    checks.push(Check {
        name: "bracket-antisymmetry".into(),
        residual: bad as f64,
        tol: cfg.tol("necklace", 0.0),
    });

    let mut bad = 0usize;
    for f in &basket[..5] {
        for g in &basket[..5] {
            for h in &basket[..5] {
                let t = necklace_bracket(f, &necklace_bracket(g, h)?)?
                    .add(&necklace_bracket(g, &necklace_bracket(h, f)?)?)
                    .add(&necklace_bracket(h, &necklace_bracket(f, g)?)?);
                if !t.is_zero() {
                    bad += 1;
                }
            }
        }
    }
    checks.push(Check {
        name: "jacobi".into(),
        residual: bad as f64,
        tol: cfg.tol("necklace", 0.0),
    });

    let e = ncalg::e_generators();
    let ecls: Vec<Vec<Necklace>> = e
        .iter()
        .map(|row| row.iter().map(to_necklace).collect())
        .collect();
    let mut bad = 0usize;
    for i in 0..2 {
        for j in 0..2 {
            for p in 0..2 {
                for q in 0..2 {
                    let br = necklace_bracket(&ecls[i][j], &ecls[p][q])?;
                    let mut expected = Necklace::zero();
                    if j == p {
                        expected = expected.add(&ecls[i][q]);
                    }
                    if i == q {
                        expected = expected.sub(&ecls[p][j]);
                    }
                    if br != expected {
                        bad += 1;
                    }
                }
            }
        }
    }
    checks.push(Check {
        name: "e-matrix-bracket-relations".into(),
        residual: bad as f64,
        tol: cfg.tol("necklace", 0.0),
    });

    let (csym, c1, c2) = ncalg::symplectic_elements();
    checks.push(Check {
        name: "commutator-element-decomposition".into(),
        residual: if csym.sub(&c1.add(&c2)).is_zero() { 0.0 } else { 1.0 },
        tol: cfg.tol("necklace", 0.0),
    });

    let mut bad = 0usize;
    let potentials = [
        Potential::monomial(&[Letter::A, Letter::B], GaussRat::from_int(1)),
        Potential::monomial(&[Letter::A, Letter::A, Letter::A], GaussRat::from_int(-2)),
        Potential::monomial(&[Letter::A, Letter::A, Letter::B], GaussRat::from_int(3)),
        Potential::monomial(&[Letter::B, Letter::B], GaussRat::from_int(1)),
    ];
    for f in &potentials {
        if !autgrp::check_preserves_c(&autgrp::lambda_images(f))? {
            bad += 1;
        }
        if !autgrp::check_preserves_c(&autgrp::opp_lambda_images(f))? {
            bad += 1;
        }
    }
    checks.push(Check {
        name: "triangular-images-preserve-c".into(),
        residual: bad as f64,
        tol: cfg.tol("necklace", 0.0),
    });

    Ok(Report {
        suite: "necklace".into(),
        checks,
    })
}

fn suite_moment(cfg: &VerifyConfig) -> Result<Report> {
    let mut checks = Vec::new();
    let d = sample_on_shell(cfg.seed, cfg.k, cfg.tau);
    let scale = d.norm_scale();
    checks.push(Check {
        name: "sampled-point-on-shell".into(),
        residual: rep::residual_norm(&d)? / scale,
        tol: cfg.tol("moment", 1e-12),
    });

    let r = rep::rep_from_adhm(&d)?;
    let back = rep::adhm_from_rep(&r, d.tau)?;
    checks.push(Check {
        name: "representation-round-trip".into(),
        residual: back.a.sub(&d.a).max_abs()
            + back.b.sub(&d.b).max_abs()
            + back.i.sub(&d.i).max_abs()
            + back.j.sub(&d.j).max_abs(),
        tol: cfg.tol("moment", 0.0),
    });

    let h = to_hats(&d)?;
    let back = from_hats(&h)?;
    checks.push(Check {
        name: "hat-round-trip".into(),
        residual: back.a.sub(&d.a).max_abs() + back.b.sub(&d.b).max_abs(),
        tol: cfg.tol("moment", 0.0),
    });

    let up = embed(&d, 1e-8)?;
    checks.push(Check {
        name: "embedded-point-on-shell".into(),
        residual: rep::residual_norm(&up)? / up.norm_scale(),
        tol: cfg.tol("moment", 1e-10),
    });

    let mut bad = 0usize;
    for t in 0..20 {
        let d = sample_on_shell(cfg.seed.wrapping_add(t), 2, c(0.0, 0.0));
        if !is_regular(&d)? {
            continue;
        }
        let up = embed(&d, 1e-8)?;
        if is_stable(&up)? != is_stable(&d)?
            || is_costable(&up)? != is_costable(&d)?
            || is_regular(&up)? != is_regular(&d)?
        {
            bad += 1;
        }
    }
    checks.push(Check {
        name: "embedding-preserves-regularity".into(),
        residual: bad as f64,
        tol: cfg.tol("moment", 0.0),
    });

    Ok(Report {
        suite: "moment".into(),
        checks,
    })
}

fn random_gl<Rng2: Rng>(rng: &mut Rng2, n: usize) -> Mat<f64> {
    Mat::from_fn(n, n, |p, q| {
        let base = if p == q { 1.0 } else { 0.0 };
        c(
            base + 0.4 * rng.gen_range(-1.0..1.0),
            0.4 * rng.gen_range(-1.0..1.0),
        )
    })
}

fn suite_slice(cfg: &VerifyConfig) -> Result<Report> {
    let mut checks = Vec::new();
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed ^ 0x5153);

    let mut worst = 0.0f64;
    let mut trials = 0usize;
    while trials < 100 {
        let k = 1 + (rng.gen::<u64>() % 5) as usize;
        let d = sample_on_shell(rng.gen(), k, cfg.tau);
        let h = to_hats(&d)?;
        let (f0, _) = match slice::to_slice(&h.ahat) {
            Ok(v) => v,
            Err(_) => continue,
        };
        // conjugate by an embedded GL(k) element
        let mut g = Mat::identity(k + 1);
        let core = random_gl(&mut rng, k);
        for p in 0..k {
            for q in 0..k {
                g[(p, q)] = core[(p, q)];
            }
        }
        let conj = g.mul(&h.ahat).mul(&g.inverse()?);
        let (f1, _) = match slice::to_slice(&conj) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let scale = f0
            .r
            .iter()
            .chain(&f0.s)
            .map(|z| z.norm())
            .fold(1.0, f64::max);
        let diff = f0
            .r
            .iter()
            .zip(&f1.r)
            .chain(f0.s.iter().zip(&f1.s))
            .map(|(u, v)| (u - v).norm())
            .fold(0.0, f64::max);
        worst = worst.max(diff / scale);
        trials += 1;
    }
    checks.push(Check {
        name: "orbit-invariance-of-slice-form".into(),
        residual: worst,
        tol: cfg.tol("slice", 1e-8),
    });

    let d = sample_on_shell(cfg.seed, cfg.k, cfg.tau);
    let h = to_hats(&d)?;
    let (f0, _) = slice::to_slice(&h.ahat)?;
    let (q, qhat) = slice::charpolys_from_slice(&f0);
    let back = slice::slice_from_charpolys(&q, &qhat)?;
    let diff = f0
        .r
        .iter()
        .zip(&back.r)
        .chain(f0.s.iter().zip(&back.s))
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "charpoly-coefficient-round-trip".into(),
        residual: diff,
        tol: cfg.tol("slice", 1e-13),
    });

    let p = darboux::pi_forward(&h, 1e-8)?;
    let (g, ginv) = slice::g_pair(&p.lambda, &p.lambdahat)?;
    checks.push(Check {
        name: "interpolation-pair-inverse".into(),
        residual: g.mul(&ginv).sub(&Mat::identity(cfg.k + 1)).max_abs(),
        tol: cfg.tol("slice", 1e-12),
    });

    // the pair diagonalizes the canonical matrix of the spectra
    let (css, _) = slice::canonical_ss(&h.ahat)?;
    let m = css.assemble();
    let lamhat = slice::sort_eigenvalues(linalg::eigenvalues(&m)?);
    let (gc, gcinv) = slice::g_pair(&css.lambda, &lamhat)?;
    let diagd = gc.mul(&m).mul(&gcinv);
    let mut worst = 0.0f64;
    for pn in 0..=cfg.k {
        for qn in 0..=cfg.k {
            let expected = if pn == qn { lamhat[pn] } else { c(0.0, 0.0) };
            worst = worst.max((diagd[(pn, qn)] - expected).norm());
        }
    }
    checks.push(Check {
        name: "interpolation-pair-diagonalization".into(),
        residual: worst / m.frobenius_norm(),
        tol: cfg.tol("slice", 1e-8),
    });

    Ok(Report {
        suite: "slice".into(),
        checks,
    })
}

fn max_coord_diff(a: &darboux::DarbouxPoint<f64>, b: &darboux::DarbouxPoint<f64>) -> f64 {
    let scale = a
        .lambda
        .iter()
        .chain(&a.mu)
        .chain(&a.lambdahat)
        .chain(&a.muhat)
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    a.lambda
        .iter()
        .zip(&b.lambda)
        .chain(a.mu.iter().zip(&b.mu))
        .chain(a.lambdahat.iter().zip(&b.lambdahat))
        .chain(a.muhat.iter().zip(&b.muhat))
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max)
        / scale
}

fn suite_darboux(cfg: &VerifyConfig) -> Result<Report> {
    let mut checks = Vec::new();
    let d = sample_on_shell(cfg.seed, cfg.k, cfg.tau);
    let h = to_hats(&d)?;
    let p = darboux::pi_forward(&h, 1e-8)?;

    // coordinates -> matrices -> coordinates
    let h2 = darboux::pi_inverse(&p)?;
    let p2 = darboux::coords_matched(&h2, &p, 1e-8)?;
    checks.push(Check {
        name: "coordinates-round-trip".into(),
        residual: max_coord_diff(&p, &p2),
        tol: cfg.tol("darboux", 1e-8),
    });

    // matrices -> coordinates -> matrices, up to the group action
    let equal = points_equal(
        &from_hats(&crate::hat::project_to_s(&h, 1e-8)?)?,
        &from_hats(&crate::hat::project_to_s(&h2, 1e-8)?)?,
        1e-6,
    )?;
    checks.push(Check {
        name: "point-round-trip-orbit-equality".into(),
        residual: if equal { 0.0 } else { 1.0 },
        tol: cfg.tol("darboux", 0.0),
    });

    // canonical bracket table over all proper coordinate pairs
    let n = 4 * cfg.k + 2;
    let coord = |idx: usize, reference: darboux::DarbouxPoint<f64>| {
        move |hh: &HatPair<f64>| -> Result<C64> {
            let q = darboux::coords_matched(hh, &reference, 1e-3)?;
            let k = q.k();
            Ok(if idx < k {
                q.lambda[idx]
            } else if idx < 2 * k {
                q.mu[idx - k]
            } else if idx < 3 * k + 1 {
                q.lambdahat[idx - 2 * k]
            } else {
                q.muhat[idx - 3 * k - 1]
            })
        }
    };
    let pair_of = |idx: usize| -> Option<usize> {
        let k = cfg.k;
        if idx < k {
            Some(idx + k)
        } else if idx < 2 * k {
            None
        } else if idx < 3 * k + 1 {
            Some(idx + k + 1)
        } else {
            None
        }
    };
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in (a + 1)..n {
            let fa = coord(a, p.clone());
            let fb = coord(b, p.clone());
            let br = darboux::poisson_flat_hat(&fa, &fb, &h)?;
            let expected = if pair_of(a) == Some(b) { c(1.0, 0.0) } else { c(0.0, 0.0) };
            worst = worst.max((br - expected).norm());
        }
    }
    checks.push(Check {
        name: "canonical-bracket-table".into(),
        residual: worst,
        tol: cfg.tol("darboux", 1e-6),
    });

    // trace Hamiltonian identity at tau = 0
    let d0 = sample_on_shell(cfg.seed, cfg.k, c(0.0, 0.0));
    let h0m = to_hats(&d0)?;
    let p0 = darboux::pi_forward(&h0m, 1e-8)?;
    let lhs = darboux::h0(&p0)?;
    let rhs = darboux::h_tau(&h0m);
    checks.push(Check {
        name: "quadratic-hamiltonian-identity".into(),
        residual: (lhs - rhs).norm() / (1.0 + rhs.norm()),
        tol: cfg.tol("darboux", 1e-8),
    });

    Ok(Report {
        suite: "darboux".into(),
        checks,
    })
}

fn suite_flows(cfg: &VerifyConfig) -> Result<Report> {
    let mut checks = Vec::new();
    let d = sample_on_shell(cfg.seed, cfg.k, cfg.tau);
    let h = to_hats(&d)?;

    let echo = darboux::flow(&h, &[], &[]);
    checks.push(Check {
        name: "zero-flow-is-identity".into(),
        residual: echo.ahat.sub(&h.ahat).max_abs() + echo.bhat.sub(&h.bhat).max_abs(),
        tol: cfg.tol("flows", 0.0),
    });

    let pc = [c(0.2, 0.1), c(-0.3, 0.0), c(0.05, -0.1)];
    let qc = [c(0.0, 0.3), c(0.1, 0.0)];
    let moved = darboux::flow(&h, &pc, &qc);
    let psi0 = darboux::psi(&h);
    let psi1 = darboux::psi(&moved);
    let scale = psi0.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let worst = psi0
        .iter()
        .zip(&psi1)
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "spectral-invariants-preserved".into(),
        residual: worst / scale,
        tol: cfg.tol("flows", 1e-8),
    });
    checks.push(Check {
        name: "flow-stays-on-shell".into(),
        residual: darboux::hat_residual(&moved) / (1.0 + moved.bhat.max_abs()),
        tol: cfg.tol("flows", 1e-8),
    });

    let ab = darboux::flow(&darboux::flow(&h, &pc, &[]), &[], &qc);
    let ba = darboux::flow(&darboux::flow(&h, &[], &qc), &pc, &[]);
    checks.push(Check {
        name: "flows-commute".into(),
        residual: ab.bhat.sub(&ba.bhat).max_abs() / (1.0 + h.bhat.max_abs()),
        tol: cfg.tol("flows", 1e-10),
    });

    // transitivity on the fibre over fixed spectra
    let p = darboux::pi_forward(&h, 1e-8)?;
    let mut target = p.clone();
    for (t, z) in target.mu.iter_mut().enumerate() {
        *z += c(0.3 + 0.1 * t as f64, -0.2);
    }
    for (t, z) in target.muhat.iter_mut().enumerate() {
        *z += c(-0.1 * t as f64, 0.25);
    }
    let h_from = darboux::pi_inverse(&p)?;
    let h_to = darboux::pi_inverse(&target)?;
    let (fp, fq) = darboux::connecting_flow(&p, &target)?;
    let reached = darboux::flow(&h_from, &fp, &fq);
    checks.push(Check {
        name: "connecting-flow-reaches-target".into(),
        residual: reached.bhat.sub(&h_to.bhat).max_abs() / (1.0 + h_to.bhat.max_abs()),
        tol: cfg.tol("flows", 1e-7),
    });

    Ok(Report {
        suite: "flows".into(),
        checks,
    })
}

fn suite_autgrp(cfg: &VerifyConfig) -> Result<Report> {
    let mut checks = Vec::new();
    let tau = if cfg.tau.norm() < 1e-14 { c(1.0, 0.0) } else { cfg.tau };
    let d = sample_on_shell(cfg.seed, cfg.k, tau);

    let f = Potential::monomial(&[Letter::A, Letter::B], GaussRat::from_int(1));
    let word: Vec<TameGenerator<f64>> = vec![
        TameGenerator::Triangular(f.clone()),
        TameGenerator::OppTriangular(f),
        TameGenerator::TriangularPoly(vec![c(0.0, 0.0), c(0.3, -0.1)]),
        TameGenerator::Gl2([[c(1.0, 0.1), c(0.2, 0.0)], [c(0.0, -0.1), c(0.9, 0.0)]]),
        TameGenerator::UnimodularAffine {
            s: [[c(1.0, 0.0), c(0.4, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
            t: [c(0.1, 0.0), c(0.0, 0.2)],
        },
    ];
    let mut cur = d.clone();
    let mut worst_moment = 0.0f64;
    for g in &word {
        cur = autgrp::act(g, &cur)?;
        worst_moment = worst_moment.max(rep::residual_norm(&cur)? / cur.norm_scale());
    }
    checks.push(Check {
        name: "generators-preserve-moment".into(),
        residual: worst_moment,
        tol: cfg.tol("autgrp", 1e-10),
    });

    let p1 = linalg::charpoly(&autgrp::e_image(&d));
    let p2 = linalg::charpoly(&autgrp::e_image(&cur));
    let scale = p1.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let worst = p1
        .iter()
        .zip(&p2)
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "rank-two-matrix-conjugacy-class".into(),
        residual: worst / scale,
        tol: cfg.tol("autgrp", 1e-8),
    });

    // analytic perturbation coefficients against finite differences
    let (lin, quad) = autgrp::tr_ji_sq_perturbation(&d)?;
    let g = |s: f64| -> Result<C64> {
        let moved = autgrp::act(
            &TameGenerator::TriangularPoly(vec![c(0.0, 0.0), c(-s, 0.0)]),
            &d,
        )?;
        let ji = moved.j.mul(&moved.i);
        Ok(ji.mul(&ji).trace())
    };
    let hstep = 1e-5;
    let fd_lin = (g(hstep)? - g(-hstep)?) / c(2.0 * hstep, 0.0);
    let fd_quad = (g(hstep)? - g(0.0)?.scale(2.0) + g(-hstep)?) / c(2.0 * hstep * hstep, 0.0);
    checks.push(Check {
        name: "perturbation-linear-coefficient".into(),
        residual: (fd_lin - lin).norm() / (1.0 + lin.norm()),
        tol: cfg.tol("autgrp", 1e-7),
    });
    checks.push(Check {
        name: "perturbation-quadratic-coefficient".into(),
        residual: (fd_quad - quad).norm() / (1.0 + quad.norm()),
        tol: cfg.tol("autgrp", 1e-4),
    });

    // constructive normalization into i2 = j2 = 0
    let mut failures = 0usize;
    let trials = 20usize;
    let mut worst_tail = 0.0f64;
    for t in 0..trials {
        let seed = cfg.seed.wrapping_add(1000 + t as u64);
        let dd = sample_on_shell(seed, cfg.k, tau);
        match autgrp::normalize_to_cm(&dd, seed) {
            Ok((word, out)) => {
                let scale = out.norm_scale();
                worst_tail = worst_tail
                    .max(out.i_col(1).max_abs() / scale)
                    .max(out.j_row(1).max_abs() / scale);
                let replay = autgrp::act_word(&word, &dd)?;
                worst_tail = worst_tail.max(replay.a.sub(&out.a).max_abs() / scale);
            }
            Err(_) => failures += 1,
        }
    }
    checks.push(Check {
        name: "normalization-tail-entries".into(),
        residual: worst_tail,
        tol: cfg.tol("autgrp", 1e-9),
    });
    checks.push(Check {
        name: "normalization-failure-rate".into(),
        residual: failures as f64 / trials as f64,
        tol: cfg.tol("autgrp", 0.01),
    });

    Ok(Report {
        suite: "autgrp".into(),
        checks,
    })
}
