//! Symbolic expansion of the multi-particle kernels M_{n;m}(α; β) and the check
//! that the reduction recursion reproduces the closed form.
//!
//! A term carries p delta contractions α_{k_a} = β_{i_a}, a product of S-factors,
//! and the surviving form factor F_{n+m−2p}(←α^{(2)} + iπ, β^{(2)}).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::bootstrap::{FormFactors, OperatorModel};
use crate::error::{Error, Result};
use crate::scattering::{s_matrix_unchecked, ModelParams};

pub const DEFAULT_MAX_SIZE: usize = 8;

/// An input rapidity symbol, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    Alpha(usize),
    Beta(usize),
}

/// A symbol, optionally shifted by iπ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arg {
    pub sym: Sym,
    pub shifted: bool,
}

impl Arg {
    fn plain(sym: Sym) -> Self {
        Self { sym, shifted: false }
    }
    fn shift(self) -> Self {
        Self { shifted: !self.shifted, ..self }
    }
}

/// S(lhs − rhs).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SFactor {
    pub lhs: Arg,
    pub rhs: Arg,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelTerm {
    pub p: usize,
    pub k_indices: Vec<usize>,
    pub i_indices: Vec<usize>,
    pub s_factors: Vec<SFactor>,
    pub ff_args: Vec<Arg>,
    pub delta_pairs: Vec<(usize, usize)>,
}

/// Order-insensitive representative of a term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalForm {
    pub delta_pairs: Vec<(usize, usize)>,
    pub s_factors: Vec<SFactor>,
    pub ff_args: Vec<Arg>,
}

/// How the β-side S-product of the closed form is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SProductReading {
    /// ∏_a ∏_{b<i_a} S(β_b − β_{i_a}) · ∏_{a>c, i_a>i_c} S(β_{i_a} − β_{i_c}).
    Recursion,
    /// ∏_a ∏_{b<i_a} S(β_a − β_{i_a}) with the outer index taken literally.
    Literal,
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Alpha(i) => write!(f, "a{i}"),
            Sym::Beta(i) => write!(f, "b{i}"),
        }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shifted {
            write!(f, "{}+ipi", self.sym)
        } else {
            write!(f, "{}", self.sym)
        }
    }
}

impl fmt::Display for SFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S({}-{})", self.lhs, self.rhs)
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for KernelTerm {
    /// `p; k=[..]; i=[..]; S=[..]; ff=[..]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}; k=[{}]; i=[{}]; S=[{}]; ff=[{}]",
            self.p,
            join(&self.k_indices),
            join(&self.i_indices),
            join(&self.s_factors),
            join(&self.ff_args)
        )
    }
}

impl KernelTerm {
    /// Substitutes the delta constraints, rewrites iπ-shifted S-arguments through
    /// crossing and unitarity, cancels S(x−y)S(y−x) pairs and sorts.
    pub fn normal_form(&self) -> NormalForm {
        let subst: BTreeMap<Sym, Sym> = self
            .delta_pairs
            .iter()
            .map(|&(a, b)| (Sym::Alpha(a), Sym::Beta(b)))
            .collect();
        let sub = |s: Sym| *subst.get(&s).unwrap_or(&s);
        let mut factors: Vec<(Sym, Sym)> = self
            .s_factors
            .iter()
            .map(|f| {
                let (x, y) = (sub(f.lhs.sym), sub(f.rhs.sym));
                if f.lhs.shifted == f.rhs.shifted {
                    (x, y)
                } else {
                    // S(x + iπ − y) = S(x − y − iπ) = S(y − x)
                    (y, x)
                }
            })
            .collect();
        let mut kept: Vec<(Sym, Sym)> = Vec::new();
        factors.sort();
        for f in factors {
            if let Some(pos) = kept.iter().position(|&(x, y)| (y, x) == f && x != y) {
                kept.swap_remove(pos);
            } else {
                kept.push(f);
            }
        }
        let mut s_factors: Vec<SFactor> = kept
            .into_iter()
            .map(|(x, y)| SFactor { lhs: Arg::plain(x), rhs: Arg::plain(y) })
            .collect();
        s_factors.sort();
        let mut delta_pairs = self.delta_pairs.clone();
        delta_pairs.sort();
        NormalForm { delta_pairs, s_factors, ff_args: self.ff_args.clone() }
    }

    /// True when no S-factor scatters a symbol with itself after delta substitution.
    pub fn has_no_self_scattering(&self) -> bool {
        self.normal_form().s_factors.iter().all(|f| f.lhs.sym != f.rhs.sym)
    }
}

fn combinations(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    rec(0, n, p, &mut cur, &mut out);
    out
}

fn arrangements(m: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut used = vec![false; m];
    fn rec(m: usize, p: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in 0..m {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(m, p, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(m, p, &mut cur, &mut used, &mut out);
    out
}

struct RawTerm {
    deltas: Vec<(Sym, Arg)>,
    s: Vec<SFactor>,
    ff: Vec<Arg>,
}

/// The triple sum over (p, k-set, i-arrangement) for arbitrary symbol lists.
fn closed_form(alphas: &[Sym], betas: &[Arg], reading: SProductReading) -> Vec<RawTerm> {
    let (n, m) = (alphas.len(), betas.len());
    let mut out = Vec::new();
    for p in 0..=n.min(m) {
        for ks in combinations(n, p) {
            let rest_alpha: Vec<usize> = (0..n).filter(|j| !ks.contains(j)).collect();
            for is in arrangements(m, p) {
                let mut s = Vec::new();
                for &k in &ks {
                    for &l in &rest_alpha {
                        if k > l {
                            s.push(SFactor { lhs: Arg::plain(alphas[k]), rhs: Arg::plain(alphas[l]) });
                        }
                    }
                }
                for (a, &ia) in is.iter().enumerate() {
                    for b in 0..ia {
                        let lhs = match reading {
                            SProductReading::Recursion => betas[b],
                            SProductReading::Literal => betas[a.min(m - 1)],
                        };
                        s.push(SFactor { lhs, rhs: betas[ia] });
                    }
                    if reading == SProductReading::Recursion {
                        for &ic in &is[..a] {
                            if ia > ic {
                                s.push(SFactor { lhs: betas[ia], rhs: betas[ic] });
                            }
                        }
                    }
                }
                let mut ff: Vec<Arg> = rest_alpha.iter().rev().map(|&j| Arg::plain(alphas[j]).shift()).collect();
                ff.extend((0..m).filter(|i| !is.contains(i)).map(|i| betas[i]));
                let deltas = ks.iter().zip(&is).map(|(&k, &i)| (alphas[k], betas[i])).collect();
                out.push(RawTerm { deltas, s, ff });
            }
        }
    }
    out
}

/// Turns raw terms into kernel terms; contractions with iπ-shifted arguments vanish
/// for real rapidities and are dropped.
fn finish(raw: Vec<RawTerm>, extra: &[(Sym, Arg)], prefactor: &[SFactor]) -> Vec<KernelTerm> {
    raw.into_iter()
        .filter(|t| t.deltas.iter().all(|(_, b)| !b.shifted))
        .map(|t| {
            let mut pairs: Vec<(usize, usize)> = extra
                .iter()
                .chain(&t.deltas)
                .map(|&(a, b)| match (a, b.sym) {
                    (Sym::Alpha(i), Sym::Beta(j)) => (i, j),
                    _ => unreachable!("contractions pair an α with a β"),
                })
                .collect();
            pairs.sort();
            let mut s = prefactor.to_vec();
            s.extend(t.s);
            KernelTerm {
                p: pairs.len(),
                k_indices: pairs.iter().map(|p| p.0).collect(),
                i_indices: pairs.iter().map(|p| p.1).collect(),
                s_factors: s,
                ff_args: t.ff,
                delta_pairs: pairs,
            }
        })
        .collect()
}

fn check_size(n: usize, m: usize) -> Result<()> {
    if n + m > DEFAULT_MAX_SIZE {
        return Err(Error::SizeLimit { n: n + m, max: DEFAULT_MAX_SIZE });
    }
    Ok(())
}

fn alpha_syms(n: usize) -> Vec<Sym> {
    (1..=n).map(Sym::Alpha).collect()
}

fn beta_args(m: usize) -> Vec<Arg> {
    (1..=m).map(|j| Arg::plain(Sym::Beta(j))).collect()
}

/// Closed-form expansion of M_{n;m}: one term per (p, k-set, i-arrangement).
pub fn expand_kernel(n: usize, m: usize) -> Result<Vec<KernelTerm>> {
    expand_kernel_with(n, m, SProductReading::Recursion)
}

pub fn expand_kernel_with(n: usize, m: usize, reading: SProductReading) -> Result<Vec<KernelTerm>> {
    check_size(n, m)?;
    Ok(finish(closed_form(&alpha_syms(n), &beta_args(m), reading), &[], &[]))
}

/// One step of the reduction recursion on α₁ followed by the closed form for the
/// remaining kernels: M_{n−1;m+1}(α′; α₁+iπ, β) plus the m contractions of α₁ with
/// β_a, each carrying ∏_{k<a} S(β_k − α₁).
pub fn reduce_via_axiom_v(n: usize, m: usize) -> Result<Vec<KernelTerm>> {
    reduce_via_axiom_v_with(n, m, SProductReading::Recursion)
}

pub fn reduce_via_axiom_v_with(n: usize, m: usize, reading: SProductReading) -> Result<Vec<KernelTerm>> {
    if n == 0 {
        return Err(Error::InvalidParameter("the reduction needs n ≥ 1".into()));
    }
    check_size(n, m)?;
    let alphas = alpha_syms(n);
    let betas = beta_args(m);
    let a1 = Arg::plain(alphas[0]);
    let mut shifted = vec![a1.shift()];
    shifted.extend_from_slice(&betas);
    let mut out = finish(closed_form(&alphas[1..], &shifted, reading), &[], &[]);
    for a in 0..m {
        let prefactor: Vec<SFactor> = betas[..a].iter().map(|&bk| SFactor { lhs: bk, rhs: a1 }).collect();
        let rest: Vec<Arg> = betas.iter().enumerate().filter(|&(j, _)| j != a).map(|(_, &x)| x).collect();
        out.extend(finish(closed_form(&alphas[1..], &rest, reading), &[(alphas[0], betas[a])], &prefactor));
    }
    Ok(out)
}

/// Multiset of normal forms, for order-insensitive comparison.
pub fn normal_multiset(terms: &[KernelTerm]) -> Vec<NormalForm> {
    let mut v: Vec<NormalForm> = terms.iter().map(|t| t.normal_form()).collect();
    v.sort();
    v
}

/// Σ_p C(n,p) · m!/(m−p)!
pub fn expected_term_count(n: usize, m: usize) -> usize {
    let choose = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
    let falling = |m: usize, p: usize| (0..p).fold(1usize, |acc, i| acc * (m - i));
    (0..=n.min(m)).map(|p| choose(n, p) * falling(m, p)).sum()
}

/// The non-delta coefficient of each term, evaluated on the support of its deltas.
pub fn evaluate_kernel_smooth_part(
    terms: &[KernelTerm],
    model: &OperatorModel,
    alpha: &[Complex64],
    beta: &[Complex64],
    params: &ModelParams,
) -> Result<Vec<(Vec<(usize, usize)>, Complex64)>> {
    let ff = FormFactors::new(params);
    let value = |a: Arg| -> Result<Complex64> {
        let v = match a.sym {
            Sym::Alpha(i) => alpha.get(i - 1),
            Sym::Beta(j) => beta.get(j - 1),
        }
        .copied()
        .ok_or_else(|| Error::InvalidParameter(format!("missing value for {}", a.sym)))?;
        Ok(if a.shifted { v + Complex64::new(0.0, PI) } else { v })
    };
    terms
        .iter()
        .map(|t| {
            let nf = t.normal_form();
            let mut coeff = Complex64::new(1.0, 0.0);
            for f in &nf.s_factors {
                coeff *= s_matrix_unchecked(value(f.lhs)? - value(f.rhs)?, params.b);
            }
            let args: Vec<Complex64> = nf.ff_args.iter().map(|&a| value(a)).collect::<Result<_>>()?;
            coeff *= ff.form_factor(model, &args)?.value;
            Ok((nf.delta_pairs, coeff))
        })
        .collect()
}
