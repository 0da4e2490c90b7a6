//! Analysis of a phase in which the greedy chain does not close.
//!
//! Indices are 0-based: `p[i]`, `q[i]` are remaining elements of part `i`,
//! `h[i]` and `h_prime[i]` are hyperedge indices, and `R_{i-1}` (cyclically)
//! is tight for both `h[i]` and `h_prime[i]`. Either one of the candidate
//! choices met on the way is valid, or the collected structure is rigid
//! enough that swapping a single placed element with `p_i` or `q_i`
//! unlocks a valid choice.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::state::OrderingState;
use super::{ChoiceSource, OrderingOptions};
use crate::error::{Error, Result};
use crate::set::ElementSet;

/// Everything collected about a phase that has no easy valid choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StuckCertificate {
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    pub h: Vec<usize>,
    pub h_prime: Vec<usize>,
    /// Remaining elements of part `i` in `h[i] ∩ h[i+1]` and in neither
    /// `h_prime[i]` nor `h_prime[i+1]`; for the last part the roles of
    /// `h[0]` and `h_prime[0]` are exchanged.
    pub c_hat: Vec<ElementSet>,
    /// The symmetric class with `h` and `h_prime` exchanged.
    pub c_hat_prime: Vec<ElementSet>,
    /// Common size of every `c_hat[i]` and `c_hat_prime[i]`.
    pub s: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Valid { choice: Vec<usize>, source: ChoiceSource },
    Stuck(StuckCertificate),
}

/// Which substitution unlocked the phase. `*Wrap` variants are the ones
/// triggered in the last part, where the neighbouring hyperedges are
/// `h[0]` and `h_prime[0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubstitutionCase {
    /// `b ∈ H_i ∩ H'_i`, `b ∉ H_{i+1}`.
    BothNotNext,
    BothNotNextWrap,
    /// `b ∈ H_i ∩ H'_i`, `b ∉ H'_{i+1}`.
    BothNotNextPrime,
    BothNotNextPrimeWrap,
    /// `b ∈ H_i` only.
    OnlyH,
    OnlyHWrap,
    /// `b ∈ H'_i` only.
    OnlyHPrime,
    OnlyHPrimeWrap,
}

impl SubstitutionCase {
    pub const COUNT: usize = 8;

    pub const ALL: [SubstitutionCase; Self::COUNT] = [
        SubstitutionCase::BothNotNext,
        SubstitutionCase::BothNotNextWrap,
        SubstitutionCase::BothNotNextPrime,
        SubstitutionCase::BothNotNextPrimeWrap,
        SubstitutionCase::OnlyH,
        SubstitutionCase::OnlyHWrap,
        SubstitutionCase::OnlyHPrime,
        SubstitutionCase::OnlyHPrimeWrap,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&c| c == self).expect("listed")
    }

    pub fn label(self) -> &'static str {
        match self {
            SubstitutionCase::BothNotNext => "1.1",
            SubstitutionCase::BothNotNextWrap => "1.1 (last part)",
            SubstitutionCase::BothNotNextPrime => "1.2",
            SubstitutionCase::BothNotNextPrimeWrap => "1.2 (last part)",
            SubstitutionCase::OnlyH => "2.1",
            SubstitutionCase::OnlyHWrap => "2.1 (last part)",
            SubstitutionCase::OnlyHPrime => "2.2",
            SubstitutionCase::OnlyHPrimeWrap => "2.2 (last part)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub case: SubstitutionCase,
    /// Part whose prefix was modified.
    pub part: usize,
    /// 1-based position of the replaced element in that prefix.
    pub position: usize,
    pub replaced: usize,
    pub inserted: usize,
    pub choice: Vec<usize>,
}

/// `a[..split] ++ b[split..]`
fn mix(a: &[usize], b: &[usize], split: usize) -> Vec<usize> {
    a[..split].iter().chain(&b[split..]).copied().collect()
}

/// Smallest `f ∈ pool` with `base + f` a basis.
fn first_partner(state: &OrderingState<'_>, base: ElementSet, pool: ElementSet) -> Option<usize> {
    pool.iter().find(|&f| state.is_basis(base.with(f)))
}

struct Ctx<'s, 'a> {
    state: &'s OrderingState<'a>,
    deep: bool,
}

impl Ctx<'_, '_> {
    fn he(&self, idx: usize) -> ElementSet {
        self.state.rep().hyperedge(idx).set
    }

    fn tight(&self, idx: usize, x: ElementSet) -> bool {
        self.state.rep().is_tight(idx, x)
    }

    fn fail(&self, what: String) -> Error {
        self.state.contradiction(what)
    }

    fn deep_check(&self, cond: bool, what: impl FnOnce() -> String) -> Result<()> {
        if self.deep && !cond {
            Err(self.fail(format!("deep check failed: {}", what())))
        } else {
            Ok(())
        }
    }

    /// `x` is exactly one over capacity on `idx` while `from` (of which `x`
    /// differs by one swap) is tight for it.
    fn check_overflow(&self, idx: usize, from: ElementSet, x: ElementSet) -> Result<()> {
        let cap = self.state.rep().hyperedge(idx).capacity;
        self.deep_check(self.tight(idx, from) && x.meet(self.he(idx)) == cap + 1, || {
            format!("hyperedge {idx} should be tight on {from:?} and overfull by one on {x:?}")
        })
    }
}

/// Runs the candidate search that either finds a valid choice or produces a
/// [`StuckCertificate`]. `p` is the open chain from
/// [`build_p_chain`](super::build_p_chain).
pub fn derive_certificate(state: &OrderingState<'_>, p: &[usize], options: OrderingOptions) -> Result<Derivation> {
    let k = state.k();
    if k < 3 {
        return Err(Error::InvalidInput(format!("certificate analysis needs at least 3 parts, got {k}")));
    }
    if p.len() != k || (0..k).any(|i| !state.remainder(i).contains(p[i])) {
        return Err(Error::InvalidInput("chain does not pick one remaining element per part".into()));
    }
    let ctx = Ctx { state, deep: options.check_deep };
    let last = k - 1;
    let rr = |i: usize| state.r_set(i);

    // Collect h[i] and q[i], trying (q_0..q_i, p_{i+1}..) along the way.
    let closing = rr(last).without(p[last]).with(p[0]);
    let Some(h0) = state.violation(closing) else {
        return Err(ctx.fail("chain closes, nothing to analyse".into()));
    };
    ctx.check_overflow(h0, rr(last), closing)?;
    let mut h = alloc::vec![h0];
    let base = rr(last).without(p[last]);
    let Some(q0) = first_partner(state, base, state.remainder(0).without(p[0])) else {
        return Err(ctx.fail("no exchange partner for q_0".into()));
    };
    let mut q = alloc::vec![q0];
    for i in 0..last {
        let w = rr(i).without(q[i]).with(p[i + 1]);
        match state.violation(w) {
            None => return Ok(Derivation::Valid { choice: mix(&q, p, i + 1), source: ChoiceSource::StageA }),
            Some(hi) => {
                ctx.check_overflow(hi, rr(i), w)?;
                h.push(hi);
            }
        }
        let base = rr(i).without(q[i]);
        let Some(qi) = first_partner(state, base, state.remainder(i + 1).without(p[i + 1])) else {
            return Err(ctx.fail(format!("no exchange partner for q_{}", i + 1)));
        };
        q.push(qi);
    }

    // Collect h_prime[i], trying (q_0..q_{k-1}) and then (p_0..p_i, q_{i+1}..).
    let w = rr(last).without(q[last]).with(q[0]);
    let mut h_prime = match state.violation(w) {
        None => return Ok(Derivation::Valid { choice: q, source: ChoiceSource::StageB }),
        Some(hp) => alloc::vec![hp],
    };
    for i in 0..last {
        let w = rr(i).without(p[i]).with(q[i + 1]);
        match state.violation(w) {
            None => return Ok(Derivation::Valid { choice: mix(p, &q, i + 1), source: ChoiceSource::StageB }),
            Some(hp) => h_prime.push(hp),
        }
    }

    // Split every remainder into the two rigid classes.
    let mut c_hat = alloc::vec![ElementSet::EMPTY; k];
    let mut c_hat_prime = alloc::vec![ElementSet::EMPTY; k];
    for i in 0..k {
        let (a, b, ap, bp) = if i < last {
            (h[i], h[i + 1], h_prime[i], h_prime[i + 1])
        } else {
            (h[last], h_prime[0], h_prime[last], h[0])
        };
        let (a, b, ap, bp) = (ctx.he(a), ctx.he(b), ctx.he(ap), ctx.he(bp));
        for x in state.remainder(i) {
            let inside = |s: ElementSet| s.contains(x);
            if inside(a) && inside(b) && !inside(ap) && !inside(bp) {
                c_hat[i].insert(x);
            } else if inside(ap) && inside(bp) && !inside(a) && !inside(b) {
                c_hat_prime[i].insert(x);
            } else {
                let q_form = q[..i].iter().copied().chain([x]).chain(p[i + 1..].iter().copied()).collect::<Vec<_>>();
                if state.is_valid_choice(&q_form)? {
                    return Ok(Derivation::Valid { choice: q_form, source: ChoiceSource::StageC });
                }
                let p_form = p[..i].iter().copied().chain([x]).chain(q[i + 1..].iter().copied()).collect::<Vec<_>>();
                if state.is_valid_choice(&p_form)? {
                    return Ok(Derivation::Valid { choice: p_form, source: ChoiceSource::StageC });
                }
                return Err(ctx.fail(format!("element {x} of part {i} fits neither class and unlocks no choice")));
            }
        }
    }

    let s = c_hat[0].len();
    let cert = StuckCertificate { p: p.to_vec(), q, h, h_prime, c_hat, c_hat_prime, s };
    // The derivation above only guarantees the certificate for valid
    // representations, so it is checked unconditionally.
    check_certificate(state, &cert).map_err(|what| {
        Error::InternalContradiction(alloc::boxed::Box::new(
            state.diagnostic(format!("certificate invariant failed: {what}"), Some(format!("{cert:?}"))),
        ))
    })?;
    Ok(Derivation::Stuck(cert))
}

/// Verifies every structural property a certificate must have, returning a
/// description of the first one that fails.
pub fn check_certificate(state: &OrderingState<'_>, cert: &StuckCertificate) -> core::result::Result<(), String> {
    let k = state.k();
    let last = k - 1;
    let rep = state.rep();
    let he = |idx: usize| rep.hyperedge(idx).set;
    let StuckCertificate { p, q, h, h_prime: hp, c_hat, c_hat_prime, s } = cert;
    macro_rules! ensure {
        ($cond:expr, $($fmt:tt)*) => {
            if !$cond {
                return Err(format!($($fmt)*));
            }
        };
    }
    ensure!(
        [p.len(), q.len(), h.len(), hp.len(), c_hat.len(), c_hat_prime.len()].iter().all(|&l| l == k),
        "certificate vectors must have one entry per part"
    );
    let count = rep.hyperedges().len();
    ensure!(h.iter().chain(hp.iter()).all(|&x| x < count), "hyperedge index out of range");
    ensure!(p.iter().chain(q.iter()).all(|&x| x < rep.n()), "element out of range");
    for i in 0..k {
        let c = state.remainder(i);
        let r_prev = state.r_set(state.prev(i));
        ensure!(c.contains(p[i]) && c.contains(q[i]) && p[i] != q[i], "p_{i}, q_{i} must be distinct remaining elements");
        // Collection of h.
        ensure!(he(h[i]).contains(p[i]), "p_{i} ∉ H_{i}");
        ensure!(!he(h[i]).contains(q[i]), "q_{i} ∈ H_{i}");
        ensure!(rep.is_tight(h[i], r_prev), "R_{{{i}-1}} is not H_{i}-tight");
        // Collection of h'.
        ensure!(!he(hp[i]).contains(p[i]), "p_{i} ∈ H'_{i}");
        ensure!(he(hp[i]).contains(q[i]), "q_{i} ∉ H'_{i}");
        ensure!(rep.is_tight(hp[i], r_prev), "R_{{{i}-1}} is not H'_{i}-tight");
        ensure!(rep.tight_pair_window(h[i], hp[i], r_prev), "R_{{{i}-1}} is not between H_{i} ∩ H'_{i} and H_{i} ∪ H'_{i}");
        if i < last {
            ensure!(he(h[i + 1]).contains(p[i]), "p_{i} ∉ H_{}", i + 1);
            ensure!(!he(h[i + 1]).contains(q[i]), "q_{i} ∈ H_{}", i + 1);
            ensure!(!he(hp[i + 1]).contains(p[i]), "p_{i} ∈ H'_{}", i + 1);
            ensure!(he(hp[i + 1]).contains(q[i]), "q_{i} ∉ H'_{}", i + 1);
        }
        // Classes partition the remainder and have equal sizes.
        ensure!(c_hat[i].is_disjoint(c_hat_prime[i]) && (c_hat[i] | c_hat_prime[i]) == c, "classes do not partition C_{i}");
        ensure!(c_hat[i].len() == *s && c_hat_prime[i].len() == *s, "class sizes of part {i} differ from s = {s}");
        // Each part is tight for both of its hyperedges.
        let b = state.bases()[i];
        ensure!(rep.is_tight(h[i], b) && rep.is_tight(hp[i], b), "B_{i} is not H_{i}- and H'_{i}-tight");
    }
    ensure!(!he(h[0]).contains(p[last]), "p_last ∈ H_0");
    ensure!(he(hp[0]).contains(p[last]), "p_last ∉ H'_0");
    ensure!(he(h[0]).contains(q[last]), "q_last ∉ H_0");
    ensure!(!he(hp[0]).contains(q[last]), "q_last ∈ H'_0");
    let (r, j) = (state.r(), state.phase());
    ensure!(3 * s <= r, "s = {s} exceeds r/3 = {r}/3");
    ensure!(3 * (j - 1) >= r, "j - 1 = {} is below r/3 = {r}/3", j - 1);
    Ok(())
}

/// Scans the placed elements from the latest position backwards and swaps
/// the first one matching a substitution case with `p_i` or `q_i`. Returns
/// the valid choice this unlocks.
pub fn resolve_stuck(
    state: &mut OrderingState<'_>,
    cert: &StuckCertificate,
    options: OrderingOptions,
) -> Result<Resolution> {
    use SubstitutionCase::*;
    let k = state.k();
    let last = k - 1;
    let j = state.phase();
    if j < 2 {
        return Err(state.contradiction("stuck in the first phase".into()));
    }
    if let Err(what) = check_certificate(state, cert) {
        return Err(Error::InternalContradiction(alloc::boxed::Box::new(
            state.diagnostic(format!("certificate invariant failed: {what}"), Some(format!("{cert:?}"))),
        )));
    }
    let (p, q) = (&cert.p, &cert.q);
    let he = |idx: usize| state.rep().hyperedge(idx).set;
    let mut found = None;
    'scan: for t in (0..j - 1).rev() {
        for i in 0..k {
            let b = state.prefix(i)[t];
            let (a, ap) = (he(cert.h[i]).contains(b), he(cert.h_prime[i]).contains(b));
            let (nx, nxp) = if i < last { (cert.h[i + 1], cert.h_prime[i + 1]) } else { (cert.h[0], cert.h_prime[0]) };
            let (n, np) = (he(nx).contains(b), he(nxp).contains(b));
            let wrap = i == last;
            // (case, partner swapped in, choice afterwards)
            let hit = if a && ap && !n {
                Some(if wrap { (BothNotNextWrap, p[last], mix(p, q, last)) } else { (BothNotNext, q[i], mix(q, p, i)) })
            } else if a && ap && !np {
                Some(if wrap { (BothNotNextPrimeWrap, q[last], mix(q, p, last)) } else { (BothNotNextPrime, p[i], mix(p, q, i)) })
            } else if a && !ap && !n && !np {
                Some((if wrap { OnlyHWrap } else { OnlyH }, p[i], mix(q, p, i + 1)))
            } else if ap && !a && !n && !np {
                Some((if wrap { OnlyHPrimeWrap } else { OnlyHPrime }, q[i], mix(p, q, i + 1)))
            } else {
                None
            };
            if let Some((case, partner, choice)) = hit {
                found = Some((case, i, t, b, partner, choice));
                break 'scan;
            }
        }
        if options.check_deep {
            check_settled_row(state, cert, t)?;
        }
    }
    let Some((case, part, t, replaced, inserted, choice)) = found else {
        let m = (0..last).find(|&m| cert.h[m] != cert.h[m + 1]);
        return Err(Error::InternalContradiction(alloc::boxed::Box::new(state.diagnostic(
            format!("no substitution case applies (first m with H_m != H_m+1: {m:?})"),
            Some(format!("{cert:?}")),
        ))));
    };
    state.swap_prefix(part, t, inserted);
    if let Some((wi, wl)) = state.star_violation() {
        return Err(state.contradiction(format!("case {} broke window ({wi}, {wl})", case.label())));
    }
    if !state.is_valid_choice(&choice)? {
        return Err(state.contradiction(format!("case {} did not unlock {choice:?}", case.label())));
    }
    log::debug!("phase {j}: case {} swapped {replaced} -> {inserted} in part {part}", case.label());
    Ok(Resolution { case, part, position: t + 1, replaced, inserted, choice })
}

/// Structure of a prefix row `t` (0-based) in which no case applied: every
/// `b^i_t` lies in exactly one of `H_i`, `H'_i` and exactly one of the next
/// pair, consecutive rows agree on the next pair, and the straddling
/// windows are tight for it.
fn check_settled_row(state: &OrderingState<'_>, cert: &StuckCertificate, t: usize) -> Result<()> {
    let k = state.k();
    let rep = state.rep();
    let he = |idx: usize| rep.hyperedge(idx).set;
    for i in 0..k {
        let nxt = state.next(i);
        let (nx, nxp) = (cert.h[nxt], cert.h_prime[nxt]);
        let b = state.prefix(i)[t];
        let b_next = state.prefix(nxt)[t];
        let own = he(cert.h[i]) ^ he(cert.h_prime[i]);
        let ahead = he(nx) ^ he(nxp);
        let pair = ElementSet::from_iter([b, b_next]);
        let window = state.window(i, t + 1);
        let ok = own.contains(b)
            && ahead.contains(b)
            && (pair.is_subset(he(nx)) || pair.is_subset(he(nxp)))
            && rep.is_tight(nx, window)
            && rep.is_tight(nxp, window);
        if !ok {
            return Err(state.contradiction(format!("row {} of part {i} lacks the settled structure", t + 1)));
        }
    }
    Ok(())
}
