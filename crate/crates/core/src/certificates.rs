//! Certificates of monotone functions: query-efficient extraction, checking,
//! and the brute-force complexity measures used to validate it.

use serde::Serialize;

use crate::error::{invariant, Error, Result};
use crate::model_core::{truth_table, Instance, Model, Oracle, Restriction};

/// A feature set `W` that fixes `f` on `witness`: every `y` agreeing with
/// `witness` on `W` has `f(y) = value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// 0-based, ascending.
    pub features: Vec<usize>,
    pub witness: Instance,
    pub value: bool,
}

impl Certificate {
    /// `true` for a 1-certificate, `false` for a 0-certificate.
    pub fn polarity(&self) -> bool {
        self.value
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// Which kind of certificate [`find_certificate_with`] extracts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Polarity {
    /// Minimal 1-certificate at the all-ones point.
    #[default]
    Minterm,
    /// Minimal 0-certificate at the all-zeros point.
    Maxterm,
}

/// Certificate of `f_ρ`, extracted as a minterm at the all-ones point.
pub fn find_certificate(oracle: &Oracle, rho: &Restriction) -> Result<Certificate> {
    find_certificate_with(oracle, rho, Polarity::Minterm)
}

/// Minimal certificate of `f_ρ` over the free coordinates.
///
/// Two queries decide constancy; a constant `f_ρ` gets the empty
/// certificate. Otherwise the extractor keeps a set of pinned features and
/// an ordered candidate list `L`, with the invariant that pinned ∪ `L`
/// (set to the target bit, everything else free set to its complement)
/// evaluates to the target. A binary search finds the shortest prefix of
/// `L` that still does; its last element is necessary, so it is pinned and
/// `L` shrinks to the part before it. Stops when the pinned set alone
/// suffices. Each round costs at most `⌈log₂ d⌉` queries, so the total is
/// at most `2 + (|W| + 1)·⌈log₂ d⌉`.
pub fn find_certificate_with(oracle: &Oracle, rho: &Restriction, polarity: Polarity) -> Result<Certificate> {
    let d = oracle.dimension();
    let target = polarity == Polarity::Minterm;
    let lo = rho.apply(&Instance::zeros(d));
    let hi = rho.apply(&Instance::ones(d));
    let v_lo = oracle.query(&lo);
    let v_hi = oracle.query(&hi);
    let witness = if target { hi } else { lo };
    if v_lo == v_hi {
        return Ok(Certificate {
            features: Vec::new(),
            witness,
            value: v_hi,
        });
    }
    if v_lo && !v_hi {
        return Err(invariant(format!(
            "f is not monotone under restriction {rho}: f(lo) = 1, f(hi) = 0"
        )));
    }

    // Candidate point: pinned ∪ prefix at `target`, other free coordinates at !target.
    let base = rho.apply(&Instance::constant(d, !target));
    let probe = |pinned: &[usize], prefix: &[usize]| {
        let mut x = base.clone();
        for &i in pinned.iter().chain(prefix) {
            x.set(i, target);
        }
        oracle.query(&x) == target
    };

    let mut candidates = rho.free();
    let mut pinned: Vec<usize> = Vec::new();
    // For the first round the empty prefix is the opposite corner, already
    // known not to reach the target.
    let mut empty_prefix_known_false = true;
    while !candidates.is_empty() {
        // smallest j in (lo, hi] with probe(prefix of length j) true; hi is known true
        let mut lo: isize = if empty_prefix_known_false { 0 } else { -1 };
        let mut hi: isize = candidates.len() as isize;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if probe(&pinned, &candidates[..mid.max(0) as usize]) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let j = hi as usize;
        if j == 0 {
            break;
        }
        pinned.push(candidates[j - 1]);
        candidates.truncate(j - 1);
        empty_prefix_known_false = false;
    }
    pinned.sort_unstable();
    Ok(Certificate {
        features: pinned,
        witness,
        value: target,
    })
}

/// Whether `W` certifies `f(x)` for monotone `f`, using exactly two
/// queries: `x` on `W` with the rest all-0, and with the rest all-1.
/// Since `x` lies between them, agreement of the two answers is
/// equivalent to every completion agreeing with `f(x)`.
pub fn verify_certificate(oracle: &Oracle, x: &Instance, features: &[usize]) -> Result<bool> {
    check_features(x.len(), features)?;
    let rho = Restriction::from_instance(x, features);
    let lo = oracle.query(&rho.apply(&Instance::zeros(x.len())));
    let hi = oracle.query(&rho.apply(&Instance::ones(x.len())));
    Ok(lo == hi)
}

/// Largest number of free coordinates the exhaustive checker enumerates.
pub const EXHAUSTIVE_VERIFY_MAX_FREE: usize = 20;

/// Certificate check by enumerating every completion. Works for any `f`.
pub fn verify_certificate_exhaustive(model: &dyn Model, x: &Instance, features: &[usize]) -> Result<bool> {
    check_features(x.len(), features)?;
    let rho = Restriction::from_instance(x, features);
    let free = rho.free();
    if free.len() > EXHAUSTIVE_VERIFY_MAX_FREE {
        return Err(Error::Capability(format!(
            "exhaustive certificate check needs at most {EXHAUSTIVE_VERIFY_MAX_FREE} free coordinates, got {}",
            free.len()
        )));
    }
    let fx = model.evaluate(x);
    let mut y = x.clone();
    for mask in 0..1u64 << free.len() {
        for (k, &i) in free.iter().enumerate() {
            y.set(i, (mask >> k) & 1 == 1);
        }
        if model.evaluate(&y) != fx {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_features(d: usize, features: &[usize]) -> Result<()> {
    if let Some(&bad) = features.iter().find(|&&i| i >= d) {
        return Err(Error::Usage(format!("feature {} out of range 1..={d}", bad + 1)));
    }
    Ok(())
}

/// Largest dimension for the brute-force sensitivity tool.
pub const SENSITIVITY_MAX_D: usize = 20;

/// Largest dimension for the brute-force certificate-complexity tool.
pub const CERT_COMPLEXITY_MAX_D: usize = 16;

/// `S_f(x)`: number of coordinates whose flip changes `f(x)`.
pub fn sensitivity_at(model: &dyn Model, x: &Instance) -> usize {
    let fx = model.evaluate(x);
    (0..x.len()).filter(|&i| model.evaluate(&x.flipped(i)) != fx).count()
}

/// `S(f)` by enumerating the whole cube.
pub fn sensitivity(model: &dyn Model) -> Result<usize> {
    let d = model.dimension();
    if d > SENSITIVITY_MAX_D {
        return Err(Error::Capability(format!(
            "brute-force sensitivity needs d <= {SENSITIVITY_MAX_D}, got {d}"
        )));
    }
    let table = truth_table(model)?;
    Ok((0..table.len())
        .map(|c| (0..d).filter(|&b| table[c ^ (1 << b)] != table[c]).count())
        .max()
        .unwrap_or(0))
}

/// Exact certificate complexities. The empty maximum is taken as 0, so a
/// constant function has `C = C_0 = C_1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CertComplexity {
    #[serde(rename = "C")]
    pub c: usize,
    #[serde(rename = "C0")]
    pub c0: usize,
    #[serde(rename = "C1")]
    pub c1: usize,
}

const MIXED: u8 = 2;

/// Subcube tables over `{0,1,*}^d`, indexed by `Σ digit_i·3^i` with digit
/// 2 standing for `*`.
struct CubeTables {
    d: usize,
    pow3: Vec<usize>,
    /// 0 or 1 if the subcube is monochromatic with that value, else MIXED.
    mono: Vec<u8>,
}

impl CubeTables {
    fn build(model: &dyn Model) -> Result<Self> {
        let d = model.dimension();
        if d > CERT_COMPLEXITY_MAX_D {
            return Err(Error::Capability(format!(
                "brute-force certificate complexity needs d <= {CERT_COMPLEXITY_MAX_D}, got {d}"
            )));
        }
        let table = truth_table(model)?;
        let pow3: Vec<usize> = (0..=d).map(|k| 3usize.pow(k as u32)).collect();
        let n = pow3[d];
        let mut mono = vec![0u8; n];
        for t in 0..n {
            // lowest star digit, if any
            let mut rest = t;
            let mut star = None;
            let mut code = 0usize;
            for i in 0..d {
                let digit = rest % 3;
                rest /= 3;
                if digit == 2 {
                    star = Some(i);
                    break;
                }
                // coordinate i is bit (d-1-i) of the instance code
                code |= digit << (d - 1 - i);
            }
            mono[t] = match star {
                None => table[code] as u8,
                Some(p) => {
                    let a = mono[t - 2 * pow3[p]];
                    let b = mono[t - pow3[p]];
                    if a == b { a } else { MIXED }
                }
            };
        }
        Ok(CubeTables { d, pow3, mono })
    }

    fn digits(&self, mut t: usize) -> Vec<usize> {
        (0..self.d)
            .map(|_| {
                let digit = t % 3;
                t /= 3;
                digit
            })
            .collect()
    }

    fn point_index(&self, code: usize) -> usize {
        (0..self.d)
            .map(|i| ((code >> (self.d - 1 - i)) & 1) * self.pow3[i])
            .sum()
    }
}

/// `C(f)`, `C_0(f)`, `C_1(f)` by exhaustive search over subcubes. Makes no
/// monotonicity assumption.
pub fn certificate_complexity(model: &dyn Model) -> Result<CertComplexity> {
    let tables = CubeTables::build(model)?;
    let d = tables.d;
    let n = tables.pow3[d];
    // best[t]: fewest fixed coordinates of a monochromatic cube containing cube t
    let mut best = vec![u8::MAX; n];
    for t in (0..n).rev() {
        let digits = tables.digits(t);
        let mut b = if tables.mono[t] != MIXED {
            digits.iter().filter(|&&g| g != 2).count() as u8
        } else {
            u8::MAX
        };
        for (i, &g) in digits.iter().enumerate() {
            if g != 2 {
                let up = t + (2 - g) * tables.pow3[i];
                b = b.min(best[up]);
            }
        }
        best[t] = b;
    }
    let (mut c0, mut c1) = (0usize, 0usize);
    for code in 0..1usize << d {
        let t = tables.point_index(code);
        let c = best[t] as usize;
        if tables.mono[t] == 1 {
            c1 = c1.max(c);
        } else {
            c0 = c0.max(c);
        }
    }
    Ok(CertComplexity {
        c: c0.max(c1),
        c0,
        c1,
    })
}

/// Every inclusion-minimal certificate of `f`, as the restriction fixing
/// it together with the value it certifies.
pub fn minimal_certificates(model: &dyn Model) -> Result<Vec<(Restriction, bool)>> {
    let tables = CubeTables::build(model)?;
    let d = tables.d;
    let mut out = Vec::new();
    for t in 0..tables.pow3[d] {
        if tables.mono[t] == MIXED {
            continue;
        }
        let digits = tables.digits(t);
        let minimal = digits.iter().enumerate().all(|(i, &g)| {
            g == 2 || tables.mono[t + (2 - g) * tables.pow3[i]] == MIXED
        });
        if minimal {
            let cells = digits
                .iter()
                .map(|&g| match g {
                    0 => Some(false),
                    1 => Some(true),
                    _ => None,
                })
                .collect();
            out.push((Restriction::new(cells), tables.mono[t] == 1));
        }
    }
    Ok(out)
}

/// Picks the values assigned to a freshly certified block.
pub type BlockChooser<'a> = dyn FnMut(&Certificate, &Restriction) -> Vec<bool> + 'a;

/// Repeatedly certify `f_ρ` and fix the certificate's features with values
/// from `chooser`, until `f_ρ` is constant. Returns one `(certificate,
/// restriction after fixing it)` pair per block. More than
/// `2·s_bound + 1` blocks is reported as an invariant violation.
pub fn restrict_until_constant(
    oracle: &Oracle,
    s_bound: usize,
    chooser: &mut BlockChooser<'_>,
) -> Result<Vec<(Certificate, Restriction)>> {
    let mut rho = Restriction::empty(oracle.dimension());
    let mut steps = Vec::new();
    loop {
        let cert = find_certificate(oracle, &rho)?;
        if cert.is_empty() {
            return Ok(steps);
        }
        if steps.len() > 2 * s_bound {
            return Err(invariant(format!(
                "f still non-constant after {} certificate blocks (bound 2·{s_bound}+1)",
                steps.len()
            )));
        }
        let values = chooser(&cert, &rho);
        if values.len() != cert.len() {
            return Err(Error::Usage(format!(
                "chooser returned {} values for a block of {}",
                values.len(),
                cert.len()
            )));
        }
        for (&i, &b) in cert.features.iter().zip(&values) {
            rho.set(i, b);
        }
        steps.push((cert, rho.clone()));
    }
}
