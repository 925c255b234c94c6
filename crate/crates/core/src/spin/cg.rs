//! Clebsch-Gordan coefficients in the Condon-Shortley convention.
//!
//! Arguments are doubled (`two_j = 2j`) so half-integers stay exact. The
//! Racah sum is rewritten as an integer sum of binomial products, evaluated
//! in arbitrary precision, and only the final ratio is rounded to `f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

static FACTORIALS: RwLock<Vec<BigUint>> = RwLock::new(Vec::new());
static PASCAL: RwLock<Vec<Vec<BigUint>>> = RwLock::new(Vec::new());

fn ensure_tables(n: usize) {
    {
        let f = FACTORIALS.read().unwrap();
        let p = PASCAL.read().unwrap();
        if f.len() > n && p.len() > n {
            return;
        }
    }
    let mut f = FACTORIALS.write().unwrap();
    if f.is_empty() {
        f.push(BigUint::one());
    }
    while f.len() <= n {
        let k = f.len();
        let next = &f[k - 1] * BigUint::from(k);
        f.push(next);
    }
    let mut p = PASCAL.write().unwrap();
    while p.len() <= n {
        let row_idx = p.len();
        let mut row = Vec::with_capacity(row_idx + 1);
        row.push(BigUint::one());
        for k in 1..row_idx {
            row.push(&p[row_idx - 1][k - 1] + &p[row_idx - 1][k]);
        }
        if row_idx > 0 {
            row.push(BigUint::one());
        }
        p.push(row);
    }
}

/// `num / den` rounded to f64 without forming a reduced rational.
fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 {
        (num << (shift as u64)) / den
    } else {
        (num >> ((-shift) as u64)) / den
    };
    q.to_f64().unwrap() * 2f64.powi(-shift as i32)
}

/// `<j1 m1; j2 m2 | J M>` with all arguments doubled.
///
/// Invalid quantum numbers (parity, range, triangle, `M != m1 + m2`) give 0.
pub fn clebsch_gordan(two_j1: i32, two_m1: i32, two_j2: i32, two_m2: i32, two_j: i32, two_m: i32) -> f64 {
    if two_j1 < 0 || two_j2 < 0 || two_j < 0 {
        return 0.0;
    }
    if two_m != two_m1 + two_m2 {
        return 0.0;
    }
    if two_m1.abs() > two_j1 || two_m2.abs() > two_j2 || two_m.abs() > two_j {
        return 0.0;
    }
    if (two_j1 + two_m1) % 2 != 0 || (two_j2 + two_m2) % 2 != 0 || (two_j + two_m) % 2 != 0 {
        return 0.0;
    }
    if two_j > two_j1 + two_j2 || two_j < (two_j1 - two_j2).abs() || (two_j1 + two_j2 + two_j) % 2 != 0 {
        return 0.0;
    }

    let n = ((two_j1 + two_j2 - two_j) / 2) as usize;
    let p = ((two_j + two_j1 - two_j2) / 2) as usize;
    let q = ((two_j - two_j1 + two_j2) / 2) as usize;
    let a = ((two_j1 - two_m1) / 2) as usize;
    let b = ((two_j2 + two_m2) / 2) as usize;
    let top = ((two_j1 + two_j2 + two_j) / 2 + 1) as usize;
    ensure_tables(top.max(n + p + q));

    let pascal = PASCAL.read().unwrap();
    let binom = |n: usize, k: isize| -> Option<&BigUint> {
        if k < 0 || k as usize > n {
            None
        } else {
            Some(&pascal[n][k as usize])
        }
    };
    let mut sum = BigInt::zero();
    for k in 0..=n {
        let (Some(b1), Some(b2), Some(b3)) = (
            binom(n, k as isize),
            binom(p, a as isize - k as isize),
            binom(q, b as isize - k as isize),
        ) else {
            continue;
        };
        let term = BigInt::from_biguint(Sign::Plus, b1 * b2 * b3);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    drop(pascal);
    if sum.is_zero() {
        return 0.0;
    }

    let fact = FACTORIALS.read().unwrap();
    let half = |x: i32| (x / 2) as usize;
    let mut num = sum.magnitude() * sum.magnitude() * BigUint::from((two_j + 1) as u32);
    for idx in [
        half(two_j + two_m),
        half(two_j - two_m),
        half(two_j1 - two_m1),
        half(two_j1 + two_m1),
        half(two_j2 - two_m2),
        half(two_j2 + two_m2),
    ] {
        num *= &fact[idx];
    }
    let den = &fact[top] * &fact[n] * &fact[p] * &fact[q];
    let magnitude = ratio_to_f64(&num, &den).sqrt();
    if sum.sign() == Sign::Minus {
        -magnitude
    } else {
        magnitude
    }
}

/// Tensor-operator coupling coefficients `<j m; l mu | j m+mu>` for
/// `0 <= mu <= l <= two_j`, laid out for every `two_j <= max_two_j`.
///
/// This is the payload of the optional on-disk cache. The cache only ever
/// accelerates; lookups outside the table fall back to direct evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorCgTable {
    max_two_j: u32,
    values: Vec<f64>,
    offsets: Vec<usize>,
}

const CACHE_MAGIC: &[u8; 8] = b"SWCGTAB\0";
const CACHE_VERSION: u32 = 1;

fn table_offsets(max_two_j: u32) -> Vec<usize> {
    // offsets[two_j] = start of the two_j block; one extra entry at the end
    let mut offsets = Vec::with_capacity(max_two_j as usize + 2);
    let mut acc = 0usize;
    for two_j in 0..=max_two_j {
        offsets.push(acc);
        let d = two_j as usize + 1;
        for l in 0..=two_j as usize {
            for mu in 0..=l {
                acc += d - mu;
            }
        }
    }
    offsets.push(acc);
    offsets
}

impl TensorCgTable {
    pub fn compute(max_two_j: u32) -> Self {
        use rayon::prelude::*;
        let offsets = table_offsets(max_two_j);
        let blocks: Vec<Vec<f64>> = (0..=max_two_j)
            .into_par_iter()
            .map(|two_j| {
                let d = two_j as usize + 1;
                let mut block = Vec::new();
                for l in 0..=two_j as usize {
                    for mu in 0..=l {
                        for a in mu..d {
                            let two_m = two_j as i32 - 2 * a as i32;
                            block.push(clebsch_gordan(
                                two_j as i32,
                                two_m,
                                2 * l as i32,
                                2 * mu as i32,
                                two_j as i32,
                                two_m + 2 * mu as i32,
                            ));
                        }
                    }
                }
                block
            })
            .collect();
        Self {
            max_two_j,
            values: blocks.concat(),
            offsets,
        }
    }

    pub fn max_two_j(&self) -> u32 {
        self.max_two_j
    }

    /// Coefficients for column indices `a = mu..d`, if tabulated.
    pub fn column(&self, two_j: u32, l: usize, mu: usize) -> Option<&[f64]> {
        if two_j > self.max_two_j || l > two_j as usize || mu > l {
            return None;
        }
        let d = two_j as usize + 1;
        let mut start = self.offsets[two_j as usize];
        for ll in 0..l {
            for m in 0..=ll {
                start += d - m;
            }
        }
        for m in 0..mu {
            start += d - m;
        }
        Some(&self.values[start..start + d - mu])
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&self.max_two_j.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a cache file. Returns `Ok(None)` for files with a foreign
    /// header, wrong version, or truncated payload.
    pub fn read_from(path: &Path) -> Result<Option<Self>> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        if r.read_exact(&mut magic).is_err() || &magic != CACHE_MAGIC {
            return Ok(None);
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        if u32::from_le_bytes(word) != CACHE_VERSION {
            return Ok(None);
        }
        r.read_exact(&mut word)?;
        let max_two_j = u32::from_le_bytes(word);
        if max_two_j > 400 {
            return Ok(None);
        }
        let offsets = table_offsets(max_two_j);
        let expected = *offsets.last().unwrap();
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != expected * 8 {
            return Ok(None);
        }
        let values = bytes
            .chunks_exact(8)
            .map(|ch| f64::from_le_bytes(ch.try_into().unwrap()))
            .collect();
        Ok(Some(Self {
            max_two_j,
            values,
            offsets,
        }))
    }
}

static INSTALLED: RwLock<Option<std::sync::Arc<TensorCgTable>>> = RwLock::new(None);

/// Makes a table available to tensor-operator construction.
pub fn install_table(table: TensorCgTable) {
    *INSTALLED.write().unwrap() = Some(std::sync::Arc::new(table));
}

/// Loads and installs a cache file if it is valid; a missing or invalid
/// file is not an error.
pub fn install_table_from(path: &Path) -> Result<bool> {
    if !path.exists() {
        return Ok(false);
    }
    match TensorCgTable::read_from(path)? {
        Some(t) => {
            install_table(t);
            Ok(true)
        }
        None => Ok(false),
    }
}

pub(crate) fn installed_table() -> Option<std::sync::Arc<TensorCgTable>> {
    INSTALLED.read().unwrap().clone()
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Racah's formula summed term by term in f64, only usable for tiny spins.
    fn racah_f64(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> f64 {
        fn fact(x: f64) -> f64 {
            let n = x.round() as i64;
            (1..=n).map(|k| k as f64).product()
        }
        if (m - m1 - m2).abs() > 1e-9 {
            return 0.0;
        }
        let pre = ((2.0 * j + 1.0) * fact(j + j1 - j2) * fact(j - j1 + j2) * fact(j1 + j2 - j)
            / fact(j1 + j2 + j + 1.0))
        .sqrt()
            * (fact(j + m) * fact(j - m) * fact(j1 - m1) * fact(j1 + m1) * fact(j2 - m2) * fact(j2 + m2)).sqrt();
        let mut s = 0.0;
        for k in 0..50 {
            let k = k as f64;
            let args = [
                k,
                j1 + j2 - j - k,
                j1 - m1 - k,
                j2 + m2 - k,
                j - j2 + m1 + k,
                j - j1 - m2 + k,
            ];
            if args.iter().any(|&x| x < -1e-9) {
                continue;
            }
            let den: f64 = args.iter().map(|&x| fact(x)).product();
            s += if (k as i64) % 2 == 0 { 1.0 } else { -1.0 } / den;
        }
        pre * s
    }

    #[test]
    fn singlet_coefficient() {
        let v = clebsch_gordan(1, 1, 1, -1, 0, 0);
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((clebsch_gordan(1, -1, 1, 1, 0, 0) + 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn selection_rule_and_scalar_coupling() {
        assert_eq!(clebsch_gordan(2, 0, 2, 2, 2, 0), 0.0);
        for two_j in 0..12 {
            for two_m in (-two_j..=two_j).step_by(2) {
                assert!((clebsch_gordan(two_j, two_m, 0, 0, two_j, two_m) - 1.0).abs() < 1e-15);
            }
        }
        // triangle violation
        assert_eq!(clebsch_gordan(2, 0, 2, 0, 6, 0), 0.0);
    }

    #[test]
    fn matches_racah_oracle_for_small_spins() {
        for two_j1 in 0..=4i32 {
            for two_j2 in 0..=4 {
                let mut tj = (two_j1 - two_j2).abs();
                while tj <= two_j1 + two_j2 {
                    for tm1 in (-two_j1..=two_j1).step_by(2) {
                        for tm2 in (-two_j2..=two_j2).step_by(2) {
                            let tm = tm1 + tm2;
                            if tm.abs() > tj {
                                continue;
                            }
                            let exact = clebsch_gordan(two_j1, tm1, two_j2, tm2, tj, tm);
                            let oracle = racah_f64(
                                two_j1 as f64 / 2.0,
                                tm1 as f64 / 2.0,
                                two_j2 as f64 / 2.0,
                                tm2 as f64 / 2.0,
                                tj as f64 / 2.0,
                                tm as f64 / 2.0,
                            );
                            assert!((exact - oracle).abs() < 1e-13, "{two_j1} {tm1} {two_j2} {tm2} {tj}");
                        }
                    }
                    tj += 2;
                }
            }
        }
    }

    #[test]
    fn orthogonality_at_large_spin() {
        // sum_{m1,m2} <j1 m1 j2 m2|J M><j1 m1 j2 m2|J' M> = delta_JJ'
        let (tj1, tj2) = (40, 37);
        let tm = 3;
        for (ja, jb) in [(41, 41), (41, 43), (77, 77), (3, 5)] {
            let mut s = 0.0;
            for tm1 in (-tj1..=tj1).step_by(2) {
                let tm2 = tm - tm1;
                s += clebsch_gordan(tj1, tm1, tj2, tm2, ja, tm) * clebsch_gordan(tj1, tm1, tj2, tm2, jb, tm);
            }
            let expected = if ja == jb { 1.0 } else { 0.0 };
            assert!((s - expected).abs() < 1e-12, "{ja} {jb}: {s}");
        }
    }

    #[test]
    fn cache_file_round_trip_and_rejection() {
        let table = TensorCgTable::compute(6);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cg.bin");
        table.write_to(&path).unwrap();
        let back = TensorCgTable::read_from(&path).unwrap().unwrap();
        assert_eq!(back, table);
        let col = back.column(4, 3, 1).unwrap();
        assert_eq!(col.len(), 4);
        assert_eq!(col[0], clebsch_gordan(4, 2, 6, 2, 4, 4));

        let bogus = dir.path().join("bogus.bin");
        std::fs::write(&bogus, b"not a cache file at all").unwrap();
        assert!(TensorCgTable::read_from(&bogus).unwrap().is_none());
        let mut truncated = std::fs::read(&path).unwrap();
        truncated.truncate(truncated.len() - 3);
        std::fs::write(&bogus, truncated).unwrap();
        assert!(TensorCgTable::read_from(&bogus).unwrap().is_none());
    }
}
