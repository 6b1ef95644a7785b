//! Random subset sum instances over `Z_{2^n}`.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{low_mask, BinVector, MAX_DIM};
use crate::error::{Error, Result};
use crate::rng::{Purpose, SeedStream};

/// A pair `(a, s)` with `a` in `(Z_{2^n})^n`, optionally carrying the planted
/// weight-`n/2` solution and the seed it was generated from.
///
/// Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsspInstance {
    n: usize,
    a: Vec<u64>,
    s: u64,
    planted: Option<BinVector>,
    seed: Option<u64>,
}

impl RsspInstance {
    pub fn new(a: Vec<u64>, s: u64) -> Result<Self> {
        Self::with_metadata(a, s, None, None)
    }

    pub fn with_metadata(
        a: Vec<u64>,
        s: u64,
        planted: Option<BinVector>,
        seed: Option<u64>,
    ) -> Result<Self> {
        let n = a.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "dimension must be in 1..={MAX_DIM}, got {n}"
            )));
        }
        let mask = low_mask(n as u32);
        if let Some((i, v)) = a.iter().enumerate().find(|(_, &v)| v & !mask != 0) {
            return Err(Error::InvalidParameter(format!(
                "a[{i}] = {v:#x} is not reduced modulo 2^{n}"
            )));
        }
        if s & !mask != 0 {
            return Err(Error::InvalidParameter(format!(
                "s = {s:#x} is not reduced modulo 2^{n}"
            )));
        }
        let inst = RsspInstance { n, a, s, planted: None, seed };
        if let Some(e) = planted {
            if e.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "planted vector has length {}, expected {n}",
                    e.len()
                )));
            }
            if !inst.is_planted_shape(&e) || inst.key(&e) != s {
                return Err(Error::InvalidParameter(
                    "planted vector does not solve the instance with weight n/2".into(),
                ));
            }
        }
        Ok(RsspInstance { planted, ..inst })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[u64] {
        &self.a
    }

    pub fn target(&self) -> u64 {
        self.s
    }

    pub fn planted(&self) -> Option<BinVector> {
        self.planted
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn mask(&self) -> u64 {
        low_mask(self.n as u32)
    }

    /// `<a, x> mod 2^n`.
    pub fn key(&self, x: &BinVector) -> u64 {
        x.support()
            .fold(0u64, |acc, i| acc.wrapping_add(self.a[i]))
            & self.mask()
    }

    /// Same as [`key`](Self::key) on a raw word.
    pub(crate) fn key_bits(&self, bits: u64) -> u64 {
        let mut rest = bits;
        let mut acc = 0u64;
        while rest != 0 {
            acc = acc.wrapping_add(self.a[rest.trailing_zeros() as usize]);
            rest &= rest - 1;
        }
        acc & self.mask()
    }

    /// True iff `<a, f> = s (mod 2^n)`. Weight is not inspected.
    pub fn verify(&self, f: &BinVector) -> Result<bool> {
        if f.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "candidate has length {}, instance has n = {}",
                f.len(),
                self.n
            )));
        }
        Ok(self.key(f) == self.s)
    }

    pub fn is_planted_shape(&self, f: &BinVector) -> bool {
        f.len() == self.n && self.n.is_multiple_of(2) && f.weight() as usize == self.n / 2
    }

    /// Verifies and checks weight `n/2`.
    pub fn is_solution(&self, f: &BinVector) -> bool {
        self.is_planted_shape(f) && self.key(f) == self.s
    }

    /// `n / log2(max a_i)`.
    pub fn density(&self) -> Result<f64> {
        let max = self.a.iter().copied().max().unwrap_or(0);
        if max <= 1 {
            return Err(Error::DegenerateInstance(format!(
                "max weight {max} gives a nonpositive logarithm"
            )));
        }
        Ok(self.n as f64 / (max as f64).log2())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&InstanceFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// Draws `a` uniformly from `(Z_{2^n})^n` and a planted `e` uniformly among the
/// weight-`n/2` vectors, then sets `s = <a, e>`. Deterministic per seed.
pub fn generate_instance(n: usize, seed: u64) -> Result<(RsspInstance, BinVector)> {
    if n < 2 || !n.is_multiple_of(2) || n > MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "n must be even and in 2..={MAX_DIM}, got {n}"
        )));
    }
    let mut rng = SeedStream::new(seed).rng(Purpose::Instance, 0);
    let mask = low_mask(n as u32);
    let a: Vec<u64> = (0..n).map(|_| rng.gen::<u64>() & mask).collect();

    // partial Fisher-Yates over index positions
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..n / 2 {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    let bits = idx[..n / 2].iter().fold(0u64, |acc, &i| acc | (1 << i));
    let e = BinVector::from_bits_unchecked(bits, n);

    let probe = RsspInstance::new(a, 0)?;
    let s = probe.key(&e);
    let inst = RsspInstance::with_metadata(probe.a, s, Some(e), Some(seed))?;
    Ok((inst, e))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    a: Vec<String>,
    s: String,
    seed: Option<u64>,
    planted: Option<String>,
}

impl From<&RsspInstance> for InstanceFile {
    fn from(inst: &RsspInstance) -> Self {
        InstanceFile {
            n: inst.n,
            a: inst.a.iter().map(|v| format!("{v:x}")).collect(),
            s: format!("{:x}", inst.s),
            seed: inst.seed,
            planted: inst.planted.map(|e| e.to_string()),
        }
    }
}

fn parse_hex(field: &str, text: &str) -> Result<u64> {
    if text.is_empty() || text.starts_with("0x") || text.chars().any(|c| c.is_ascii_uppercase()) {
        return Err(Error::InvalidParameter(format!(
            "{field}: expected lowercase hex without prefix, got {text:?}"
        )));
    }
    u64::from_str_radix(text, 16)
        .map_err(|e| Error::InvalidParameter(format!("{field}: {e} in {text:?}")))
}

impl TryFrom<InstanceFile> for RsspInstance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        if file.a.len() != file.n {
            return Err(Error::InvalidParameter(format!(
                "n = {} but a has {} entries",
                file.n,
                file.a.len()
            )));
        }
        let a = file
            .a
            .iter()
            .enumerate()
            .map(|(i, t)| parse_hex(&format!("a[{i}]"), t))
            .collect::<Result<Vec<_>>>()?;
        let s = parse_hex("s", &file.s)?;
        let planted = file.planted.as_deref().map(str::parse).transpose()?;
        RsspInstance::with_metadata(a, s, planted, file.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn powers() -> RsspInstance {
        RsspInstance::new(vec![1, 2, 4, 8], 5).unwrap()
    }

    #[test]
    fn generation_is_deterministic_and_planted() {
        let (i1, e1) = generate_instance(8, 11).unwrap();
        let (i2, e2) = generate_instance(8, 11).unwrap();
        assert_eq!(i1, i2);
        assert_eq!(e1, e2);
        assert_eq!(e1.weight(), 4);
        assert!(i1.verify(&e1).unwrap());
        assert_eq!(i1.planted(), Some(e1));
    }

    #[test]
    fn odd_dimension_is_rejected() {
        assert!(matches!(generate_instance(7, 1), Err(Error::InvalidParameter(_))));
        assert!(matches!(generate_instance(0, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn verify_on_powers_of_two() {
        let inst = powers();
        assert!(inst.verify(&"1010".parse().unwrap()).unwrap());
        assert!(!inst.verify(&"0110".parse().unwrap()).unwrap());
        assert!(inst.verify(&"101".parse().unwrap()).is_err());
    }

    #[test]
    fn density_values() {
        let a = vec![1, 2, 3, 4, 5, 6, 7, 1 << 7];
        let inst = RsspInstance::new(a, 0).unwrap();
        assert!((inst.density().unwrap() - 8.0 / 7.0).abs() < 1e-12);

        let flat = RsspInstance::new(vec![1; 8], 0).unwrap();
        assert!(matches!(flat.density(), Err(Error::DegenerateInstance(_))));
    }

    #[test]
    fn wraparound_at_full_width() {
        let inst = RsspInstance::new(vec![u64::MAX; 64], u64::MAX - 1).unwrap();
        let f = BinVector::from_bits(0b11, 64).unwrap();
        assert!(inst.verify(&f).unwrap());
    }

    #[test]
    fn json_format_is_lowercase_hex() {
        let inst = RsspInstance::new(vec![0xab, 0x1f, 0, 0x10, 1, 2, 3, 4], 0xc).unwrap();
        let v: serde_json::Value = serde_json::from_str(&inst.to_json().unwrap()).unwrap();
        assert_eq!(v["a"][0], "ab");
        assert_eq!(v["s"], "c");
        assert!(v["seed"].is_null());
        assert!(v["planted"].is_null());
    }

    #[test]
    fn json_rejects_bad_input() {
        let bad = [
            r#"{"n":2,"a":["1"],"s":"0","seed":null,"planted":null}"#,
            r#"{"n":2,"a":["1","0x2"],"s":"0","seed":null,"planted":null}"#,
            r#"{"n":2,"a":["1","A"],"s":"0","seed":null,"planted":null}"#,
            r#"{"n":2,"a":["1","7"],"s":"0","seed":null,"planted":null}"#,
            r#"{"n":2,"a":["1","2"],"s":"0","seed":null,"planted":"11"}"#,
            r#"{"n":2,"a":["1","2"],"s":"0","seed":null,"planted":null,"x":1}"#,
        ];
        for text in bad {
            assert!(RsspInstance::from_json(text).is_err(), "{text}");
        }
    }
}
