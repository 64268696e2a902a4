//! Seedable bit generators and the periodic corruption transform.
//!
//! Each family produces fixed-width blocks whose bits are emitted most
//! significant first: 32 bits per MT19937 output, 64 per Xorshift step, 128
//! per AES block, the modulus width per congruential state and the `k` low
//! bits per Micali-Schnorr step. A [`Generator`] buffers partial blocks, so
//! consecutive [`Generator::generate`] calls continue one stream.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use aes::cipher::generic_array::GenericArray;
use aes::cipher::{BlockEncrypt, KeyInit};
use aes::{Aes128, Aes192, Aes256};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bitstream::{to_signed, BitSequence, SignedSequence};
use crate::error::{Error, Result};

/// Default prime for QCG-I: the first prime above ⌊π·2^510⌋ (512 bits).
pub const QCG1_PRIME_HEX: &str = "c90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74020bbea63b139b22514a08798e3404ddef9519b3cd3a431b302b0a6df25f14374fe1356d6d51c5ef";

/// Default Micali-Schnorr factor: first prime above ⌊√3·2^511⌋ with gcd(11, p-1) = 1.
pub const MS_P_HEX: &str = "ddb3d742c265539d92ba16b83c5c1dc492ec1a6629ed23cc639053243722d3712485e7ecaf78aeded4c98557091147c3e6267926d1d0f634686699d00d6cd23b";

/// Default Micali-Schnorr factor: first prime above ⌊√2·2^511⌋ with gcd(11, q-1) = 1.
pub const MS_Q_HEX: &str = "b504f333f9de6484597d89b3754abe9f1d6f60ba893ba84ced17ac85833399154afc83043ab8a2c3a8b1fe6fdc83db390f74a85e439c7b4a780487363dfa2869";

pub const LCG_MODULUS: u64 = 2_147_483_647;
pub const LCG_MULTIPLIER: u64 = 950_706_376;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Mt19937,
    Xorshift,
    Lcg,
    Qcg1,
    Qcg2,
    Ccg,
    MicaliSchnorr,
    AesCtr,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Self::AesCtr,
        Self::Mt19937,
        Self::Xorshift,
        Self::Lcg,
        Self::MicaliSchnorr,
        Self::Qcg1,
        Self::Qcg2,
        Self::Ccg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Mt19937 => "mt19937",
            Self::Xorshift => "xorshift",
            Self::Lcg => "lcg",
            Self::Qcg1 => "qcg1",
            Self::Qcg2 => "qcg2",
            Self::Ccg => "ccg",
            Self::MicaliSchnorr => "micali-schnorr",
            Self::AesCtr => "aes-ctr",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Ok(match key.as_str() {
            "mt19937" | "mt" | "mersennetwister" => Self::Mt19937,
            "xorshift" | "xorshift64" => Self::Xorshift,
            "lcg" => Self::Lcg,
            "qcg1" | "qcgi" => Self::Qcg1,
            "qcg2" | "qcgii" => Self::Qcg2,
            "ccg" => Self::Ccg,
            "micalischnorr" | "ms" => Self::MicaliSchnorr,
            "aesctr" | "aes" => Self::AesCtr,
            _ => return Err(Error::Config(format!("unknown generator family `{s}`"))),
        })
    }
}

/// A generator family, a seed, and optional family-specific parameters.
///
/// Recognized parameters (integers accept decimal or `0x` hex):
///
/// | family           | keys                         |
/// |------------------|------------------------------|
/// | `xorshift`       | `a`, `b`, `c` (shift triple) |
/// | `lcg`            | `modulus`, `multiplier`, `x0`|
/// | `qcg1`           | `p`, `x0`                    |
/// | `qcg2`, `ccg`    | `x0`                         |
/// | `micali-schnorr` | `p`, `q`, `e`, `x0`          |
/// | `aes-ctr`        | `key`, `ctr` (hex bytes)     |
///
/// Unset starting states are derived from the seed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
}

impl GeneratorSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        Self {
            family,
            seed,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn build(&self) -> Result<Generator> {
        let known: &[&str] = match self.family {
            Family::Mt19937 => &[],
            Family::Xorshift => &["a", "b", "c"],
            Family::Lcg => &["modulus", "multiplier", "x0"],
            Family::Qcg1 => &["p", "x0"],
            Family::Qcg2 | Family::Ccg => &["x0"],
            Family::MicaliSchnorr => &["p", "q", "e", "x0"],
            Family::AesCtr => &["key", "ctr"],
        };
        if let Some(bad) = self.params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::BadParameters(format!(
                "`{bad}` is not a parameter of {}",
                self.family
            )));
        }
        let source: Box<dyn BlockSource> = match self.family {
            Family::Mt19937 => Box::new(Mt19937::from_seed64(self.seed)),
            Family::Xorshift => Box::new(Xorshift64::from_spec(self)?),
            Family::Lcg => Box::new(Congruential::lcg(self)?),
            Family::Qcg1 => Box::new(Congruential::qcg1(self)?),
            Family::Qcg2 => Box::new(Congruential::qcg2(self)?),
            Family::Ccg => Box::new(Congruential::ccg(self)?),
            Family::MicaliSchnorr => Box::new(MicaliSchnorr::from_spec(self)?),
            Family::AesCtr => Box::new(AesCtr::from_spec(self)?),
        };
        Ok(Generator {
            source,
            buffer: BitSequence::new(),
            pos: 0,
        })
    }

    fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    fn big_param(&self, key: &str) -> Result<Option<BigUint>> {
        self.param(key).map(|v| parse_biguint(key, v)).transpose()
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(seed={}", self.family, self.seed)?;
        for (k, v) in &self.params {
            write!(f, ", {k}={v}")?;
        }
        f.write_str(")")
    }
}

fn parse_biguint(key: &str, value: &str) -> Result<BigUint> {
    let value = value.trim();
    let parsed = match value.strip_prefix("0x").or_else(|| value.strip_prefix("0X")) {
        Some(hex) => BigUint::parse_bytes(hex.as_bytes(), 16),
        None => BigUint::parse_bytes(value.as_bytes(), 10),
    };
    parsed.ok_or_else(|| Error::BadParameters(format!("`{key}` = `{value}` is not an integer")))
}

fn parse_hex_bytes(key: &str, value: &str) -> Result<Vec<u8>> {
    let value = value.trim().trim_start_matches("0x");
    if !value.len().is_multiple_of(2) {
        return Err(Error::BadParameters(format!("`{key}` has an odd number of hex digits")));
    }
    (0..value.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&value[i..i + 2], 16)
                .map_err(|_| Error::BadParameters(format!("`{key}` is not valid hex")))
        })
        .collect()
}

/// SplitMix64 output function.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic child seed for `(stream, index)` under `base`.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base ^ splitmix64(stream)).wrapping_add(index))
}

/// `nbytes` reproducible bytes expanded from a seed.
fn seed_bytes(seed: u64, nbytes: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(nbytes);
    let mut counter = 0u64;
    while out.len() < nbytes {
        let word = splitmix64(seed.wrapping_add(counter.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        out.extend_from_slice(&word.to_be_bytes());
        counter += 1;
    }
    out.truncate(nbytes);
    out
}

fn seed_biguint(seed: u64, bits: u64) -> BigUint {
    let bytes = seed_bytes(seed, bits.div_ceil(8) as usize);
    let value = BigUint::from_bytes_be(&bytes);
    value % (BigUint::one() << bits)
}

/// Fermat test to bases 2, 3, 5, 7; enough to catch mistyped moduli.
fn probably_prime(p: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if p < &two {
        return false;
    }
    let pm1 = p - 1u32;
    [2u32, 3, 5, 7].iter().all(|&b| {
        let b = BigUint::from(b);
        b >= *p || b.modpow(&pm1, p).is_one()
    })
}

/// One family's block emitter.
trait BlockSource: Send {
    fn next_block(&mut self, out: &mut BitSequence);
}

/// A running generator instance.
pub struct Generator {
    source: Box<dyn BlockSource>,
    buffer: BitSequence,
    pos: usize,
}

impl Generator {
    /// The next `nbits` bits of the stream.
    pub fn generate(&mut self, nbits: usize) -> BitSequence {
        let mut out = BitSequence::with_capacity(nbits);
        while out.len() < nbits {
            if self.pos == self.buffer.len() {
                self.buffer = BitSequence::new();
                self.pos = 0;
                self.source.next_block(&mut self.buffer);
            }
            let take = (nbits - out.len()).min(self.buffer.len() - self.pos);
            if self.pos == 0 && take == self.buffer.len() {
                out.extend_from(&self.buffer);
            } else {
                out.extend_from(&self.buffer.slice(self.pos, self.pos + take));
            }
            self.pos += take;
        }
        out
    }
}

/// Builds a fresh instance of `spec` and draws `nbits` bits.
pub fn generate(spec: &GeneratorSpec, nbits: usize) -> Result<BitSequence> {
    if nbits == 0 {
        return Err(Error::Config("nbits must be at least 1".into()));
    }
    Ok(spec.build()?.generate(nbits))
}

const MT_N: usize = 624;
const MT_M: usize = 397;

/// 32-bit Mersenne Twister.
#[derive(Clone)]
pub struct Mt19937 {
    state: [u32; MT_N],
    index: usize,
}

impl Mt19937 {
    pub fn new(seed: u32) -> Self {
        let mut state = [0u32; MT_N];
        state[0] = seed;
        for i in 1..MT_N {
            let prev = state[i - 1];
            state[i] = 1_812_433_253u32
                .wrapping_mul(prev ^ (prev >> 30))
                .wrapping_add(i as u32);
        }
        Self { state, index: MT_N }
    }

    pub fn from_key(key: &[u32]) -> Self {
        let mut mt = Self::new(19_650_218);
        let mut i = 1usize;
        let mut j = 0usize;
        let len = key.len().max(1);
        for _ in 0..MT_N.max(key.len()) {
            let prev = mt.state[i - 1];
            mt.state[i] = (mt.state[i] ^ (prev ^ (prev >> 30)).wrapping_mul(1_664_525))
                .wrapping_add(key.get(j).copied().unwrap_or(0))
                .wrapping_add(j as u32);
            i += 1;
            j += 1;
            if i >= MT_N {
                mt.state[0] = mt.state[MT_N - 1];
                i = 1;
            }
            if j >= len {
                j = 0;
            }
        }
        for _ in 0..MT_N - 1 {
            let prev = mt.state[i - 1];
            mt.state[i] = (mt.state[i] ^ (prev ^ (prev >> 30)).wrapping_mul(1_566_083_941)).wrapping_sub(i as u32);
            i += 1;
            if i >= MT_N {
                mt.state[0] = mt.state[MT_N - 1];
                i = 1;
            }
        }
        mt.state[0] = 0x8000_0000;
        mt.index = MT_N;
        mt
    }

    /// Seeds below 2³² use the single-word initializer, larger seeds the key initializer.
    pub fn from_seed64(seed: u64) -> Self {
        match u32::try_from(seed) {
            Ok(s) => Self::new(s),
            Err(_) => Self::from_key(&[seed as u32, (seed >> 32) as u32]),
        }
    }

    fn twist(&mut self) {
        const UPPER: u32 = 0x8000_0000;
        const LOWER: u32 = 0x7fff_ffff;
        const MATRIX_A: u32 = 0x9908_b0df;
        for i in 0..MT_N {
            let y = (self.state[i] & UPPER) | (self.state[(i + 1) % MT_N] & LOWER);
            let mut next = self.state[(i + MT_M) % MT_N] ^ (y >> 1);
            if y & 1 == 1 {
                next ^= MATRIX_A;
            }
            self.state[i] = next;
        }
        self.index = 0;
    }

    pub fn next_u32(&mut self) -> u32 {
        if self.index >= MT_N {
            self.twist();
        }
        let mut y = self.state[self.index];
        self.index += 1;
        y ^= y >> 11;
        y ^= (y << 7) & 0x9d2c_5680;
        y ^= (y << 15) & 0xefc6_0000;
        y ^ (y >> 18)
    }
}

impl BlockSource for Mt19937 {
    fn next_block(&mut self, out: &mut BitSequence) {
        for _ in 0..MT_N {
            out.push_word(u64::from(self.next_u32()), 32);
        }
    }
}

/// 64-bit three-shift Xorshift.
struct Xorshift64 {
    state: u64,
    shifts: (u32, u32, u32),
}

impl Xorshift64 {
    fn from_spec(spec: &GeneratorSpec) -> Result<Self> {
        let shift = |key: &str, default: u32| -> Result<u32> {
            match spec.param(key) {
                None => Ok(default),
                Some(v) => v
                    .parse::<u32>()
                    .ok()
                    .filter(|s| (1..64).contains(s))
                    .ok_or_else(|| Error::BadParameters(format!("shift `{key}` must be 1..=63"))),
            }
        };
        if spec.seed == 0 {
            return Err(Error::BadParameters("xorshift needs a nonzero seed".into()));
        }
        Ok(Self {
            state: spec.seed,
            shifts: (shift("a", 13)?, shift("b", 7)?, shift("c", 17)?),
        })
    }

    fn next_u64(&mut self) -> u64 {
        let (a, b, c) = self.shifts;
        let mut x = self.state;
        x ^= x << a;
        x ^= x >> b;
        x ^= x << c;
        self.state = x;
        x
    }
}

impl BlockSource for Xorshift64 {
    fn next_block(&mut self, out: &mut BitSequence) {
        for _ in 0..64 {
            out.push_word(self.next_u64(), 64);
        }
    }
}

#[derive(Clone, Copy)]
enum Recurrence {
    /// x ← a·x mod M
    Linear,
    /// x ← x² mod p
    Square,
    /// x ← 2x² + 3x + 1 mod 2^512
    Quadratic,
    /// x ← x³ mod 2^512
    Cube,
}

/// LCG, QCG-I, QCG-II and CCG over arbitrary-precision integers.
struct Congruential {
    recurrence: Recurrence,
    modulus: BigUint,
    multiplier: BigUint,
    state: BigUint,
    width: u64,
}

impl Congruential {
    fn new(recurrence: Recurrence, modulus: BigUint, multiplier: BigUint, state: BigUint) -> Self {
        let width = (&modulus - 1u32).bits();
        Self {
            recurrence,
            modulus,
            multiplier,
            state,
            width,
        }
    }

    fn lcg(spec: &GeneratorSpec) -> Result<Self> {
        let modulus = spec.big_param("modulus")?.unwrap_or_else(|| BigUint::from(LCG_MODULUS));
        let multiplier = spec
            .big_param("multiplier")?
            .unwrap_or_else(|| BigUint::from(LCG_MULTIPLIER));
        if multiplier.is_zero() || multiplier >= modulus {
            return Err(Error::BadParameters("LCG needs modulus > multiplier > 0".into()));
        }
        let state = match spec.big_param("x0")? {
            Some(x0) => x0,
            None => BigUint::one() + BigUint::from(spec.seed) % (&modulus - 1u32),
        };
        if state.is_zero() || state >= modulus {
            return Err(Error::BadParameters("LCG x0 must lie in 1..modulus".into()));
        }
        Ok(Self::new(Recurrence::Linear, modulus, multiplier, state))
    }

    fn qcg1(spec: &GeneratorSpec) -> Result<Self> {
        let p = match spec.big_param("p")? {
            Some(p) => p,
            None => BigUint::parse_bytes(QCG1_PRIME_HEX.as_bytes(), 16).expect("valid constant"),
        };
        if p.is_even() || !probably_prime(&p) {
            return Err(Error::BadParameters("QCG-I modulus must be an odd prime".into()));
        }
        let state = match spec.big_param("x0")? {
            Some(x0) => x0,
            None => BigUint::from(2u32) + seed_biguint(spec.seed, p.bits()) % (&p - 3u32),
        };
        if state < BigUint::from(2u32) || state >= &p - 1u32 {
            return Err(Error::BadParameters("QCG-I x0 must lie in 2..p-1".into()));
        }
        Ok(Self::new(Recurrence::Square, p, BigUint::zero(), state))
    }

    fn power_of_two_state(spec: &GeneratorSpec, force_odd: bool) -> Result<(BigUint, BigUint)> {
        let modulus = BigUint::one() << 512u32;
        let state = match spec.big_param("x0")? {
            Some(x0) => {
                if x0 >= modulus {
                    return Err(Error::BadParameters("x0 must be below 2^512".into()));
                }
                if force_odd && x0.is_even() {
                    return Err(Error::BadParameters("CCG x0 must be odd".into()));
                }
                x0
            }
            None => {
                let mut x0 = seed_biguint(spec.seed, 512);
                if force_odd {
                    x0.set_bit(0, true);
                }
                x0
            }
        };
        Ok((modulus, state))
    }

    fn qcg2(spec: &GeneratorSpec) -> Result<Self> {
        let (modulus, state) = Self::power_of_two_state(spec, false)?;
        Ok(Self::new(Recurrence::Quadratic, modulus, BigUint::zero(), state))
    }

    fn ccg(spec: &GeneratorSpec) -> Result<Self> {
        let (modulus, state) = Self::power_of_two_state(spec, true)?;
        Ok(Self::new(Recurrence::Cube, modulus, BigUint::zero(), state))
    }

    fn step(&mut self) {
        let x = &self.state;
        self.state = match self.recurrence {
            Recurrence::Linear => (&self.multiplier * x) % &self.modulus,
            Recurrence::Square => (x * x) % &self.modulus,
            Recurrence::Quadratic => (BigUint::from(2u32) * x * x + BigUint::from(3u32) * x + 1u32) % &self.modulus,
            Recurrence::Cube => (x * x * x) % &self.modulus,
        };
    }
}

fn push_biguint(out: &mut BitSequence, value: &BigUint, width: u64) {
    for bit in (0..width).rev() {
        out.push(value.bit(bit));
    }
}

impl BlockSource for Congruential {
    fn next_block(&mut self, out: &mut BitSequence) {
        self.step();
        push_biguint(out, &self.state, self.width);
    }
}

/// Micali-Schnorr: y = x^e mod N, next x = top r bits of y, emit low k bits.
struct MicaliSchnorr {
    modulus: BigUint,
    exponent: BigUint,
    state: BigUint,
    k: u64,
}

impl MicaliSchnorr {
    fn from_spec(spec: &GeneratorSpec) -> Result<Self> {
        let prime = |key: &str, default: &str| -> Result<BigUint> {
            Ok(spec
                .big_param(key)?
                .unwrap_or_else(|| BigUint::parse_bytes(default.as_bytes(), 16).expect("valid constant")))
        };
        let p = prime("p", MS_P_HEX)?;
        let q = prime("q", MS_Q_HEX)?;
        if p.is_even() || q.is_even() || !probably_prime(&p) || !probably_prime(&q) {
            return Err(Error::BadParameters("Micali-Schnorr factors must be odd primes".into()));
        }
        let e = spec.big_param("e")?.unwrap_or_else(|| BigUint::from(11u32));
        let modulus = &p * &q;
        let phi = (&p - 1u32) * (&q - 1u32);
        let nbits = modulus.bits();
        if e <= BigUint::one() || !e.gcd(&phi).is_one() {
            return Err(Error::BadParameters(
                "Micali-Schnorr needs 1 < e with gcd(e, φ(N)) = 1".into(),
            ));
        }
        let e_small = u64::try_from(&e).map_err(|_| Error::BadParameters("exponent too large".into()))?;
        if 80 * e_small > nbits {
            return Err(Error::BadParameters(format!(
                "Micali-Schnorr needs 80e <= bits(N); e = {e_small}, bits(N) = {nbits}"
            )));
        }
        let k = nbits * (e_small - 2) / e_small;
        let r = nbits - k;
        let state = match spec.big_param("x0")? {
            Some(x0) => x0,
            None => BigUint::one() + seed_biguint(spec.seed, r) % ((BigUint::one() << r) - 1u32),
        };
        if state.is_zero() || state.bits() > r {
            return Err(Error::BadParameters(format!(
                "Micali-Schnorr x0 must be a nonzero {r}-bit value"
            )));
        }
        Ok(Self {
            modulus,
            exponent: e,
            state,
            k,
        })
    }
}

impl BlockSource for MicaliSchnorr {
    fn next_block(&mut self, out: &mut BitSequence) {
        let y = self.state.modpow(&self.exponent, &self.modulus);
        self.state = &y >> self.k;
        push_biguint(out, &y, self.k);
    }
}

enum AesKey {
    K128(Aes128),
    K192(Aes192),
    K256(Aes256),
}

/// AES in counter mode; the counter is a 128-bit big-endian integer.
struct AesCtr {
    cipher: AesKey,
    counter: u128,
}

impl AesCtr {
    fn from_spec(spec: &GeneratorSpec) -> Result<Self> {
        let derived = seed_bytes(spec.seed, 32);
        let key = match spec.param("key") {
            Some(v) => parse_hex_bytes("key", v)?,
            None => derived[..16].to_vec(),
        };
        let ctr = match spec.param("ctr") {
            Some(v) => parse_hex_bytes("ctr", v)?,
            None => derived[16..].to_vec(),
        };
        let ctr: [u8; 16] = ctr
            .try_into()
            .map_err(|_| Error::BadParameters("AES counter must be 16 bytes".into()))?;
        let cipher = match key.len() {
            16 => AesKey::K128(Aes128::new(GenericArray::from_slice(&key))),
            24 => AesKey::K192(Aes192::new(GenericArray::from_slice(&key))),
            32 => AesKey::K256(Aes256::new(GenericArray::from_slice(&key))),
            len => {
                return Err(Error::BadParameters(format!(
                    "AES key must be 16, 24 or 32 bytes, got {len}"
                )))
            }
        };
        Ok(Self {
            cipher,
            counter: u128::from_be_bytes(ctr),
        })
    }

    fn keystream_block(&mut self) -> [u8; 16] {
        let mut block = GenericArray::clone_from_slice(&self.counter.to_be_bytes());
        match &self.cipher {
            AesKey::K128(c) => c.encrypt_block(&mut block),
            AesKey::K192(c) => c.encrypt_block(&mut block),
            AesKey::K256(c) => c.encrypt_block(&mut block),
        }
        self.counter = self.counter.wrapping_add(1);
        block.into()
    }
}

impl BlockSource for AesCtr {
    fn next_block(&mut self, out: &mut BitSequence) {
        for _ in 0..64 {
            let block = self.keystream_block();
            for byte in block {
                out.push_word(u64::from(byte), 8);
            }
        }
    }
}

/// Forces every `T`-th position: `-1` where `k mod 2T = 0`, `+1` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicCorruption {
    period: usize,
}

impl PeriodicCorruption {
    pub fn new(period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::Config("corruption period must be at least 1".into()));
        }
        Ok(Self { period })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn apply_in_place(&self, stream: &mut SignedSequence) {
        let t = self.period;
        for k in (0..stream.len()).step_by(t) {
            stream.force(k, k % (2 * t) != 0);
        }
    }
}

pub fn periodic_corrupt(stream: &SignedSequence, corruption: &PeriodicCorruption) -> SignedSequence {
    let mut out = stream.clone();
    corruption.apply_in_place(&mut out);
    out
}

/// `nbits` of `base`, mapped to ±1 and periodically corrupted with period `period`.
pub fn make_experiment1_stream(base: &GeneratorSpec, period: usize, nbits: usize) -> Result<SignedSequence> {
    let corruption = PeriodicCorruption::new(period)?;
    let mut stream = to_signed(&generate(base, nbits)?);
    corruption.apply_in_place(&mut stream);
    Ok(stream)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mt19937_reference_outputs() {
        let mut mt = Mt19937::new(5489);
        assert_eq!(mt.next_u32(), 3_499_211_612);
        let mut mt = Mt19937::from_key(&[0x123, 0x234, 0x345, 0x456]);
        let first: Vec<u32> = (0..5).map(|_| mt.next_u32()).collect();
        assert_eq!(
            first,
            [1_067_595_299, 955_945_823, 477_289_528, 4_107_218_783, 4_228_976_476]
        );
    }

    #[test]
    fn mt19937_bits_are_msb_first() {
        let bits = generate(&GeneratorSpec::new(Family::Mt19937, 5489), 32).unwrap();
        let word = bits.iter().fold(0u32, |acc, b| acc << 1 | u32::from(b));
        assert_eq!(word, 3_499_211_612);
    }

    #[test]
    fn aes_fips197_vector() {
        let spec = GeneratorSpec::new(Family::AesCtr, 0)
            .with_param("key", "000102030405060708090a0b0c0d0e0f")
            .with_param("ctr", "00112233445566778899aabbccddeeff");
        let bits = generate(&spec, 128).unwrap();
        assert_eq!(
            bits.as_packed(),
            &[0x69, 0xc4, 0xe0, 0xd8, 0x6a, 0x7b, 0x04, 0x30, 0xd8, 0xcd, 0xb7, 0x80, 0x70, 0xb4, 0xc5, 0x5a]
        );
    }

    #[test]
    fn lcg_recurrence() {
        let (m, a, s) = (2_147_483_647u64, 950_706_376u64, 23_482_349u64);
        let spec = GeneratorSpec::new(Family::Lcg, 0).with_param("x0", s.to_string());
        let bits = generate(&spec, 62).unwrap();
        let first = bits.slice(0, 31).iter().fold(0u64, |acc, b| acc << 1 | u64::from(b));
        let second = bits.slice(31, 62).iter().fold(0u64, |acc, b| acc << 1 | u64::from(b));
        assert_eq!(first, a * s % m);
        assert_eq!(second, a * (a * s % m) % m);
    }

    #[test]
    fn default_primes_are_prime() {
        for hex in [QCG1_PRIME_HEX, MS_P_HEX, MS_Q_HEX] {
            let p = BigUint::parse_bytes(hex.as_bytes(), 16).unwrap();
            assert_eq!(p.bits(), 512);
            assert!(probably_prime(&p));
        }
        assert!(!probably_prime(&BigUint::from(561u32 * 3)));
    }

    #[test]
    fn micali_schnorr_widths() {
        let gen = MicaliSchnorr::from_spec(&GeneratorSpec::new(Family::MicaliSchnorr, 1)).unwrap();
        assert_eq!(gen.modulus.bits(), 1024);
        assert_eq!(gen.k, 837);
    }

    #[test]
    fn bad_parameters() {
        let bad = [
            GeneratorSpec::new(Family::Xorshift, 0),
            GeneratorSpec::new(Family::Lcg, 1).with_param("multiplier", "0"),
            GeneratorSpec::new(Family::Lcg, 1)
                .with_param("modulus", "10")
                .with_param("multiplier", "11"),
            GeneratorSpec::new(Family::Qcg1, 1).with_param("p", "1000"),
            GeneratorSpec::new(Family::Ccg, 1).with_param("x0", "4"),
            GeneratorSpec::new(Family::MicaliSchnorr, 1).with_param("p", "0x10"),
            GeneratorSpec::new(Family::AesCtr, 1).with_param("key", "0011"),
            GeneratorSpec::new(Family::Mt19937, 1).with_param("bogus", "1"),
        ];
        for spec in bad {
            assert!(matches!(spec.build(), Err(Error::BadParameters(_))), "{spec}");
        }
    }

    #[test]
    fn corruption_positions() {
        let ones = to_signed(&BitSequence::from_bits(&[1; 8]));
        let out = periodic_corrupt(&ones, &PeriodicCorruption::new(2).unwrap());
        assert_eq!(out.values(), &[-1, 1, 1, 1, -1, 1, 1, 1]);

        let zeros = to_signed(&BitSequence::from_bits(&[0; 8]));
        let out = periodic_corrupt(&zeros, &PeriodicCorruption::new(1).unwrap());
        assert_eq!(out.values(), &[-1, 1, -1, 1, -1, 1, -1, 1]);

        let out = periodic_corrupt(&ones, &PeriodicCorruption::new(100).unwrap());
        assert_eq!(out.values(), &[-1, 1, 1, 1, 1, 1, 1, 1]);
        assert!(PeriodicCorruption::new(0).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for family in Family::ALL {
            assert_eq!(family.name().parse::<Family>().unwrap(), family);
        }
        assert_eq!("QCG-II".parse::<Family>().unwrap(), Family::Qcg2);
    }
}
