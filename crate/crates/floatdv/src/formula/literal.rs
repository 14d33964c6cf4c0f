//! Bit-exact floating-point literals and correctly-rounded decimal conversion.
//!
//! `encode_decimal` converts a decimal string to the nearest representable
//! value under round-to-nearest-ties-to-even by exact integer arithmetic.
//! It deliberately does not go through the host `str::parse` conversion:
//! the host conversion serves as the independent oracle in tests.

use num_bigint::BigUint;
use std::fmt;

/// IEEE-754 binary interchange format parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FpFormat {
    /// binary32: p = 24, e in [-126, 127]
    Float32,
    /// binary64: p = 53, e in [-1022, 1023]
    Float64,
}

impl FpFormat {
    pub fn precision(self) -> u32 {
        match self {
            FpFormat::Float32 => 24,
            FpFormat::Float64 => 53,
        }
    }

    pub fn exponent_bits(self) -> u32 {
        match self {
            FpFormat::Float32 => 8,
            FpFormat::Float64 => 11,
        }
    }

    pub fn significand_bits(self) -> u32 {
        self.precision() - 1
    }

    pub fn min_exponent(self) -> i32 {
        match self {
            FpFormat::Float32 => -126,
            FpFormat::Float64 => -1022,
        }
    }

    pub fn max_exponent(self) -> i32 {
        match self {
            FpFormat::Float32 => 127,
            FpFormat::Float64 => 1023,
        }
    }

    pub fn exponent_bias(self) -> i32 {
        self.max_exponent()
    }

    pub fn total_bits(self) -> u32 {
        1 + self.exponent_bits() + self.significand_bits()
    }
}

/// A floating-point value carried as its raw interchange bits.
///
/// For `Float32` the value lives in the low 32 bits. NaN is canonical:
/// quiet, positive, zero payload except the leading significand bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpLiteral {
    format: FpFormat,
    bits: u64,
}

impl FpLiteral {
    pub fn from_bits(format: FpFormat, bits: u64) -> Self {
        let masked = match format {
            FpFormat::Float32 => bits & 0xFFFF_FFFF,
            FpFormat::Float64 => bits,
        };
        FpLiteral {
            format,
            bits: masked,
        }
    }

    pub fn from_f64(value: f64) -> Self {
        FpLiteral {
            format: FpFormat::Float64,
            bits: value.to_bits(),
        }
    }

    pub fn from_f32(value: f32) -> Self {
        FpLiteral {
            format: FpFormat::Float32,
            bits: value.to_bits() as u64,
        }
    }

    pub fn format(&self) -> FpFormat {
        self.format
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn sign(&self) -> u8 {
        (self.bits >> (self.format.total_bits() - 1)) as u8 & 1
    }

    pub fn biased_exponent(&self) -> u64 {
        let sb = self.format.significand_bits();
        (self.bits >> sb) & ((1u64 << self.format.exponent_bits()) - 1)
    }

    pub fn significand(&self) -> u64 {
        self.bits & ((1u64 << self.format.significand_bits()) - 1)
    }

    pub fn assemble(format: FpFormat, sign: u8, biased_exponent: u64, significand: u64) -> Self {
        let sb = format.significand_bits();
        let eb = format.exponent_bits();
        debug_assert!(biased_exponent < (1 << eb));
        debug_assert!(significand < (1 << sb));
        let bits = ((sign as u64 & 1) << (eb + sb)) | (biased_exponent << sb) | significand;
        FpLiteral::from_bits(format, bits)
    }

    pub fn zero(format: FpFormat, negative: bool) -> Self {
        FpLiteral::assemble(format, negative as u8, 0, 0)
    }

    pub fn infinity(format: FpFormat, negative: bool) -> Self {
        let e = (1u64 << format.exponent_bits()) - 1;
        FpLiteral::assemble(format, negative as u8, e, 0)
    }

    /// The canonical quiet NaN.
    pub fn nan(format: FpFormat) -> Self {
        let e = (1u64 << format.exponent_bits()) - 1;
        let m = 1u64 << (format.significand_bits() - 1);
        FpLiteral::assemble(format, 0, e, m)
    }

    pub fn is_nan(&self) -> bool {
        let e_max = (1u64 << self.format.exponent_bits()) - 1;
        self.biased_exponent() == e_max && self.significand() != 0
    }

    pub fn is_infinite(&self) -> bool {
        let e_max = (1u64 << self.format.exponent_bits()) - 1;
        self.biased_exponent() == e_max && self.significand() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.biased_exponent() == 0 && self.significand() == 0
    }

    /// Reconstruct the numeric value. NaN maps to the host quiet NaN.
    pub fn to_f64(&self) -> f64 {
        match self.format {
            FpFormat::Float64 => f64::from_bits(self.bits),
            FpFormat::Float32 => f32::from_bits(self.bits as u32) as f64,
        }
    }
}

impl fmt::Display for FpLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.format {
            FpFormat::Float64 => write!(f, "{:?}f64", f64::from_bits(self.bits)),
            FpFormat::Float32 => write!(f, "{:?}f32", f32::from_bits(self.bits as u32)),
        }
    }
}

/// Round the exact decimal value of `lit` to the nearest representable
/// value in `format`, ties to even. Overflow rounds to the same-signed
/// infinity, underflow to the same-signed zero. Returns `None` when the
/// input is not a well-formed decimal or scientific literal.
pub fn encode_decimal(lit: &str, format: FpFormat) -> Option<FpLiteral> {
    let d = parse_decimal(lit)?;
    if d.digits == BigUint::from(0u32) {
        return Some(FpLiteral::zero(format, d.negative));
    }
    // value = num / den, both positive.
    let (num, den): (BigUint, BigUint) = if d.exp10 >= 0 {
        (
            &d.digits * BigUint::from(10u32).pow(d.exp10 as u32),
            BigUint::from(1u32),
        )
    } else {
        (
            d.digits.clone(),
            BigUint::from(10u32).pow((-d.exp10) as u32),
        )
    };
    Some(round_rational_rne(&num, &den, d.negative, format))
}

struct ParsedDecimal {
    negative: bool,
    /// Digits of the significand with the decimal point removed.
    digits: BigUint,
    /// value = digits * 10^exp10
    exp10: i64,
}

fn parse_decimal(s: &str) -> Option<ParsedDecimal> {
    let bytes = s.trim().as_bytes();
    if bytes.is_empty() {
        return None;
    }
    let mut i = 0;
    let negative = match bytes[0] {
        b'-' => {
            i += 1;
            true
        }
        b'+' => {
            i += 1;
            false
        }
        _ => false,
    };
    let mut mant_digits: Vec<u8> = Vec::new();
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        mant_digits.push(bytes[i] - b'0');
        i += 1;
    }
    let int_len = mant_digits.len();
    let mut frac_len = 0usize;
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            mant_digits.push(bytes[i] - b'0');
            frac_len += 1;
            i += 1;
        }
    }
    if int_len == 0 && frac_len == 0 {
        return None;
    }
    let mut exp10: i64 = 0;
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        i += 1;
        let mut exp_neg = false;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            exp_neg = bytes[i] == b'-';
            i += 1;
        }
        if i >= bytes.len() || !bytes[i].is_ascii_digit() {
            return None;
        }
        let mut e: i64 = 0;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            e = e.saturating_mul(10).saturating_add((bytes[i] - b'0') as i64);
            i += 1;
        }
        exp10 = if exp_neg { -e } else { e };
    }
    if i != bytes.len() {
        return None;
    }
    let mut digits = BigUint::from(0u32);
    let ten = BigUint::from(10u32);
    for d in &mant_digits {
        digits = digits * &ten + BigUint::from(*d as u32);
    }
    Some(ParsedDecimal {
        negative,
        digits,
        exp10: exp10 - frac_len as i64,
    })
}

/// Correctly-rounded (RNE) conversion of the positive rational num/den.
fn round_rational_rne(num: &BigUint, den: &BigUint, negative: bool, format: FpFormat) -> FpLiteral {
    let zero = BigUint::from(0u32);
    debug_assert!(*num != zero && *den != zero);
    let p = format.precision() as i64;
    let emin = format.min_exponent() as i64;
    let emax = format.max_exponent() as i64;

    // Find e with 2^e <= num/den < 2^(e+1).
    let mut e = num.bits() as i64 - den.bits() as i64;
    loop {
        // compare num with den * 2^e without negative shifts
        let (lhs, rhs) = if e >= 0 {
            (num.clone(), den << e as u64)
        } else {
            (num << (-e) as u64, den.clone())
        };
        if lhs < rhs {
            e -= 1;
            continue;
        }
        if lhs >= (&rhs << 1u8) {
            e += 1;
            continue;
        }
        break;
    }

    // Weight of the least significant kept bit. Subnormals share the fixed
    // scale 2^(emin - p + 1).
    let lsb_exp = if e < emin { emin - (p - 1) } else { e - (p - 1) };

    // q2 = floor(value * 2^(1 - lsb_exp)) keeps one guard bit below the lsb.
    let shift = 1 - lsb_exp;
    let (q2, sticky) = if shift >= 0 {
        let scaled = num << shift as u64;
        (&scaled / den, (&scaled % den) != zero)
    } else {
        let den2 = den << (-shift) as u64;
        (num / &den2, (num % &den2) != zero)
    };
    let q2_digits = q2.to_u64_digits();
    debug_assert!(q2_digits.len() <= 1, "quotient exceeds 64 bits");
    let q2 = q2_digits.first().copied().unwrap_or(0);

    let guard = q2 & 1;
    let kept = q2 >> 1;
    let round_up = guard == 1 && (sticky || kept & 1 == 1);
    let mut m = kept + round_up as u64;
    let mut exp = e;
    if m == (1u64 << p) {
        // Rounding carried into the next binade.
        m >>= 1;
        exp += 1;
    }

    if exp > emax {
        return FpLiteral::infinity(format, negative);
    }
    let sig_mask = (1u64 << format.significand_bits()) - 1;
    if e < emin {
        // Subnormal scale; m may have rounded up to 2^(p-1), which is the
        // smallest normal.
        if m >= (1u64 << (p - 1)) {
            FpLiteral::assemble(format, negative as u8, 1, m & sig_mask)
        } else {
            FpLiteral::assemble(format, negative as u8, 0, m)
        }
    } else {
        debug_assert!(m >= (1u64 << (p - 1)));
        let biased = (exp + format.exponent_bias() as i64) as u64;
        FpLiteral::assemble(format, negative as u8, biased, m & sig_mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enc64(s: &str) -> FpLiteral {
        encode_decimal(s, FpFormat::Float64).unwrap()
    }

    #[test]
    fn one_is_the_exact_power_of_two_pattern() {
        let l = enc64("1.0");
        assert_eq!(l.sign(), 0);
        assert_eq!(l.biased_exponent(), 0b01111111111);
        assert_eq!(l.significand(), 0);
    }

    #[test]
    fn agrees_with_host_conversion_on_fixed_cases() {
        for s in [
            "0.1",
            "6.123233995736766E-17",
            "3.141592653589793",
            "1.0E-15",
            "-5.53",
            "3.7332",
            "3.0000001",
            "4.0004",
            "3.0003001",
            "4.0024",
            "-6.4000003",
            "3.0001",
            "1e308",
            "1e309",
            "-1e309",
            "4.9e-324",
            "2.47e-324",
            "2.5e-324",
            "2.4e-324",
            "0.0",
            "-0.0",
            "0e10",
            "2.2250738585072014e-308",
            "2.2250738585072011e-308",
            "1.7976931348623157e308",
            "1.7976931348623159e308",
            "123456789012345678901234567890.123456789e-20",
        ] {
            let ours = enc64(s);
            let host: f64 = s.parse().unwrap();
            assert_eq!(
                ours.bits(),
                host.to_bits(),
                "mismatch on {s}: ours={:#x} host={:#x}",
                ours.bits(),
                host.to_bits()
            );
        }
    }

    #[test]
    fn agrees_with_host_conversion_on_float32() {
        for s in ["0.1", "1.5", "3.4028236e38", "1e-46", "7.0064923e-46"] {
            let ours = encode_decimal(s, FpFormat::Float32).unwrap();
            let host: f32 = s.parse().unwrap();
            assert_eq!(ours.bits(), host.to_bits() as u64, "mismatch on {s}");
        }
    }

    #[test]
    fn rejects_malformed_literals() {
        for s in ["", ".", "1.2.3", "e10", "1e", "1e+", "--1", "0x1p3", "1 2"] {
            assert!(encode_decimal(s, FpFormat::Float64).is_none(), "{s}");
        }
    }

    #[test]
    fn canonical_nan_shape() {
        let n = FpLiteral::nan(FpFormat::Float64);
        assert!(n.is_nan());
        assert_eq!(n.bits(), 0x7FF8_0000_0000_0000);
    }
}
