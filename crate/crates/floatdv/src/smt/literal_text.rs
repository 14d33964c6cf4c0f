//! Concrete SMT-LIB syntax for FP literals: `(fp #bS #bE #bM)` bit
//! triples for finite values (zeros and subnormals included), indexed
//! constants for NaN and infinities.

use crate::formula::{FpFormat, FpLiteral};

pub fn format_fp_literal(l: &FpLiteral) -> String {
    let (eb, sb) = (l.format().exponent_bits(), l.format().significand_bits());
    if l.is_nan() {
        return format!("(_ NaN {} {})", eb, sb + 1);
    }
    if l.is_infinite() {
        let sign = if l.sign() == 1 { "-" } else { "+" };
        return format!("(_ {}oo {} {})", sign, eb, sb + 1);
    }
    format!(
        "(fp #b{} #b{:0>width_e$b} #b{:0>width_s$b})",
        l.sign(),
        l.biased_exponent(),
        l.significand(),
        width_e = eb as usize,
        width_s = sb as usize,
    )
}

/// Parse either literal spelling back to bits. Accepts `(fp ...)` triples
/// (solvers print the fields as `#b...`, `#x...`, or `(_ bvN w)`) and the
/// indexed `(_ NaN 11 53)` / `(_ +oo ...)` / `(_ -zero ...)` family, in
/// either format width.
pub fn parse_fp_literal(text: &str) -> Option<FpLiteral> {
    let cleaned = text.replace(['(', ')'], " ");
    let toks: Vec<&str> = cleaned.split_whitespace().collect();
    match toks.as_slice() {
        ["fp", s, e, m] => {
            let (swidth, sign) = parse_bv(s)?;
            let (ewidth, exp) = parse_bv(e)?;
            let (mwidth, sig) = parse_bv(m)?;
            if swidth != 1 {
                return None;
            }
            let format = match (ewidth, mwidth) {
                (11, 52) => FpFormat::Float64,
                (8, 23) => FpFormat::Float32,
                _ => return None,
            };
            Some(FpLiteral::assemble(format, sign as u8, exp, sig))
        }
        // `(fp (_ bv0 1) (_ bv1023 11) (_ bv0 52))` splits into 10 tokens
        ["fp", "_", s, sw, "_", e, ew, "_", m, mw] => {
            let parse = |v: &str, w: &str| -> Option<(u32, u64)> {
                let value = v.strip_prefix("bv")?.parse().ok()?;
                Some((w.parse().ok()?, value))
            };
            let (swidth, sign) = parse(s, sw)?;
            let (ewidth, exp) = parse(e, ew)?;
            let (mwidth, sig) = parse(m, mw)?;
            if swidth != 1 {
                return None;
            }
            let format = match (ewidth, mwidth) {
                (11, 52) => FpFormat::Float64,
                (8, 23) => FpFormat::Float32,
                _ => return None,
            };
            Some(FpLiteral::assemble(format, sign as u8, exp, sig))
        }
        ["_", kind, eb, sb] => {
            let eb: u32 = eb.parse().ok()?;
            let sb: u32 = sb.parse().ok()?;
            let format = match (eb, sb) {
                (11, 53) => FpFormat::Float64,
                (8, 24) => FpFormat::Float32,
                _ => return None,
            };
            match *kind {
                "NaN" => Some(FpLiteral::nan(format)),
                "+oo" => Some(FpLiteral::infinity(format, false)),
                "-oo" => Some(FpLiteral::infinity(format, true)),
                "+zero" => Some(FpLiteral::zero(format, false)),
                "-zero" => Some(FpLiteral::zero(format, true)),
                _ => None,
            }
        }
        _ => None,
    }
}

fn parse_bv(tok: &str) -> Option<(u32, u64)> {
    if let Some(bits) = tok.strip_prefix("#b") {
        Some((bits.len() as u32, u64::from_str_radix(bits, 2).ok()?))
    } else if let Some(hex) = tok.strip_prefix("#x") {
        Some((4 * hex.len() as u32, u64::from_str_radix(hex, 16).ok()?))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_zero_is_all_zero_bits() {
        let z = FpLiteral::zero(FpFormat::Float64, false);
        assert_eq!(
            format_fp_literal(&z),
            "(fp #b0 #b00000000000 #b0000000000000000000000000000000000000000000000000000)"
        );
    }

    #[test]
    fn negative_one_flips_only_the_sign_bit() {
        let one = FpLiteral::from_f64(1.0);
        let neg = FpLiteral::from_f64(-1.0);
        let f1 = format_fp_literal(&one);
        let f2 = format_fp_literal(&neg);
        assert_eq!(f1, "(fp #b0 #b01111111111 #b0000000000000000000000000000000000000000000000000000)");
        assert_eq!(f2, "(fp #b1 #b01111111111 #b0000000000000000000000000000000000000000000000000000)");
    }

    #[test]
    fn specials_use_indexed_constants() {
        assert_eq!(
            format_fp_literal(&FpLiteral::nan(FpFormat::Float64)),
            "(_ NaN 11 53)"
        );
        assert_eq!(
            format_fp_literal(&FpLiteral::infinity(FpFormat::Float32, true)),
            "(_ -oo 8 24)"
        );
    }

    #[test]
    fn parses_hex_significands_from_solver_models() {
        // z3 prints 52-bit significands as 13 hex digits
        let l = parse_fp_literal("(fp #b0 #b11111111110 #xfffffffffff8d)").unwrap();
        assert_eq!(l.sign(), 0);
        assert_eq!(l.biased_exponent(), 0b11111111110);
        assert_eq!(l.significand(), 0xfffffffffff8d);
    }

    #[test]
    fn round_trip_on_tricky_values() {
        for bits in [
            0u64,
            1,                      // smallest subnormal
            0x8000_0000_0000_0001,  // negative subnormal
            0x000F_FFFF_FFFF_FFFF,  // largest subnormal
            0x7FEF_FFFF_FFFF_FFFF,  // largest normal
            0x3FB9_9999_9999_999A,  // 0.1
            0x7FF0_0000_0000_0000,  // +inf
            0xFFF0_0000_0000_0000,  // -inf
            0x7FF8_0000_0000_0000,  // NaN
        ] {
            let l = FpLiteral::from_bits(FpFormat::Float64, bits);
            let parsed = parse_fp_literal(&format_fp_literal(&l)).unwrap();
            assert_eq!(parsed.bits(), l.bits(), "bits {bits:#x}");
        }
    }
}
