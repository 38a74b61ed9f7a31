//! Size expressions: `4096`, `2^12`, `2^12+1`, `2^12-1`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Size {
    text: String,
    value: BigInt,
}

impl Size {
    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn as_usize(&self) -> Option<usize> {
        self.value.to_usize()
    }

    pub fn pow2(k: u32) -> Self {
        format!("2^{k}").parse().expect("valid size")
    }

    /// `2^k + delta`, written the same way it would be typed.
    pub fn pow2_plus(k: u32, delta: i64) -> Self {
        let text = match delta {
            0 => format!("2^{k}"),
            d if d > 0 => format!("2^{k}+{d}"),
            d => format!("2^{k}{d}"),
        };
        text.parse().expect("valid size")
    }
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn number(s: &str) -> Result<BigInt, String> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected a number, found {s:?}"));
    }
    s.parse().map_err(|e| format!("{s:?}: {e}"))
}

impl FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let value = match text.split_once('^') {
            None => number(&text)?,
            Some((base, rest)) => {
                let cut = rest.find(['+', '-']).unwrap_or(rest.len());
                let (exp, offset) = rest.split_at(cut);
                let base = number(base)?;
                let exp: u32 = exp
                    .parse()
                    .map_err(|_| format!("bad exponent in {text:?}"))?;
                if exp > 1 << 16 {
                    return Err(format!("exponent too large in {text:?}"));
                }
                let offset = match offset.split_at_checked(1) {
                    None | Some(("", _)) => BigInt::ZERO,
                    Some(("+", d)) => number(d)?,
                    Some((_, d)) => -number(d)?,
                };
                num_traits::pow(base, exp as usize) + offset
            }
        };
        if !value.is_positive() {
            return Err(format!("size {text} is not positive"));
        }
        Ok(Size { text, value })
    }
}

/// A comma-separated list of sizes.
pub fn parse_sizes(s: &str) -> Result<Vec<Size>, String> {
    let sizes: Vec<Size> = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    if sizes.is_empty() {
        return Err("no sizes given".into());
    }
    Ok(sizes)
}

/// A parsed `--sizes` argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeList(pub Vec<Size>);

impl FromStr for SizeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_sizes(s).map(SizeList)
    }
}
