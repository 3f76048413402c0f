//! Parsers and output helpers behind the `germ` binary.

pub mod parse;

/// `{1, 3..7, 9}` style listing of a sorted set.
pub fn fmt_ranges(xs: &[u64]) -> String {
    let mut parts = Vec::new();
    let mut k = 0;
    while k < xs.len() {
        let mut j = k;
        while j + 1 < xs.len() && xs[j + 1] == xs[j] + 1 {
            j += 1;
        }
        parts.push(match j - k {
            0 => xs[k].to_string(),
            1 => format!("{}, {}", xs[k], xs[j]),
            _ => format!("{}..{}", xs[k], xs[j]),
        });
        k = j + 1;
    }
    format!("{{{}}}", parts.join(", "))
}
