//! Reference multiplicity tables shipped with the crate.

use crate::multiplicity::MultiplicityTable;

pub struct GoldenCase {
    pub group: &'static str,
    pub mu: &'static str,
    pub admissible: usize,
    pub text: &'static str,
}

macro_rules! case {
    ($g:literal, $mu:literal, $n:literal, $file:literal) => {
        GoldenCase {
            group: $g,
            mu: $mu,
            admissible: $n,
            text: include_str!(concat!("../golden/", $file)),
        }
    };
}

pub const GOLDEN: &[GoldenCase] = &[
    case!("GL4", "1,1,0,0", 33, "gl4_1100.txt"),
    case!("GL5", "1,1,0,0,0", 131, "gl5_11000.txt"),
    case!("GL6", "1,1,0,0,0,0", 473, "gl6_110000.txt"),
    case!("GL3", "2,2,0", 19, "gl3_220.txt"),
    case!("GL3", "3,1,0", 49, "gl3_310.txt"),
    case!("GL4", "2,0,0,0", 65, "gl4_2000.txt"),
    case!("GL4", "2,1,0,0", 143, "gl4_2100.txt"),
    case!("GSp4", "1,1,0,0", 13, "gsp4_1100.txt"),
    case!("GSp6", "1,1,1,0,0,0", 79, "gsp6_111000.txt"),
    case!("G2", "2,1,0", 41, "g2_210.txt"),
];

/// Trims each line and collapses runs of whitespace.
pub fn normalize(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|l| !l.is_empty())
        .collect()
}

/// Looks up the reference table for a group and coweight (in the notation used on the command line).
pub fn find(group: &str, mu: &str) -> Option<&'static GoldenCase> {
    let strip = |s: &str| s.replace([' ', '(', ')'], "");
    GOLDEN
        .iter()
        .find(|c| c.group.eq_ignore_ascii_case(group) && strip(c.mu) == strip(mu))
}

/// `Ok(())` if the text rendering of `table` matches `case`, else the first differing lines.
pub fn compare(case: &GoldenCase, table: &MultiplicityTable) -> Result<(), String> {
    let want = normalize(case.text);
    let got = normalize(&table.to_text());
    if want == got {
        return Ok(());
    }
    let mut diff = String::new();
    for i in 0..want.len().max(got.len()) {
        let (a, b) = (want.get(i), got.get(i));
        if a != b {
            diff.push_str(&format!(
                "line {}: expected {:?}, got {:?}\n",
                i + 1,
                a.map(String::as_str).unwrap_or(""),
                b.map(String::as_str).unwrap_or("")
            ));
        }
    }
    Err(diff)
}
