//! Line-oriented text formats.
//!
//! Composition:
//! ```text
//! COMPOSITION n=4 k=2 m=2 d=2
//! INNER 1 VARS 1,2 TABLE 6
//! INNER 2 VARS 3,4 TABLE 6
//! OUTER 4
//! 00 -> 0
//! 01 -> 1
//! 10 -> 1
//! 11 -> 0
//! ```
//! `TABLE` is the inner's `2^|vars|` table as a hexadecimal number whose bit
//! `t` is the value on local input `t` (bit 0 = all-zero input). Outer keys
//! list inner 1 leftmost and are sorted as strings.
//!
//! Branching program:
//! ```text
//! BP n=2 w=2 L=2 start=0 accept=1
//! LAYER 1 VAR 1 D0 0 1 D1 1 0
//! LAYER 2 VAR 2 D0 0 1 D1 1 0
//! ```
//! `accept` is a comma-separated state list, empty for no accepting state.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::branching::{BranchingProgram, Layer};
use crate::composition::{format_key, Composition, LocalFunction, OuterFunction};
use crate::depth3::Depth3Circuit;
use crate::error::{Error, Result};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn table_hex(g: &LocalFunction) -> String {
    let bits = g.table_bits();
    let digits = bits.len().div_ceil(4);
    (0..digits)
        .rev()
        .map(|d| {
            let nibble = (0..4)
                .filter(|b| bits.get(d * 4 + b).copied().unwrap_or(false))
                .fold(0u32, |acc, b| acc | 1 << b);
            char::from_digit(nibble, 16).expect("nibble")
        })
        .collect()
}

fn parse_table_hex(line: usize, hex: &str, size: usize) -> Result<Vec<bool>> {
    let digits = size.div_ceil(4);
    if hex.len() != digits {
        return Err(perr(
            line,
            format!("table needs {digits} hex digits, got {:?}", hex),
        ));
    }
    let mut bits = vec![false; size];
    for (pos, ch) in hex.chars().rev().enumerate() {
        let nibble = ch
            .to_digit(16)
            .filter(|_| !ch.is_ascii_uppercase())
            .ok_or_else(|| perr(line, format!("bad hex digit {ch:?}")))?;
        for b in 0..4 {
            if nibble >> b & 1 == 1 {
                let idx = pos * 4 + b;
                if idx >= size {
                    return Err(perr(line, "table has bits beyond its size"));
                }
                bits[idx] = true;
            }
        }
    }
    Ok(bits)
}

pub fn serialize_composition(c: &Composition) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "COMPOSITION n={} k={} m={} d={}",
        c.n(),
        c.k(),
        c.m(),
        c.codomain_size()
    );
    for (j, g) in c.inners().iter().enumerate() {
        let vars: Vec<String> = g.support().iter().map(usize::to_string).collect();
        let _ = writeln!(
            out,
            "INNER {} VARS {} TABLE {}",
            j + 1,
            vars.join(","),
            table_hex(g)
        );
    }
    let mut rows: Vec<(String, u32)> = c
        .outer()
        .entries()
        .map(|(key, v)| (format_key(c.m(), key), v))
        .collect();
    rows.sort();
    let _ = writeln!(out, "OUTER {}", rows.len());
    for (key, v) in rows {
        let _ = writeln!(out, "{key} -> {v}");
    }
    out
}

/// Reads `key=value` fields in order.
fn fields<'a>(line: usize, parts: &[&'a str], names: &[&str]) -> Result<Vec<&'a str>> {
    if parts.len() != names.len() {
        return Err(perr(line, format!("expected fields {}", names.join(" "))));
    }
    parts
        .iter()
        .zip(names)
        .map(|(p, name)| {
            p.strip_prefix(name)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| perr(line, format!("expected {name}=…, got {p:?}")))
        })
        .collect()
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| perr(line, format!("bad number {s:?}")))
}

pub fn parse_composition(text: &str) -> Result<Composition> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let parts: Vec<&str> = header.split(' ').collect();
    if parts.first() != Some(&"COMPOSITION") {
        return Err(perr(ln, "expected COMPOSITION header"));
    }
    let f = fields(ln, &parts[1..], &["n", "k", "m", "d"])?;
    let (n, k, m, d): (usize, usize, usize, u32) = (
        num(ln, f[0])?,
        num(ln, f[1])?,
        num(ln, f[2])?,
        num(ln, f[3])?,
    );

    let mut inners = Vec::with_capacity(m);
    for j in 1..=m {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| perr(0, format!("missing INNER {j}")))?;
        let parts: Vec<&str> = line.split(' ').collect();
        if parts.len() != 6 || parts[0] != "INNER" || parts[2] != "VARS" || parts[4] != "TABLE" {
            return Err(perr(ln, "expected INNER <j> VARS <vars> TABLE <hex>"));
        }
        if num::<usize>(ln, parts[1])? != j {
            return Err(perr(ln, format!("expected inner index {j}")));
        }
        let vars = parts[3]
            .split(',')
            .map(|v| num::<usize>(ln, v))
            .collect::<Result<Vec<_>>>()?;
        if vars.windows(2).any(|w| w[0] >= w[1]) {
            return Err(perr(ln, "VARS must be strictly increasing"));
        }
        let bits = parse_table_hex(ln, parts[5], 1usize << vars.len().min(24))?;
        let g = LocalFunction::new(vars, &bits).map_err(|e| perr(ln, e.to_string()))?;
        inners.push(g);
    }

    let (ln, line) = lines.next().ok_or_else(|| perr(0, "missing OUTER"))?;
    let count: usize = match line.split_once(' ') {
        Some(("OUTER", c)) => num(ln, c)?,
        _ => return Err(perr(ln, "expected OUTER <count>")),
    };
    let mut outer = OuterFunction::new(m, d).map_err(|e| perr(ln, e.to_string()))?;
    for _ in 0..count {
        let (ln, line) = lines.next().ok_or_else(|| perr(0, "missing outer entry"))?;
        let (key, value) = line
            .split_once(" -> ")
            .ok_or_else(|| perr(ln, "expected <key> -> <value>"))?;
        if key.len() != m {
            return Err(perr(ln, format!("key must have {m} bits")));
        }
        let mut packed = 0u64;
        for (j, ch) in key.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => packed |= 1 << j,
                _ => return Err(perr(ln, format!("bad key bit {ch:?}"))),
            }
        }
        if outer.get(packed).is_some() {
            return Err(perr(ln, "duplicate outer key"));
        }
        outer
            .insert(packed, num(ln, value)?)
            .map_err(|e| perr(ln, e.to_string()))?;
    }
    if let Some((ln, extra)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(perr(ln, format!("unexpected trailing line {extra:?}")));
    }
    Composition::new(n, k, inners, outer).map_err(|e| perr(1, e.to_string()))
}

pub fn serialize_bp(bp: &BranchingProgram) -> String {
    let join =
        |v: &[usize], sep: &str| v.iter().map(usize::to_string).collect::<Vec<_>>().join(sep);
    let accept: Vec<usize> = bp.accept().iter().copied().collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "BP n={} w={} L={} start={} accept={}",
        bp.n(),
        bp.width(),
        bp.len(),
        bp.start(),
        join(&accept, ",")
    );
    for (t, layer) in bp.layers().iter().enumerate() {
        let _ = writeln!(
            out,
            "LAYER {} VAR {} D0 {} D1 {}",
            t + 1,
            layer.var,
            join(&layer.delta0, " "),
            join(&layer.delta1, " ")
        );
    }
    out
}

pub fn parse_bp(text: &str) -> Result<BranchingProgram> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let parts: Vec<&str> = header.split(' ').collect();
    if parts.first() != Some(&"BP") {
        return Err(perr(ln, "expected BP header"));
    }
    let f = fields(ln, &parts[1..], &["n", "w", "L", "start", "accept"])?;
    let (n, w, len, start): (usize, usize, usize, usize) = (
        num(ln, f[0])?,
        num(ln, f[1])?,
        num(ln, f[2])?,
        num(ln, f[3])?,
    );
    let accept: BTreeSet<usize> = if f[4].is_empty() {
        BTreeSet::new()
    } else {
        f[4].split(',').map(|s| num(ln, s)).collect::<Result<_>>()?
    };
    let mut layers = Vec::with_capacity(len);
    for t in 1..=len {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| perr(0, format!("missing LAYER {t}")))?;
        let parts: Vec<&str> = line.split(' ').collect();
        let expected = 6 + 2 * w;
        if parts.len() != expected
            || parts[0] != "LAYER"
            || parts[2] != "VAR"
            || parts[4] != "D0"
            || parts[5 + w] != "D1"
        {
            return Err(perr(
                ln,
                "expected LAYER <t> VAR <i> D0 <w ints> D1 <w ints>",
            ));
        }
        if num::<usize>(ln, parts[1])? != t {
            return Err(perr(ln, format!("expected layer index {t}")));
        }
        let states = |s: &[&str]| {
            s.iter()
                .map(|v| num::<usize>(ln, v))
                .collect::<Result<Vec<_>>>()
        };
        layers.push(Layer {
            var: num(ln, parts[3])?,
            delta0: states(&parts[5..5 + w])?,
            delta1: states(&parts[6 + w..])?,
        });
    }
    if let Some((ln, extra)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(perr(ln, format!("unexpected trailing line {extra:?}")));
    }
    BranchingProgram::new(n, w, layers, start, accept).map_err(|e| perr(1, e.to_string()))
}

/// ```text
/// DEPTH3 n=4 polarity=sigma3 bottom_fanin=2 gates=9
/// BOTTOM 0 +1 -2
/// MIDDLE 0 GATES 0,1 LITS +3
/// TOP 0,1
/// ```
/// Empty `GATES` or `LITS` fields are omitted.
pub fn serialize_depth3(d: &Depth3Circuit) -> String {
    let lits = |l: &[crate::depth3::Literal]| {
        l.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let ids = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    let mut out = String::new();
    let _ = writeln!(
        out,
        "DEPTH3 n={} polarity={} bottom_fanin={} gates={}",
        d.n,
        d.polarity,
        d.bottom_fanin,
        d.size().gate_count
    );
    for (i, b) in d.bottom.iter().enumerate() {
        let _ = writeln!(out, "BOTTOM {i} {}", lits(b));
    }
    for (i, g) in d.middle.iter().enumerate() {
        let _ = write!(out, "MIDDLE {i}");
        if !g.gates.is_empty() {
            let _ = write!(out, " GATES {}", ids(&g.gates));
        }
        if !g.literals.is_empty() {
            let _ = write!(out, " LITS {}", lits(&g.literals));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "TOP {}", ids(&d.top));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_hw, build_parity};

    #[test]
    fn parity_text() {
        let c = build_parity(4, 2).unwrap();
        let text = serialize_composition(&c);
        assert_eq!(
            text,
            "COMPOSITION n=4 k=2 m=2 d=2\nINNER 1 VARS 1,2 TABLE 6\nINNER 2 VARS 3,4 TABLE 6\n\
             OUTER 4\n00 -> 0\n01 -> 1\n10 -> 1\n11 -> 0\n"
        );
        assert_eq!(parse_composition(&text).unwrap(), c);
    }

    #[test]
    fn hex_widths() {
        let c = build_hw(5, 5).unwrap();
        let text = serialize_composition(&c);
        // 2^5 = 32 bits → 8 hex digits; digit 0 of the popcount is 0x96696996
        assert!(
            text.contains("INNER 1 VARS 1,2,3,4,5 TABLE 96696996\n"),
            "{text}"
        );
    }

    #[test]
    fn unsorted_keys_are_canonicalised() {
        let text = "COMPOSITION n=2 k=1 m=2 d=3\nINNER 1 VARS 1 TABLE 2\nINNER 2 VARS 2 TABLE 2\n\
                    OUTER 4\n11 -> 2\n00 -> 0\n10 -> 1\n01 -> 1\n";
        let c = parse_composition(text).unwrap();
        let canon = serialize_composition(&c);
        assert!(canon.ends_with("OUTER 4\n00 -> 0\n01 -> 1\n10 -> 1\n11 -> 2\n"));
    }

    #[test]
    fn malformed_inputs() {
        let bad = [
            "",
            "COMPOSITION n=2 k=1 m=1\n",
            "COMPOSITION n=2 k=1 m=1 d=2\nINNER 1 VARS 2,1 TABLE 6\nOUTER 0\n",
            "COMPOSITION n=2 k=1 m=1 d=2\nINNER 1 VARS 1 TABLE 12\nOUTER 0\n",
            "COMPOSITION n=2 k=1 m=1 d=2\nINNER 1 VARS 1 TABLE 2\nOUTER 1\n1 -> 5\n",
            "COMPOSITION n=2 k=1 m=1 d=2\nINNER 1 VARS 1 TABLE 2\nOUTER 2\n1 -> 1\n1 -> 0\n",
            "COMPOSITION n=2 k=1 m=1 d=2\nINNER 1 VARS 1 TABLE 2\nOUTER 0\nextra\n",
            "COMPOSITION n=2 k=1 m=1 d=2\nINNER 1 VARS 3 TABLE 2\nOUTER 0\n",
        ];
        for text in bad {
            assert!(parse_composition(text).is_err(), "{text:?}");
        }
    }

    #[test]
    fn bp_text() {
        let bp = BranchingProgram::parity(2).unwrap();
        let text = serialize_bp(&bp);
        assert_eq!(
            text,
            "BP n=2 w=2 L=2 start=0 accept=1\nLAYER 1 VAR 1 D0 0 1 D1 1 0\nLAYER 2 VAR 2 D0 0 1 D1 1 0\n"
        );
        assert_eq!(parse_bp(&text).unwrap(), bp);
        let empty = "BP n=1 w=2 L=1 start=0 accept=\nLAYER 1 VAR 1 D0 0 1 D1 1 1\n";
        assert_eq!(serialize_bp(&parse_bp(empty).unwrap()), empty);
        assert!(parse_bp("BP n=1 w=2 L=1 start=0 accept=\nLAYER 1 VAR 1 D0 0 1 D1 1 2\n").is_err());
    }
}
