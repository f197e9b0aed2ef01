//! Deterministic file emission: JSON with fixed field order and floats
//! printed with 17 significant digits, so identical configurations produce
//! byte-identical output.

use baxterq::linalg::C64;
use baxterq::quantum::QuantumMatrix;
use std::fmt::Write as _;

/// 17 significant digits; round-trips f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    format!("{:.16e}", x)
}

pub fn fmt_complex(z: C64) -> String {
    format!("[{},{}]", fmt_f64(z.re), fmt_f64(z.im))
}

pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Occupation-sector block export of an operator matrix:
/// {"meta": {...}, "blocks": [{"occupation": [...], "matrix": [[[re,im],..],..]}, ...]}
pub fn operator_json(
    meta_fields: &[(&str, String)],
    q: &QuantumMatrix,
    dense: bool,
) -> String {
    let mut out = String::new();
    out.push_str("{\"meta\":{");
    for (i, (k, v)) in meta_fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{}:{}", json_string(k), v);
    }
    out.push_str("}");
    if dense {
        out.push_str(",\"matrix\":[");
        for r in 0..q.dim() {
            if r > 0 {
                out.push(',');
            }
            out.push('[');
            for c in 0..q.dim() {
                if c > 0 {
                    out.push(',');
                }
                out.push_str(&fmt_complex(q.mat[(r, c)]));
            }
            out.push(']');
        }
        out.push(']');
    }
    out.push_str(",\"blocks\":[");
    for (bi, (occ, states)) in q.space.sectors().iter().enumerate() {
        if bi > 0 {
            out.push(',');
        }
        out.push_str("{\"occupation\":[");
        for (i, o) in occ.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{o}");
        }
        out.push_str("],\"states\":[");
        for (i, s) in states.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{s}");
        }
        out.push_str("],\"matrix\":[");
        for (ri, &r) in states.iter().enumerate() {
            if ri > 0 {
                out.push(',');
            }
            out.push('[');
            for (ci, &c) in states.iter().enumerate() {
                if ci > 0 {
                    out.push(',');
                }
                out.push_str(&fmt_complex(q.mat[(r, c)]));
            }
            out.push(']');
        }
        out.push_str("]}");
    }
    out.push_str("]}\n");
    out
}

/// Parses an exported operator back into a dense matrix (block format).
#[cfg(test)]
pub fn import_operator_blocks(
    text: &str,
    dim: usize,
) -> Result<Vec<Vec<C64>>, String> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let mut mat = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    let blocks = v
        .get("blocks")
        .and_then(|b| b.as_array())
        .ok_or("missing blocks")?;
    for block in blocks {
        let states: Vec<usize> = block
            .get("states")
            .and_then(|s| s.as_array())
            .ok_or("missing states")?
            .iter()
            .map(|x| x.as_u64().unwrap() as usize)
            .collect();
        let rows = block
            .get("matrix")
            .and_then(|m| m.as_array())
            .ok_or("missing matrix")?;
        for (ri, row) in rows.iter().enumerate() {
            for (ci, entry) in row.as_array().ok_or("bad row")?.iter().enumerate() {
                let pair = entry.as_array().ok_or("bad complex pair")?;
                mat[states[ri]][states[ci]] = C64::new(
                    pair[0].as_f64().ok_or("bad re")?,
                    pair[1].as_f64().ok_or("bad im")?,
                );
            }
        }
    }
    Ok(mat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_roundtrips() {
        for x in [0.1, -3.25e-17, 1.0 / 3.0, 8.0, 2.2250738585072014e-308] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn exported_operator_round_trips_bitwise_in_process() {
        use baxterq::grading::{GradingSignature, TwistConfig};
        use baxterq::lax::Subset;
        use baxterq::linalg::c;
        use baxterq::transfer::q_operator;

        let sig = GradingSignature::new(2, 1).unwrap();
        let tw = TwistConfig::generic(sig);
        let subset = Subset::new(sig, &[0, 2]).unwrap();
        let q = q_operator(sig, &subset, 2, &tw, c(0.37, -0.81)).unwrap();
        let meta = vec![("n", "2".to_string())];
        let text = operator_json(&meta, &q.matrix, false);
        let parsed = import_operator_blocks(&text, q.matrix.dim()).unwrap();
        for r in 0..q.matrix.dim() {
            for cc in 0..q.matrix.dim() {
                let want = q.matrix.mat[(r, cc)];
                assert_eq!(parsed[r][cc].re.to_bits(), want.re.to_bits());
                assert_eq!(parsed[r][cc].im.to_bits(), want.im.to_bits());
            }
        }
    }
}
