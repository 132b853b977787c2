//! Columnar CSV for loss streams: `round,node,b0..b{d-1},z`, preceded by a
//! `#` comment describing the loss kind.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::problems::stream::{Datum, LossKind, LossStream};

pub const STREAM_FORMAT: &str = "odcmd-stream v1";

fn csv_err(e: csv::Error) -> Error {
    Error::invalid(format!("stream csv: {e}"))
}

pub fn write_stream<W: Write>(stream: &LossStream, mut out: W) -> Result<()> {
    let kind = match stream.kind() {
        LossKind::Regression { l2_weight } => format!("kind=regression l2_weight={l2_weight}"),
        LossKind::Linear => "kind=linear".to_string(),
    };
    writeln!(out, "# {STREAM_FORMAT} {kind} nodes={} rounds={}", stream.nodes(), stream.horizon())?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["round".to_string(), "node".to_string()];
    header.extend((0..stream.dim()).map(|s| format!("b{s}")));
    header.push("z".into());
    w.write_record(&header).map_err(csv_err)?;
    for t in 1..=stream.horizon() {
        for i in 0..stream.nodes() {
            let dt = stream.datum(i, t);
            let mut row = vec![t.to_string(), i.to_string()];
            row.extend(dt.b.iter().map(f64::to_string));
            row.push(dt.z.to_string());
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_stream<R: BufRead>(mut input: R) -> Result<LossStream> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let meta = first
        .trim()
        .strip_prefix('#')
        .map(str::trim)
        .and_then(|s| s.strip_prefix(STREAM_FORMAT))
        .ok_or_else(|| Error::invalid(format!("missing '# {STREAM_FORMAT}' header line")))?;
    let field = |key: &str| {
        meta.split_whitespace()
            .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
            .ok_or_else(|| Error::invalid(format!("header lacks '{key}'")))
    };
    let parse_usize = |key: &str| -> Result<usize> {
        field(key)?
            .parse()
            .map_err(|_| Error::invalid(format!("bad '{key}' in header")))
    };
    let kind = match field("kind")? {
        "linear" => LossKind::Linear,
        "regression" => LossKind::Regression {
            l2_weight: field("l2_weight")?
                .parse()
                .map_err(|_| Error::invalid("bad l2_weight"))?,
        },
        other => return Err(Error::invalid(format!("unknown loss kind '{other}'"))),
    };
    let (m, horizon) = (parse_usize("nodes")?, parse_usize("rounds")?);

    let mut reader = csv::Reader::from_reader(input);
    let mut data: Vec<Option<Datum>> = vec![None; m * horizon];
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let num = |k: usize| -> Result<f64> {
            rec.get(k)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::invalid(format!("bad field {k} in row {rec:?}")))
        };
        let (t, i) = (num(0)? as usize, num(1)? as usize);
        if t == 0 || t > horizon || i >= m {
            return Err(Error::invalid(format!("row for round {t}, node {i} out of range")));
        }
        let n = rec.len();
        if n < 4 {
            return Err(Error::invalid("row has no features"));
        }
        let b = (2..n - 1).map(num).collect::<Result<Vec<_>>>()?;
        data[(t - 1) * m + i] = Some(Datum { b, z: num(n - 1)? });
    }
    let data = data
        .into_iter()
        .enumerate()
        .map(|(k, d)| d.ok_or_else(|| Error::invalid(format!("missing row for round {}, node {}", k / m + 1, k % m))))
        .collect::<Result<Vec<_>>>()?;
    LossStream::from_data(kind, m, horizon, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::stream::generate_regression_stream;

    #[test]
    fn round_trip() {
        let s = generate_regression_stream(3, 4, 5, 1.0, 2).unwrap();
        let mut buf = Vec::new();
        write_stream(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# odcmd-stream v1 kind=regression"));
        assert!(text.lines().nth(1).unwrap().starts_with("round,node,b0,b1,b2,b3,z"));
        let back = read_stream(buf.as_slice()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn missing_rows_rejected() {
        let text = "# odcmd-stream v1 kind=linear nodes=2 rounds=1\nround,node,b0,z\n1,0,1.0,0.0\n";
        assert!(read_stream(text.as_bytes()).is_err());
    }
}
