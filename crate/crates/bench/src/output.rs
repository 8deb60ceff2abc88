//! Tabular output.
//!
//! Columns, in order: `x_value`, `d_R_lambda`, `d0_lambda`, then one block per
//! variant in alphabetical label order (FSCM, OCM, PSCM, PSCM12, PSCM123):
//! `<V>_nmse` (non-OCM variants, when NMSE output is on), `<V>_capacity`,
//! `<V>_p`, and `<V>_sv1..<V>_svK` when singular values are dumped.
//! JSON output carries the same columns as one object per row.

use std::io::Write;

use hmimo_core::ModelVariant;
use serde_json::{Map, Value};

use crate::error::BenchError;
use crate::spec::{OutputFormat, ResolvedSweep};
use crate::sweep::SweepResultRow;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Field {
    X,
    DR,
    D0,
    Nmse(ModelVariant),
    Capacity(ModelVariant),
    P(ModelVariant),
    Sv(ModelVariant, usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Plain(f64),
    Sci(f64),
    Count(usize),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Plain(v) => format!("{v}"),
            Cell::Sci(v) => format!("{v:e}"),
            Cell::Count(n) => n.to_string(),
        }
    }

    fn json(&self) -> Value {
        match *self {
            Cell::Plain(v) | Cell::Sci(v) => serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number),
            Cell::Count(n) => Value::from(n),
        }
    }
}

fn layout(sweep: &ResolvedSweep) -> Vec<(String, Field)> {
    let mut cols = vec![
        ("x_value".to_string(), Field::X),
        ("d_R_lambda".to_string(), Field::DR),
        ("d0_lambda".to_string(), Field::D0),
    ];
    for &v in &sweep.variants {
        if sweep.nmse && v != ModelVariant::Ocm {
            cols.push((format!("{v}_nmse"), Field::Nmse(v)));
        }
        cols.push((format!("{v}_capacity"), Field::Capacity(v)));
        cols.push((format!("{v}_p"), Field::P(v)));
        for k in 0..sweep.dump_singular_values {
            cols.push((format!("{v}_sv{}", k + 1), Field::Sv(v, k)));
        }
    }
    cols
}

pub fn column_names(sweep: &ResolvedSweep) -> Vec<String> {
    layout(sweep).into_iter().map(|(name, _)| name).collect()
}

fn cell(row: &SweepResultRow, field: Field) -> Option<Cell> {
    Some(match field {
        Field::X => Cell::Plain(row.x_value),
        Field::DR => Cell::Plain(row.d_r_lambda),
        Field::D0 => Cell::Plain(row.d0_lambda),
        Field::Nmse(v) => Cell::Sci(row.results.get(&v)?.nmse?),
        Field::Capacity(v) => Cell::Sci(row.results.get(&v)?.capacity),
        Field::P(v) => Cell::Count(row.results.get(&v)?.p_used),
        Field::Sv(v, k) => Cell::Sci(*row.results.get(&v)?.singular_values.get(k)?),
    })
}

pub fn write_csv<W: Write>(sweep: &ResolvedSweep, rows: &[SweepResultRow], out: W) -> Result<(), BenchError> {
    let cols = layout(sweep);
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(cols.iter().map(|(name, _)| name.as_str()))?;
    for row in rows {
        w.write_record(cols.iter().map(|&(_, f)| cell(row, f).map(|c| c.text()).unwrap_or_default()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_json_value(sweep: &ResolvedSweep, rows: &[SweepResultRow]) -> Value {
    let cols = layout(sweep);
    let rows: Vec<Value> = rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = cols
                .iter()
                .map(|(name, f)| (name.clone(), cell(row, *f).map_or(Value::Null, |c| c.json())))
                .collect();
            Value::Object(obj)
        })
        .collect();
    let mut top = Map::new();
    top.insert("experiment".into(), Value::from(sweep.experiment.to_string()));
    top.insert("columns".into(), Value::from(column_names(sweep)));
    top.insert("rows".into(), Value::Array(rows));
    Value::Object(top)
}

pub fn write_json<W: Write>(sweep: &ResolvedSweep, rows: &[SweepResultRow], mut out: W) -> Result<(), BenchError> {
    let text = serde_json::to_string_pretty(&to_json_value(sweep, rows)).expect("json value serializes");
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn write<W: Write>(
    sweep: &ResolvedSweep,
    rows: &[SweepResultRow],
    format: OutputFormat,
    out: W,
) -> Result<(), BenchError> {
    match format {
        OutputFormat::Csv => write_csv(sweep, rows, out),
        OutputFormat::Json => write_json(sweep, rows, out),
    }
}
