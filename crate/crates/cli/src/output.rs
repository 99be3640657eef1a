//! CSV emission. Columns appear in a fixed order, only for the methods that
//! were requested: `sweep_db` (or `nakagami_m`), `closed`, `rayleigh`,
//! `reference`, `mc`, `mc_se`, then `mc_2r` when the radius check ran.

use std::io::Write;

use crate::config::{MethodName, SweepVariable};
use crate::sweep::{Metric, SweepPoint, SweepTable};
use crate::CliError;

fn number(x: f64) -> String {
    format!("{x:.10}")
}

/// Writes the table. With `bits`, rates are reported in bits instead of
/// nats; coverage probabilities are unaffected.
pub fn write_csv<W: Write>(table: &SweepTable, bits: bool, out: W) -> Result<(), CliError> {
    let scale = if bits && table.options.metric == Metric::Rate {
        std::f64::consts::LOG2_E
    } else {
        1.0
    };
    let mut w = csv::Writer::from_writer(out);

    let mut header = vec![match table.variable {
        SweepVariable::NakagamiPair => "nakagami_m",
        _ => "sweep_db",
    }];
    for m in &table.methods {
        header.push(m.column());
        if *m == MethodName::Mc {
            header.push("mc_se");
        }
    }
    let radius_check = table.rows.iter().any(|r| r.mc_2r.is_some());
    if radius_check {
        header.push("mc_2r");
    }
    w.write_record(&header)?;

    for row in &table.rows {
        let mut record = vec![match &row.point {
            SweepPoint::Db(v) => number(*v),
            SweepPoint::Shapes(m) => m.iter().map(u32::to_string).collect::<Vec<_>>().join("-"),
        }];
        for m in &table.methods {
            let value = match m {
                MethodName::Closed => row.closed,
                MethodName::Rayleigh => row.rayleigh,
                MethodName::Reference => row.reference,
                MethodName::Mc => row.mc.map(|e| e.mean),
            };
            record.push(number(value.expect("requested method has a value") * scale));
            if *m == MethodName::Mc {
                record.push(number(row.mc.expect("simulation ran").std_error * scale));
            }
        }
        if radius_check {
            record.push(number(row.mc_2r.expect("radius check ran") * scale));
        }
        w.write_record(&record)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
