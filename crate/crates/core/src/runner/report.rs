//! CSV tables, plot data and the plain-text summary of a report.

use std::fmt;
use std::io::Write;

use super::{RunReport, RunRow};
use crate::error::Result;

pub const CSV_HEADER: [&str; 14] = [
    "scheme",
    "dt",
    "dx",
    "omega",
    "beta",
    "sol_err",
    "order",
    "err_cl_charge",
    "err_cl_energy",
    "err_inv_charge",
    "err_inv_energy",
    "newton_iters",
    "wall_seconds",
    "status",
];

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn order_cell(row: &RunRow) -> String {
    match row.order {
        Some(o) if o.floor_limited => "***".to_string(),
        Some(o) => num(o.order),
        None => String::new(),
    }
}

/// Writes the report as CSV. With `timing` off the `wall_seconds` cells are
/// left empty so identical configs give identical bytes.
pub fn write_csv<W: Write>(report: &RunReport, out: W, timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in &report.rows {
        w.write_record([
            report.scheme.variant.as_str().to_string(),
            num(row.dt),
            num(row.dx),
            num(report.breather.omega),
            num(report.breather.beta),
            num(row.sol_err),
            order_cell(row),
            num(row.local.err1),
            num(row.local.err2),
            num(row.global.err_m),
            num(row.global.err_h),
            row.newton_iters.to_string(),
            if timing { num(row.wall_seconds) } else { String::new() },
            row.status.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Two whitespace-separated columns `dt sol_err`, one row per step size.
pub fn write_plot_data<W: Write>(report: &RunReport, mut out: W) -> Result<()> {
    writeln!(out, "# dt sol_err ({})", report.scheme.variant)?;
    for row in &report.rows {
        writeln!(out, "{} {}", num(row.dt), num(row.sol_err))?;
    }
    Ok(())
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scheme {}  beta {}  omega {}", self.scheme.variant, self.breather.beta, self.breather.omega)?;
        writeln!(
            f,
            "{:>11} {:>10} {:>6} {:>10} {:>10} {:>10} {:>10} {:>7}  status",
            "dt", "sol_err", "order", "err1", "err2", "errM", "errH", "iters"
        )?;
        for row in &self.rows {
            let order = match row.order {
                Some(o) if o.floor_limited => "***".to_string(),
                Some(o) => format!("{:.2}", o.order),
                None => "-".to_string(),
            };
            writeln!(
                f,
                "{:>11.4e} {:>10.2e} {:>6} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e} {:>7}  {}",
                row.dt,
                row.sol_err,
                order,
                row.local.err1,
                row.local.err2,
                row.global.err_m,
                row.global.err_h,
                row.newton_iters,
                row.status
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::breather::{BreatherParams, OrderEntry};
    use crate::diagnostics::{GlobalInvariantReport, LocalClReport};
    use crate::runner::RowStatus;
    use crate::schemes::{SchemeKind, Variant};

    fn report() -> RunReport {
        let row = |dt: f64, order: Option<OrderEntry>| RunRow {
            dt,
            dx: 0.5,
            sol_err: 0.1,
            order,
            local: LocalClReport { err1: 1e-9, err2: 2e-9 },
            global: GlobalInvariantReport { err_m: 0.0, err_h: 3.0 },
            newton_iters: 7,
            wall_seconds: 1.25,
            status: RowStatus::Ok,
        };
        RunReport {
            scheme: SchemeKind::new(Variant::EfDvd, 25.0),
            breather: BreatherParams::benchmark(),
            rows: vec![
                row(0.01, None),
                row(0.005, Some(OrderEntry { order: 2.0, floor_limited: false })),
                row(0.0025, Some(OrderEntry { order: 0.1, floor_limited: true })),
            ],
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&report(), &mut buf, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(
            lines[1],
            "ef-dvd,1.0000000000000000e-2,5.0000000000000000e-1,2.5000000000000000e1,1.3999999999999999e0,\
             1.0000000000000001e-1,,1.0000000000000001e-9,2.0000000000000001e-9,0.0000000000000000e0,3.0000000000000000e0,7,,ok"
        );
        assert!(lines[2].contains(",2.0000000000000000e0,"));
        assert!(lines[3].contains(",***,"));

        let mut timed = Vec::new();
        write_csv(&report(), &mut timed, true).unwrap();
        assert!(String::from_utf8(timed).unwrap().lines().nth(1).unwrap().ends_with(",1.2500000000000000e0,ok"));
    }

    #[test]
    fn csv_values_round_trip() {
        let mut buf = Vec::new();
        let mut r = report();
        r.rows[0].sol_err = 0.1 + 0.2;
        write_csv(&r, &mut buf, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cell: f64 = text.lines().nth(1).unwrap().split(',').nth(5).unwrap().parse().unwrap();
        assert_eq!(cell, 0.1 + 0.2);
    }

    #[test]
    fn plot_and_summary() {
        let mut buf = Vec::new();
        write_plot_data(&report(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().nth(1).unwrap().starts_with("1.0000000000000000e-2 1.0000000000000001e-1"));
        let summary = report().to_string();
        assert!(summary.contains("***") && summary.contains("2.00"));
    }
}
