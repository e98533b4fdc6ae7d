//! CSV rendering for result rows and BER curves.

use crate::pipeline::{CurvePoint, DeltaMap, ResultRow};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

pub const ROW_HEADER: &str = "family,param1,param2,delta_map,k,n,beta,eta,size_G_amp,size_G_phase_E,size_G_phase_Ep,size_P1,size_P2,size_P1p,size_P2p,size_Sin_degr,size_Sin_pd,size_B_both,delta,rq_degr,rq_pd,chi_ab,chi_ae,chi_aep,ent_consumption,unpolarized,ber_lower,ber_upper,ber_mc,ms";

pub const CURVE_HEADER: &str =
    "family,param1,param2,delta_map,k,n,rate_target,info_size,rate,ber_lower,ber_upper,ber_mc";

/// Real to 9 significant digits, shortest form: `0.5`, `0.333333333`.
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("scientific form parses");
    if rounded == 0.0 {
        return "0".to_string();
    }
    rounded.to_string()
}

fn format_delta_map(d: DeltaMap) -> String {
    match d {
        DeltaMap::Conjugation => "conjugation".to_string(),
        DeltaMap::Parametric(delta) => format_real(delta),
    }
}

fn opt_real(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

pub fn render_row(r: &ResultRow) -> String {
    let mut line = String::new();
    let reals = |xs: &[f64]| {
        xs.iter()
            .map(|x| format_real(*x))
            .collect::<Vec<_>>()
            .join(",")
    };
    write!(
        line,
        "{},{},{},{},{},{},{},{},",
        r.family,
        format_real(r.param1),
        format_real(r.param2),
        format_delta_map(r.delta_map),
        r.k,
        r.n,
        format_real(r.beta),
        format_real(r.eta),
    )
    .unwrap();
    let sizes = [
        r.size_g_amp,
        r.size_g_phase_e,
        r.size_g_phase_ep,
        r.size_p1,
        r.size_p2,
        r.size_p1p,
        r.size_p2p,
        r.size_sin_degr,
        r.size_sin_pd,
        r.size_b_both,
        r.delta,
    ];
    for s in sizes {
        write!(line, "{s},").unwrap();
    }
    line.push_str(&reals(&[
        r.rq_degr,
        r.rq_pd,
        r.chi_ab,
        r.chi_ae,
        r.chi_aep,
        r.ent_consumption,
        r.unpolarized,
        r.ber_lower,
        r.ber_upper,
    ]));
    write!(
        line,
        ",{},{}",
        opt_real(r.ber_mc),
        r.ms.map(|m| m.to_string()).unwrap_or_default()
    )
    .unwrap();
    line
}

pub fn render_curve_point(p: &CurvePoint) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        p.family,
        format_real(p.param1),
        format_real(p.param2),
        format_delta_map(p.delta_map),
        p.k,
        p.n,
        format_real(p.rate_target),
        p.info_size,
        format_real(p.rate),
        format_real(p.ber_lower),
        format_real(p.ber_upper),
        opt_real(p.ber_mc),
    )
}

fn render<T>(header: &str, items: &[T], line: impl Fn(&T) -> String) -> String {
    let mut out = String::with_capacity(64 * (items.len() + 1));
    out.push_str(header);
    out.push('\n');
    for item in items {
        out.push_str(&line(item));
        out.push('\n');
    }
    out
}

pub fn render_rows(rows: &[ResultRow]) -> String {
    render(ROW_HEADER, rows, render_row)
}

pub fn render_curve(points: &[CurvePoint]) -> String {
    render(CURVE_HEADER, points, render_curve_point)
}

/// Writes `rows` with the fixed header. Refuses an empty row set.
pub fn emit_csv(rows: &[ResultRow], path: &Path) -> io::Result<()> {
    if rows.is_empty() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "no rows to write",
        ));
    }
    std::fs::write(path, render_rows(rows))
}

pub fn emit_curve_csv(points: &[CurvePoint], path: &Path) -> io::Result<()> {
    std::fs::write(path, render_curve(points))
}
