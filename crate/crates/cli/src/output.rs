//! CSV and SVG writers. Everything here is a pure function of its inputs so
//! reruns produce identical bytes.

use std::fmt::Write as _;

use chirality_core::{KernelTable, PointerScanResult, Trajectory};
use sha2::{Digest, Sha256};

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(out: &mut String, values: &[f64]) {
    let cells: Vec<String> = values.iter().map(|&v| num(v)).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

pub const TRAJECTORY_HEADER: &str = "t,P,E,re_rho00,re_rho11,re_rho01,im_rho01,gamma_z,gamma_plus,gamma_minus";

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for k in 0..traj.times.len() {
        let m = traj.states[k].matrix();
        let r = traj.rates[k];
        row(
            &mut out,
            &[
                traj.times[k],
                traj.polarization[k],
                traj.entropy[k],
                m[(0, 0)].re,
                m[(1, 1)].re,
                m[(0, 1)].re,
                m[(0, 1)].im,
                r[0],
                r[1],
                r[2],
            ],
        );
    }
    out
}

pub const KERNEL_HEADER: &str = "t,re_G0,im_G0,re_Gp0,im_Gp0,re_G+,im_G+,re_Gp+,im_Gp+,re_G-,im_G-,re_Gp-,im_Gp-,gamma_z,gamma_plus,gamma_minus";

/// Kernel rows at the grid points that coincide with `times`; `table` must
/// carry rates.
pub fn kernel_csv(table: &KernelTable, times: &[f64]) -> String {
    let rates = table.rates.as_ref().expect("kernel table without rates");
    let mut out = String::from(KERNEL_HEADER);
    out.push('\n');
    let mut want = times.iter().peekable();
    for (k, &t) in table.times.iter().enumerate() {
        match want.peek() {
            Some(&&w) if w == t => {
                want.next();
            }
            _ => continue,
        }
        let mut v = vec![t];
        for l in 0..3 {
            let (g, gp) = (table.gamma[l][k], table.gamma_prime[l][k]);
            v.extend([g.re, g.im, gp.re, gp.im]);
        }
        v.extend([rates.z[k], rates.plus[k], rates.minus[k]]);
        row(&mut out, &v);
    }
    out
}

pub const SCAN_HEADER: &str = "theta,phi,score";

/// One row per scanned state, then a `#` summary line.
pub fn scan_csv(scan: &PointerScanResult) -> String {
    let mut out = String::from(SCAN_HEADER);
    out.push('\n');
    for (b, &s) in scan.states.iter().zip(&scan.scores) {
        row(&mut out, &[b.theta, b.phi, s]);
    }
    let _ = writeln!(
        out,
        "# theta_p={},phi_p={},horizon={},measure={}",
        num(scan.theta_p),
        num(scan.phi_p),
        num(scan.horizon),
        scan.measure.label()
    );
    out
}

pub const SPECTRUM_HEADER: &str = "index,energy";

pub fn spectrum_csv(energies: &[f64]) -> String {
    let mut out = String::from(SPECTRUM_HEADER);
    out.push('\n');
    for (k, &e) in energies.iter().enumerate() {
        let _ = writeln!(out, "{k},{}", num(e));
    }
    out
}

/// Generic table with a header and float rows.
pub fn table_csv(header: &str, rows: &[Vec<f64>]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        row(&mut out, r);
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct Series<'a> {
    pub label: String,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Bare-bones line plot: axes, min/max tick labels and a legend.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series<'_>]) -> String {
    let (w, h, m) = (640.0, 400.0, 60.0);
    let finite = |v: &&f64| v.is_finite();
    let xs = series.iter().flat_map(|s| s.x.iter().filter(finite));
    let ys = series.iter().flat_map(|s| s.y.iter().filter(finite));
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(y1 > y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let x1 = if x1 > x0 { x1 } else { x0 + 1.0 };
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{} H{}" fill="none" stroke="black"/>"#,
        h - m,
        w - m
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w / 2.0, h - 15.0, escape(xlabel));
    let _ = writeln!(s, r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{}</text>"#, h / 2.0, h / 2.0, escape(ylabel));
    for (v, anchor, x, y) in [
        (x0, "start", m, h - m + 15.0),
        (x1, "end", w - m, h - m + 15.0),
    ] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.3}</text>"#);
    }
    for v in [y0, y1] {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{v:.4}</text>"#, m - 4.0, py(v) + 4.0);
    }
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ser
            .x
            .iter()
            .zip(ser.y)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" points="{}"/>"#, pts.join(" "));
        let ly = m + 15.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" fill="{color}" text-anchor="end">{}</text>"#,
            w - m - 5.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
