//! Minimal static SVG line plots — a convenience view of the CSV data, no
//! plotting stack involved.

use cavity_spectra::spectra::Spectrum;

const W: f64 = 860.0;
const H: f64 = 520.0;
const ML: f64 = 70.0;
const MR: f64 = 20.0;
const MT: f64 = 40.0;
const MB: f64 = 55.0;

fn polyline(xs: &[f64], ys: &[f64], x0: f64, x1: f64, y1: f64, style: &str) -> String {
    let px = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let py = |y: f64| H - MB - (y / y1).clamp(0.0, 1.0) * (H - MT - MB);
    let pts: Vec<String> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y.max(0.0))))
        .collect();
    format!("<polyline fill=\"none\" {style} points=\"{}\"/>", pts.join(" "))
}

/// Two-curve spectrum plot: S_C solid, S_E dashed, axes in GHz.
pub fn spectrum_svg(spec: &Spectrum, title: &str) -> String {
    let x0 = spec.omega[0];
    let x1 = *spec.omega.last().unwrap();
    let ymax = spec
        .s_e
        .iter()
        .chain(spec.s_c.iter())
        .cloned()
        .fold(f64::MIN_POSITIVE, f64::max)
        * 1.05;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        W - ML - MR,
        H - MT - MB
    ));
    // x ticks
    for i in 0..=6 {
        let x = x0 + (x1 - x0) * i as f64 / 6.0;
        let px = ML + (W - ML - MR) * i as f64 / 6.0;
        out.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{}\" x2=\"{px:.1}\" y2=\"{}\" stroke=\"black\"/>\n",
            H - MB,
            H - MB + 6.0
        ));
        out.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{x:.1}</text>\n",
            H - MB + 22.0
        ));
    }
    // y ticks
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let py = H - MB - frac * (H - MT - MB);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{py:.1}\" x2=\"{ML}\" y2=\"{py:.1}\" stroke=\"black\"/>\n",
            ML - 6.0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"end\">{:.3}</text>\n",
            ML - 10.0,
            py + 4.0,
            frac * ymax
        ));
    }
    out.push_str(&polyline(
        &spec.omega,
        &spec.s_c,
        x0,
        x1,
        ymax,
        "stroke=\"#1f4e9c\" stroke-width=\"1.6\"",
    ));
    out.push('\n');
    out.push_str(&polyline(
        &spec.omega,
        &spec.s_e,
        x0,
        x1,
        ymax,
        "stroke=\"#c03020\" stroke-width=\"1.6\" stroke-dasharray=\"6 4\"",
    ));
    out.push('\n');
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{}\" font-size=\"15\" text-anchor=\"middle\">Ω (GHz)</text>\n",
        ML + 0.5 * (W - ML - MR),
        H - 12.0
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{:.1}\" font-size=\"15\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">S (1/GHz)</text>\n",
        MT + 0.5 * (H - MT - MB),
        MT + 0.5 * (H - MT - MB)
    ));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        ML + 0.5 * (W - ML - MR),
        title
    ));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"44\" font-size=\"12\" fill=\"#1f4e9c\">— S_C</text>\n",
        W - MR - 130.0
    ));
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"60\" font-size=\"12\" fill=\"#c03020\">-- S_E</text>\n",
        W - MR - 130.0
    ));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cavity_spectra::presets;
    use cavity_spectra::spectra::{compute_spectrum, Backend, SolverQuality};

    #[test]
    fn svg_is_wellformed_enough() {
        let p = presets::fig2_params(0.0, 0.0).unwrap();
        let spec =
            compute_spectrum(&p, Backend::ClosedForm, &SolverQuality::standard(), None, None)
                .unwrap();
        let svg = spectrum_svg(&spec, "test");
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
