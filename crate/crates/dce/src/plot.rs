//! gnuplot scripts for the emitted CSV files. Rendering happens outside the binary.

use std::path::Path;

fn name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Heatmap of a long-format sweep CSV, with level-curve points on top.
pub fn sweep_script(data: &Path, levels: Option<&Path>, title: &str) -> String {
    let data = name(data);
    let png = data.trim_end_matches(".csv").to_owned() + ".png";
    let mut s = format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,700\n\
         set output '{png}'\n\
         set title '{title}'\n\
         set xlabel 'chi0'\n\
         set ylabel 'lambda0'\n\
         set view map\n\
         set palette rgbformulae 33,13,10\n"
    );
    s.push_str(&format!("plot '{data}' using 1:2:3 skip 1 with image notitle"));
    if let Some(l) = levels {
        s.push_str(&format!(
            ", \\\n     '{}' using 3:4 skip 1 with points pt 7 ps 0.3 lc rgb 'white' title 'level curves'",
            name(l)
        ));
    }
    s.push('\n');
    s
}

/// Line plot of a spectrum CSV.
pub fn spectrum_script(data: &Path) -> String {
    let data = name(data);
    let png = data.trim_end_matches(".csv").to_owned() + ".png";
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set output '{png}'\n\
         set xlabel 'omega'\n\
         set ylabel 'N(omega)/tau'\n\
         set key autotitle columnhead\n\
         plot for [c=2:4] '{data}' using 1:c with lines\n"
    )
}
