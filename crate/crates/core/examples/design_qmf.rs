//! Prints the refined QMF prototype half taps.
use sbadpcm::qmf::design;

fn main() {
    let h = design::refine_power_complementary(&design::windowed_halfband_sinc());
    for v in &h[..16] {
        println!("    {v:?},");
    }
}
