//! Deforms the reference front and prints how well the two pipelines agree.

use flatfront::{deform_front, BaseSurface, FrameOptions, GridDomain, HarmonicPotential};

fn main() -> flatfront::Result<()> {
    let phi = HarmonicPotential::reference();
    let dom = GridDomain::square(-1.0, 1.0, 65)?;
    let base = BaseSurface::new(&phi, &dom, &FrameOptions::default())?;
    for lambda in [-0.5, 0.25, 0.75, 1.0] {
        let d = deform_front(&base, lambda)?;
        println!(
            "lambda {lambda:>5}: agreement {:.2e}, flatness {:.2e}, singular nodes {}",
            d.agreement,
            d.reduced.flatness_defect(0.1),
            d.reduced.singular_count()
        );
    }
    Ok(())
}
