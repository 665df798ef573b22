//! Embed the unit circle into R^3 and print the certificates.

use subcart_core::embed::{proper_embedding, EmbedParams};
use subcart_core::fixtures;
use subcart_core::space::sample;

fn main() -> subcart_core::Result<()> {
    let p = fixtures::circle();
    let samples = sample(&p, &p.sampler, 0)?;
    let result = proper_embedding(&p, &samples, &EmbedParams::default(), 7)?;
    let d = &result.diagnostics;
    println!("samples            {}", d.samples);
    println!("target dimension   {}", result.m);
    println!("cover elements     {}", result.cover.len());
    println!("max deviation      {:.3e}", d.max_deviation);
    println!("separation ratio   {:.3e}", d.min_separation_ratio);
    println!("tangent sigma_min  {:.3e}", d.min_tangent_singular_value);
    println!("passed             {}", d.passed);
    for x in samples.points().iter().step_by(90) {
        println!("{x:?} -> {:?}", result.map.eval(x)?);
    }
    Ok(())
}
