//! Four maps that the pointing game cannot tell apart, ranked by io_ratio.

use groundcam::fixtures::scenario2_fixtures;
use groundcam::{evaluate_map, BoundingBox, GroundTruth, MetricConfig};

fn main() -> groundcam::Result<()> {
    let bbox = BoundingBox::new(80, 80, 140, 140);
    let gt = GroundTruth::new(vec![bbox], 224, 224)?;
    let masses = [0.0, 20.0, 60.0, 150.0];
    let cfg = MetricConfig::default();

    println!("outside mass  pg_hit  io_ratio");
    for (map, mass) in scenario2_fixtures(224, 224, bbox, &masses)?.iter().zip(masses) {
        let m = evaluate_map(map, &gt, &cfg)?;
        println!("{mass:12.1}  {:6}  {:.4}", m.pg_hit, m.io_ratio);
    }
    Ok(())
}
