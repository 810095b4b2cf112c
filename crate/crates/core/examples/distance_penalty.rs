//! Distance map, penalty matrix and WDP for a map with a stray blob.

use groundcam::fixtures::{gaussian_map, BlobSpec};
use groundcam::metrics::{distance_map, penalty_map, wdp, wdp_binary};
use groundcam::{BoundingBox, GroundTruth, MetricConfig};

fn main() -> groundcam::Result<()> {
    let (h, w) = (64, 64);
    let gt = GroundTruth::new(vec![BoundingBox::new(16, 16, 32, 32)], h, w)?;
    let cfg = MetricConfig::default();
    let dmap = distance_map(&gt);

    // Negative inside the box; the penalty masks those pixels out.
    println!("distance from the box along row 24:");
    let row: Vec<String> = (0..w).step_by(4).map(|j| format!("{:.0}", dmap.get(24, j))).collect();
    println!("  {}", row.join(" "));

    // Same stray blob, moved progressively farther from the box.
    for col in [36, 44, 52] {
        let blobs = [BlobSpec::new((24, 24), 4.0, 1.0), BlobSpec::new((24, col), 2.0, 0.6)];
        let map = gaussian_map(h, w, &blobs, 0.0, 0)?;
        let penalty: f64 = penalty_map(&map, &gt, &dmap)?.iter().sum();
        println!(
            "stray blob at col {col}: penalty {penalty:8.2}  wdp soft {:.4}  binary {:.4}",
            wdp(&map, &gt, &cfg)?,
            wdp_binary(&map, &gt, &cfg)?
        );
    }
    Ok(())
}
