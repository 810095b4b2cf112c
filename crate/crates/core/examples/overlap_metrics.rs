//! Soft and binary IoU / Dice on a small hand-written map.

use groundcam::metrics::{binarize, dice, iou};
use groundcam::{ActivationMap, BoundingBox, GroundTruth};

fn main() -> groundcam::Result<()> {
    let map = ActivationMap::from_rows(&[
        [0.0, 0.1, 0.2, 0.0],
        [0.1, 0.9, 0.8, 0.0],
        [0.0, 0.7, 0.6, 0.3],
        [0.0, 0.0, 0.2, 0.0],
    ])?;
    let gt = GroundTruth::new(vec![BoundingBox::new(1, 1, 3, 3)], 4, 4)?;

    let hard = binarize(&map, 0.5);
    println!("iou  soft {:.4}  binary {:.4}", iou(&map, &gt)?, iou(&hard, &gt)?);
    println!("dice soft {:.4}  binary {:.4}", dice(&map, &gt)?, dice(&hard, &gt)?);
    Ok(())
}
