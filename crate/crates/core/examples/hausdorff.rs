use fif::{d_theta, hausdorff, hausdorff_sweep, Metric, Point2, PointSet, ThetaMetric};

pub fn main() -> fif::Result<()> {
    let th = ThetaMetric::new(0.25)?;
    let (p, q) = (Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
    println!("d_theta(p, q) = {}", d_theta(p, q, th)?);

    let circle = |n: usize, r: f64| {
        let pts = (0..n)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / n as f64;
                Point2::new(r * t.cos(), r * t.sin())
            })
            .collect();
        PointSet::new(pts, 0.0)
    };
    let a = circle(400, 1.0)?;
    let b = circle(300, 1.1)?;
    for metric in [Metric::D1, Metric::DTheta(th)] {
        println!(
            "{}: exhaustive {:.6}, sweep {:.6}",
            metric.name(),
            hausdorff(&a, &b, metric)?,
            hausdorff_sweep(&a, &b, metric)?
        );
    }
    let (thin, radius) = a.thin(50);
    println!("thinned to {} points within {:?}", thin.len(), radius);
    Ok(())
}
