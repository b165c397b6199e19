use bilinear_variation::average::avg_fields;
use bilinear_variation::io::{read_csv, read_ndf1, write_csv, write_ndf1};
use bilinear_variation::random::{mixture_field, random_body, trial_rng};
use bilinear_variation::variation::split_domination_check;
use bilinear_variation::{vq_exact, ConvexBody, Field, GridBox, Mode, TimeGrid};
use proptest::prelude::*;

#[test]
fn fields_survive_both_formats() {
    let mut rng = trial_rng(4, 0);
    let grid = GridBox::new(vec![-3, 5], vec![6, 4], 0.25).unwrap();
    let (_, f) = mixture_field(&mut rng, &grid);
    let mut bin = Vec::new();
    write_ndf1(&f, &mut bin).unwrap();
    assert_eq!(read_ndf1(bin.as_slice()).unwrap(), f);
    let line = GridBox::line(-7, 40, 0.5).unwrap();
    let (_, g) = mixture_field(&mut rng, &line);
    let mut text = Vec::new();
    write_csv(&g, &mut text).unwrap();
    assert_eq!(read_csv(text.as_slice()).unwrap(), g);
}

#[test]
fn sweep_then_variation_on_random_inputs() {
    for trial in 0..10 {
        let mut rng = trial_rng(8, trial);
        let grid = GridBox::line(0, 32, 1.0).unwrap();
        let (_, f1) = mixture_field(&mut rng, &grid);
        let (_, f2) = mixture_field(&mut rng, &grid);
        let body = random_body(&mut rng, 1);
        let times = TimeGrid::geometric(0.5, 16.0, 3).unwrap();
        let avgs = avg_fields(&body, &f1, &f2, Mode::Continuum, &times, &grid).unwrap();
        let bound = f1.max_abs() * f2.max_abs();
        for i in 0..grid.len() {
            let seq: Vec<f64> = avgs.iter().map(|a| a.samples()[i]).collect();
            assert!(seq.iter().all(|v| v.abs() <= bound + 1e-12));
            assert!(split_domination_check(&seq, &times, 3.0).unwrap().holds);
        }
    }
}

proptest! {
    #[test]
    fn averages_are_symmetric_under_swapping_a_symmetric_body(
        v1 in prop::collection::vec(-3.0f64..3.0, 1..12),
        v2 in prop::collection::vec(-3.0f64..3.0, 1..12),
        t in 0.5f64..6.0,
    ) {
        // the ball is invariant under (y1, y2) -> (y2, y1)
        let body = ConvexBody::ball(1, 1.0).unwrap();
        let f1 = Field::line(v1, 1.0).unwrap();
        let f2 = Field::line(v2, 1.0).unwrap();
        let out = GridBox::line(-8, 28, 1.0).unwrap();
        let grid = TimeGrid::new(vec![t]).unwrap();
        let a = avg_fields(&body, &f1, &f2, Mode::Continuum, &grid, &out).unwrap();
        let b = avg_fields(&body, &f2, &f1, Mode::Continuum, &grid, &out).unwrap();
        for (x, y) in a[0].samples().iter().zip(b[0].samples()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn variation_is_scale_covariant(a in prop::collection::vec(-5.0f64..5.0, 0..14), c in -4.0f64..4.0, q in 2.1f64..7.0) {
        let scaled: Vec<f64> = a.iter().map(|v| c * v + 1.0).collect();
        let lhs = vq_exact(&scaled, q).unwrap().value;
        let rhs = c.abs() * vq_exact(&a, q).unwrap().value;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
    }
}
