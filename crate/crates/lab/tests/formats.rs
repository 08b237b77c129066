use proptest::prelude::*;
use weierstrass_core::levelset::BoxCountRecord;
use weierstrass_core::raster::{PixelFormat, RasterImage};
use weierstrass_core::{PeriodicFunction, Primitive};
use weierstrass_lab::config::GSpec;
use weierstrass_lab::formats::{parse_box_counts, read_pnm, write_box_counts, write_pnm};

fn record() -> impl Strategy<Value = BoxCountRecord> {
    (0u32..64, any::<f64>(), any::<u64>(), any::<u64>(), any::<bool>())
        .prop_filter("finite side", |r| r.1.is_finite())
        .prop_map(|(m, box_side, count, pruned, certified)| BoxCountRecord { m, box_side, count, pruned, certified })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn box_count_csv_round_trips(records in prop::collection::vec(record(), 0..20)) {
        let bytes = write_box_counts(&records);
        prop_assert_eq!(parse_box_counts(&bytes).unwrap(), records);
        prop_assert!(bytes.ends_with(b"\n"));
        prop_assert!(!bytes.contains(&b'\r'));
    }

    #[test]
    fn raster_round_trips(w in 1usize..40, h in 1usize..40, rgb in any::<bool>(), seed in any::<u64>()) {
        let format = if rgb { PixelFormat::Rgb } else { PixelFormat::Gray };
        let n = w * h * format.channels();
        let pixels: Vec<u8> = (0..n as u64).map(|i| (seed.wrapping_mul(i + 1) >> 13) as u8).collect();
        let img = RasterImage::from_pixels(w, h, format, pixels).unwrap();
        let back = RasterImage::from_pnm(&img.to_pnm()).unwrap();
        prop_assert_eq!(back, img);
    }

    #[test]
    fn function_json_round_trips(a in -2.0f64..2.0, c in -2.0f64..2.0, ell in 0.05f64..0.5, shift in 0.0f64..1.0) {
        let f = PeriodicFunction::new(vec![
            (a, Primitive::Cosine),
            (c, Primitive::Sine),
            (1.0, Primitive::TentShift { ell, shift }),
        ]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        let back: PeriodicFunction = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &f);
        let spec: GSpec = text.parse().unwrap();
        prop_assert_eq!(spec.build().unwrap(), f);
    }
}

#[test]
fn raw_coordinate_survives_serialization() {
    let raw = PeriodicFunction::raw_coordinate();
    let text = serde_json::to_string(&raw).unwrap();
    let back: PeriodicFunction = serde_json::from_str(&text).unwrap();
    assert_eq!(back, raw);
    assert!(!back.is_periodic());
}

#[test]
fn malformed_functions_are_rejected() {
    for text in [
        r#"{"terms": [{"weight": 1.0, "kind": "tent_shift", "ell": 0.9, "shift": 0.0}]}"#,
        r#"{"terms": [{"weight": 1.0, "kind": "piecewise_linear", "breakpoints": [0.5, 0.1], "values": [0, 1]}]}"#,
        r#"{"terms": [{"weight": 1.0, "kind": "raw_coordinate"}, {"weight": 1.0, "kind": "cosine"}]}"#,
        r#"{"terms": [{"weight": 1.0, "kind": "wavelet"}]}"#,
    ] {
        assert!(serde_json::from_str::<PeriodicFunction>(text).is_err(), "{text}");
    }
}

#[test]
fn pnm_files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.ppm");
    let mut img = RasterImage::new(3, 2, PixelFormat::Rgb).unwrap();
    img.set(2, 1, 0, 255);
    img.set(0, 0, 2, 110);
    write_pnm(&path, &img).unwrap();
    assert_eq!(std::fs::read(&path).unwrap()[..11], *b"P6\n3 2\n255\n");
    assert_eq!(read_pnm(&path).unwrap(), img);

    std::fs::write(&path, b"P6\n3 2\n65535\n").unwrap();
    assert!(read_pnm(&path).is_err());
    std::fs::write(&path, b"P5\n2 2\n255\n\x00").unwrap();
    assert!(read_pnm(&path).is_err());
}
