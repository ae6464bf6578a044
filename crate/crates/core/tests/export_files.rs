use fuzzsphere::csquant::quantize_quadrature;
use fuzzsphere::export::{read_matrix, write_matrix, Format, MatrixFile};
use fuzzsphere::quad::SphereGrid;
use fuzzsphere::{Complex, SshParams};

fn sample() -> MatrixFile {
    let p = SshParams::new(3, 1).unwrap();
    let m = quantize_quadrature(&p, |x| Complex::new(x.theta.cos() * x.phi.sin(), x.theta), &SphereGrid::auto(3, 4))
        .unwrap();
    MatrixFile {
        two_sigma: 1,
        matrix: m,
    }
}

#[test]
fn file_round_trip_is_bit_exact_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for (format, ext) in [(Format::Json, "json"), (Format::Csv, "csv")] {
        let a = dir.path().join(format!("a.{ext}"));
        let b = dir.path().join(format!("b.{ext}"));
        write_matrix(&a, &sample(), format).unwrap();
        write_matrix(&b, &sample(), format).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        let back = read_matrix(&a, format).unwrap();
        let orig = sample();
        for (x, y) in back.matrix.entries().iter().zip(orig.matrix.entries().iter()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        if format == Format::Csv {
            let text = std::fs::read_to_string(&a).unwrap();
            assert_eq!(text.lines().count(), 1 + 16);
        } else {
            assert_eq!(back.two_sigma, 1);
        }
    }
}

#[test]
fn unwritable_path_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("x.json");
    assert!(write_matrix(&path, &sample(), Format::Json).is_err());
}
