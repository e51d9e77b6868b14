// scratch debug binary
use num_complex::Complex64;
use num_rational::Rational64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statphase::legendre::{legendre_transform, DirectedGerm};
use statphase::puiseux::{BasePoint, Direction, Order, PuiseuxGerm};
use std::f64::consts::TAU;

fn rc(rng: &mut ChaCha8Rng) -> Complex64 {
    let mag = rng.gen_range(0.3..2.5);
    let arg = rng.gen_range(0.0..TAU);
    Complex64::from_polar(mag, arg)
}

fn random_germ(rng: &mut ChaCha8Rng, base: BasePoint, p: i64, q: i64, extra: usize) -> PuiseuxGerm {
    let lambda = Rational64::new(q, p);
    let mut terms = vec![(lambda, rc(rng))];
    let mut slot = q;
    for _ in 0..extra {
        slot -= rng.gen_range(1..=2);
        if slot <= -3 * p { break; }
        terms.push((Rational64::new(slot, p), rc(rng)));
    }
    PuiseuxGerm::new(base, p as u32, terms, Order::Exact)
}

fn main() {
    let mut r = ChaCha8Rng::seed_from_u64(101);
    for count in 0..300 {
        let kind = count % 3;
        // replicate random_admissible inline
        let src = match kind {
            0 => {
                let p = r.gen_range(1..=4i64);
                let a = if r.gen_bool(0.5) { Complex64::ZERO } else { Complex64::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)) };
                let q_min = (p + 2) / 3;
                let q = r.gen_range(q_min.max(1)..=4 * p);
                let extra = r.gen_range(0..4);
                let germ = random_germ(&mut r, BasePoint::Finite(a), p, q, extra);
                let pr = germ.reduced_ramification();
                let angle = r.gen_range(0.0..TAU);
                let branch = r.gen_range(0..pr.max(1));
                DirectedGerm::new(germ.clone(), Direction::new(germ.base(), angle, branch)).unwrap()
            }
            1 => {
                let _p0 = r.gen_range(1..=4i64);
                let p = r.gen_range(2..=4i64);
                let q = r.gen_range(1..p);
                let extra = r.gen_range(0..3);
                let mut germ = random_germ(&mut r, BasePoint::Infinity, p, q, extra);
                if r.gen_bool(0.7) {
                    let b = rc(&mut r);
                    germ = germ.add(&PuiseuxGerm::monomial(BasePoint::Infinity, Rational64::new(1,1), b)).unwrap();
                }
                let pr = germ.reduced_ramification();
                let angle = r.gen_range(0.0..TAU);
                let branch = r.gen_range(0..pr.max(1));
                DirectedGerm::new(germ.clone(), Direction::new(germ.base(), angle, branch)).unwrap()
            }
            _ => {
                let p = r.gen_range(1..=4i64);
                let q = r.gen_range(p + 1..=4 * p);
                let extra = r.gen_range(0..4);
                let germ = random_germ(&mut r, BasePoint::Infinity, p, q, extra);
                let pr = germ.reduced_ramification();
                let angle = r.gen_range(0.0..TAU);
                let branch = r.gen_range(0..pr.max(1));
                DirectedGerm::new(germ.clone(), Direction::new(germ.base(), angle, branch)).unwrap()
            }
        };
        match legendre_transform(&src, 12) {
            Ok(_) => {}
            Err(e) => {
                println!("FAIL at count={} kind={}: {}", count, kind, e);
                println!("germ = {}", src.germ);
                println!("dir = {}", src.dir);
                return;
            }
        }
    }
    println!("all ok");
}
