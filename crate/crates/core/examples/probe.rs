use std::time::Instant;
use stratabraid::factorization::{factor_pure_kernel_word, PureLetter, PureWord};
use stratabraid::word_problem::{equals, normal_form};

fn kernel_word(n: usize, r: u64, len: usize, seed: u64) -> PureWord {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut letters = Vec::new();
    for _ in 0..len {
        let i = (next() as usize) % (n - 1) + 1;
        let j = i + 1 + (next() as usize) % (n - i);
        let sign = if next() % 2 == 0 { 1 } else { -1 };
        letters.push(PureLetter::new(i, j, sign));
    }
    let mut w = PureWord::new(n, letters);
    loop {
        let v = w.phi_vec(r);
        let nz: Vec<usize> = (0..n).filter(|&k| v[k] != 0).collect();
        match nz.len() {
            0 => break,
            1 => {
                let k = nz[0] + 1;
                let (m, m2) = if k == 1 { (2, 3) } else if k == 2 { (1, 3) } else { (1, 2) };
                let c = v[k - 1];
                let q = if r % 2 == 1 { ((r as i64 + 1) / 2 * c).rem_euclid(r as i64) } else { c / 2 };
                let q = if 2 * q > r as i64 { q - r as i64 } else { q };
                for (a, b, e) in [(k, m, -q), (k, m2, -q), (m, m2, q)] {
                    let s = if e >= 0 { 1 } else { -1 };
                    for _ in 0..e.unsigned_abs() {
                        w.letters.push(PureLetter::new(a.min(b), a.max(b), s));
                    }
                }
            }
            _ => {
                let (k1, k2) = (nz[0], nz[1]);
                let e = r as i64 - v[k1];
                for _ in 0..e {
                    w.letters.push(PureLetter::new(k1 + 1, k2 + 1, 1));
                }
            }
        }
    }
    w
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(18);
    let r: u64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(3);
    let len: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(5);
    let seeds: u64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(6);
    let start: u64 = std::env::var("SEED0").ok().and_then(|v| v.parse().ok()).unwrap_or(0);
    for seed in start..(start + seeds) {
        let w = kernel_word(n, r, len, seed);
        eprintln!("seed {seed}: {} letters, starting factor...", w.letters.len());
        let t0 = Instant::now();
        let tw = match factor_pure_kernel_word(&w, r, false) {
            Ok(tw) => tw,
            Err(e) => {
                println!("seed {seed}: ERROR {e}");
                continue;
            }
        };
        let t1 = Instant::now();
        let expanded = tw.expand().unwrap();
        eprintln!("seed {seed}: factored into {} factors, {} sigma letters; normalizing...", tw.len(), expanded.len());
        let nf = normal_form(&expanded);
        let t2 = Instant::now();
        let target = w.expand().unwrap();
        let ok = equals(&expanded, &target).unwrap();
        let t3 = Instant::now();
        println!(
            "seed {seed}: {} letters -> {} factors ({} sigma letters), canon len {}; factor {:?} nf {:?} equals {:?} ok={ok}",
            w.letters.len(),
            tw.len(),
            expanded.len(),
            nf.canonical_length(),
            t1 - t0,
            t2 - t1,
            t3 - t2
        );
    }
}
