//! Brute-force reference implementations used to check the library
//! metrics. Written for clarity over speed and kept separate from the
//! library code.
#![allow(dead_code)]

/// Lowercase, whitespace split, each non-alphanumeric char on its own.
pub fn tokens(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut spaced = String::new();
    for c in lowered.chars() {
        if c.is_alphanumeric() || c.is_whitespace() {
            spaced.push(c);
        } else {
            spaced.push(' ');
            spaced.push(c);
            spaced.push(' ');
        }
    }
    spaced.split_whitespace().map(str::to_string).collect()
}

fn grams(toks: &[String], k: usize) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i + k <= toks.len() {
        out.push(toks[i..i + k].to_vec());
        i += 1;
    }
    out
}

fn occurrences(list: &[Vec<String>], g: &[String]) -> usize {
    list.iter().filter(|x| x.as_slice() == g).count()
}

/// Corpus BLEU by direct counting over gram lists.
pub fn bleu(pairs: &[(String, Vec<String>)], n: usize, smoothing: bool) -> f64 {
    let mut hyp_len = 0usize;
    let mut ref_len = 0usize;
    let mut num = vec![0usize; n + 1];
    let mut den = vec![0usize; n + 1];
    for (h, refs) in pairs {
        let ht = tokens(h);
        let rts: Vec<Vec<String>> = refs.iter().map(|r| tokens(r)).collect();
        hyp_len += ht.len();
        let mut best = rts[0].len();
        for r in &rts {
            let d = (r.len() as i64 - ht.len() as i64).abs();
            let bd = (best as i64 - ht.len() as i64).abs();
            if d < bd || (d == bd && r.len() < best) {
                best = r.len();
            }
        }
        ref_len += best;
        for k in 1..=n {
            let hg = grams(&ht, k);
            let rgs: Vec<Vec<Vec<String>>> = rts.iter().map(|r| grams(r, k)).collect();
            let mut distinct: Vec<Vec<String>> = Vec::new();
            for g in &hg {
                if !distinct.contains(g) {
                    distinct.push(g.clone());
                }
            }
            for g in &distinct {
                let in_hyp = occurrences(&hg, g);
                let in_ref = rgs.iter().map(|rg| occurrences(rg, g)).max().unwrap_or(0);
                num[k] += in_hyp.min(in_ref);
            }
            den[k] += hg.len();
        }
    }
    if hyp_len == 0 {
        return 0.0;
    }
    let mut product_log = 0.0;
    for k in 1..=n {
        let (a, b) = if smoothing && k >= 2 {
            (num[k] + 1, den[k] + 1)
        } else {
            (num[k], den[k])
        };
        if a == 0 || b == 0 {
            return 0.0;
        }
        product_log += (a as f64 / b as f64).ln();
    }
    let bp = if hyp_len < ref_len {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    } else {
        1.0
    };
    bp * (product_log / n as f64).exp()
}

/// Full-table LCS.
pub fn lcs(a: &[String], b: &[String]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            t[i][j] = if a[i - 1] == b[j - 1] {
                t[i - 1][j - 1] + 1
            } else {
                t[i - 1][j].max(t[i][j - 1])
            };
        }
    }
    t[a.len()][b.len()]
}

pub fn rouge_l(pairs: &[(String, Vec<String>)], beta: f64) -> f64 {
    let mut sum = 0.0;
    for (h, refs) in pairs {
        let ht = tokens(h);
        let mut best = 0.0f64;
        for r in refs {
            let rt = tokens(r);
            let l = lcs(&ht, &rt);
            if l == 0 {
                continue;
            }
            let p = l as f64 / ht.len() as f64;
            let rc = l as f64 / rt.len() as f64;
            best = best.max((1.0 + beta * beta) * p * rc / (rc + beta * beta * p));
        }
        sum += best;
    }
    sum / pairs.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Nominal,
    Ordinal,
    Interval,
}

fn delta(metric: Metric, a: i64, b: i64, pooled: &[i64]) -> f64 {
    match metric {
        Metric::Nominal => (a != b) as u8 as f64,
        Metric::Interval => ((a - b) * (a - b)) as f64,
        Metric::Ordinal => {
            if a == b {
                return 0.0;
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let n_of = |v: i64| pooled.iter().filter(|&&x| x == v).count() as f64;
            let mut s = 0.0;
            let mut g = lo;
            while g <= hi {
                s += n_of(g);
                g += 1;
            }
            s -= (n_of(lo) + n_of(hi)) / 2.0;
            s * s
        }
    }
}

/// Alpha by enumerating every ordered pair of values: within units for
/// the observed term, across the whole pool for the expected term.
/// `units[u]` holds the ratings of unit `u`. Returns None when undefined
/// (no pairable values); returns 1.0 when the expected term is zero.
pub fn alpha(units: &[Vec<i64>], metric: Metric) -> Option<f64> {
    let pairable: Vec<&Vec<i64>> = units.iter().filter(|u| u.len() >= 2).collect();
    let pooled: Vec<i64> = pairable.iter().flat_map(|u| u.iter().copied()).collect();
    let n = pooled.len();
    if n == 0 {
        return None;
    }
    let mut d_o = 0.0;
    for u in &pairable {
        let mut s = 0.0;
        for i in 0..u.len() {
            for j in 0..u.len() {
                if i != j {
                    s += delta(metric, u[i], u[j], &pooled);
                }
            }
        }
        d_o += s / (u.len() - 1) as f64;
    }
    d_o /= n as f64;
    let mut d_e = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d_e += delta(metric, pooled[i], pooled[j], &pooled);
            }
        }
    }
    d_e /= (n * (n - 1)) as f64;
    if d_e == 0.0 {
        return Some(1.0);
    }
    Some(1.0 - d_o / d_e)
}

/// Counts hand-checked on a tiny grid: keeps the oracle honest.
pub fn self_check() {
    let t = |s: &str| s.to_string();
    let p = vec![(t("the the the the the the the"), vec![t("the cat is on the mat")])];
    assert!((bleu(&p, 1, false) - 2.0 / 7.0).abs() < 1e-12);
    let p = vec![(t("a b c d e"), vec![t("a c e")])];
    assert!((rouge_l(&p, 1.0) - 0.75).abs() < 1e-12);
    let units = vec![vec![1, 1], vec![1, 2], vec![2, 2], vec![2, 2]];
    assert!((alpha(&units, Metric::Nominal).unwrap() - 8.0 / 15.0).abs() < 1e-12);
}
