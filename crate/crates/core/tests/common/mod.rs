#![allow(dead_code)]

use easyqg::partitions::{Color, ColorWord, Partition};
use proptest::prelude::*;

pub fn word_from_bits(n: usize, bits: u32) -> ColorWord {
    ColorWord((0..n).map(|i| if bits >> i & 1 == 1 { Color::Black } else { Color::White }).collect())
}

/// Random partition with `k` upper and `l` lower points, optionally colored.
pub fn partition_kl(k: usize, l: usize, colored: bool) -> impl Strategy<Value = Partition> {
    let n = k + l;
    (proptest::collection::vec(0..n.max(1), n), any::<u32>()).prop_map(move |(raw, bits)| {
        let bits = if colored { bits } else { 0 };
        let up = word_from_bits(k, bits);
        let lo = word_from_bits(l, bits >> k);
        Partition::from_labels(up, lo, &raw).unwrap()
    })
}

pub fn partition_upto(max_points: usize, colored: bool) -> impl Strategy<Value = Partition> {
    (0..=max_points).prop_flat_map(move |n| (0..=n).prop_flat_map(move |k| partition_kl(k, n - k, colored)))
}

/// Random even partition of `n` one-row points (`n` even).
pub fn even_partition(n: usize) -> impl Strategy<Value = Partition> {
    proptest::collection::vec(0..n / 2, n / 2).prop_map(move |pairs| {
        // pair up consecutive points, then merge pairs by the random labels
        let raw: Vec<usize> = (0..n).map(|i| pairs[i / 2]).collect();
        Partition::from_labels(ColorWord::empty(), ColorWord::white(n), &raw).unwrap()
    })
}

pub fn catalan(k: u64) -> u64 {
    let mut c = 1u64;
    for i in 0..k {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

pub fn bell(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        row = next;
    }
    row[0]
}
