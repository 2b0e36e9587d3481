use super::*;
use crate::frame::plane_hash;
use crate::rng::SplitMix64;

/// Full diamond as (offset -> coefficient index) pairs, expanded from the
/// upper-half tables; the independent oracle evaluates filters over this.
fn full_diamond(offsets: &[(i32, i32)]) -> Vec<((i32, i32), usize)> {
    let mut all = Vec::new();
    for (i, &(dx, dy)) in offsets.iter().enumerate() {
        all.push(((dx, dy), i));
        all.push(((-dx, -dy), i));
    }
    all.push(((0, 0), offsets.len()));
    all
}

#[test]
fn diamond_geometry_counts() {
    let luma = full_diamond(&LUMA_OFFSETS);
    assert_eq!(luma.len(), 25);
    let unique: std::collections::HashSet<(i32, i32)> = luma.iter().map(|&(off, _)| off).collect();
    assert_eq!(unique.len(), 25, "offsets must not collide");
    assert!(luma.iter().all(|&((dx, dy), _)| dx.abs() + dy.abs() <= 3));
    let idx: std::collections::HashSet<usize> = luma.iter().map(|&(_, i)| i).collect();
    assert_eq!(idx.len(), 13);

    let chroma = full_diamond(&CHROMA_OFFSETS);
    assert_eq!(chroma.len(), 13);
    assert!(chroma.iter().all(|&((dx, dy), _)| dx.abs() + dy.abs() <= 2));
    let idx: std::collections::HashSet<usize> = chroma.iter().map(|&(_, i)| i).collect();
    assert_eq!(idx.len(), 7);
}

fn numbered_luma() -> AlfLumaFilter {
    let mut f = AlfLumaFilter::ZERO;
    for i in 0..ALF_LUMA_COEFFS {
        f.coeff[i] = i as i16 + 1;
        f.clip_idx[i] = (i % 4) as u8;
    }
    f
}

#[test]
fn transpose_identity_and_axis_swap() {
    let f = numbered_luma();
    assert_eq!(alf_transpose_luma(&f, 0), f);

    // Axis swap maps offset (0,-3) (index 0) to (-3,0), which carries
    // index 9: permuted coefficient 0 is original coefficient 9.
    let swapped = alf_transpose_luma(&f, 1);
    assert_eq!(swapped.coeff[0], f.coeff[9]);
    assert_eq!(swapped.clip_idx[0], f.clip_idx[9]);
    // And symmetrically (-3,0) -> (0,-3).
    assert_eq!(swapped.coeff[9], f.coeff[0]);
}

#[test]
fn transpose_transforms_are_involutions_on_the_diamond() {
    let f = numbered_luma();
    for t in 0..4u8 {
        let twice = alf_transpose_luma(&alf_transpose_luma(&f, t), t);
        assert_eq!(twice, f, "transform {t} twice must be identity");
    }
    let mut c = AlfChromaFilter::ZERO;
    for i in 0..ALF_CHROMA_COEFFS {
        c.coeff[i] = 10 + i as i16;
        c.clip_idx[i] = (i % 4) as u8;
    }
    for t in 0..4u8 {
        let twice = alf_transpose_chroma(&alf_transpose_chroma(&c, t), t);
        assert_eq!(twice, c);
    }
}

#[test]
fn transpose_permutations_are_bijections() {
    for t in 0..4usize {
        let perm = &luma_perms()[t];
        let mut seen = [false; ALF_LUMA_COEFFS];
        for &p in perm {
            assert!(!seen[p], "transform {t} repeats index {p}");
            seen[p] = true;
        }
    }
}

/// Independent classifier: recompute gradients from the written formulas
/// over the window, then apply the decision rules longhand.
fn classify_oracle(p: &Plane, bx: usize, by: usize) -> AlfClassification {
    let g = |dx: i32, dy: i32, x: isize, y: isize| -> i64 {
        let c = p.read_clamped(x, y) as i64;
        let a = p.read_clamped(x - dx as isize, y - dy as isize) as i64;
        let b = p.read_clamped(x + dx as isize, y + dy as isize) as i64;
        (2 * c - a - b).abs()
    };
    let (mut gv, mut gh, mut gd0, mut gd1) = (0i64, 0i64, 0i64, 0i64);
    for wy in -2..6i64 {
        for wx in -2..6i64 {
            let x = bx as isize + wx as isize;
            let y = by as isize + wy as isize;
            gv += g(0, 1, x, y);
            gh += g(1, 0, x, y);
            gd0 += g(1, 1, x, y);
            gd1 += g(-1, 1, x, y);
        }
    }
    let (gv, gh, gd0, gd1) = (gv as u64, gh as u64, gd0 as u64, gd1 as u64);
    let hv_ratio_big = |hi: u64, lo: u64, num: u64, den: u64| hi * den > num * lo;
    let (hv_lo, hv_hi) = (gv.min(gh), gv.max(gh));
    let (d_lo, d_hi) = (gd0.min(gd1), gd0.max(gd1));
    let dir = if hv_hi <= 2 * hv_lo && d_hi <= 2 * d_lo {
        0
    } else if hv_ratio_big(hv_hi, hv_lo, d_hi, d_lo) {
        if 2 * hv_hi <= 9 * hv_lo {
            1
        } else {
            2
        }
    } else if 2 * d_hi <= 9 * d_lo {
        3
    } else {
        4
    };
    let table = [0u8, 1, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3, 3, 4];
    let idx = ((gv + gh) >> (p.depth().bits() + 2)).min(15) as usize;
    AlfClassification {
        class_idx: 5 * dir + table[idx],
        transpose_idx: (if gd1 > gd0 { 2 } else { 0 }) + (if gh > gv { 1 } else { 0 }),
    }
}

#[test]
fn classify_constant_block_is_class_zero() {
    let mut p = Plane::new(16, 16, BitDepth::Eight).unwrap();
    p.fill(77);
    let c = alf_classify_4x4(&p, BlockRect::new(4, 4, 4, 4)).unwrap();
    assert_eq!(c, AlfClassification::PLAIN);
    assert!(alf_classify_4x4(&p, BlockRect::new(0, 0, 8, 8)).is_err());
}

#[test]
fn classify_directional_patterns() {
    // Alternating columns: horizontal gradient dominates, vertical is zero.
    let mut p = Plane::new(16, 16, BitDepth::Eight).unwrap();
    for y in 0..16 {
        for x in 0..16 {
            p.set(x, y, if x % 2 == 0 { 40 } else { 200 });
        }
    }
    let c = alf_classify_4x4(&p, BlockRect::new(4, 4, 4, 4)).unwrap();
    let dir = c.class_idx / 5;
    assert!(
        dir == 1 || dir == 2,
        "stripes must classify as H/V, got {dir}"
    );
    assert_eq!(c.transpose_idx & 1, 1, "GH > GV must set bit 0");
    assert_eq!(c, classify_oracle(&p, 4, 4));

    // 45-degree diagonal stripes, two samples wide. (A one-sample
    // checkerboard has zero diagonal Laplacians: diagonal neighbors share
    // its parity.)
    let mut d = Plane::new(16, 16, BitDepth::Eight).unwrap();
    for y in 0..16 {
        for x in 0..16 {
            d.set(x, y, if (x + y) / 2 % 2 == 0 { 40 } else { 200 });
        }
    }
    let c = alf_classify_4x4(&d, BlockRect::new(4, 4, 4, 4)).unwrap();
    let dir = c.class_idx / 5;
    assert!(
        dir == 3 || dir == 4,
        "diagonals must classify as D, got {dir}"
    );
    assert_eq!(c, classify_oracle(&d, 4, 4));
}

#[test]
fn classify_matches_oracle_on_random_content() {
    let mut rng = SplitMix64::new(0xA1F);
    for depth in [BitDepth::Eight, BitDepth::Ten] {
        for trial in 0..200 {
            let p = Plane::random(24, 24, depth, rng.next_u64()).unwrap();
            let bx = 4 * rng.below(5) as usize;
            let by = 4 * rng.below(5) as usize;
            let got = classify_4x4_at(&p, bx, by);
            assert_eq!(got, classify_oracle(&p, bx, by), "trial {trial} {depth:?}");
            assert!(got.class_idx < 25);
            assert!(got.transpose_idx < 4);
        }
    }
}

/// Naive 25-position diamond evaluation: walks every tap of the full
/// diamond (no pair folding) and applies the clipped-difference form.
fn naive_filter_sample(
    src: &Plane,
    x: usize,
    y: usize,
    coeff: &[i16],
    clip: &[i16],
    offsets: &[(i32, i32)],
) -> u16 {
    let cur = src.get(x, y) as i64;
    let mut acc = 0i64;
    for &((dx, dy), idx) in &full_diamond(offsets) {
        if idx == offsets.len() {
            continue; // center carries no explicit coefficient
        }
        let n = src.read_clamped(x as isize + dx as isize, y as isize + dy as isize) as i64;
        let d = (n - cur).clamp(-(clip[idx] as i64), clip[idx] as i64);
        acc += coeff[idx] as i64 * d;
    }
    (cur + ((acc + 64) >> 7)).clamp(0, src.max_value() as i64) as u16
}

#[test]
fn zero_filter_and_constant_region_are_identities() {
    let clip = default_clip_table(BitDepth::Eight);
    let src = Plane::random(16, 16, BitDepth::Eight, 5).unwrap();
    let mut dst = Plane::new(16, 16, BitDepth::Eight).unwrap();
    alf_filter_block_luma(
        &src,
        &mut dst,
        BlockRect::new(4, 4, 4, 4),
        &AlfLumaFilter::ZERO,
        clip,
    )
    .unwrap();
    assert_eq!(
        dst.read_rect(BlockRect::new(4, 4, 4, 4)).unwrap(),
        src.read_rect(BlockRect::new(4, 4, 4, 4)).unwrap()
    );

    let mut flat = Plane::new(16, 16, BitDepth::Eight).unwrap();
    flat.fill(123);
    let set = AlfFilterSet::random(99, 2);
    let mut out = Plane::new(16, 16, BitDepth::Eight).unwrap();
    alf_filter_block_luma(
        &flat,
        &mut out,
        BlockRect::new(8, 8, 4, 4),
        &set.luma[7],
        clip,
    )
    .unwrap();
    assert!(out
        .read_rect(BlockRect::new(8, 8, 4, 4))
        .unwrap()
        .iter()
        .all(|&s| s == 123));
}

#[test]
fn block_filters_match_naive_diamond_oracle() {
    let mut rng = SplitMix64::new(0xD1A);
    for depth in [BitDepth::Eight, BitDepth::Ten] {
        let clip = default_clip_table(depth);
        for trial in 0..300 {
            let src = Plane::random(12, 12, depth, rng.next_u64()).unwrap();
            let set = AlfFilterSet::random(rng.next_u64(), 1);
            let block = BlockRect::new(4 * rng.below(3) as usize, 4 * rng.below(3) as usize, 4, 4);

            let f = set.luma[rng.below(25) as usize];
            let mut dst = src.clone();
            alf_filter_block_luma(&src, &mut dst, block, &f, clip).unwrap();
            let rf = resolve_luma(&f, clip);
            for y in block.y..block.y + 4 {
                for x in block.x..block.x + 4 {
                    let want = naive_filter_sample(&src, x, y, &rf.coeff, &rf.clip, &LUMA_OFFSETS);
                    assert_eq!(dst.get(x, y), want, "luma trial {trial} at ({x},{y})");
                }
            }

            let cf = set.chroma[0];
            let mut dst = src.clone();
            alf_filter_block_chroma(&src, &mut dst, block, &cf, clip).unwrap();
            let rcf = resolve_chroma(&cf, clip);
            for y in block.y..block.y + 4 {
                for x in block.x..block.x + 4 {
                    let want =
                        naive_filter_sample(&src, x, y, &rcf.coeff, &rcf.clip, &CHROMA_OFFSETS);
                    assert_eq!(dst.get(x, y), want, "chroma trial {trial} at ({x},{y})");
                }
            }
        }
    }
}

#[test]
fn filtering_is_local() {
    // Mutating any source sample more than 3 (luma) / 2 (chroma) positions
    // from the block never changes that block's output.
    let clip = default_clip_table(BitDepth::Eight);
    let set = AlfFilterSet::random(0xBEEF, 1);
    let src = Plane::random(20, 20, BitDepth::Eight, 1).unwrap();
    let block = BlockRect::new(8, 8, 4, 4);

    let mut base = src.clone();
    alf_filter_block_luma(&src, &mut base, block, &set.luma[3], clip).unwrap();
    let baseline = base.read_rect(block).unwrap();

    let mut far = src.clone();
    for &(x, y) in &[
        (4usize, 4usize),
        (15, 8),
        (8, 15),
        (0, 0),
        (19, 19),
        (4, 11),
    ] {
        far.set(x, y, far.get(x, y) ^ 0x55);
    }
    let mut out = src.clone();
    alf_filter_block_luma(&far, &mut out, block, &set.luma[3], clip).unwrap();
    assert_eq!(out.read_rect(block).unwrap(), baseline);

    // A sample within radius 3 does change the output.
    let mut near = src.clone();
    near.set(7, 8, near.get(7, 8) ^ 0x7F);
    let mut out2 = src.clone();
    alf_filter_block_luma(&near, &mut out2, block, &set.luma[3], clip).unwrap();
    assert_ne!(out2.read_rect(block).unwrap(), baseline);
}

#[test]
fn plane_filter_disabled_and_zero_sets_copy_through() {
    let src = Plane::random(40, 24, BitDepth::Eight, 9).unwrap();
    let set = AlfFilterSet::random(10, 3);

    let mut dst = Plane::new(40, 24, BitDepth::Eight).unwrap();
    let grid = CtuGrid::new(40, 24, 16).unwrap();
    let disabled = vec![false; grid.cols * grid.rows];
    alf_filter_plane(&src, &mut dst, &set, AlfComponent::Luma, &disabled, 16).unwrap();
    assert_eq!(plane_hash(&dst), plane_hash(&src));

    let mut dst = Plane::new(40, 24, BitDepth::Eight).unwrap();
    let enabled = vec![true; grid.cols * grid.rows];
    alf_filter_plane(
        &src,
        &mut dst,
        &AlfFilterSet::zero(),
        AlfComponent::Luma,
        &enabled,
        16,
    )
    .unwrap();
    assert_eq!(plane_hash(&dst), plane_hash(&src));

    // Mismatched enable-map length is a contract violation.
    assert!(matches!(
        alf_filter_plane(
            &src,
            &mut dst.clone(),
            &set,
            AlfComponent::Luma,
            &[true],
            16
        ),
        Err(Error::Contract(_))
    ));
}

#[test]
fn plane_filter_equals_per_block_composition() {
    let mut rng = SplitMix64::new(0xC0FFEE);
    for depth in [BitDepth::Eight, BitDepth::Ten] {
        let src = Plane::random(128, 128, depth, rng.next_u64()).unwrap();
        let set = AlfFilterSet::random(rng.next_u64(), 4);
        let clip = set.clip_table(depth);
        let grid = CtuGrid::new(128, 128, 64).unwrap();
        let mut enable = vec![true; grid.cols * grid.rows];
        enable[1] = false;

        let mut got = Plane::new(128, 128, depth).unwrap();
        alf_filter_plane(&src, &mut got, &set, AlfComponent::Luma, &enable, 64).unwrap();

        // Scalar composition oracle: classify, transpose, filter per block.
        let mut want = Plane::new(128, 128, depth).unwrap();
        for cy in 0..grid.rows {
            for cx in 0..grid.cols {
                let rect = grid.rect(cx, cy, 128, 128);
                if !enable[cy * grid.cols + cx] {
                    want.copy_rect_from(&src, rect).unwrap();
                    continue;
                }
                for by in (rect.y..rect.y + rect.h).step_by(4) {
                    for bx in (rect.x..rect.x + rect.w).step_by(4) {
                        let cls = alf_classify_4x4(&src, BlockRect::new(bx, by, 4, 4)).unwrap();
                        let f = alf_transpose_luma(
                            &set.luma[cls.class_idx as usize],
                            cls.transpose_idx,
                        );
                        alf_filter_block_luma(
                            &src,
                            &mut want,
                            BlockRect::new(bx, by, 4, 4),
                            &f,
                            clip,
                        )
                        .unwrap();
                    }
                }
            }
        }
        assert_eq!(plane_hash(&got), plane_hash(&want), "{depth:?}");

        // Chroma path: single filter, no classification.
        let mut gotc = Plane::new(128, 128, depth).unwrap();
        alf_filter_plane(&src, &mut gotc, &set, AlfComponent::Chroma, &enable, 64).unwrap();
        let mut wantc = Plane::new(128, 128, depth).unwrap();
        for cy in 0..grid.rows {
            for cx in 0..grid.cols {
                let rect = grid.rect(cx, cy, 128, 128);
                if !enable[cy * grid.cols + cx] {
                    wantc.copy_rect_from(&src, rect).unwrap();
                    continue;
                }
                for by in (rect.y..rect.y + rect.h).step_by(4) {
                    for bx in (rect.x..rect.x + rect.w).step_by(4) {
                        alf_filter_block_chroma(
                            &src,
                            &mut wantc,
                            BlockRect::new(bx, by, 4, 4),
                            &set.chroma[0],
                            clip,
                        )
                        .unwrap();
                    }
                }
            }
        }
        assert_eq!(plane_hash(&gotc), plane_hash(&wantc), "chroma {depth:?}");
    }
}

#[test]
fn region_kernels_match_scalar_reference() {
    let have_sse41 = is_x86_feature_detected!("sse4.1");
    let have_avx2 = is_x86_feature_detected!("avx2");
    let mut rng = SplitMix64::new(0x51D);
    for depth in [BitDepth::Eight, BitDepth::Ten] {
        let clip = default_clip_table(depth);
        for trial in 0..150 {
            let pw = 4 + 4 * rng.below(12) as usize;
            let ph = 4 + 4 * rng.below(8) as usize;
            let src = Plane::random(pw, ph, depth, rng.next_u64()).unwrap();
            let bw = 1 + rng.below((pw / 4) as u64) as usize;
            let bh = 1 + rng.below((ph / 4) as u64) as usize;
            let bx = 4 * rng.below((pw / 4 - bw + 1) as u64) as usize;
            let by = 4 * rng.below((ph / 4 - bh + 1) as u64) as usize;
            let region = BlockRect::new(bx, by, 4 * bw, 4 * bh);
            let set = AlfFilterSet::random(rng.next_u64(), 1);

            let mut want_cls = vec![AlfClassification::PLAIN; bw * bh];
            classify_region_scalar(&src, region, &mut want_cls);
            if have_sse41 {
                let mut got = vec![AlfClassification::PLAIN; bw * bh];
                unsafe { sse41::classify_region(&src, region, &mut got) };
                assert_eq!(got, want_cls, "classify trial {trial} {depth:?}");
            }

            let filters: Vec<ResolvedLumaFilter> = (0..bw * bh)
                .map(|_| resolve_luma(&set.luma[rng.below(25) as usize], clip))
                .collect();
            let mut want = vec![0u16; region.area()];
            filter_region_luma_scalar(&src, region, &filters, &mut want);
            if have_sse41 {
                let mut got = vec![0u16; region.area()];
                unsafe { sse41::filter_region_luma(&src, region, &filters, &mut got) };
                assert_eq!(got, want, "sse41 luma trial {trial} {depth:?}");
            }
            if have_avx2 {
                let mut got = vec![0u16; region.area()];
                unsafe { avx2::filter_region_luma(&src, region, &filters, &mut got) };
                assert_eq!(got, want, "avx2 luma trial {trial} {depth:?}");
            }

            let cf = resolve_chroma(&set.chroma[0], clip);
            let mut wantc = vec![0u16; region.area()];
            filter_region_chroma_scalar(&src, region, &cf, &mut wantc);
            if have_sse41 {
                let mut got = vec![0u16; region.area()];
                unsafe { sse41::filter_region_chroma(&src, region, &cf, &mut got) };
                assert_eq!(got, wantc, "sse41 chroma trial {trial} {depth:?}");
            }
            if have_avx2 {
                let mut got = vec![0u16; region.area()];
                unsafe { avx2::filter_region_chroma(&src, region, &cf, &mut got) };
                assert_eq!(got, wantc, "avx2 chroma trial {trial} {depth:?}");
            }
        }
    }
}

#[test]
fn filter_set_text_round_trip_and_validation() {
    let set = AlfFilterSet::random(42, 3);
    let text = set.to_text();
    let parsed = AlfFilterSet::from_text(&text).unwrap();
    assert_eq!(parsed, set);

    assert!(AlfFilterSet::from_text("1 2 3 ; 0 0 0\n").is_err());
    let bad = text.replacen("; ", "; 9 ", 1); // clip index out of range
    assert!(AlfFilterSet::from_text(&bad).is_err());
    let short: String = text.lines().take(25).collect::<Vec<_>>().join("\n");
    assert!(
        AlfFilterSet::from_text(&short).is_err(),
        "chroma row required"
    );
}

#[test]
fn default_clip_tables() {
    assert_eq!(default_clip_table(BitDepth::Eight), [128, 32, 8, 2]);
    assert_eq!(default_clip_table(BitDepth::Ten), [512, 128, 32, 8]);
    let set = AlfFilterSet::random(1, 1);
    assert!(set
        .clone()
        .with_clip_table(BitDepth::Eight, [128, 128, 8, 2])
        .is_err());
}

#[test]
fn registry_plane_filter_matches_scalar_spec_op() {
    use crate::dispatch::{build_registry, detect_capabilities, VariantTier};
    let mut tiers = vec![VariantTier::Scalar];
    let caps = detect_capabilities();
    if caps.highest() > VariantTier::Scalar {
        tiers.push(caps.highest());
    }
    for depth in [BitDepth::Eight, BitDepth::Ten] {
        let src = Plane::random(180, 100, depth, 3).unwrap();
        let set = AlfFilterSet::random(4, 3);
        let grid = CtuGrid::new(180, 100, 48).unwrap();
        let mut enable = vec![true; grid.cols * grid.rows];
        enable[2] = false;
        for component in [AlfComponent::Luma, AlfComponent::Chroma] {
            let mut want = Plane::new(180, 100, depth).unwrap();
            alf_filter_plane(&src, &mut want, &set, component, &enable, 48).unwrap();
            for &tier in &tiers {
                let table = build_registry(Some(tier)).unwrap();
                let mut got = Plane::new(180, 100, depth).unwrap();
                alf_filter_plane_with(&table, &src, &mut got, &set, component, &enable, 48)
                    .unwrap();
                assert_eq!(
                    plane_hash(&got),
                    plane_hash(&want),
                    "{component:?} at {tier:?} {depth:?}"
                );
            }
        }
    }
}
