use quadtower::tower::{classify_from_quadratic_extensions, group_profile, ExtensionData, GroupShape, TwoGroupType};

fn all_types() -> Vec<TwoGroupType> {
    let mut v = vec![TwoGroupType::V4];
    for m in 3..=5 {
        v.push(TwoGroupType::Quaternion(m));
        v.push(TwoGroupType::Dihedral(m));
    }
    v.push(TwoGroupType::SemiDihedral(4));
    v.push(TwoGroupType::SemiDihedral(5));
    v
}

#[test]
fn three_index_two_subgroups_and_cyclic_commutator() {
    for g in all_types() {
        let prof = group_profile(g).unwrap();
        assert_eq!(prof.order, g.order());
        assert_eq!(prof.index_two_subgroups, 3, "{g}");
        assert!(prof.commutator_is_x_squared, "{g}");
        assert!(prof.commutator_is_cyclic, "{g}");
        // H3 = <x> is cyclic in every case
        assert!(prof.h[2].is_cyclic, "{g}");
        for h in &prof.h {
            assert_eq!(h.order * 2, prof.order);
        }
    }
}

#[test]
fn v4_and_q8_have_only_cyclic_maximal_subgroups() {
    let v = group_profile(TwoGroupType::V4).unwrap();
    assert!(v.h.iter().all(|h| h.is_cyclic && h.order == 2));
    let q = group_profile(TwoGroupType::Quaternion(3)).unwrap();
    assert!(q.h.iter().all(|h| h.is_cyclic && h.order == 4));
}

#[test]
fn d8_has_exactly_one_cyclic_maximal_subgroup() {
    let d = group_profile(TwoGroupType::Dihedral(3)).unwrap();
    assert_eq!(d.h.iter().filter(|h| h.is_cyclic).count(), 1);
    assert_eq!(d.h[0].shape, GroupShape::Klein);
    assert_eq!(d.h[1].shape, GroupShape::Klein);
    assert_eq!(d.h[0].abelianization, vec![2, 2]);
}

#[test]
fn larger_groups_follow_the_pattern_table() {
    for m in 4..=5u32 {
        let half = 1u64 << (m - 1);
        let q = group_profile(TwoGroupType::Quaternion(m)).unwrap();
        assert_eq!(q.h[0].shape, GroupShape::Quaternion(half));
        assert_eq!(q.h[1].shape, GroupShape::Quaternion(half));
        let d = group_profile(TwoGroupType::Dihedral(m)).unwrap();
        assert_eq!(d.h[0].shape, GroupShape::Dihedral(half));
        assert_eq!(d.h[1].shape, GroupShape::Dihedral(half));
        let sd = group_profile(TwoGroupType::SemiDihedral(m)).unwrap();
        assert_eq!(sd.h[0].shape, GroupShape::Quaternion(half));
        assert_eq!(sd.h[1].shape, GroupShape::Dihedral(half));
        for prof in [q, d, sd] {
            assert_eq!(prof.h[2].shape, GroupShape::Cyclic(half));
            // the two non-cyclic maximal subgroups have abelianization (2, 2)
            assert_eq!(prof.h[0].abelianization, vec![2, 2]);
            assert_eq!(prof.h[1].abelianization, vec![2, 2]);
        }
    }
}

#[test]
fn classifier_agrees_with_group_profiles() {
    for g in [TwoGroupType::V4, TwoGroupType::Quaternion(3), TwoGroupType::Dihedral(3)] {
        let prof = group_profile(g).unwrap();
        let data = prof.h.clone().map(|h| ExtensionData::new(h.abelianization.iter().product(), h.is_cyclic));
        assert_eq!(classify_from_quadratic_extensions(data[0], data[1], data[2]).unwrap(), g);
    }
    for g in [TwoGroupType::Quaternion(4), TwoGroupType::Dihedral(4), TwoGroupType::SemiDihedral(4)] {
        let prof = group_profile(g).unwrap();
        let data = prof.h.clone().map(|h| ExtensionData::new(h.abelianization.iter().product(), h.is_cyclic));
        assert!(classify_from_quadratic_extensions(data[0], data[1], data[2]).is_err(), "{g}");
    }
}
