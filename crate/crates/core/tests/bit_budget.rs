use intesn_core::hd::{bits_per_element, HyperVector, PackedVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ceil_log2(m: u64) -> u32 {
    (0..64).find(|&b| (1u64 << b) >= m).unwrap()
}

#[test]
fn packed_size_is_exactly_n_times_bits_and_lossless() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for kappa in [3i64, 7, 11] {
        let bits = ceil_log2(2 * kappa as u64 + 1);
        assert_eq!(bits_per_element(kappa).unwrap(), bits);
        for n in [1usize, 7, 100, 300, 1000, 1201] {
            let elems: Vec<i16> = (0..n).map(|_| rng.random_range(-kappa..=kappa) as i16).collect();
            let v = HyperVector::bounded(elems.clone(), kappa as i16).unwrap();
            let p = PackedVector::from_hypervector(&v).unwrap();
            assert_eq!(p.bit_len(), n * bits as usize, "κ={kappa} N={n}");
            assert_eq!(p.as_bytes().len(), (n * bits as usize).div_ceil(8));
            assert_eq!(p.unpack().unwrap(), elems);
        }
    }
}

#[test]
fn saturated_extremes_survive_packing() {
    for kappa in [3i16, 7, 11] {
        let elems = vec![-kappa, kappa, 0, -kappa, kappa];
        let p = PackedVector::pack(&elems, kappa.into()).unwrap();
        assert_eq!(p.unpack().unwrap(), elems);
    }
}
