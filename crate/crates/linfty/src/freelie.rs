//! Baker-Campbell-Hausdorff data computed exactly in a truncated free
//! tensor algebra on two generators, then projected to nested brackets.

use crate::scalar::{sv_add_term, Q};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Element of the tensor algebra on letters 0 and 1, truncated above
/// word length `n`; the empty word is the unit.
type Tensor = BTreeMap<Vec<u8>, Q>;

fn tensor_mul(a: &Tensor, b: &Tensor, n: usize) -> Tensor {
    let mut out = Tensor::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > n {
                continue;
            }
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            sv_add_term(&mut out, w, ca * cb);
        }
    }
    out
}

fn tensor_axpy(dst: &mut Tensor, c: &Q, src: &Tensor) {
    for (w, s) in src {
        sv_add_term(dst, w.clone(), c * s);
    }
}

/// exp of a constant-free element, truncated.
fn tensor_exp(x: &Tensor, n: usize) -> Tensor {
    let mut out = Tensor::from([(Vec::new(), Q::one())]);
    let mut power = Tensor::from([(Vec::new(), Q::one())]);
    let mut factorial = Q::one();
    for i in 1..=n {
        power = tensor_mul(&power, x, n);
        factorial *= Q::from_integer(i.into());
        tensor_axpy(&mut out, &(Q::one() / &factorial), &power);
    }
    out
}

/// log of an element with constant term 1, truncated.
fn tensor_log(u: &Tensor, n: usize) -> Tensor {
    let mut y = u.clone();
    y.remove(&Vec::new());
    let mut out = Tensor::new();
    let mut power = Tensor::from([(Vec::new(), Q::one())]);
    for i in 1..=n {
        power = tensor_mul(&power, &y, n);
        let sign = if i % 2 == 1 { Q::one() } else { -Q::one() };
        tensor_axpy(&mut out, &(sign / Q::from_integer(i.into())), &power);
    }
    out
}

/// The Baker-Campbell-Hausdorff element log(e^A e^B) up to weight `n`,
/// written as right-nested brackets: each entry (letters, c) stands for
/// c · [x_{letters[0]}, [x_{letters[1]}, [..., x_{letters[m-1]}]...]],
/// with letter 0 = A and letter 1 = B. Words of length 1 are bare letters.
pub type BchTable = Vec<(Vec<u8>, Q)>;

/// Expand a right-nested bracket word into the tensor algebra.
fn nested_to_tensor(word: &[u8], n: usize) -> Tensor {
    let last = word[word.len() - 1];
    let mut acc = Tensor::from([(vec![last], Q::one())]);
    for &l in word[..word.len() - 1].iter().rev() {
        let gen = Tensor::from([(vec![l], Q::one())]);
        let left = tensor_mul(&gen, &acc, n);
        let right = tensor_mul(&acc, &gen, n);
        let mut bracket = left;
        tensor_axpy(&mut bracket, &-Q::one(), &right);
        acc = bracket;
    }
    acc
}

/// Compute the table for weight ≤ n. The homogeneous weight-m part of
/// log(e^A e^B) is a Lie element, so the left-to-right bracketing map
/// divided by m fixes it; the result is verified against the tensor
/// expansion before being returned.
fn compute_bch(n: usize) -> BchTable {
    let a = Tensor::from([(vec![0u8], Q::one())]);
    let b = Tensor::from([(vec![1u8], Q::one())]);
    let product = tensor_mul(&tensor_exp(&a, n), &tensor_exp(&b, n), n);
    let series = tensor_log(&product, n);
    let mut table = BchTable::new();
    let mut check = Tensor::new();
    for (w, c) in &series {
        let m = w.len();
        let coeff = c / Q::from_integer((m as i64).into());
        tensor_axpy(&mut check, &coeff, &nested_to_tensor(w, n));
        table.push((w.clone(), coeff));
    }
    assert_eq!(check, series, "bracketing projection must reproduce the series");
    table.retain(|(_, c)| !c.is_zero());
    table
}

/// Cached access to the table for weight ≤ n.
pub fn bch_table(n: usize) -> Arc<BchTable> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, Arc<BchTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().expect("cache lock");
    guard.entry(n).or_insert_with(|| Arc::new(compute_bch(n))).clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qr;

    fn tensor_of_table(table: &BchTable, n: usize) -> Tensor {
        let mut out = Tensor::new();
        for (w, c) in table {
            tensor_axpy(&mut out, c, &nested_to_tensor(w, n));
        }
        out
    }

    #[test]
    fn low_weight_tensor_coefficients_are_classical() {
        // log(e^A e^B) = A + B + 1/2[A,B] + 1/12[A,[A,B]] - 1/12[B,[A,B]] + ...
        let t = tensor_of_table(&bch_table(3), 3);
        let q = |w: &[u8]| t.get(&w.to_vec()).cloned().unwrap_or_else(num_traits::Zero::zero);
        assert_eq!(q(&[0]), qr(1, 1));
        assert_eq!(q(&[1]), qr(1, 1));
        // 1/2(AB - BA)
        assert_eq!(q(&[0, 1]), qr(1, 2));
        assert_eq!(q(&[1, 0]), qr(-1, 2));
        // 1/12(AAB - 2ABA + BAA) - 1/12(2BAB - BBA - ABB)
        assert_eq!(q(&[0, 0, 1]), qr(1, 12));
        assert_eq!(q(&[0, 1, 0]), qr(-1, 6));
        assert_eq!(q(&[1, 0, 0]), qr(1, 12));
        assert_eq!(q(&[1, 0, 1]), qr(-1, 6));
        assert_eq!(q(&[0, 1, 1]), qr(1, 12));
        assert_eq!(q(&[1, 1, 0]), qr(1, 12));
    }

    #[test]
    fn weight_four_has_single_commutator_shape() {
        // The weight-4 part is -1/24 [B,[A,[A,B]]] up to Lie identities;
        // checked through the tensor expansion.
        let t4 = tensor_of_table(&bch_table(4), 4);
        let mut expected = tensor_of_table(&bch_table(3), 4);
        tensor_axpy(
            &mut expected,
            &qr(-1, 24),
            &nested_to_tensor(&[1, 0, 0, 1], 4),
        );
        assert_eq!(t4, expected);
    }

    #[test]
    fn table_is_cached() {
        let first = bch_table(5);
        let second = bch_table(5);
        assert!(Arc::ptr_eq(&first, &second));
    }
}
