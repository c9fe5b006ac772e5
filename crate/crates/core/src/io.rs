//! CT3 binary tensor container.
//!
//! Layout: the magic bytes `CT3\0`, three little-endian `u64` dims
//! `n1, n2, n3`, then `n1·n2·n3` little-endian IEEE-754 `f64` values in
//! slice-major, column-within-slice order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor3;

pub const CT3_MAGIC: [u8; 4] = *b"CT3\0";

pub fn write_ct3<T: Scalar, W: Write>(t: &Tensor3<T>, mut w: W) -> Result<()> {
    w.write_all(&CT3_MAGIC)?;
    for d in [t.n1(), t.n2(), t.n3()] {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    for &v in t.as_slice() {
        w.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    Ok(())
}

pub fn read_ct3<T: Scalar, R: Read>(mut r: R) -> Result<Tensor3<T>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if magic != CT3_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut dims = [0usize; 3];
    for d in &mut dims {
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf)
            .map_err(|_| Error::Format("truncated header".into()))?;
        *d = usize::try_from(u64::from_le_bytes(buf)).map_err(|_| Error::Format("dimension overflows usize".into()))?;
    }
    let [n1, n2, n3] = dims;
    let count = n1
        .checked_mul(n2)
        .and_then(|x| x.checked_mul(n3))
        .ok_or_else(|| Error::Format("dimension product overflows".into()))?;
    let mut data = Vec::with_capacity(count.min(1 << 24));
    let mut buf = [0u8; 8];
    for _ in 0..count {
        r.read_exact(&mut buf)
            .map_err(|_| Error::Format(format!("payload shorter than {count} values")))?;
        data.push(T::lit(f64::from_le_bytes(buf)));
    }
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    Tensor3::from_vec(n1, n2, n3, data)
}

pub fn save_ct3<T: Scalar>(t: &Tensor3<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_ct3(t, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_ct3<T: Scalar>(path: impl AsRef<Path>) -> Result<Tensor3<T>> {
    read_ct3(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let t = Tensor3::from_vec(1, 2, 1, vec![1.5, -2.0]).unwrap();
        let mut buf = Vec::new();
        write_ct3(&t, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"CT3\0");
        assert_eq!(u64::from_le_bytes(buf[4..12].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(buf[12..20].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[20..28].try_into().unwrap()), 1);
        assert_eq!(f64::from_le_bytes(buf[28..36].try_into().unwrap()), 1.5);
        assert_eq!(buf.len(), 28 + 16);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let t = Tensor3::from_vec(1, 1, 2, vec![1.0, 2.0]).unwrap();
        let mut buf = Vec::new();
        write_ct3(&t, &mut buf).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_ct3::<f64, _>(&bad[..]), Err(Error::Format(_))));

        let short = &buf[..buf.len() - 3];
        assert!(matches!(read_ct3::<f64, _>(short), Err(Error::Format(_))));

        let mut long = buf.clone();
        long.push(0);
        assert!(matches!(read_ct3::<f64, _>(&long[..]), Err(Error::Format(_))));
    }
}
