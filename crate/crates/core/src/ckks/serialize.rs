//! Binary container for parameters and key material.
//!
//! Layout: 4 magic bytes `SFHE`, a little-endian `u16` version, a `u8`
//! record kind, then the record. Every integer is little-endian; polynomials
//! are written as `u32` limb count, `u32` degree and raw `u64` residues.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::keys::{KeyBundle, KeySwitchKey, PublicKey, SecretKey};
use super::params::CkksParams;
use super::poly::RnsPoly;
use crate::{Error, Result};

pub const MAGIC: [u8; 4] = *b"SFHE";
pub const VERSION: u16 = 1;

const KIND_PARAMS: u8 = 1;
const KIND_KEYS: u8 = 2;

// guards against absurd allocations when reading corrupt input
const MAX_DEGREE: u32 = 1 << 17;
const MAX_LIMBS: u32 = 64;

fn put_u8(w: &mut impl Write, v: u8) -> Result<()> {
    Ok(w.write_all(&[v])?)
}
fn put_u16(w: &mut impl Write, v: u16) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}
fn put_u32(w: &mut impl Write, v: u32) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}
fn put_u64(w: &mut impl Write, v: u64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn get_u8(r: &mut impl Read) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}
fn get_u16(r: &mut impl Read) -> Result<u16> {
    let mut b = [0u8; 2];
    r.read_exact(&mut b)?;
    Ok(u16::from_le_bytes(b))
}
fn get_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}
fn get_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn write_header(w: &mut impl Write, kind: u8) -> Result<()> {
    w.write_all(&MAGIC)?;
    put_u16(w, VERSION)?;
    put_u8(w, kind)
}

fn read_header(r: &mut impl Read, expected: u8) -> Result<()> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(Error::Serialization("bad magic bytes".into()));
    }
    let version = get_u16(r)?;
    if version != VERSION {
        return Err(Error::Serialization(format!(
            "unsupported version {version}"
        )));
    }
    let kind = get_u8(r)?;
    if kind != expected {
        return Err(Error::Serialization(format!(
            "expected record kind {expected}, found {kind}"
        )));
    }
    Ok(())
}

fn write_params_body(w: &mut impl Write, p: &CkksParams) -> Result<()> {
    put_u64(w, p.ring_degree as u64)?;
    put_u32(w, p.scale_bits)?;
    put_u64(w, p.seed)?;
    put_u32(w, p.modulus_chain.len() as u32)?;
    for &q in &p.modulus_chain {
        put_u64(w, q)?;
    }
    put_u64(w, p.aux_modulus)
}

fn read_params_body(r: &mut impl Read) -> Result<CkksParams> {
    let ring_degree = get_u64(r)? as usize;
    let scale_bits = get_u32(r)?;
    let seed = get_u64(r)?;
    let len = get_u32(r)?;
    if len > MAX_LIMBS {
        return Err(Error::Serialization(format!(
            "modulus chain of length {len}"
        )));
    }
    let modulus_chain = (0..len).map(|_| get_u64(r)).collect::<Result<Vec<_>>>()?;
    let aux_modulus = get_u64(r)?;
    let p = CkksParams {
        ring_degree,
        modulus_chain,
        aux_modulus,
        scale_bits,
        seed,
    };
    p.validate()?;
    Ok(p)
}

fn write_poly(w: &mut impl Write, p: &RnsPoly) -> Result<()> {
    put_u32(w, p.num_limbs() as u32)?;
    put_u32(w, p.degree() as u32)?;
    let mut buf = Vec::with_capacity(p.degree() * 8);
    for limb in p.limbs() {
        buf.clear();
        for &x in limb {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn read_poly(r: &mut impl Read) -> Result<RnsPoly> {
    let limbs = get_u32(r)?;
    let degree = get_u32(r)?;
    if limbs > MAX_LIMBS || degree > MAX_DEGREE {
        return Err(Error::Serialization(format!(
            "polynomial of {limbs} limbs x {degree} coefficients"
        )));
    }
    let mut buf = vec![0u8; degree as usize * 8];
    let limbs = (0..limbs)
        .map(|_| {
            r.read_exact(&mut buf)?;
            Ok(buf
                .chunks_exact(8)
                .map(|c| u64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect())
        })
        .collect::<Result<Vec<Vec<u64>>>>()?;
    Ok(RnsPoly::from_limbs(limbs))
}

fn write_ksk(w: &mut impl Write, k: &KeySwitchKey) -> Result<()> {
    put_u32(w, k.digits.len() as u32)?;
    for (b, a) in &k.digits {
        write_poly(w, b)?;
        write_poly(w, a)?;
    }
    Ok(())
}

fn read_ksk(r: &mut impl Read) -> Result<KeySwitchKey> {
    let n = get_u32(r)?;
    if n > MAX_LIMBS {
        return Err(Error::Serialization(format!("{n} key-switching digits")));
    }
    let digits = (0..n)
        .map(|_| Ok((read_poly(r)?, read_poly(r)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(KeySwitchKey { digits })
}

pub fn write_params(w: &mut impl Write, params: &CkksParams) -> Result<()> {
    write_header(w, KIND_PARAMS)?;
    write_params_body(w, params)
}

pub fn read_params(r: &mut impl Read) -> Result<CkksParams> {
    read_header(r, KIND_PARAMS)?;
    read_params_body(r)
}

/// Writes the parameters followed by every key in the bundle.
pub fn write_keys(w: &mut impl Write, params: &CkksParams, keys: &KeyBundle) -> Result<()> {
    write_header(w, KIND_KEYS)?;
    write_params_body(w, params)?;
    let sk = &keys.secret_key;
    put_u32(w, sk.coeffs.len() as u32)?;
    w.write_all(&sk.coeffs.iter().map(|&c| c as u8).collect::<Vec<_>>())?;
    write_poly(w, &sk.ntt)?;
    write_poly(w, &keys.public_key.b)?;
    write_poly(w, &keys.public_key.a)?;
    match &keys.relin_key {
        Some(k) => {
            put_u8(w, 1)?;
            write_ksk(w, k)?;
        }
        None => put_u8(w, 0)?,
    }
    put_u32(w, keys.galois_keys.len() as u32)?;
    for (&step, k) in &keys.galois_keys {
        put_u64(w, step as u64)?;
        write_ksk(w, k)?;
    }
    Ok(())
}

pub fn read_keys(r: &mut impl Read) -> Result<(CkksParams, KeyBundle)> {
    read_header(r, KIND_KEYS)?;
    let params = read_params_body(r)?;
    let n = get_u32(r)?;
    if n as usize != params.ring_degree {
        return Err(Error::Serialization(
            "secret key length differs from ring degree".into(),
        ));
    }
    let mut raw = vec![0u8; n as usize];
    r.read_exact(&mut raw)?;
    let coeffs = raw.into_iter().map(|b| b as i8).collect();
    let secret_key = SecretKey {
        coeffs,
        ntt: read_poly(r)?,
    };
    let public_key = PublicKey {
        b: read_poly(r)?,
        a: read_poly(r)?,
    };
    let relin_key = match get_u8(r)? {
        0 => None,
        1 => Some(read_ksk(r)?),
        t => return Err(Error::Serialization(format!("bad relinearization tag {t}"))),
    };
    let count = get_u32(r)?;
    let mut galois_keys = BTreeMap::new();
    for _ in 0..count {
        let step = get_u64(r)? as usize;
        galois_keys.insert(step, read_ksk(r)?);
    }
    Ok((
        params,
        KeyBundle {
            secret_key,
            public_key,
            relin_key,
            galois_keys,
        },
    ))
}
