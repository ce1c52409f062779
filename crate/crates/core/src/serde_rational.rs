//! Serde helpers writing rationals as `"p/q"` strings.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::prob::{parse_rational, Rational};

fn parse<E: serde::de::Error>(s: &str) -> Result<Rational, E> {
    parse_rational(s).map_err(E::custom)
}

pub mod one {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        parse(&String::deserialize(d)?)
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|x| parse(x))
            .collect()
    }
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        Vec::<Vec<String>>::deserialize(d)?
            .iter()
            .map(|row| row.iter().map(|x| parse(x)).collect())
            .collect()
    }
}

pub mod pairs {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[(Rational, Rational)], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|(a, b)| [a.to_string(), b.to_string()])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Vec<(Rational, Rational)>, D::Error> {
        Vec::<[String; 2]>::deserialize(d)?
            .iter()
            .map(|[a, b]| Ok((parse(a)?, parse(b)?)))
            .collect::<Result<_, D::Error>>()
            .map_err(|e: D::Error| D::Error::custom(e))
    }
}
