//! 0-1 knapsack: the source problem of the star reduction.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::instance::{json_number, read_u64};

/// Limit on `items * capacity` for [`solve_knapsack`].
pub const DP_BUDGET: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Item {
    /// Weight `c_i`; must be at least 1.
    pub weight: u64,
    /// Value `a_i`.
    pub value: u64,
}

/// Items, a capacity `C` and a goal `A`. The question is whether some
/// subset fits in `C` and has total value strictly above `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KnapsackInstance {
    pub items: Vec<Item>,
    pub capacity: u64,
    pub goal: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnapsackSolution {
    pub best_value: u64,
    /// `best_value > goal`.
    pub yes: bool,
    /// Item indices achieving `best_value`.
    pub witness: Vec<usize>,
}

impl KnapsackInstance {
    pub fn new(items: Vec<Item>, capacity: u64, goal: u64) -> Result<Self> {
        let k = KnapsackInstance {
            items,
            capacity,
            goal,
        };
        k.validate()?;
        Ok(k)
    }

    /// From `(weight, value)` pairs.
    pub fn from_pairs(items: &[(u64, u64)], capacity: u64, goal: u64) -> Result<Self> {
        let items = items
            .iter()
            .map(|&(weight, value)| Item { weight, value })
            .collect();
        Self::new(items, capacity, goal)
    }

    pub fn validate(&self) -> Result<()> {
        match self.items.iter().position(|it| it.weight == 0) {
            Some(i) => Err(Error::ZeroItemWeight(i)),
            None => Ok(()),
        }
    }

    /// Reads `{"items": [{"c": .., "a": ..}], "C": .., "A": ..}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::format("knapsack", "expected an object"))?;
        if let Some(k) = obj
            .keys()
            .find(|k| !["items", "C", "A"].contains(&k.as_str()))
        {
            return Err(Error::format("knapsack", format!("unknown field `{k}`")));
        }
        let get = |key: &str| {
            obj.get(key)
                .ok_or_else(|| Error::format("knapsack", format!("missing field `{key}`")))
        };
        let items = get("items")?
            .as_array()
            .ok_or_else(|| Error::format("items", "expected an array"))?
            .iter()
            .enumerate()
            .map(|(i, it)| {
                let loc = format!("items[{i}]");
                let o = it
                    .as_object()
                    .ok_or_else(|| Error::format(&loc, "expected an object"))?;
                if let Some(k) = o.keys().find(|k| !["c", "a"].contains(&k.as_str())) {
                    return Err(Error::format(&loc, format!("unknown field `{k}`")));
                }
                let field = |key: &str| {
                    o.get(key)
                        .ok_or_else(|| Error::format(&loc, format!("missing field `{key}`")))
                        .and_then(|x| read_u64(x, &format!("{loc}.{key}")))
                };
                let weight = field("c")?;
                if weight == 0 {
                    return Err(Error::format(
                        format!("{loc}.c"),
                        "item weight must be at least 1",
                    ));
                }
                Ok(Item {
                    weight,
                    value: field("a")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let capacity = read_u64(get("C")?, "C")?;
        let goal = read_u64(get("A")?, "A")?;
        Self::new(items, capacity, goal)
    }

    pub fn to_json(&self) -> Value {
        let items = self
            .items
            .iter()
            .map(|it| {
                let mut o = Map::new();
                o.insert("c".into(), json_number(it.weight.to_string()));
                o.insert("a".into(), json_number(it.value.to_string()));
                Value::Object(o)
            })
            .collect();
        let mut obj = Map::new();
        obj.insert("items".into(), Value::Array(items));
        obj.insert("C".into(), json_number(self.capacity.to_string()));
        obj.insert("A".into(), json_number(self.goal.to_string()));
        Value::Object(obj)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| {
            Error::format(
                format!("line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        Self::from_json(&v)
    }

    pub fn serialize(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }
}

/// Exact dynamic program over capacities.
pub fn solve_knapsack(k: &KnapsackInstance) -> Result<KnapsackSolution> {
    k.validate()?;
    let n = k.items.len();
    let cells = n as u128 * k.capacity as u128;
    if cells > DP_BUDGET {
        return Err(Error::guard("items x capacity", cells, DP_BUDGET));
    }
    let width = k.capacity as usize + 1;
    // best[c]: best value within capacity c using the items seen so far.
    let mut best = vec![0u64; width];
    let mut took = vec![false; n * width];
    for (i, item) in k.items.iter().enumerate() {
        let w = item.weight as usize;
        for c in (w..width).rev() {
            let with = best[c - w] + item.value;
            if with > best[c] {
                best[c] = with;
                took[i * width + c] = true;
            }
        }
    }
    let mut witness = Vec::new();
    let mut c = k.capacity as usize;
    for i in (0..n).rev() {
        if took[i * width + c] {
            witness.push(i);
            c -= k.items[i].weight as usize;
        }
    }
    witness.reverse();
    let best_value = best[width - 1];
    Ok(KnapsackSolution {
        best_value,
        yes: best_value > k.goal,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enumerate(k: &KnapsackInstance) -> u64 {
        (0..1u32 << k.items.len())
            .filter_map(|mask| {
                let chosen = k
                    .items
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1);
                let (w, v) = chosen.fold((0, 0), |(w, v), (_, it)| (w + it.weight, v + it.value));
                (w <= k.capacity).then_some(v)
            })
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn worked_examples() {
        let no = KnapsackInstance::from_pairs(&[(2, 3), (1, 4)], 2, 5).unwrap();
        assert_eq!(enumerate(&no), 4);
        let s = solve_knapsack(&no).unwrap();
        assert_eq!((s.best_value, s.yes), (4, false));

        let yes = KnapsackInstance::from_pairs(&[(2, 3), (1, 4)], 2, 3).unwrap();
        let s = solve_knapsack(&yes).unwrap();
        assert_eq!((s.best_value, s.yes), (4, true));
        assert_eq!(s.witness, [1]);
    }

    #[test]
    fn zero_capacity() {
        for goal in [0, 1] {
            let k = KnapsackInstance::from_pairs(&[(1, 5), (2, 7)], 0, goal).unwrap();
            let s = solve_knapsack(&k).unwrap();
            assert_eq!(s.best_value, 0);
            assert!(!s.yes);
            assert!(s.witness.is_empty());
        }
    }

    #[test]
    fn strict_goal() {
        let k = KnapsackInstance::from_pairs(&[(1, 4)], 1, 4).unwrap();
        assert!(!solve_knapsack(&k).unwrap().yes);
    }

    #[test]
    fn rejects_zero_weight_and_budget() {
        assert_eq!(
            KnapsackInstance::from_pairs(&[(1, 1), (0, 2)], 3, 0),
            Err(Error::ZeroItemWeight(1))
        );
        let huge = KnapsackInstance::from_pairs(&[(1, 1), (1, 1)], 6_000_000, 0).unwrap();
        assert!(matches!(solve_knapsack(&huge), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn file_format() {
        let k = KnapsackInstance::parse(
            r#"{"items": [{"c": 2, "a": 3}, {"c": 1, "a": 4}], "C": 2, "A": 3}"#,
        )
        .unwrap();
        assert_eq!(
            k,
            KnapsackInstance::from_pairs(&[(2, 3), (1, 4)], 2, 3).unwrap()
        );
        assert_eq!(KnapsackInstance::parse(&k.serialize()).unwrap(), k);
        assert!(
            KnapsackInstance::parse(r#"{"items": [{"c": 0, "a": 3}], "C": 2, "A": 3}"#).is_err()
        );
        assert!(KnapsackInstance::parse(r#"{"items": [], "C": 2}"#).is_err());
    }

    proptest::proptest! {
        #[test]
        fn dp_matches_enumeration(
            items in proptest::collection::vec((1u64..=6, 0u64..=9), 0..=12),
            capacity in 0u64..=20,
            goal in 0u64..=30,
        ) {
            let k = KnapsackInstance::from_pairs(&items, capacity, goal).unwrap();
            let s = solve_knapsack(&k).unwrap();
            proptest::prop_assert_eq!(s.best_value, enumerate(&k));
            proptest::prop_assert_eq!(s.yes, s.best_value > goal);
            let w: u64 = s.witness.iter().map(|&i| k.items[i].weight).sum();
            let v: u64 = s.witness.iter().map(|&i| k.items[i].value).sum();
            proptest::prop_assert!(w <= capacity);
            proptest::prop_assert_eq!(v, s.best_value);
        }
    }
}
