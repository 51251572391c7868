use serde::{Deserialize, Serialize};

use super::{Bid, GencoSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClearingResult {
    /// Uniform price paid to every dispatched MW, USD/MWh.
    pub clearing_price: f64,
    /// MW per generator.
    pub dispatch: Vec<f64>,
    /// `(clearing_price − marginal_cost)·dispatch − fixed_cost`, USD per generator.
    pub profit: Vec<f64>,
}

fn validate(bids: &[Bid], demand: f64, gencos: &[GencoSpec], price_cap: f64) -> Result<()> {
    if bids.is_empty() {
        return Err(Error::Argument("no bids to clear".into()));
    }
    if !(demand.is_finite() && demand >= 0.0) {
        return Err(Error::validation(
            "demand",
            format!("{demand} is not a non-negative MW value"),
        ));
    }
    let mut seen = vec![false; gencos.len()];
    for (i, bid) in bids.iter().enumerate() {
        let spec = gencos.get(bid.genco).ok_or_else(|| {
            Error::validation(
                format!("bids[{i}].genco"),
                format!("unknown generator {}", bid.genco),
            )
        })?;
        if std::mem::replace(&mut seen[bid.genco], true) {
            return Err(Error::validation(
                format!("bids[{i}].genco"),
                format!("generator {} already has a bid", bid.genco),
            ));
        }
        if !(bid.price.is_finite() && (0.0..=price_cap).contains(&bid.price)) {
            return Err(Error::validation(
                format!("bids[{i}].price"),
                format!("{} is outside [0, {price_cap}]", bid.price),
            ));
        }
        if !(bid.quantity.is_finite() && bid.quantity > 0.0 && bid.quantity <= spec.capacity) {
            return Err(Error::validation(
                format!("bids[{i}].quantity"),
                format!("{} is outside (0, {}]", bid.quantity, spec.capacity),
            ));
        }
    }
    Ok(())
}

/// Single-bus merit-order clearing with a uniform price.
///
/// Offers are dispatched cheapest first until demand is met. Offers that
/// tie at the marginal price share the residual demand in proportion to
/// their quantities. The price is that of the last dispatched offer, 0 when
/// there is no demand, and `price_cap` when demand exceeds all offers.
/// Generators without a bid are not dispatched but still pay fixed cost.
pub fn clear_uniform_price(
    bids: &[Bid],
    demand: f64,
    gencos: &[GencoSpec],
    price_cap: f64,
) -> Result<ClearingResult> {
    validate(bids, demand, gencos, price_cap)?;
    let mut dispatch = vec![0.0; gencos.len()];
    let total_offered: f64 = bids.iter().map(|b| b.quantity).sum();

    let clearing_price = if demand == 0.0 {
        0.0
    } else if demand > total_offered {
        for bid in bids {
            dispatch[bid.genco] = bid.quantity;
        }
        price_cap
    } else {
        let mut order: Vec<&Bid> = bids.iter().collect();
        order.sort_by(|a, b| a.price.total_cmp(&b.price));
        let mut supplied = 0.0;
        let mut price = 0.0;
        let mut start = 0;
        while start < order.len() {
            let group_price = order[start].price;
            let end = start
                + order[start..]
                    .iter()
                    .take_while(|b| b.price == group_price)
                    .count();
            let group = &order[start..end];
            let group_quantity: f64 = group.iter().map(|b| b.quantity).sum();
            price = group_price;
            if supplied + group_quantity >= demand {
                let residual = demand - supplied;
                for bid in group {
                    dispatch[bid.genco] = if supplied + group_quantity == demand {
                        bid.quantity
                    } else {
                        residual * bid.quantity / group_quantity
                    };
                }
                break;
            }
            for bid in group {
                dispatch[bid.genco] = bid.quantity;
            }
            supplied += group_quantity;
            start = end;
        }
        price
    };

    let profit = gencos
        .iter()
        .zip(&dispatch)
        .map(|(g, d)| (clearing_price - g.marginal_cost) * d - g.fixed_cost)
        .collect();
    Ok(ClearingResult {
        clearing_price,
        dispatch,
        profit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gencos(n: usize) -> Vec<GencoSpec> {
        (0..n)
            .map(|id| GencoSpec {
                id,
                capacity: 100.0,
                marginal_cost: 5.0 * id as f64,
                fixed_cost: 7.0 + id as f64,
            })
            .collect()
    }

    fn bid(genco: usize, price: f64, quantity: f64) -> Bid {
        Bid {
            genco,
            price,
            quantity,
        }
    }

    #[test]
    fn merit_order_example() {
        let bids = [bid(0, 10.0, 50.0), bid(1, 20.0, 50.0), bid(2, 30.0, 50.0)];
        let r = clear_uniform_price(&bids, 80.0, &gencos(3), 1000.0).unwrap();
        assert_eq!(r.clearing_price, 20.0);
        assert_eq!(r.dispatch, vec![50.0, 30.0, 0.0]);
        assert_eq!(r.profit[0], (20.0 - 0.0) * 50.0 - 7.0);
    }

    #[test]
    fn zero_demand() {
        let specs = gencos(3);
        let bids = [bid(0, 10.0, 50.0), bid(1, 20.0, 50.0), bid(2, 30.0, 50.0)];
        let r = clear_uniform_price(&bids, 0.0, &specs, 1000.0).unwrap();
        assert_eq!(r.clearing_price, 0.0);
        assert_eq!(r.dispatch, vec![0.0; 3]);
        for (p, g) in r.profit.iter().zip(&specs) {
            assert_eq!(*p, -g.fixed_cost);
        }
    }

    #[test]
    fn tie_split_pro_rata() {
        let r = clear_uniform_price(
            &[bid(0, 10.0, 50.0), bid(1, 10.0, 50.0)],
            60.0,
            &gencos(2),
            1000.0,
        )
        .unwrap();
        assert_eq!(r.clearing_price, 10.0);
        assert_eq!(r.dispatch, vec![30.0, 30.0]);
        let r = clear_uniform_price(
            &[bid(0, 10.0, 60.0), bid(1, 10.0, 20.0)],
            40.0,
            &gencos(2),
            1000.0,
        )
        .unwrap();
        assert_eq!(r.dispatch, vec![30.0, 10.0]);
    }

    #[test]
    fn scarcity_prices_at_cap() {
        let r = clear_uniform_price(
            &[bid(0, 10.0, 50.0), bid(1, 20.0, 30.0)],
            100.0,
            &gencos(2),
            1000.0,
        )
        .unwrap();
        assert_eq!(r.clearing_price, 1000.0);
        assert_eq!(r.dispatch, vec![50.0, 30.0]);
    }

    #[test]
    fn exact_fill_does_not_touch_next_offer() {
        let r = clear_uniform_price(
            &[bid(0, 10.0, 50.0), bid(1, 20.0, 30.0)],
            50.0,
            &gencos(2),
            1000.0,
        )
        .unwrap();
        assert_eq!(r.clearing_price, 10.0);
        assert_eq!(r.dispatch, vec![50.0, 0.0]);
    }

    #[test]
    fn invalid_bids_rejected() {
        let specs = gencos(2);
        let cases = [
            vec![bid(0, -1.0, 10.0)],
            vec![bid(0, 1001.0, 10.0)],
            vec![bid(0, 10.0, 0.0)],
            vec![bid(0, 10.0, 150.0)],
            vec![bid(5, 10.0, 10.0)],
            vec![bid(0, 10.0, 10.0), bid(0, 12.0, 10.0)],
        ];
        for bids in cases {
            assert!(matches!(
                clear_uniform_price(&bids, 10.0, &specs, 1000.0),
                Err(Error::Validation { .. })
            ));
        }
        assert!(matches!(
            clear_uniform_price(&[], 10.0, &specs, 1000.0),
            Err(Error::Argument(_))
        ));
        assert!(clear_uniform_price(&[bid(0, 10.0, 10.0)], -1.0, &specs, 1000.0).is_err());
    }
}
