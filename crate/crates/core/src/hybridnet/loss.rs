use super::{QNetwork, QValues};
use crate::error::{Error, Result};
use crate::marl::Transition;

/// Bootstrapped target `r + γ·max_a' Q(s', a')`, or just `r` at a terminal step.
pub fn td_target(reward: f64, gamma: f64, next_q: &QValues, done: bool) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Argument(format!("discount {gamma} outside [0, 1]")));
    }
    let max = next_q
        .max()
        .ok_or_else(|| Error::dim("next-state Q-values", 1, 0))?;
    Ok(if done { reward } else { reward + gamma * max })
}

/// Tabular Q-learning update `q + α·(target − q)`.
pub fn q_update_tabular(q: f64, alpha: f64, target: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Argument(format!(
            "learning rate {alpha} outside (0, 1]"
        )));
    }
    Ok(q + alpha * (target - q))
}

fn check_batch<N: QNetwork>(batch: &[Transition], net: &N) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::Argument("empty batch".into()));
    }
    if let Some(t) = batch.iter().find(|t| t.action >= net.n_actions()) {
        return Err(Error::Index {
            what: "actions",
            index: t.action,
            len: net.n_actions(),
        });
    }
    Ok(())
}

/// Mean squared TD error over the batch, with targets from `target_net`.
pub fn batch_loss<N: QNetwork>(
    batch: &[Transition],
    net: &N,
    target_net: &N,
    gamma: f64,
) -> Result<f64> {
    check_batch(batch, net)?;
    let mut total = 0.0;
    for t in batch {
        let target = td_target(t.reward, gamma, &target_net.forward(&t.next_state)?, t.done)?;
        let q = net.forward(&t.state)?;
        let residual = target - q.values()[t.action];
        total += residual * residual;
    }
    Ok(total / batch.len() as f64)
}

/// Batch loss together with its gradient over every parameter of `net`.
///
/// The target network enters only through constants. Per-transition
/// gradients are accumulated in batch order.
pub fn loss_and_gradients<N: QNetwork>(
    batch: &[Transition],
    net: &N,
    target_net: &N,
    gamma: f64,
) -> Result<(f64, Vec<f64>)> {
    check_batch(batch, net)?;
    let n = batch.len() as f64;
    let mut grad = vec![0.0; net.param_count()];
    let mut grad_q = vec![0.0; net.n_actions()];
    let mut total = 0.0;
    for t in batch {
        let target = td_target(t.reward, gamma, &target_net.forward(&t.next_state)?, t.done)?;
        let trace = net.trace(&t.state)?;
        let residual = target - net.trace_q(&trace).values()[t.action];
        total += residual * residual;
        grad_q.fill(0.0);
        grad_q[t.action] = -2.0 * residual / n;
        net.backward(&trace, &grad_q, &mut grad)?;
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::Numeric("loss gradient".into()));
    }
    Ok((total / n, grad))
}

/// Gradient of [`batch_loss`] with respect to every parameter of `net`.
pub fn gradients<N: QNetwork>(
    batch: &[Transition],
    net: &N,
    target_net: &N,
    gamma: f64,
) -> Result<Vec<f64>> {
    loss_and_gradients(batch, net, target_net, gamma).map(|(_, g)| g)
}
