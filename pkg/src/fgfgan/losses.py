"""Least-squares adversarial objectives with an L1 fidelity term."""

from typing import NamedTuple, Optional

from autodiff import Node, abs_, add, mean, mul, square, sub


class GeneratorLoss(NamedTuple):
    total: Node
    l1: Node
    adversarial: Optional[Node]


def l1_loss(candidate: Node, reference: Node) -> Node:
    return mean(abs_(sub(reference, candidate)))


def generator_loss_terms(
    candidate: Node,
    reference: Node,
    d_scores: Optional[Node],
    alpha: float,
    label_a: float,
) -> GeneratorLoss:
    """L1 plus ``alpha`` times the mean squared distance of D's scores to ``label_a``.

    With ``d_scores`` None or ``alpha`` zero only the L1 term remains.
    """
    l1 = l1_loss(candidate, reference)
    if d_scores is None or alpha == 0:
        return GeneratorLoss(l1, l1, None)
    adversarial = mean(square(sub(d_scores, label_a)))
    return GeneratorLoss(add(l1, mul(adversarial, alpha)), l1, adversarial)


def generator_loss(
    candidate: Node,
    reference: Node,
    d_scores: Optional[Node],
    alpha: float,
    label_a: float,
) -> Node:
    return generator_loss_terms(candidate, reference, d_scores, alpha, label_a).total


def discriminator_loss(d_fake: Node, d_real: Node, label_b: float, label_c: float) -> Node:
    return add(mean(square(sub(d_fake, label_b))), mean(square(sub(d_real, label_c))))
