"""Tests for the autodiff engine, layers, optimizer and checkpoints."""

from unittest.mock import patch

import numpy as np
import pytest

from autodiff import (
    Adam,
    BatchNorm2d,
    Conv2d,
    Module,
    Node,
    Parameter,
    adam_step,
    add,
    box_node,
    channel_max,
    concat_channels,
    constant,
    conv2d,
    detach,
    fgf_node,
    leaky_relu,
    load_checkpoint,
    mean,
    mul,
    param_count,
    save_checkpoint,
    sigmoid,
    square,
    sub,
    sum_,
    variable,
)
from autodiff.checkpoint import decode_checkpoint, encode_checkpoint
from autodiff.gradcheck import grad_check, relative_error
from errors import CheckpointError, NonFiniteError, ShapeError
from fgfgan.gradcheck_suite import FAMILY_CHECKS, GRADCHECK_TOLERANCE
from guided_filter import FilterParams, fast_guided_filter
from image_core import ImageTensor


def naive_conv(x, w, b, stride, pad):
    n, _, height, width = x.shape
    c_out, _, k, _ = w.shape
    padded = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    out_h = (height + 2 * pad - k) // stride + 1
    out_w = (width + 2 * pad - k) // stride + 1
    out = np.zeros((n, c_out, out_h, out_w))
    for i in range(out_h):
        for j in range(out_w):
            patch = padded[:, :, i * stride : i * stride + k, j * stride : j * stride + k]
            out[:, :, i, j] = np.tensordot(patch, w, axes=([1, 2, 3], [1, 2, 3])) + b
    return out


def test_backward_accumulates_shared_parents():
    """A node used twice receives the sum of both gradient paths."""
    x = variable(np.array([2.0, 3.0]))
    y = sum_(add(mul(x, x), x))
    y.backward()
    assert np.allclose(x.grad, 2 * x.value + 1)


def test_parameter_gradients_accumulate_until_zeroed():
    """Parameters add gradients across backward calls."""
    p = Parameter(np.ones(3))
    sum_(p).backward()
    sum_(p).backward()
    assert np.allclose(p.grad, 2.0)
    p.zero_grad()
    assert p.grad is None


def test_detach_blocks_gradient():
    """Gradients stop at a detached node."""
    p = Parameter(np.ones(2))
    out = sum_(mul(detach(mul(p, 3.0)), 2.0))
    out.backward()
    assert p.grad is None


def test_binary_ops_require_equal_shapes():
    """Only Python scalars broadcast."""
    with pytest.raises(ShapeError):
        add(constant(np.ones((2, 2))), constant(np.ones(2)))


def test_channel_max_routes_gradient_to_first_argmax():
    """Ties send the gradient to the first maximal channel only."""
    x = variable(np.ones((1, 3, 1, 1)))
    sum_(channel_max(x)).backward()
    assert x.grad[0, :, 0, 0].tolist() == [1.0, 0.0, 0.0]


def test_deep_chain_backward_is_iterative():
    """Long graphs do not hit the recursion limit."""
    x = variable(np.array(1.0))
    y = x
    for _ in range(5000):
        y = add(y, 1.0)
    y.backward()
    assert x.grad == pytest.approx(1.0)


@pytest.mark.parametrize("stride,pad", [(1, 1), (2, 1), (1, 0), (2, 0)])
def test_conv2d_matches_naive_oracle(rng, stride, pad):
    """im2col convolution equals a direct sliding-window transcription."""
    x = rng.standard_normal((2, 3, 7, 6))
    w = rng.standard_normal((4, 3, 3, 3))
    b = rng.standard_normal(4)
    out = conv2d(constant(x), constant(w), constant(b), stride=stride, pad=pad)
    assert np.allclose(out.value, naive_conv(x, w, b, stride, pad), atol=1e-10)


def test_conv2d_rejects_channel_mismatch(rng):
    """Kernel input channels must match the batch."""
    with pytest.raises(ShapeError):
        conv2d(constant(rng.standard_normal((1, 2, 4, 4))), constant(np.ones((1, 3, 3, 3))), constant(np.ones(1)))


def conv_with_grads(x, w, b, stride):
    xs, ws, bs = variable(x), Parameter(w), Parameter(b)
    out = conv2d(xs, ws, bs, stride=stride, pad=1)
    sum_(mul(out, Node(np.linspace(-1.0, 1.0, out.value.size).reshape(out.shape).astype(out.dtype)))).backward()
    return out.value, xs.grad, ws.grad, bs.grad


@pytest.mark.parametrize("stride", [1, 2])
def test_conv2d_chunked_matches_single_pass(rng, stride):
    """Splitting the batch into one-sample column chunks changes neither outputs nor gradients."""
    x = rng.standard_normal((3, 2, 8, 7))
    w = rng.standard_normal((4, 2, 3, 3))
    b = rng.standard_normal(4)
    whole = conv_with_grads(x, w, b, stride)
    with patch("autodiff.conv.COLUMN_BUDGET", 1):
        chunked = conv_with_grads(x, w, b, stride)
    for expected, actual in zip(whole, chunked):
        assert np.allclose(actual, expected, atol=1e-12)


def test_conv2d_and_box_stay_in_float32(rng):
    """float32 training tensors are not promoted by conv or box filtering."""
    x = rng.standard_normal((2, 3, 6, 6)).astype(np.float32)
    w = rng.standard_normal((2, 3, 3, 3)).astype(np.float32)
    b = np.zeros(2, dtype=np.float32)
    out, grad_x, grad_w, grad_b = conv_with_grads(x, w, b, 1)
    assert {a.dtype for a in (out, grad_x, grad_w, grad_b)} == {np.dtype(np.float32)}

    xs = variable(x)
    boxed = box_node(xs, 2)
    sum_(boxed).backward()
    assert boxed.dtype == np.float32
    assert xs.grad.dtype == np.float32


def test_batch_norm_train_output_is_normalized(rng):
    """Train mode normalizes each channel to zero mean and unit variance."""
    norm = BatchNorm2d(3)
    out = norm(constant(rng.standard_normal((4, 3, 5, 5)) * 3 + 2)).value
    assert np.allclose(out.mean(axis=(0, 2, 3)), 0.0, atol=1e-5)
    assert np.allclose(out.var(axis=(0, 2, 3)), 1.0, atol=1e-3)
    assert float(norm._buffers["batches_tracked"]) == 1


def test_batch_norm_eval_uses_running_stats(rng):
    """Eval mode normalizes with running statistics."""
    norm = BatchNorm2d(2)
    x = rng.standard_normal((8, 2, 4, 4)).astype(np.float32)
    norm(constant(x))
    norm.eval()
    out = norm(constant(x)).value
    expected = (x - norm._buffers["running_mean"][None, :, None, None]) / np.sqrt(
        norm._buffers["running_var"][None, :, None, None] + 1e-5
    )
    assert np.allclose(out, expected, atol=1e-5)


def test_box_node_matches_array_filter(rng):
    """The differentiable box filter forwards like the plain one."""
    from guided_filter import box_filter_array

    x = rng.standard_normal((2, 3, 6, 9))
    assert np.allclose(box_node(constant(x), 2).value, box_filter_array(x, 2))


def test_fgf_node_matches_image_filter(rng):
    """Graph FGF equals the image-level fast guided filter term for term."""
    params = FilterParams(r=1, eps=1e-3, s=2)
    guide_lo = rng.uniform(size=(1, 1, 5, 4))
    src_lo = rng.uniform(size=(1, 3, 5, 4))
    guide_hi = rng.uniform(size=(1, 1, 10, 8))
    graph = fgf_node(constant(guide_lo), constant(src_lo), constant(guide_hi), params).value[0]
    image = fast_guided_filter(ImageTensor(guide_lo[0]), ImageTensor(src_lo[0]), ImageTensor(guide_hi[0]), params)
    assert np.allclose(graph, image.data, atol=1e-5)


@pytest.mark.parametrize("family", sorted(FAMILY_CHECKS))
def test_gradients_match_finite_differences(family):
    """Every layer family passes the 64-bit finite-difference check."""
    assert FAMILY_CHECKS[family](0) < GRADCHECK_TOLERANCE


def test_relative_error_definition():
    """Relative error uses the larger magnitude as denominator."""
    assert relative_error(1.0, 1.1) == pytest.approx(0.1 / 1.1)
    assert relative_error(0.0, 0.0) == 0.0


def test_adam_first_step_moves_by_lr():
    """Bias-corrected Adam moves each weight by ~lr on the first step."""
    p = Parameter(np.array([1.0, -1.0]))
    adam_step([p], [np.array([0.5, -2.0])], lr=0.1, t=1)
    assert np.allclose(p.value, [0.9, -0.9], atol=1e-6)


def test_adam_rejects_non_finite_gradient():
    """NaN gradients abort with the parameter name and step."""
    p = Parameter(np.ones(2), name="conv.weight")
    with pytest.raises(NonFiniteError, match="conv.weight"):
        adam_step([p], [np.array([np.nan, 0.0])], lr=0.1, t=3)


def test_adam_minimizes_quadratic():
    """A few hundred steps drive a quadratic to its minimum."""
    p = Parameter(np.array([3.0, -2.0]))
    opt = Adam([p], lr=0.05)
    for _ in range(500):
        opt.zero_grad()
        sum_(square(sub(p, 1.0))).backward()
        opt.step()
    assert np.allclose(p.value, 1.0, atol=5e-2)


class TwoLayer(Module):
    def __init__(self):
        super().__init__()
        self.first = Conv2d(1, 2, rng=np.random.default_rng(0))
        self.norm = BatchNorm2d(2)
        self.assign_names()


def test_module_naming_and_param_count():
    """Parameters are named by attribute path and counted exactly."""
    net = TwoLayer()
    names = [name for name, _ in net.named_parameters()]
    assert names == ["first.weight", "first.bias", "norm.gamma", "norm.beta"]
    assert net.first.weight.name == "first.weight"
    assert param_count(net) == 2 * 9 + 2 + 2 + 2


def test_state_dict_round_trip_through_checkpoint(tmp_path):
    """Weights, buffers and Adam moments survive an FCKPT round trip."""
    net = TwoLayer()
    net.first.weight.moment1 += 0.5
    path = tmp_path / "net.fckpt"
    save_checkpoint(path, net.state_dict(include_optimizer=True))

    other = TwoLayer()
    other.first.weight.value = other.first.weight.value * 0
    other.load_state_dict(load_checkpoint(path))
    assert np.array_equal(other.first.weight.value, net.first.weight.value)
    assert np.allclose(other.first.weight.moment1, 0.5)
    assert np.array_equal(other.norm._buffers["running_var"], net.norm._buffers["running_var"])


def test_load_state_dict_reports_missing_and_mismatched():
    """Missing names and shape mismatches are checkpoint errors."""
    net = TwoLayer()
    state = net.state_dict()
    del state["norm.beta"]
    with pytest.raises(CheckpointError, match="norm.beta"):
        TwoLayer().load_state_dict(state)
    state = net.state_dict()
    state["first.bias"] = np.zeros(3)
    with pytest.raises(CheckpointError):
        TwoLayer().load_state_dict(state)


def test_checkpoint_decoding_errors():
    """Bad magic, truncation and trailing bytes are rejected."""
    blob = encode_checkpoint({"w": np.arange(6, dtype=np.float32).reshape(2, 3)})
    assert decode_checkpoint(blob)["w"].shape == (2, 3)
    with pytest.raises(CheckpointError):
        decode_checkpoint(b"NOPE" + blob[4:])
    with pytest.raises(CheckpointError):
        decode_checkpoint(blob[:-4])
    with pytest.raises(CheckpointError):
        decode_checkpoint(blob + b"\x00")


def test_mean_of_graph_value():
    """Reductions produce 0-d values usable as losses."""
    x = variable(np.arange(4.0))
    m = mean(x)
    m.backward()
    assert m.item() == pytest.approx(1.5)
    assert np.allclose(x.grad, 0.25)


def test_concat_channels_splits_gradient():
    """Concatenation hands each input its own gradient slice."""
    a = variable(np.ones((1, 1, 2, 2)))
    b = variable(np.ones((1, 2, 2, 2)))
    out = concat_channels([a, b])
    sum_(mul(out, Node(np.arange(12.0).reshape(1, 3, 2, 2)))).backward()
    assert np.allclose(a.grad, np.arange(4.0).reshape(1, 1, 2, 2))
    assert b.grad.shape == (1, 2, 2, 2)


def square_with_bad_entry(x: Node, bad_index: int) -> Node:
    def backward(g):
        grad = 2.0 * g * x.value
        if bad_index >= 0:
            grad.reshape(-1)[bad_index] += 1.0
        return (grad,)

    return Node(x.value * x.value, (x,), "square", backward)


@pytest.mark.parametrize("bad_index", [-1, 7, 199])
def test_grad_check_compares_every_entry(rng, bad_index):
    """A backward that is wrong at a single entry is caught; a correct one passes."""
    x = rng.uniform(0.5, 1.5, (4, 50))
    error = grad_check(lambda n: square_with_bad_entry(n[0], bad_index), [x])
    if bad_index < 0:
        assert error < GRADCHECK_TOLERANCE
    else:
        assert error > 0.1


def test_grad_check_restores_parameters(rng):
    """Parameters come back with their original dtype and value."""
    conv = Conv2d(2, 2, rng=rng)
    before = conv.weight.value.copy()
    grad_check(lambda n: conv(n[0]), [rng.standard_normal((1, 2, 4, 4))], conv)
    assert conv.weight.value.dtype == np.float32
    assert np.array_equal(conv.weight.value, before)
    assert conv.weight.grad is None


def test_gradient_is_linear_in_the_loss():
    """The gradient of a weighted sum of losses is the weighted sum of gradients."""
    values = np.array([0.5, -1.0, 2.0])
    weights = Node(np.array([3.0, 1.0, -2.0]))

    def gradient_of(build):
        x = variable(values)
        build(x).backward()
        return x.grad

    first = gradient_of(lambda x: sum_(square(x)))
    second = gradient_of(lambda x: sum_(mul(x, weights)))
    combined = gradient_of(lambda x: add(mul(sum_(square(x)), 2.0), mul(sum_(mul(x, weights)), -0.5)))
    assert np.allclose(combined, 2.0 * first - 0.5 * second)


def test_adam_zero_gradient_leaves_parameter():
    """A zero gradient moves nothing, even with bias correction."""
    p = Parameter(np.array([0.3, -0.7]))
    adam_step([p], [np.zeros(2)], lr=5e-4, t=1)
    assert np.array_equal(p.value, [0.3, -0.7])


def test_adam_first_step_at_training_rate():
    """The first step at lr 5e-4 moves a weight by -5e-4 against a positive gradient."""
    p = Parameter(np.array([1.0]))
    adam_step([p], [np.array([0.25])], lr=5e-4, t=1)
    assert p.value[0] - 1.0 == pytest.approx(-5e-4, rel=1e-6)


def test_adam_steps_are_deterministic():
    """Two identical ten-step runs end at bitwise-equal weights."""

    def run():
        p = Parameter(np.array([3.0, -2.0, 0.5], dtype=np.float32))
        opt = Adam([p], lr=5e-4)
        for _ in range(10):
            opt.zero_grad()
            sum_(square(sub(p, 1.0))).backward()
            opt.step()
        return p.value

    first, second = run(), run()
    assert np.array_equal(first, second)
    assert not np.array_equal(first, np.array([3.0, -2.0, 0.5], dtype=np.float32))


def test_sigmoid_and_leaky_relu_at_known_points():
    """sigmoid'(0) is 1/4 and leaky ReLU maps -1 to -0.2 with slope 0.2."""
    x = variable(np.array([0.0]))
    sum_(sigmoid(x)).backward()
    assert x.grad[0] == pytest.approx(0.25)

    y = variable(np.array([-1.0, 2.0]))
    out = leaky_relu(y)
    sum_(out).backward()
    assert np.allclose(out.value, [-0.2, 2.0])
    assert np.allclose(y.grad, [0.2, 1.0])


def test_fgf_high_res_guide_gradient_vanishes_for_large_eps(rng):
    """With eps far above the local variance, a ~ 0 and the output ignores the high-res guide."""
    params = FilterParams(r=1, eps=1e6, s=2)
    guide_lo = variable(rng.uniform(0, 1, (1, 1, 4, 4)))
    src_lo = variable(rng.uniform(0, 1, (1, 2, 4, 4)))
    guide_hi = variable(rng.uniform(0, 1, (1, 1, 8, 8)))
    sum_(fgf_node(guide_lo, src_lo, guide_hi, params)).backward()
    assert np.max(np.abs(guide_hi.grad)) < 1e-6
    assert np.max(np.abs(src_lo.grad)) > 0.1
